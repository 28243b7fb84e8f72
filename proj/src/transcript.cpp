#include "textlab/transcript.hpp"

#include <cctype>
#include <cmath>

#include <json.hpp>

namespace textlab {

std::string category_name(Category c) {
    switch (c) {
        case Category::valid: return "valid";
        case Category::invalid_syntax: return "invalid_syntax";
        case Category::invalid_object: return "invalid_object";
        case Category::affordance_violation: return "affordance_violation";
        case Category::redundant: return "redundant";
        case Category::other: return "other";
    }
    return "other";
}

namespace {

Category category_from_name(const std::string& s) {
    if (s == "valid") return Category::valid;
    if (s == "invalid_syntax") return Category::invalid_syntax;
    if (s == "invalid_object") return Category::invalid_object;
    if (s == "affordance_violation") return Category::affordance_violation;
    if (s == "redundant") return Category::redundant;
    return Category::other;
}

}  // namespace

std::string render_turn(const DialogTurn& t) {
    return "A: " + t.action + "\nG: " + t.reply + "\n";
}

std::string render_transcript(const Transcript& t) {
    if (t.turns.empty()) return t.description;
    std::string out = t.description + "\n\n";
    for (const DialogTurn& turn : t.turns) out += render_turn(turn);
    return out;
}

Transcript parse_transcript(const std::string& text) {
    Transcript t;
    std::size_t sep = text.find("\n\nA: ");
    if (sep == std::string::npos) {
        t.description = text;
        return t;
    }
    t.description = text.substr(0, sep);
    std::size_t pos = sep + 2;  // start of first "A: " line
    while (pos < text.size()) {
        if (text.compare(pos, 3, "A: ") != 0) {
            throw std::runtime_error("malformed transcript: expected action line");
        }
        std::size_t a_start = pos + 3;
        std::size_t a_end = text.find('\n', a_start);
        if (a_end == std::string::npos) {
            throw std::runtime_error("malformed transcript: unterminated action line");
        }
        std::size_t g_start = a_end + 1;
        if (text.compare(g_start, 3, "G: ") != 0) {
            throw std::runtime_error("malformed transcript: expected reply line");
        }
        // Reply runs to the next "\nA: " or to end of text (minus the
        // trailing newline render_turn always emits). Replies may contain
        // embedded newlines, so scan for the next turn marker rather than
        // the next line break.
        std::size_t g_end = text.find("\nA: ", g_start);
        std::size_t reply_end;
        if (g_end == std::string::npos) {
            reply_end = text.size();
            if (reply_end > g_start && text[reply_end - 1] == '\n') --reply_end;
            pos = text.size();
        } else {
            reply_end = g_end;
            pos = g_end + 1;
        }
        DialogTurn turn;
        turn.action = text.substr(a_start, a_end - a_start);
        turn.reply = text.substr(g_start + 3, reply_end - (g_start + 3));
        t.turns.push_back(std::move(turn));
    }
    return t;
}

int default_piece_counter(const std::string& text) {
    int raw = 0;
    bool in_word = false;
    for (char ch : text) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (std::isspace(c)) {
            in_word = false;
        } else if (std::ispunct(c)) {
            ++raw;  // every punctuation char is its own piece
            in_word = false;
        } else {
            if (!in_word) ++raw;
            in_word = true;
        }
    }
    return static_cast<int>(std::ceil(1.3 * raw));
}

PackResult pack_context(const Transcript& t, PackMode mode, int max_pieces,
                        const PieceCounter& counter) {
    constexpr const char* kCue = "A:";

    auto body_of = [&](std::size_t first_turn) {
        Transcript view;
        view.description = t.description;
        view.turns.assign(t.turns.begin() + static_cast<std::ptrdiff_t>(first_turn),
                          t.turns.end());
        return render_transcript(view);
    };

    if (mode == PackMode::markov) {
        if (t.turns.empty()) {
            throw std::runtime_error("markov packing requires at least one prior turn");
        }
        std::string body = body_of(t.turns.size() - 1);
        int used = counter(body);
        if (used > max_pieces) throw std::runtime_error("latest turn exceeds budget");
        return {body + kCue, 1, used};
    }

    // full history: maximal suffix of whole turns that fits
    for (std::size_t first = 0; first <= t.turns.size(); ++first) {
        std::string body = body_of(first);
        int used = counter(body);
        if (used <= max_pieces) {
            return {body + kCue, static_cast<int>(t.turns.size() - first), used};
        }
        if (first + 1 == t.turns.size()) {
            // even the single most recent turn does not fit
            throw std::runtime_error("latest turn exceeds budget");
        }
    }
    // no turns at all and the bare description does not fit
    throw std::runtime_error("latest turn exceeds budget");
}

// --- JSONL ------------------------------------------------------------------

std::string episode_to_jsonl(const EpisodeRecord& rec) {
    nlohmann::json j;
    j["variation_id"] = rec.variation_id;
    j["seed"] = rec.seed;
    j["final_score"] = rec.final_score;
    j["outcome"] = rec.outcome;
    nlohmann::json turns = nlohmann::json::array();
    for (const EpisodeTurnRecord& t : rec.turns) {
        nlohmann::json jt;
        jt["a"] = t.action;
        jt["g"] = t.reply;
        jt["score"] = t.score;
        jt["category"] = category_name(t.category);
        jt["intercepted"] = t.intercepted;
        turns.push_back(std::move(jt));
    }
    j["turns"] = std::move(turns);
    return j.dump();
}

EpisodeRecord episode_from_jsonl(const std::string& line) {
    nlohmann::json j = nlohmann::json::parse(line);
    EpisodeRecord rec;
    rec.variation_id = j.at("variation_id").get<std::string>();
    rec.seed = j.at("seed").get<std::uint64_t>();
    rec.final_score = j.at("final_score").get<double>();
    rec.outcome = j.at("outcome").get<std::string>();
    for (const auto& jt : j.at("turns")) {
        EpisodeTurnRecord t;
        t.action = jt.at("a").get<std::string>();
        t.reply = jt.at("g").get<std::string>();
        t.score = jt.at("score").get<double>();
        t.category = category_from_name(jt.at("category").get<std::string>());
        t.intercepted = jt.value("intercepted", false);
        rec.turns.push_back(std::move(t));
    }
    return rec;
}

}  // namespace textlab
