#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace textlab {

// How an emitted action was classified by the episode runner.
enum class Category : std::uint8_t {
    valid,                 // parsed, resolved, and executed by the engine
    invalid_syntax,        // not a sentence in the action grammar
    invalid_object,        // grammar ok, but an argument names nothing present
    affordance_violation,  // well-formed but physically impossible
    redundant,             // well-formed but changes nothing
    other,                 // residual (blank emissions etc.)
};

std::string category_name(Category c);

struct TurnAnnotation {
    double score_after = 0.0;
    Category category = Category::valid;
    bool intercepted = false;
};

// One exchange: agent line ("A: ...") followed by game line ("G: ...").
struct DialogTurn {
    std::string action;
    std::string reply;
    std::optional<TurnAnnotation> note;
};

struct Transcript {
    std::string description;  // task instructions shown before the first turn
    std::vector<DialogTurn> turns;
};

// Serialized dialog form:
//   {description}\n\n A: {a}\nG: {g}\n per turn (description alone if no turns).
std::string render_transcript(const Transcript& t);
std::string render_turn(const DialogTurn& t);

// Inverse of render_transcript for well-formed input; throws on malformed text.
Transcript parse_transcript(const std::string& text);

// Estimates how many model pieces a string costs: whitespace-separated runs,
// with every punctuation character counted as its own piece, scaled by 1.3
// and rounded up.
int default_piece_counter(const std::string& text);

using PieceCounter = std::function<int(const std::string&)>;

enum class PackMode {
    full_history,  // longest suffix of whole turns that fits the budget
    markov,        // exactly the most recent turn
};

struct PackResult {
    std::string prompt;       // ends with the "A:" cue
    int turns_included = 0;   // whole turns present in the prompt
    int pieces_used = 0;      // cost of the prompt body (cue excluded)
};

// Builds the inference prompt for the next action. The trailing "A:" cue is
// always appended and never counted against max_pieces. Throws
// std::runtime_error("latest turn exceeds budget") when even the most recent
// turn cannot fit alongside the description.
PackResult pack_context(const Transcript& t, PackMode mode, int max_pieces,
                        const PieceCounter& counter = default_piece_counter);

// --- JSONL episode records --------------------------------------------------

struct EpisodeTurnRecord {
    std::string action;
    std::string reply;
    double score = 0.0;
    Category category = Category::valid;
    bool intercepted = false;
};

struct EpisodeRecord {
    std::string variation_id;
    std::uint64_t seed = 0;
    std::vector<EpisodeTurnRecord> turns;
    double final_score = 0.0;
    std::string outcome;  // "won" | "lost" | "limit_reached" | "aborted"
};

std::string episode_to_jsonl(const EpisodeRecord& rec);
EpisodeRecord episode_from_jsonl(const std::string& line);

}  // namespace textlab
