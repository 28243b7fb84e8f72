#include "textlab/messages.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace textlab {

MessageCatalog MessageCatalog::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("message catalog not found: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

MessageCatalog MessageCatalog::from_json_text(const std::string& text) {
    MessageCatalog cat;
    nlohmann::json j = nlohmann::json::parse(text);
    for (auto it = j.begin(); it != j.end(); ++it) {
        cat.templates_[it.key()] = it.value().get<std::string>();
    }
    return cat;
}

const std::string& MessageCatalog::get(const std::string& key) const {
    auto it = templates_.find(key);
    if (it == templates_.end()) throw std::runtime_error("unknown message key: " + key);
    return it->second;
}

std::string MessageCatalog::format(
    const std::string& key,
    std::initializer_list<std::pair<std::string_view, std::string_view>> subs) const {
    return substitute_placeholders(get(key), subs);
}

std::string substitute_placeholders(
    std::string_view tmpl,
    std::initializer_list<std::pair<std::string_view, std::string_view>> subs) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            std::size_t close = tmpl.find('}', i);
            if (close != std::string_view::npos) {
                std::string_view name = tmpl.substr(i + 1, close - i - 1);
                bool found = false;
                for (const auto& [k, v] : subs) {
                    if (k == name) {
                        out.append(v);
                        found = true;
                        break;
                    }
                }
                if (found) {
                    i = close + 1;
                    continue;
                }
            }
        }
        out.push_back(tmpl[i]);
        ++i;
    }
    return out;
}

std::string substitute_placeholders(std::string_view tmpl,
                                    const std::map<std::string, std::string>& subs) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            std::size_t close = tmpl.find('}', i);
            if (close != std::string_view::npos) {
                auto it = subs.find(std::string(tmpl.substr(i + 1, close - i - 1)));
                if (it != subs.end()) {
                    out.append(it->second);
                    i = close + 1;
                    continue;
                }
            }
        }
        out.push_back(tmpl[i]);
        ++i;
    }
    return out;
}

std::string format_degrees(double value) {
    double rounded = std::round(value);
    if (std::fabs(value - rounded) < 1e-9) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.0f", rounded);
        return buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", value);
    return buf;
}

}  // namespace textlab
