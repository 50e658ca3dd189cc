#pragma once

// Internal helpers for the line-delimited JSON documents used by manifests,
// meta-op sets, databases, transcripts and replay logs. Not installed.

#include <functional>
#include <sstream>
#include <string>

#include <json.hpp>

namespace autochecker::detail {

using json = nlohmann::json;

/// Calls fn(record_index, parsed) for every non-blank line. record_index is
/// 1-based. Parse failures are surfaced through on_bad_line.
inline void for_each_record(const std::string& doc,
                            const std::function<void(std::size_t, const json&)>& fn,
                            const std::function<void(std::size_t, const std::string&)>&
                                on_bad_line) {
    std::istringstream in(doc);
    std::string line;
    std::size_t index = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        bool blank = line.find_first_not_of(" \t") == std::string::npos;
        if (blank) continue;
        ++index;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded()) {
            on_bad_line(index, line);
            continue;
        }
        fn(index, rec);
    }
}

inline std::string get_string(const json& rec, const char* key, bool& present) {
    auto it = rec.find(key);
    if (it == rec.end() || !it->is_string()) {
        present = false;
        return {};
    }
    present = true;
    return it->get<std::string>();
}

}  // namespace autochecker::detail
