#include "autochecker/llm.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "autochecker/errors.hpp"
#include "http_util.hpp"
#include "json_lines.hpp"

namespace autochecker {

const char* llm_role_name(LlmRole role) {
    switch (role) {
        case LlmRole::decompose: return "decompose";
        case LlmRole::generate: return "generate";
        case LlmRole::refine: return "refine";
    }
    return "generate";
}

LlmRole llm_role_from_name(const std::string& name) {
    if (name == "decompose") return LlmRole::decompose;
    if (name == "generate") return LlmRole::generate;
    if (name == "refine") return LlmRole::refine;
    throw Error("unknown llm role: " + name);
}

std::vector<TranscriptEntry> parse_transcript(const std::string& doc) {
    std::vector<TranscriptEntry> entries;
    detail::for_each_record(
        doc,
        [&](std::size_t index, const detail::json& rec) {
            TranscriptEntry entry;
            bool ok = false;
            std::string role = detail::get_string(rec, "role", ok);
            if (!ok)
                throw TranscriptError("transcript record " + std::to_string(index) +
                                      ": missing role");
            entry.role = llm_role_from_name(role);
            entry.response = rec.value("response", "");
            entries.push_back(std::move(entry));
        },
        [](std::size_t index, const std::string&) {
            throw TranscriptError("transcript record " + std::to_string(index) +
                                  ": unparseable");
        });
    return entries;
}

std::vector<TranscriptEntry> load_transcript_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TranscriptError("cannot read transcript: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_transcript(buf.str());
}

std::string ScriptedLlmClient::generate(const std::string& prompt, LlmRole role) {
    if (next_ >= entries_.size())
        throw TranscriptError("transcript exhausted after " + std::to_string(next_) +
                              " entries (next role would be " +
                              llm_role_name(role) + ")");
    const TranscriptEntry& entry = entries_[next_];
    if (entry.role != role)
        throw TranscriptError("transcript entry " + std::to_string(next_ + 1) +
                              ": expected role " + llm_role_name(entry.role) +
                              ", engine asked for " + llm_role_name(role));
    ++next_;
    prompts_.emplace_back(role, prompt);
    return entry.response;
}

HttpLlmClient::HttpLlmClient(std::string endpoint, std::string model)
    : endpoint_(std::move(endpoint)), model_(std::move(model)) {}

std::string HttpLlmClient::generate(const std::string& prompt, LlmRole) {
    nlohmann::json body;
    body["model"] = model_;
    body["messages"] = nlohmann::json::array({
        nlohmann::json{{"role", "user"}, {"content", prompt}},
    });
    std::string token;
    if (const char* key = std::getenv("AUTOCHECKER_API_KEY")) token = key;
    std::string response;
    std::string err;
    if (!detail::http_post_json(endpoint_, body.dump(), response, err, token))
        throw LlmError("chat completion failed: " + err);
    auto parsed = nlohmann::json::parse(response, nullptr, false);
    if (parsed.is_discarded())
        throw LlmError("chat completion returned malformed JSON");
    try {
        return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw LlmError("chat completion response missing choices[0].message.content");
    }
}

}  // namespace autochecker
