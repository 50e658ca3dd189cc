#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace autochecker {

enum class LlmRole { decompose, generate, refine };

const char* llm_role_name(LlmRole role);
LlmRole llm_role_from_name(const std::string& name);

class LlmClient {
public:
    virtual ~LlmClient() = default;
    /// Throws LlmError on transport failure.
    virtual std::string generate(const std::string& prompt, LlmRole role) = 0;
};

struct TranscriptEntry {
    LlmRole role{LlmRole::generate};
    std::string response;
};

std::vector<TranscriptEntry> parse_transcript(const std::string& doc);
std::vector<TranscriptEntry> load_transcript_file(const std::string& path);

/// Replays a recorded transcript strictly in order. A role mismatch or an
/// exhausted transcript is a harness bug and raises TranscriptError.
class ScriptedLlmClient final : public LlmClient {
public:
    explicit ScriptedLlmClient(std::vector<TranscriptEntry> entries)
        : entries_(std::move(entries)) {}

    std::string generate(const std::string& prompt, LlmRole role) override;

    std::size_t consumed() const { return next_; }
    std::size_t remaining() const { return entries_.size() - next_; }
    const std::vector<std::pair<LlmRole, std::string>>& seen_prompts() const {
        return prompts_;
    }

private:
    std::vector<TranscriptEntry> entries_;
    std::size_t next_ = 0;
    std::vector<std::pair<LlmRole, std::string>> prompts_;
};

/// Chat-completion client. Posts {"model", "messages":[{"role":"user",...}]}
/// to the configured endpoint and returns choices[0].message.content.
/// Reads the API key from AUTOCHECKER_API_KEY; never from config files.
class HttpLlmClient final : public LlmClient {
public:
    HttpLlmClient(std::string endpoint, std::string model);
    std::string generate(const std::string& prompt, LlmRole role) override;

private:
    std::string endpoint_;
    std::string model_;
};

}  // namespace autochecker
