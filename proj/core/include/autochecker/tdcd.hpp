#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "autochecker/harness.hpp"
#include "autochecker/llm.hpp"
#include "autochecker/minilint.hpp"
#include "autochecker/retrieval.hpp"
#include "autochecker/suite.hpp"

namespace autochecker {

struct TdcdConfig {
    int max_retry_times = 5;
    /// 0 means "derive as round_cap_factor * |suite|".
    int round_cap = 0;
    int round_cap_factor = 3;
    bool feedback_in_retry = false;
};

/// The loop's three test sets plus counters; exposed for observation and
/// property tests, the engine owns the transitions.
struct TdcdState {
    std::set<std::string> candidate_pool;  // T_c
    std::set<std::string> passed;          // T_p
    std::set<std::string> skipped;         // T_s
    int round = 0;
    int attempt = 0;
    std::optional<minilint::CheckerArtifact> current_checker;
    std::optional<ValidationReport> last_report;
};

struct AttemptRecord {
    int attempt = 0;  // 1-based within the round
    LlmRole role{LlmRole::generate};
    bool llm_failed = false;
    bool compile_ok = false;
    std::vector<std::string> passed;
    std::vector<std::string> failed;
    bool accepted = false;
};

struct RoundRecord {
    int round = 0;
    std::string selected_test;
    bool decompose_failed = false;
    std::vector<std::string> subops;
    std::vector<SubopHit> per_subop;
    std::vector<std::string> context_hashes;  // payload hashes, result order
    std::vector<AttemptRecord> attempts;
    bool accepted = false;
    // state snapshots after the round's set update
    std::set<std::string> t_c_after;
    std::set<std::string> t_p_after;
    std::set<std::string> t_s_after;
};

struct TdcdOutcome {
    std::optional<minilint::CheckerArtifact> final_checker;
    Rational final_pass_rate;
    std::optional<ValidationReport> final_report;
    std::vector<RoundRecord> replay;
    int rounds = 0;
    bool round_cap_reached = false;
};

struct TdcdDeps {
    const RetrievalService* retriever = nullptr;
    const CheckerBackend* backend = nullptr;
    const Catalog* catalog = nullptr;
    LlmClient* llm = nullptr;
    std::string template_source;
    /// Incremental mode: seed the loop with an existing checker, so the very
    /// first attempt refines it instead of generating from scratch.
    std::optional<minilint::CheckerArtifact> prior_checker;
};

/// Smallest-ordinal member of the pool; the suite order encodes difficulty.
const TestCase& pick_next_test(const std::set<std::string>& pool, const TestSuite& suite);

enum class PromptKind { initial, refine };

/// Sections in fixed order: rule description, test case code, test case AST,
/// related API-contexts, checker template; refine appends the prior checker.
/// An optional failure-feedback paragraph goes last when enabled.
std::string build_prompt(PromptKind kind, const CheckerRule& rule, const TestCase& test,
                         const std::string& ast_dump, const std::string& tmpl,
                         const std::vector<ApiContext>& contexts,
                         const std::string& prior_checker = "",
                         const std::string& feedback = "");

/// Accept iff the selected test passed and no previously-passed test failed.
bool accept_round(const ValidationReport& report, const std::string& test_id,
                  const std::set<std::string>& passed_before);

/// First fenced code block if present, else the whole response.
std::string extract_checker_source(const std::string& llm_response);

std::uint64_t payload_hash(const std::string& payload);

TdcdOutcome run_tdcd(const CheckerRule& rule, const TestSuite& suite,
                     const TdcdDeps& deps, const TdcdConfig& config);

/// One line per attempt: round, attempt, selected test, sub-ops, per-sub-op
/// hits, context payload hashes, compile status, passed/failed ids, accepted.
std::string replay_log(const TdcdOutcome& outcome);

}  // namespace autochecker
