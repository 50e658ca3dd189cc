#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "autochecker/harness.hpp"
#include "autochecker/tdcd.hpp"

namespace autochecker {

struct RuleEvalResult {
    std::string name;
    bool ok = false;
    std::string error;  // rule-level failure, other rules continue
    Rational tpr;
    int rounds = 0;
    std::vector<std::string> skipped;
    bool compile_ok = false;
    bool round_cap_reached = false;
    std::optional<ValidationReport> final_report;
};

struct EvalDocument {
    std::vector<RuleEvalResult> rules;  // rule-name order
    Metrics metrics;
    int runs = 1;
};

struct EvalEnv {
    const RetrievalService* retriever = nullptr;
    const CheckerBackend* backend = nullptr;
    const Catalog* catalog = nullptr;
    std::string template_source;
    TdcdConfig tdcd;
    /// Fresh client per rule per run so transcript state never leaks between
    /// rules. Must be callable concurrently when jobs > 1.
    std::function<std::unique_ptr<LlmClient>(const std::filesystem::path& rule_dir)>
        make_llm;
};

/// Evaluates the whole ruleset once per run and reports the run with the
/// highest average pass rate. Rule-level errors are recorded in the document
/// without aborting the other rules; jobs > 1 evaluates distinct rules
/// concurrently within a run, merged in rule-name order.
EvalDocument run_eval(const std::filesystem::path& ruleset_dir, const EvalEnv& env,
                      int runs, int jobs = 1);

std::string eval_to_json(const EvalDocument& doc);
std::string eval_to_table(const EvalDocument& doc);

}  // namespace autochecker
