#include "autochecker/tdcd.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "autochecker/errors.hpp"
#include "json_lines.hpp"

namespace autochecker {

using detail::json;

const TestCase& pick_next_test(const std::set<std::string>& pool, const TestSuite& suite) {
    const TestCase* best = nullptr;
    for (const auto& test : suite) {
        if (!pool.count(test.id)) continue;
        if (!best || test.ordinal < best->ordinal) best = &test;
    }
    if (!best) throw Error("pick_next_test called with an empty pool");
    return *best;
}

std::string build_prompt(PromptKind kind, const CheckerRule& rule, const TestCase& test,
                         const std::string& ast_dump, const std::string& tmpl,
                         const std::vector<ApiContext>& contexts,
                         const std::string& prior_checker, const std::string& feedback) {
    std::ostringstream out;
    if (kind == PromptKind::initial) {
        out << "Write a checker script for the rule below so that it passes the given "
               "test case. Reply with the checker inside a fenced code block.\n";
    } else {
        out << "Refine the checker below so that it passes the given test case without "
               "breaking tests it already passes. Reply with the full checker inside a "
               "fenced code block.\n";
    }
    out << "== Rule description ==\n" << rule.name << ": " << rule.description << "\n";
    out << "== Test case code ==\n" << test.source;
    if (test.source.empty() || test.source.back() != '\n') out << "\n";
    out << "== Test case AST ==\n" << ast_dump;
    if (ast_dump.empty() || ast_dump.back() != '\n') out << "\n";
    out << "== Related API-contexts ==\n";
    if (contexts.empty()) {
        out << "(none retrieved)\n";
    } else {
        for (const auto& ctx : contexts) {
            out << "- " << ctx.description << "\n";
            out << "  " << ctx.payload << "\n";
        }
    }
    out << "== Checker template ==\n" << tmpl;
    if (tmpl.empty() || tmpl.back() != '\n') out << "\n";
    if (kind == PromptKind::refine) {
        out << "== Last-generated checker ==\n" << prior_checker;
        if (prior_checker.empty() || prior_checker.back() != '\n') out << "\n";
    }
    if (!feedback.empty()) {
        out << "== Failure feedback ==\n" << feedback;
        if (feedback.back() != '\n') out << "\n";
    }
    return out.str();
}

bool accept_round(const ValidationReport& report, const std::string& test_id,
                  const std::set<std::string>& passed_before) {
    bool selected_passed =
        std::find(report.passed.begin(), report.passed.end(), test_id) !=
        report.passed.end();
    if (!selected_passed) return false;
    for (const auto& id : report.failed)
        if (passed_before.count(id)) return false;
    return true;
}

std::string extract_checker_source(const std::string& llm_response) {
    std::istringstream in(llm_response);
    std::string line;
    std::string inner;
    bool in_fence = false;
    bool saw_fence = false;
    while (std::getline(in, line)) {
        std::string trimmed = line;
        if (!trimmed.empty() && trimmed.back() == '\r') trimmed.pop_back();
        std::size_t start = trimmed.find_first_not_of(" \t");
        bool fence_line =
            start != std::string::npos && trimmed.compare(start, 3, "```") == 0;
        if (fence_line) {
            if (in_fence) return inner;  // closing fence of the first block
            in_fence = true;
            saw_fence = true;
            continue;
        }
        if (in_fence) inner += trimmed + "\n";
    }
    if (saw_fence && !inner.empty()) return inner;  // unterminated fence
    return llm_response;
}

std::uint64_t payload_hash(const std::string& payload) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : payload) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

std::string hash_hex(std::uint64_t h) {
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

std::string failure_feedback(const ValidationReport& report) {
    std::ostringstream out;
    if (!report.compile_ok) {
        out << "The last checker failed to compile. ";
        if (report.compile_error) out << report.compile_error->summary();
    } else {
        out << "The last checker failed tests:";
        for (const auto& id : report.failed) out << " " << id;
        out << ".";
    }
    return out.str();
}

void update_sets(TdcdState& state, const TestSuite& suite) {
    if (state.last_report) {
        state.passed.clear();
        for (const auto& id : state.last_report->passed) state.passed.insert(id);
        state.candidate_pool.clear();
        for (const auto& id : state.last_report->failed)
            if (!state.skipped.count(id)) state.candidate_pool.insert(id);
    } else {
        state.candidate_pool.clear();
        for (const auto& test : suite)
            if (!state.passed.count(test.id) && !state.skipped.count(test.id))
                state.candidate_pool.insert(test.id);
    }
}

}  // namespace

TdcdOutcome run_tdcd(const CheckerRule& rule, const TestSuite& suite,
                     const TdcdDeps& deps, const TdcdConfig& config) {
    if (suite.empty()) throw EmptySuite();
    const int round_cap = config.round_cap > 0
                              ? config.round_cap
                              : config.round_cap_factor * static_cast<int>(suite.size());

    TdcdState state;
    for (const auto& test : suite) state.candidate_pool.insert(test.id);
    state.current_checker = deps.prior_checker;

    TdcdOutcome outcome;
    while (!state.candidate_pool.empty() && state.round < round_cap) {
        ++state.round;
        const TestCase& test = pick_next_test(state.candidate_pool, suite);
        RoundRecord record;
        record.round = state.round;
        record.selected_test = test.id;

        auto parsed = minisrc::parse_source(test.source);
        auto* ast = std::get_if<minisrc::AstPtr>(&parsed);
        if (!ast)
            throw SuiteFormatError("test " + test.id + " does not parse: " +
                                   std::get<minisrc::ParseError>(parsed).message);

        RetrievalResult retrieval;
        bool retrieval_ok = true;
        try {
            retrieval = deps.retriever->retrieve_contexts(rule, test.source, **ast);
        } catch (const DecompositionError&) {
            retrieval_ok = false;
        }

        if (!retrieval_ok) {
            // Both decomposition attempts failed; the round is abandoned and
            // the test is skipped so the cycle cannot stall on it.
            record.decompose_failed = true;
            state.skipped.insert(test.id);
            update_sets(state, suite);
            record.t_c_after = state.candidate_pool;
            record.t_p_after = state.passed;
            record.t_s_after = state.skipped;
            outcome.replay.push_back(std::move(record));
            continue;
        }

        for (const auto& hit : retrieval.per_subop) record.subops.push_back(hit.subop.text);
        record.per_subop = retrieval.per_subop;
        for (const auto& ctx : retrieval.contexts)
            record.context_hashes.push_back(hash_hex(payload_hash(ctx.payload)));

        std::string ast_dump = minisrc::render_ast(**ast, /*augment=*/true);
        const std::set<std::string> passed_before = state.passed;

        bool accepted = false;
        int attempt = 0;
        while (attempt < config.max_retry_times) {
            ++attempt;
            state.attempt = attempt;
            AttemptRecord attempt_record;
            attempt_record.attempt = attempt;

            PromptKind kind =
                state.current_checker ? PromptKind::refine : PromptKind::initial;
            LlmRole role =
                state.current_checker ? LlmRole::refine : LlmRole::generate;
            attempt_record.role = role;
            std::string feedback;
            if (config.feedback_in_retry && attempt > 1 && !record.attempts.empty())
                feedback = state.last_report ? failure_feedback(*state.last_report) : "";
            std::string prompt = build_prompt(
                kind, rule, test, ast_dump, deps.template_source, retrieval.contexts,
                state.current_checker ? state.current_checker->source : "", feedback);

            std::string response;
            try {
                response = deps.llm->generate(prompt, role);
            } catch (const LlmError&) {
                attempt_record.llm_failed = true;
                record.attempts.push_back(std::move(attempt_record));
                continue;  // the attempt is spent
            }

            std::string source = extract_checker_source(response);
            try {
                source = minilint::normalize_header(source, deps.template_source);
            } catch (const NormalizationError&) {
                // No visitor block in the response; keep the raw extraction and
                // let validation report the compile failure.
            }
            state.current_checker =
                minilint::CheckerArtifact{source, state.round, attempt};

            ValidationReport report =
                validate_checker(source, suite, *deps.backend, *deps.catalog);
            attempt_record.compile_ok = report.compile_ok;
            attempt_record.passed = report.passed;
            attempt_record.failed = report.failed;
            state.last_report = std::move(report);

            if (accept_round(*state.last_report, test.id, passed_before)) {
                accepted = true;
                attempt_record.accepted = true;
                record.attempts.push_back(std::move(attempt_record));
                break;
            }
            record.attempts.push_back(std::move(attempt_record));
        }

        if (!accepted) state.skipped.insert(test.id);
        record.accepted = accepted;
        update_sets(state, suite);
        record.t_c_after = state.candidate_pool;
        record.t_p_after = state.passed;
        record.t_s_after = state.skipped;
        outcome.replay.push_back(std::move(record));
    }

    outcome.rounds = state.round;
    outcome.round_cap_reached = !state.candidate_pool.empty();
    outcome.final_checker = state.current_checker;
    outcome.final_report = state.last_report;
    outcome.final_pass_rate =
        state.last_report ? state.last_report->pr
                          : Rational(0, static_cast<long long>(suite.size()));
    return outcome;
}

std::string replay_log(const TdcdOutcome& outcome) {
    std::ostringstream out;
    for (const auto& round : outcome.replay) {
        auto base = [&] {
            json rec;
            rec["round"] = round.round;
            rec["selected_test"] = round.selected_test;
            rec["subops"] = round.subops;
            json hits = json::array();
            for (const auto& hit : round.per_subop) {
                json h;
                h["subop"] = hit.subop.text;
                h["hit"] = hit_kind_name(hit.kind);
                if (hit.score) h["score"] = *hit.score;
                hits.push_back(std::move(h));
            }
            rec["per_subop"] = std::move(hits);
            rec["context_hashes"] = round.context_hashes;
            return rec;
        };
        if (round.attempts.empty()) {
            json rec = base();
            rec["attempt"] = 0;
            rec["decompose_failed"] = round.decompose_failed;
            rec["compile_ok"] = false;
            rec["passed"] = json::array();
            rec["failed"] = json::array();
            rec["accepted"] = false;
            out << rec.dump() << "\n";
            continue;
        }
        for (const auto& attempt : round.attempts) {
            json rec = base();
            rec["attempt"] = attempt.attempt;
            rec["role"] = llm_role_name(attempt.role);
            if (attempt.llm_failed) rec["llm_failed"] = true;
            rec["compile_ok"] = attempt.compile_ok;
            rec["passed"] = attempt.passed;
            rec["failed"] = attempt.failed;
            rec["accepted"] = attempt.accepted;
            out << rec.dump() << "\n";
        }
    }
    return out.str();
}

}  // namespace autochecker
