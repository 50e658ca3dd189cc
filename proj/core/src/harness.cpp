#include "autochecker/harness.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "autochecker/errors.hpp"
#include "json_lines.hpp"

namespace autochecker {

using detail::json;

Rational::Rational(long long n, long long d) : num(n), den(d) {
    if (den == 0) throw Error("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

std::string Rational::str() const {
    return std::to_string(num) + "/" + std::to_string(den);
}

Rational rational_sum(const std::vector<Rational>& xs) {
    Rational acc(0, 1);
    for (const auto& x : xs)
        acc = Rational(acc.num * x.den + x.num * acc.den, acc.den * x.den);
    return acc;
}

Rational rational_mean(const std::vector<Rational>& xs) {
    if (xs.empty()) return Rational(0, 1);
    Rational sum = rational_sum(xs);
    return Rational(sum.num, sum.den * static_cast<long long>(xs.size()));
}

minilint::CompileResult MinilintBackend::compile(const std::string& source,
                                                 const Catalog& catalog) const {
    return minilint::compile_checker(source, catalog);
}

std::vector<minilint::Violation> MinilintBackend::run(
    const minilint::CompiledChecker& compiled, const minisrc::AstNode& ast) const {
    return minilint::run_checker(compiled, ast);
}

std::pair<CheckerRule, TestSuite> load_suite(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::path rule_path = dir / "rule.json";
    std::ifstream rule_in(rule_path);
    if (!rule_in) throw SuiteFormatError("missing rule document: " + rule_path.string());
    json rule_doc = json::parse(rule_in, nullptr, false);
    if (rule_doc.is_discarded() || !rule_doc.contains("description"))
        throw SuiteFormatError("malformed rule document: " + rule_path.string());
    CheckerRule rule;
    rule.name = rule_doc.value("name", dir.filename().string());
    rule.description = rule_doc["description"].get<std::string>();
    if (rule.description.empty())
        throw SuiteFormatError("rule description is empty: " + rule_path.string());

    fs::path tests_dir = dir / "tests";
    if (!fs::is_directory(tests_dir))
        throw SuiteFormatError("missing tests directory: " + tests_dir.string());

    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(tests_dir))
        if (entry.is_regular_file()) names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());

    auto read_file = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };

    TestSuite suite;
    std::set<std::string> stems_with_source;
    for (const auto& name : names) {
        fs::path path = tests_dir / name;
        if (path.extension() == ".minisrc") {
            std::string stem = path.stem().string();
            stems_with_source.insert(stem);
            fs::path expect_path = tests_dir / (stem + ".expect");
            if (!fs::exists(expect_path))
                throw SuiteFormatError("test " + name + " has no .expect file");
            json expect = json::parse(read_file(expect_path), nullptr, false);
            if (expect.is_discarded() || !expect.contains("problems") ||
                !expect.contains("lines"))
                throw SuiteFormatError("malformed expect document for " + name);
            TestCase test;
            test.id = stem;
            test.ordinal = static_cast<int>(suite.size()) + 1;
            test.source = read_file(path);
            test.expected_problem_count = expect["problems"].get<int>();
            for (const auto& line : expect["lines"])
                test.expected_lines.push_back(line.get<int>());
            if (static_cast<int>(test.expected_lines.size()) != test.expected_problem_count)
                throw SuiteFormatError("expect document for " + name +
                                       " declares " +
                                       std::to_string(test.expected_problem_count) +
                                       " problems but lists " +
                                       std::to_string(test.expected_lines.size()) +
                                       " lines");
            std::sort(test.expected_lines.begin(), test.expected_lines.end());
            int line_count =
                1 + static_cast<int>(std::count(test.source.begin(), test.source.end(), '\n'));
            for (int line : test.expected_lines)
                if (line < 1 || line > line_count)
                    throw SuiteFormatError("expect document for " + name +
                                           " references line " + std::to_string(line) +
                                           " outside the source");
            suite.push_back(std::move(test));
        }
    }
    for (const auto& name : names) {
        fs::path path = tests_dir / name;
        if (path.extension() == ".expect" &&
            !stems_with_source.count(path.stem().string()))
            throw SuiteFormatError("orphan expect file: " + name);
    }
    if (suite.empty()) throw SuiteFormatError("no tests in " + tests_dir.string());
    return {std::move(rule), std::move(suite)};
}

ValidationReport validate_checker(const std::string& checker_source,
                                  const TestSuite& suite, const CheckerBackend& backend,
                                  const Catalog& catalog) {
    if (suite.empty()) throw EmptySuite();
    ValidationReport report;

    auto compiled = backend.compile(checker_source, catalog);
    if (auto* err = std::get_if<minilint::CompileError>(&compiled)) {
        report.compile_ok = false;
        report.compile_error = *err;
        for (const auto& test : suite) {
            report.failed.push_back(test.id);
            TestVerdict verdict;
            verdict.passed = false;
            verdict.expected_problem_count = test.expected_problem_count;
            verdict.expected_lines = test.expected_lines;
            verdict.note = "compile failed: " + err->summary();
            report.per_test.emplace(test.id, std::move(verdict));
        }
        report.pr = Rational(0, static_cast<long long>(suite.size()));
        return report;
    }
    report.compile_ok = true;
    const auto& checker = std::get<minilint::CompiledChecker>(compiled);

    for (const auto& test : suite) {
        auto parsed = minisrc::parse_source(test.source);
        auto* ast = std::get_if<minisrc::AstPtr>(&parsed);
        if (!ast) {
            const auto& err = std::get<minisrc::ParseError>(parsed);
            throw SuiteFormatError("test " + test.id + " does not parse (line " +
                                   std::to_string(err.line) + "): " + err.message);
        }
        TestVerdict verdict;
        verdict.expected_problem_count = test.expected_problem_count;
        verdict.expected_lines = test.expected_lines;
        try {
            verdict.found = backend.run(checker, **ast);
            std::vector<int> found_lines;
            for (const auto& v : verdict.found) found_lines.push_back(v.line);
            std::sort(found_lines.begin(), found_lines.end());
            verdict.passed = found_lines == test.expected_lines;
        } catch (const CheckerRuntimeError& e) {
            verdict.passed = false;
            verdict.note = e.what();
        }
        if (verdict.passed) {
            report.passed.push_back(test.id);
        } else {
            report.failed.push_back(test.id);
        }
        report.per_test.emplace(test.id, std::move(verdict));
    }
    report.pr = Rational(static_cast<long long>(report.passed.size()),
                         static_cast<long long>(suite.size()));
    return report;
}

Metrics compute_metrics(const std::map<std::string, ValidationReport>& outcomes) {
    Metrics metrics;
    std::vector<Rational> tprs;
    for (const auto& [name, report] : outcomes) {
        if (report.compile_ok) ++metrics.rule_pc;
        if (!report.passed.empty()) ++metrics.rule_pot;
        if (report.failed.empty() && !report.passed.empty()) ++metrics.rule_pat;
        metrics.tc_pass += static_cast<int>(report.passed.size());
        metrics.tpr_per_rule.emplace(name, report.pr);
        tprs.push_back(report.pr);
    }
    metrics.tpr_avg = rational_mean(tprs);
    return metrics;
}

namespace {

json report_json(const ValidationReport& report) {
    json doc;
    doc["compile_ok"] = report.compile_ok;
    doc["passed"] = report.passed;
    doc["failed"] = report.failed;
    doc["pr"] = {{"num", report.pr.num}, {"den", report.pr.den}};
    if (report.compile_error) {
        json err;
        err["unknown_names"] = json::array();
        for (const auto& [name, line] : report.compile_error->unknown_names)
            err["unknown_names"].push_back({{"name", name}, {"line", line}});
        err["type_errors"] = json::array();
        for (const auto& [msg, line] : report.compile_error->type_errors)
            err["type_errors"].push_back({{"message", msg}, {"line", line}});
        doc["compile_error"] = std::move(err);
    }
    json per_test = json::object();
    for (const auto& [id, verdict] : report.per_test) {
        json v;
        v["verdict"] = verdict.passed ? "pass" : "fail";
        v["expected_problems"] = verdict.expected_problem_count;
        v["expected_lines"] = verdict.expected_lines;
        json found = json::array();
        for (const auto& violation : verdict.found)
            found.push_back({{"line", violation.line}, {"message", violation.message}});
        v["found"] = std::move(found);
        if (!verdict.note.empty()) v["note"] = verdict.note;
        per_test[id] = std::move(v);
    }
    doc["per_test"] = std::move(per_test);
    return doc;
}

}  // namespace

std::string report_to_json(const ValidationReport& report) {
    return report_json(report).dump(2) + "\n";
}

std::string report_summary(const ValidationReport& report) {
    std::ostringstream out;
    out << "compile: " << (report.compile_ok ? "ok" : "failed") << "  pr: "
        << report.pr.str() << " (" << report.passed.size() << "/"
        << report.passed.size() + report.failed.size() << ")\n";
    for (const auto& [id, verdict] : report.per_test) {
        out << "  " << (verdict.passed ? "pass" : "FAIL") << "  " << id;
        if (!verdict.note.empty()) out << "  [" << verdict.note << "]";
        out << "\n";
    }
    return out.str();
}

}  // namespace autochecker
