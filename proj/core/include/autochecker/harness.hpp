#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "autochecker/api_catalog.hpp"
#include "autochecker/minilint.hpp"
#include "autochecker/suite.hpp"

namespace autochecker {

/// Exact rational in lowest terms; validation pass rates and TPRs are
/// fractions of small integers and stay exact this way.
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d);
    double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / den; }
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool operator<(const Rational& o) const { return num * o.den < o.num * den; }
    std::string str() const;
};

Rational rational_sum(const std::vector<Rational>& xs);
Rational rational_mean(const std::vector<Rational>& xs);

/// Checker backend contract: compile a script against a catalog and run the
/// compiled form over an AST. minilint provides the reference implementation.
class CheckerBackend {
public:
    virtual ~CheckerBackend() = default;
    virtual minilint::CompileResult compile(const std::string& source,
                                            const Catalog& catalog) const = 0;
    virtual std::vector<minilint::Violation> run(
        const minilint::CompiledChecker& compiled,
        const minisrc::AstNode& ast) const = 0;
};

class MinilintBackend final : public CheckerBackend {
public:
    minilint::CompileResult compile(const std::string& source,
                                    const Catalog& catalog) const override;
    std::vector<minilint::Violation> run(const minilint::CompiledChecker& compiled,
                                         const minisrc::AstNode& ast) const override;
};

struct TestVerdict {
    bool passed = false;
    std::vector<minilint::Violation> found;
    int expected_problem_count = 0;
    std::vector<int> expected_lines;
    std::string note;  // runtime error text, compile failure, ...
};

struct ValidationReport {
    bool compile_ok = false;
    std::vector<std::string> passed;  // ordinal order
    std::vector<std::string> failed;  // ordinal order
    std::map<std::string, TestVerdict> per_test;
    Rational pr;  // |passed| / |suite|
    std::optional<minilint::CompileError> compile_error;
};

/// Loads `rule.json` + `tests/NN_name.minisrc`/`NN_name.expect` pairs.
/// Lexicographic filename order defines the test ordinals.
std::pair<CheckerRule, TestSuite> load_suite(const std::filesystem::path& dir);

/// Compile once; a compile failure fails every test. Otherwise a test passes
/// iff the multiset of reported violation lines equals its expected lines.
/// A CheckerRuntimeError fails that test only.
ValidationReport validate_checker(const std::string& checker_source,
                                  const TestSuite& suite,
                                  const CheckerBackend& backend,
                                  const Catalog& catalog);

struct Metrics {
    int rule_pc = 0;   // final checker compiles
    int rule_pot = 0;  // final checker passes >= 1 test
    int rule_pat = 0;  // final checker passes all tests
    int tc_pass = 0;   // passed tests across rules
    std::map<std::string, Rational> tpr_per_rule;
    Rational tpr_avg;  // unweighted mean across rules
};

Metrics compute_metrics(const std::map<std::string, ValidationReport>& outcomes);

std::string report_to_json(const ValidationReport& report);
std::string report_summary(const ValidationReport& report);

}  // namespace autochecker
