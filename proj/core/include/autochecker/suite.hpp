#pragma once

#include <string>
#include <vector>

namespace autochecker {

struct CheckerRule {
    std::string name;
    std::string description;
};

struct TestCase {
    std::string id;
    int ordinal = 0;  // original suite position, 1-based
    std::string source;
    int expected_problem_count = 0;
    std::vector<int> expected_lines;  // sorted, size == expected_problem_count
};

using TestSuite = std::vector<TestCase>;

}  // namespace autochecker
