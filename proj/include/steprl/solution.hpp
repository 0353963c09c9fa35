#pragma once

#include <string>
#include <vector>

#include "steprl/answer.hpp"

namespace steprl {

/// One reasoning step. IDs within a Solution are contiguous and 1-based;
/// name and content are non-empty single lines (the name additionally may
/// not contain ')', which the serialization reserves).
struct SolutionStep {
    int id = 0;
    std::string name;
    std::string content;

    friend bool operator==(const SolutionStep&, const SolutionStep&) = default;
};

/// A step-wise solution. The last step's content carries exactly one
/// \boxed{...} marker whose normalized value equals final_answer.
struct Solution {
    std::vector<SolutionStep> steps;
    CanonicalAnswer final_answer;

    friend bool operator==(const Solution&, const Solution&) = default;
};

/// Validates all Solution invariants; throws MalformedStep,
/// NonContiguousIds or NoBoxedAnswer.
void validate_solution(const Solution& s);

/// Builds a validated Solution, reading final_answer out of the last step.
Solution make_solution(std::vector<SolutionStep> steps);

/// Serialization, one step per line:
///   Step <id> (<name>): <content>
std::string render_solution(const Solution& s);

/// Inverse of render_solution; the result satisfies all invariants.
/// Throws MalformedStep, NonContiguousIds, NoBoxedAnswer.
Solution parse_solution(std::string_view text);

} // namespace steprl
