#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "steprl/solution.hpp"

namespace steprl {

enum class ChainOp { add, mul };

std::string to_string(ChainOp op);
ChainOp chain_op_from_string(const std::string& s);

/// A modular chain-arithmetic problem: starting from `start`, apply each
/// (op, operand) in order, reducing mod `modulus` after every step. The
/// claimed partial result after each step is the "reasoning step".
struct ToyProblem {
    uint64_t seed = 0;
    int modulus = 10;
    int start = 0;
    std::vector<std::pair<ChainOp, int>> ops;

    int chain_length() const { return static_cast<int>(ops.size()); }

    friend bool operator==(const ToyProblem&, const ToyProblem&) = default;
};

/// One policy rollout: actions are the claimed partial results, logprobs the
/// log-probability of each action under the sampling distribution.
struct EpisodeTrace {
    ToyProblem problem;
    std::vector<int> actions;
    std::vector<double> logprobs;
    std::optional<std::vector<double>> step_rewards;
    bool done = false;
};

/// Exact judgment of a full trace: either correct, or the 1-based index of
/// the first wrong step together with the oracle's completion from there.
struct JudgeVerdict {
    bool correct = false;
    std::optional<int> first_error_step;
    std::optional<std::vector<int>> corrected_continuation;
};

inline constexpr int kMinModulus = 2;
inline constexpr int kMaxModulus = 64;
inline constexpr int kMaxChainLength = 8;

/// Deterministic pseudorandom problem. Throws InvalidConfig for modulus
/// outside [2, 64] or chain length outside [1, 8].
ToyProblem generate_problem(uint64_t seed, int modulus, int chain_length);

/// The k true partial results; the last entry is the gold final answer.
std::vector<int> oracle_solve(const ToyProblem& p);

/// Compares actions against the oracle. Throws LengthMismatch when the
/// action count differs from the chain length.
JudgeVerdict judge(const ToyProblem& p, const std::vector<int>& actions);

/// Renders a trace as a step-wise Solution; the last step carries the boxed
/// final action. Round-trips through parse_solution/render_solution.
Solution trace_to_solution(const ToyProblem& p, const std::vector<int>& actions);

/// Companion extractor: recovers the claimed actions from a Solution
/// produced by trace_to_solution. Throws MalformedStep on foreign content.
std::vector<int> solution_to_actions(const Solution& s);

void to_json(nlohmann::json& j, const ToyProblem& p);
void from_json(const nlohmann::json& j, ToyProblem& p);

} // namespace steprl
