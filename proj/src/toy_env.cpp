#include "steprl/toy_env.hpp"

#include <charconv>

#include "steprl/errors.hpp"
#include "steprl/rng.hpp"

namespace steprl {

std::string to_string(ChainOp op) { return op == ChainOp::add ? "add" : "mul"; }

ChainOp chain_op_from_string(const std::string& s) {
    if (s == "add") return ChainOp::add;
    if (s == "mul") return ChainOp::mul;
    throw InvalidConfig("unknown chain op: " + s);
}

ToyProblem generate_problem(uint64_t seed, int modulus, int chain_length) {
    if (modulus < kMinModulus || modulus > kMaxModulus) {
        throw InvalidConfig("modulus must be in [2, 64], got " + std::to_string(modulus));
    }
    if (chain_length < 1 || chain_length > kMaxChainLength) {
        throw InvalidConfig("chain length must be in [1, 8], got " + std::to_string(chain_length));
    }
    Rng rng(mix_seed(seed, 0x70726f62ULL)); // "prob"
    ToyProblem p;
    p.seed = seed;
    p.modulus = modulus;
    p.start = rng.uniform_int(modulus);
    p.ops.reserve(static_cast<size_t>(chain_length));
    for (int i = 0; i < chain_length; ++i) {
        ChainOp op = rng.uniform_int(2) == 0 ? ChainOp::add : ChainOp::mul;
        int operand = rng.uniform_int(modulus);
        p.ops.emplace_back(op, operand);
    }
    return p;
}

std::vector<int> oracle_solve(const ToyProblem& p) {
    std::vector<int> partials;
    partials.reserve(p.ops.size());
    int64_t value = p.start;
    for (const auto& [op, operand] : p.ops) {
        value = op == ChainOp::add ? value + operand : value * operand;
        value %= p.modulus;
        partials.push_back(static_cast<int>(value));
    }
    return partials;
}

JudgeVerdict judge(const ToyProblem& p, const std::vector<int>& actions) {
    if (static_cast<int>(actions.size()) != p.chain_length()) {
        throw LengthMismatch("expected " + std::to_string(p.chain_length()) + " actions, got " +
                             std::to_string(actions.size()));
    }
    std::vector<int> oracle = oracle_solve(p);
    JudgeVerdict verdict;
    for (size_t i = 0; i < oracle.size(); ++i) {
        if (actions[i] != oracle[i]) {
            verdict.correct = false;
            verdict.first_error_step = static_cast<int>(i) + 1;
            verdict.corrected_continuation =
                std::vector<int>(oracle.begin() + static_cast<long>(i), oracle.end());
            return verdict;
        }
    }
    verdict.correct = true;
    return verdict;
}

Solution trace_to_solution(const ToyProblem& p, const std::vector<int>& actions) {
    if (static_cast<int>(actions.size()) != p.chain_length()) {
        throw LengthMismatch("expected " + std::to_string(p.chain_length()) + " actions, got " +
                             std::to_string(actions.size()));
    }
    std::vector<SolutionStep> steps;
    steps.reserve(actions.size());
    for (size_t i = 0; i < actions.size(); ++i) {
        const auto& [op, operand] = p.ops[i];
        SolutionStep step;
        step.id = static_cast<int>(i) + 1;
        step.name = "Apply " + to_string(op) + " " + std::to_string(operand);
        step.content = "value = " + std::to_string(actions[i]);
        if (i + 1 == actions.size()) {
            step.content += "; final answer \\boxed{" + std::to_string(actions[i]) + "}";
        }
        steps.push_back(std::move(step));
    }
    return make_solution(std::move(steps));
}

std::vector<int> solution_to_actions(const Solution& s) {
    std::vector<int> actions;
    actions.reserve(s.steps.size());
    constexpr std::string_view prefix = "value = ";
    for (const auto& step : s.steps) {
        std::string_view content = step.content;
        if (content.substr(0, prefix.size()) != prefix) {
            throw MalformedStep("step " + std::to_string(step.id) + " is not a trace step");
        }
        content.remove_prefix(prefix.size());
        int value = 0;
        auto [end, ec] = std::from_chars(content.data(), content.data() + content.size(), value);
        if (ec != std::errc{} || end == content.data()) {
            throw MalformedStep("step " + std::to_string(step.id) + " has no claimed value");
        }
        actions.push_back(value);
    }
    return actions;
}

void to_json(nlohmann::json& j, const ToyProblem& p) {
    nlohmann::json ops = nlohmann::json::array();
    for (const auto& [op, operand] : p.ops) {
        ops.push_back({{"op", to_string(op)}, {"operand", operand}});
    }
    j = nlohmann::json{
        {"seed", p.seed}, {"modulus", p.modulus}, {"start", p.start}, {"ops", std::move(ops)}};
}

void from_json(const nlohmann::json& j, ToyProblem& p) {
    p.seed = j.at("seed").get<uint64_t>();
    p.modulus = j.at("modulus").get<int>();
    p.start = j.at("start").get<int>();
    p.ops.clear();
    for (const auto& item : j.at("ops")) {
        p.ops.emplace_back(chain_op_from_string(item.at("op").get<std::string>()),
                           item.at("operand").get<int>());
    }
}

} // namespace steprl
