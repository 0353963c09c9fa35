#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "steprl/model.hpp"
#include "steprl/toy_env.hpp"

namespace steprl {

/// Decoding settings mirroring the recorded inference protocol:
/// temperature-scaled sampling, no nucleus truncation, single beam. A
/// max_steps of 0 means the problem's full chain length.
struct GenerationSettings {
    double temperature = 0.2;
    std::optional<double> top_p;  // unsupported; must stay absent
    int beams = 1;
    int max_steps = 0;

    void validate() const; // throws InvalidSettings
};

void to_json(nlohmann::json& j, const GenerationSettings& s);

struct EvalReport {
    std::string task;
    std::array<double, 3> per_run_accuracy{};
    double mean_accuracy = 0.0;
    GenerationSettings settings;
    std::array<uint64_t, 3> seeds{};
};

void to_json(nlohmann::json& j, const EvalReport& r);

/// One rollout. Temperature 0 decodes greedily with lowest-index
/// tie-breaking (logprobs then report the untempered policy distribution);
/// otherwise actions are sampled from softmax(logits / temperature) with
/// the given seed, and logprobs are taken under that same distribution.
EpisodeTrace decode(const ModelParams& policy, const ToyProblem& problem,
                    const GenerationSettings& settings, uint64_t seed);

/// Three full passes with the given seeds; accuracy is the fraction of
/// problems whose decoded final answer equals the oracle's final answer
/// under answers_equal. Per-problem seeds derive from (run seed, index).
EvalReport evaluate(const ModelParams& policy, const std::vector<ToyProblem>& problems,
                    const GenerationSettings& settings, const std::array<uint64_t, 3>& seeds,
                    const std::string& task = "toy-chain");

/// Fraction of problems the greedy decode solves end-to-end.
double greedy_solve_rate(const ModelParams& policy, const std::vector<ToyProblem>& problems);

} // namespace steprl
