#include "steprl/eval.hpp"

#include <cmath>

#include "steprl/errors.hpp"
#include "steprl/rng.hpp"

namespace steprl {

void GenerationSettings::validate() const {
    if (temperature < 0.0) throw InvalidSettings("temperature must be >= 0");
    if (top_p.has_value()) throw InvalidSettings("top_p sampling is not supported; leave it unset");
    if (beams != 1) throw InvalidSettings("only single-beam decoding is supported");
    if (max_steps < 0) throw InvalidSettings("max_steps must be >= 0");
}

void to_json(nlohmann::json& j, const GenerationSettings& s) {
    j = nlohmann::json{{"temperature", s.temperature},
                       {"top_p", s.top_p.has_value() ? nlohmann::json(*s.top_p) : nlohmann::json()},
                       {"beams", s.beams},
                       {"max_steps", s.max_steps}};
}

void to_json(nlohmann::json& j, const EvalReport& r) {
    j = nlohmann::json{{"task", r.task},
                       {"per_run_accuracy", r.per_run_accuracy},
                       {"mean_accuracy", r.mean_accuracy},
                       {"settings", r.settings},
                       {"seeds", r.seeds}};
}

EpisodeTrace decode(const ModelParams& policy, const ToyProblem& problem,
                    const GenerationSettings& settings, uint64_t seed) {
    settings.validate();
    int horizon = problem.chain_length();
    if (settings.max_steps > 0) horizon = std::min(horizon, settings.max_steps);

    EpisodeTrace trace;
    trace.problem = problem;
    Rng rng(mix_seed(seed, hash_str("decode")));
    int prev = problem.start;
    for (int t = 0; t < horizon; ++t) {
        ForwardTrace fwd = forward(policy, encode_state(problem, t, prev));
        int action;
        Eigen::VectorXd log_probs;
        if (settings.temperature == 0.0) {
            action = argmax_action(fwd.logits);
            log_probs = log_softmax(fwd.logits);
        } else {
            Eigen::VectorXd scaled = fwd.logits / settings.temperature;
            log_probs = log_softmax(scaled);
            Eigen::VectorXd probs = softmax(scaled);
            double draw = rng.uniform();
            double cumulative = 0.0;
            action = static_cast<int>(probs.size()) - 1;
            for (int i = 0; i < probs.size(); ++i) {
                cumulative += probs(i);
                if (draw < cumulative) {
                    action = i;
                    break;
                }
            }
        }
        trace.actions.push_back(action);
        trace.logprobs.push_back(log_probs(action));
        prev = action;
    }
    trace.done = horizon == problem.chain_length();
    return trace;
}

EvalReport evaluate(const ModelParams& policy, const std::vector<ToyProblem>& problems,
                    const GenerationSettings& settings, const std::array<uint64_t, 3>& seeds,
                    const std::string& task) {
    settings.validate();
    EvalReport report;
    report.task = task;
    report.settings = settings;
    report.seeds = seeds;

    for (size_t run = 0; run < seeds.size(); ++run) {
        size_t correct = 0;
        for (size_t i = 0; i < problems.size(); ++i) {
            EpisodeTrace trace = decode(policy, problems[i], settings, mix_seed(seeds[run], i));
            std::vector<int> oracle = oracle_solve(problems[i]);
            CanonicalAnswer decoded = CanonicalAnswer::rational(trace.actions.back(), 1);
            CanonicalAnswer gold = CanonicalAnswer::rational(oracle.back(), 1);
            if (answers_equal(decoded, gold)) ++correct;
        }
        report.per_run_accuracy[run] =
            problems.empty() ? 0.0
                             : static_cast<double>(correct) / static_cast<double>(problems.size());
    }
    report.mean_accuracy =
        (report.per_run_accuracy[0] + report.per_run_accuracy[1] + report.per_run_accuracy[2]) /
        3.0;
    return report;
}

double greedy_solve_rate(const ModelParams& policy, const std::vector<ToyProblem>& problems) {
    if (problems.empty()) return 0.0;
    GenerationSettings greedy;
    greedy.temperature = 0.0;
    size_t solved = 0;
    for (const auto& problem : problems) {
        EpisodeTrace trace = decode(policy, problem, greedy, 0);
        if (judge(problem, trace.actions).correct) ++solved;
    }
    return static_cast<double>(solved) / static_cast<double>(problems.size());
}

} // namespace steprl
