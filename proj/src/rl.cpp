#include "steprl/rl.hpp"

#include <algorithm>
#include <cmath>

#include "steprl/errors.hpp"
#include "steprl/rng.hpp"

namespace steprl {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double softplus(double x) {
    // log(1 + e^x), stable for large |x|
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

// The chain value held just before 1-based step `step`; actions are the
// claimed history (prefix + continuation glued by the caller).
int value_before_step(const ToyProblem& problem, const std::vector<int>& actions, int step) {
    return step == 1 ? problem.start : actions[static_cast<size_t>(step) - 2];
}

struct ScoredStep {
    Eigen::VectorXd input;
    RewardTrace trace;
};

// Forward passes for a continuation's (state, action) pairs, following the
// continuation's own claimed values after the shared prefix.
std::vector<ScoredStep> score_continuation(const RewardModelParams& rm,
                                           const PreferencePair& pair,
                                           const std::vector<int>& continuation) {
    std::vector<int> full = pair.prefix;
    full.insert(full.end(), continuation.begin(), continuation.end());
    std::vector<ScoredStep> steps;
    steps.reserve(continuation.size());
    for (size_t j = 0; j < continuation.size(); ++j) {
        int step = pair.divergence_index + static_cast<int>(j); // 1-based
        int prev = value_before_step(pair.problem, full, step);
        Eigen::VectorXd input =
            encode_scored_step(pair.problem, step - 1, prev, continuation[j]);
        RewardTrace trace = reward_forward(rm, input);
        steps.push_back({std::move(input), std::move(trace)});
    }
    return steps;
}

} // namespace

void to_json(nlohmann::json& j, const PreferencePair& p) {
    j = nlohmann::json{{"problem", p.problem},
                       {"prefix", p.prefix},
                       {"chosen", p.chosen},
                       {"rejected", p.rejected},
                       {"divergence_index", p.divergence_index}};
}

void from_json(const nlohmann::json& j, PreferencePair& p) {
    p.problem = j.at("problem").get<ToyProblem>();
    p.prefix = j.at("prefix").get<std::vector<int>>();
    p.chosen = j.at("chosen").get<std::vector<int>>();
    p.rejected = j.at("rejected").get<std::vector<int>>();
    p.divergence_index = j.at("divergence_index").get<int>();
}

void PPOConfig::validate() const {
    if (!(clip_epsilon > 0.0) || clip_epsilon >= 1.0) {
        throw InvalidConfig("clip_epsilon must be in (0, 1)");
    }
    if (!(gamma > 0.0) || gamma > 1.0) throw InvalidConfig("gamma must be in (0, 1]");
    if (!(gae_lambda > 0.0) || gae_lambda > 1.0) {
        throw InvalidConfig("gae_lambda must be in (0, 1]");
    }
    if (rollouts_per_update < 1) throw InvalidConfig("rollouts_per_update must be positive");
    if (update_epochs < 1) throw InvalidConfig("update_epochs must be positive");
    if (!(lr > 0.0)) throw InvalidConfig("lr must be positive");
    if (kl_coeff < 0.0) throw InvalidConfig("kl_coeff must be >= 0");
    if (value_coeff < 0.0) throw InvalidConfig("value_coeff must be >= 0");
}

void to_json(nlohmann::json& j, const PPOMetrics& m) {
    j = nlohmann::json{{"mean_reward", m.mean_reward},
                       {"solve_rate", m.solve_rate},
                       {"mean_kl", m.mean_kl},
                       {"policy_loss", m.policy_loss},
                       {"value_loss", m.value_loss}};
}

std::vector<PreferencePair> collect_preferences(const ModelParams& policy,
                                                const std::vector<ToyProblem>& problems,
                                                size_t n_target, uint64_t seed) {
    GenerationSettings sampling;
    sampling.temperature = 1.0;

    std::vector<PreferencePair> pairs;
    for (size_t i = 0; i < problems.size() && pairs.size() < n_target; ++i) {
        const ToyProblem& problem = problems[i];
        EpisodeTrace trace = decode(policy, problem, sampling, mix_seed(seed, i));
        JudgeVerdict verdict = judge(problem, trace.actions);
        if (verdict.correct) continue;

        int e = *verdict.first_error_step;
        PreferencePair pair;
        pair.problem = problem;
        pair.prefix.assign(trace.actions.begin(), trace.actions.begin() + (e - 1));
        pair.chosen = *verdict.corrected_continuation;
        pair.rejected.assign(trace.actions.begin() + (e - 1), trace.actions.end());
        pair.divergence_index = e;
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

std::pair<double, RewardGrads> reward_model_loss(const RewardModelParams& rm,
                                                 const PreferencePair& pair) {
    std::vector<ScoredStep> chosen = score_continuation(rm, pair, pair.chosen);
    std::vector<ScoredStep> rejected = score_continuation(rm, pair, pair.rejected);

    double score_chosen = 0.0;
    for (const auto& s : chosen) score_chosen += s.trace.score;
    double score_rejected = 0.0;
    for (const auto& s : rejected) score_rejected += s.trace.score;

    double delta = score_chosen - score_rejected;
    double loss = softplus(-delta);

    // dL/dS_chosen = sigmoid(delta) - 1, dL/dS_rejected = 1 - sigmoid(delta)
    double d_chosen = sigmoid(delta) - 1.0;
    RewardGrads grads = RewardGrads::zeros_like(rm);
    for (const auto& s : chosen) {
        grads.add(reward_backward(rm, s.trace, d_chosen));
    }
    for (const auto& s : rejected) {
        grads.add(reward_backward(rm, s.trace, -d_chosen));
    }
    return {loss, std::move(grads)};
}

std::vector<double> score_steps(const RewardModelParams& rm, const ToyProblem& problem,
                                const std::vector<int>& actions) {
    if (static_cast<int>(actions.size()) > problem.chain_length()) {
        throw ShapeMismatch("more actions than chain steps");
    }
    std::vector<double> scores;
    scores.reserve(actions.size());
    int prev = problem.start;
    for (size_t t = 0; t < actions.size(); ++t) {
        Eigen::VectorXd input =
            encode_scored_step(problem, static_cast<int>(t), prev, actions[t]);
        scores.push_back(reward_forward(rm, input).score);
        prev = actions[t];
    }
    return scores;
}

double rm_pairwise_accuracy(const RewardModelParams& rm,
                            const std::vector<PreferencePair>& pairs) {
    if (pairs.empty()) return 0.0;
    size_t correct = 0;
    for (const auto& pair : pairs) {
        double chosen = 0.0;
        for (const auto& s : score_continuation(rm, pair, pair.chosen)) chosen += s.trace.score;
        double rejected = 0.0;
        for (const auto& s : score_continuation(rm, pair, pair.rejected)) {
            rejected += s.trace.score;
        }
        if (chosen > rejected) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

std::pair<ModelParams, PPOMetrics> ppo_update(const ModelParams& policy,
                                              const ModelParams& reference,
                                              const RewardModelParams& rm,
                                              const std::vector<ToyProblem>& problems,
                                              const PPOConfig& cfg, int update_index) {
    cfg.validate();
    if (problems.empty()) throw InvalidConfig("ppo_update needs at least one problem");

    struct StepRecord {
        Eigen::VectorXd state;
        int action = 0;
        double logprob_old = 0.0;
        double reward = 0.0;
        double value_old = 0.0;
        double advantage = 0.0;
        double return_to_go = 0.0;
    };

    GenerationSettings sampling;
    sampling.temperature = 1.0;

    std::vector<std::vector<StepRecord>> episodes;
    episodes.reserve(static_cast<size_t>(cfg.rollouts_per_update));
    PPOMetrics metrics;
    size_t total_steps = 0;
    size_t solved = 0;

    for (int e = 0; e < cfg.rollouts_per_update; ++e) {
        const ToyProblem& problem = problems[static_cast<size_t>(e) % problems.size()];
        uint64_t episode_seed =
            mix_seed(cfg.seed, static_cast<uint64_t>(update_index), static_cast<uint64_t>(e));
        EpisodeTrace trace = decode(policy, problem, sampling, episode_seed);
        JudgeVerdict verdict = judge(problem, trace.actions);
        if (verdict.correct) ++solved;

        std::vector<double> scores;
        if (!cfg.terminal_reward_only) {
            scores = score_steps(rm, problem, trace.actions);
        }

        std::vector<StepRecord> steps(trace.actions.size());
        int prev = problem.start;
        for (size_t t = 0; t < trace.actions.size(); ++t) {
            StepRecord& rec = steps[t];
            rec.state = encode_state(problem, static_cast<int>(t), prev);
            rec.action = trace.actions[t];
            rec.logprob_old = trace.logprobs[t];

            ForwardTrace ref_fwd = forward(reference, rec.state);
            double logprob_ref = log_softmax(ref_fwd.logits)(rec.action);
            double kl_term = rec.logprob_old - logprob_ref;
            metrics.mean_kl += kl_term;

            double base_reward;
            if (cfg.terminal_reward_only) {
                base_reward =
                    (t + 1 == trace.actions.size() && verdict.correct) ? 1.0 : 0.0;
            } else {
                base_reward = scores[t];
            }
            rec.reward = base_reward - cfg.kl_coeff * kl_term;

            ForwardTrace policy_fwd = forward(policy, rec.state);
            rec.value_old = policy_fwd.value;

            prev = trace.actions[t];
        }

        // GAE over the episode; terminal value is 0.
        double gae = 0.0;
        for (int t = static_cast<int>(steps.size()) - 1; t >= 0; --t) {
            double next_value =
                t + 1 < static_cast<int>(steps.size()) ? steps[static_cast<size_t>(t) + 1].value_old : 0.0;
            double delta =
                steps[static_cast<size_t>(t)].reward + cfg.gamma * next_value - steps[static_cast<size_t>(t)].value_old;
            gae = delta + cfg.gamma * cfg.gae_lambda * gae;
            steps[static_cast<size_t>(t)].advantage = gae;
            steps[static_cast<size_t>(t)].return_to_go =
                gae + steps[static_cast<size_t>(t)].value_old;
        }

        for (const auto& rec : steps) metrics.mean_reward += rec.reward;
        total_steps += steps.size();
        episodes.push_back(std::move(steps));
    }

    metrics.mean_reward /= static_cast<double>(total_steps);
    metrics.mean_kl /= static_cast<double>(total_steps);
    metrics.solve_rate =
        static_cast<double>(solved) / static_cast<double>(cfg.rollouts_per_update);

    if (cfg.normalize_advantages) {
        double mean = 0.0;
        for (const auto& episode : episodes) {
            for (const auto& rec : episode) mean += rec.advantage;
        }
        mean /= static_cast<double>(total_steps);
        double var = 0.0;
        for (const auto& episode : episodes) {
            for (const auto& rec : episode) {
                var += (rec.advantage - mean) * (rec.advantage - mean);
            }
        }
        double std_dev = std::sqrt(var / static_cast<double>(total_steps));
        double denom = std::max(std_dev, 1e-8);
        for (auto& episode : episodes) {
            for (auto& rec : episode) rec.advantage = (rec.advantage - mean) / denom;
        }
    }

    // Clipped-surrogate epochs, full-batch gradient per pass.
    ModelParams current = policy;
    double inv_steps = 1.0 / static_cast<double>(total_steps);
    for (int epoch = 0; epoch < cfg.update_epochs; ++epoch) {
        ModelGrads grads = ModelGrads::zeros_like(current);
        double policy_loss = 0.0;
        double value_loss = 0.0;
        for (const auto& episode : episodes) {
            for (const auto& rec : episode) {
                ForwardTrace fwd = forward(current, rec.state);
                Eigen::VectorXd log_probs = log_softmax(fwd.logits);
                double ratio = std::exp(log_probs(rec.action) - rec.logprob_old);
                double clipped =
                    std::clamp(ratio, 1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon);
                double surr_unclipped = ratio * rec.advantage;
                double surr_clipped = clipped * rec.advantage;
                policy_loss -= std::min(surr_unclipped, surr_clipped);

                // Gradient flows only through the unclipped branch when it
                // is the active minimum (ties included, matching min()).
                double d_logprob =
                    surr_unclipped <= surr_clipped ? -rec.advantage * ratio : 0.0;
                Eigen::VectorXd grad_logits = -softmax(fwd.logits) * d_logprob;
                grad_logits(rec.action) += d_logprob;

                double value_error = fwd.value - rec.return_to_go;
                value_loss += value_error * value_error;
                double grad_value = cfg.value_coeff * 2.0 * value_error;

                grads.add(backward(current, fwd, grad_logits, grad_value));
            }
        }
        grads.scale(inv_steps);
        current = sgd_step(current, grads, cfg.lr);
        if (epoch == 0) {
            metrics.policy_loss = policy_loss * inv_steps;
            metrics.value_loss = value_loss * inv_steps;
        }
    }
    return {std::move(current), metrics};
}

void Stage4Config::validate() const {
    ppo.validate();
    if (min_pairs < 1) throw InvalidConfig("min_pairs must be positive");
    if (rm_holdout_fraction < 0.0 || rm_holdout_fraction >= 1.0) {
        throw InvalidConfig("rm_holdout_fraction must be in [0, 1)");
    }
    if (!(rm_lr > 0.0)) throw InvalidConfig("rm_lr must be positive");
    if (rm_max_epochs < 1) throw InvalidConfig("rm_max_epochs must be positive");
    if (ppo_updates < 0) throw InvalidConfig("ppo_updates must be >= 0");
}

void to_json(nlohmann::json& j, const Stage4Report& r) {
    j = nlohmann::json{{"pairs_collected", r.pairs_collected},
                       {"rm_train_pairs", r.rm_train_pairs},
                       {"rm_holdout_pairs", r.rm_holdout_pairs},
                       {"rm_epochs", r.rm_epochs},
                       {"rm_train_accuracy", r.rm_train_accuracy},
                       {"rm_holdout_accuracy", r.rm_holdout_accuracy},
                       {"solve_rate_curve", r.solve_rate_curve},
                       {"mean_reward_curve", r.mean_reward_curve},
                       {"seed", r.seed}};
}

RewardTrainResult train_reward_model(const ModelParams& policy_init,
                                     const std::vector<PreferencePair>& pairs,
                                     const Stage4Config& cfg) {
    RewardTrainResult result;
    result.rm = init_reward_model(policy_init, mix_seed(cfg.seed, hash_str("reward-model")));

    std::vector<size_t> order(pairs.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng splitter(mix_seed(cfg.seed, hash_str("rm-split")));
    splitter.shuffle(order);
    auto n_holdout = static_cast<size_t>(
        std::llround(cfg.rm_holdout_fraction * static_cast<double>(pairs.size())));
    n_holdout = std::min(n_holdout, pairs.size());

    std::vector<PreferencePair> holdout;
    std::vector<PreferencePair> train;
    for (size_t i = 0; i < order.size(); ++i) {
        (i < n_holdout ? holdout : train).push_back(pairs[order[i]]);
    }
    result.train_pairs = train.size();
    result.holdout_pairs = holdout.size();

    std::vector<size_t> train_order(train.size());
    for (size_t i = 0; i < train_order.size(); ++i) train_order[i] = i;

    for (int epoch = 1; epoch <= cfg.rm_max_epochs; ++epoch) {
        Rng shuffler(mix_seed(cfg.seed, hash_str("rm-epoch"), static_cast<uint64_t>(epoch)));
        shuffler.shuffle(train_order);
        for (size_t i : train_order) {
            auto [loss, grads] = reward_model_loss(result.rm, train[i]);
            result.rm = sgd_step(result.rm, grads, cfg.rm_lr);
        }
        result.epochs = epoch;
        result.train_accuracy = rm_pairwise_accuracy(result.rm, train);
        if (result.train_accuracy >= cfg.rm_train_accuracy_threshold) break;
    }
    result.holdout_accuracy = rm_pairwise_accuracy(result.rm, holdout);
    return result;
}

std::tuple<ModelParams, RewardModelParams, Stage4Report> run_stage4(
    const ModelParams& policy, const std::vector<ToyProblem>& problems,
    const std::vector<ToyProblem>& eval_problems, const Stage4Config& cfg) {
    cfg.validate();
    Stage4Report report;
    report.seed = cfg.seed;

    std::vector<PreferencePair> pairs = collect_preferences(
        policy, problems, cfg.preference_target, mix_seed(cfg.seed, hash_str("preferences")));
    report.pairs_collected = pairs.size();
    if (pairs.size() < cfg.min_pairs) {
        throw InsufficientPairs("collected " + std::to_string(pairs.size()) + " pairs, need " +
                                std::to_string(cfg.min_pairs));
    }

    RewardTrainResult rm_result = train_reward_model(policy, pairs, cfg);
    report.rm_train_pairs = rm_result.train_pairs;
    report.rm_holdout_pairs = rm_result.holdout_pairs;
    report.rm_epochs = rm_result.epochs;
    report.rm_train_accuracy = rm_result.train_accuracy;
    report.rm_holdout_accuracy = rm_result.holdout_accuracy;

    ModelParams current = policy; // also the frozen reference
    PPOConfig ppo_cfg = cfg.ppo;
    ppo_cfg.seed = mix_seed(cfg.seed, hash_str("ppo"));
    for (int update = 0; update < cfg.ppo_updates; ++update) {
        auto [next, metrics] = ppo_update(current, policy, rm_result.rm, problems, ppo_cfg, update);
        current = std::move(next);
        report.mean_reward_curve.push_back(metrics.mean_reward);
        report.solve_rate_curve.push_back(greedy_solve_rate(current, eval_problems));
    }
    return {std::move(current), std::move(rm_result.rm), std::move(report)};
}

} // namespace steprl
