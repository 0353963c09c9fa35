#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "steprl/eval.hpp"
#include "steprl/model.hpp"
#include "steprl/toy_env.hpp"

namespace steprl {

/// A judge-localized error turned into paired data: the shared prefix is
/// the correct part of the rollout, `chosen` is the judge's corrected
/// completion, `rejected` the policy's erroneous one. Both continuations
/// run to the episode horizon, so they always have equal length.
struct PreferencePair {
    ToyProblem problem;
    std::vector<int> prefix;
    std::vector<int> chosen;
    std::vector<int> rejected;
    int divergence_index = 0; // 1-based step of the first error
};

void to_json(nlohmann::json& j, const PreferencePair& p);
void from_json(const nlohmann::json& j, PreferencePair& p);

struct PPOConfig {
    double clip_epsilon = 0.2;
    double kl_coeff = 0.02;
    double gamma = 1.0;
    double gae_lambda = 0.95;
    int rollouts_per_update = 64;
    int update_epochs = 4;
    double lr = 0.02;
    uint64_t seed = 0;
    double value_coeff = 0.5;
    bool normalize_advantages = true;
    /// Ablation hook: replace the per-step reward-model scores with a
    /// single terminal correctness reward (KL shaping stays in place).
    bool terminal_reward_only = false;

    void validate() const; // throws InvalidConfig
};

struct PPOMetrics {
    double mean_reward = 0.0;
    double solve_rate = 0.0; // judged-correct fraction of the rollout batch
    double mean_kl = 0.0;
    double policy_loss = 0.0;
    double value_loss = 0.0;
};

void to_json(nlohmann::json& j, const PPOMetrics& m);

/// Samples one temperature-1 rollout per problem (in order) and converts
/// every judge-rejected trace into a PreferencePair, stopping once
/// n_target pairs exist. May return fewer pairs than requested.
std::vector<PreferencePair> collect_preferences(const ModelParams& policy,
                                                const std::vector<ToyProblem>& problems,
                                                size_t n_target, uint64_t seed);

/// Pairwise logistic (Bradley-Terry) loss -log sigmoid(S(chosen) -
/// S(rejected)), where S sums the per-step scores over a continuation's
/// (state, action) pairs after the shared prefix.
std::pair<double, RewardGrads> reward_model_loss(const RewardModelParams& rm,
                                                 const PreferencePair& pair);

/// One scalar per executed step; states follow the trace's own claimed
/// history. Throws ShapeMismatch if there are more actions than steps.
std::vector<double> score_steps(const RewardModelParams& rm, const ToyProblem& problem,
                                const std::vector<int>& actions);

/// Fraction of pairs where the chosen continuation outscores the rejected
/// one strictly.
double rm_pairwise_accuracy(const RewardModelParams& rm,
                            const std::vector<PreferencePair>& pairs);

/// One PPO update: collects rollouts_per_update episodes from `policy`,
/// shapes per-step rewards r_t = score_t - kl_coeff * (logpi(a_t) -
/// logpi_ref(a_t)), estimates advantages with GAE against the value head,
/// and runs update_epochs clipped-surrogate passes over the batch.
/// `update_index` must differ between consecutive calls for fresh rollout
/// seeds.
std::pair<ModelParams, PPOMetrics> ppo_update(const ModelParams& policy,
                                              const ModelParams& reference,
                                              const RewardModelParams& rm,
                                              const std::vector<ToyProblem>& problems,
                                              const PPOConfig& cfg, int update_index = 0);

struct Stage4Config {
    PPOConfig ppo;
    size_t preference_target = 2000;
    size_t min_pairs = 100;
    double rm_holdout_fraction = 0.2;
    double rm_lr = 0.05;
    int rm_max_epochs = 50;
    double rm_train_accuracy_threshold = 0.98;
    int ppo_updates = 200;
    uint64_t seed = 42;

    void validate() const;
};

struct Stage4Report {
    size_t pairs_collected = 0;
    size_t rm_train_pairs = 0;
    size_t rm_holdout_pairs = 0;
    int rm_epochs = 0;
    double rm_train_accuracy = 0.0;
    double rm_holdout_accuracy = 0.0;
    std::vector<double> solve_rate_curve; // greedy solve rate after each update
    std::vector<double> mean_reward_curve;
    uint64_t seed = 0;
};

void to_json(nlohmann::json& j, const Stage4Report& r);

/// Trains a reward model on collected preferences until the training
/// pairwise accuracy threshold (or the epoch cap), reporting held-out
/// accuracy on the fraction set aside.
struct RewardTrainResult {
    RewardModelParams rm;
    int epochs = 0;
    double train_accuracy = 0.0;
    double holdout_accuracy = 0.0;
    size_t train_pairs = 0;
    size_t holdout_pairs = 0;
};

RewardTrainResult train_reward_model(const ModelParams& policy_init,
                                     const std::vector<PreferencePair>& pairs,
                                     const Stage4Config& cfg);

/// The full stage-4 loop: preference collection, reward-model training,
/// then ppo_updates PPO rounds with the stage-3 policy as the frozen
/// reference. Throws InsufficientPairs when fewer than min_pairs pairs
/// could be collected. `eval_problems` drive the solve-rate curve.
std::tuple<ModelParams, RewardModelParams, Stage4Report> run_stage4(
    const ModelParams& policy, const std::vector<ToyProblem>& problems,
    const std::vector<ToyProblem>& eval_problems, const Stage4Config& cfg);

} // namespace steprl
