#pragma once

#include <cstdint>
#include <set>
#include <string>

#include <Eigen/Dense>

#include "steprl/toy_env.hpp"

namespace steprl {

/// Layer widths. The input is the one-hot state encoding
/// (current value | next op | next operand | step index), so its width is
/// 2*modulus + 2 + kMaxChainLength; reward-model inputs append an action
/// one-hot block of `modulus` entries.
struct ModelDims {
    int feature = 32;     // featurizer output
    int hidden = 32;      // adapter hidden layer
    int adapter_out = 32; // adapter output / head input
    int modulus = 10;     // action count == policy logit count

    int state_input() const { return 2 * modulus + 2 + kMaxChainLength; }
    int scored_input() const { return state_input() + modulus; }

    void validate() const; // throws InvalidConfig

    friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

struct Dense {
    Eigen::MatrixXd w;
    Eigen::VectorXd b;
};

/// Shared trunk: fixed linear featurizer (no bias) followed by a two-layer
/// tanh MLP adapter.
struct Backbone {
    Eigen::MatrixXd featurizer;
    Dense fc1;
    Dense fc2;
};

struct FreezeFlags {
    bool featurizer = true;
    bool adapter = false;
    bool head = false;

    bool layer_frozen(const std::string& name) const;
    /// Marks exactly the named layers trainable, everything else frozen.
    static FreezeFlags trainable_only(const std::set<std::string>& layers);

    friend bool operator==(const FreezeFlags&, const FreezeFlags&) = default;
};

/// Policy/value model. Immutable by convention: training steps return new
/// values. `version` identifies the parameter snapshot a ForwardTrace was
/// computed against.
struct ModelParams {
    ModelDims dims;
    Backbone backbone;
    Dense policy_head; // modulus x adapter_out
    Dense value_head;  // 1 x adapter_out
    FreezeFlags freeze;
    uint64_t version = 0;
};

/// Same trunk with a scalar step-score head in place of the policy/value
/// heads; the featurizer input additionally covers the scored action.
struct RewardModelParams {
    ModelDims dims;
    Backbone backbone;
    Dense score_head; // 1 x adapter_out
    FreezeFlags freeze;
    uint64_t version = 0;
};

/// Activations cached by forward() for backward().
struct ForwardTrace {
    Eigen::VectorXd input;
    Eigen::VectorXd features;
    Eigen::VectorXd h1;
    Eigen::VectorXd h2;
    Eigen::VectorXd logits;
    double value = 0.0;
    uint64_t params_version = 0;
};

struct RewardTrace {
    Eigen::VectorXd input;
    Eigen::VectorXd features;
    Eigen::VectorXd h1;
    Eigen::VectorXd h2;
    double score = 0.0;
    uint64_t params_version = 0;
};

/// Gradient blocks, shaped like the parameters they belong to. Frozen
/// layers hold exact zeros.
struct ModelGrads {
    Eigen::MatrixXd featurizer;
    Dense fc1;
    Dense fc2;
    Dense policy_head;
    Dense value_head;

    static ModelGrads zeros_like(const ModelParams& params);
    void add(const ModelGrads& other, double scale = 1.0);
    void scale(double s);
};

struct RewardGrads {
    Eigen::MatrixXd featurizer;
    Dense fc1;
    Dense fc2;
    Dense score_head;

    static RewardGrads zeros_like(const RewardModelParams& params);
    void add(const RewardGrads& other, double scale = 1.0);
    void scale(double s);
};

/// Deterministic initialization from a seed. The featurizer is fixed from
/// the seed and frozen by default; adapter and heads start with small
/// random weights and zero biases.
ModelParams init_params(uint64_t seed, const ModelDims& dims);

/// Reward model initialized from an instruction model: featurizer and
/// adapter weights are copied; the featurizer's new action-block columns
/// and the score head come from the seed. All layers default to trainable.
RewardModelParams init_reward_model(const ModelParams& instruction_model, uint64_t seed);

/// One-hot state encoding at a given step of a problem's chain.
/// `prev_value` is the value the chain holds before the step is applied.
Eigen::VectorXd encode_state(const ToyProblem& p, int step_index, int prev_value);

/// State encoding plus the action taken, for reward-model scoring.
Eigen::VectorXd encode_scored_step(const ToyProblem& p, int step_index, int prev_value,
                                   int action);

ForwardTrace forward(const ModelParams& params, const Eigen::VectorXd& state);
RewardTrace reward_forward(const RewardModelParams& params, const Eigen::VectorXd& input);

/// Exact analytic gradients for all non-frozen layers given upstream
/// gradients on logits and value. Throws StaleTrace if the trace does not
/// belong to these parameters.
ModelGrads backward(const ModelParams& params, const ForwardTrace& trace,
                    const Eigen::VectorXd& grad_logits, double grad_value);

RewardGrads reward_backward(const RewardModelParams& params, const RewardTrace& trace,
                            double grad_score);

/// params - lr * grads on trainable layers; frozen layers are copied
/// bit-for-bit.
ModelParams sgd_step(const ModelParams& params, const ModelGrads& grads, double lr);
RewardModelParams sgd_step(const RewardModelParams& params, const RewardGrads& grads, double lr);

Eigen::VectorXd softmax(const Eigen::VectorXd& logits);
Eigen::VectorXd log_softmax(const Eigen::VectorXd& logits);

/// Greedy action with lowest-index tie-break.
int argmax_action(const Eigen::VectorXd& logits);

/// Directory checkpoints: manifest.json plus one little-endian float64
/// array file per layer, row-major. Missing directory or manifest throws
/// MissingCheckpoint; malformed or truncated contents throw
/// CorruptCheckpoint.
void save_checkpoint(const std::string& dir, const ModelParams& params);
void save_checkpoint(const std::string& dir, const RewardModelParams& params);
ModelParams load_checkpoint(const std::string& dir);
RewardModelParams load_reward_checkpoint(const std::string& dir);

} // namespace steprl
