#pragma once

#include <map>
#include <set>
#include <variant>
#include <vector>

#include <json.hpp>

#include "steprl/model.hpp"
#include "steprl/toy_env.hpp"

namespace steprl {

/// One stage of the four-stage curriculum. Stage 1 trains the adapter only;
/// stages 2 and 3 train every layer; stage 4 is the RL stage and carries
/// its settings here for scheduling purposes only.
struct StageConfig {
    int stage_id = 1;
    std::set<std::string> trainable_layers;
    std::vector<std::pair<std::string, double>> mixture; // (dataset name, weight)
    int epochs = 1;
    double lr = 0.05;
    uint64_t seed = 0;

    void validate() const; // throws InvalidConfig
};

/// Step-supervised example: the gold actions come from oracle_solve.
struct CotExample {
    ToyProblem problem;
    std::vector<int> gold_actions;
};

/// State-captioning example for the alignment/visual-instruction stages:
/// predict a discretized summary of the featurized state (here, the value
/// the state encodes) from the adapter output.
struct CaptionExample {
    Eigen::VectorXd state;
    int target = 0;
};

using SftExample = std::variant<CotExample, CaptionExample>;

struct SftDataset {
    std::string name;
    std::vector<SftExample> examples;
};

struct EpochMetrics {
    int stage_id = 0;
    int epoch = 0;
    double mean_loss = 0.0;
    size_t examples = 0;
};

void to_json(nlohmann::json& j, const EpochMetrics& m);

/// The paper-shaped schedule: alignment (adapter only, 1 epoch), general
/// visual instruction (all layers, 2 epochs), step-wise math instruction
/// (all layers, 2 epochs), then the RL stage.
std::vector<StageConfig> default_curriculum(uint64_t seed = 42);

/// Teacher-forced cross-entropy along the gold action sequence: the summed
/// negative log-probability of each gold action, with states rolled forward
/// on the gold trajectory. Gradients via model backward.
std::pair<double, ModelGrads> sft_loss(const ModelParams& params, const ToyProblem& problem,
                                       const std::vector<int>& gold_actions);

/// Cross-entropy of the policy logits against the caption target class.
std::pair<double, ModelGrads> caption_loss(const ModelParams& params,
                                           const Eigen::VectorXd& state, int target);

/// Runs one stage: epochs x seeded-shuffled mixture, one SGD step per
/// example, freezing exactly the layers missing from cfg.trainable_layers
/// for the duration. The input params' freeze flags are restored on the
/// returned value. Throws UnknownDataset for unknown mixture names.
std::pair<ModelParams, std::vector<EpochMetrics>> run_stage(
    const ModelParams& params, const StageConfig& cfg,
    const std::map<std::string, SftDataset>& datasets);

/// Deterministic problem sets and the standard toy datasets.
std::vector<ToyProblem> make_problem_set(uint64_t seed, int modulus, int chain_length,
                                         size_t count);
SftDataset make_cot_dataset(const std::string& name, const std::vector<ToyProblem>& problems);
SftDataset make_caption_dataset(const std::string& name, const std::vector<ToyProblem>& problems);

} // namespace steprl
