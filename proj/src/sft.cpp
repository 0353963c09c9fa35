#include "steprl/sft.hpp"

#include <algorithm>
#include <cmath>

#include "steprl/errors.hpp"
#include "steprl/rng.hpp"

namespace steprl {

namespace {

const std::set<std::string> kAllLayers = {"featurizer", "adapter", "head"};

// Cross-entropy on one forward pass; returns loss and accumulates grads.
double ce_step(const ModelParams& params, const Eigen::VectorXd& state, int target,
               ModelGrads& acc) {
    ForwardTrace trace = forward(params, state);
    Eigen::VectorXd log_probs = log_softmax(trace.logits);
    Eigen::VectorXd grad_logits = softmax(trace.logits);
    grad_logits(target) -= 1.0;
    acc.add(backward(params, trace, grad_logits, 0.0));
    return -log_probs(target);
}

} // namespace

void StageConfig::validate() const {
    if (stage_id < 1 || stage_id > 4) throw InvalidConfig("stage_id must be in 1..4");
    if (epochs < 1) throw InvalidConfig("epochs must be positive");
    if (!(lr > 0.0)) throw InvalidConfig("lr must be positive");
    double weight_sum = 0.0;
    for (const auto& [name, weight] : mixture) {
        if (weight < 0.0) throw InvalidConfig("mixture weight for " + name + " is negative");
        weight_sum += weight;
    }
    if (std::abs(weight_sum - 1.0) > 1e-9) throw InvalidConfig("mixture weights must sum to 1");
    if (stage_id == 1 && trainable_layers != std::set<std::string>{"adapter"}) {
        throw InvalidConfig("stage 1 trains the adapter only");
    }
    if ((stage_id == 2 || stage_id == 3) && trainable_layers != kAllLayers) {
        throw InvalidConfig("stages 2 and 3 train all layers");
    }
}

void to_json(nlohmann::json& j, const EpochMetrics& m) {
    j = nlohmann::json{{"stage", m.stage_id},
                       {"epoch", m.epoch},
                       {"mean_loss", m.mean_loss},
                       {"examples", m.examples}};
}

std::vector<StageConfig> default_curriculum(uint64_t seed) {
    std::vector<StageConfig> stages(4);

    stages[0].stage_id = 1;
    stages[0].trainable_layers = {"adapter"};
    stages[0].mixture = {{"alignment", 1.0}};
    stages[0].epochs = 1;
    stages[0].lr = 0.05;

    stages[1].stage_id = 2;
    stages[1].trainable_layers = kAllLayers;
    stages[1].mixture = {{"general", 1.0}};
    stages[1].epochs = 2;
    stages[1].lr = 0.05;

    stages[2].stage_id = 3;
    stages[2].trainable_layers = kAllLayers;
    stages[2].mixture = {{"cot", 1.0}};
    stages[2].epochs = 2;
    stages[2].lr = 0.05;

    stages[3].stage_id = 4;
    stages[3].trainable_layers = {"adapter", "head"};
    stages[3].mixture = {{"rl", 1.0}};
    stages[3].epochs = 1;
    stages[3].lr = 0.02;

    for (auto& stage : stages) {
        stage.seed = mix_seed(seed, static_cast<uint64_t>(stage.stage_id));
    }
    return stages;
}

std::pair<double, ModelGrads> sft_loss(const ModelParams& params, const ToyProblem& problem,
                                       const std::vector<int>& gold_actions) {
    if (static_cast<int>(gold_actions.size()) != problem.chain_length()) {
        throw ShapeMismatch("gold action count does not match chain length");
    }
    ModelGrads grads = ModelGrads::zeros_like(params);
    double loss = 0.0;
    int prev = problem.start;
    for (int t = 0; t < problem.chain_length(); ++t) {
        loss += ce_step(params, encode_state(problem, t, prev), gold_actions[t], grads);
        prev = gold_actions[t]; // teacher forcing
    }
    return {loss, std::move(grads)};
}

std::pair<double, ModelGrads> caption_loss(const ModelParams& params,
                                           const Eigen::VectorXd& state, int target) {
    if (target < 0 || target >= params.dims.modulus) {
        throw ShapeMismatch("caption target outside the class range");
    }
    ModelGrads grads = ModelGrads::zeros_like(params);
    double loss = ce_step(params, state, target, grads);
    return {loss, std::move(grads)};
}

std::pair<ModelParams, std::vector<EpochMetrics>> run_stage(
    const ModelParams& params, const StageConfig& cfg,
    const std::map<std::string, SftDataset>& datasets) {
    cfg.validate();

    struct MixtureEntry {
        const SftDataset* dataset;
        double weight;
    };
    std::vector<MixtureEntry> mixture;
    size_t total_examples = 0;
    for (const auto& [name, weight] : cfg.mixture) {
        auto it = datasets.find(name);
        if (it == datasets.end()) throw UnknownDataset("no dataset named " + name);
        mixture.push_back({&it->second, weight});
        total_examples += it->second.examples.size();
    }

    FreezeFlags original_freeze = params.freeze;
    ModelParams current = params;
    current.freeze = FreezeFlags::trainable_only(cfg.trainable_layers);

    std::vector<EpochMetrics> metrics;
    bool updated = false;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        // Each dataset contributes proportionally to its weight, sampled
        // without replacement; short datasets are capped at their size.
        std::vector<std::pair<size_t, size_t>> schedule; // (mixture idx, example idx)
        for (size_t d = 0; d < mixture.size(); ++d) {
            size_t available = mixture[d].dataset->examples.size();
            auto want = static_cast<size_t>(std::llround(
                mixture[d].weight * static_cast<double>(total_examples)));
            size_t take = std::min(available, want);
            if (take == 0) continue;
            std::vector<size_t> order(available);
            for (size_t i = 0; i < available; ++i) order[i] = i;
            Rng picker(mix_seed(cfg.seed, static_cast<uint64_t>(epoch), static_cast<uint64_t>(d)));
            picker.shuffle(order);
            for (size_t i = 0; i < take; ++i) schedule.emplace_back(d, order[i]);
        }
        Rng shuffler(mix_seed(cfg.seed, static_cast<uint64_t>(epoch), hash_str("interleave")));
        shuffler.shuffle(schedule);

        if (schedule.empty()) continue;

        double loss_sum = 0.0;
        for (const auto& [d, i] : schedule) {
            const SftExample& example = mixture[d].dataset->examples[i];
            auto [loss, grads] = std::visit(
                [&](const auto& ex) -> std::pair<double, ModelGrads> {
                    using T = std::decay_t<decltype(ex)>;
                    if constexpr (std::is_same_v<T, CotExample>) {
                        return sft_loss(current, ex.problem, ex.gold_actions);
                    } else {
                        return caption_loss(current, ex.state, ex.target);
                    }
                },
                example);
            loss_sum += loss;
            current = sgd_step(current, grads, cfg.lr);
            updated = true;
        }
        metrics.push_back(EpochMetrics{cfg.stage_id, epoch,
                                       loss_sum / static_cast<double>(schedule.size()),
                                       schedule.size()});
    }

    if (!updated) {
        // No examples at all: hand back the input params untouched.
        return {params, metrics};
    }
    current.freeze = original_freeze;
    return {std::move(current), std::move(metrics)};
}

std::vector<ToyProblem> make_problem_set(uint64_t seed, int modulus, int chain_length,
                                         size_t count) {
    std::vector<ToyProblem> problems;
    problems.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        problems.push_back(generate_problem(mix_seed(seed, i), modulus, chain_length));
    }
    return problems;
}

SftDataset make_cot_dataset(const std::string& name, const std::vector<ToyProblem>& problems) {
    SftDataset dataset;
    dataset.name = name;
    dataset.examples.reserve(problems.size());
    for (const auto& p : problems) {
        dataset.examples.push_back(CotExample{p, oracle_solve(p)});
    }
    return dataset;
}

SftDataset make_caption_dataset(const std::string& name, const std::vector<ToyProblem>& problems) {
    SftDataset dataset;
    dataset.name = name;
    for (const auto& p : problems) {
        int prev = p.start;
        std::vector<int> oracle = oracle_solve(p);
        for (int t = 0; t < p.chain_length(); ++t) {
            dataset.examples.push_back(CaptionExample{encode_state(p, t, prev), prev});
            prev = oracle[static_cast<size_t>(t)];
        }
    }
    return dataset;
}

} // namespace steprl
