#include "steprl/model.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "steprl/errors.hpp"
#include "steprl/rng.hpp"

namespace steprl {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::atomic<uint64_t> g_param_version{1};

uint64_t next_version() { return g_param_version.fetch_add(1); }

Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols, double stddev) {
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            m(r, c) = rng.normal(0.0, stddev);
        }
    }
    return m;
}

Dense random_dense(Rng& rng, int rows, int cols, double stddev) {
    Dense d;
    d.w = random_matrix(rng, rows, cols, stddev);
    d.b = Eigen::VectorXd::Zero(rows);
    return d;
}

Dense zeros_dense(int rows, int cols) {
    return Dense{Eigen::MatrixXd::Zero(rows, cols), Eigen::VectorXd::Zero(rows)};
}

void add_dense(Dense& acc, const Dense& g, double scale) {
    acc.w += scale * g.w;
    acc.b += scale * g.b;
}

constexpr double kHeadInitScale = 0.01;

struct BackboneActivations {
    Eigen::VectorXd features;
    Eigen::VectorXd h1;
    Eigen::VectorXd h2;
};

BackboneActivations backbone_forward(const Backbone& bb, const Eigen::VectorXd& input) {
    BackboneActivations act;
    act.features = bb.featurizer * input;
    act.h1 = (bb.fc1.w * act.features + bb.fc1.b).array().tanh();
    act.h2 = (bb.fc2.w * act.h1 + bb.fc2.b).array().tanh();
    return act;
}

// Backpropagates dL/dh2 through the adapter and featurizer, writing gradient
// blocks unless the owning layer is frozen. Frozen weights still carry the
// chain rule through to earlier layers.
template <typename Grads>
void backbone_backward(const Backbone& bb, const Eigen::VectorXd& input,
                       const BackboneActivations& act, const Eigen::VectorXd& dh2,
                       const FreezeFlags& freeze, Grads& grads) {
    Eigen::VectorXd dz2 = dh2.cwiseProduct(Eigen::VectorXd::Ones(act.h2.size()) -
                                           act.h2.cwiseProduct(act.h2));
    if (!freeze.adapter) {
        grads.fc2.w = dz2 * act.h1.transpose();
        grads.fc2.b = dz2;
    }
    Eigen::VectorXd dh1 = bb.fc2.w.transpose() * dz2;
    Eigen::VectorXd dz1 = dh1.cwiseProduct(Eigen::VectorXd::Ones(act.h1.size()) -
                                           act.h1.cwiseProduct(act.h1));
    if (!freeze.adapter) {
        grads.fc1.w = dz1 * act.features.transpose();
        grads.fc1.b = dz1;
    }
    if (!freeze.featurizer) {
        Eigen::VectorXd dfeat = bb.fc1.w.transpose() * dz1;
        grads.featurizer = dfeat * input.transpose();
    }
}

void write_layer(const fs::path& file, const Eigen::MatrixXd& m) {
    std::ofstream out(file, std::ios::binary);
    if (!out.is_open()) throw IoError("cannot write checkpoint layer: " + file.string());
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            double v = m(r, c);
            out.write(reinterpret_cast<const char*>(&v), sizeof(double));
        }
    }
}

Eigen::MatrixXd read_layer(const fs::path& file, int rows, int cols) {
    std::ifstream in(file, std::ios::binary);
    if (!in.is_open()) throw CorruptCheckpoint("missing checkpoint layer: " + file.string());
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            double v = 0.0;
            in.read(reinterpret_cast<char*>(&v), sizeof(double));
            if (!in) throw CorruptCheckpoint("truncated checkpoint layer: " + file.string());
            m(r, c) = v;
        }
    }
    char extra = 0;
    if (in.read(&extra, 1)) {
        throw CorruptCheckpoint("checkpoint layer larger than manifest shape: " + file.string());
    }
    return m;
}

struct LayerRef {
    std::string name;
    const Eigen::MatrixXd* matrix;
};

void save_layers(const std::string& dir, const json& manifest_extra,
                 const std::vector<LayerRef>& layers, const ModelDims& dims,
                 const FreezeFlags& freeze) {
    fs::create_directories(dir);
    json manifest = manifest_extra;
    manifest["format"] = 1;
    manifest["dims"] = {{"feature", dims.feature},
                        {"hidden", dims.hidden},
                        {"adapter_out", dims.adapter_out},
                        {"modulus", dims.modulus}};
    manifest["freeze"] = {{"featurizer", freeze.featurizer},
                          {"adapter", freeze.adapter},
                          {"head", freeze.head}};
    json layer_list = json::array();
    for (const auto& layer : layers) {
        std::string file = layer.name + ".bin";
        layer_list.push_back({{"name", layer.name},
                              {"rows", layer.matrix->rows()},
                              {"cols", layer.matrix->cols()},
                              {"file", file}});
        write_layer(fs::path(dir) / file, *layer.matrix);
    }
    manifest["layers"] = std::move(layer_list);
    std::ofstream out(fs::path(dir) / "manifest.json", std::ios::binary);
    if (!out.is_open()) throw IoError("cannot write checkpoint manifest in " + dir);
    out << manifest.dump(2) << '\n';
}

json load_manifest(const std::string& dir, const std::string& expected_kind) {
    fs::path manifest_path = fs::path(dir) / "manifest.json";
    std::ifstream in(manifest_path);
    if (!in.is_open()) throw MissingCheckpoint("no checkpoint at " + dir);
    json manifest;
    try {
        in >> manifest;
    } catch (const json::exception& e) {
        throw CorruptCheckpoint("unreadable manifest in " + dir + ": " + e.what());
    }
    if (manifest.value("kind", "") != expected_kind) {
        throw CorruptCheckpoint("checkpoint in " + dir + " is not a " + expected_kind + " model");
    }
    return manifest;
}

Eigen::MatrixXd load_named_layer(const std::string& dir, const json& manifest,
                                 const std::string& name) {
    for (const auto& layer : manifest.at("layers")) {
        if (layer.at("name").get<std::string>() == name) {
            return read_layer(fs::path(dir) / layer.at("file").get<std::string>(),
                              layer.at("rows").get<int>(), layer.at("cols").get<int>());
        }
    }
    throw CorruptCheckpoint("checkpoint in " + dir + " lacks layer " + name);
}

Eigen::VectorXd load_named_vector(const std::string& dir, const json& manifest,
                                  const std::string& name) {
    Eigen::MatrixXd m = load_named_layer(dir, manifest, name);
    if (m.cols() != 1) {
        throw CorruptCheckpoint("layer " + name + " in " + dir + " is not a vector");
    }
    return m.col(0);
}

FreezeFlags freeze_from_manifest(const json& manifest) {
    FreezeFlags freeze;
    const json& f = manifest.at("freeze");
    freeze.featurizer = f.at("featurizer").get<bool>();
    freeze.adapter = f.at("adapter").get<bool>();
    freeze.head = f.at("head").get<bool>();
    return freeze;
}

ModelDims dims_from_manifest(const json& manifest) {
    ModelDims dims;
    const json& d = manifest.at("dims");
    dims.feature = d.at("feature").get<int>();
    dims.hidden = d.at("hidden").get<int>();
    dims.adapter_out = d.at("adapter_out").get<int>();
    dims.modulus = d.at("modulus").get<int>();
    try {
        dims.validate();
    } catch (const InvalidConfig& e) {
        throw CorruptCheckpoint(std::string("bad dims in manifest: ") + e.what());
    }
    return dims;
}

} // namespace

void ModelDims::validate() const {
    if (feature <= 0 || hidden <= 0 || adapter_out <= 0) {
        throw InvalidConfig("model dims must be positive");
    }
    if (modulus < kMinModulus || modulus > kMaxModulus) {
        throw InvalidConfig("modulus must be in [2, 64]");
    }
}

bool FreezeFlags::layer_frozen(const std::string& name) const {
    if (name == "featurizer") return featurizer;
    if (name == "adapter") return adapter;
    if (name == "head") return head;
    throw InvalidConfig("unknown layer name: " + name);
}

FreezeFlags FreezeFlags::trainable_only(const std::set<std::string>& layers) {
    for (const auto& name : layers) {
        if (name != "featurizer" && name != "adapter" && name != "head") {
            throw InvalidConfig("unknown layer name: " + name);
        }
    }
    FreezeFlags f;
    f.featurizer = layers.count("featurizer") == 0;
    f.adapter = layers.count("adapter") == 0;
    f.head = layers.count("head") == 0;
    return f;
}

ModelGrads ModelGrads::zeros_like(const ModelParams& p) {
    ModelGrads g;
    g.featurizer = Eigen::MatrixXd::Zero(p.backbone.featurizer.rows(), p.backbone.featurizer.cols());
    g.fc1 = zeros_dense(static_cast<int>(p.backbone.fc1.w.rows()),
                        static_cast<int>(p.backbone.fc1.w.cols()));
    g.fc2 = zeros_dense(static_cast<int>(p.backbone.fc2.w.rows()),
                        static_cast<int>(p.backbone.fc2.w.cols()));
    g.policy_head = zeros_dense(static_cast<int>(p.policy_head.w.rows()),
                                static_cast<int>(p.policy_head.w.cols()));
    g.value_head = zeros_dense(static_cast<int>(p.value_head.w.rows()),
                               static_cast<int>(p.value_head.w.cols()));
    return g;
}

void ModelGrads::add(const ModelGrads& other, double s) {
    featurizer += s * other.featurizer;
    add_dense(fc1, other.fc1, s);
    add_dense(fc2, other.fc2, s);
    add_dense(policy_head, other.policy_head, s);
    add_dense(value_head, other.value_head, s);
}

void ModelGrads::scale(double s) {
    featurizer *= s;
    fc1.w *= s;
    fc1.b *= s;
    fc2.w *= s;
    fc2.b *= s;
    policy_head.w *= s;
    policy_head.b *= s;
    value_head.w *= s;
    value_head.b *= s;
}

RewardGrads RewardGrads::zeros_like(const RewardModelParams& p) {
    RewardGrads g;
    g.featurizer = Eigen::MatrixXd::Zero(p.backbone.featurizer.rows(), p.backbone.featurizer.cols());
    g.fc1 = zeros_dense(static_cast<int>(p.backbone.fc1.w.rows()),
                        static_cast<int>(p.backbone.fc1.w.cols()));
    g.fc2 = zeros_dense(static_cast<int>(p.backbone.fc2.w.rows()),
                        static_cast<int>(p.backbone.fc2.w.cols()));
    g.score_head = zeros_dense(static_cast<int>(p.score_head.w.rows()),
                               static_cast<int>(p.score_head.w.cols()));
    return g;
}

void RewardGrads::add(const RewardGrads& other, double s) {
    featurizer += s * other.featurizer;
    add_dense(fc1, other.fc1, s);
    add_dense(fc2, other.fc2, s);
    add_dense(score_head, other.score_head, s);
}

void RewardGrads::scale(double s) {
    featurizer *= s;
    fc1.w *= s;
    fc1.b *= s;
    fc2.w *= s;
    fc2.b *= s;
    score_head.w *= s;
    score_head.b *= s;
}

ModelParams init_params(uint64_t seed, const ModelDims& dims) {
    dims.validate();
    ModelParams p;
    p.dims = dims;

    int input = dims.state_input();
    Rng feat_rng(mix_seed(seed, hash_str("featurizer")));
    p.backbone.featurizer =
        random_matrix(feat_rng, dims.feature, input, 1.0 / std::sqrt(static_cast<double>(input)));

    Rng adapter_rng(mix_seed(seed, hash_str("adapter")));
    p.backbone.fc1 = random_dense(adapter_rng, dims.hidden, dims.feature,
                                  1.0 / std::sqrt(static_cast<double>(dims.feature)));
    p.backbone.fc2 = random_dense(adapter_rng, dims.adapter_out, dims.hidden,
                                  1.0 / std::sqrt(static_cast<double>(dims.hidden)));

    Rng head_rng(mix_seed(seed, hash_str("head")));
    p.policy_head = random_dense(head_rng, dims.modulus, dims.adapter_out, kHeadInitScale);
    p.value_head = random_dense(head_rng, 1, dims.adapter_out, kHeadInitScale);

    p.freeze = FreezeFlags{}; // featurizer frozen, adapter and head trainable
    p.version = next_version();
    return p;
}

RewardModelParams init_reward_model(const ModelParams& instruction_model, uint64_t seed) {
    const ModelDims& dims = instruction_model.dims;
    RewardModelParams rm;
    rm.dims = dims;

    int state_input = dims.state_input();
    int scored_input = dims.scored_input();
    Rng feat_rng(mix_seed(seed, hash_str("rm-featurizer")));
    rm.backbone.featurizer.resize(dims.feature, scored_input);
    rm.backbone.featurizer.leftCols(state_input) = instruction_model.backbone.featurizer;
    rm.backbone.featurizer.rightCols(dims.modulus) = random_matrix(
        feat_rng, dims.feature, dims.modulus, 1.0 / std::sqrt(static_cast<double>(state_input)));

    rm.backbone.fc1 = instruction_model.backbone.fc1;
    rm.backbone.fc2 = instruction_model.backbone.fc2;

    Rng head_rng(mix_seed(seed, hash_str("rm-head")));
    rm.score_head = random_dense(head_rng, 1, dims.adapter_out, kHeadInitScale);

    rm.freeze = FreezeFlags{false, false, false};
    rm.version = next_version();
    return rm;
}

Eigen::VectorXd encode_state(const ToyProblem& p, int step_index, int prev_value) {
    const int m = p.modulus;
    if (step_index < 0 || step_index >= p.chain_length()) {
        throw ShapeMismatch("step index " + std::to_string(step_index) + " outside chain");
    }
    if (prev_value < 0 || prev_value >= m) {
        throw ShapeMismatch("state value outside [0, modulus)");
    }
    Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * m + 2 + kMaxChainLength);
    x(prev_value) = 1.0;
    x(m + (p.ops[static_cast<size_t>(step_index)].first == ChainOp::add ? 0 : 1)) = 1.0;
    x(m + 2 + p.ops[static_cast<size_t>(step_index)].second) = 1.0;
    x(2 * m + 2 + step_index) = 1.0;
    return x;
}

Eigen::VectorXd encode_scored_step(const ToyProblem& p, int step_index, int prev_value,
                                   int action) {
    if (action < 0 || action >= p.modulus) {
        throw ShapeMismatch("action outside [0, modulus)");
    }
    Eigen::VectorXd state = encode_state(p, step_index, prev_value);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(state.size() + p.modulus);
    x.head(state.size()) = state;
    x(state.size() + action) = 1.0;
    return x;
}

ForwardTrace forward(const ModelParams& params, const Eigen::VectorXd& state) {
    if (state.size() != params.backbone.featurizer.cols()) {
        throw ShapeMismatch("state size " + std::to_string(state.size()) +
                            " does not match featurizer input " +
                            std::to_string(params.backbone.featurizer.cols()));
    }
    ForwardTrace trace;
    trace.input = state;
    BackboneActivations act = backbone_forward(params.backbone, state);
    trace.features = std::move(act.features);
    trace.h1 = std::move(act.h1);
    trace.h2 = std::move(act.h2);
    trace.logits = params.policy_head.w * trace.h2 + params.policy_head.b;
    trace.value = (params.value_head.w * trace.h2)(0) + params.value_head.b(0);
    trace.params_version = params.version;
    return trace;
}

RewardTrace reward_forward(const RewardModelParams& params, const Eigen::VectorXd& input) {
    if (input.size() != params.backbone.featurizer.cols()) {
        throw ShapeMismatch("input size " + std::to_string(input.size()) +
                            " does not match featurizer input " +
                            std::to_string(params.backbone.featurizer.cols()));
    }
    RewardTrace trace;
    trace.input = input;
    BackboneActivations act = backbone_forward(params.backbone, input);
    trace.features = std::move(act.features);
    trace.h1 = std::move(act.h1);
    trace.h2 = std::move(act.h2);
    trace.score = (params.score_head.w * trace.h2)(0) + params.score_head.b(0);
    trace.params_version = params.version;
    return trace;
}

ModelGrads backward(const ModelParams& params, const ForwardTrace& trace,
                    const Eigen::VectorXd& grad_logits, double grad_value) {
    if (trace.params_version != params.version) {
        throw StaleTrace("trace was computed against different parameters");
    }
    if (grad_logits.size() != params.dims.modulus) {
        throw ShapeMismatch("grad_logits size does not match logit count");
    }
    ModelGrads grads = ModelGrads::zeros_like(params);
    if (!params.freeze.head) {
        grads.policy_head.w = grad_logits * trace.h2.transpose();
        grads.policy_head.b = grad_logits;
        grads.value_head.w = grad_value * trace.h2.transpose();
        grads.value_head.b(0) = grad_value;
    }
    Eigen::VectorXd dh2 = params.policy_head.w.transpose() * grad_logits +
                          params.value_head.w.transpose() * grad_value;
    BackboneActivations act{trace.features, trace.h1, trace.h2};
    backbone_backward(params.backbone, trace.input, act, dh2, params.freeze, grads);
    return grads;
}

RewardGrads reward_backward(const RewardModelParams& params, const RewardTrace& trace,
                            double grad_score) {
    if (trace.params_version != params.version) {
        throw StaleTrace("trace was computed against different parameters");
    }
    RewardGrads grads = RewardGrads::zeros_like(params);
    if (!params.freeze.head) {
        grads.score_head.w = grad_score * trace.h2.transpose();
        grads.score_head.b(0) = grad_score;
    }
    Eigen::VectorXd dh2 = params.score_head.w.transpose() * grad_score;
    BackboneActivations act{trace.features, trace.h1, trace.h2};
    backbone_backward(params.backbone, trace.input, act, dh2, params.freeze, grads);
    return grads;
}

ModelParams sgd_step(const ModelParams& params, const ModelGrads& grads, double lr) {
    ModelParams out = params;
    if (!params.freeze.featurizer) out.backbone.featurizer -= lr * grads.featurizer;
    if (!params.freeze.adapter) {
        out.backbone.fc1.w -= lr * grads.fc1.w;
        out.backbone.fc1.b -= lr * grads.fc1.b;
        out.backbone.fc2.w -= lr * grads.fc2.w;
        out.backbone.fc2.b -= lr * grads.fc2.b;
    }
    if (!params.freeze.head) {
        out.policy_head.w -= lr * grads.policy_head.w;
        out.policy_head.b -= lr * grads.policy_head.b;
        out.value_head.w -= lr * grads.value_head.w;
        out.value_head.b -= lr * grads.value_head.b;
    }
    out.version = next_version();
    return out;
}

RewardModelParams sgd_step(const RewardModelParams& params, const RewardGrads& grads, double lr) {
    RewardModelParams out = params;
    if (!params.freeze.featurizer) out.backbone.featurizer -= lr * grads.featurizer;
    if (!params.freeze.adapter) {
        out.backbone.fc1.w -= lr * grads.fc1.w;
        out.backbone.fc1.b -= lr * grads.fc1.b;
        out.backbone.fc2.w -= lr * grads.fc2.w;
        out.backbone.fc2.b -= lr * grads.fc2.b;
    }
    if (!params.freeze.head) {
        out.score_head.w -= lr * grads.score_head.w;
        out.score_head.b -= lr * grads.score_head.b;
    }
    out.version = next_version();
    return out;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
    Eigen::VectorXd shifted = logits.array() - logits.maxCoeff();
    Eigen::VectorXd e = shifted.array().exp();
    return e / e.sum();
}

Eigen::VectorXd log_softmax(const Eigen::VectorXd& logits) {
    double max = logits.maxCoeff();
    double log_sum = std::log((logits.array() - max).exp().sum()) + max;
    return logits.array() - log_sum;
}

int argmax_action(const Eigen::VectorXd& logits) {
    int best = 0;
    for (int i = 1; i < logits.size(); ++i) {
        if (logits(i) > logits(best)) best = i;
    }
    return best;
}

void save_checkpoint(const std::string& dir, const ModelParams& params) {
    Eigen::MatrixXd policy_bias = params.policy_head.b;
    Eigen::MatrixXd value_bias = params.value_head.b;
    Eigen::MatrixXd fc1_bias = params.backbone.fc1.b;
    Eigen::MatrixXd fc2_bias = params.backbone.fc2.b;
    save_layers(dir, json{{"kind", "policy"}},
                {
                    {"featurizer", &params.backbone.featurizer},
                    {"adapter.fc1.weight", &params.backbone.fc1.w},
                    {"adapter.fc1.bias", &fc1_bias},
                    {"adapter.fc2.weight", &params.backbone.fc2.w},
                    {"adapter.fc2.bias", &fc2_bias},
                    {"head.policy.weight", &params.policy_head.w},
                    {"head.policy.bias", &policy_bias},
                    {"head.value.weight", &params.value_head.w},
                    {"head.value.bias", &value_bias},
                },
                params.dims, params.freeze);
}

void save_checkpoint(const std::string& dir, const RewardModelParams& params) {
    Eigen::MatrixXd score_bias = params.score_head.b;
    Eigen::MatrixXd fc1_bias = params.backbone.fc1.b;
    Eigen::MatrixXd fc2_bias = params.backbone.fc2.b;
    save_layers(dir, json{{"kind", "reward"}},
                {
                    {"featurizer", &params.backbone.featurizer},
                    {"adapter.fc1.weight", &params.backbone.fc1.w},
                    {"adapter.fc1.bias", &fc1_bias},
                    {"adapter.fc2.weight", &params.backbone.fc2.w},
                    {"adapter.fc2.bias", &fc2_bias},
                    {"head.score.weight", &params.score_head.w},
                    {"head.score.bias", &score_bias},
                },
                params.dims, params.freeze);
}

ModelParams load_checkpoint(const std::string& dir) {
    json manifest = load_manifest(dir, "policy");
    ModelParams p;
    p.dims = dims_from_manifest(manifest);
    p.freeze = freeze_from_manifest(manifest);
    try {
        p.backbone.featurizer = load_named_layer(dir, manifest, "featurizer");
        p.backbone.fc1.w = load_named_layer(dir, manifest, "adapter.fc1.weight");
        p.backbone.fc1.b = load_named_vector(dir, manifest, "adapter.fc1.bias");
        p.backbone.fc2.w = load_named_layer(dir, manifest, "adapter.fc2.weight");
        p.backbone.fc2.b = load_named_vector(dir, manifest, "adapter.fc2.bias");
        p.policy_head.w = load_named_layer(dir, manifest, "head.policy.weight");
        p.policy_head.b = load_named_vector(dir, manifest, "head.policy.bias");
        p.value_head.w = load_named_layer(dir, manifest, "head.value.weight");
        p.value_head.b = load_named_vector(dir, manifest, "head.value.bias");
    } catch (const json::exception& e) {
        throw CorruptCheckpoint("malformed manifest in " + dir + ": " + e.what());
    }
    if (p.backbone.featurizer.cols() != p.dims.state_input() ||
        p.backbone.featurizer.rows() != p.dims.feature ||
        p.policy_head.w.rows() != p.dims.modulus) {
        throw CorruptCheckpoint("layer shapes disagree with dims in " + dir);
    }
    p.version = next_version();
    return p;
}

RewardModelParams load_reward_checkpoint(const std::string& dir) {
    json manifest = load_manifest(dir, "reward");
    RewardModelParams p;
    p.dims = dims_from_manifest(manifest);
    p.freeze = freeze_from_manifest(manifest);
    try {
        p.backbone.featurizer = load_named_layer(dir, manifest, "featurizer");
        p.backbone.fc1.w = load_named_layer(dir, manifest, "adapter.fc1.weight");
        p.backbone.fc1.b = load_named_vector(dir, manifest, "adapter.fc1.bias");
        p.backbone.fc2.w = load_named_layer(dir, manifest, "adapter.fc2.weight");
        p.backbone.fc2.b = load_named_vector(dir, manifest, "adapter.fc2.bias");
        p.score_head.w = load_named_layer(dir, manifest, "head.score.weight");
        p.score_head.b = load_named_vector(dir, manifest, "head.score.bias");
    } catch (const json::exception& e) {
        throw CorruptCheckpoint("malformed manifest in " + dir + ": " + e.what());
    }
    if (p.backbone.featurizer.cols() != p.dims.scored_input()) {
        throw CorruptCheckpoint("layer shapes disagree with dims in " + dir);
    }
    p.version = next_version();
    return p;
}

} // namespace steprl
