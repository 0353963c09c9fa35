#pragma once

// Shared helpers for the test suites: flat parameter enumeration for
// finite-difference checks, and small input builders. Everything here is
// test-only and independent of the library's backward pass.

#include <functional>
#include <string>
#include <vector>

#include "steprl/model.hpp"
#include "steprl/rng.hpp"
#include "steprl/toy_env.hpp"

namespace steprl::testutil {

struct ParamRef {
    double* value;
    std::string layer; // "featurizer", "adapter", "head"
};

inline void collect_matrix(Eigen::MatrixXd& m, const std::string& layer,
                           std::vector<ParamRef>& out) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out.push_back({&m(r, c), layer});
        }
    }
}

inline void collect_vector(Eigen::VectorXd& v, const std::string& layer,
                           std::vector<ParamRef>& out) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back({&v(i), layer});
    }
}

inline std::vector<ParamRef> param_refs(ModelParams& p) {
    std::vector<ParamRef> refs;
    collect_matrix(p.backbone.featurizer, "featurizer", refs);
    collect_matrix(p.backbone.fc1.w, "adapter", refs);
    collect_vector(p.backbone.fc1.b, "adapter", refs);
    collect_matrix(p.backbone.fc2.w, "adapter", refs);
    collect_vector(p.backbone.fc2.b, "adapter", refs);
    collect_matrix(p.policy_head.w, "head", refs);
    collect_vector(p.policy_head.b, "head", refs);
    collect_matrix(p.value_head.w, "head", refs);
    collect_vector(p.value_head.b, "head", refs);
    return refs;
}

inline std::vector<ParamRef> param_refs(RewardModelParams& p) {
    std::vector<ParamRef> refs;
    collect_matrix(p.backbone.featurizer, "featurizer", refs);
    collect_matrix(p.backbone.fc1.w, "adapter", refs);
    collect_vector(p.backbone.fc1.b, "adapter", refs);
    collect_matrix(p.backbone.fc2.w, "adapter", refs);
    collect_vector(p.backbone.fc2.b, "adapter", refs);
    collect_matrix(p.score_head.w, "head", refs);
    collect_vector(p.score_head.b, "head", refs);
    return refs;
}

inline std::vector<ParamRef> grad_refs(ModelGrads& g) {
    std::vector<ParamRef> refs;
    collect_matrix(g.featurizer, "featurizer", refs);
    collect_matrix(g.fc1.w, "adapter", refs);
    collect_vector(g.fc1.b, "adapter", refs);
    collect_matrix(g.fc2.w, "adapter", refs);
    collect_vector(g.fc2.b, "adapter", refs);
    collect_matrix(g.policy_head.w, "head", refs);
    collect_vector(g.policy_head.b, "head", refs);
    collect_matrix(g.value_head.w, "head", refs);
    collect_vector(g.value_head.b, "head", refs);
    return refs;
}

inline std::vector<ParamRef> grad_refs(RewardGrads& g) {
    std::vector<ParamRef> refs;
    collect_matrix(g.featurizer, "featurizer", refs);
    collect_matrix(g.fc1.w, "adapter", refs);
    collect_vector(g.fc1.b, "adapter", refs);
    collect_matrix(g.fc2.w, "adapter", refs);
    collect_vector(g.fc2.b, "adapter", refs);
    collect_matrix(g.score_head.w, "head", refs);
    collect_vector(g.score_head.b, "head", refs);
    return refs;
}

struct GradCheckResult {
    double max_rel_error = 0.0;
    int checked = 0;
};

/// Central-difference check of `analytic` against the scalar `loss_fn`
/// evaluated on perturbed copies of `params`. Entries where both sides are
/// below `ignore_below` in magnitude are skipped. Only layers listed as
/// trainable in the params' freeze flags are checked.
template <typename Params>
GradCheckResult finite_diff_check(Params params,
                                  const std::function<double(const Params&)>& loss_fn,
                                  const std::vector<double>& analytic, double step = 1e-5,
                                  double ignore_below = 1e-8) {
    auto refs = param_refs(params);
    REQUIRE(refs.size() == analytic.size());
    GradCheckResult result;
    for (size_t i = 0; i < refs.size(); ++i) {
        if (params.freeze.layer_frozen(refs[i].layer)) continue;
        double original = *refs[i].value;
        *refs[i].value = original + step;
        double up = loss_fn(params);
        *refs[i].value = original - step;
        double down = loss_fn(params);
        *refs[i].value = original;
        double numeric = (up - down) / (2.0 * step);
        if (std::abs(numeric) < ignore_below && std::abs(analytic[i]) < ignore_below) continue;
        double rel = std::abs(numeric - analytic[i]) /
                     std::max(std::abs(numeric), std::abs(analytic[i]));
        result.max_rel_error = std::max(result.max_rel_error, rel);
        ++result.checked;
    }
    return result;
}

template <typename Grads>
std::vector<double> flatten_grads(Grads g) {
    auto refs = grad_refs(g);
    std::vector<double> flat;
    flat.reserve(refs.size());
    for (const auto& ref : refs) flat.push_back(*ref.value);
    return flat;
}

inline Eigen::VectorXd random_state(const ToyProblem& p, Rng& rng) {
    int step = rng.uniform_int(p.chain_length());
    int value = rng.uniform_int(p.modulus);
    return encode_state(p, step, value);
}

} // namespace steprl::testutil
