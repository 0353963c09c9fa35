#pragma once

#include <memory>
#include <optional>
#include <string>
#include <unordered_set>

#include "steprl/record.hpp"

namespace steprl {

/// The refinement pipeline's model interface (one instance plays the
/// generator/revisor role, verify plays the second-model check).
/// Implementations must be safe to call concurrently or document that they
/// are not; failures surface as AnnotatorFailure.
class Annotator {
public:
    virtual ~Annotator() = default;

    virtual Solution generate_solution(const ProblemRecord& problem,
                                       const std::optional<std::string>& hint) = 0;
    virtual Solution revise_solution(const ProblemRecord& problem, const Solution& prior,
                                     const std::string& judge_feedback) = 0;
    virtual bool verify(const CanonicalAnswer& candidate, const CanonicalAnswer& gold) = 0;
    virtual std::string caption(const ProblemRecord& problem) = 0;
};

/// Deterministic scripted oracle for tests and offline runs. Per-problem
/// randomness derives from (seed, problem id), so results do not depend on
/// call order and concurrent runs match sequential ones.
///
///   round1_error_rate  probability the first generation is wrong
///   round2_fix_rate    probability a revision fixes a wrong answer
class MockAnnotator : public Annotator {
public:
    explicit MockAnnotator(uint64_t seed, double round1_error_rate = 0.0,
                           double round2_fix_rate = 1.0);

    Solution generate_solution(const ProblemRecord& problem,
                               const std::optional<std::string>& hint) override;
    Solution revise_solution(const ProblemRecord& problem, const Solution& prior,
                             const std::string& judge_feedback) override;
    bool verify(const CanonicalAnswer& candidate, const CanonicalAnswer& gold) override;
    std::string caption(const ProblemRecord& problem) override;

    /// Any call touching one of these problem ids throws AnnotatorFailure,
    /// for exercising the pipeline's failure aggregation.
    void fail_on(const std::string& problem_id);

private:
    uint64_t seed_;
    double round1_error_rate_;
    double round2_fix_rate_;
    std::unordered_set<std::string> fail_ids_;
};

struct HttpAnnotatorConfig {
    std::string base_url;                 // e.g. http://annotator.internal:8080
    std::string model = "gpt-4o";
    std::string verifier_model = "gpt-4";
    double temperature = 0.2;
    std::string token_env_var = "STEPRL_ANNOTATOR_TOKEN";
    int max_attempts = 3;
    double backoff_base_seconds = 1.0;
    // Optional prompt template files; {statement}, {hint}, {prior},
    // {feedback}, {candidate}, {gold} are substituted. Built-in templates
    // are used when empty.
    std::string generate_template_path;
    std::string revise_template_path;
    std::string verify_template_path;
    std::string caption_template_path;
};

/// Chat-completion client: POSTs {model, messages, temperature} to
/// <base_url>/v1/chat/completions with a bearer token from the configured
/// environment variable, retrying with exponential backoff on transport
/// errors and 429/5xx. Solutions are parsed from the reply text with
/// parse_solution. Never contacted by the test suite.
std::unique_ptr<Annotator> make_http_annotator(const HttpAnnotatorConfig& config);

/// Deterministic wrong answer for scripted error injection: distinct from
/// `gold` under answers_equal.
CanonicalAnswer perturb_answer(const CanonicalAnswer& gold);

} // namespace steprl
