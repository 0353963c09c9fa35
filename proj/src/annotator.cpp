#include "steprl/annotator.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "steprl/errors.hpp"
#include "steprl/rng.hpp"

namespace steprl {

namespace {

// A two-step solution whose boxed value is `answer`. The work step quotes
// the problem id so solutions differ across problems.
Solution solution_with_answer(const ProblemRecord& problem, const CanonicalAnswer& answer) {
    return make_solution({
        {1, "Work", "solve problem " + problem.id},
        {2, "Conclude", "the answer is \\boxed{" + answer.to_string() + "}"},
    });
}

} // namespace

CanonicalAnswer perturb_answer(const CanonicalAnswer& gold) {
    if (gold.is_rational()) {
        // gold + 1 is never equal to gold.
        return CanonicalAnswer::rational(gold.num + gold.den, gold.den);
    }
    return CanonicalAnswer::from_text(gold.text + " (wrong)");
}

MockAnnotator::MockAnnotator(uint64_t seed, double round1_error_rate, double round2_fix_rate)
    : seed_(seed), round1_error_rate_(round1_error_rate), round2_fix_rate_(round2_fix_rate) {}

void MockAnnotator::fail_on(const std::string& problem_id) { fail_ids_.insert(problem_id); }

Solution MockAnnotator::generate_solution(const ProblemRecord& problem,
                                          const std::optional<std::string>& hint) {
    if (fail_ids_.count(problem.id)) {
        throw AnnotatorFailure("scripted transport failure for " + problem.id);
    }
    // The hint (gold solution text) is what a real annotator would condition
    // on; the mock only draws whether it answers correctly.
    (void)hint;
    Rng rng(mix_seed(seed_, hash_str(problem.id), hash_str("generate")));
    bool wrong = rng.uniform() < round1_error_rate_;
    CanonicalAnswer answer = wrong ? perturb_answer(problem.gold_answer) : problem.gold_answer;
    return solution_with_answer(problem, answer);
}

Solution MockAnnotator::revise_solution(const ProblemRecord& problem, const Solution& prior,
                                        const std::string& judge_feedback) {
    if (fail_ids_.count(problem.id)) {
        throw AnnotatorFailure("scripted transport failure for " + problem.id);
    }
    (void)judge_feedback;
    Rng rng(mix_seed(seed_, hash_str(problem.id), hash_str("revise")));
    bool fixed = rng.uniform() < round2_fix_rate_;
    if (fixed) {
        return solution_with_answer(problem, problem.gold_answer);
    }
    // Still wrong, but different from the prior attempt.
    return solution_with_answer(problem, perturb_answer(prior.final_answer));
}

bool MockAnnotator::verify(const CanonicalAnswer& candidate, const CanonicalAnswer& gold) {
    return answers_equal(candidate, gold);
}

std::string MockAnnotator::caption(const ProblemRecord& problem) {
    if (fail_ids_.count(problem.id)) {
        throw AnnotatorFailure("scripted transport failure for " + problem.id);
    }
    return "synthetic diagram for problem " + problem.id;
}

namespace {

using nlohmann::json;

std::string load_template(const std::string& path, const std::string& fallback) {
    if (path.empty()) return fallback;
    std::ifstream in(path);
    if (!in.is_open()) throw AnnotatorFailure("cannot read prompt template: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string substitute(std::string text, const std::string& key, const std::string& value) {
    std::string token = "{" + key + "}";
    size_t at = 0;
    while ((at = text.find(token, at)) != std::string::npos) {
        text.replace(at, token.size(), value);
        at += value.size();
    }
    return text;
}

constexpr const char* kGenerateTemplate =
    "Solve the following problem as numbered steps, one per line, in the exact format\n"
    "'Step <id> (<name>): <content>'. Put the final answer in \\boxed{} inside the last\n"
    "step.\n\nProblem: {statement}\n\nReference solution (hint):\n{hint}\n";

constexpr const char* kReviseTemplate =
    "Your previous solution was judged incorrect: {feedback}\n"
    "Revise the reasoning steps. Keep the same 'Step <id> (<name>): <content>' format\n"
    "and box the final answer in the last step.\n\nProblem: {statement}\n\n"
    "Previous attempt:\n{prior}\n";

constexpr const char* kVerifyTemplate =
    "Candidate answer: {candidate}\nStandard answer: {gold}\n"
    "Reply with exactly YES if they denote the same value, otherwise NO.\n";

constexpr const char* kCaptionTemplate =
    "Write one plain-text sentence describing the figure of this problem for a reader\n"
    "who cannot see it.\n\nProblem: {statement}\n";

class HttpAnnotator : public Annotator {
public:
    explicit HttpAnnotator(HttpAnnotatorConfig config) : config_(std::move(config)) {
        generate_template_ = load_template(config_.generate_template_path, kGenerateTemplate);
        revise_template_ = load_template(config_.revise_template_path, kReviseTemplate);
        verify_template_ = load_template(config_.verify_template_path, kVerifyTemplate);
        caption_template_ = load_template(config_.caption_template_path, kCaptionTemplate);
    }

    Solution generate_solution(const ProblemRecord& problem,
                               const std::optional<std::string>& hint) override {
        std::string prompt = substitute(generate_template_, "statement", problem.statement_primary);
        prompt = substitute(prompt, "hint", hint.value_or("(none)"));
        std::string reply = chat(config_.model, prompt);
        return parse_reply_solution(reply);
    }

    Solution revise_solution(const ProblemRecord& problem, const Solution& prior,
                             const std::string& judge_feedback) override {
        std::string prompt = substitute(revise_template_, "statement", problem.statement_primary);
        prompt = substitute(prompt, "prior", render_solution(prior));
        prompt = substitute(prompt, "feedback", judge_feedback);
        std::string reply = chat(config_.model, prompt);
        return parse_reply_solution(reply);
    }

    bool verify(const CanonicalAnswer& candidate, const CanonicalAnswer& gold) override {
        std::string prompt = substitute(verify_template_, "candidate", candidate.to_string());
        prompt = substitute(prompt, "gold", gold.to_string());
        std::string reply = chat(config_.verifier_model, prompt);
        std::string norm = normalize_text(reply);
        return norm.substr(0, 3) == "yes";
    }

    std::string caption(const ProblemRecord& problem) override {
        std::string prompt = substitute(caption_template_, "statement", problem.statement_primary);
        return chat(config_.model, prompt);
    }

private:
    Solution parse_reply_solution(const std::string& reply) {
        try {
            return parse_solution(reply);
        } catch (const Error& e) {
            throw AnnotatorFailure(std::string("unparseable annotator reply: ") + e.what());
        }
    }

    std::string chat(const std::string& model, const std::string& user_prompt) {
        const char* token = std::getenv(config_.token_env_var.c_str());
        if (token == nullptr || *token == '\0') {
            throw AnnotatorFailure("bearer token env var " + config_.token_env_var + " is not set");
        }
        json body = {
            {"model", model},
            {"temperature", config_.temperature},
            {"messages",
             json::array({{{"role", "system"},
                           {"content", "You are a careful K-12 math solution annotator."}},
                          {{"role", "user"}, {"content", user_prompt}}})},
        };

        std::string last_error;
        for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
            if (attempt > 0) {
                double delay = config_.backoff_base_seconds * static_cast<double>(1 << (attempt - 1));
                std::this_thread::sleep_for(std::chrono::duration<double>(delay));
            }
            httplib::Client client(config_.base_url);
            client.set_bearer_token_auth(token);
            auto res = client.Post("/v1/chat/completions", body.dump(), "application/json");
            if (!res) {
                last_error = "transport error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status == 429 || res->status >= 500) {
                last_error = "retryable status " + std::to_string(res->status);
                continue;
            }
            if (res->status != 200) {
                throw AnnotatorFailure("annotator returned status " + std::to_string(res->status));
            }
            try {
                json reply = json::parse(res->body);
                return reply.at("choices").at(0).at("message").at("content").get<std::string>();
            } catch (const json::exception& e) {
                throw AnnotatorFailure(std::string("malformed annotator response: ") + e.what());
            }
        }
        throw AnnotatorFailure("annotator unreachable after " +
                               std::to_string(config_.max_attempts) + " attempts: " + last_error);
    }

    HttpAnnotatorConfig config_;
    std::string generate_template_;
    std::string revise_template_;
    std::string verify_template_;
    std::string caption_template_;
};

} // namespace

std::unique_ptr<Annotator> make_http_annotator(const HttpAnnotatorConfig& config) {
    if (config.base_url.empty()) {
        throw InvalidConfig("http annotator requires a base_url");
    }
    return std::make_unique<HttpAnnotator>(config);
}

} // namespace steprl
