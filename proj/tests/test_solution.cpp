#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "steprl/errors.hpp"
#include "steprl/rng.hpp"
#include "steprl/solution.hpp"

using namespace steprl;

namespace {

Solution two_step_solution() {
    return make_solution({
        {1, "Setup", "let x = 4"},
        {2, "Conclude", "so the result is \\boxed{42}"},
    });
}

} // namespace

TEST_CASE("render and parse round-trip a well-formed solution") {
    Solution s = two_step_solution();
    std::string text = render_solution(s);
    CHECK(text == "Step 1 (Setup): let x = 4\nStep 2 (Conclude): so the result is \\boxed{42}");

    Solution parsed = parse_solution(text);
    CHECK(parsed == s);
    CHECK(parsed.steps.size() == 2);
    CHECK(parsed.final_answer == CanonicalAnswer::rational(42, 1));
}

TEST_CASE("parse_solution rejects malformed input") {
    CHECK_THROWS_AS(parse_solution("Step 1 (A): x\nStep 3 (B): y \\boxed{1}"), NonContiguousIds);
    CHECK_THROWS_AS(parse_solution("Step 1 (A): x\nStep 2 (B): no box"), NoBoxedAnswer);
    CHECK_THROWS_AS(parse_solution("Step 1 (A): "), MalformedStep);
    CHECK_THROWS_AS(parse_solution("Step one (A): x \\boxed{1}"), MalformedStep);
    CHECK_THROWS_AS(parse_solution("Step 1 A: x \\boxed{1}"), MalformedStep);
    CHECK_THROWS_AS(parse_solution(""), MalformedStep);
    CHECK_THROWS_AS(parse_solution("Step 1 (A): x\n\nStep 2 (B): y \\boxed{1}"), MalformedStep);
    CHECK_THROWS_AS(parse_solution("Step 1 (A): two \\boxed{1} boxes \\boxed{2}"), MalformedStep);
}

TEST_CASE("solution invariants are validated") {
    Solution s = two_step_solution();
    s.final_answer = CanonicalAnswer::rational(7, 1);
    CHECK_THROWS_AS(validate_solution(s), MalformedStep);

    Solution empty;
    CHECK_THROWS_AS(validate_solution(empty), MalformedStep);

    CHECK_THROWS_AS(make_solution({{1, "bad)name", "x \\boxed{1}"}}), MalformedStep);
    CHECK_THROWS_AS(make_solution({{1, "", "x \\boxed{1}"}}), MalformedStep);
}

TEST_CASE("rendered fraction answers normalize on re-parse") {
    Solution s = make_solution({{1, "Conclude", "answer \\boxed{7/2}"}});
    CHECK(s.final_answer == CanonicalAnswer::rational(7, 2));
    CHECK(parse_solution(render_solution(s)).final_answer == CanonicalAnswer::rational(7, 2));
}

TEST_CASE("round-trip holds for random valid solutions") {
    Rng rng(31337);
    const char* names[] = {"Setup", "Expand", "Simplify", "Check", "Conclude"};
    const char* fillers[] = {"combine terms", "apply the identity", "substitute x",
                             "compare both sides", "rewrite the fraction"};
    for (int trial = 0; trial < 300; ++trial) {
        int n_steps = 1 + rng.uniform_int(5);
        std::vector<SolutionStep> steps;
        for (int i = 0; i < n_steps; ++i) {
            SolutionStep step;
            step.id = i + 1;
            step.name = names[rng.uniform_int(5)];
            step.content = fillers[rng.uniform_int(5)];
            if (i + 1 == n_steps) {
                int num = rng.uniform_int(19) - 9;
                int den = 1 + rng.uniform_int(8);
                step.content += " \\boxed{" + std::to_string(num) + "/" + std::to_string(den) + "}";
            }
            steps.push_back(std::move(step));
        }
        Solution s = make_solution(std::move(steps));
        CHECK(parse_solution(render_solution(s)) == s);
    }
}
