#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "steprl/errors.hpp"
#include "steprl/rng.hpp"
#include "steprl/toy_env.hpp"

using namespace steprl;

namespace {

ToyProblem explicit_problem(int start, std::vector<std::pair<ChainOp, int>> ops, int modulus = 10) {
    ToyProblem p;
    p.seed = 0;
    p.modulus = modulus;
    p.start = start;
    p.ops = std::move(ops);
    return p;
}

} // namespace

TEST_CASE("generate_problem is deterministic and validates config") {
    ToyProblem a = generate_problem(123, 10, 4);
    ToyProblem b = generate_problem(123, 10, 4);
    CHECK(a == b);
    CHECK(a.chain_length() == 4);
    CHECK(a.start >= 0);
    CHECK(a.start < 10);
    for (const auto& [op, operand] : a.ops) {
        CHECK(operand >= 0);
        CHECK(operand < 10);
    }
    CHECK(generate_problem(124, 10, 4) != a);

    CHECK_THROWS_AS(generate_problem(1, 10, 0), InvalidConfig);
    CHECK_THROWS_AS(generate_problem(1, 10, 9), InvalidConfig);
    CHECK_THROWS_AS(generate_problem(1, 1, 4), InvalidConfig);
    CHECK_THROWS_AS(generate_problem(1, 65, 4), InvalidConfig);
}

TEST_CASE("golden problems, oracle chains recomputed by hand") {
    // seed 7:  start 0, ops mul 0 | mul 7 | mul 0 | add 6
    //          0*0=0, 0*7=0, 0*0=0, 0+6=6
    ToyProblem p7 = generate_problem(7, 10, 4);
    CHECK(p7.start == 0);
    CHECK(oracle_solve(p7) == std::vector<int>({0, 0, 0, 6}));

    // seed 11: start 6, ops mul 9 | add 8 | add 5 | mul 0
    //          6*9=54->4, 4+8=12->2, 2+5=7, 7*0=0
    ToyProblem p11 = generate_problem(11, 10, 4);
    CHECK(p11.start == 6);
    CHECK(oracle_solve(p11) == std::vector<int>({4, 2, 7, 0}));

    // seed 19: start 1, ops mul 2 | mul 6 | add 5 | mul 7
    //          1*2=2, 2*6=12->2, 2+5=7, 7*7=49->9
    ToyProblem p19 = generate_problem(19, 10, 4);
    CHECK(p19.start == 1);
    CHECK(oracle_solve(p19) == std::vector<int>({2, 2, 7, 9}));
}

TEST_CASE("oracle_solve computes modular partial results") {
    // 3 + 4 = 7
    CHECK(oracle_solve(explicit_problem(3, {{ChainOp::add, 4}})) == std::vector<int>{7});
    // 2 * 3 = 6, 6 + 5 = 11 -> 1 (mod 10)
    CHECK(oracle_solve(explicit_problem(2, {{ChainOp::mul, 3}, {ChainOp::add, 5}})) ==
          std::vector<int>({6, 1}));

    for (uint64_t seed = 0; seed < 50; ++seed) {
        ToyProblem p = generate_problem(seed, 7, 5);
        CHECK(oracle_solve(p).size() == 5);
        for (int v : oracle_solve(p)) {
            CHECK(v >= 0);
            CHECK(v < 7);
        }
    }
}

TEST_CASE("judge localizes the first wrong step") {
    ToyProblem p = explicit_problem(2, {{ChainOp::mul, 3}, {ChainOp::add, 5}});
    // oracle: [6, 1]

    SUBCASE("correct trace") {
        JudgeVerdict v = judge(p, {6, 1});
        CHECK(v.correct);
        CHECK_FALSE(v.first_error_step.has_value());
        CHECK_FALSE(v.corrected_continuation.has_value());
    }
    SUBCASE("error at step 2") {
        JudgeVerdict v = judge(p, {6, 2});
        CHECK_FALSE(v.correct);
        CHECK(v.first_error_step == 2);
        CHECK(v.corrected_continuation == std::vector<int>{1});
    }
    SUBCASE("error at step 1") {
        JudgeVerdict v = judge(p, {5, 1});
        CHECK_FALSE(v.correct);
        CHECK(v.first_error_step == 1);
        CHECK(v.corrected_continuation == std::vector<int>({6, 1}));
    }
    SUBCASE("length mismatch") {
        CHECK_THROWS_AS(judge(p, {6}), LengthMismatch);
        CHECK_THROWS_AS(judge(p, {6, 1, 0}), LengthMismatch);
    }
}

TEST_CASE("judge properties over random problems and traces") {
    Rng rng(555);
    for (int trial = 0; trial < 500; ++trial) {
        ToyProblem p = generate_problem(rng.next_u64(), 10, 1 + rng.uniform_int(8));
        std::vector<int> oracle = oracle_solve(p);

        // Oracle self-consistency.
        CHECK(judge(p, oracle).correct);

        // A randomly corrupted trace: prefix before the error matches, the
        // error step differs, and splicing the corrected continuation back
        // in satisfies the judge.
        std::vector<int> actions = oracle;
        int wrong_at = rng.uniform_int(p.chain_length());
        actions[wrong_at] = (oracle[wrong_at] + 1 + rng.uniform_int(p.modulus - 1)) % p.modulus;
        for (int i = wrong_at + 1; i < p.chain_length(); ++i) {
            actions[i] = rng.uniform_int(p.modulus);
        }
        JudgeVerdict v = judge(p, actions);
        REQUIRE_FALSE(v.correct);
        REQUIRE(v.first_error_step.has_value());
        int e = *v.first_error_step;
        CHECK(e == wrong_at + 1);
        for (int i = 0; i + 1 < e; ++i) {
            CHECK(actions[i] == oracle[i]);
        }
        CHECK(actions[e - 1] != oracle[e - 1]);

        std::vector<int> repaired(actions.begin(), actions.begin() + (e - 1));
        repaired.insert(repaired.end(), v.corrected_continuation->begin(),
                        v.corrected_continuation->end());
        CHECK(judge(p, repaired).correct);
    }
}

TEST_CASE("trace_to_solution renders parseable step solutions") {
    ToyProblem p = explicit_problem(2, {{ChainOp::mul, 3}, {ChainOp::add, 5}});
    Solution s = trace_to_solution(p, {6, 1});
    CHECK(s.steps.size() == 2);
    CHECK(s.final_answer == CanonicalAnswer::rational(1, 1));

    Solution reparsed = parse_solution(render_solution(s));
    CHECK(reparsed == s);
    CHECK(solution_to_actions(reparsed) == std::vector<int>({6, 1}));

    CHECK_THROWS_AS(trace_to_solution(p, {}), LengthMismatch);
}

TEST_CASE("trace round-trip recovers actions for random traces") {
    Rng rng(808);
    for (int trial = 0; trial < 200; ++trial) {
        ToyProblem p = generate_problem(rng.next_u64(), 2 + rng.uniform_int(63),
                                        1 + rng.uniform_int(8));
        std::vector<int> actions;
        for (int i = 0; i < p.chain_length(); ++i) {
            actions.push_back(rng.uniform_int(p.modulus));
        }
        Solution s = trace_to_solution(p, actions);
        CHECK(solution_to_actions(parse_solution(render_solution(s))) == actions);
    }
}

TEST_CASE("problem json round-trips") {
    ToyProblem p = generate_problem(77, 12, 6);
    nlohmann::json j = p;
    CHECK(j.get<ToyProblem>() == p);
}
