#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "steprl/curation.hpp"
#include "steprl/errors.hpp"
#include "steprl/toy_env.hpp"

using namespace steprl;

namespace {

ProblemRecord toy_record(int index) {
    ToyProblem p = generate_problem(static_cast<uint64_t>(index), 10, 4);
    std::vector<int> oracle = oracle_solve(p);
    ProblemRecord r;
    r.id = "toy" + std::to_string(index);
    r.statement_primary = "problem " + std::to_string(index) + ": start at " +
                          std::to_string(p.start) + " and apply the chain of index " +
                          std::to_string(index) + " keeping residues mod ten";
    r.gold_answer = CanonicalAnswer::rational(oracle.back(), 1);
    r.gold_solution = trace_to_solution(p, oracle);
    r.tags = {index % 2 == 0 ? "arithmetic" : "algebra", "grade" + std::to_string(index % 3)};
    r.has_image = true;
    r.image_clear = true;
    return r;
}

std::vector<ProblemRecord> toy_records(int count) {
    std::vector<ProblemRecord> records;
    for (int i = 0; i < count; ++i) records.push_back(toy_record(i));
    return records;
}

std::string dump_result(const PipelineResult& result) {
    nlohmann::json j{{"alignment_train", result.alignment.train},
                     {"alignment_val", result.alignment.val},
                     {"instruction_train", result.instruction.train},
                     {"instruction_val", result.instruction.val},
                     {"report", result.report}};
    return j.dump();
}

} // namespace

TEST_CASE("filter_sources applies the three criteria in order") {
    std::vector<ProblemRecord> raw = toy_records(2);

    ProblemRecord no_answer = toy_record(2);
    no_answer.id = "no-answer";
    no_answer.gold_answer = CanonicalAnswer::from_text("");

    ProblemRecord no_solution = toy_record(3);
    no_solution.id = "no-solution";
    no_solution.gold_solution.reset();

    ProblemRecord no_image = toy_record(4);
    no_image.id = "no-image";
    no_image.has_image = false;

    ProblemRecord blurry = toy_record(5);
    blurry.id = "blurry";
    blurry.image_clear = false;

    raw.insert(raw.end(), {no_answer, no_solution, no_image, blurry});

    SourceFilterReport report = filter_sources(raw);
    CHECK(report.accepted.size() == 2);
    REQUIRE(report.rejected.size() == 4);
    CHECK(report.rejected[0] == std::pair<std::string, RejectReason>{"no-answer", RejectReason::incomplete});
    CHECK(report.rejected[1] == std::pair<std::string, RejectReason>{"no-solution", RejectReason::incomplete});
    CHECK(report.rejected[2] == std::pair<std::string, RejectReason>{"no-image", RejectReason::not_multimodal});
    CHECK(report.rejected[3] == std::pair<std::string, RejectReason>{"blurry", RejectReason::unclear});
}

TEST_CASE("refine_instruction follows the three-round protocol") {
    ProblemRecord problem = toy_record(7);

    SUBCASE("correct on the first try still runs verification") {
        MockAnnotator oracle(1);
        RefinementOutcome outcome = refine_instruction(problem, oracle);
        CHECK(outcome.accepted);
        CHECK(outcome.rounds_used == 3);
        REQUIRE(outcome.final_solution.has_value());
        CHECK(answers_equal(outcome.final_solution->final_answer, problem.gold_answer));
        REQUIRE(outcome.audit_log.size() == 2); // generate, verify (no revise)
        CHECK(outcome.audit_log[0].action == "generate");
        CHECK(outcome.audit_log[1].action == "verify");
        CHECK(outcome.audit_log[1].verdict);
    }

    SUBCASE("wrong then fixed is accepted") {
        MockAnnotator flaky(1, /*round1_error_rate=*/1.0, /*round2_fix_rate=*/1.0);
        RefinementOutcome outcome = refine_instruction(problem, flaky);
        CHECK(outcome.accepted);
        REQUIRE(outcome.audit_log.size() == 3);
        CHECK(outcome.audit_log[0].action == "generate");
        CHECK_FALSE(outcome.audit_log[0].verdict);
        CHECK(outcome.audit_log[1].action == "revise");
        CHECK(outcome.audit_log[1].verdict);
        CHECK(outcome.audit_log[2].action == "verify");
    }

    SUBCASE("wrong in both rounds is rejected") {
        MockAnnotator broken(1, 1.0, 0.0);
        RefinementOutcome outcome = refine_instruction(problem, broken);
        CHECK_FALSE(outcome.accepted);
        CHECK_FALSE(outcome.final_solution.has_value());
        CHECK(outcome.audit_log.back().action == "verify");
        CHECK_FALSE(outcome.audit_log.back().verdict);
    }

    SUBCASE("annotator failure is logged, not thrown") {
        MockAnnotator failing(1);
        failing.fail_on(problem.id);
        RefinementOutcome outcome = refine_instruction(problem, failing);
        CHECK_FALSE(outcome.accepted);
        CHECK_FALSE(outcome.final_solution.has_value());
        CHECK(outcome.audit_log.back().action == "error");
    }
}

TEST_CASE("acceptance soundness: accepted outcomes match gold") {
    MockAnnotator noisy(11, 0.4, 0.5);
    for (int i = 0; i < 200; ++i) {
        ProblemRecord problem = toy_record(i);
        RefinementOutcome outcome = refine_instruction(problem, noisy);
        CHECK(outcome.audit_log.size() <= 3);
        if (outcome.accepted) {
            REQUIRE(outcome.final_solution.has_value());
            CHECK(answers_equal(outcome.final_solution->final_answer, problem.gold_answer));
        }
    }
}

TEST_CASE("build_alignment_record writes and overwrites the caption") {
    MockAnnotator oracle(3);
    ProblemRecord problem = toy_record(9);
    ProblemRecord captioned = build_alignment_record(problem, oracle);
    REQUIRE(captioned.image_caption.has_value());
    CHECK_FALSE(captioned.image_caption->empty());

    ProblemRecord pre_captioned = problem;
    pre_captioned.image_caption = "stale caption";
    ProblemRecord recaptioned = build_alignment_record(pre_captioned, oracle);
    CHECK(recaptioned.image_caption == captioned.image_caption);

    MockAnnotator failing(3);
    failing.fail_on(problem.id);
    CHECK_THROWS_AS(build_alignment_record(problem, failing), AnnotatorFailure);
}

TEST_CASE("split_counts matches the reference corpus ratio") {
    auto [train, val] = split_counts(298670, 290227.0 / 298670.0);
    CHECK(train == 290227);
    CHECK(val == 8443);

    CHECK(split_counts(0, 0.9717) == std::pair<size_t, size_t>{0, 0});
    CHECK(split_counts(10, 1.0) == std::pair<size_t, size_t>{10, 0});
    CHECK_THROWS_AS(split_counts(10, 1.5), InvalidConfig);
}

TEST_CASE("run_pipeline composes the stages") {
    DedupConfig dedup_cfg;
    PipelineOptions options;
    options.train_fraction = 0.8;
    options.seed = 42;

    SUBCASE("empty input gives empty splits") {
        MockAnnotator oracle(5);
        PipelineResult result = run_pipeline({}, {}, dedup_cfg, oracle, options);
        CHECK(result.alignment.train.empty());
        CHECK(result.alignment.val.empty());
        CHECK(result.instruction.train.empty());
        CHECK(result.instruction.val.empty());
        CHECK(result.report.total_raw == 0);
    }

    SUBCASE("perfect oracle keeps all 100 records") {
        MockAnnotator oracle(5);
        std::vector<ProblemRecord> raw = toy_records(100);
        PipelineResult result = run_pipeline(raw, {}, dedup_cfg, oracle, options);
        CHECK(result.report.refined_accepted == 100);
        CHECK(result.report.dedup_removed == 0);
        CHECK(result.alignment.train.size() + result.alignment.val.size() == 100);
        CHECK(result.instruction.train.size() + result.instruction.val.size() == 100);
        CHECK(result.alignment.train.size() == 80);
        for (const auto& record : result.alignment.train) {
            CHECK(record.image_caption.has_value());
        }
        for (const auto& record : result.instruction.val) {
            REQUIRE(record.gold_solution.has_value());
            CHECK(answers_equal(record.gold_solution->final_answer, record.gold_answer));
        }
    }

    SUBCASE("deterministic byte-for-byte, also across jobs settings") {
        std::vector<ProblemRecord> raw = toy_records(60);
        MockAnnotator oracle_a(5, 0.3, 0.5);
        PipelineResult a = run_pipeline(raw, {}, dedup_cfg, oracle_a, options);
        MockAnnotator oracle_b(5, 0.3, 0.5);
        PipelineResult b = run_pipeline(raw, {}, dedup_cfg, oracle_b, options);
        CHECK(dump_result(a) == dump_result(b));

        PipelineOptions parallel = options;
        parallel.jobs = 4;
        MockAnnotator oracle_c(5, 0.3, 0.5);
        PipelineResult c = run_pipeline(raw, {}, dedup_cfg, oracle_c, parallel);
        CHECK(dump_result(a) == dump_result(c));
    }

    SUBCASE("failures are aggregated without aborting") {
        std::vector<ProblemRecord> raw = toy_records(10);
        MockAnnotator flaky(5);
        flaky.fail_on("toy3");
        flaky.fail_on("toy8");
        PipelineResult result = run_pipeline(raw, {}, dedup_cfg, flaky, options);
        // Each failing record fails both its caption and refinement calls.
        CHECK(result.report.annotator_failures == 4);
        CHECK(result.report.refined_accepted == 8);
        CHECK(result.alignment.train.size() + result.alignment.val.size() == 8);
    }
}
