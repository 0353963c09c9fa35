#include "steprl/curation.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <unordered_set>

#include "steprl/errors.hpp"
#include "steprl/rng.hpp"

namespace steprl {

namespace {

// Index-sharded parallel map with results written by slot, so any jobs
// count reproduces the sequential output.
template <typename Fn>
void parallel_for(size_t n, int jobs, Fn&& fn) {
    if (jobs <= 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    int workers = std::min<int>(jobs, static_cast<int>(n));
    std::vector<std::thread> threads;
    threads.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&, w]() {
            for (size_t i = static_cast<size_t>(w); i < n; i += static_cast<size_t>(workers)) {
                fn(i);
            }
        });
    }
    for (auto& t : threads) t.join();
}

} // namespace

std::string to_string(RejectReason reason) {
    switch (reason) {
        case RejectReason::incomplete: return "incomplete";
        case RejectReason::not_multimodal: return "not_multimodal";
        case RejectReason::unclear: return "unclear";
    }
    return "unknown";
}

SourceFilterReport filter_sources(const std::vector<ProblemRecord>& raw) {
    SourceFilterReport report;
    for (const auto& record : raw) {
        bool complete = !record.statement_primary.empty() && record.gold_solution.has_value() &&
                        !(record.gold_answer.kind == AnswerKind::text && record.gold_answer.text.empty());
        if (!complete) {
            report.rejected.emplace_back(record.id, RejectReason::incomplete);
        } else if (!record.has_image) {
            report.rejected.emplace_back(record.id, RejectReason::not_multimodal);
        } else if (!record.image_clear) {
            report.rejected.emplace_back(record.id, RejectReason::unclear);
        } else {
            report.accepted.push_back(record);
        }
    }
    return report;
}

RefinementOutcome refine_instruction(const ProblemRecord& problem, Annotator& annotator) {
    RefinementOutcome outcome;
    outcome.problem_id = problem.id;
    try {
        // Round 1: generate with the gold solution as hint.
        outcome.rounds_used = 1;
        std::optional<std::string> hint;
        if (problem.gold_solution) hint = render_solution(*problem.gold_solution);
        Solution candidate = annotator.generate_solution(problem, hint);
        bool round1_ok = answers_equal(candidate.final_answer, problem.gold_answer);
        outcome.audit_log.push_back({1, "generate", candidate.final_answer.to_string(), round1_ok});

        // Round 2: revise only when the answer mismatches the gold one.
        if (!round1_ok) {
            outcome.rounds_used = 2;
            std::string feedback = "answer " + candidate.final_answer.to_string() +
                                   " does not match the standard answer";
            candidate = annotator.revise_solution(problem, candidate, feedback);
            bool round2_ok = answers_equal(candidate.final_answer, problem.gold_answer);
            outcome.audit_log.push_back(
                {2, "revise", candidate.final_answer.to_string(), round2_ok});
        }

        // Round 3: independent verification; only verified answers are kept.
        outcome.rounds_used = 3;
        bool verified = annotator.verify(candidate.final_answer, problem.gold_answer);
        outcome.audit_log.push_back({3, "verify", candidate.final_answer.to_string(), verified});
        outcome.accepted = verified;
        if (verified) outcome.final_solution = std::move(candidate);
    } catch (const AnnotatorFailure& e) {
        outcome.accepted = false;
        outcome.final_solution.reset();
        outcome.audit_log.push_back({outcome.rounds_used, "error", e.what(), false});
    }
    return outcome;
}

ProblemRecord build_alignment_record(const ProblemRecord& problem, Annotator& annotator) {
    ProblemRecord out = problem;
    out.image_caption = annotator.caption(problem);
    return out;
}

std::pair<size_t, size_t> split_counts(size_t n, double train_fraction) {
    if (train_fraction < 0.0 || train_fraction > 1.0) {
        throw InvalidConfig("train fraction must be in [0, 1]");
    }
    auto train = static_cast<size_t>(
        std::llround(static_cast<double>(n) * train_fraction));
    train = std::min(train, n);
    return {train, n - train};
}

namespace {

SplitRecords split_records(std::vector<ProblemRecord> records, double train_fraction,
                           uint64_t seed) {
    std::vector<size_t> order(records.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);

    auto [n_train, n_val] = split_counts(records.size(), train_fraction);
    (void)n_val;
    SplitRecords split;
    split.train.reserve(n_train);
    split.val.reserve(records.size() - n_train);
    for (size_t i = 0; i < order.size(); ++i) {
        auto& bucket = i < n_train ? split.train : split.val;
        bucket.push_back(std::move(records[order[i]]));
    }
    return split;
}

} // namespace

void to_json(nlohmann::json& j, const PipelineReport& r) {
    j = nlohmann::json{
        {"total_raw", r.total_raw},
        {"rejected_incomplete", r.rejected_incomplete},
        {"rejected_not_multimodal", r.rejected_not_multimodal},
        {"rejected_unclear", r.rejected_unclear},
        {"dedup_removed", r.dedup_removed},
        {"annotator_failures", r.annotator_failures},
        {"refined_accepted", r.refined_accepted},
        {"refined_rejected", r.refined_rejected},
        {"alignment_train", r.alignment_train},
        {"alignment_val", r.alignment_val},
        {"instruction_train", r.instruction_train},
        {"instruction_val", r.instruction_val},
        {"seed", r.seed},
    };
}

PipelineResult run_pipeline(const std::vector<ProblemRecord>& raw,
                            const std::vector<std::string>& reference, const DedupConfig& dedup_cfg,
                            Annotator& annotator, const PipelineOptions& options) {
    PipelineResult result;
    result.report.total_raw = raw.size();
    result.report.seed = options.seed;

    SourceFilterReport filtered = filter_sources(raw);
    for (const auto& [id, reason] : filtered.rejected) {
        switch (reason) {
            case RejectReason::incomplete: ++result.report.rejected_incomplete; break;
            case RejectReason::not_multimodal: ++result.report.rejected_not_multimodal; break;
            case RejectReason::unclear: ++result.report.rejected_unclear; break;
        }
    }

    DedupReport dedup_report = dedup_corpus(filtered.accepted, reference, dedup_cfg);
    result.report.dedup_removed = dedup_report.removed.size();
    std::unordered_set<std::string> kept(dedup_report.kept_ids.begin(),
                                         dedup_report.kept_ids.end());
    std::vector<ProblemRecord> deduped;
    deduped.reserve(kept.size());
    for (auto& record : filtered.accepted) {
        if (kept.count(record.id)) deduped.push_back(std::move(record));
    }

    // Captions, then refinement; per-record failures are aggregated.
    std::vector<ProblemRecord> captioned(deduped.size());
    std::vector<char> caption_ok(deduped.size(), 0);
    parallel_for(deduped.size(), options.jobs, [&](size_t i) {
        try {
            captioned[i] = build_alignment_record(deduped[i], annotator);
            caption_ok[i] = 1;
        } catch (const AnnotatorFailure&) {
            captioned[i] = deduped[i];
        }
    });

    std::vector<RefinementOutcome> outcomes(deduped.size());
    parallel_for(deduped.size(), options.jobs,
                 [&](size_t i) { outcomes[i] = refine_instruction(captioned[i], annotator); });

    std::vector<ProblemRecord> alignment_records;
    std::vector<ProblemRecord> instruction_records;
    for (size_t i = 0; i < deduped.size(); ++i) {
        if (!caption_ok[i]) {
            ++result.report.annotator_failures;
        } else {
            alignment_records.push_back(captioned[i]);
        }
        const RefinementOutcome& outcome = outcomes[i];
        if (!outcome.audit_log.empty() && outcome.audit_log.back().action == "error") {
            ++result.report.annotator_failures;
        }
        if (outcome.accepted) {
            ++result.report.refined_accepted;
            ProblemRecord record = captioned[i];
            record.gold_solution = outcome.final_solution;
            instruction_records.push_back(std::move(record));
        } else {
            ++result.report.refined_rejected;
        }
    }

    result.alignment = split_records(std::move(alignment_records), options.train_fraction,
                                     mix_seed(options.seed, hash_str("alignment-split")));
    result.instruction = split_records(std::move(instruction_records), options.train_fraction,
                                       mix_seed(options.seed, hash_str("instruction-split")));
    result.report.alignment_train = result.alignment.train.size();
    result.report.alignment_val = result.alignment.val.size();
    result.report.instruction_train = result.instruction.train.size();
    result.report.instruction_val = result.instruction.val.size();
    return result;
}

} // namespace steprl
