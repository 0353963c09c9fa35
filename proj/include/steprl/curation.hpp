#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "steprl/annotator.hpp"
#include "steprl/dedup.hpp"
#include "steprl/record.hpp"

namespace steprl {

enum class RejectReason { incomplete, not_multimodal, unclear };

std::string to_string(RejectReason reason);

struct SourceFilterReport {
    std::vector<ProblemRecord> accepted;
    std::vector<std::pair<std::string, RejectReason>> rejected;
};

/// Per-problem refinement result. `rounds_used` is the last protocol round
/// in which the annotator was called (3 on any path that reaches
/// verification). The audit log records every call as
/// (round, action, answer, verdict).
struct RefinementOutcome {
    std::string problem_id;
    int rounds_used = 0;
    bool accepted = false;
    std::optional<Solution> final_solution;

    struct AuditEntry {
        int round;
        std::string action; // "generate", "revise", "verify", "error"
        std::string answer;
        bool verdict;
    };
    std::vector<AuditEntry> audit_log;
};

/// Source filter: rejects records missing statement, gold solution or gold
/// answer (incomplete), records without an image (not_multimodal) and
/// records whose upstream clarity flag is false (unclear). Order preserved.
SourceFilterReport filter_sources(const std::vector<ProblemRecord>& raw);

/// Three-round refinement:
///   Round 1  generate with the gold solution text as hint
///   Round 2  revise, only if the round-1 answer mismatches gold
///   Round 3  verify the surviving candidate; accepted iff verify passes
/// Annotator failures mark the outcome rejected with the error logged.
RefinementOutcome refine_instruction(const ProblemRecord& problem, Annotator& annotator);

/// Returns the record with image_caption written by the annotator
/// (overwriting any existing caption, so the pipeline is re-runnable).
ProblemRecord build_alignment_record(const ProblemRecord& problem, Annotator& annotator);

struct PipelineOptions {
    double train_fraction = 0.9717;
    uint64_t seed = 42;
    int jobs = 1;
};

struct PipelineReport {
    size_t total_raw = 0;
    size_t rejected_incomplete = 0;
    size_t rejected_not_multimodal = 0;
    size_t rejected_unclear = 0;
    size_t dedup_removed = 0;
    size_t annotator_failures = 0;
    size_t refined_accepted = 0;
    size_t refined_rejected = 0;
    size_t alignment_train = 0;
    size_t alignment_val = 0;
    size_t instruction_train = 0;
    size_t instruction_val = 0;
    uint64_t seed = 0;
};

void to_json(nlohmann::json& j, const PipelineReport& r);

struct SplitRecords {
    std::vector<ProblemRecord> train;
    std::vector<ProblemRecord> val;
};

struct PipelineResult {
    SplitRecords alignment;   // every deduped record, caption populated
    SplitRecords instruction; // accepted refinements, gold_solution replaced
    PipelineReport report;
};

/// (train, val) sizes for an n-record split at the given train fraction.
std::pair<size_t, size_t> split_counts(size_t n, double train_fraction);

/// filter_sources -> dedup_corpus -> build_alignment_record ->
/// refine_instruction, then seeded-shuffle train/val splits. Per-record
/// annotator failures are counted, not fatal. With jobs > 1 the caption and
/// refinement calls run concurrently; outputs are identical to a
/// sequential run.
PipelineResult run_pipeline(const std::vector<ProblemRecord>& raw,
                            const std::vector<std::string>& reference, const DedupConfig& dedup_cfg,
                            Annotator& annotator, const PipelineOptions& options = {});

} // namespace steprl
