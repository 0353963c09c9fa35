#pragma once

#include <string>
#include <vector>

#include "steprl/record.hpp"

namespace steprl {

/// Word n-gram Jaccard settings. Tokenization is whitespace splitting after
/// case-folding and punctuation stripping.
struct DedupConfig {
    int n = 5;
    double threshold = 0.6;

    void validate() const; // throws InvalidConfig
};

struct RemovedRecord {
    std::string removed_id;
    std::string matched_id; // record id, or "reference:<index>"
    double similarity = 0.0;
};

struct DedupReport {
    std::vector<std::string> kept_ids;
    std::vector<RemovedRecord> removed;
};

/// Punctuation-stripped, case-folded tokens.
std::vector<std::string> dedup_tokenize(std::string_view text);

/// Jaccard similarity over word n-gram sets. Texts with fewer than n tokens
/// fall back to unigram Jaccard; two token-less texts compare equal (1.0).
double ngram_jaccard(std::string_view a, std::string_view b, const DedupConfig& cfg);

/// Keep-first greedy dedup: a record is removed if its statement is similar
/// (>= threshold, or identical after normalization) to any reference text or
/// to any earlier kept record. Throws DuplicateId on repeated ids.
DedupReport dedup_corpus(const std::vector<ProblemRecord>& records,
                         const std::vector<std::string>& reference,
                         const DedupConfig& cfg);

} // namespace steprl
