#include "steprl/dedup.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "steprl/errors.hpp"

namespace steprl {

namespace {

std::unordered_set<std::string> ngram_set(const std::vector<std::string>& tokens, int n) {
    std::unordered_set<std::string> grams;
    if (tokens.empty()) return grams;
    int effective_n = static_cast<int>(tokens.size()) < n ? 1 : n;
    for (size_t i = 0; i + effective_n <= tokens.size(); ++i) {
        std::string gram = tokens[i];
        for (int j = 1; j < effective_n; ++j) {
            gram.push_back(' ');
            gram += tokens[i + j];
        }
        grams.insert(std::move(gram));
    }
    return grams;
}

double jaccard(const std::unordered_set<std::string>& a, const std::unordered_set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& large = a.size() <= b.size() ? b : a;
    size_t inter = 0;
    for (const auto& g : small) {
        if (large.count(g)) ++inter;
    }
    size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::string joined(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    return out;
}

struct PreparedText {
    std::string normalized;                  // token-joined form, for the exact shortcut
    std::unordered_set<std::string> grams;   // n-gram set (or unigrams for short texts)
    bool short_text = false;                 // fewer than n tokens
};

PreparedText prepare(std::string_view text, const DedupConfig& cfg) {
    auto tokens = dedup_tokenize(text);
    PreparedText p;
    p.normalized = joined(tokens);
    p.short_text = static_cast<int>(tokens.size()) < cfg.n;
    p.grams = ngram_set(tokens, cfg.n);
    return p;
}

// similarity between two prepared texts under the fallback rule: if either
// side is short, both compare as unigram sets.
double prepared_similarity(const PreparedText& a, const PreparedText& b, const DedupConfig& cfg,
                           const std::vector<std::string>& tokens_a,
                           const std::vector<std::string>& tokens_b) {
    if (a.short_text || b.short_text) {
        return jaccard(ngram_set(tokens_a, 1), ngram_set(tokens_b, 1));
    }
    return jaccard(a.grams, b.grams);
}

} // namespace

void DedupConfig::validate() const {
    if (n < 2) throw InvalidConfig("dedup n-gram length must be >= 2");
    if (!(threshold > 0.0) || threshold > 1.0) {
        throw InvalidConfig("dedup threshold must be in (0, 1]");
    }
}

std::vector<std::string> dedup_tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text) {
        unsigned char u = static_cast<unsigned char>(ch);
        if (std::isalnum(u)) {
            current.push_back(static_cast<char>(std::tolower(u)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

double ngram_jaccard(std::string_view a, std::string_view b, const DedupConfig& cfg) {
    cfg.validate();
    auto ta = dedup_tokenize(a);
    auto tb = dedup_tokenize(b);
    if (static_cast<int>(ta.size()) < cfg.n || static_cast<int>(tb.size()) < cfg.n) {
        return jaccard(ngram_set(ta, 1), ngram_set(tb, 1));
    }
    return jaccard(ngram_set(ta, cfg.n), ngram_set(tb, cfg.n));
}

DedupReport dedup_corpus(const std::vector<ProblemRecord>& records,
                         const std::vector<std::string>& reference,
                         const DedupConfig& cfg) {
    cfg.validate();

    {
        std::unordered_set<std::string> seen;
        for (const auto& r : records) {
            if (!seen.insert(r.id).second) {
                throw DuplicateId("repeated record id: " + r.id);
            }
        }
    }

    struct Kept {
        const ProblemRecord* record;
        PreparedText prep;
        std::vector<std::string> tokens;
    };

    std::vector<PreparedText> ref_prep;
    std::vector<std::vector<std::string>> ref_tokens;
    ref_prep.reserve(reference.size());
    for (const auto& text : reference) {
        ref_tokens.push_back(dedup_tokenize(text));
        ref_prep.push_back(prepare(text, cfg));
    }

    DedupReport report;
    std::vector<Kept> kept;
    for (const auto& record : records) {
        auto tokens = dedup_tokenize(record.statement_primary);
        PreparedText prep = prepare(record.statement_primary, cfg);

        bool removed = false;
        for (size_t i = 0; i < ref_prep.size() && !removed; ++i) {
            double sim = prep.normalized == ref_prep[i].normalized
                             ? 1.0
                             : prepared_similarity(prep, ref_prep[i], cfg, tokens, ref_tokens[i]);
            if (sim >= cfg.threshold) {
                report.removed.push_back({record.id, "reference:" + std::to_string(i), sim});
                removed = true;
            }
        }
        for (size_t i = 0; i < kept.size() && !removed; ++i) {
            double sim = prep.normalized == kept[i].prep.normalized
                             ? 1.0
                             : prepared_similarity(prep, kept[i].prep, cfg, tokens, kept[i].tokens);
            if (sim >= cfg.threshold) {
                report.removed.push_back({record.id, kept[i].record->id, sim});
                removed = true;
            }
        }
        if (!removed) {
            report.kept_ids.push_back(record.id);
            kept.push_back(Kept{&record, std::move(prep), std::move(tokens)});
        }
    }
    return report;
}

} // namespace steprl
