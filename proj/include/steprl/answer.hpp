#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace steprl {

enum class AnswerKind { rational, text };

/// Canonical answer value: either an exact rational (lowest terms, positive
/// denominator) or normalized text (trimmed, whitespace-collapsed,
/// case-folded). Comparison is exact; there is no numeric tolerance.
struct CanonicalAnswer {
    AnswerKind kind = AnswerKind::text;
    int64_t num = 0;
    int64_t den = 1;
    std::string text;

    static CanonicalAnswer rational(int64_t num, int64_t den);
    static CanonicalAnswer from_text(std::string_view raw);

    bool is_rational() const { return kind == AnswerKind::rational; }

    /// Round-trippable rendering: "7", "-1/4", or the normalized text.
    std::string to_string() const;

    /// Structural equality (same kind and representation).
    friend bool operator==(const CanonicalAnswer& a, const CanonicalAnswer& b);
};

/// Parses integers, decimals, simple fractions (a/b and \frac{a}{b}), a
/// leading sign and a trailing percent into exact rationals; anything else
/// becomes normalized text. Throws EmptyInput on empty/whitespace-only input.
CanonicalAnswer normalize_answer(std::string_view raw);

/// Extracts and normalizes the value inside the first \boxed{...} marker,
/// honoring nested braces. Throws NoBoxedAnswer if there is no marker and
/// UnbalancedBraces if its braces never close.
CanonicalAnswer extract_boxed(std::string_view content);

/// Semantic equality: rational vs rational compares exactly, text vs text
/// compares normalized strings, and mixed kinds compare by attempting a
/// rational parse of the text side.
bool answers_equal(const CanonicalAnswer& a, const CanonicalAnswer& b);

/// Trim, collapse runs of whitespace to single spaces, ASCII-lowercase.
std::string normalize_text(std::string_view raw);

} // namespace steprl
