#include "steprl/answer.hpp"

#include <cctype>
#include <numeric>
#include <optional>

#include "steprl/errors.hpp"

namespace steprl {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

struct Cursor {
    std::string_view s;
    size_t pos = 0;

    bool done() const { return pos >= s.size(); }
    char peek() const { return s[pos]; }
    bool eat(char c) {
        if (!done() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    bool eat(std::string_view token) {
        if (s.substr(pos, token.size()) == token) {
            pos += token.size();
            return true;
        }
        return false;
    }
    void skip_spaces() {
        while (!done() && is_space(peek())) ++pos;
    }
};

// Unsigned digit run -> int64, nullopt on overflow or no digits.
std::optional<int64_t> parse_digits(Cursor& c) {
    if (c.done() || !is_digit(c.peek())) return std::nullopt;
    int64_t v = 0;
    while (!c.done() && is_digit(c.peek())) {
        int d = c.peek() - '0';
        if (__builtin_mul_overflow(v, int64_t{10}, &v)) return std::nullopt;
        if (__builtin_add_overflow(v, int64_t{d}, &v)) return std::nullopt;
        ++c.pos;
    }
    return v;
}

int parse_sign(Cursor& c) {
    if (c.eat('-')) return -1;
    c.eat('+');
    return 1;
}

struct Frac {
    int64_t num;
    int64_t den;
};

std::optional<Frac> make_frac(int64_t num, int64_t den) {
    if (den == 0) return std::nullopt;
    return Frac{num, den};
}

// integer | decimal, sign already consumed. Decimals become exact fractions
// over a power of ten.
std::optional<Frac> parse_decimal_core(Cursor& c) {
    std::optional<int64_t> intpart;
    if (!c.done() && is_digit(c.peek())) {
        intpart = parse_digits(c);
        if (!intpart) return std::nullopt;
    }
    if (!c.eat('.')) {
        if (!intpart) return std::nullopt;
        return Frac{*intpart, 1};
    }
    int64_t num = intpart.value_or(0);
    int64_t den = 1;
    bool any_frac_digit = false;
    while (!c.done() && is_digit(c.peek())) {
        int d = c.peek() - '0';
        if (__builtin_mul_overflow(den, int64_t{10}, &den)) return std::nullopt;
        if (__builtin_mul_overflow(num, int64_t{10}, &num)) return std::nullopt;
        if (__builtin_add_overflow(num, int64_t{d}, &num)) return std::nullopt;
        any_frac_digit = true;
        ++c.pos;
    }
    if (!intpart && !any_frac_digit) return std::nullopt; // lone "."
    return Frac{num, den};
}

// \frac{a}{b} with integer a, b (inner signs allowed).
std::optional<Frac> parse_latex_frac(Cursor& c) {
    if (!c.eat("\\frac")) return std::nullopt;
    c.skip_spaces();
    if (!c.eat('{')) return std::nullopt;
    c.skip_spaces();
    int sn = parse_sign(c);
    auto a = parse_digits(c);
    c.skip_spaces();
    if (!a || !c.eat('}')) return std::nullopt;
    c.skip_spaces();
    if (!c.eat('{')) return std::nullopt;
    c.skip_spaces();
    int sd = parse_sign(c);
    auto b = parse_digits(c);
    c.skip_spaces();
    if (!b || !c.eat('}')) return std::nullopt;
    return make_frac(sn * *a, sd * *b);
}

// Full numeric grammar over the whole (trimmed) string:
//   sign? ( \frac{a}{b} | a/b | decimal ) '%'?
std::optional<Frac> parse_numeric(std::string_view raw) {
    Cursor c{raw};
    int sign = parse_sign(c);
    c.skip_spaces();

    std::optional<Frac> core = parse_latex_frac(c);
    if (!core) {
        core = parse_decimal_core(c);
        if (core) {
            size_t after_first = c.pos;
            c.skip_spaces();
            if (c.eat('/')) {
                c.skip_spaces();
                int sd = parse_sign(c);
                auto b = parse_digits(c);
                if (!b) return std::nullopt;
                if (core->den != 1) return std::nullopt; // "1.5/2" is not a simple fraction
                core = make_frac(core->num, sd * *b);
                if (!core) return std::nullopt;
            } else {
                c.pos = after_first;
            }
        }
    }
    if (!core) return std::nullopt;

    c.skip_spaces();
    if (c.eat('%')) {
        if (__builtin_mul_overflow(core->den, int64_t{100}, &core->den)) return std::nullopt;
        c.skip_spaces();
    }
    if (!c.done()) return std::nullopt;

    core->num *= sign;
    return core;
}

} // namespace

std::string normalize_text(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char ch : trim(raw)) {
        if (is_space(ch)) {
            pending_space = true;
            continue;
        }
        if (pending_space && !out.empty()) out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    return out;
}

CanonicalAnswer CanonicalAnswer::rational(int64_t num, int64_t den) {
    if (den == 0) throw EmptyInput("rational answer with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    CanonicalAnswer a;
    a.kind = AnswerKind::rational;
    a.num = num;
    a.den = den;
    return a;
}

CanonicalAnswer CanonicalAnswer::from_text(std::string_view raw) {
    CanonicalAnswer a;
    a.kind = AnswerKind::text;
    a.text = normalize_text(raw);
    return a;
}

std::string CanonicalAnswer::to_string() const {
    if (kind == AnswerKind::text) return text;
    std::string s = std::to_string(num);
    if (den != 1) {
        s.push_back('/');
        s += std::to_string(den);
    }
    return s;
}

bool operator==(const CanonicalAnswer& a, const CanonicalAnswer& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == AnswerKind::rational) return a.num == b.num && a.den == b.den;
    return a.text == b.text;
}

CanonicalAnswer normalize_answer(std::string_view raw) {
    std::string_view trimmed = trim(raw);
    if (trimmed.empty()) throw EmptyInput("empty answer text");
    if (auto frac = parse_numeric(trimmed)) {
        return CanonicalAnswer::rational(frac->num, frac->den);
    }
    return CanonicalAnswer::from_text(trimmed);
}

CanonicalAnswer extract_boxed(std::string_view content) {
    constexpr std::string_view marker = "\\boxed{";
    size_t at = content.find(marker);
    if (at == std::string_view::npos) {
        throw NoBoxedAnswer("no \\boxed{...} marker in content");
    }
    size_t start = at + marker.size();
    int depth = 1;
    for (size_t i = start; i < content.size(); ++i) {
        char ch = content[i];
        if (ch == '{') {
            ++depth;
        } else if (ch == '}') {
            --depth;
            if (depth == 0) {
                return normalize_answer(content.substr(start, i - start));
            }
        }
    }
    throw UnbalancedBraces("\\boxed{ marker never closed");
}

bool answers_equal(const CanonicalAnswer& a, const CanonicalAnswer& b) {
    if (a.kind == b.kind) {
        if (a.kind == AnswerKind::rational) return a.num == b.num && a.den == b.den;
        return a.text == b.text;
    }
    // Mixed kinds: try to read the text side as a rational.
    const CanonicalAnswer& rat = a.is_rational() ? a : b;
    const CanonicalAnswer& txt = a.is_rational() ? b : a;
    if (auto frac = parse_numeric(txt.text)) {
        CanonicalAnswer parsed = CanonicalAnswer::rational(frac->num, frac->den);
        return parsed.num == rat.num && parsed.den == rat.den;
    }
    return false;
}

} // namespace steprl
