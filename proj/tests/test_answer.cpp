#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "steprl/answer.hpp"
#include "steprl/errors.hpp"
#include "steprl/rng.hpp"

using namespace steprl;

TEST_CASE("extract_boxed reads the first marker") {
    CanonicalAnswer a = extract_boxed("so \\boxed{42}");
    CHECK(a == CanonicalAnswer::rational(42, 1));

    // 3/6 reduces to 1/2 by hand: gcd(3, 6) = 3.
    CHECK(extract_boxed("\\boxed{\\frac{3}{6}}") == CanonicalAnswer::rational(1, 2));

    CHECK_THROWS_AS(extract_boxed("no answer here"), NoBoxedAnswer);
    CHECK_THROWS_AS(extract_boxed("ends \\boxed{\\frac{3}{6}"), UnbalancedBraces);
}

TEST_CASE("extract_boxed handles nesting and scans left to right") {
    CHECK(extract_boxed("\\boxed{\\frac{1}{4}} then \\boxed{9}") ==
          CanonicalAnswer::rational(1, 4));
    CHECK(extract_boxed("prefix \\boxed{x+1} suffix") == CanonicalAnswer::from_text("x+1"));
}

TEST_CASE("extract_boxed is prefix-stable") {
    Rng rng(101);
    const std::string suffixes[] = {"", " and more", " \\boxed{999}", " {unbalanced",
                                    "\ntrailing lines \\boxed{\\frac{1}{3}}"};
    for (int trial = 0; trial < 200; ++trial) {
        int num = rng.uniform_int(41) - 20;
        int den = 1 + rng.uniform_int(9);
        std::string base =
            "text \\boxed{" + std::to_string(num) + "/" + std::to_string(den) + "}";
        CanonicalAnswer first = extract_boxed(base);
        for (const auto& suffix : suffixes) {
            CHECK(extract_boxed(base + suffix) == first);
        }
    }
}

TEST_CASE("normalize_answer parses the numeric grammar") {
    CHECK(normalize_answer(" -0.25 ") == CanonicalAnswer::rational(-1, 4));
    CHECK(normalize_answer("50%") == CanonicalAnswer::rational(1, 2));
    CHECK(normalize_answer("x+1") == CanonicalAnswer::from_text("x+1"));
    CHECK(normalize_answer("7") == CanonicalAnswer::rational(7, 1));
    CHECK(normalize_answer("+3/6") == CanonicalAnswer::rational(1, 2));
    CHECK(normalize_answer("-\\frac{2}{8}") == CanonicalAnswer::rational(-1, 4));
    CHECK(normalize_answer("12.5%") == CanonicalAnswer::rational(1, 8));
    CHECK(normalize_answer("0.5") == CanonicalAnswer::rational(1, 2));
    CHECK(normalize_answer(".5") == CanonicalAnswer::rational(1, 2));
    CHECK(normalize_answer("1/0") == CanonicalAnswer::from_text("1/0"));
    CHECK_THROWS_AS(normalize_answer(""), EmptyInput);
    CHECK_THROWS_AS(normalize_answer("   \t "), EmptyInput);
}

TEST_CASE("normalize_answer falls back to text on overflow") {
    CanonicalAnswer huge = normalize_answer("123456789012345678901234567890");
    CHECK(huge.kind == AnswerKind::text);
}

TEST_CASE("text normalization trims, collapses and folds case") {
    CHECK(normalize_answer("  Two   Words \t here ") ==
          CanonicalAnswer::from_text("two words here"));
}

TEST_CASE("answers_equal core cases") {
    CHECK(answers_equal(CanonicalAnswer::rational(1, 2), normalize_answer("0.5")));
    CHECK(answers_equal(normalize_answer("abc"), normalize_answer("ABC ")));
    CHECK_FALSE(answers_equal(CanonicalAnswer::rational(1, 3), normalize_answer("0.3333")));

    // Mixed kinds: text side re-parsed as rational.
    CHECK(answers_equal(CanonicalAnswer::rational(1, 2), CanonicalAnswer::from_text("0.5")));
    CHECK(answers_equal(CanonicalAnswer::from_text("50%"), CanonicalAnswer::rational(1, 2)));
    CHECK_FALSE(answers_equal(CanonicalAnswer::from_text("half"), CanonicalAnswer::rational(1, 2)));
}

namespace {

// Canonical values only, i.e. whatever normalize_answer can produce. The
// equivalence-relation property is stated on this domain; hand-built text
// values that happen to parse as numbers (e.g. from_text("0/2")) are not
// canonical and compare by the mixed-kind rule instead.
CanonicalAnswer random_answer(Rng& rng) {
    switch (rng.uniform_int(4)) {
        case 0:
            return normalize_answer(std::to_string(rng.uniform_int(9) - 4) + "/" +
                                    std::to_string(1 + rng.uniform_int(6)));
        case 1: {
            const char* words[] = {"alpha", "beta", "x+1", "interval", "none"};
            return normalize_answer(words[rng.uniform_int(5)]);
        }
        case 2: {
            int num = rng.uniform_int(5);
            int den = 1 + rng.uniform_int(4);
            return normalize_answer(std::to_string(num) + "/" + std::to_string(den));
        }
        default:
            return normalize_answer(std::to_string(rng.uniform_int(3)) + "." +
                                    std::to_string(rng.uniform_int(10)));
    }
}

} // namespace

TEST_CASE("answers_equal is an equivalence relation on random triples") {
    Rng rng(2024);
    for (int trial = 0; trial < 2000; ++trial) {
        CanonicalAnswer a = random_answer(rng);
        CanonicalAnswer b = random_answer(rng);
        CanonicalAnswer c = random_answer(rng);
        CHECK(answers_equal(a, a));
        CHECK(answers_equal(b, b));
        CHECK(answers_equal(a, b) == answers_equal(b, a));
        if (answers_equal(a, b) && answers_equal(b, c)) {
            CHECK(answers_equal(a, c));
        }
    }
}

TEST_CASE("normalize_answer is idempotent on its own rendering") {
    Rng rng(7);
    const char* raw_inputs[] = {"3/9",     "  MiXeD Case  ", "42%", "-0.125", "x^2 - 1",
                                "\\frac{10}{4}", "0", "  7  ", "a  b   c"};
    for (const char* raw : raw_inputs) {
        CanonicalAnswer once = normalize_answer(raw);
        CanonicalAnswer twice = normalize_answer(once.to_string());
        CHECK(once == twice);
    }
    for (int trial = 0; trial < 500; ++trial) {
        CanonicalAnswer once = random_answer(rng);
        if (once.kind == AnswerKind::text && once.text.empty()) continue;
        CanonicalAnswer redone = normalize_answer(once.to_string());
        CHECK(redone == normalize_answer(redone.to_string()));
    }
}
