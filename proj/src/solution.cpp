#include "steprl/solution.hpp"

#include <charconv>

#include "steprl/errors.hpp"

namespace steprl {

namespace {

size_t count_boxed(const std::string& s) {
    size_t count = 0;
    size_t at = 0;
    while ((at = s.find("\\boxed{", at)) != std::string::npos) {
        ++count;
        at += 7;
    }
    return count;
}

void validate_step(const SolutionStep& step) {
    if (step.name.empty() || step.content.empty()) {
        throw MalformedStep("step " + std::to_string(step.id) + ": empty name or content");
    }
    if (step.name.find(')') != std::string::npos) {
        throw MalformedStep("step " + std::to_string(step.id) + ": name contains ')'");
    }
    if (step.name.find('\n') != std::string::npos ||
        step.content.find('\n') != std::string::npos) {
        throw MalformedStep("step " + std::to_string(step.id) + ": embedded newline");
    }
}

} // namespace

void validate_solution(const Solution& s) {
    if (s.steps.empty()) throw MalformedStep("solution has no steps");
    for (size_t i = 0; i < s.steps.size(); ++i) {
        validate_step(s.steps[i]);
        if (s.steps[i].id != static_cast<int>(i) + 1) {
            throw NonContiguousIds("expected step id " + std::to_string(i + 1) + ", got " +
                                   std::to_string(s.steps[i].id));
        }
    }
    const std::string& last = s.steps.back().content;
    size_t boxes = count_boxed(last);
    if (boxes == 0) throw NoBoxedAnswer("final step has no \\boxed{...} marker");
    if (boxes > 1) throw MalformedStep("final step has multiple \\boxed{...} markers");
    CanonicalAnswer boxed = extract_boxed(last);
    if (!(boxed == s.final_answer)) {
        throw MalformedStep("boxed value '" + boxed.to_string() +
                            "' does not match final_answer '" + s.final_answer.to_string() + "'");
    }
}

Solution make_solution(std::vector<SolutionStep> steps) {
    if (steps.empty()) throw MalformedStep("solution has no steps");
    Solution s;
    s.steps = std::move(steps);
    if (count_boxed(s.steps.back().content) == 0) {
        throw NoBoxedAnswer("final step has no \\boxed{...} marker");
    }
    s.final_answer = extract_boxed(s.steps.back().content);
    validate_solution(s);
    return s;
}

std::string render_solution(const Solution& s) {
    std::string out;
    for (size_t i = 0; i < s.steps.size(); ++i) {
        if (i > 0) out.push_back('\n');
        out += "Step ";
        out += std::to_string(s.steps[i].id);
        out += " (";
        out += s.steps[i].name;
        out += "): ";
        out += s.steps[i].content;
    }
    return out;
}

Solution parse_solution(std::string_view text) {
    std::vector<SolutionStep> steps;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                               : eol - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;

        if (line.empty()) {
            // Blank lines are tolerated only after the last step.
            if (pos <= text.size() && text.find_first_not_of("\n \t\r", pos) != std::string_view::npos) {
                throw MalformedStep("blank line between steps");
            }
            continue;
        }

        constexpr std::string_view prefix = "Step ";
        if (line.substr(0, prefix.size()) != prefix) {
            throw MalformedStep("line does not start with 'Step ': " + std::string(line.substr(0, 32)));
        }
        line.remove_prefix(prefix.size());

        int id = 0;
        auto [digits_end, ec] = std::from_chars(line.data(), line.data() + line.size(), id);
        if (ec != std::errc{} || digits_end == line.data()) {
            throw MalformedStep("missing step id");
        }
        line.remove_prefix(static_cast<size_t>(digits_end - line.data()));

        if (line.substr(0, 2) != " (") throw MalformedStep("missing '(' before step name");
        line.remove_prefix(2);

        size_t name_end = line.find(')');
        if (name_end == std::string_view::npos) throw MalformedStep("unterminated step name");
        std::string name(line.substr(0, name_end));
        line.remove_prefix(name_end + 1);

        if (line.substr(0, 2) != ": ") throw MalformedStep("missing ': ' before step content");
        line.remove_prefix(2);
        if (line.empty()) throw MalformedStep("empty step content");

        steps.push_back(SolutionStep{id, std::move(name), std::string(line)});
    }
    if (steps.empty()) throw MalformedStep("no steps in input");
    return make_solution(std::move(steps));
}

} // namespace steprl
