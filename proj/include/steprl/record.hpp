#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "steprl/answer.hpp"
#include "steprl/solution.hpp"

namespace steprl {

/// One curated problem. `image_clear` is the upstream clarity flag: image
/// quality cannot be judged here, so the source filter trusts this bit.
struct ProblemRecord {
    std::string id;
    std::string statement_primary;
    std::optional<std::string> statement_secondary;
    std::optional<std::string> image_caption;
    CanonicalAnswer gold_answer;
    std::optional<Solution> gold_solution;
    std::vector<std::string> tags;
    bool has_image = false;
    bool image_clear = true;

    friend bool operator==(const ProblemRecord&, const ProblemRecord&) = default;
};

void to_json(nlohmann::json& j, const CanonicalAnswer& a);
void from_json(const nlohmann::json& j, CanonicalAnswer& a);

void to_json(nlohmann::json& j, const SolutionStep& s);
void from_json(const nlohmann::json& j, SolutionStep& s);

void to_json(nlohmann::json& j, const Solution& s);
void from_json(const nlohmann::json& j, Solution& s);

void to_json(nlohmann::json& j, const ProblemRecord& r);
void from_json(const nlohmann::json& j, ProblemRecord& r);

/// Line-delimited JSON record files (one compact object per line).
std::vector<ProblemRecord> read_records(const std::string& path);
void write_records(const std::string& path, const std::vector<ProblemRecord>& records);

/// Same format for free-standing reference texts: {"text": ...} per line.
std::vector<std::string> read_reference_texts(const std::string& path);
void write_reference_texts(const std::string& path, const std::vector<std::string>& texts);

} // namespace steprl
