#include "steprl/record.hpp"

#include <fstream>

#include "steprl/errors.hpp"

namespace steprl {

using nlohmann::json;

void to_json(json& j, const CanonicalAnswer& a) {
    if (a.is_rational()) {
        j = json{{"kind", "rational"}, {"num", a.num}, {"den", a.den}};
    } else {
        j = json{{"kind", "text"}, {"text", a.text}};
    }
}

void from_json(const json& j, CanonicalAnswer& a) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "rational") {
        a = CanonicalAnswer::rational(j.at("num").get<int64_t>(), j.at("den").get<int64_t>());
    } else {
        a = CanonicalAnswer::from_text(j.at("text").get<std::string>());
    }
}

void to_json(json& j, const SolutionStep& s) {
    j = json{{"id", s.id}, {"name", s.name}, {"content", s.content}};
}

void from_json(const json& j, SolutionStep& s) {
    s.id = j.at("id").get<int>();
    s.name = j.at("name").get<std::string>();
    s.content = j.at("content").get<std::string>();
}

void to_json(json& j, const Solution& s) {
    j = json{{"steps", s.steps}, {"final_answer", s.final_answer}};
}

void from_json(const json& j, Solution& s) {
    s.steps = j.at("steps").get<std::vector<SolutionStep>>();
    s.final_answer = j.at("final_answer").get<CanonicalAnswer>();
    validate_solution(s);
}

void to_json(json& j, const ProblemRecord& r) {
    j = json{
        {"id", r.id},
        {"statement_primary", r.statement_primary},
        {"statement_secondary", r.statement_secondary ? json(*r.statement_secondary) : json()},
        {"image_caption", r.image_caption ? json(*r.image_caption) : json()},
        {"gold_answer", r.gold_answer},
        {"gold_solution", r.gold_solution ? json(*r.gold_solution) : json()},
        {"tags", r.tags},
        {"has_image", r.has_image},
        {"image_clear", r.image_clear},
    };
}

void from_json(const json& j, ProblemRecord& r) {
    r.id = j.at("id").get<std::string>();
    r.statement_primary = j.at("statement_primary").get<std::string>();
    r.statement_secondary = std::nullopt;
    if (j.contains("statement_secondary") && !j.at("statement_secondary").is_null()) {
        r.statement_secondary = j.at("statement_secondary").get<std::string>();
    }
    r.image_caption = std::nullopt;
    if (j.contains("image_caption") && !j.at("image_caption").is_null()) {
        r.image_caption = j.at("image_caption").get<std::string>();
    }
    r.gold_answer = j.at("gold_answer").get<CanonicalAnswer>();
    r.gold_solution = std::nullopt;
    if (j.contains("gold_solution") && !j.at("gold_solution").is_null()) {
        r.gold_solution = j.at("gold_solution").get<Solution>();
    }
    r.tags = j.value("tags", std::vector<std::string>{});
    r.has_image = j.value("has_image", false);
    r.image_clear = j.value("image_clear", true);
}

std::vector<ProblemRecord> read_records(const std::string& path) {
    std::ifstream in(path);
    if (!in.is_open()) throw IoError("cannot open record file: " + path);
    std::vector<ProblemRecord> records;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            records.push_back(json::parse(line).get<ProblemRecord>());
        } catch (const json::exception& e) {
            throw MalformedStep(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return records;
}

void write_records(const std::string& path, const std::vector<ProblemRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out.is_open()) throw IoError("cannot open record file for writing: " + path);
    for (const auto& r : records) {
        out << json(r).dump() << '\n';
    }
}

std::vector<std::string> read_reference_texts(const std::string& path) {
    std::ifstream in(path);
    if (!in.is_open()) throw IoError("cannot open reference file: " + path);
    std::vector<std::string> texts;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        texts.push_back(json::parse(line).at("text").get<std::string>());
    }
    return texts;
}

void write_reference_texts(const std::string& path, const std::vector<std::string>& texts) {
    std::ofstream out(path, std::ios::binary);
    if (!out.is_open()) throw IoError("cannot open reference file for writing: " + path);
    for (const auto& t : texts) {
        out << json{{"text", t}}.dump() << '\n';
    }
}

} // namespace steprl
