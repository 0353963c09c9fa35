#include "steprl/report_json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "steprl/errors.hpp"

namespace steprl {

namespace {

using nlohmann::json;

void dump_value(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::object: {
            out.push_back('{');
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out.push_back(',');
                first = false;
                out += json(it.key()).dump();
                out.push_back(':');
                dump_value(it.value(), out);
            }
            out.push_back('}');
            break;
        }
        case json::value_t::array: {
            out.push_back('[');
            bool first = true;
            for (const auto& item : j) {
                if (!first) out.push_back(',');
                first = false;
                dump_value(item, out);
            }
            out.push_back(']');
            break;
        }
        case json::value_t::number_float: {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.6f", j.get<double>());
            out += buf;
            break;
        }
        default:
            out += j.dump();
            break;
    }
}

} // namespace

std::string dump_fixed(const json& j) {
    std::string out;
    dump_value(j, out);
    return out;
}

void write_report(const std::string& path, const json& j) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::filesystem::create_directories(p.parent_path());
    }
    std::ofstream out(p, std::ios::binary);
    if (!out.is_open()) throw IoError("cannot write report: " + path);
    out << dump_fixed(j) << '\n';
}

} // namespace steprl
