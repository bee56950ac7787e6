// report.hpp: RunReport: tolerance-checked records emitted by every command.

#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace hgphase {

enum class Comparison { at_most, at_least };

struct CheckRecord {
    std::string name;
    double value{0.0};
    double tolerance{0.0};
    Comparison comparison{Comparison::at_most};
    bool pass{false};
    std::string note;
};

// %.17g; round-trips every double.
inline std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct RunReport {
    std::string command;
    std::vector<std::pair<std::string, double>> values;
    std::vector<CheckRecord> records;
    std::vector<std::string> flags;
    double wall_time_s{0.0};

    void value(std::string name, double v) { values.emplace_back(std::move(name), v); }

    // NaN never passes.
    const CheckRecord& check(std::string name, double v, double tolerance, Comparison cmp = Comparison::at_most,
                             std::string note = {}) {
        const bool ok = cmp == Comparison::at_most ? v <= tolerance : v >= tolerance;
        records.push_back({std::move(name), v, tolerance, cmp, ok && !std::isnan(v), std::move(note)});
        return records.back();
    }

    bool all_passed() const {
        for (const auto& r : records) {
            if (!r.pass) return false;
        }
        return true;
    }

    std::size_t failures() const {
        std::size_t n = 0;
        for (const auto& r : records) n += r.pass ? 0 : 1;
        return n;
    }

    // Deterministic text form; wall time is left out so reruns compare equal.
    std::string to_text() const {
        std::string out = "command: " + command + "\n";
        for (const auto& f : flags) out += "flag: " + f + "\n";
        for (const auto& [k, v] : values) out += "value " + k + " = " + format_number(v) + "\n";
        for (const auto& r : records) {
            out += "check " + r.name + ": " + format_number(r.value) +
                   (r.comparison == Comparison::at_most ? " <= " : " >= ") + format_number(r.tolerance) +
                   (r.pass ? " PASS" : " FAIL");
            if (!r.note.empty()) out += " (" + r.note + ")";
            out += "\n";
        }
        out += std::string("verdict: ") + (all_passed() ? "PASS" : "FAIL") + " (" + std::to_string(records.size()) +
               " checks, " + std::to_string(failures()) + " failed)\n";
        return out;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["command"] = command;
        j["flags"] = flags;
        nlohmann::ordered_json vals = nlohmann::ordered_json::object();
        for (const auto& [k, v] : values) vals[k] = v;
        j["values"] = vals;
        nlohmann::ordered_json recs = nlohmann::ordered_json::array();
        for (const auto& r : records) {
            nlohmann::ordered_json x;
            x["name"] = r.name;
            x["value"] = r.value;
            x["tolerance"] = r.tolerance;
            x["comparison"] = r.comparison == Comparison::at_most ? "at_most" : "at_least";
            x["pass"] = r.pass;
            if (!r.note.empty()) x["note"] = r.note;
            recs.push_back(std::move(x));
        }
        j["records"] = recs;
        j["passed"] = all_passed();
        j["wall_time_s"] = wall_time_s;
        return j;
    }
};

} // namespace hgphase
