#pragma once

// Measurement schedules: which qubit to measure next, and along which axis,
// given the outcomes observed so far.
//
// JSON forms:
//   {"static": [{"qubit": 0, "basis": "Z"}, {"qubit": 1, "basis": [0.6, 0, 0.8]}, ...]}
//   {"adaptive": {"rules": {"": {...}, "0": {...}, "01": {...}},
//                 "default": {"basis": "Z", "order": [3, 1, 0, 2]}}}
// A rule key is the outcome string so far (oldest first). The default rule
// measures the first qubit of `order` (ascending indices when omitted) that is
// still unmeasured on the branch.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "clustergibbs/errors.hpp"
#include "clustergibbs/pauli.hpp"

namespace clustergibbs {

struct Step {
    int qubit = 0;
    Vec3 axis{0.0, 0.0, 1.0};
    std::string basis = "Z"; // "X", "Y", "Z" or "[x,y,z]"

    friend bool operator==(const Step&, const Step&) = default;
};

inline Step named_step(int qubit, char basis) { return {qubit, basis_axis(basis), std::string(1, basis)}; }

inline Step vector_step(int qubit, const Vec3& axis) {
    if (std::abs(norm(axis) - 1.0) > axis_tolerance) throw ScheduleError("basis vector is not a unit vector");
    nlohmann::json j = {axis[0], axis[1], axis[2]};
    return {qubit, axis, j.dump()};
}

class Schedule {
public:
    struct DefaultRule {
        Vec3 axis{0.0, 0.0, 1.0};
        std::string basis = "Z";
        std::vector<int> order; // empty: ascending
    };

    static Schedule static_order(std::vector<Step> steps) {
        std::vector<int> seen;
        for (const auto& s : steps) {
            if (s.qubit < 0) throw ScheduleError("negative qubit in schedule");
            seen.push_back(s.qubit);
        }
        std::sort(seen.begin(), seen.end());
        if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
            throw ScheduleError("static schedule measures a qubit twice");
        Schedule out;
        out.static_ = std::move(steps);
        return out;
    }

    // Z basis, ascending qubits.
    static Schedule z_basis(int num_qubits) {
        std::vector<Step> steps;
        for (int q = 0; q < num_qubits; ++q) steps.push_back(named_step(q, 'Z'));
        return static_order(std::move(steps));
    }

    static Schedule adaptive(std::map<std::string, Step> rules, std::optional<DefaultRule> fallback) {
        for (const auto& [prefix, step] : rules) {
            if (prefix.find_first_not_of("01") != std::string::npos)
                throw ScheduleError("adaptive rule key '" + prefix + "' is not a bit string");
            if (step.qubit < 0) throw ScheduleError("negative qubit in schedule");
        }
        Schedule out;
        out.adaptive_ = true;
        out.rules_ = std::move(rules);
        out.default_ = std::move(fallback);
        return out;
    }

    bool is_static() const noexcept { return !adaptive_; }
    const std::vector<Step>& static_steps() const noexcept { return static_; }
    const std::map<std::string, Step>& rules() const noexcept { return rules_; }
    const std::optional<DefaultRule>& default_rule() const noexcept { return default_; }

    // Next step after outcomes `prefix`; measured[q] marks qubits already
    // measured on this branch.
    Step next(std::string_view prefix, const std::vector<char>& measured) const {
        const int n = static_cast<int>(measured.size());
        Step s;
        if (!adaptive_) {
            if (prefix.size() >= static_.size()) throw ScheduleError("static schedule exhausted");
            s = static_[prefix.size()];
        } else if (auto it = rules_.find(std::string(prefix)); it != rules_.end()) {
            s = it->second;
        } else if (default_) {
            s.axis = default_->axis;
            s.basis = default_->basis;
            s.qubit = -1;
            if (default_->order.empty()) {
                for (int q = 0; q < n && s.qubit < 0; ++q)
                    if (!measured[q]) s.qubit = q;
            } else {
                for (int q : default_->order)
                    if (q >= 0 && q < n && !measured[q]) {
                        s.qubit = q;
                        break;
                    }
            }
            if (s.qubit < 0) throw ScheduleError("default rule has no unmeasured qubit left after '" + std::string(prefix) + "'");
        } else {
            throw ScheduleError("no rule for outcome prefix '" + std::string(prefix) + "'");
        }
        if (s.qubit >= n) throw ScheduleError("schedule names qubit " + std::to_string(s.qubit) + " >= N");
        if (measured[s.qubit])
            throw ScheduleError("schedule measures qubit " + std::to_string(s.qubit) + " twice after '" +
                                std::string(prefix) + "'");
        return s;
    }

private:
    bool adaptive_ = false;
    std::vector<Step> static_;
    std::map<std::string, Step> rules_;
    std::optional<DefaultRule> default_;
};

namespace detail {

inline std::pair<Vec3, std::string> parse_basis(const nlohmann::json& b) {
    if (b.is_string()) {
        const auto s = b.get<std::string>();
        if (s.size() != 1 || std::string_view("XYZ").find(s[0]) == std::string_view::npos)
            throw ScheduleError("unknown basis '" + s + "'");
        return {basis_axis(s[0]), s};
    }
    if (b.is_array() && b.size() == 3) {
        Vec3 v{};
        for (std::size_t i = 0; i < 3; ++i) {
            if (!b[i].is_number()) throw ScheduleError("basis vector entries must be numbers");
            v[i] = b[i].get<double>();
        }
        if (std::abs(norm(v) - 1.0) > axis_tolerance) throw ScheduleError("basis vector is not a unit vector");
        return {v, nlohmann::json(b).dump()};
    }
    throw ScheduleError("basis must be \"X\", \"Y\", \"Z\" or a 3-vector");
}

inline Step parse_step(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("qubit") || !j.contains("basis"))
        throw ScheduleError("schedule step needs \"qubit\" and \"basis\"");
    for (const auto& [k, v] : j.items()) {
        (void)v;
        if (k != "qubit" && k != "basis") throw ScheduleError("unknown key '" + k + "' in schedule step");
    }
    if (!j["qubit"].is_number_integer()) throw ScheduleError("\"qubit\" must be an integer");
    auto [axis, label] = parse_basis(j["basis"]);
    return {j["qubit"].get<int>(), axis, label};
}

} // namespace detail

inline Schedule parse_schedule(const nlohmann::json& j) {
    if (!j.is_object() || j.size() != 1) throw ScheduleError("schedule must have exactly one of \"static\", \"adaptive\"");
    if (j.contains("static")) {
        if (!j["static"].is_array()) throw ScheduleError("\"static\" must be an array");
        std::vector<Step> steps;
        for (const auto& s : j["static"]) steps.push_back(detail::parse_step(s));
        return Schedule::static_order(std::move(steps));
    }
    if (!j.contains("adaptive")) throw ScheduleError("schedule must have exactly one of \"static\", \"adaptive\"");
    const auto& a = j["adaptive"];
    if (!a.is_object()) throw ScheduleError("\"adaptive\" must be an object");
    std::map<std::string, Step> rules;
    std::optional<Schedule::DefaultRule> fallback;
    for (const auto& [k, v] : a.items()) {
        if (k == "rules") {
            if (!v.is_object()) throw ScheduleError("\"rules\" must be an object");
            for (const auto& [prefix, step] : v.items()) rules.emplace(prefix, detail::parse_step(step));
        } else if (k == "default") {
            if (!v.is_object() || !v.contains("basis")) throw ScheduleError("\"default\" needs a \"basis\"");
            Schedule::DefaultRule d;
            std::tie(d.axis, d.basis) = detail::parse_basis(v["basis"]);
            for (const auto& [dk, dv] : v.items()) {
                if (dk == "basis") continue;
                if (dk != "order" || !dv.is_array()) throw ScheduleError("unknown key '" + dk + "' in default rule");
                for (const auto& q : dv) d.order.push_back(q.get<int>());
            }
            fallback = std::move(d);
        } else {
            throw ScheduleError("unknown key '" + k + "' in adaptive schedule");
        }
    }
    return Schedule::adaptive(std::move(rules), std::move(fallback));
}

inline Schedule load_schedule(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScheduleError("cannot open schedule file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ScheduleError(std::string("malformed schedule JSON: ") + e.what());
    }
    return parse_schedule(j);
}

} // namespace clustergibbs
