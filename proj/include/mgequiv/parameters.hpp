#pragma once

// Named parameter vector of the equivalent model: canonical registry with
// defaults, search bounds and free/fixed flags, plus the flat
// `name = value` file format used across the CLI.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mgequiv/errors.hpp"
#include "mgequiv/units.hpp"

namespace mgequiv {

struct Parameter {
    std::string name;
    double value = 0.0;
    std::string unit;
    double lower = 0.0;  // search bound
    double upper = 0.0;  // search bound
    bool free = false;   // candidate for estimation

    // hard physical admissibility (independent of the search box)
    double hard_lo = -std::numeric_limits<double>::infinity();
    double hard_hi = std::numeric_limits<double>::infinity();
};

namespace detail {

struct ParamDef {
    const char* name;
    double value;
    const char* unit;
    double lower, upper;
    bool free;
    double hard_lo;
    double hard_hi;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Canonical parameter table. The first 20 entries are the estimable set;
/// the rest are fixed auxiliaries held at reference values. Defaults are
/// the reference parameter values of the equivalent; search ranges follow
/// typical-value tables for synchronous machines, converter controls and
/// load powers. H_m and X_m ranges are typical induction-machine values.
inline const ParamDef* registry(std::size_t& count) {
    static const ParamDef defs[] = {
        // ---- synchronous generator (pu on sg_rated unless noted)
        {"x_d", 2.633, "pu", 0.5, 3.0, true, 1e-9, kInf},
        {"x_dp", 0.282, "pu", 0.05, 0.5, true, 1e-9, kInf},
        {"x_q", 1.600, "pu", 0.5, 3.0, true, 1e-9, kInf},
        {"x_qp", 0.964, "pu", 0.3, 1.0, true, 1e-9, kInf},
        {"T_do_p", 6.76, "s", 0.5, 8.0, true, 1e-9, kInf},
        {"T_q_p", 0.914, "s", 0.5, 2.0, true, 1e-9, kInf},
        {"H", 3.108, "s", 0.01, 5.0, true, 1e-9, kInf},
        // ---- AVR
        {"K_a", 177.995, "-", 50.0, 400.0, true, 1e-9, kInf},
        // ---- voltage source converter
        {"S_vsc", 3.027, "MVA", 2.4, 3.6, true, 0.0, kInf},
        {"K_pvdc", 1.636, "-", 0.1, 2.0, true, 1e-9, kInf},
        {"K_ivdc", 457.07, "1/s", 20.0, 500.0, true, 1e-9, kInf},
        // ---- ZIP static load (net export allowed, hence no sign constraint)
        {"P_z", 1.154, "MW", 1.0, 3.0, true, -kInf, kInf},
        {"P_i", 1.512, "MW", 1.0, 3.0, true, -kInf, kInf},
        {"P_p", 2.536, "MW", 1.0, 3.0, true, -kInf, kInf},
        {"Q_z", 1.327, "MVar", 0.2, 2.0, true, -kInf, kInf},
        {"Q_i", 1.517, "MVar", 0.2, 2.0, true, -kInf, kInf},
        {"Q_p", 0.978, "MVar", 0.2, 2.0, true, -kInf, kInf},
        // ---- induction motor
        {"S_m", 1.152, "MVA", 0.5, 1.5, true, 0.0, kInf},
        {"H_m", 0.550, "s", 0.1, 2.0, true, 1e-9, kInf},
        {"X_m", 2.001, "pu", 1.0, 5.0, true, 1e-9, kInf},
        // ---- fixed auxiliaries: AVR / governor / SG dispatch
        {"T_a", 0.001, "s", 0.0001, 0.01, false, 1e-9, kInf},
        {"efd_max", 6.0, "pu", 1.0, 10.0, false, 1e-9, kInf},
        {"sg_rated", 8.8, "MVA", 0.0, 20.0, false, 0.0, kInf},
        {"sg_p_ref", 0.4, "pu", -1.0, 1.0, false, -kInf, kInf},
        {"sg_v_ref", 1.01, "pu", 0.8, 1.2, false, 1e-9, kInf},
        {"sg_damping", 1.0, "pu", 0.0, 10.0, false, 0.0, kInf},
        {"gov_droop", 0.05, "pu", 0.01, 0.2, false, 1e-9, kInf},
        {"gov_t", 0.5, "s", 0.05, 5.0, false, 1e-9, kInf},
        // ---- fixed auxiliaries: ZIP reference voltage
        {"zip_v0", 1.0, "pu", 0.8, 1.2, false, 1e-9, kInf},
        // ---- fixed auxiliaries: induction motor impedances and load
        {"im_r_s", 0.01, "pu", 0.001, 0.1, false, 1e-9, kInf},
        {"im_x_s", 0.1, "pu", 0.01, 0.5, false, 1e-9, kInf},
        {"im_r_r", 0.01, "pu", 0.001, 0.1, false, 1e-9, kInf},
        {"im_x_r", 0.1, "pu", 0.01, 0.5, false, 1e-9, kInf},
        {"im_torque_exp", 2.0, "-", 0.0, 3.0, false, 0.0, kInf},
        {"im_load_torque", 0.8, "pu", 0.0, 1.2, false, 0.0, kInf},
        // ---- fixed auxiliaries: VSC DC side
        {"vsc_p_source", 0.5, "pu", 0.0, 1.0, false, -kInf, kInf},
        {"vsc_v_dc_nom", 1.0, "pu", 0.8, 1.2, false, 1e-9, kInf},
        {"vsc_c_dc", 0.05, "s", 0.01, 0.5, false, 1e-9, kInf},
        {"vsc_i_max", 1.2, "pu", 0.5, 2.0, false, 1e-9, kInf},
        // ---- per-unit base
        {"s_base", 10.0, "MVA", 1.0, 100.0, false, 1e-9, kInf},
        {"v_base", 13.8, "kV", 0.1, 500.0, false, 1e-9, kInf},
        {"f_nom", 60.0, "Hz", 50.0, 60.0, false, 1e-9, kInf},
        // ---- accepted for ranking experiments, unused by the 4th-order model
        {"x_dpp", 0.2, "pu", 0.05, 0.4, false, 1e-9, kInf},
        {"x_qpp", 0.2, "pu", 0.05, 0.4, false, 1e-9, kInf},
        {"x_l", 0.15, "pu", 0.05, 0.3, false, 1e-9, kInf},
        {"T_do_pp", 0.03, "s", 0.01, 0.1, false, 1e-9, kInf},
        {"T_q", 0.05, "s", 0.01, 0.5, false, 1e-9, kInf},
    };
    count = sizeof(defs) / sizeof(defs[0]);
    return defs;
}

}  // namespace detail

/// Complete named parameter vector with per-parameter bounds and free
/// flags. Construction yields the all-defaults reference set.
class ParameterSet {
public:
    ParameterSet() {
        std::size_t n = 0;
        const detail::ParamDef* defs = detail::registry(n);
        params_.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            Parameter p;
            p.name = defs[i].name;
            p.value = defs[i].value;
            p.unit = defs[i].unit;
            p.lower = defs[i].lower;
            p.upper = defs[i].upper;
            p.free = defs[i].free;
            p.hard_lo = defs[i].hard_lo;
            p.hard_hi = defs[i].hard_hi;
            params_.push_back(std::move(p));
        }
    }

    const std::vector<Parameter>& all() const { return params_; }
    std::vector<Parameter>& all() { return params_; }

    bool has(const std::string& name) const { return find(name) != nullptr; }

    double get(const std::string& name) const {
        const Parameter* p = find(name);
        if (!p) throw ModelError("unknown parameter '" + name + "'");
        return p->value;
    }

    const Parameter& param(const std::string& name) const {
        const Parameter* p = find(name);
        if (!p) throw ModelError("unknown parameter '" + name + "'");
        return *p;
    }

    void set(const std::string& name, double value) {
        Parameter* p = find(name);
        if (!p) throw ModelError("unknown parameter '" + name + "'");
        if (!(value >= p->hard_lo) || !(value <= p->hard_hi))
            throw ModelError("parameter '" + name + "' = " + format_double(value) +
                             " violates its physical bounds");
        p->value = value;
    }

    void set_free(const std::string& name, bool free) {
        Parameter* p = find(name);
        if (!p) throw ModelError("unknown parameter '" + name + "'");
        p->free = free;
    }

    void set_bounds(const std::string& name, double lo, double hi) {
        Parameter* p = find(name);
        if (!p) throw ModelError("unknown parameter '" + name + "'");
        if (!(lo <= hi)) throw ConfigError("bounds for '" + name + "' are inverted");
        p->lower = lo;
        p->upper = hi;
    }

    /// Marks exactly `names` free and everything else fixed.
    void select_free(const std::vector<std::string>& names) {
        for (auto& p : params_) p.free = false;
        for (const auto& n : names) set_free(n, true);
    }

    std::vector<std::string> free_names() const {
        std::vector<std::string> out;
        for (const auto& p : params_)
            if (p.free) out.push_back(p.name);
        return out;
    }

    BaseSystem base() const {
        BaseSystem b;
        b.s_base = get("s_base");
        b.v_base = get("v_base");
        b.f_nom = get("f_nom");
        return b;
    }

private:
    const Parameter* find(const std::string& name) const {
        for (const auto& p : params_)
            if (p.name == name) return &p;
        return nullptr;
    }
    Parameter* find(const std::string& name) {
        for (auto& p : params_)
            if (p.name == name) return &p;
        return nullptr;
    }

    std::vector<Parameter> params_;
};

/// Loads a `name = value` file; unnamed parameters keep their defaults.
/// `#` starts a comment, blank lines are skipped.
inline ParameterSet load_parameter_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open parameter file '" + path + "'");
    ParameterSet ps;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(path + ":" + std::to_string(lineno) +
                             ": expected 'name = value'");
        auto trim = [](std::string s) {
            auto a = s.find_first_not_of(" \t\r");
            auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string name = trim(line.substr(0, eq));
        std::string value_str = trim(line.substr(eq + 1));
        if (!ps.has(name))
            throw ParseError(path + ":" + std::to_string(lineno) +
                             ": unknown parameter '" + name + "'");
        std::istringstream vs(value_str);
        double value = 0.0;
        char trailing = 0;
        if (!(vs >> value) || (vs >> trailing))
            throw ParseError(path + ":" + std::to_string(lineno) +
                             ": cannot parse value '" + value_str + "' for '" + name + "'");
        try {
            ps.set(name, value);
        } catch (const ModelError& e) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return ps;
}

inline void save_parameter_set(const ParameterSet& ps, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    out << "# equivalent model parameters (name = value)\n";
    for (const auto& p : ps.all())
        out << p.name << " = " << format_double(p.value) << "\n";
    if (!out) throw ParseError("write failed for '" + path + "'");
}

}  // namespace mgequiv
