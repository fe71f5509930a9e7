#pragma once

// CSV ingest/persist for PCC series. Format: header `t,v,f,p,q` (any column
// order), `.` decimal point, LF line endings, `#` comment lines.

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mgequiv/errors.hpp"
#include "mgequiv/timeseries.hpp"
#include "mgequiv/units.hpp"

namespace mgequiv {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        auto a = field.find_first_not_of(" \t\r");
        auto b = field.find_last_not_of(" \t\r");
        out.push_back(a == std::string::npos ? std::string() : field.substr(a, b - a + 1));
    }
    return out;
}

inline double parse_cell(const std::string& cell, const std::string& path, int row,
                         const std::string& col) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw ParseError(path + ": row " + std::to_string(row) + ", column '" + col +
                         "': cannot parse '" + cell + "' as a number");
    return v;
}

}  // namespace detail

/// Reads a PCC CSV. Rows must be strictly increasing in t with uniform
/// spacing (tolerance 1e-6*dt); dt is inferred from the first two rows.
inline PccTimeSeries load_pcc_csv(const std::string& path, const BaseSystem& base) {
    base.validate();
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");

    static const std::array<const char*, 5> kCols = {"t", "v", "f", "p", "q"};
    std::array<int, 5> col_pos = {-1, -1, -1, -1, -1};

    std::string line;
    bool header_seen = false;
    int data_row = 0;
    std::vector<double> t;
    PccTimeSeries s;
    double hint_t0 = 0.0, hint_dt = 0.0;
    bool have_hint = false;

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line[0] == '#') {
            // grid annotation written by save_pcc_csv; keeps dt bit-exact
            // across a save/load cycle
            double a = 0.0, b = 0.0;
            if (std::sscanf(line.c_str(), "# grid: t0 = %lf dt = %lf", &a, &b) == 2) {
                hint_t0 = a;
                hint_dt = b;
                have_hint = true;
            }
            continue;
        }
        if (line.empty()) continue;
        auto fields = detail::split_csv_line(line);
        if (!header_seen) {
            for (std::size_t c = 0; c < kCols.size(); ++c) {
                for (std::size_t f = 0; f < fields.size(); ++f)
                    if (fields[f] == kCols[c]) col_pos[c] = static_cast<int>(f);
                if (col_pos[c] < 0)
                    throw ParseError(path + ": header is missing column '" +
                                     std::string(kCols[c]) + "'");
            }
            header_seen = true;
            continue;
        }
        ++data_row;
        std::array<double, 5> vals{};
        for (std::size_t c = 0; c < kCols.size(); ++c) {
            auto pos = static_cast<std::size_t>(col_pos[c]);
            if (pos >= fields.size())
                throw ParseError(path + ": row " + std::to_string(data_row) +
                                 " has too few fields");
            vals[c] = detail::parse_cell(fields[pos], path, data_row, kCols[c]);
        }
        t.push_back(vals[0]);
        s.v_mag.push_back(vals[1]);
        s.freq.push_back(vals[2]);
        s.p.push_back(vals[3]);
        s.q.push_back(vals[4]);
    }
    if (!header_seen) throw ParseError(path + ": missing header row");
    if (t.size() < 2) throw ParseError(path + ": fewer than 2 data rows");

    s.t0 = t[0];
    s.dt = t[1] - t[0];
    if (!(s.dt > 0.0)) throw ParseError(path + ": time must be strictly increasing");
    for (std::size_t k = 1; k < t.size(); ++k) {
        const double step = t[k] - t[k - 1];
        if (std::abs(step - s.dt) > 1e-6 * s.dt)
            throw ParseError(path + ": non-uniform sample spacing at row " +
                             std::to_string(k + 1));
    }
    if (have_hint && std::abs(hint_t0 - s.t0) <= 1e-6 * s.dt &&
        std::abs(hint_dt - s.dt) <= 1e-6 * s.dt) {
        s.t0 = hint_t0;
        s.dt = hint_dt;
    }
    s.validate();
    return s;
}

inline void save_pcc_csv(const PccTimeSeries& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    out << "# units: t s, v pu, f Hz, p MW, q MVar\n";
    out << "# grid: t0 = " << format_double(s.t0) << " dt = " << format_double(s.dt) << "\n";
    out << "t,v,f,p,q\n";
    for (std::size_t k = 0; k < s.size(); ++k) {
        out << format_double(s.time_at(k)) << ',' << format_double(s.v_mag[k]) << ','
            << format_double(s.freq[k]) << ',' << format_double(s.p[k]) << ','
            << format_double(s.q[k]) << '\n';
    }
    if (!out) throw ParseError("write failed for '" + path + "'");
}

}  // namespace mgequiv
