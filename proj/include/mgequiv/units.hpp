#pragma once

#include <cmath>
#include <cstdio>
#include <string>

#include "mgequiv/errors.hpp"

namespace mgequiv {

/// Common per-unit base for all PCC-level quantities. Component models run
/// on their own MVA ratings internally; everything crossing a module
/// boundary is either in file units (MW, MVar, pu-voltage, Hz) or in pu on
/// this base.
struct BaseSystem {
    double s_base = 10.0;  // MVA
    double v_base = 13.8;  // kV
    double f_nom = 60.0;   // Hz

    void validate() const {
        if (!(s_base > 0.0) || !(v_base > 0.0) || !(f_nom > 0.0))
            throw ModelError("BaseSystem: s_base, v_base and f_nom must be positive");
    }

    double mw_to_pu(double mw) const { return mw / s_base; }
    double pu_to_mw(double pu) const { return pu * s_base; }
    double omega_nom() const { return 2.0 * M_PI * f_nom; }
};

/// Shortest decimal string that round-trips the double exactly.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) {
        // try trimming to the shortest exact representation
        for (int prec = 1; prec < 17; ++prec) {
            char shorter[40];
            std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
            double b2 = 0.0;
            std::sscanf(shorter, "%lf", &b2);
            if (b2 == v) return shorter;
        }
    }
    return buf;
}

}  // namespace mgequiv
