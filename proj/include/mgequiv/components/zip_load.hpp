#pragma once

#include <cmath>

#include "mgequiv/errors.hpp"

namespace mgequiv {

/// Power a component injects into the PCC node, MW / MVar. Loads therefore
/// carry negative values; the PCC measurement is minus the sum of these.
struct ComponentOutput {
    double p = 0.0;  // MW
    double q = 0.0;  // MVar
};

/// Static composite-load part: constant impedance / current / power shares,
/// in MW and MVar of consumed power at the reference voltage v0.
struct ZipLoadParams {
    double p_z = 0.0, p_i = 0.0, p_p = 0.0;  // MW
    double q_z = 0.0, q_i = 0.0, q_p = 0.0;  // MVar
    double v0 = 1.0;                         // pu

    void validate() const {
        if (!(v0 > 0.0)) throw ModelError("ZIP: v0 must be positive");
    }
};

/// Consumption P = P_z (v/v0)^2 + P_i (v/v0) + P_p (Q analogous), returned
/// under the injection convention, i.e. as (-P, -Q).
inline ComponentOutput zip_power(const ZipLoadParams& zp, double v) {
    const double r = v / zp.v0;
    const double p_cons = zp.p_z * r * r + zp.p_i * r + zp.p_p;
    const double q_cons = zp.q_z * r * r + zp.q_i * r + zp.q_p;
    return {-p_cons, -q_cons};
}

}  // namespace mgequiv
