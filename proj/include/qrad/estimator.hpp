#pragma once

#include "qrad/errors.hpp"

namespace qrad {

// Order-of-magnitude bounds for the quantum-radiation contribution to
// sonoluminescence. The O(1) prefactor is exposed and never claimed
// accurate; only the exponents are meaningful.

struct BoundInputs {
    double r_max = 0.0;  ///< maximal length scale
    double t_max = 0.0;  ///< disturbance duration
    double k_c = 0.0;    ///< frequency cutoff
    double v_quant = 0.0; ///< quantization volume (per-mode bound only), 0 = absent
    double c_order = 1.0; ///< dimensionless O(1) prefactor

    void validate() const
    {
        if (r_max < 0.0 || t_max < 0.0 || k_c < 0.0 || c_order < 0.0)
            throw validation_error("bound inputs must be nonnegative");
    }
};

/// E^max = O(R_max^6 T_max^2 K_c^9), an energy (inverse length).
inline double energy_bound(const BoundInputs& in)
{
    in.validate();
    double r6 = 1.0, t2 = in.t_max * in.t_max, k9 = 1.0;
    for (int i = 0; i < 6; ++i) r6 *= in.r_max;
    for (int i = 0; i < 9; ++i) k9 *= in.k_c;
    return in.c_order * r6 * t2 * k9;
}

/// N^max = O(T_max^2 R_max^6 K_c^5 / V); still quantization-volume
/// dependent, unlike the energy.
inline double per_mode_bound(const BoundInputs& in)
{
    in.validate();
    if (in.v_quant <= 0.0)
        throw validation_error("per_mode_bound requires a quantization volume");
    double r6 = 1.0, k5 = 1.0;
    for (int i = 0; i < 6; ++i) r6 *= in.r_max;
    for (int i = 0; i < 5; ++i) k5 *= in.k_c;
    return in.c_order * in.t_max * in.t_max * r6 * k5 / in.v_quant;
}

} // namespace qrad
