#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qrad/errors.hpp"

namespace qrad {

using big_int = boost::multiprecision::cpp_int;
using big_rational = boost::multiprecision::cpp_rational;

inline big_int big_factorial(int n)
{
    big_int f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

inline big_int big_binomial(int n, int k)
{
    if (k < 0 || k > n) return 0;
    big_int b = 1;
    for (int i = 0; i < k; ++i) {
        b *= (n - i);
        b /= (i + 1);
    }
    return b;
}

/// The epsilon- and (2*pi)-free kernel of the geometry-independent energy
/// matrix, as an exact rational. The full matrix is
///   G^{nm} = kernel(n, m) * eps_inf^{3+n+m} / (2*pi)^3 ,
/// and the kernel depends on n and m only through n + m. All factorials
/// are carried as big integers; a single division at the end produces the
/// reduced rational.
inline big_rational gnm_exact(int n, int m)
{
    if (n < 0 || m < 0) throw validation_error("gnm_exact requires n, m >= 0");
    const int p = n + m;
    big_rational sum = 0;
    for (int l = 0; l <= p; ++l) {
        if (l % 2 != 0) continue; // ((-1)^l + 1) kills odd l
        big_int inner = 0;
        for (int s = 0; s <= p - l; ++s) {
            inner += big_binomial(p - l, s) * big_factorial(4 + l + 2 * s)
                     * big_factorial(3 - l - 2 * s + 2 * p);
        }
        // 2^l * ((-1)^l + 1) = 2^{l+1} for even l; 1/(l+1) + 1/(l+3)
        big_int outer = big_binomial(p, l) * (big_int(1) << (l + 1));
        big_rational angular(big_int(2 * l + 4), big_int((l + 1) * (l + 3)));
        sum += big_rational(outer * inner) * angular;
    }
    return sum / big_rational(big_factorial(8 + 2 * p));
}

/// Floating-point realization kernel * eps_inf^{3+n+m} / (2*pi)^3,
/// rounded from the exact rational.
inline double gnm_numeric(int n, int m, double epsilon_inf)
{
    if (epsilon_inf < 1.0) throw validation_error("gnm_numeric requires epsilon_inf >= 1");
    const double kernel = gnm_exact(n, m).convert_to<double>();
    const double twopi3 = std::pow(2.0 * std::numbers::pi, 3);
    return kernel * std::pow(epsilon_inf, 3 + n + m) / twopi3;
}

/// Precomputed table of kernels plus the numeric realization at a fixed
/// medium constant.
struct GnmTable {
    int n_max = 2;
    double epsilon_inf = 1.0;
    std::vector<big_rational> kernels; ///< [(n_max+1)^2], row-major

    const big_rational& kernel(int n, int m) const { return kernels[n * (n_max + 1) + m]; }
    double value(int n, int m) const
    {
        const double twopi3 = std::pow(2.0 * std::numbers::pi, 3);
        return kernel(n, m).convert_to<double>() * std::pow(epsilon_inf, 3 + n + m) / twopi3;
    }
};

inline GnmTable build_gnm_table(int n_max, double epsilon_inf)
{
    if (n_max < 0) throw validation_error("gnm table requires n_max >= 0");
    GnmTable t;
    t.n_max = n_max;
    t.epsilon_inf = epsilon_inf;
    t.kernels.resize((n_max + 1) * (n_max + 1));
    // kernels depend only on n+m: evaluate each anti-diagonal once
    std::vector<big_rational> diag(2 * n_max + 1);
    for (int p = 0; p <= 2 * n_max; ++p) diag[p] = gnm_exact(p, 0);
    for (int n = 0; n <= n_max; ++n)
        for (int m = 0; m <= n_max; ++m) t.kernels[n * (n_max + 1) + m] = diag[n + m];
    return t;
}

} // namespace qrad
