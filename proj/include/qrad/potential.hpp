#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "qrad/errors.hpp"
#include "qrad/quadrature.hpp"

namespace qrad {

// Radial constraint solver: in an inhomogeneous dielectric the scalar
// potential obeys (1/r^2) (r^2 eps Phi')' = s(r) with Phi'(0) = 0 and the
// far-field condition truncated to Phi(L) = 0. The conservative
// finite-volume form keeps discrete flux balance exact, which makes the
// linearity and grid-convergence checks clean.

struct RadialEllipticProblem {
    std::vector<double> r; ///< node coordinates, r[0] = 0 ... r[N] = L
    std::function<double(double)> eps;
    std::function<double(double)> source;
    double tol = 1e-8;
};

/// Uniform node layout on [0, L].
inline std::vector<double> uniform_nodes(double L, int n_cells)
{
    std::vector<double> r(n_cells + 1);
    for (int i = 0; i <= n_cells; ++i) r[i] = L * i / n_cells;
    return r;
}

/// Nodes clustered around a wall at r_w with width delta: uniform outside,
/// refined by 4x inside [r_w - 4 delta, r_w + 4 delta].
inline std::vector<double> wall_clustered_nodes(double L, int n_cells, double r_w, double delta)
{
    std::vector<double> r;
    const double a = std::max(0.0, r_w - 4.0 * delta), b = std::min(L, r_w + 4.0 * delta);
    const double h = L / n_cells;
    double x = 0.0;
    r.push_back(0.0);
    while (x < L - 1e-12 * L) {
        const double step = (x >= a && x < b) ? h / 4.0 : h;
        x = std::min(L, x + step);
        r.push_back(x);
    }
    r.back() = L;
    return r;
}

struct PotentialSolution {
    std::vector<double> r;
    std::vector<double> phi;
    std::vector<double> residual; ///< per-node flux-balance defect
    double residual_norm = 0.0;
};

inline PotentialSolution solve_radial_potential(const RadialEllipticProblem& prob)
{
    const std::vector<double>& r = prob.r;
    const std::size_t N = r.size() - 1; // unknowns phi[0..N-1], phi[N] = 0
    if (N < 4) throw validation_error("radial potential grid too small");

    // face positions and conductances m^2 eps / dr
    std::vector<double> face(N), cond(N);
    for (std::size_t i = 0; i < N; ++i) {
        face[i] = 0.5 * (r[i] + r[i + 1]);
        cond[i] = face[i] * face[i] * prob.eps(face[i]) / (r[i + 1] - r[i]);
    }
    // cell loads: int r^2 s dr over the dual cell around node i
    std::vector<double> load(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double lo = (i == 0) ? 0.0 : face[i - 1];
        const double hi = face[i];
        load[i] = integrate_gl([&](double x) { return x * x * prob.source(x); }, lo, hi, 8);
    }

    // tridiagonal assembly: F_i - F_{i-1} = load_i, F at r=0 vanishes
    std::vector<double> a(N, 0.0), b(N, 0.0), c(N, 0.0), d(N, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
        const double cl = (i == 0) ? 0.0 : cond[i - 1];
        const double cr = cond[i];
        if (i > 0) a[i] = cl;
        b[i] = -(cl + cr);
        c[i] = cr; // couples to phi[i+1]; for i = N-1 that is the boundary value 0
        d[i] = load[i];
    }
    // Thomas solve
    std::vector<double> cp(N), dp(N);
    if (b[0] == 0.0) throw convergence_error("radial potential: singular discretization");
    cp[0] = c[0] / b[0];
    dp[0] = d[0] / b[0];
    for (std::size_t i = 1; i < N; ++i) {
        const double denom = b[i] - a[i] * cp[i - 1];
        if (denom == 0.0) throw convergence_error("radial potential: singular discretization");
        cp[i] = c[i] / denom;
        dp[i] = (d[i] - a[i] * dp[i - 1]) / denom;
    }
    PotentialSolution sol;
    sol.r = r;
    sol.phi.assign(N + 1, 0.0);
    sol.phi[N - 1] = dp[N - 1];
    for (std::size_t i = N - 1; i-- > 0;) sol.phi[i] = dp[i] - cp[i] * sol.phi[i + 1];
    sol.phi[N] = 0.0;

    // residual check
    sol.residual.assign(N, 0.0);
    double norm = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double Fl = (i == 0) ? 0.0 : cond[i - 1] * (sol.phi[i] - sol.phi[i - 1]);
        const double Fr = cond[i] * (sol.phi[i + 1] - sol.phi[i]);
        sol.residual[i] = (Fr - Fl) - load[i];
        norm += sol.residual[i] * sol.residual[i];
        scale += load[i] * load[i];
    }
    sol.residual_norm = std::sqrt(norm);
    const double ref = std::sqrt(scale);
    if (ref > 0.0 && sol.residual_norm > prob.tol * std::max(1.0, ref))
        throw convergence_error("radial potential: residual above tolerance");
    return sol;
}

struct DecayCheck {
    double exponent = 0.0; ///< fitted p in Phi ~ r^{-p}
    bool trivial = false;  ///< Phi == 0, nothing to fit
};

/// Far-field decay exponent, fitted on the flux derivative so the
/// Phi(L) = 0 shift drops out: Phi ~ A r^{-p} gives d(log|Phi'|)/d(log r)
/// = -(p+1).
inline DecayCheck far_field_decay_check(const PotentialSolution& sol, double support_radius)
{
    DecayCheck out;
    double amax = 0.0;
    for (double p : sol.phi) amax = std::max(amax, std::abs(p));
    if (amax == 0.0) {
        out.trivial = true;
        return out;
    }
    const double L = sol.r.back();
    const double lo = 3.0 * support_radius, hi = L / 3.0;
    if (hi <= lo) throw validation_error("far-field window empty: domain too small");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t i = 1; i + 1 < sol.r.size(); ++i) {
        const double rm = 0.5 * (sol.r[i] + sol.r[i + 1]);
        if (rm < lo || rm > hi) continue;
        const double dphi = (sol.phi[i + 1] - sol.phi[i]) / (sol.r[i + 1] - sol.r[i]);
        if (std::abs(dphi) < 1e-300) continue;
        const double x = std::log(rm), y = std::log(std::abs(dphi));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 4) throw validation_error("far-field decay check: not enough samples");
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    out.exponent = -slope - 1.0;
    return out;
}

} // namespace qrad
