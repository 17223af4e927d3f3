#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "qrad/errors.hpp"
#include "qrad/gnm.hpp"
#include "qrad/quadrature.hpp"
#include "qrad/transforms.hpp"

namespace qrad {

/// Angular kernel after azimuthal reduction of the polarization sums.
/// The phi-average of (e_k' . e_k,lambda)^2 at fixed mu is (1 - mu^2)/2,
/// so a single polarization carries (1 + mu^2)/2 and the lambda-sum
/// carries (1 + mu^2).
enum class AngularKernel { Summed, PerPolarization };

inline double angular_kernel(AngularKernel k, double mu)
{
    const double v = 1.0 + mu * mu;
    return k == AngularKernel::Summed ? v : 0.5 * v;
}

namespace detail {

/// Panel edges for momentum integrals on [0, K]: geometric grading toward
/// zero catches the small-k' peak of slow disturbances.
inline std::vector<double> momentum_edges(double K)
{
    return graded_edges(0.0, K, 8);
}

} // namespace detail

/// Quantization-volume-free per-mode density V * N_k:
///   (1/(2 pi)^2) int_0^{K_c} dk' k'^2 int_{-1}^{1} dmu
///       omega_k omega_k' |xi~(q, omega_k + omega_k')|^2 K(mu),
/// with q = sqrt(k^2 + k'^2 + 2 k k' mu) and omega = k / sqrt(eps_inf).
inline double n_per_mode(const SpectralTable& tab, double k, AngularKernel kernel,
                         double epsilon_inf, const QuadratureSettings& qs = {},
                         double* err_out = nullptr)
{
    const double K_c = tab.cutoff_k;
    if (k > K_c * (1.0 + 1e-12))
        throw coverage_error("n_per_mode: k exceeds the cutoff K_c");
    const double sqrt_eps = std::sqrt(epsilon_inf);
    if (k + K_c > tab.q_max() * (1.0 + 1e-12)
        || (k + K_c) / sqrt_eps > tab.omega_max() * (1.0 + 1e-12))
        throw coverage_error("n_per_mode: table does not cover q up to k + K_c");

    const double omega_k = k / sqrt_eps;
    auto inner = [&](double kp, int n_mu) {
        const double omega_kp = kp / sqrt_eps;
        const double W = omega_k + omega_kp;
        const GaussRule& rule = gauss_legendre(n_mu);
        double acc = 0.0;
        for (int i = 0; i < n_mu; ++i) {
            const double mu = rule.x[i];
            const double q = std::sqrt(std::max(0.0, k * k + kp * kp + 2.0 * k * kp * mu));
            const double a = std::abs(tab.interpolate(q, W));
            acc += rule.w[i] * a * a * angular_kernel(kernel, mu);
        }
        return kp * kp * omega_k * omega_kp * acc;
    };

    const auto edges = detail::momentum_edges(K_c);
    const int n_gauss = std::max(8, qs.n_k);
    auto outer = [&](int order, int n_mu) {
        double acc = 0.0;
        for (std::size_t p = 0; p + 1 < edges.size(); ++p)
            acc += integrate_gl([&](double kp) { return inner(kp, n_mu); }, edges[p],
                                edges[p + 1], order);
        return acc;
    };
    const double fine = outer(n_gauss, qs.n_mu);
    if (err_out) {
        const double coarse = outer(std::max(4, n_gauss / 2), std::max(4, qs.n_mu / 2));
        *err_out = std::abs(fine - coarse) / (4.0 * std::numbers::pi * std::numbers::pi);
    }
    return fine / (4.0 * std::numbers::pi * std::numbers::pi);
}

/// Spectral energy density e(omega) = (1/(2 pi^2)) k^2 sqrt(eps) omega (V N_k)
/// with k = sqrt(eps) * omega; no quantization volume enters.
inline std::vector<double> spectral_density(const SpectralTable& tab,
                                            const std::vector<double>& omega_grid,
                                            double epsilon_inf,
                                            const QuadratureSettings& qs = {},
                                            AngularKernel kernel = AngularKernel::Summed,
                                            std::vector<double>* err_out = nullptr)
{
    const double sqrt_eps = std::sqrt(epsilon_inf);
    std::vector<double> e(omega_grid.size());
    if (err_out) err_out->assign(omega_grid.size(), 0.0);
    for (std::size_t i = 0; i < omega_grid.size(); ++i) {
        const double omega = omega_grid[i];
        const double k = sqrt_eps * omega;
        double err = 0.0;
        const double vnk = n_per_mode(tab, k, kernel, epsilon_inf, qs, err_out ? &err : nullptr);
        const double pref = k * k * sqrt_eps * omega / (2.0 * std::numbers::pi * std::numbers::pi);
        e[i] = pref * vnk;
        if (err_out) (*err_out)[i] = pref * err;
    }
    return e;
}

/// Total energy by direct quadrature of the mode integrals:
///   E = (1/(2 pi^2)) int_0^{K_c} dk k^2 omega_k (V N_k).
struct EnergyQuadratureResult {
    double energy = 0.0;
    double err_estimate = 0.0;
};

inline EnergyQuadratureResult energy_quadrature(const SpectralTable& tab, double epsilon_inf,
                                                double K_c, const QuadratureSettings& qs = {})
{
    if (K_c > tab.cutoff_k * (1.0 + 1e-12))
        throw coverage_error("energy_quadrature: K_c exceeds the table cutoff");
    const double sqrt_eps = std::sqrt(epsilon_inf);
    const auto edges = detail::momentum_edges(K_c);
    const int n_gauss = std::max(8, qs.n_k);

    auto run = [&](int order, QuadratureSettings inner_qs) {
        double acc = 0.0;
        for (std::size_t p = 0; p + 1 < edges.size(); ++p)
            acc += integrate_gl(
                [&](double k) {
                    const double vnk =
                        n_per_mode(tab, k, AngularKernel::Summed, epsilon_inf, inner_qs);
                    return k * k * (k / sqrt_eps) * vnk;
                },
                edges[p], edges[p + 1], order);
        return acc / (2.0 * std::numbers::pi * std::numbers::pi);
    };
    QuadratureSettings coarse_qs = qs;
    coarse_qs.n_k = std::max(4, qs.n_k / 2);
    coarse_qs.n_mu = std::max(4, qs.n_mu / 2);
    EnergyQuadratureResult res;
    res.energy = run(n_gauss, qs);
    res.err_estimate = std::abs(res.energy - run(std::max(4, n_gauss / 2), coarse_qs));
    if (res.energy < 0.0)
        throw convergence_error("energy_quadrature produced a negative value");
    return res;
}

/// Energy from the moment series,
///   E = sum_{n,m} G^{nm} int dt M_n^{(4+2n)}(t) M_m^{(4+2m)}(t),
/// with the per-(n,m) contribution matrix reported for truncation
/// visibility.
struct EnergySeriesResult {
    double energy = 0.0;
    std::vector<std::vector<double>> contributions; ///< E^{nm}
    int n_max = 0;
};

inline EnergySeriesResult energy_series(const MomentSeries& ms, const GnmTable& gnm)
{
    if (gnm.n_max < ms.n_max)
        throw validation_error("gnm table order below moment series order");
    EnergySeriesResult res;
    res.n_max = ms.n_max;
    res.contributions.assign(ms.n_max + 1, std::vector<double>(ms.n_max + 1, 0.0));
    const std::size_t N = ms.t_grid.size();
    const double h = ms.dt();
    for (int n = 0; n <= ms.n_max; ++n) {
        for (int m = 0; m <= ms.n_max; ++m) {
            double inner = 0.0;
            // trapezoid on the uniform grid; the tracks decay at the ends
            for (std::size_t j = 0; j < N; ++j) {
                const double w = (j == 0 || j + 1 == N) ? 0.5 : 1.0;
                inner += w * ms.deriv[n][j] * ms.deriv[m][j];
            }
            inner *= h;
            res.contributions[n][m] = gnm.value(n, m) * inner;
            res.energy += res.contributions[n][m];
        }
    }
    return res;
}

/// Least-squares power-law fit of e(omega) ~ omega^p on a log-log grid.
struct LowOmegaFit {
    double exponent = 0.0;
    double sigma = 0.0;
    bool window_ok = true; ///< false when the window leaves the asymptotic regime
};

inline LowOmegaFit low_omega_fit(const std::vector<double>& omega,
                                 const std::vector<double>& e, double asymptotic_scale = 0.0)
{
    if (omega.size() != e.size() || omega.size() < 3)
        throw validation_error("low_omega_fit needs >= 3 samples");
    LowOmegaFit fit;
    if (asymptotic_scale > 0.0) {
        const double wb = *std::max_element(omega.begin(), omega.end());
        fit.window_ok = wb * asymptotic_scale <= 0.1 * (1.0 + 1e-9);
    }
    const std::size_t n = omega.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (omega[i] <= 0.0 || e[i] <= 0.0)
            throw validation_error("low_omega_fit requires positive samples");
        lx[i] = std::log(omega[i]);
        ly[i] = std::log(e[i]);
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double denom = n * sxx - sx * sx;
    fit.exponent = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.exponent * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (intercept + fit.exponent * lx[i]);
        ss += r * r;
    }
    if (n > 2) fit.sigma = std::sqrt(ss / (n - 2) * n / denom);
    return fit;
}

/// Default 12-point log-spaced fit window inside the asymptotic regime.
inline std::vector<double> default_fit_window(const ScenarioConfig& cfg, int points = 12)
{
    const double scale =
        std::max(cfg.time_scale(), cfg.max_radius() * std::sqrt(cfg.epsilon_inf));
    std::vector<double> w(points);
    const double lo = 0.01 / scale, hi = 0.1 / scale;
    for (int i = 0; i < points; ++i)
        w[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
    return w;
}

} // namespace qrad
