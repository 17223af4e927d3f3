#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "qrad/errors.hpp"
#include "qrad/parallel.hpp"
#include "qrad/quadrature.hpp"
#include "qrad/scenario.hpp"

namespace qrad {

// ---------------------------------------------------------------------------
// Spherical (radial) Fourier transform
// ---------------------------------------------------------------------------

/// Spherical transform of a radial function supported on [a, b]:
///   4*pi * int_a^b dr r^2 f(r) sinc(k r).
/// At k = 0 this is the plain volume integral. Panels track the
/// oscillation wavelength; the error estimate compares two Gauss orders.
template <class F>
double radial_ft(F&& f, double a, double b, double k, double* err_out = nullptr)
{
    const double fourpi = 4.0 * std::numbers::pi;
    auto integrand = [&](double r) { return r * r * f(r) * sinc(k * r); };
    const int oscill = static_cast<int>(std::ceil((b - a) * std::abs(k) / std::numbers::pi));
    const int panels = std::max(4, oscill + 2);
    const auto edges = uniform_edges(a, b, panels);
    const double fine = integrate_panels(integrand, edges, 16);
    if (err_out) {
        const double coarse = integrate_panels(integrand, edges, 8);
        *err_out = std::abs(fine - coarse);
    }
    return fourpi * fine;
}

/// Spherical transform on caller-supplied panel edges, for integrands with
/// radial features the uniform oscillation panels of radial_ft would miss.
template <class F>
double radial_ft_edges(F&& f, const std::vector<double>& edges, double k,
                       double* err_out = nullptr)
{
    const double fourpi = 4.0 * std::numbers::pi;
    auto integrand = [&](double r) { return r * r * f(r) * sinc(k * r); };
    const double fine = integrate_panels(integrand, edges, 16);
    if (err_out) {
        const double coarse = integrate_panels(integrand, edges, 8);
        *err_out = std::abs(fine - coarse);
    }
    return fourpi * fine;
}

namespace detail {

/// Panel edges over [a, b] that resolve both the profile's sharpest radial
/// feature at time t (the bubble wall, via a geometric ladder of panels
/// growing away from it) and the sinc oscillation at wavenumber k.
inline std::vector<double> radial_panel_edges(const ScenarioConfig& cfg, double t, double a,
                                              double b, double k)
{
    std::vector<double> pts = {a, b};
    double smooth_cap = b - a; // widest panel the profile itself allows
    if (cfg.profile.kind == ProfileKind::SmoothBubble) {
        const double rw = cfg.profile.track.radius(t);
        const double w = cfg.profile.wall_width;
        if (rw > a && rw < b) pts.push_back(rw);
        for (double off = w; off < b - a; off *= 2.0) {
            if (rw - off > a) pts.push_back(rw - off);
            if (rw + off < b) pts.push_back(rw + off);
        }
    } else if (cfg.profile.kind == ProfileKind::GaussianBlob) {
        smooth_cap = cfg.profile.length;
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    const double osc_cap = std::numbers::pi / std::max(std::abs(k), 1e-300);
    const double cap = std::min(smooth_cap, osc_cap);
    std::vector<double> edges;
    edges.push_back(pts.front());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double x0 = pts[i], x1 = pts[i + 1];
        const int nsub = std::max(1, static_cast<int>(std::ceil((x1 - x0) / cap)));
        for (int j = 1; j <= nsub; ++j) edges.push_back(x0 + (x1 - x0) * j / nsub);
    }
    return edges;
}

} // namespace detail

/// Closed form for the sharp profile c * Theta(R - r):
///   4*pi*c*(sin kR - kR cos kR)/k^3.
inline double sharp_bubble_ft(double c, double R, double k)
{
    const double fourpi = 4.0 * std::numbers::pi;
    const double x = k * R;
    if (std::abs(x) < 1e-3) {
        // series of (sin x - x cos x)/x^3 = 1/3 - x^2/30 + x^4/840
        const double x2 = x * x;
        return fourpi * c * R * R * R * (1.0 / 3.0 - x2 / 30.0 + x2 * x2 / 840.0);
    }
    return fourpi * c * (std::sin(x) - x * std::cos(x)) / (k * k * k);
}

/// Spatial transform of the pulse part of xi at time t. Sharp walls route
/// through the closed-form primitive; smooth families use panel quadrature
/// over the pulse support.
inline double xi_pulse_radial_ft(const ScenarioConfig& cfg, double q, double t,
                                 double* err_out = nullptr)
{
    if (cfg.profile.kind == ProfileKind::SharpBubble) {
        const double xi_in = 0.5 * (1.0 - 1.0 / cfg.epsilon_inf);
        if (err_out) *err_out = 0.0;
        return sharp_bubble_ft(xi_in, cfg.profile.track.radius(t), q)
               - sharp_bubble_ft(xi_in, cfg.profile.track.R0, q);
    }
    const auto [a, b] = cfg.xi_pulse_support();
    const auto edges = detail::radial_panel_edges(cfg, t, a, b, q);
    return radial_ft_edges([&](double r) { return cfg.eval_xi_pulse(r, t); }, edges, q, err_out);
}

// ---------------------------------------------------------------------------
// Spectral table
// ---------------------------------------------------------------------------

/// Sampled 4D Fourier transform of the squeezing pulse,
///   xi~(q, Omega) = int dt e^{i Omega t} [4pi int dr r^2 xi_pulse sinc(qr)],
/// on a rectilinear grid. Only Omega >= 0 is stored; xi real implies
/// xi~(q, -Omega) = conj(xi~(q, Omega)). The Omega grid is graded: a dense
/// segment resolves the temporal bandwidth ~1/T, a coarse tail extends
/// coverage to 2 K_c / sqrt(eps_inf).
struct SpectralTable {
    std::vector<double> q_grid;
    std::vector<double> omega_grid;
    std::vector<std::complex<double>> values; ///< row-major [iq * n_omega + iw]
    double err_estimate = 0.0;
    std::string source_hash;
    std::string warning; ///< set when Nyquist-style grid checks fail
    double epsilon_inf = 1.0;
    double cutoff_k = 0.0;

    std::size_t n_q() const { return q_grid.size(); }
    std::size_t n_omega() const { return omega_grid.size(); }
    std::complex<double> at(std::size_t iq, std::size_t iw) const
    {
        return values[iq * n_omega() + iw];
    }

    double q_max() const { return q_grid.back(); }
    double omega_max() const { return omega_grid.back(); }

    static std::size_t stencil_start(const std::vector<double>& g, double x)
    {
        auto it = std::upper_bound(g.begin(), g.end(), x);
        std::ptrdiff_t i = (it - g.begin()) - 1;
        i = std::clamp<std::ptrdiff_t>(i - 1, 0, static_cast<std::ptrdiff_t>(g.size()) - 4);
        return static_cast<std::size_t>(i);
    }

    /// Bicubic (4x4 tensor Lagrange) interpolation; negative Omega is
    /// served through conjugate symmetry.
    std::complex<double> interpolate(double q, double omega) const
    {
        if (omega < 0.0) return std::conj(interpolate(q, -omega));
        if (q < 0.0) q = -q; // radial transform is even in q
        if (q > q_grid.back() * (1.0 + 1e-12) || omega > omega_grid.back() * (1.0 + 1e-12))
            throw coverage_error("spectral table does not cover (q, Omega) = ("
                                 + std::to_string(q) + ", " + std::to_string(omega) + ")");
        const std::size_t i0 = stencil_start(q_grid, q);
        const std::size_t j0 = stencil_start(omega_grid, omega);
        double lq[4], lw[4];
        for (int a = 0; a < 4; ++a) {
            double num = 1.0, den = 1.0;
            for (int b = 0; b < 4; ++b) {
                if (a == b) continue;
                num *= q - q_grid[i0 + b];
                den *= q_grid[i0 + a] - q_grid[i0 + b];
            }
            lq[a] = num / den;
        }
        for (int a = 0; a < 4; ++a) {
            double num = 1.0, den = 1.0;
            for (int b = 0; b < 4; ++b) {
                if (a == b) continue;
                num *= omega - omega_grid[j0 + b];
                den *= omega_grid[j0 + a] - omega_grid[j0 + b];
            }
            lw[a] = num / den;
        }
        std::complex<double> acc = 0.0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) acc += lq[a] * lw[b] * at(i0 + a, j0 + b);
        return acc;
    }
};

/// Grid sizes for the table builder; defaults are derived from the
/// scenario when fields are left at zero.
struct TableGrids {
    int n_q = 0;
    int n_omega_core = 0;
    int n_omega_tail = 64;
    double q_max = 0.0;
    double omega_max = 0.0;
};

namespace detail {

/// Temporal quadrature nodes: uniform trapezoid with a cosine taper of 5%
/// window width at each end. For integrands that have decayed at the
/// window edges the trapezoid rule is spectrally accurate for every
/// e^{i Omega t} factor below the grid's Nyquist frequency, which is what
/// the high-Omega tail of the table needs; the taper suppresses residual
/// leakage from tails that have not fully decayed.
struct TimeNodes {
    std::vector<double> t, w;
};

inline TimeNodes time_nodes(double t_min, double t_max, int n_t)
{
    n_t = std::max(n_t, 16);
    const double h = (t_max - t_min) / (n_t - 1);
    const double W = 0.05 * (t_max - t_min);
    TimeNodes out;
    out.t.resize(n_t);
    out.w.resize(n_t);
    for (int i = 0; i < n_t; ++i) {
        const double t = t_min + i * h;
        double taper = 1.0;
        const double s = std::min(t - t_min, t_max - t);
        if (s < W) taper = 0.5 * (1.0 - std::cos(std::numbers::pi * s / W));
        out.t[i] = t;
        out.w[i] = h * taper * ((i == 0 || i + 1 == n_t) ? 0.5 : 1.0);
    }
    return out;
}

/// Node count needed so the Nyquist frequency clears omega_max plus the
/// pulse bandwidth, with headroom.
inline int nyquist_nodes(double t_min, double t_max, double omega_max, double pulse_T)
{
    const double band = omega_max + 12.0 / pulse_T;
    return static_cast<int>(std::ceil(1.25 * (t_max - t_min) * band / (2.0 * std::numbers::pi)))
           + 2;
}

} // namespace detail

/// Build the sampled xi~(q, Omega) table for a scenario.
inline SpectralTable build_spectral_table(const ScenarioConfig& cfg, TableGrids grids = {},
                                          int threads = 0)
{
    const double sqrt_eps = std::sqrt(cfg.epsilon_inf);
    if (grids.q_max <= 0.0) grids.q_max = 2.0 * cfg.cutoff_k;
    if (grids.omega_max <= 0.0) grids.omega_max = 1.01 * grids.q_max / sqrt_eps;
    if (grids.n_q <= 0) grids.n_q = std::max(64, 20 * cfg.quadrature.n_k);
    if (grids.n_omega_core <= 0) grids.n_omega_core = std::max(160, cfg.quadrature.n_t);

    SpectralTable tab;
    tab.epsilon_inf = cfg.epsilon_inf;
    tab.cutoff_k = cfg.cutoff_k;
    tab.source_hash = scenario_hash(cfg);

    tab.q_grid.resize(grids.n_q);
    for (int i = 0; i < grids.n_q; ++i)
        tab.q_grid[i] = grids.q_max * i / (grids.n_q - 1);

    // Graded Omega grid: dense on [0, omega_core], coarse tail above.
    const double T = cfg.time_scale();
    double omega_core = std::min(grids.omega_max, 30.0 / T);
    if (omega_core > 0.75 * grids.omega_max) omega_core = grids.omega_max;
    tab.omega_grid.clear();
    for (int i = 0; i < grids.n_omega_core; ++i)
        tab.omega_grid.push_back(omega_core * i / (grids.n_omega_core - 1));
    if (omega_core < grids.omega_max) {
        for (int i = 1; i <= grids.n_omega_tail; ++i)
            tab.omega_grid.push_back(omega_core
                                     + (grids.omega_max - omega_core) * i / grids.n_omega_tail);
    }
    const std::size_t n_w = tab.omega_grid.size();

    // The trapezoid grid must be dense enough that its Nyquist frequency
    // clears omega_max plus the pulse bandwidth; otherwise the high-Omega
    // rows alias low-frequency content into pure noise. Raise the node
    // count silently when the configured n_t falls short. The error pass
    // uses 7/8 of the nodes, which still clears Nyquist (headroom is 25%),
    // so its deviation measures genuine discretization error and not
    // aliasing.
    const int n_needed = detail::nyquist_nodes(cfg.t_min, cfg.t_max, grids.omega_max, T);
    const int n_full = std::max(cfg.quadrature.n_t, n_needed);
    const int n_err = n_full - n_full / 8;
    const auto nodes = detail::time_nodes(cfg.t_min, cfg.t_max, n_full);
    const auto nodes_half = detail::time_nodes(cfg.t_min, cfg.t_max, n_err);
    const std::size_t n_t = nodes.t.size();

    const double dt_node = (cfg.t_max - cfg.t_min) / static_cast<double>(n_t);
    if (dt_node > T / 4.0)
        tab.warning = "time grid too coarse for pulse scale T (node spacing "
                      + std::to_string(dt_node) + " vs T = " + std::to_string(T) + ")";

    tab.values.assign(tab.q_grid.size() * n_w, {0.0, 0.0});
    std::vector<double> err_rows(tab.q_grid.size(), 0.0);

    parallel_for(tab.q_grid.size(), threads, [&](std::size_t iq) {
        const double q = tab.q_grid[iq];
        std::vector<double> f(n_t), fh(nodes_half.t.size());
        double radial_err = 0.0;
        for (std::size_t j = 0; j < n_t; ++j) {
            double e = 0.0;
            f[j] = xi_pulse_radial_ft(cfg, q, nodes.t[j], &e);
            radial_err = std::max(radial_err, e);
        }
        for (std::size_t j = 0; j < fh.size(); ++j)
            fh[j] = xi_pulse_radial_ft(cfg, q, nodes_half.t[j]);
        double row_err = 0.0;
        for (std::size_t iw = 0; iw < n_w; ++iw) {
            const double omega = tab.omega_grid[iw];
            std::complex<double> v = 0.0, vh = 0.0;
            for (std::size_t j = 0; j < n_t; ++j) {
                const double ph = omega * nodes.t[j];
                v += nodes.w[j] * f[j] * std::complex<double>(std::cos(ph), std::sin(ph));
            }
            for (std::size_t j = 0; j < fh.size(); ++j) {
                const double ph = omega * nodes_half.t[j];
                vh += nodes_half.w[j] * fh[j] * std::complex<double>(std::cos(ph), std::sin(ph));
            }
            tab.values[iq * n_w + iw] = v;
            row_err = std::max(row_err, std::abs(v - vh));
        }
        err_rows[iq] = row_err + radial_err * (cfg.t_max - cfg.t_min);
    });
    tab.err_estimate = *std::max_element(err_rows.begin(), err_rows.end());
    return tab;
}

// ---------------------------------------------------------------------------
// Mellin moments and high-order time derivatives
// ---------------------------------------------------------------------------

/// Moments of the squeezing profile,
///   M_n(t) = 4*pi*(-1)^n / (2n+1)! * int_0^inf dr r^{2n+2} xi(r, t),
/// i.e. the coefficient of (k^2)^n in the spherical transform; the sinc
/// series supplies the sign and factorial normalization.
struct MomentSeries {
    int n_max = 2;
    std::vector<double> t_grid; ///< uniform over the scenario window
    std::vector<std::vector<double>> m;        ///< full M_n(t) samples
    std::vector<double> m_static;              ///< frozen-track baseline per n
    std::vector<std::vector<double>> deriv;    ///< d^{4+2n} M_n / dt^{4+2n} samples
    bool closed_form = false;
    /// Closed-form derivative evaluator (order, n, t); empty when the
    /// family has no analytic path.
    std::function<double(int, int, double)> deriv_eval;

    double dt() const { return t_grid[1] - t_grid[0]; }
};

inline double factorial(int n)
{
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

/// Quadrature path for a single moment at one time. Sharp walls split the
/// integrand at the discontinuity.
inline double mellin_moment_quadrature(const ScenarioConfig& cfg, int n, double t)
{
    const double fourpi = 4.0 * std::numbers::pi;
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    const double norm = fourpi * sign / factorial(2 * n + 1);
    auto f = [&](double r) { return std::pow(r, 2 * n + 2) * cfg.eval_xi(r, t); };
    double hi = cfg.support_radius();
    if (cfg.profile.kind == ProfileKind::SharpBubble) {
        const double R = cfg.profile.track.radius(t);
        return norm
               * (integrate_panels(f, uniform_edges(0.0, R, 8), 16)
                  + integrate_panels(f, uniform_edges(R, hi, 2), 8));
    }
    return norm * integrate_panels(f, detail::radial_panel_edges(cfg, t, 0.0, hi, 0.0), 16);
}

/// Closed form for bubble-family moments: M_n = c_n R(t)^{2n+3} with
/// c_n = 4*pi*(-1)^n xi_in / ((2n+1)! (2n+3)). Sharp walls only.
inline double sharp_moment_coefficient(const ScenarioConfig& cfg, int n)
{
    const double xi_in = 0.5 * (1.0 - 1.0 / cfg.epsilon_inf);
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return 4.0 * std::numbers::pi * sign * xi_in / (factorial(2 * n + 1) * (2 * n + 3));
}

/// Spectral differentiation of a uniformly sampled, decaying track.
/// Direct DFT; the track lengths here are small. Throws when the top of
/// the spectrum carries most of the derivative (noise amplification).
inline std::vector<double> spectral_derivative(const std::vector<double>& f, double h, int order,
                                               double noise_tol = 0.5)
{
    const std::size_t n = f.size();
    const double twopi = 2.0 * std::numbers::pi;
    std::vector<std::complex<double>> spec(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double ph = -twopi * static_cast<double>(j) * static_cast<double>(k) / n;
            acc += f[j] * std::complex<double>(std::cos(ph), std::sin(ph));
        }
        spec[k] = acc;
    }
    // Coefficients at the roundoff floor would be amplified by w^order into
    // spurious derivative content; drop them before differentiating.
    double peak = 0.0;
    for (const auto& c : spec) peak = std::max(peak, std::abs(c));
    const double floor = 1e-13 * peak;
    for (auto& c : spec)
        if (std::abs(c) < floor) c = 0.0;
    // Whatever survives near the top of the band is genuine content the
    // grid cannot differentiate reliably.
    double e_top = 0.0, e_tot = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double s = (k <= n / 2) ? static_cast<double>(k) : static_cast<double>(k) - n;
        const double w = twopi * s / (n * h);
        const double contrib = std::norm(spec[k]) * std::pow(std::abs(w), 2 * order);
        e_tot += contrib;
        if (std::abs(s) > 0.45 * n) e_top += contrib;
    }
    if (e_tot > 0.0 && e_top / e_tot > noise_tol)
        throw convergence_error("spectral differentiation: track too noisy for order "
                                + std::to_string(order));
    std::vector<std::complex<double>> coef(n);
    for (std::size_t k = 0; k < n; ++k) {
        double s = (k < n / 2) ? static_cast<double>(k) : static_cast<double>(k) - n;
        if (2 * k == n && order % 2 != 0) s = 0.0; // drop Nyquist for odd orders
        const std::complex<double> iw(0.0, twopi * s / (n * h));
        coef[k] = std::pow(iw, order) * spec[k];
    }
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::complex<double> acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double ph = twopi * static_cast<double>(j) * static_cast<double>(k) / n;
            acc += coef[k] * std::complex<double>(std::cos(ph), std::sin(ph));
        }
        out[j] = acc.real() / static_cast<double>(n);
    }
    return out;
}

/// Assemble the moment series with the derivative tracks needed by the
/// energy series (orders 4 + 2n). Closed-form path for sharp bubbles on a
/// GaussianPulse track; spectral differentiation of the pulse deviation
/// otherwise.
inline MomentSeries mellin_moments(const ScenarioConfig& cfg, int n_max, int n_samples = 1024)
{
    MomentSeries ms;
    ms.n_max = n_max;
    ms.t_grid.resize(n_samples);
    for (int j = 0; j < n_samples; ++j)
        ms.t_grid[j] = cfg.t_min + (cfg.t_max - cfg.t_min) * j / (n_samples - 1);

    const bool sharp = cfg.profile.kind == ProfileKind::SharpBubble;
    ms.m.resize(n_max + 1);
    ms.m_static.resize(n_max + 1);
    ms.deriv.resize(n_max + 1);
    for (int n = 0; n <= n_max; ++n) {
        ms.m[n].resize(n_samples);
        if (sharp) {
            const double c = sharp_moment_coefficient(cfg, n);
            for (int j = 0; j < n_samples; ++j)
                ms.m[n][j] = c * std::pow(cfg.profile.track.radius(ms.t_grid[j]), 2 * n + 3);
            ms.m_static[n] = c * std::pow(cfg.profile.track.R0, 2 * n + 3);
        } else {
            for (int j = 0; j < n_samples; ++j)
                ms.m[n][j] = mellin_moment_quadrature(cfg, n, ms.t_grid[j]);
            // baseline: moment of the frozen-track profile
            const double fourpi = 4.0 * std::numbers::pi;
            const double sign = (n % 2 == 0) ? 1.0 : -1.0;
            auto fs = [&](double r) { return std::pow(r, 2 * n + 2) * cfg.xi_static(r); };
            ms.m_static[n] =
                fourpi * sign / factorial(2 * n + 1)
                * integrate_panels(
                    fs, detail::radial_panel_edges(cfg, cfg.t_min, 0.0, cfg.support_radius(), 0.0),
                    16);
        }
    }

    if (sharp && cfg.profile.track.has_closed_form_derivatives()) {
        ms.closed_form = true;
        const double eps_inf = cfg.epsilon_inf;
        const RadiusTrack track = cfg.profile.track;
        ms.deriv_eval = [eps_inf, track](int n, int order, double t) {
            const double xi_in = 0.5 * (1.0 - 1.0 / eps_inf);
            const double sign = (n % 2 == 0) ? 1.0 : -1.0;
            const double c = 4.0 * std::numbers::pi * sign * xi_in
                             / (factorial(2 * n + 1) * (2 * n + 3));
            return c * track.radius_power_derivative(2 * n + 3, order, t);
        };
        for (int n = 0; n <= n_max; ++n) {
            ms.deriv[n].resize(n_samples);
            for (int j = 0; j < n_samples; ++j)
                ms.deriv[n][j] = ms.deriv_eval(n, 4 + 2 * n, ms.t_grid[j]);
        }
    } else {
        for (int n = 0; n <= n_max; ++n) {
            std::vector<double> dev(n_samples);
            for (int j = 0; j < n_samples; ++j) dev[j] = ms.m[n][j] - ms.m_static[n];
            ms.deriv[n] = spectral_derivative(dev, ms.dt(), 4 + 2 * n);
        }
    }
    return ms;
}

} // namespace qrad
