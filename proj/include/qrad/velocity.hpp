#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "qrad/errors.hpp"
#include "qrad/quadrature.hpp"
#include "qrad/scenario.hpp"
#include "qrad/transforms.hpp"

namespace qrad {

// Velocity-profile diagnostics. Only the on-shell Fourier transform is
// computed and classified here; the velocity term's photon spectrum is
// out of reach of the squeezing-only response reduction and is not
// attempted.

enum class VelocityClass { Localized, Divergent, RigidFirstOrderNull };

inline const char* to_string(VelocityClass c)
{
    switch (c) {
    case VelocityClass::Localized: return "Localized";
    case VelocityClass::Divergent: return "Divergent";
    case VelocityClass::RigidFirstOrderNull: return "RigidFirstOrderNull";
    }
    return "?";
}

struct VelocityFt {
    std::complex<double> longitudinal = 0.0; ///< component along k-hat, without the overall i
    double err = 0.0;
    bool rigid_null = false;
    double truncation_radius = 0.0; ///< L actually used (UniformRadial only)
};

/// Spatial reduced transform of a radial vector field f(r) e_r:
///   int d^3r e^{i k.r} f(r) e_r = i k-hat * 4 pi int dr r^2 f(r) j1(k r).
/// The UniformRadial case does not decay; it is truncated at r = L with L
/// snapped to an antinode of j0(kL) so the k-halving sweep is not sitting
/// on an oscillation zero.
inline double velocity_spatial_ft(const ScenarioConfig& cfg, double k, double t,
                                  double L_request, double* L_used = nullptr)
{
    const VelocityProfile& v = *cfg.velocity;
    const double fourpi = 4.0 * std::numbers::pi;
    switch (v.kind) {
    case VelocityKind::IncompressibleAroundBubble: {
        const double R = cfg.profile.track.radius(t);
        const double rdot = cfg.profile.track.radius_dot(t);
        // interior: f = rdot r / R, quadrature; exterior: closed form
        //   int_R^inf j1(kr) dr = j0(kR)/k.
        const double interior = integrate_panels(
            [&](double r) { return r * r * (rdot * r / R) * sph_j1(k * r); },
            uniform_edges(0.0, R, std::max(2, static_cast<int>(k * R / std::numbers::pi) + 2)),
            16);
        const double exterior = rdot * R * R * sph_j0(k * R) / k;
        if (L_used) *L_used = 0.0;
        return fourpi * (interior + exterior);
    }
    case VelocityKind::UniformRadial: {
        const double rdot = cfg.profile.track.radius_dot(t);
        // snap L to sin(kL) = +-1 to avoid sampling j0 zeros in sweeps
        const double pi = std::numbers::pi;
        const double L = (std::floor(k * L_request / pi) + 0.5) * pi / k;
        if (L_used) *L_used = L;
        // int_0^L r^2 j1(kr) dr = -L^2 j0(kL)/k + 2 (1 - cos kL)/k^3
        const double I = -L * L * sph_j0(k * L) / k + 2.0 * (1.0 - std::cos(k * L)) / (k * k * k);
        return fourpi * rdot * I;
    }
    case VelocityKind::RigidTranslation:
        throw validation_error("rigid translation has no reduced radial transform");
    }
    return 0.0;
}

/// On-shell 4D transform of the velocity field, longitudinal component:
///   beta~(k k-hat, omega_k) = i k-hat int dt e^{i omega_k t} S(k, t),
/// omega_k = k / sqrt(eps_inf). Rigid translation short-circuits to the
/// first-order null result.
inline VelocityFt velocity_ft(const ScenarioConfig& cfg, double k, double L_request = 0.0)
{
    if (!cfg.velocity) throw validation_error("scenario has no velocity profile");
    if (k <= 0.0) throw validation_error("velocity_ft requires k > 0");
    VelocityFt out;
    if (cfg.velocity->kind == VelocityKind::RigidTranslation) {
        out.rigid_null = true;
        return out;
    }
    if (L_request <= 0.0) L_request = 200.0 * cfg.support_radius();
    const double omega = k / std::sqrt(cfg.epsilon_inf);
    const auto nodes = detail::time_nodes(cfg.t_min, cfg.t_max, cfg.quadrature.n_t);
    const auto nodes_half = detail::time_nodes(cfg.t_min, cfg.t_max, cfg.quadrature.n_t / 2);
    double L_used = 0.0;
    auto accumulate = [&](const detail::TimeNodes& nd) {
        std::complex<double> acc = 0.0;
        for (std::size_t j = 0; j < nd.t.size(); ++j) {
            const double S = velocity_spatial_ft(cfg, k, nd.t[j], L_request, &L_used);
            const double ph = omega * nd.t[j];
            acc += nd.w[j] * S * std::complex<double>(std::cos(ph), std::sin(ph));
        }
        return acc;
    };
    const std::complex<double> fine = accumulate(nodes);
    out.longitudinal = fine;
    out.err = std::abs(fine - accumulate(nodes_half));
    out.truncation_radius = L_used;
    return out;
}

struct VelocityDiagnostics {
    std::vector<double> k_samples;
    std::vector<double> ft_magnitudes;
    std::vector<double> ft_errors;
    double low_k_exponent = 0.0;
    VelocityClass classification = VelocityClass::Localized;
    double magnitude_scale = 0.0; ///< |beta~| at the smallest sampled k
    bool omega4_prediction = false;
    std::string order_note;
    std::vector<double> truncation_sweep; ///< |beta~(k_min)| at L, 2L, 4L (divergent case)
};

/// Classify a velocity profile from the small-k behavior of its on-shell
/// transform. Localized profiles approach a finite k -> 0 limit and carry
/// the omega^4 spectral prediction; divergent ones (growth > 50% per
/// k-halving) do not; rigid motion is null at first order in beta.
inline VelocityDiagnostics classify_profile(const ScenarioConfig& cfg, double k_hi = 0.0,
                                            int halvings = 5)
{
    if (!cfg.velocity) throw validation_error("scenario has no velocity profile");
    VelocityDiagnostics d;
    if (cfg.velocity->kind == VelocityKind::RigidTranslation) {
        d.classification = VelocityClass::RigidFirstOrderNull;
        d.order_note = "no photon production at O(beta); N_k = O(beta^4)";
        return d;
    }
    // The sweep must sit in the small-k asymptotic regime in both senses:
    // k R_max small (spatial) and omega_k T small (on-shell temporal),
    // else the pulse's Gaussian frequency falloff masquerades as growth.
    if (k_hi <= 0.0)
        k_hi = std::min(0.2 / cfg.max_radius(),
                        0.2 * std::sqrt(cfg.epsilon_inf) / cfg.time_scale());
    const double L0 = 200.0 * cfg.support_radius();
    for (int j = 0; j <= halvings; ++j) {
        const double k = k_hi * std::ldexp(1.0, -j);
        const VelocityFt ft = velocity_ft(cfg, k, L0);
        d.k_samples.push_back(k);
        d.ft_magnitudes.push_back(std::abs(ft.longitudinal));
        d.ft_errors.push_back(ft.err);
    }
    d.magnitude_scale = d.ft_magnitudes.back();

    // log-log slope over the sweep
    const std::size_t n = d.k_samples.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(d.k_samples[i]);
        const double y = std::log(std::max(d.ft_magnitudes[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    d.low_k_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);

    // growth per halving of k (k decreasing along the sweep)
    double max_growth = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        max_growth = std::max(max_growth, d.ft_magnitudes[i + 1] / d.ft_magnitudes[i]);
    const double eps_fit = 0.2;
    if (d.low_k_exponent < -eps_fit && max_growth > 1.5) {
        d.classification = VelocityClass::Divergent;
        // Demonstrate the divergence in the truncation radius as well. The
        // radii are taken at antinodes n, 2n, 4n of the oscillatory factor
        // so the snapping inside velocity_spatial_ft cannot collapse them
        // onto one another at small k.
        // Radii sit at kL = (2m + 1/2) pi, all in the same phase class of
        // the oscillatory factor, so the values grow monotonically with L
        // instead of beating against the cosine term.
        const double k_s = d.k_samples.front();
        const long m0 = std::max(1L, std::lround(k_s * L0 / (2.0 * std::numbers::pi)));
        for (long m : {m0, 2 * m0, 4 * m0}) {
            const double L = (2.0 * static_cast<double>(m) + 0.5) * std::numbers::pi / k_s;
            d.truncation_sweep.push_back(std::abs(velocity_ft(cfg, k_s, L).longitudinal));
        }
    } else {
        d.classification = VelocityClass::Localized;
        d.omega4_prediction = true;
    }
    return d;
}

} // namespace qrad
