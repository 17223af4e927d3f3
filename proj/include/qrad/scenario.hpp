#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrad/errors.hpp"

namespace qrad {

// Natural units throughout: hbar = c = eps0 = mu0 = 1. One base length
// unit; times share it; energies are inverse lengths.

enum class ProfileKind { SharpBubble, SmoothBubble, GaussianBlob };
enum class TrackKind { GaussianPulse, CompactBump };
enum class VelocityKind { IncompressibleAroundBubble, UniformRadial, RigidTranslation };

/// Physicists' Hermite polynomial H_m(x), by recurrence.
inline double hermite(int m, double x)
{
    double h0 = 1.0, h1 = 2.0 * x;
    if (m == 0) return h0;
    if (m == 1) return h1;
    for (int k = 2; k <= m; ++k) {
        double h2 = 2.0 * x * h1 - 2.0 * (k - 1) * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

/// Bubble radius as a function of time. Both families are smooth and
/// return to the base radius R0 away from the pulse.
struct RadiusTrack {
    TrackKind kind = TrackKind::GaussianPulse;
    double R0 = 1.0;   ///< base radius
    double dR = 0.0;   ///< pulse excursion (may be negative)
    double T = 10.0;   ///< pulse time scale
    double t0 = 0.0;   ///< pulse center

    /// Pulse shape g(t) with g -> 0 away from t0, peak 1.
    double pulse(double t) const
    {
        const double x = (t - t0) / T;
        switch (kind) {
        case TrackKind::GaussianPulse:
            return std::exp(-x * x);
        case TrackKind::CompactBump:
            if (std::abs(x) >= 1.0) return 0.0;
            return std::exp(1.0 - 1.0 / (1.0 - x * x));
        }
        return 0.0;
    }

    double radius(double t) const { return R0 + dR * pulse(t); }

    double radius_dot(double t) const
    {
        const double x = (t - t0) / T;
        switch (kind) {
        case TrackKind::GaussianPulse:
            return dR * (-2.0 * x / T) * std::exp(-x * x);
        case TrackKind::CompactBump: {
            if (std::abs(x) >= 1.0) return 0.0;
            const double d = 1.0 - x * x;
            return dR * std::exp(1.0 - 1.0 / d) * (-2.0 * x / (d * d)) / T;
        }
        }
        return 0.0;
    }

    double max_radius_dot() const
    {
        // GaussianPulse: |g'| peaks at x = 1/sqrt(2).
        if (kind == TrackKind::GaussianPulse)
            return std::abs(dR) * std::sqrt(2.0 / std::numbers::e) / T;
        // CompactBump: scan once, the shape is fixed.
        double m = 0.0;
        for (int i = 0; i <= 400; ++i) {
            double t = t0 + T * (-1.0 + 2.0 * i / 400.0);
            m = std::max(m, std::abs(radius_dot(t)));
        }
        return m;
    }

    bool has_closed_form_derivatives() const { return kind == TrackKind::GaussianPulse; }

    /// d^order/dt^order of pulse(t)^p for the GaussianPulse family:
    /// exp(-p x^2) differentiates to Hermite-polynomial closed forms.
    double pulse_power_derivative(int p, int order, double t) const
    {
        const double x = (t - t0) / T;
        const double a = std::sqrt(static_cast<double>(p)) / T;
        const double s = (order % 2 == 0) ? 1.0 : -1.0;
        return s * std::pow(a, order) * hermite(order, a * (t - t0)) * std::exp(-p * x * x);
    }

    /// d^order/dt^order of R(t)^p (integer p >= 1), closed form
    /// (GaussianPulse only): binomial expansion in powers of the pulse.
    double radius_power_derivative(int p, int order, double t) const
    {
        if (order == 0) return std::pow(radius(t), p);
        double sum = 0.0;
        double binom = 1.0;
        for (int j = 1; j <= p; ++j) {
            binom = binom * (p - j + 1) / j;
            sum += binom * std::pow(R0, p - j) * std::pow(dR, j)
                   * pulse_power_derivative(j, order, t);
        }
        return sum;
    }
};

struct DielectricProfile {
    ProfileKind kind = ProfileKind::SharpBubble;
    RadiusTrack track;        ///< bubbles
    double wall_width = 0.0;  ///< SmoothBubble wall width delta
    double amp = 0.0;         ///< GaussianBlob amplitude (epsilon deficit)
    double length = 1.0;      ///< GaussianBlob length scale
    double T = 10.0;          ///< GaussianBlob time scale
    double t0 = 0.0;          ///< GaussianBlob time center
};

struct VelocityProfile {
    VelocityKind kind = VelocityKind::IncompressibleAroundBubble;
    std::array<double, 3> beta = {0.0, 0.0, 0.0}; ///< rigid-case amplitude vector
    double T = 10.0;                              ///< rigid-case envelope time scale
    double t0 = 0.0;
    double beta_max_limit = 0.1;                  ///< validation threshold
};

struct QuadratureSettings {
    int n_k = 16;       ///< Gauss order per panel in momentum integrals
    int n_mu = 32;      ///< Gauss order for the angular variable
    int n_t = 192;      ///< temporal quadrature nodes for the spectral table
    double tol = 1e-6;
};

struct ScenarioConfig {
    double epsilon_inf = 1.0;
    DielectricProfile profile;
    std::optional<VelocityProfile> velocity;
    double cutoff_k = 1.0;
    double t_min = 0.0, t_max = 1.0;
    QuadratureSettings quadrature;
    std::string units_note;
    nlohmann::json potential_probe; ///< optional embedded elliptic problem spec

    /// Smooth monotone wall ramp, 0 -> 1 over unit argument scale.
    static double wall_ramp(double x) { return 0.5 * (1.0 + std::tanh(2.0 * x)); }

    /// Dielectric function at the bubble/blob instant state.
    double epsilon_at(double r, double t) const
    {
        switch (profile.kind) {
        case ProfileKind::SharpBubble:
            return r < profile.track.radius(t) ? 1.0 : epsilon_inf;
        case ProfileKind::SmoothBubble: {
            const double R = profile.track.radius(t);
            const double w = wall_ramp((R - r) / profile.wall_width);
            return epsilon_inf + (1.0 - epsilon_inf) * w;
        }
        case ProfileKind::GaussianBlob: {
            const double u = (t - profile.t0) / profile.T;
            return epsilon_inf
                   - profile.amp * std::exp(-(r * r) / (profile.length * profile.length) - u * u);
        }
        }
        return epsilon_inf;
    }

    /// Squeezing function xi(r,t) = (1/eps(r,t) - 1/eps_inf)/2.
    double eval_xi(double r, double t) const
    {
        return 0.5 * (1.0 / epsilon_at(r, t) - 1.0 / epsilon_inf);
    }

    /// Baseline squeezing profile with the radius track frozen at R0.
    /// Zero for the blob family (it already vanishes at t -> +-inf).
    double xi_static(double r) const
    {
        if (profile.kind == ProfileKind::GaussianBlob) return 0.0;
        switch (profile.kind) {
        case ProfileKind::SharpBubble: {
            const double xi_in = 0.5 * (1.0 - 1.0 / epsilon_inf);
            return r < profile.track.R0 ? xi_in : 0.0;
        }
        case ProfileKind::SmoothBubble: {
            const double w = wall_ramp((profile.track.R0 - r) / profile.wall_width);
            const double eps = epsilon_inf + (1.0 - epsilon_inf) * w;
            return 0.5 * (1.0 / eps - 1.0 / epsilon_inf);
        }
        default:
            return 0.0;
        }
    }

    /// Pulse part of the squeezing function: the deviation from the
    /// frozen-track baseline. This is the disturbance that vanishes for
    /// t -> +-inf even when R0 > 0 leaves a static bubble behind, and it
    /// is what the spectral table and all response integrals consume.
    double eval_xi_pulse(double r, double t) const { return eval_xi(r, t) - xi_static(r); }

    /// Radial interval outside which the pulse part of xi is negligible.
    std::array<double, 2> xi_pulse_support() const
    {
        if (profile.kind == ProfileKind::GaussianBlob)
            return {0.0, 7.0 * profile.length};
        const RadiusTrack& tr = profile.track;
        const double r_lo = std::min(tr.R0, tr.R0 + std::min(0.0, tr.dR));
        const double r_hi = std::max(tr.R0, tr.R0 + std::max(0.0, tr.dR));
        const double pad = 9.0 * profile.wall_width;
        return {std::max(0.0, r_lo - pad), r_hi + pad};
    }

    /// Radial extent of the full disturbance (eps != eps_inf region).
    double support_radius() const
    {
        if (profile.kind == ProfileKind::GaussianBlob) return 7.0 * profile.length;
        const RadiusTrack& tr = profile.track;
        return tr.R0 + std::max(0.0, tr.dR) + 9.0 * profile.wall_width;
    }

    /// Shortest declared time scale of the disturbance.
    double time_scale() const
    {
        return profile.kind == ProfileKind::GaussianBlob ? profile.T : profile.track.T;
    }

    double pulse_center() const
    {
        return profile.kind == ProfileKind::GaussianBlob ? profile.t0 : profile.track.t0;
    }

    double max_radius() const
    {
        if (profile.kind == ProfileKind::GaussianBlob) return profile.length;
        return profile.track.R0 + std::max(0.0, profile.track.dR);
    }

    /// Velocity field in units of c. Radial families point along e_r;
    /// the returned vector is beta at position r*direction.
    std::array<double, 3> eval_beta(const std::array<double, 3>& pos, double t) const
    {
        if (!velocity)
            throw validation_error("scenario has no velocity profile");
        const VelocityProfile& v = *velocity;
        const double r = std::sqrt(pos[0] * pos[0] + pos[1] * pos[1] + pos[2] * pos[2]);
        switch (v.kind) {
        case VelocityKind::RigidTranslation: {
            const double u = (t - v.t0) / v.T;
            const double env = std::exp(-u * u);
            return {v.beta[0] * env, v.beta[1] * env, v.beta[2] * env};
        }
        case VelocityKind::UniformRadial: {
            const double rdot = profile.track.radius_dot(t);
            if (r == 0.0) return {0.0, 0.0, 0.0};
            return {rdot * pos[0] / r, rdot * pos[1] / r, rdot * pos[2] / r};
        }
        case VelocityKind::IncompressibleAroundBubble: {
            const double R = profile.track.radius(t);
            const double rdot = profile.track.radius_dot(t);
            double f;
            if (r >= R)
                f = rdot * R * R / (r * r);
            else
                f = rdot * r / R; // interior continuation, matches wall speed at r = R
            if (r == 0.0) return {0.0, 0.0, 0.0};
            return {f * pos[0] / r, f * pos[1] / r, f * pos[2] / r};
        }
        }
        return {0.0, 0.0, 0.0};
    }

    void validate() const
    {
        if (epsilon_inf < 1.0)
            throw validation_error("epsilon_inf must be >= 1");
        if (cutoff_k <= 0.0)
            throw validation_error("cutoff_k must be > 0");
        if (!(t_min < t_max))
            throw validation_error("time_window must satisfy t_min < t_max");
        if (profile.kind != ProfileKind::GaussianBlob) {
            const RadiusTrack& tr = profile.track;
            if (tr.T <= 0.0) throw validation_error("radius track requires T > 0");
            if (tr.R0 < 0.0) throw validation_error("base radius R0 must be >= 0");
            if (tr.R0 + std::min(0.0, tr.dR) < 0.0)
                throw validation_error("R(t) must stay nonnegative: R0 + min(0, dR) < 0");
        }
        if (profile.kind == ProfileKind::SmoothBubble && profile.wall_width <= 0.0)
            throw validation_error("SmoothBubble requires wall_width > 0");
        if (profile.kind == ProfileKind::GaussianBlob) {
            if (profile.amp < 0.0 || profile.amp > epsilon_inf - 1.0)
                throw validation_error("GaussianBlob amplitude must lie in [0, epsilon_inf - 1]");
            if (profile.length <= 0.0 || profile.T <= 0.0)
                throw validation_error("GaussianBlob requires positive length and time scales");
        }
        if (velocity) {
            const VelocityProfile& v = *velocity;
            double beta_peak = 0.0;
            if (v.kind == VelocityKind::RigidTranslation)
                beta_peak = std::sqrt(v.beta[0] * v.beta[0] + v.beta[1] * v.beta[1]
                                      + v.beta[2] * v.beta[2]);
            else
                beta_peak = profile.track.max_radius_dot();
            if (beta_peak > v.beta_max_limit) {
                std::ostringstream os;
                os << "velocity exceeds nonrelativistic bound: max|beta| = " << beta_peak
                   << " > " << v.beta_max_limit;
                throw validation_error(os.str());
            }
        }
        if (quadrature.n_k < 2 || quadrature.n_mu < 2 || quadrature.n_t < 8)
            throw validation_error("quadrature grid sizes too small");
        if (quadrature.tol <= 0.0)
            throw validation_error("quadrature tol must be > 0");
    }
};

namespace detail {

inline void check_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                       const std::string& where, bool lax)
{
    if (lax) return;
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const auto& k : allowed)
            if (it.key() == k) { ok = true; break; }
        if (!ok)
            throw parse_error("unknown key '" + it.key() + "' in " + where
                              + " (pass --lax to ignore)");
    }
}

inline double get_num(const nlohmann::json& j, const std::string& key, double fallback)
{
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw parse_error("key '" + key + "' must be a number");
    return j[key].get<double>();
}

} // namespace detail

/// Parse a scenario from its JSON form. Unknown keys are an error unless
/// lax is set.
inline ScenarioConfig parse_scenario(const nlohmann::json& j, bool lax = false)
{
    detail::check_keys(j,
                       {"epsilon_inf", "profile", "velocity", "cutoff_k", "time_window",
                        "quadrature", "units_note", "potential_probe"},
                       "scenario", lax);
    ScenarioConfig cfg;
    if (!j.contains("epsilon_inf")) throw parse_error("scenario requires epsilon_inf");
    cfg.epsilon_inf = detail::get_num(j, "epsilon_inf", 1.0);
    if (!j.contains("profile")) throw parse_error("scenario requires a profile block");
    const nlohmann::json& p = j["profile"];
    const std::string kind = p.value("kind", "");
    if (kind == "SharpBubble" || kind == "SmoothBubble") {
        detail::check_keys(p, {"kind", "track", "R0", "dR", "T", "t0", "wall_width"},
                           "profile", lax);
        cfg.profile.kind =
            kind == "SharpBubble" ? ProfileKind::SharpBubble : ProfileKind::SmoothBubble;
        RadiusTrack& tr = cfg.profile.track;
        const std::string track = p.value("track", "GaussianPulse");
        if (track == "GaussianPulse")
            tr.kind = TrackKind::GaussianPulse;
        else if (track == "CompactBump")
            tr.kind = TrackKind::CompactBump;
        else
            throw parse_error("unknown radius track '" + track + "'");
        if (!p.contains("R0") || !p.contains("T"))
            throw parse_error("bubble profile requires R0 and T");
        tr.R0 = detail::get_num(p, "R0", 1.0);
        tr.dR = detail::get_num(p, "dR", 0.0);
        tr.T = detail::get_num(p, "T", 10.0);
        tr.t0 = detail::get_num(p, "t0", 0.0);
        cfg.profile.wall_width = detail::get_num(p, "wall_width", 0.05 * tr.R0);
        if (cfg.profile.kind == ProfileKind::SharpBubble) cfg.profile.wall_width = 0.0;
    } else if (kind == "GaussianBlob") {
        detail::check_keys(p, {"kind", "amp", "length", "T", "t0"}, "profile", lax);
        cfg.profile.kind = ProfileKind::GaussianBlob;
        cfg.profile.amp = detail::get_num(p, "amp", 0.0);
        cfg.profile.length = detail::get_num(p, "length", 1.0);
        cfg.profile.T = detail::get_num(p, "T", 10.0);
        cfg.profile.t0 = detail::get_num(p, "t0", 0.0);
    } else {
        throw parse_error("unknown profile kind '" + kind + "'");
    }

    if (j.contains("velocity") && !j["velocity"].is_null()) {
        const nlohmann::json& v = j["velocity"];
        detail::check_keys(v, {"kind", "beta", "T", "t0", "beta_max"}, "velocity", lax);
        VelocityProfile vp;
        const std::string vk = v.value("kind", "");
        if (vk == "IncompressibleAroundBubble")
            vp.kind = VelocityKind::IncompressibleAroundBubble;
        else if (vk == "UniformRadial")
            vp.kind = VelocityKind::UniformRadial;
        else if (vk == "RigidTranslation")
            vp.kind = VelocityKind::RigidTranslation;
        else
            throw parse_error("unknown velocity kind '" + vk + "'");
        if (v.contains("beta")) {
            const auto& b = v["beta"];
            if (!b.is_array() || b.size() != 3)
                throw parse_error("velocity beta must be a 3-vector");
            for (int i = 0; i < 3; ++i) vp.beta[i] = b[i].get<double>();
        }
        vp.T = detail::get_num(v, "T", cfg.profile.track.T);
        vp.t0 = detail::get_num(v, "t0", cfg.profile.track.t0);
        vp.beta_max_limit = detail::get_num(v, "beta_max", 0.1);
        cfg.velocity = vp;
    }

    const double T = cfg.time_scale();
    const double t0 = cfg.pulse_center();
    cfg.cutoff_k = detail::get_num(j, "cutoff_k", 4.0 / std::max(cfg.max_radius(), 1e-12));
    if (j.contains("time_window")) {
        const auto& w = j["time_window"];
        if (!w.is_array() || w.size() != 2)
            throw parse_error("time_window must be [t_min, t_max]");
        cfg.t_min = w[0].get<double>();
        cfg.t_max = w[1].get<double>();
    } else {
        cfg.t_min = t0 - 5.0 * T;
        cfg.t_max = t0 + 5.0 * T;
    }
    if (j.contains("quadrature")) {
        const nlohmann::json& q = j["quadrature"];
        detail::check_keys(q, {"n_k", "n_mu", "n_t", "tol"}, "quadrature", lax);
        cfg.quadrature.n_k = static_cast<int>(detail::get_num(q, "n_k", 16));
        cfg.quadrature.n_mu = static_cast<int>(detail::get_num(q, "n_mu", 32));
        cfg.quadrature.n_t = static_cast<int>(detail::get_num(q, "n_t", 192));
        cfg.quadrature.tol = detail::get_num(q, "tol", 1e-6);
    }
    cfg.units_note = j.value("units_note", "natural units: hbar = c = eps0 = mu0 = 1");
    if (j.contains("potential_probe")) cfg.potential_probe = j["potential_probe"];

    cfg.validate();
    return cfg;
}

/// Canonical JSON snapshot of a config (sorted keys, fixed field set).
/// Used for output headers and the run manifest.
inline nlohmann::json scenario_to_json(const ScenarioConfig& cfg)
{
    nlohmann::json j;
    j["epsilon_inf"] = cfg.epsilon_inf;
    nlohmann::json p;
    switch (cfg.profile.kind) {
    case ProfileKind::SharpBubble:
    case ProfileKind::SmoothBubble:
        p["kind"] = cfg.profile.kind == ProfileKind::SharpBubble ? "SharpBubble" : "SmoothBubble";
        p["track"] = cfg.profile.track.kind == TrackKind::GaussianPulse ? "GaussianPulse"
                                                                        : "CompactBump";
        p["R0"] = cfg.profile.track.R0;
        p["dR"] = cfg.profile.track.dR;
        p["T"] = cfg.profile.track.T;
        p["t0"] = cfg.profile.track.t0;
        p["wall_width"] = cfg.profile.wall_width;
        break;
    case ProfileKind::GaussianBlob:
        p["kind"] = "GaussianBlob";
        p["amp"] = cfg.profile.amp;
        p["length"] = cfg.profile.length;
        p["T"] = cfg.profile.T;
        p["t0"] = cfg.profile.t0;
        break;
    }
    j["profile"] = p;
    if (cfg.velocity) {
        nlohmann::json v;
        switch (cfg.velocity->kind) {
        case VelocityKind::IncompressibleAroundBubble: v["kind"] = "IncompressibleAroundBubble"; break;
        case VelocityKind::UniformRadial: v["kind"] = "UniformRadial"; break;
        case VelocityKind::RigidTranslation: v["kind"] = "RigidTranslation"; break;
        }
        v["beta"] = cfg.velocity->beta;
        v["T"] = cfg.velocity->T;
        v["t0"] = cfg.velocity->t0;
        v["beta_max"] = cfg.velocity->beta_max_limit;
        j["velocity"] = v;
    }
    j["cutoff_k"] = cfg.cutoff_k;
    j["time_window"] = {cfg.t_min, cfg.t_max};
    j["quadrature"] = {{"n_k", cfg.quadrature.n_k},
                       {"n_mu", cfg.quadrature.n_mu},
                       {"n_t", cfg.quadrature.n_t},
                       {"tol", cfg.quadrature.tol}};
    j["units_note"] = cfg.units_note;
    if (!cfg.potential_probe.is_null()) j["potential_probe"] = cfg.potential_probe;
    return j;
}

/// FNV-1a hash of the canonical snapshot; stable across runs and platforms.
inline std::string scenario_hash(const ScenarioConfig& cfg)
{
    const std::string s = scenario_to_json(cfg).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

/// Rescale all lengths and times by s (natural units: they share one
/// unit). Wavenumbers scale by 1/s; dimensionless fields are untouched.
/// Energies computed from the rescaled scenario scale by 1/s.
inline ScenarioConfig rescale_scenario(ScenarioConfig cfg, double s)
{
    if (s <= 0.0) throw validation_error("rescale factor must be > 0");
    RadiusTrack& tr = cfg.profile.track;
    tr.R0 *= s;
    tr.dR *= s;
    tr.T *= s;
    tr.t0 *= s;
    cfg.profile.wall_width *= s;
    cfg.profile.length *= s;
    cfg.profile.T *= s;
    cfg.profile.t0 *= s;
    if (cfg.velocity) {
        cfg.velocity->T *= s;
        cfg.velocity->t0 *= s;
    }
    cfg.cutoff_k /= s;
    cfg.t_min *= s;
    cfg.t_max *= s;
    return cfg;
}

/// Load and validate a scenario file.
inline ScenarioConfig load_scenario(const std::string& path, bool lax = false)
{
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open scenario file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error("malformed scenario file " + path + ": " + e.what());
    }
    return parse_scenario(j, lax);
}

} // namespace qrad
