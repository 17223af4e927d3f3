#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include "qrad/errors.hpp"

namespace qrad {

/// One Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

/// Nodes and weights via Newton iteration on P_n; cached per order.
inline const GaussRule& gauss_legendre(int n)
{
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-based initial guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Legendre recurrence for P_n(x) and P_{n-1}(x).
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.x[i] = -x;
        rule.x[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.w[i] = w;
        rule.w[n - 1 - i] = w;
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

/// Single-panel Gauss-Legendre integral of f over [a, b].
template <class F>
double integrate_gl(F&& f, double a, double b, int n)
{
    const GaussRule& rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += rule.w[i] * f(mid + half * rule.x[i]);
    return sum * half;
}

/// Composite rule over an explicit panel decomposition [edges[i], edges[i+1]].
template <class F>
double integrate_panels(F&& f, const std::vector<double>& edges, int n)
{
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        sum += integrate_gl(f, edges[i], edges[i + 1], n);
    return sum;
}

/// Uniform panel edges.
inline std::vector<double> uniform_edges(double a, double b, int panels)
{
    std::vector<double> e(panels + 1);
    for (int i = 0; i <= panels; ++i) e[i] = a + (b - a) * i / panels;
    return e;
}

/// Geometrically graded edges clustering at a: [a, a+w/2^L, ..., a+w/2, b].
inline std::vector<double> graded_edges(double a, double b, int levels)
{
    std::vector<double> e;
    e.push_back(a);
    for (int j = levels; j >= 1; --j) e.push_back(a + (b - a) * std::ldexp(1.0, -j));
    e.push_back(b);
    return e;
}

/// Adaptive quadrature by panel bisection; an embedded lower-order rule
/// supplies the error estimate. Throws convergence_error if the budget
/// of subdivisions is exhausted before reaching tol.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double tol,
                          double* err_out = nullptr, int max_depth = 40)
{
    struct Frame {
        double a, b, tol;
        int depth;
    };
    double total = 0.0, err_total = 0.0;
    std::vector<Frame> stack{{a, b, tol, 0}};
    while (!stack.empty()) {
        Frame fr = stack.back();
        stack.pop_back();
        double coarse = integrate_gl(f, fr.a, fr.b, 7);
        double fine = integrate_gl(f, fr.a, fr.b, 15);
        double err = std::abs(fine - coarse);
        if (err <= fr.tol || err <= 1e-16 * std::abs(fine)) {
            total += fine;
            err_total += err;
            continue;
        }
        if (fr.depth >= max_depth)
            throw convergence_error("adaptive quadrature: max depth reached, residual error "
                                    + std::to_string(err));
        double mid = 0.5 * (fr.a + fr.b);
        stack.push_back({fr.a, mid, 0.5 * fr.tol, fr.depth + 1});
        stack.push_back({mid, fr.b, 0.5 * fr.tol, fr.depth + 1});
    }
    if (err_out) *err_out = err_total;
    return total;
}

/// sin(x)/x with the removable singularity filled in.
inline double sinc(double x)
{
    if (std::abs(x) < 1e-4) {
        double x2 = x * x;
        return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
    }
    return std::sin(x) / x;
}

/// Spherical Bessel j0.
inline double sph_j0(double x) { return sinc(x); }

/// Spherical Bessel j1 = sin(x)/x^2 - cos(x)/x, series near 0.
inline double sph_j1(double x)
{
    if (std::abs(x) < 1e-3) {
        double x2 = x * x;
        return x / 3.0 * (1.0 - x2 / 10.0 * (1.0 - x2 / 28.0));
    }
    return std::sin(x) / (x * x) - std::cos(x) / x;
}

} // namespace qrad
