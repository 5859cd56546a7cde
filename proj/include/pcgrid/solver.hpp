#pragma once

// Fixed-step backward-Euler integration of G x + C dx/dt = u(t).

#include "pcgrid/sparse.hpp"

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace pcgrid {

/// Writes u(t) into `out`.
using RhsFunction = std::function<void(double t, std::span<double> out)>;

/// Called with the step index, its time and the solution; step 0 is x0.
using StepObserver = std::function<void(std::size_t step, double t, std::span<const double> x)>;

/// Number of steps of size h needed to reach t_end.
inline std::size_t step_count(double h, double t_end) {
    if (!(h > 0.0)) throw std::invalid_argument("time step must be positive");
    if (t_end < h * (1.0 - 1e-9)) throw std::invalid_argument("t_end must be at least one step");
    return static_cast<std::size_t>(std::ceil(t_end / h - 1e-9));
}

inline std::vector<double> time_grid(double h, double t_end) {
    const std::size_t k = step_count(h, t_end);
    std::vector<double> t(k + 1);
    for (std::size_t i = 0; i <= k; ++i) t[i] = static_cast<double>(i) * h;
    return t;
}

/// DC operating point G x = u(t0).
inline std::vector<double> dc_solve(const CompressedMatrix& g, const RhsFunction& u, double t0 = 0.0,
                                    SolverStats* stats = nullptr) {
    std::vector<double> rhs(g.dimension());
    u(t0, rhs);
    const Factorization f = factor(g, stats);
    if (stats) ++stats->solves;
    return f.solve(rhs);
}

/// Backward Euler: (G + C/h) x_{k+1} = u(t_{k+1}) + (C/h) x_k, one
/// factorization of (G + C/h) reused for every step.
inline void integrate(const CompressedMatrix& g, const CompressedMatrix& c, const RhsFunction& u,
                      double h, double t_end, std::span<const double> x0, const StepObserver& observe,
                      SolverStats* stats = nullptr) {
    const std::size_t n = g.dimension();
    if (c.dimension() != n || x0.size() != n) throw std::invalid_argument("integrate: dimension mismatch");
    const std::size_t steps = step_count(h, t_end);
    const CompressedMatrix c_over_h = (1.0 / h) * c;
    const Factorization f = factor(g + c_over_h, stats);

    std::vector<double> x(x0.begin(), x0.end());
    std::vector<double> rhs(n), hist(n);
    observe(0, 0.0, x);
    for (std::size_t k = 1; k <= steps; ++k) {
        const double t = static_cast<double>(k) * h;
        u(t, rhs);
        c_over_h.multiply(x, hist);
        for (std::size_t i = 0; i < n; ++i) rhs[i] += hist[i];
        f.solve(rhs, x);
        if (stats) ++stats->solves;
        observe(k, t, x);
    }
}

/// Same as integrate() for several right-hand sides sharing G and C; a single
/// factorization serves every trajectory. observe(term, step, t, x).
inline void integrate_many(const CompressedMatrix& g, const CompressedMatrix& c,
                           std::span<const RhsFunction> u, double h, double t_end,
                           std::span<const std::vector<double>> x0,
                           const std::function<void(std::size_t, std::size_t, double, std::span<const double>)>& observe,
                           SolverStats* stats = nullptr) {
    const std::size_t n = g.dimension();
    if (u.size() != x0.size()) throw std::invalid_argument("integrate_many: rhs/initial count mismatch");
    const std::size_t steps = step_count(h, t_end);
    const CompressedMatrix c_over_h = (1.0 / h) * c;
    const Factorization f = factor(g + c_over_h, stats);

    std::vector<std::vector<double>> x(x0.begin(), x0.end());
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j].size() != n) throw std::invalid_argument("integrate_many: dimension mismatch");
        observe(j, 0, 0.0, x[j]);
    }
    std::vector<double> rhs(n), hist(n);
    for (std::size_t k = 1; k <= steps; ++k) {
        const double t = static_cast<double>(k) * h;
        for (std::size_t j = 0; j < x.size(); ++j) {
            u[j](t, rhs);
            c_over_h.multiply(x[j], hist);
            for (std::size_t i = 0; i < n; ++i) rhs[i] += hist[i];
            f.solve(rhs, x[j]);
            if (stats) ++stats->solves;
            observe(j, k, t, x[j]);
        }
    }
}

/// All solution vectors, x0 included.
inline std::vector<std::vector<double>> transient(const CompressedMatrix& g, const CompressedMatrix& c,
                                                  const RhsFunction& u, double h, double t_end,
                                                  std::span<const double> x0, SolverStats* stats = nullptr) {
    std::vector<std::vector<double>> out;
    out.reserve(step_count(h, t_end) + 1);
    integrate(
        g, c, u, h, t_end, x0,
        [&out](std::size_t, double, std::span<const double> x) { out.emplace_back(x.begin(), x.end()); },
        stats);
    return out;
}

}  // namespace pcgrid
