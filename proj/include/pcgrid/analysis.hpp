#pragma once

// =============================================================================
// Analysis engines
// =============================================================================
// run_pc          polynomial-chaos (Galerkin) transient
// run_mc          Monte Carlo over truncated Gaussian samples
// run_quadrature  tensor Gauss-Hermite oracle
// run_nominal     all variables at zero
//
// Every engine reports voltage drops (vdd - v) on the unknown nodes over the
// time grid t_k = k h, k = 0..K, where t_0 is the DC operating point.
// =============================================================================

#include "pcgrid/chaos.hpp"
#include "pcgrid/galerkin.hpp"
#include "pcgrid/mna.hpp"
#include "pcgrid/netlist.hpp"
#include "pcgrid/solver.hpp"
#include "pcgrid/sparse.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace pcgrid {

/// Samples are drawn from N(0,1) conditioned on |xi| <= this bound.
inline constexpr double kTruncation = 4.0;

/// Relative-sigma statistics skip cells with sigma_ref below this fraction of vdd.
inline constexpr double kSigmaFloor = 1e-12;

namespace detail {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    [[nodiscard]] double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

inline double truncated_normal(std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    while (true) {
        const double x = normal(rng);
        if (std::abs(x) <= kTruncation) return x;
    }
}

}  // namespace detail

/// Per-(step, node) mean and variance of the voltage drop.
struct MomentField {
    std::vector<std::string> nodes;
    std::vector<double> times;
    std::vector<double> mean;  // [step * M + node]
    std::vector<double> var;
    double vdd = 0.0;
    double wall_clock_s = 0.0;

    [[nodiscard]] std::size_t M() const { return nodes.size(); }
    [[nodiscard]] std::size_t steps() const { return times.size(); }
    [[nodiscard]] double mean_at(std::size_t step, std::size_t node) const { return mean[step * M() + node]; }
    [[nodiscard]] double std_at(std::size_t step, std::size_t node) const {
        return std::sqrt(std::max(0.0, var[step * M() + node]));
    }

    void resize(std::size_t steps, std::size_t m) {
        mean.assign(steps * m, 0.0);
        var.assign(steps * m, 0.0);
    }
};

// -----------------------------------------------------------------------------
// Polynomial chaos
// -----------------------------------------------------------------------------

struct PcOptions {
    unsigned p = 2;
    std::optional<double> h;      // default: smallest breakpoint spacing / 4
    std::optional<double> t_end;  // default: last breakpoint
    bool force_full = false;      // load-only grids: use the coupled path anyway
};

struct PcResult {
    ChaosBasis basis;
    std::vector<std::string> nodes;
    std::vector<double> times;
    double vdd = 0.0;
    double h = 0.0;
    std::vector<double> coeffs;  // drop coefficients, [(step * M + node) * terms + term]
    double wall_clock_s = 0.0;
    bool decoupled = false;
    std::size_t dc_factorizations = 0;
    std::size_t transient_factorizations = 0;
    std::size_t solves = 0;

    [[nodiscard]] std::size_t M() const { return nodes.size(); }
    [[nodiscard]] std::size_t terms() const { return basis.size(); }
    [[nodiscard]] std::size_t steps() const { return times.size(); }

    [[nodiscard]] std::span<const double> expansion(std::size_t step, std::size_t node) const {
        return std::span<const double>(coeffs).subspan((step * M() + node) * terms(), terms());
    }
    [[nodiscard]] double coeff(std::size_t step, std::size_t term, std::size_t node) const {
        return expansion(step, node)[term];
    }

    [[nodiscard]] std::size_t node_index(const std::string& name) const {
        auto it = std::find(nodes.begin(), nodes.end(), name);
        if (it == nodes.end()) throw std::out_of_range("unknown node '" + name + "'");
        return static_cast<std::size_t>(it - nodes.begin());
    }
};

inline double pc_mean(const PcResult& r, std::size_t node, std::size_t step) {
    return r.coeff(step, 0, node);
}

inline double pc_variance(const PcResult& r, std::size_t node, std::size_t step) {
    const auto a = r.expansion(step, node);
    double v = 0.0;
    for (std::size_t j = 1; j < a.size(); ++j) v += a[j] * a[j] * r.basis.norm_sq(j);
    return v;
}

/// E[x^k] of the explicit expansion by tensor Gauss-Hermite quadrature, exact
/// for the polynomial x^k of degree k p.
inline double pc_moment(const PcResult& r, std::size_t node, std::size_t step, unsigned k) {
    if (k < 1) throw std::invalid_argument("pc_moment: order must be >= 1");
    if (k == 1) return pc_mean(r, node, step);
    const auto a = r.expansion(step, node);
    const unsigned level = k * r.basis.order() / 2 + 1;
    double m = 0.0;
    for_each_tensor_node(r.basis.variables(), level, [&](std::span<const double> xi, double w) {
        m += w * std::pow(r.basis.expand(a, xi), static_cast<int>(k));
    });
    return m;
}

inline MomentField pc_moments(const PcResult& r) {
    MomentField f;
    f.nodes = r.nodes;
    f.times = r.times;
    f.vdd = r.vdd;
    f.wall_clock_s = r.wall_clock_s;
    f.resize(r.steps(), r.M());
    for (std::size_t s = 0; s < r.steps(); ++s) {
        for (std::size_t i = 0; i < r.M(); ++i) {
            f.mean[s * r.M() + i] = pc_mean(r, i, s);
            f.var[s * r.M() + i] = pc_variance(r, i, s);
        }
    }
    return f;
}

inline PcResult run_pc(const Grid& grid, const PcOptions& opt) {
    if (opt.p < 1) throw std::invalid_argument("run_pc: order must be >= 1");
    detail::Stopwatch clock;
    const PerturbedSystem sys = assemble(grid);
    const double t_end = opt.t_end.value_or(default_horizon(sys));
    const double h = opt.h.value_or(default_step(sys, t_end));

    PcResult r;
    r.basis = ChaosBasis(sys.variables, opt.p);
    r.nodes = sys.node_names;
    r.times = time_grid(h, t_end);
    r.vdd = sys.vdd;
    r.h = h;
    const std::size_t M = sys.M;
    const std::size_t terms = r.basis.size();
    r.coeffs.assign(r.times.size() * M * terms, 0.0);

    // a_j -> drop coefficients: vdd - a_0 and -a_j.
    auto store = [&](std::size_t term, std::size_t step, std::span<const double> x) {
        for (std::size_t i = 0; i < M; ++i) {
            r.coeffs[(step * M + i) * terms + term] = term == 0 ? r.vdd - x[i] : -x[i];
        }
    };

    SolverStats dc_stats, tr_stats;
    if (sys.rhs_only && !opt.force_full) {
        const DecoupledSystems d = assemble_rhs_only(sys, rhs_terms(sys, r.basis));
        const auto u = d.excitations();
        const Factorization fdc = factor(d.g, &dc_stats);
        std::vector<std::vector<double>> x0;
        std::vector<double> b(M);
        for (const RhsFunction& uj : u) {
            uj(0.0, b);
            x0.push_back(fdc.solve(b));
            ++dc_stats.solves;
        }
        integrate_many(
            d.g, d.c, u, h, t_end, x0,
            [&](std::size_t term, std::size_t step, double, std::span<const double> x) { store(term, step, x); },
            &tr_stats);
        r.decoupled = true;
    } else {
        const AugmentedSystem aug = assemble_augmented(sys, r.basis);
        const CompressedMatrix gt = aug.g_tilde();
        const CompressedMatrix ct = aug.c_tilde();
        const RhsFunction u = aug.excitation();
        const std::vector<double> x0 = dc_solve(gt, u, 0.0, &dc_stats);
        integrate(
            gt, ct, u, h, t_end, x0,
            [&](std::size_t step, double, std::span<const double> x) {
                for (std::size_t j = 0; j < terms; ++j) store(j, step, x.subspan(j * M, M));
            },
            &tr_stats);
    }
    r.dc_factorizations = dc_stats.factorizations;
    r.transient_factorizations = tr_stats.factorizations;
    r.solves = dc_stats.solves + tr_stats.solves;
    r.wall_clock_s = clock.seconds();
    return r;
}

// -----------------------------------------------------------------------------
// Histograms
// -----------------------------------------------------------------------------

struct Histogram {
    std::vector<double> edges;         // bins + 1 edges
    std::vector<std::size_t> counts;

    [[nodiscard]] std::size_t total() const {
        std::size_t s = 0;
        for (auto c : counts) s += c;
        return s;
    }
    [[nodiscard]] std::vector<double> centers() const {
        std::vector<double> c(counts.size());
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (edges[i] + edges[i + 1]);
        return c;
    }
};

/// Fixed-width histogram over [lo, hi] (default: the sample range). Values
/// outside the range are clamped into the end bins.
inline Histogram make_histogram(std::span<const double> values, std::size_t bins,
                                std::optional<std::pair<double, double>> range = std::nullopt) {
    if (bins == 0) throw std::invalid_argument("histogram needs at least one bin");
    if (values.empty() && !range) throw std::invalid_argument("histogram of no values needs a range");
    double lo = 0.0, hi = 0.0;
    if (range) {
        std::tie(lo, hi) = *range;
    } else {
        auto [mn, mx] = std::minmax_element(values.begin(), values.end());
        lo = *mn;
        hi = *mx;
    }
    if (!(hi > lo)) {
        const double pad = std::max(std::abs(lo) * 1e-9, 1e-15);
        lo -= pad;
        hi += pad;
    }
    Histogram hgm;
    hgm.edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) {
        hgm.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
    }
    hgm.counts.assign(bins, 0);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (double v : values) {
        const double pos = std::floor((v - lo) / width);
        const auto b = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(bins - 1)));
        ++hgm.counts[b];
    }
    return hgm;
}

/// Draws of the explicit expansion at one node and step.
inline std::vector<double> sample_expansion(const PcResult& r, std::size_t node, std::size_t step,
                                            std::size_t samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("need at least one sample");
    const auto a = r.expansion(step, node);
    std::mt19937_64 rng(seed);
    std::vector<double> xi(r.basis.variables());
    std::vector<double> out(samples);
    for (double& v : out) {
        for (double& x : xi) x = detail::truncated_normal(rng);
        v = r.basis.expand(a, xi);
    }
    return out;
}

inline Histogram sample_distribution(const PcResult& r, std::size_t node, std::size_t step,
                                     std::size_t samples, std::uint64_t seed, std::size_t bins,
                                     std::optional<std::pair<double, double>> range = std::nullopt) {
    const auto v = sample_expansion(r, node, step, samples, seed);
    return make_histogram(v, bins, range);
}

/// Sum of |p_i - q_i| over bins of the normalized histograms (0..2).
inline double histogram_l1(const Histogram& a, const Histogram& b) {
    if (a.counts.size() != b.counts.size()) throw std::invalid_argument("histogram bin counts differ");
    const double ta = static_cast<double>(a.total());
    const double tb = static_cast<double>(b.total());
    double d = 0.0;
    for (std::size_t i = 0; i < a.counts.size(); ++i) {
        d += std::abs(static_cast<double>(a.counts[i]) / ta - static_cast<double>(b.counts[i]) / tb);
    }
    return d;
}

// -----------------------------------------------------------------------------
// Deterministic transients of one realization
// -----------------------------------------------------------------------------

/// DC start then backward Euler; observe(step, drops).
template <typename Observer>
void simulate_drops(const DeterministicSystem& d, double vdd, double h, double t_end, Observer&& observe,
                    SolverStats* stats = nullptr) {
    const RhsFunction u = d.excitation();
    const std::vector<double> x0 = dc_solve(d.g, u, 0.0, stats);
    std::vector<double> drop(x0.size());
    integrate(
        d.g, d.c, u, h, t_end, x0,
        [&](std::size_t step, double, std::span<const double> x) {
            for (std::size_t i = 0; i < x.size(); ++i) drop[i] = vdd - x[i];
            observe(step, std::span<const double>(drop));
        },
        stats);
}

struct TransientOptions {
    std::optional<double> h;
    std::optional<double> t_end;
};

inline MomentField run_nominal(const Grid& grid, const TransientOptions& opt) {
    detail::Stopwatch clock;
    const PerturbedSystem sys = assemble(grid);
    const double t_end = opt.t_end.value_or(default_horizon(sys));
    const double h = opt.h.value_or(default_step(sys, t_end));
    MomentField f;
    f.nodes = sys.node_names;
    f.times = time_grid(h, t_end);
    f.vdd = sys.vdd;
    f.resize(f.steps(), f.M());
    simulate_drops(nominal(sys), sys.vdd, h, t_end, [&](std::size_t step, std::span<const double> drop) {
        std::copy(drop.begin(), drop.end(), f.mean.begin() + static_cast<std::ptrdiff_t>(step * f.M()));
    });
    f.wall_clock_s = clock.seconds();
    return f;
}

// -----------------------------------------------------------------------------
// Monte Carlo
// -----------------------------------------------------------------------------

/// Single-pass mean / M2 accumulators (Welford), mergeable in a fixed order.
class RunningMoments {
public:
    explicit RunningMoments(std::size_t size = 0) : mean_(size, 0.0), m2_(size, 0.0) {}

    /// Starts a new sample; every update() until the next begin() belongs to it.
    void begin() { ++n_; }

    void update(std::size_t offset, std::span<const double> x) {
        const double n = static_cast<double>(n_);
        for (std::size_t i = 0; i < x.size(); ++i) {
            double& m = mean_[offset + i];
            const double delta = x[i] - m;
            m += delta / n;
            m2_[offset + i] += delta * (x[i] - m);
        }
    }

    /// Chan et al. pairwise combination.
    void merge(const RunningMoments& o) {
        if (o.n_ == 0) return;
        if (n_ == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n_);
        const double nb = static_cast<double>(o.n_);
        const double n = na + nb;
        for (std::size_t i = 0; i < mean_.size(); ++i) {
            const double delta = o.mean_[i] - mean_[i];
            mean_[i] += delta * nb / n;
            m2_[i] += o.m2_[i] + delta * delta * na * nb / n;
        }
        n_ += o.n_;
    }

    [[nodiscard]] std::size_t count() const { return n_; }
    [[nodiscard]] const std::vector<double>& mean() const { return mean_; }
    /// Unbiased sample variance (n - 1 denominator).
    [[nodiscard]] std::vector<double> variance() const {
        std::vector<double> v(m2_.size(), 0.0);
        if (n_ < 2) return v;
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::max(0.0, m2_[i] / static_cast<double>(n_ - 1));
        return v;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> mean_;
    std::vector<double> m2_;
};

struct McOptions {
    std::size_t samples = 1000;
    std::optional<double> h;
    std::optional<double> t_end;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    bool keep_samples = false;                                   // store every drop of every sample
    std::optional<std::pair<std::size_t, std::size_t>> probe;    // (node, step) values to record
};

struct McResult {
    MomentField stats;
    std::uint64_t seed = 0;
    std::size_t samples = 0;         // requested
    std::size_t failed = 0;          // nonphysical or singular samples, excluded
    std::vector<double> probe_values;
    std::vector<std::vector<double>> kept;  // [sample][step * M + node]
};

/// Samples are grouped in fixed-size chunks; chunk accumulators are merged in
/// chunk order so results do not depend on the thread count.
inline constexpr std::size_t kMcChunk = 32;

inline McResult run_mc(const Grid& grid, const McOptions& opt) {
    if (opt.samples < 2) throw std::invalid_argument("run_mc: need at least two samples");
    detail::Stopwatch clock;
    const PerturbedSystem sys = assemble(grid);
    const double t_end = opt.t_end.value_or(default_horizon(sys));
    const double h = opt.h.value_or(default_step(sys, t_end));
    const std::vector<double> times = time_grid(h, t_end);
    const std::size_t M = sys.M;
    const std::size_t cells = times.size() * M;
    if (opt.probe && (opt.probe->first >= M || opt.probe->second >= times.size())) {
        throw std::out_of_range("run_mc: probe outside the grid");
    }

    struct Chunk {
        RunningMoments acc;
        std::size_t failed = 0;
        std::vector<double> probe;
        std::vector<std::vector<double>> kept;
    };

    auto run_chunk = [&](std::size_t c) {
        Chunk out{RunningMoments(cells), 0, {}, {}};
        const std::size_t first = c * kMcChunk;
        const std::size_t last = std::min(opt.samples, first + kMcChunk);
        std::vector<double> xi(sys.variables);
        for (std::size_t s = first; s < last; ++s) {
            std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                              static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
            std::mt19937_64 rng(seq);
            for (double& x : xi) x = detail::truncated_normal(rng);
            // Solve fully before touching the accumulator so failures leave no trace.
            std::vector<double> drops(cells);
            try {
                const DeterministicSystem d = realize(sys, xi);
                simulate_drops(d, sys.vdd, h, t_end, [&](std::size_t step, std::span<const double> v) {
                    std::copy(v.begin(), v.end(), drops.begin() + static_cast<std::ptrdiff_t>(step * M));
                });
            } catch (const NonPhysicalSample&) {
                ++out.failed;
                continue;
            } catch (const SingularMatrixError&) {
                ++out.failed;
                continue;
            }
            out.acc.begin();
            out.acc.update(0, drops);
            if (opt.probe) out.probe.push_back(drops[opt.probe->second * M + opt.probe->first]);
            if (opt.keep_samples) out.kept.push_back(std::move(drops));
        }
        return out;
    };

    McResult res;
    res.seed = opt.seed;
    res.samples = opt.samples;
    RunningMoments total(cells);
    const std::size_t chunks = (opt.samples + kMcChunk - 1) / kMcChunk;
    const std::size_t width = std::max<unsigned>(1, opt.threads);
    for (std::size_t wave = 0; wave < chunks; wave += width) {
        const std::size_t count = std::min(width, chunks - wave);
        std::vector<Chunk> done(count);
        if (count == 1) {
            done[0] = run_chunk(wave);
        } else {
            std::vector<std::jthread> workers;
            for (std::size_t i = 0; i < count; ++i) {
                workers.emplace_back([&, i] { done[i] = run_chunk(wave + i); });
            }
        }
        for (Chunk& c : done) {
            total.merge(c.acc);
            res.failed += c.failed;
            res.probe_values.insert(res.probe_values.end(), c.probe.begin(), c.probe.end());
            for (auto& k : c.kept) res.kept.push_back(std::move(k));
        }
    }

    res.stats.nodes = sys.node_names;
    res.stats.times = times;
    res.stats.vdd = sys.vdd;
    res.stats.mean = total.mean();
    res.stats.var = total.variance();
    res.stats.wall_clock_s = clock.seconds();
    return res;
}

// -----------------------------------------------------------------------------
// Quadrature oracle
// -----------------------------------------------------------------------------

struct QuadOptions {
    unsigned level = 12;
    std::optional<double> h;
    std::optional<double> t_end;
    std::size_t max_evaluations = 4096;  // cap on level^variables
};

class QuadratureTooLarge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline MomentField run_quadrature(const Grid& grid, const QuadOptions& opt) {
    if (opt.level < 2) throw std::invalid_argument("run_quadrature: level must be >= 2");
    detail::Stopwatch clock;
    const PerturbedSystem sys = assemble(grid);
    double evals = 1.0;
    for (std::size_t i = 0; i < sys.variables; ++i) evals *= opt.level;
    if (sys.variables > 3 || evals > static_cast<double>(opt.max_evaluations)) {
        throw QuadratureTooLarge("tensor rule with " + std::to_string(opt.level) + "^" +
                                 std::to_string(sys.variables) + " points exceeds the cap of " +
                                 std::to_string(opt.max_evaluations) + " transients (max 3 variables)");
    }
    const double t_end = opt.t_end.value_or(default_horizon(sys));
    const double h = opt.h.value_or(default_step(sys, t_end));

    MomentField f;
    f.nodes = sys.node_names;
    f.times = time_grid(h, t_end);
    f.vdd = sys.vdd;
    f.resize(f.steps(), f.M());
    std::vector<double> m2(f.mean.size(), 0.0);
    double wsum = 0.0;

    // Weighted incremental mean / M2 (West).
    for_each_tensor_node(sys.variables, opt.level, [&](std::span<const double> xi, double w) {
        const DeterministicSystem d = realize(sys, xi);
        wsum += w;
        const double ratio = w / wsum;
        simulate_drops(d, sys.vdd, h, t_end, [&](std::size_t step, std::span<const double> drop) {
            const std::size_t off = step * f.M();
            for (std::size_t i = 0; i < drop.size(); ++i) {
                double& m = f.mean[off + i];
                const double delta = drop[i] - m;
                m += ratio * delta;
                m2[off + i] += w * delta * (drop[i] - m);
            }
        });
    });
    for (std::size_t i = 0; i < m2.size(); ++i) f.var[i] = std::max(0.0, m2[i] / wsum);
    f.wall_clock_s = clock.seconds();
    return f;
}

// -----------------------------------------------------------------------------
// Comparison
// -----------------------------------------------------------------------------

struct ComparisonReport {
    double avg_pct_err_mu = 0.0;     // |mu_pc - mu_ref| as % of vdd
    double max_pct_err_mu = 0.0;
    double avg_pct_err_sigma = 0.0;  // |sigma_pc - sigma_ref| as % of sigma_ref
    double max_pct_err_sigma = 0.0;
    double pm3sigma_pct_of_nominal = 0.0;
    double time_ref_s = 0.0;
    double time_pc_s = 0.0;
    double speedup = 0.0;
    std::size_t cells = 0;
    std::size_t sigma_cells = 0;
    std::size_t excluded_sigma_cells = 0;
};

/// Errors of `pc` against `ref` over every (node, time) cell. The spread
/// statistic is 3 sigma_pc / mu_0 at each node's peak nominal drop, averaged
/// over nodes with a nonzero nominal drop.
inline ComparisonReport compare(const MomentField& pc, const MomentField& ref, const MomentField& nominal_drop) {
    if (pc.nodes != ref.nodes || pc.nodes != nominal_drop.nodes) {
        throw std::invalid_argument("compare: node sets differ");
    }
    auto same_times = [](const std::vector<double>& a, const std::vector<double>& b) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (std::abs(a[i] - b[i]) > 1e-9 * std::max(std::abs(a[i]), 1e-30)) return false;
        }
        return true;
    };
    if (!same_times(pc.times, ref.times) || !same_times(pc.times, nominal_drop.times)) {
        throw std::invalid_argument("compare: time grids differ");
    }
    const double vdd = pc.vdd > 0.0 ? pc.vdd : ref.vdd;
    ComparisonReport rep;
    double sum_mu = 0.0, sum_sigma = 0.0;
    const std::size_t M = pc.M();
    for (std::size_t s = 0; s < pc.steps(); ++s) {
        for (std::size_t i = 0; i < M; ++i) {
            const double emu = std::abs(pc.mean_at(s, i) - ref.mean_at(s, i)) / vdd * 100.0;
            sum_mu += emu;
            rep.max_pct_err_mu = std::max(rep.max_pct_err_mu, emu);
            ++rep.cells;
            const double sref = ref.std_at(s, i);
            if (sref <= kSigmaFloor * vdd) {
                ++rep.excluded_sigma_cells;
                continue;
            }
            const double esig = std::abs(pc.std_at(s, i) - sref) / sref * 100.0;
            sum_sigma += esig;
            rep.max_pct_err_sigma = std::max(rep.max_pct_err_sigma, esig);
            ++rep.sigma_cells;
        }
    }
    if (rep.cells > 0) rep.avg_pct_err_mu = sum_mu / static_cast<double>(rep.cells);
    if (rep.sigma_cells > 0) rep.avg_pct_err_sigma = sum_sigma / static_cast<double>(rep.sigma_cells);

    double spread = 0.0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < M; ++i) {
        std::size_t peak = 0;
        for (std::size_t s = 1; s < pc.steps(); ++s) {
            if (nominal_drop.mean_at(s, i) > nominal_drop.mean_at(peak, i)) peak = s;
        }
        const double mu0 = nominal_drop.mean_at(peak, i);
        if (mu0 <= kSigmaFloor * vdd) continue;
        spread += 3.0 * pc.std_at(peak, i) / mu0 * 100.0;
        ++counted;
    }
    if (counted > 0) rep.pm3sigma_pct_of_nominal = spread / static_cast<double>(counted);

    rep.time_ref_s = ref.wall_clock_s;
    rep.time_pc_s = pc.wall_clock_s;
    if (ref.wall_clock_s == pc.wall_clock_s) {
        rep.speedup = 1.0;
    } else {
        rep.speedup = pc.wall_clock_s > 0.0 ? ref.wall_clock_s / pc.wall_clock_s : 0.0;
    }
    return rep;
}

}  // namespace pcgrid
