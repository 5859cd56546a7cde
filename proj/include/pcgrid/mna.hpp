#pragma once

// =============================================================================
// Modified nodal analysis with first-order process-variation sensitivities
// =============================================================================
// Vdd pins are Norton-transformed (package conductance on the diagonal plus a
// constant injection), so every conductance matrix stays symmetric positive
// definite. Ideal pins (RPKG=0) pin their node to Vdd and remove it from the
// unknowns.
//
// Full mode uses two standard Gaussian variables:
//   xi_G (index 0): G(xi) = Ga + Gg xi_G,  Gg = sigma_g Ga
//   xi_L (index 1): C(xi) = Ca + Cc xi_L,  Cc = gcf sigma_l Ca
//   U(t, xi) = Ua(t) + Ug xi_G + Uc(t) xi_L
// Load-only mode keeps G and C deterministic and gives each region its own
// variable driving the loads of that region.
// =============================================================================

#include "pcgrid/chaos.hpp"
#include "pcgrid/netlist.hpp"
#include "pcgrid/solver.hpp"
#include "pcgrid/sparse.hpp"

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pcgrid {

class AssemblyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sample whose realized conductances are not positive.
class NonPhysicalSample : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// sigma_g of the single conductance variable replacing d xi_W + e xi_T,
/// with d = sigma_w and e = sigma_t from the linearized G ~ W T.
inline double combine_width_thickness(double sigma_w, double sigma_t) {
    if (sigma_w < 0.0 || sigma_t < 0.0) throw std::invalid_argument("sigmas must be nonnegative");
    return std::hypot(sigma_w, sigma_t);
}

/// Load current i(t) stamped into one node.
struct LoadStamp {
    std::size_t node;      // unknown index
    std::size_t waveform;  // into PerturbedSystem::waveforms
    double sign;           // -1 draws current out of the node
    double sens_g = 0.0;   // d(multiplier)/d xi_G
    double sens_l = 0.0;   // d(multiplier)/d xi_L
    int region = -1;       // load-only mode
};

/// One basis coefficient U_j(t): a constant vector plus scaled waveforms.
struct RhsTerm {
    struct Load {
        std::size_t node;
        std::size_t waveform;
        double coef;
    };
    std::vector<double> constant;  // empty means zero
    std::vector<Load> loads;

    [[nodiscard]] bool is_zero() const {
        for (double v : constant) {
            if (v != 0.0) return false;
        }
        for (const Load& l : loads) {
            if (l.coef != 0.0) return false;
        }
        return true;
    }

    void evaluate(const std::vector<Waveform>& waves, double t, std::span<double> out) const {
        if (constant.empty()) {
            std::fill(out.begin(), out.end(), 0.0);
        } else {
            std::copy(constant.begin(), constant.end(), out.begin());
        }
        for (const Load& l : loads) out[l.node] += l.coef * waves[l.waveform](t);
    }
};

using WaveformTable = std::shared_ptr<const std::vector<Waveform>>;

inline RhsFunction make_rhs(WaveformTable waves, RhsTerm term) {
    return [waves = std::move(waves), term = std::move(term)](double t, std::span<double> out) {
        term.evaluate(*waves, t, out);
    };
}

struct PerturbedSystem {
    std::size_t M = 0;
    std::vector<std::string> node_names;  // per unknown
    double vdd = 0.0;

    SparseTriplets Ga, Gg, Ca, Cc;
    CompressedMatrix ga, gg, ca, cc;  // compressed copies of the above

    std::vector<double> injections;   // Norton currents Vdd/RPKG (and g V of ideal pins)
    WaveformTable waveforms;
    std::vector<LoadStamp> loads;

    double sigma_g = 0.0;
    double sigma_l = 0.0;
    double cap_scale = 0.0;    // gcf * sigma_l
    double drain_sens = 0.0;   // current_sensitivity * sigma_l

    // Variable layout.
    std::size_t variables = 2;
    std::optional<std::size_t> g_variable;  // xi_G
    std::optional<std::size_t> c_variable;  // xi_L (capacitance)
    std::optional<std::size_t> l_variable;  // xi_L (loads)

    bool rhs_only = false;
    double leakage_fraction = 0.0;
    double leakage_sigma = 0.0;

    /// Load multiplier m(xi) with i_realized(t) = m(xi) i(t).
    [[nodiscard]] double load_multiplier(const LoadStamp& l, std::span<const double> xi) const {
        if (rhs_only) {
            const double x = xi[static_cast<std::size_t>(l.region)];
            return (1.0 - leakage_fraction) * (1.0 + drain_sens * x) +
                   leakage_fraction * std::exp(leakage_sigma * x);
        }
        double m = 1.0;
        if (g_variable) m += l.sens_g * xi[*g_variable];
        if (l_variable) m += l.sens_l * xi[*l_variable];
        return m;
    }
};

/// Stamps the nominal and sensitivity matrices of `grid`.
inline PerturbedSystem assemble(const Grid& grid) {
    const VariationSpec& var = grid.variation;
    PerturbedSystem sys;
    sys.vdd = grid.vdd();

    // Ideal pins fix their node.
    std::map<std::size_t, double> fixed;
    for (const Element& e : grid.elements) {
        if (e.kind != ElementKind::vdd_pin || e.rpkg != 0.0) continue;
        const std::size_t n = *grid.node_index(e.node_a);
        auto [it, inserted] = fixed.emplace(n, e.value);
        if (!inserted && it->second != e.value) {
            throw AssemblyError("ideal pins force node '" + e.node_a + "' to two different voltages");
        }
    }
    std::vector<std::optional<std::size_t>> unknown(grid.node_count());
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        if (fixed.contains(i)) continue;
        unknown[i] = sys.node_names.size();
        sys.node_names.push_back(grid.node_names[i]);
    }
    sys.M = sys.node_names.size();
    if (sys.M == 0) throw AssemblyError("every node is fixed by an ideal pin; nothing to solve");

    auto free_index = [&](const std::string& name) -> std::optional<std::size_t> {
        auto g = grid.node_index(name);
        return g ? unknown[*g] : std::nullopt;
    };
    auto fixed_voltage = [&](const std::string& name) -> std::optional<double> {
        auto g = grid.node_index(name);
        if (!g) return std::nullopt;
        auto it = fixed.find(*g);
        return it == fixed.end() ? std::nullopt : std::optional<double>(it->second);
    };

    sys.rhs_only = var.rhs_only;
    sys.sigma_l = var.sigma_l;
    sys.drain_sens = var.current_sensitivity * var.sigma_l;
    if (var.rhs_only) {
        sys.sigma_g = 0.0;
        sys.cap_scale = 0.0;
        sys.variables = var.region_count();
        if (sys.variables == 0) throw AssemblyError("load-only mode needs at least one .REGION");
        sys.leakage_fraction = var.leakage_fraction;
        sys.leakage_sigma = var.leakage_sigma;
    } else {
        sys.sigma_g = combine_width_thickness(var.sigma_w, var.sigma_t);
        sys.cap_scale = var.gate_cap_fraction * var.sigma_l;
        sys.variables = 2;
        sys.g_variable = 0;
        sys.c_variable = 1;
        sys.l_variable = 1;
    }

    sys.Ga = SparseTriplets(sys.M);
    sys.Ca = SparseTriplets(sys.M);
    sys.injections.assign(sys.M, 0.0);
    auto waves = std::make_shared<std::vector<Waveform>>();

    for (const Element& e : grid.elements) {
        const auto a = free_index(e.node_a);
        const auto b = free_index(e.node_b);
        switch (e.kind) {
            case ElementKind::resistor: {
                const double g = 1.0 / e.value;
                sys.Ga.stamp(a, b, g);
                // A fixed terminal acts as a source of g * V into the free one.
                if (a && !b) {
                    if (auto v = fixed_voltage(e.node_b)) sys.injections[*a] += g * *v;
                }
                if (b && !a) {
                    if (auto v = fixed_voltage(e.node_a)) sys.injections[*b] += g * *v;
                }
                break;
            }
            case ElementKind::capacitor:
                sys.Ca.stamp(a, b, e.value);
                break;
            case ElementKind::vdd_pin:
                if (e.rpkg > 0.0 && a) {
                    sys.Ga.add(*a, *a, 1.0 / e.rpkg);
                    sys.injections[*a] += e.value / e.rpkg;
                }
                break;
            case ElementKind::current_load: {
                const std::string& load_node = e.node_a != kGround ? e.node_a : e.node_b;
                int region = -1;
                if (var.rhs_only) {
                    auto it = var.regions.find(load_node);
                    if (it == var.regions.end()) {
                        throw AssemblyError("load '" + e.name + "' sits on node '" + load_node +
                                            "' which has no region");
                    }
                    region = it->second;
                }
                const std::size_t w = waves->size();
                waves->push_back(e.waveform);
                const double sens_l = var.rhs_only ? 0.0 : sys.drain_sens;
                if (a) sys.loads.push_back({*a, w, -1.0, 0.0, sens_l, region});
                if (b) sys.loads.push_back({*b, w, +1.0, 0.0, sens_l, region});
                break;
            }
        }
    }
    sys.waveforms = std::move(waves);

    sys.Gg = SparseTriplets(sys.M);
    sys.Cc = SparseTriplets(sys.M);
    if (sys.sigma_g != 0.0) {
        for (const Triplet& t : sys.Ga.entries) sys.Gg.add(t.row, t.col, sys.sigma_g * t.value);
    }
    if (sys.cap_scale != 0.0) {
        for (const Triplet& t : sys.Ca.entries) sys.Cc.add(t.row, t.col, sys.cap_scale * t.value);
    }
    sys.ga = compress(sys.Ga);
    sys.gg = compress(sys.Gg);
    sys.ca = compress(sys.Ca);
    sys.cc = compress(sys.Cc);
    return sys;
}

/// Hermite coefficients U_j(t) of the stochastic excitation on `basis`.
inline std::vector<RhsTerm> rhs_terms(const PerturbedSystem& sys, const ChaosBasis& basis) {
    if (basis.variables() != sys.variables) {
        throw std::invalid_argument("basis has " + std::to_string(basis.variables()) +
                                    " variables, system has " + std::to_string(sys.variables));
    }
    std::vector<RhsTerm> terms(basis.size());
    terms[0].constant = sys.injections;

    if (sys.rhs_only) {
        const std::vector<double> leak = lognormal_coeffs(0.0, sys.leakage_sigma, basis.order());
        const double f = sys.leakage_fraction;
        for (const LoadStamp& l : sys.loads) {
            for (unsigned k = 0; k <= basis.order(); ++k) {
                double coef = f * leak[k];
                if (k == 0) coef += 1.0 - f;
                if (k == 1) coef += (1.0 - f) * sys.drain_sens;
                if (coef == 0.0) continue;
                const std::size_t j = k == 0 ? 0 : basis.power_term(static_cast<std::size_t>(l.region), k);
                terms[j].loads.push_back({l.node, l.waveform, l.sign * coef});
            }
        }
        return terms;
    }

    for (const LoadStamp& l : sys.loads) terms[0].loads.push_back({l.node, l.waveform, l.sign});
    if (sys.g_variable && basis.order() >= 1) {
        RhsTerm& t = terms[basis.power_term(*sys.g_variable)];
        if (sys.sigma_g != 0.0) {
            t.constant.resize(sys.M);
            for (std::size_t i = 0; i < sys.M; ++i) t.constant[i] = sys.sigma_g * sys.injections[i];
        }
        for (const LoadStamp& l : sys.loads) {
            if (l.sens_g != 0.0) t.loads.push_back({l.node, l.waveform, l.sign * l.sens_g});
        }
    }
    if (sys.l_variable && basis.order() >= 1) {
        RhsTerm& t = terms[basis.power_term(*sys.l_variable)];
        for (const LoadStamp& l : sys.loads) {
            if (l.sens_l != 0.0) t.loads.push_back({l.node, l.waveform, l.sign * l.sens_l});
        }
    }
    return terms;
}

struct RhsExpansion {
    ChaosBasis basis;
    WaveformTable waveforms;
    std::vector<RhsTerm> terms;
};

/// Load-only excitation expanded over the region variables to order p.
inline RhsExpansion rhs_expansion(const Grid& grid, unsigned p) {
    if (!grid.variation.rhs_only) throw std::invalid_argument("rhs_expansion: grid is not in load-only mode");
    const PerturbedSystem sys = assemble(grid);
    ChaosBasis basis(sys.variables, p);
    auto terms = rhs_terms(sys, basis);
    return {std::move(basis), sys.waveforms, std::move(terms)};
}

/// One deterministic realization of the stochastic system.
struct DeterministicSystem {
    CompressedMatrix g;
    CompressedMatrix c;
    RhsTerm rhs;
    WaveformTable waveforms;

    [[nodiscard]] RhsFunction excitation() const { return make_rhs(waveforms, rhs); }
};

inline DeterministicSystem realize(const PerturbedSystem& sys, std::span<const double> xi) {
    if (xi.size() != sys.variables) throw std::invalid_argument("realize: wrong number of variables");
    double g_scale = 1.0;
    double c_scale = 1.0;
    if (sys.g_variable) g_scale += sys.sigma_g * xi[*sys.g_variable];
    if (sys.c_variable) c_scale += sys.cap_scale * xi[*sys.c_variable];
    if (!(g_scale > 0.0) || !(c_scale >= 0.0)) {
        throw NonPhysicalSample("sample drives conductance or capacitance nonpositive");
    }
    DeterministicSystem d;
    d.g = g_scale * sys.ga;
    d.c = c_scale * sys.ca;
    d.waveforms = sys.waveforms;
    d.rhs.constant.resize(sys.M);
    for (std::size_t i = 0; i < sys.M; ++i) d.rhs.constant[i] = g_scale * sys.injections[i];
    d.rhs.loads.reserve(sys.loads.size());
    for (const LoadStamp& l : sys.loads) {
        d.rhs.loads.push_back({l.node, l.waveform, l.sign * sys.load_multiplier(l, xi)});
    }
    return d;
}

inline DeterministicSystem nominal(const PerturbedSystem& sys) {
    const std::vector<double> zero(sys.variables, 0.0);
    return realize(sys, zero);
}

/// Smallest breakpoint spacing of any load, divided by four; falls back to
/// t_end / 100 when no load has two breakpoints.
inline double default_step(const PerturbedSystem& sys, double t_end) {
    double spacing = HUGE_VAL;
    for (const Waveform& w : *sys.waveforms) {
        const auto& p = w.points();
        for (std::size_t i = 1; i < p.size(); ++i) spacing = std::min(spacing, p[i].time - p[i - 1].time);
    }
    return std::isfinite(spacing) ? spacing / 4.0 : t_end / 100.0;
}

/// Last load breakpoint (at least one default step past zero).
inline double default_horizon(const PerturbedSystem& sys) {
    double t = 0.0;
    for (const Waveform& w : *sys.waveforms) {
        if (!w.empty()) t = std::max(t, w.points().back().time);
    }
    return t > 0.0 ? t : 1e-9;
}

}  // namespace pcgrid
