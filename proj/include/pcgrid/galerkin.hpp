#pragma once

// =============================================================================
// Stochastic Galerkin projection
// =============================================================================
// For the basis {psi_j}, the augmented system couples all coefficient vectors:
//
//   Gt[j][k] = <psi_j psi_k> Ga + <xi_G psi_j psi_k> Gg
//   Ct[j][k] = <psi_j psi_k> Ca + <xi_L psi_j psi_k> Cc
//   Ut[j]    = <U psi_j> = <psi_j psi_j> U_j
//
// Blocks are kept as scaled references to the four base matrices and only
// expanded into one flat sparse matrix for factorization. Stacked vectors use
// the layout a[j * M + node].
// =============================================================================

#include "pcgrid/chaos.hpp"
#include "pcgrid/mna.hpp"
#include "pcgrid/solver.hpp"
#include "pcgrid/sparse.hpp"

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcgrid {

enum class BlockSource { Ga, Gg, Ca, Cc };

inline const char* to_string(BlockSource s) {
    switch (s) {
        case BlockSource::Ga: return "Ga";
        case BlockSource::Gg: return "Gg";
        case BlockSource::Ca: return "Ca";
        case BlockSource::Cc: return "Cc";
    }
    return "?";
}

struct BlockTerm {
    double scale;
    BlockSource source;
};

using BlockRow = std::vector<std::vector<BlockTerm>>;

struct AugmentedSystem {
    ChaosBasis basis;
    std::size_t M = 0;
    std::vector<BlockRow> blocks_g;  // [j][k] -> terms
    std::vector<BlockRow> blocks_c;
    CompressedMatrix ga, gg, ca, cc;
    std::optional<std::size_t> g_variable, c_variable;
    WaveformTable waveforms;
    std::vector<RhsTerm> rhs_terms;  // U_j(t), one per basis term

    [[nodiscard]] std::size_t terms() const { return basis.size(); }
    [[nodiscard]] std::size_t dimension() const { return basis.size() * M; }

    [[nodiscard]] const CompressedMatrix& source(BlockSource s) const {
        switch (s) {
            case BlockSource::Ga: return ga;
            case BlockSource::Gg: return gg;
            case BlockSource::Ca: return ca;
            case BlockSource::Cc: return cc;
        }
        throw std::logic_error("unknown block source");
    }

    /// Flat sparse matrix of Gt + c_factor * Ct.
    [[nodiscard]] CompressedMatrix flatten(double g_factor, double c_factor) const {
        SparseTriplets t(dimension());
        auto emit = [&](const std::vector<BlockRow>& blocks, double factor) {
            if (factor == 0.0) return;
            for (std::size_t j = 0; j < terms(); ++j) {
                for (std::size_t k = 0; k < terms(); ++k) {
                    for (const BlockTerm& b : blocks[j][k]) {
                        const auto& m = source(b.source).storage();
                        for (Eigen::Index col = 0; col < m.outerSize(); ++col) {
                            for (CompressedMatrix::Storage::InnerIterator it(m, col); it; ++it) {
                                t.add(j * M + static_cast<std::size_t>(it.row()),
                                      k * M + static_cast<std::size_t>(it.col()),
                                      factor * b.scale * it.value());
                            }
                        }
                    }
                }
            }
        };
        emit(blocks_g, g_factor);
        emit(blocks_c, c_factor);
        return compress(t);
    }

    [[nodiscard]] CompressedMatrix g_tilde() const { return flatten(1.0, 0.0); }
    [[nodiscard]] CompressedMatrix c_tilde() const { return flatten(0.0, 1.0); }

    /// Stacked projected excitation <U(t) psi_j>.
    void rhs(double t, std::span<double> out) const {
        std::vector<double> tmp(M);
        for (std::size_t j = 0; j < terms(); ++j) {
            auto seg = out.subspan(j * M, M);
            if (rhs_terms[j].is_zero()) {
                std::fill(seg.begin(), seg.end(), 0.0);
                continue;
            }
            rhs_terms[j].evaluate(*waveforms, t, tmp);
            const double w = basis.norm_sq(j);
            for (std::size_t i = 0; i < M; ++i) seg[i] = w * tmp[i];
        }
    }

    [[nodiscard]] RhsFunction excitation() const {
        return [this](double t, std::span<double> out) { rhs(t, out); };
    }

    /// Block labels such as "2Gg" or "0", one row per line.
    [[nodiscard]] std::string pattern(const std::vector<BlockRow>& blocks) const {
        std::ostringstream os;
        for (std::size_t j = 0; j < terms(); ++j) {
            for (std::size_t k = 0; k < terms(); ++k) {
                if (k > 0) os << ' ';
                os << block_label(blocks[j][k]);
            }
            os << '\n';
        }
        return os.str();
    }

    [[nodiscard]] static std::string block_label(const std::vector<BlockTerm>& terms) {
        if (terms.empty()) return "0";
        std::string s;
        for (const BlockTerm& b : terms) {
            if (!s.empty()) s += '+';
            if (b.scale != 1.0) {
                std::ostringstream n;
                n << b.scale;
                s += n.str();
            }
            s += to_string(b.source);
        }
        return s;
    }

    /// Fraction of (j, k) blocks that are nonzero in Gt or Ct.
    [[nodiscard]] double block_density() const {
        std::size_t nz = 0;
        for (std::size_t j = 0; j < terms(); ++j) {
            for (std::size_t k = 0; k < terms(); ++k) {
                if (!blocks_g[j][k].empty() || !blocks_c[j][k].empty()) ++nz;
            }
        }
        return static_cast<double>(nz) / static_cast<double>(terms() * terms());
    }
};

/// Builds the augmented block system on `basis`; sensitivities attach to the
/// system's variable layout (xi_G = 0, xi_L = 1 in full mode).
inline AugmentedSystem assemble_augmented(const PerturbedSystem& sys, const ChaosBasis& basis) {
    if (basis.variables() != sys.variables) {
        throw std::invalid_argument("assemble_augmented: basis has " + std::to_string(basis.variables()) +
                                    " variables but the system has " + std::to_string(sys.variables));
    }
    AugmentedSystem aug;
    aug.basis = basis;
    aug.M = sys.M;
    aug.ga = sys.ga;
    aug.gg = sys.gg;
    aug.ca = sys.ca;
    aug.cc = sys.cc;
    aug.g_variable = sys.g_variable;
    aug.c_variable = sys.c_variable;
    aug.waveforms = sys.waveforms;
    aug.rhs_terms = rhs_terms(sys, basis);

    const std::size_t n = basis.size();
    aug.blocks_g.assign(n, BlockRow(n));
    aug.blocks_c.assign(n, BlockRow(n));
    for (std::size_t j = 0; j < n; ++j) {
        aug.blocks_g[j][j].push_back({basis.norm_sq(j), BlockSource::Ga});
        aug.blocks_c[j][j].push_back({basis.norm_sq(j), BlockSource::Ca});
        // a variable with zero sensitivity contributes no coupling blocks
        if (sys.g_variable && sys.gg.nonzeros() != 0) {
            for (const auto& e : basis.triple_row(*sys.g_variable, j)) {
                aug.blocks_g[j][e.col].push_back({e.value, BlockSource::Gg});
            }
        }
        if (sys.c_variable && sys.cc.nonzeros() != 0) {
            for (const auto& e : basis.triple_row(*sys.c_variable, j)) {
                aug.blocks_c[j][e.col].push_back({e.value, BlockSource::Cc});
            }
        }
    }
    return aug;
}

/// N+1 independent systems (G, C, U_n) sharing one pair of matrices.
struct DecoupledSystems {
    CompressedMatrix g;
    CompressedMatrix c;
    WaveformTable waveforms;
    std::vector<RhsTerm> terms;

    [[nodiscard]] std::vector<RhsFunction> excitations() const {
        std::vector<RhsFunction> out;
        out.reserve(terms.size());
        for (const RhsTerm& t : terms) out.push_back(make_rhs(waveforms, t));
        return out;
    }
};

/// Decoupled path for deterministic G and C: with G, C free of xi the
/// Galerkin blocks are diagonal and each coefficient solves (G + sC) x_n = U_n.
inline DecoupledSystems assemble_rhs_only(const PerturbedSystem& sys, std::vector<RhsTerm> u_coeffs) {
    if (sys.gg.nonzeros() != 0 || sys.cc.nonzeros() != 0) {
        throw std::invalid_argument("assemble_rhs_only: G or C depends on the random variables");
    }
    return {sys.ga, sys.ca, sys.waveforms, std::move(u_coeffs)};
}

/// Truncation residual (G(xi) + C(xi) d/dt) x(xi) - U(xi) at one sample,
/// with x reconstructed from stacked coefficients and d/dt taken as the
/// backward-Euler difference (x - x_prev) / h. Without x_prev the DC
/// residual is returned.
inline std::vector<double> residual_vector(const AugmentedSystem& aug, std::span<const double> a,
                                           std::span<const double> a_prev, double h,
                                           std::span<const double> xi, double t) {
    const std::size_t M = aug.M;
    if (a.size() != aug.dimension()) throw std::invalid_argument("residual: coefficient size mismatch");
    auto reconstruct = [&](std::span<const double> coeffs) {
        std::vector<double> x(M, 0.0);
        for (std::size_t j = 0; j < aug.terms(); ++j) {
            const double psi = aug.basis.evaluate(j, xi);
            for (std::size_t i = 0; i < M; ++i) x[i] += coeffs[j * M + i] * psi;
        }
        return x;
    };
    const std::vector<double> x = reconstruct(a);
    const double xg = aug.g_variable ? xi[*aug.g_variable] : 0.0;
    const double xc = aug.c_variable ? xi[*aug.c_variable] : 0.0;

    std::vector<double> r(M), tmp(M);
    aug.ga.multiply(x, r);
    aug.gg.multiply(x, tmp);
    for (std::size_t i = 0; i < M; ++i) r[i] += xg * tmp[i];

    if (!a_prev.empty()) {
        const std::vector<double> xp = reconstruct(a_prev);
        std::vector<double> dx(M);
        for (std::size_t i = 0; i < M; ++i) dx[i] = (x[i] - xp[i]) / h;
        aug.ca.multiply(dx, tmp);
        for (std::size_t i = 0; i < M; ++i) r[i] += tmp[i];
        aug.cc.multiply(dx, tmp);
        for (std::size_t i = 0; i < M; ++i) r[i] += xc * tmp[i];
    }
    for (std::size_t j = 0; j < aug.terms(); ++j) {
        if (aug.rhs_terms[j].is_zero()) continue;
        aug.rhs_terms[j].evaluate(*aug.waveforms, t, tmp);
        const double psi = aug.basis.evaluate(j, xi);
        for (std::size_t i = 0; i < M; ++i) r[i] -= psi * tmp[i];
    }
    return r;
}

inline double residual_check(const AugmentedSystem& aug, std::span<const double> a,
                             std::span<const double> a_prev, double h, std::span<const double> xi,
                             double t) {
    const auto r = residual_vector(aug, a, a_prev, h, xi, t);
    double s = 0.0;
    for (double v : r) s += v * v;
    return std::sqrt(s);
}

}  // namespace pcgrid
