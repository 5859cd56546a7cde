#pragma once

// =============================================================================
// Hermite polynomial chaos algebra
// =============================================================================
// Multi-index sets, probabilists' Hermite polynomials, squared norms, the
// linear triple-product tables <xi_m psi_j psi_k>, Gauss-Hermite rules and the
// Hermite expansion of a lognormal input.
// =============================================================================

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pcgrid {

/// Largest basis accepted by term_count() and ChaosBasis.
inline constexpr std::size_t kMaxBasisTerms = 1'000'000;

/// Exponent vector (alpha_1 .. alpha_n) of one multivariate Hermite term.
struct MultiIndex {
    std::vector<unsigned> exponents;

    MultiIndex() = default;
    explicit MultiIndex(std::vector<unsigned> e) : exponents(std::move(e)) {}

    [[nodiscard]] std::size_t size() const { return exponents.size(); }
    [[nodiscard]] unsigned total() const {
        return std::accumulate(exponents.begin(), exponents.end(), 0u);
    }
    unsigned operator[](std::size_t i) const { return exponents[i]; }

    auto operator<=>(const MultiIndex&) const = default;
    bool operator==(const MultiIndex&) const = default;

    [[nodiscard]] static MultiIndex unit(std::size_t n, std::size_t var, unsigned power = 1) {
        std::vector<unsigned> e(n, 0);
        e.at(var) = power;
        return MultiIndex{std::move(e)};
    }
};

/// Number of multivariate Hermite terms of total order <= p in n variables,
/// i.e. (n+p)! / (n! p!). Throws std::overflow_error above kMaxBasisTerms.
inline std::size_t term_count(std::size_t n, unsigned p) {
    if (n < 1) {
        throw std::invalid_argument("term_count: need at least one variable");
    }
    // C(n+k, k) = C(n+k-1, k-1) * (n+k) / k stays integral at every step.
    std::size_t r = 1;
    for (unsigned k = 1; k <= p; ++k) {
        const std::size_t f = n + k;
        if (r > std::numeric_limits<std::size_t>::max() / f) {
            throw std::overflow_error("term_count: basis size overflows");
        }
        r = r * f / k;
        if (r > kMaxBasisTerms) {
            throw std::overflow_error("term_count: basis exceeds " + std::to_string(kMaxBasisTerms) +
                                      " terms");
        }
    }
    return r;
}

/// Probabilists' Hermite polynomial He_k(x).
inline double hermite(unsigned k, double x) {
    if (k == 0) return 1.0;
    double prev = 1.0;
    double cur = x;
    for (unsigned i = 1; i < k; ++i) {
        const double next = x * cur - static_cast<double>(i) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

/// Product of He_{alpha_i}(xi_i) over all variables.
inline double eval_basis(const MultiIndex& alpha, std::span<const double> xi) {
    if (alpha.size() != xi.size()) {
        throw std::invalid_argument("eval_basis: multi-index has " + std::to_string(alpha.size()) +
                                    " variables, sample has " + std::to_string(xi.size()));
    }
    double v = 1.0;
    for (std::size_t i = 0; i < xi.size(); ++i) {
        v *= hermite(alpha[i], xi[i]);
    }
    return v;
}

inline double factorial(unsigned k) {
    double f = 1.0;
    for (unsigned i = 2; i <= k; ++i) f *= i;
    return f;
}

/// <psi_alpha^2> under the standard Gaussian measure: prod alpha_i!.
inline double norm_sq(const MultiIndex& alpha) {
    double v = 1.0;
    for (unsigned a : alpha.exponents) v *= factorial(a);
    return v;
}

/// <x He_a He_b> for a single standard Gaussian variable.
inline double univariate_linear_triple(unsigned a, unsigned b) {
    if (b + 1 == a) return factorial(a);
    if (a + 1 == b) return factorial(b);
    return 0.0;
}

/// Hermite coefficients of exp(mu + sigma * xi) on He_0 .. He_p:
/// c_k = exp(mu + sigma^2 / 2) sigma^k / k!.
inline std::vector<double> lognormal_coeffs(double mu, double sigma, unsigned p) {
    if (sigma < 0.0) {
        throw std::invalid_argument("lognormal_coeffs: sigma must be nonnegative");
    }
    std::vector<double> c(p + 1);
    const double scale = std::exp(mu + 0.5 * sigma * sigma);
    double term = 1.0;
    for (unsigned k = 0; k <= p; ++k) {
        if (k > 0) term *= sigma / static_cast<double>(k);
        c[k] = scale * term;
    }
    return c;
}

// -----------------------------------------------------------------------------
// Gauss-Hermite quadrature (probabilists' weight, weights sum to one)
// -----------------------------------------------------------------------------

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Hermite rule for E[f(xi)], xi ~ N(0,1). Exact for
/// polynomials of degree <= 2n-1.
inline QuadratureRule gauss_hermite(unsigned n) {
    if (n == 0) {
        throw std::invalid_argument("gauss_hermite: need at least one point");
    }
    // Golub-Welsch for starting values, then Newton on the normalized
    // recurrence h_k = He_k / sqrt(k!) so the weights come out accurately.
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (unsigned k = 1; k < n; ++k) {
        jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi, Eigen::EigenvaluesOnly);

    auto normalized = [n](double x) {
        double prev = 0.0;
        double cur = 1.0;
        for (unsigned k = 0; k + 1 <= n - 1; ++k) {
            const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) /
                                std::sqrt(static_cast<double>(k + 1));
            prev = cur;
            cur = next;
        }
        // cur = h_{n-1}, prev = h_{n-2}
        const double hn = (x * cur - std::sqrt(static_cast<double>(n - 1)) * prev) /
                          std::sqrt(static_cast<double>(n));
        return std::pair{hn, cur};
    };

    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (unsigned i = 0; i < n; ++i) {
        double x = eig.eigenvalues()(i);
        for (int it = 0; it < 8; ++it) {
            auto [hn, hn1] = normalized(x);
            const double dx = hn / (std::sqrt(static_cast<double>(n)) * hn1);
            x -= dx;
            if (std::abs(dx) <= 1e-15 * std::max(1.0, std::abs(x))) break;
        }
        const double hn1 = normalized(x).second;
        rule.nodes[i] = x;
        rule.weights[i] = 1.0 / (static_cast<double>(n) * hn1 * hn1);
    }
    // symmetrize: the rule is exactly symmetric about zero
    for (unsigned i = 0; i < n / 2; ++i) {
        const unsigned j = n - 1 - i;
        const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.nodes[i] = -x;
        rule.nodes[j] = x;
        rule.weights[i] = rule.weights[j] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

/// Calls f(xi, weight) for every node of the tensor product of `level`-point
/// rules in `dims` dimensions.
template <typename F>
void for_each_tensor_node(std::size_t dims, unsigned level, F&& f) {
    const QuadratureRule rule = gauss_hermite(level);
    std::vector<std::size_t> idx(dims, 0);
    std::vector<double> xi(dims);
    while (true) {
        double w = 1.0;
        for (std::size_t d = 0; d < dims; ++d) {
            xi[d] = rule.nodes[idx[d]];
            w *= rule.weights[idx[d]];
        }
        f(std::span<const double>(xi), w);
        std::size_t d = 0;
        while (d < dims && ++idx[d] == level) {
            idx[d] = 0;
            ++d;
        }
        if (d == dims) break;
    }
}

// -----------------------------------------------------------------------------
// ChaosBasis
// -----------------------------------------------------------------------------

/// All multi-indices with |alpha| <= p in n variables, graded and, within one
/// degree, in descending lexicographic order of the exponent vector. For n=2,
/// p=2 this is (1, xi_1, xi_2, xi_1^2-1, xi_1 xi_2, xi_2^2-1).
inline std::vector<MultiIndex> graded_indices(std::size_t n, unsigned p) {
    std::vector<MultiIndex> out;
    out.reserve(term_count(n, p));
    std::vector<unsigned> e(n, 0);
    // fill variables [var, n) with exactly `remaining` total degree
    auto rec = [&](auto&& self, std::size_t var, unsigned remaining) -> void {
        if (var + 1 == n) {
            e[var] = remaining;
            out.emplace_back(e);
            return;
        }
        for (unsigned a = remaining + 1; a-- > 0;) {
            e[var] = a;
            self(self, var + 1, remaining - a);
        }
    };
    for (unsigned d = 0; d <= p; ++d) rec(rec, 0, d);
    return out;
}

class ChaosBasis {
public:
    /// One nonzero entry of a triple-product row: <xi_m psi_j psi_col>.
    struct TripleEntry {
        std::size_t col;
        double value;
    };

    ChaosBasis() = default;

    ChaosBasis(std::size_t n, unsigned p) : n_(n), p_(p), indices_(graded_indices(n, p)) {
        norms_.reserve(indices_.size());
        for (std::size_t j = 0; j < indices_.size(); ++j) {
            norms_.push_back(pcgrid::norm_sq(indices_[j]));
            lookup_.emplace(indices_[j], j);
        }
        triples_.assign(n_, std::vector<std::vector<TripleEntry>>(indices_.size()));
        for (std::size_t m = 0; m < n_; ++m) {
            for (std::size_t j = 0; j < indices_.size(); ++j) {
                // Only alpha_j +- e_m can couple through xi_m.
                for (int shift : {-1, +1}) {
                    MultiIndex other = indices_[j];
                    if (shift < 0 && other.exponents[m] == 0) continue;
                    other.exponents[m] = static_cast<unsigned>(static_cast<int>(other.exponents[m]) + shift);
                    auto it = lookup_.find(other);
                    if (it == lookup_.end()) continue;
                    triples_[m][j].push_back({it->second, linear_triple(m, j, it->second)});
                }
                std::sort(triples_[m][j].begin(), triples_[m][j].end(),
                          [](const TripleEntry& a, const TripleEntry& b) { return a.col < b.col; });
            }
        }
    }

    [[nodiscard]] std::size_t variables() const { return n_; }
    [[nodiscard]] unsigned order() const { return p_; }
    [[nodiscard]] std::size_t size() const { return indices_.size(); }
    [[nodiscard]] const std::vector<MultiIndex>& indices() const { return indices_; }
    [[nodiscard]] const MultiIndex& index(std::size_t j) const { return indices_.at(j); }
    [[nodiscard]] double norm_sq(std::size_t j) const { return norms_.at(j); }
    [[nodiscard]] const std::vector<double>& norms() const { return norms_; }

    [[nodiscard]] std::optional<std::size_t> find(const MultiIndex& alpha) const {
        auto it = lookup_.find(alpha);
        if (it == lookup_.end()) return std::nullopt;
        return it->second;
    }

    /// Basis position of xi_var^power (power <= p).
    [[nodiscard]] std::size_t power_term(std::size_t var, unsigned power = 1) const {
        auto j = find(MultiIndex::unit(n_, var, power));
        if (!j) throw std::out_of_range("power_term: xi^" + std::to_string(power) + " not in basis");
        return *j;
    }

    /// <xi_m psi_j psi_k> from the closed-form univariate identity.
    [[nodiscard]] double linear_triple(std::size_t m, std::size_t j, std::size_t k) const {
        const MultiIndex& a = indices_.at(j);
        const MultiIndex& b = indices_.at(k);
        if (m >= n_) throw std::out_of_range("linear_triple: variable index out of range");
        double v = 1.0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (i == m) {
                v *= univariate_linear_triple(a[i], b[i]);
            } else if (a[i] != b[i]) {
                return 0.0;
            } else {
                v *= factorial(a[i]);
            }
            if (v == 0.0) return 0.0;
        }
        return v;
    }

    /// Sparse row j of the triple table for variable m.
    [[nodiscard]] const std::vector<TripleEntry>& triple_row(std::size_t m, std::size_t j) const {
        return triples_.at(m).at(j);
    }

    [[nodiscard]] double evaluate(std::size_t j, std::span<const double> xi) const {
        return eval_basis(indices_.at(j), xi);
    }

    /// sum_j coeffs[j] psi_j(xi)
    [[nodiscard]] double expand(std::span<const double> coeffs, std::span<const double> xi) const {
        double v = 0.0;
        for (std::size_t j = 0; j < coeffs.size() && j < size(); ++j) {
            if (coeffs[j] != 0.0) v += coeffs[j] * evaluate(j, xi);
        }
        return v;
    }

    /// Human-readable label such as "1", "x1", "x1^2-1" or "x1*x2" (1-based).
    [[nodiscard]] std::string label(std::size_t j) const {
        const MultiIndex& a = indices_.at(j);
        std::string s;
        for (std::size_t i = 0; i < n_; ++i) {
            if (a[i] == 0) continue;
            if (!s.empty()) s += '*';
            s += "He" + std::to_string(a[i]) + "(x" + std::to_string(i + 1) + ")";
        }
        return s.empty() ? "1" : s;
    }

private:
    std::size_t n_ = 0;
    unsigned p_ = 0;
    std::vector<MultiIndex> indices_;
    std::vector<double> norms_;
    std::map<MultiIndex, std::size_t> lookup_;
    // triples_[m][j] -> nonzero <xi_m psi_j psi_k>
    std::vector<std::vector<std::vector<TripleEntry>>> triples_;
};

}  // namespace pcgrid
