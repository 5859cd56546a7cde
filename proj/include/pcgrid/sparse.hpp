#pragma once

// Sparse symmetric matrices and their direct factorization.

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <atomic>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcgrid {

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Coordinate-format matrix; duplicates are summed on compression.
struct SparseTriplets {
    std::size_t dimension = 0;
    std::vector<Triplet> entries;

    SparseTriplets() = default;
    explicit SparseTriplets(std::size_t dim) : dimension(dim) {}

    void add(std::size_t row, std::size_t col, double value) { entries.push_back({row, col, value}); }

    /// Symmetric two-terminal stamp of `value` between a and b (either may be absent).
    void stamp(std::optional<std::size_t> a, std::optional<std::size_t> b, double value) {
        if (a) add(*a, *a, value);
        if (b) add(*b, *b, value);
        if (a && b) {
            add(*a, *b, -value);
            add(*b, *a, -value);
        }
    }
};

class SingularMatrixError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Column-compressed square matrix.
class CompressedMatrix {
public:
    using Storage = Eigen::SparseMatrix<double, Eigen::ColMajor, std::ptrdiff_t>;

    CompressedMatrix() = default;
    explicit CompressedMatrix(Storage m) : m_(std::move(m)) {
        m_.prune(0.0);
        m_.makeCompressed();
    }

    [[nodiscard]] std::size_t dimension() const { return static_cast<std::size_t>(m_.rows()); }
    [[nodiscard]] std::size_t nonzeros() const { return static_cast<std::size_t>(m_.nonZeros()); }
    [[nodiscard]] const Storage& storage() const { return m_; }

    [[nodiscard]] double at(std::size_t r, std::size_t c) const {
        return m_.coeff(static_cast<std::ptrdiff_t>(r), static_cast<std::ptrdiff_t>(c));
    }

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const {
        Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
        Eigen::Map<Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
        yv.noalias() = m_ * xv;
    }

    [[nodiscard]] std::vector<std::vector<double>> to_dense() const {
        std::vector<std::vector<double>> d(dimension(), std::vector<double>(dimension(), 0.0));
        for (Eigen::Index k = 0; k < m_.outerSize(); ++k) {
            for (Storage::InnerIterator it(m_, k); it; ++it) {
                d[static_cast<std::size_t>(it.row())][static_cast<std::size_t>(it.col())] = it.value();
            }
        }
        return d;
    }

    [[nodiscard]] bool is_symmetric(double tol = 0.0) const {
        Storage t = m_.transpose();
        Storage diff = m_ - t;
        for (Eigen::Index k = 0; k < diff.outerSize(); ++k) {
            for (Storage::InnerIterator it(diff, k); it; ++it) {
                if (std::abs(it.value()) > tol) return false;
            }
        }
        return true;
    }

    friend CompressedMatrix operator+(const CompressedMatrix& a, const CompressedMatrix& b) {
        return CompressedMatrix(Storage(a.m_ + b.m_));
    }
    friend CompressedMatrix operator*(double s, const CompressedMatrix& a) {
        return CompressedMatrix(Storage(s * a.m_));
    }

private:
    Storage m_;
};

inline CompressedMatrix compress(const SparseTriplets& t) {
    std::vector<Eigen::Triplet<double, std::ptrdiff_t>> trips;
    trips.reserve(t.entries.size());
    for (const Triplet& e : t.entries) {
        if (e.row >= t.dimension || e.col >= t.dimension) {
            throw std::out_of_range("compress: entry (" + std::to_string(e.row) + ", " +
                                    std::to_string(e.col) + ") outside dimension " +
                                    std::to_string(t.dimension));
        }
        trips.emplace_back(static_cast<std::ptrdiff_t>(e.row), static_cast<std::ptrdiff_t>(e.col), e.value);
    }
    const auto n = static_cast<std::ptrdiff_t>(t.dimension);
    CompressedMatrix::Storage m(n, n);
    m.setFromTriplets(trips.begin(), trips.end());
    return CompressedMatrix(std::move(m));
}

/// Counters shared by the solve paths; atomics so concurrent Monte Carlo
/// workers can report into one instance.
struct SolverStats {
    std::atomic<std::size_t> factorizations{0};
    std::atomic<std::size_t> solves{0};
};

/// Sparse LDL^T factorization with AMD fill-reducing ordering. Immutable after
/// construction; solve() may be called concurrently.
class Factorization {
public:
    explicit Factorization(const CompressedMatrix& m) : n_(m.dimension()) {
        if (n_ == 0) return;
        ldlt_ = std::make_unique<Solver>();
        ldlt_->compute(m.storage());
        if (ldlt_->info() != Eigen::Success) {
            throw SingularMatrixError("factorization failed: matrix is numerically singular");
        }
        const auto& d = ldlt_->vectorD();
        const double dmax = d.cwiseAbs().maxCoeff();
        const double dmin = d.cwiseAbs().minCoeff();
        if (!(dmax > 0.0) || !std::isfinite(dmax) || dmin <= 1e-13 * dmax) {
            throw SingularMatrixError("factorization failed: zero pivot (floating node or bad step?)");
        }
        positive_definite_ = (d.array() > 0.0).all();
    }

    [[nodiscard]] std::size_t dimension() const { return n_; }
    [[nodiscard]] bool positive_definite() const { return positive_definite_; }

    void solve(std::span<const double> rhs, std::span<double> x) const {
        if (rhs.size() != n_ || x.size() != n_) throw std::invalid_argument("solve: size mismatch");
        if (n_ == 0) return;
        Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(n_));
        Eigen::Map<Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(n_));
        xv = ldlt_->solve(b);
    }

    [[nodiscard]] std::vector<double> solve(std::span<const double> rhs) const {
        std::vector<double> x(rhs.size());
        solve(rhs, x);
        return x;
    }

private:
    using Solver =
        Eigen::SimplicialLDLT<CompressedMatrix::Storage, Eigen::Lower, Eigen::AMDOrdering<std::ptrdiff_t>>;

    std::size_t n_ = 0;
    bool positive_definite_ = true;
    std::unique_ptr<Solver> ldlt_;
};

inline Factorization factor(const CompressedMatrix& m, SolverStats* stats = nullptr) {
    Factorization f(m);
    if (stats) ++stats->factorizations;
    return f;
}

}  // namespace pcgrid
