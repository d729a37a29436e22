#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace ko {

/// Dense real symmetric n x n matrix, row-major. Entries are exactly
/// symmetric after construction.
class SymMatrix {
public:
    /// Builds from row-major entries. Asymmetry up to `rel_tol * max(1, |X|)`
    /// is averaged away; anything larger, or a non-finite entry, is rejected.
    static SymMatrix from_row_major(std::size_t n, std::span<const double> entries,
                                    double rel_tol = 1e-12);
    static SymMatrix identity(std::size_t n);
    static SymMatrix diagonal(std::span<const double> diag);
    static SymMatrix zeros(std::size_t n);

    std::size_t n() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }
    std::span<const double> entries() const noexcept { return data_; }

    /// Writes a(i,j) and a(j,i).
    void set(std::size_t i, std::size_t j, double v);

    double trace() const noexcept;
    double frobenius_norm() const noexcept;

    SymMatrix operator+(const SymMatrix& other) const;
    SymMatrix operator-(const SymMatrix& other) const;
    SymMatrix scaled(double t) const;

    friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

private:
    explicit SymMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// Eigenvalues in non-decreasing order.
struct Spectrum {
    std::vector<double> values;
};

/// Eigenvalues ascending; column j of `vectors` (row-major n x n) is the unit
/// eigenvector for values[j].
struct Eigensystem {
    Spectrum spectrum;
    std::vector<double> vectors;
};

/// Ellipticity constants 0 < lambda_lo <= lambda_hi.
class PucciParams {
public:
    PucciParams(double lambda_lo, double lambda_hi);

    double lambda_lo() const noexcept { return lo_; }
    double lambda_hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

/// k orthonormal vectors in R^n spanning a point of the Grassmannian G(k, n).
class Frame {
public:
    /// Each inner vector is one basis vector. Rejects frames whose Gram matrix
    /// deviates from the identity by more than 1e-10.
    explicit Frame(std::vector<std::vector<double>> vectors);

    std::size_t k() const noexcept { return vectors_.size(); }
    std::size_t n() const noexcept { return vectors_.front().size(); }
    const std::vector<std::vector<double>>& vectors() const noexcept { return vectors_; }

private:
    std::vector<std::vector<double>> vectors_;
};

inline constexpr double kDefaultZeroThreshold = 1e-12;

/// Cyclic Jacobi eigensolver. Runs until the off-diagonal Frobenius norm
/// falls below 1e-12 |X|.
Eigensystem eigen_decompose(const SymMatrix& x);
Spectrum eigenvalues(const SymMatrix& x);

/// Sum of the k largest eigenvalues (the truncated Laplacian P+_k).
double pplus_k(const SymMatrix& x, std::size_t k);
double pplus_k(const Spectrum& s, std::size_t k);

/// Sum of positive eigenvalues (degenerate maximal Pucci operator M+_{0,1}).
/// Eigenvalues with |mu| <= rel_zero * max(1, |X|) count as zero.
double mplus_01(const SymMatrix& x, double rel_zero = kDefaultZeroThreshold);
double mplus_01(const Spectrum& s, double scale, double rel_zero = kDefaultZeroThreshold);

/// Pucci inf-operator: lambda * sum(mu > 0) + Lambda * sum(mu < 0).
double mminus(const SymMatrix& x, const PucciParams& p);
double mminus(const Spectrum& s, const PucciParams& p);

/// sum_i <X w_i, w_i> over the frame.
double subspace_trace(const SymMatrix& x, const Frame& w);

/// Frame spanned by the eigenvectors of the k largest eigenvalues.
Frame top_eigen_frame(const SymMatrix& x, std::size_t k);

struct PPlusK {
    std::size_t k;
};
struct MPlus01 {};
struct MMinus {
    PucciParams params;
};
using Operator = std::variant<PPlusK, MPlus01, MMinus>;

double evaluate(const Operator& op, const SymMatrix& x);
double evaluate(const Operator& op, const Spectrum& s, double scale);

/// Applies `op` to every matrix. OpenMP-parallel over the batch.
std::vector<double> evaluate_batch(const Operator& op, std::span<const SymMatrix> xs);
/// Serial reference for evaluate_batch; results are bitwise identical.
std::vector<double> evaluate_batch_serial(const Operator& op, std::span<const SymMatrix> xs);

}  // namespace ko
