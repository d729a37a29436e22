#include "ko/matrixops.hpp"

#include "ko/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ko {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Input: return "input error";
        case ErrorKind::Parameter: return "parameter error";
        case ErrorKind::Hypothesis: return "hypothesis error";
        case ErrorKind::Domain: return "domain error";
        case ErrorKind::Integration: return "integration failure";
    }
    return "error";
}

SymMatrix SymMatrix::from_row_major(std::size_t n, std::span<const double> entries,
                                    double rel_tol) {
    if (n == 0) fail(ErrorKind::Input, "matrix dimension must be at least 1");
    if (entries.size() != n * n) {
        fail(ErrorKind::Input, "expected " + std::to_string(n * n) + " entries, got " +
                                   std::to_string(entries.size()));
    }
    double norm2 = 0.0;
    for (double v : entries) {
        if (!std::isfinite(v)) fail(ErrorKind::Input, "matrix has a non-finite entry");
        norm2 += v * v;
    }
    const double tol = rel_tol * std::max(1.0, std::sqrt(norm2));
    SymMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m.data_[i * n + i] = entries[i * n + i];
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = entries[i * n + j];
            const double b = entries[j * n + i];
            if (std::abs(a - b) > tol) {
                fail(ErrorKind::Input, "matrix is not symmetric at (" + std::to_string(i) + "," +
                                           std::to_string(j) + ")");
            }
            const double avg = 0.5 * (a + b);
            m.data_[i * n + j] = avg;
            m.data_[j * n + i] = avg;
        }
    }
    return m;
}

SymMatrix SymMatrix::identity(std::size_t n) {
    SymMatrix m = zeros(n);
    for (std::size_t i = 0; i < n; ++i) m.data_[i * n + i] = 1.0;
    return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
    SymMatrix m = zeros(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) {
        if (!std::isfinite(diag[i])) fail(ErrorKind::Input, "matrix has a non-finite entry");
        m.data_[i * diag.size() + i] = diag[i];
    }
    return m;
}

SymMatrix SymMatrix::zeros(std::size_t n) {
    if (n == 0) fail(ErrorKind::Input, "matrix dimension must be at least 1");
    return SymMatrix(n);
}

void SymMatrix::set(std::size_t i, std::size_t j, double v) {
    if (!std::isfinite(v)) fail(ErrorKind::Input, "matrix has a non-finite entry");
    data_[i * n_ + j] = v;
    data_[j * n_ + i] = v;
}

double SymMatrix::trace() const noexcept {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += data_[i * n_ + i];
    return t;
}

double SymMatrix::frobenius_norm() const noexcept {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

SymMatrix SymMatrix::operator+(const SymMatrix& other) const {
    if (other.n_ != n_) fail(ErrorKind::Parameter, "matrix dimensions differ");
    SymMatrix m(n_);
    for (std::size_t i = 0; i < data_.size(); ++i) m.data_[i] = data_[i] + other.data_[i];
    return m;
}

SymMatrix SymMatrix::operator-(const SymMatrix& other) const {
    if (other.n_ != n_) fail(ErrorKind::Parameter, "matrix dimensions differ");
    SymMatrix m(n_);
    for (std::size_t i = 0; i < data_.size(); ++i) m.data_[i] = data_[i] - other.data_[i];
    return m;
}

SymMatrix SymMatrix::scaled(double t) const {
    SymMatrix m(n_);
    for (std::size_t i = 0; i < data_.size(); ++i) m.data_[i] = t * data_[i];
    return m;
}

PucciParams::PucciParams(double lambda_lo, double lambda_hi) : lo_(lambda_lo), hi_(lambda_hi) {
    if (!(lambda_lo > 0.0) || !(lambda_hi >= lambda_lo) || !std::isfinite(lambda_hi)) {
        fail(ErrorKind::Parameter, "Pucci constants must satisfy 0 < lambda <= Lambda");
    }
}

Frame::Frame(std::vector<std::vector<double>> vectors) : vectors_(std::move(vectors)) {
    if (vectors_.empty()) fail(ErrorKind::Input, "frame needs at least one vector");
    const std::size_t n = vectors_.front().size();
    if (n == 0 || vectors_.size() > n) fail(ErrorKind::Input, "frame size k must lie in [1, n]");
    for (const auto& v : vectors_) {
        if (v.size() != n) fail(ErrorKind::Input, "frame vectors have different lengths");
    }
    for (std::size_t i = 0; i < vectors_.size(); ++i) {
        for (std::size_t j = i; j < vectors_.size(); ++j) {
            const double g = std::inner_product(vectors_[i].begin(), vectors_[i].end(),
                                                vectors_[j].begin(), 0.0);
            if (std::abs(g - (i == j ? 1.0 : 0.0)) > 1e-10) {
                fail(ErrorKind::Input, "frame is not orthonormal");
            }
        }
    }
}

Eigensystem eigen_decompose(const SymMatrix& x) {
    const std::size_t n = x.n();
    std::vector<double> a(x.entries().begin(), x.entries().end());
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

    const double target = 1e-12 * x.frobenius_norm();
    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a[i * n + j] * a[i * n + j];
        return std::sqrt(s);
    };

    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps && off_norm() > target; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (apq == 0.0) continue;
                const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // A <- J^T A J with J the (p,q) rotation.
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k * n + p];
                    const double akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p * n + k];
                    const double aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k * n + p];
                    const double vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a[i * n + i] < a[j * n + j]; });

    Eigensystem es;
    es.spectrum.values.resize(n);
    es.vectors.resize(n * n);
    for (std::size_t col = 0; col < n; ++col) {
        const std::size_t src = order[col];
        es.spectrum.values[col] = a[src * n + src];
        for (std::size_t row = 0; row < n; ++row) es.vectors[row * n + col] = v[row * n + src];
    }
    return es;
}

Spectrum eigenvalues(const SymMatrix& x) { return eigen_decompose(x).spectrum; }

double pplus_k(const Spectrum& s, std::size_t k) {
    const std::size_t n = s.values.size();
    if (k < 1 || k > n) {
        fail(ErrorKind::Parameter,
             "k = " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
    }
    double sum = 0.0;
    for (std::size_t i = n - k; i < n; ++i) sum += s.values[i];
    return sum;
}

double pplus_k(const SymMatrix& x, std::size_t k) { return pplus_k(eigenvalues(x), k); }

double mplus_01(const Spectrum& s, double scale, double rel_zero) {
    const double cut = rel_zero * std::max(1.0, scale);
    double sum = 0.0;
    for (double mu : s.values)
        if (mu > cut) sum += mu;
    return sum;
}

double mplus_01(const SymMatrix& x, double rel_zero) {
    return mplus_01(eigenvalues(x), x.frobenius_norm(), rel_zero);
}

double mminus(const Spectrum& s, const PucciParams& p) {
    double pos = 0.0;
    double neg = 0.0;
    for (double mu : s.values) {
        if (mu > 0.0) pos += mu;
        else neg += mu;
    }
    return p.lambda_lo() * pos + p.lambda_hi() * neg;
}

double mminus(const SymMatrix& x, const PucciParams& p) { return mminus(eigenvalues(x), p); }

double subspace_trace(const SymMatrix& x, const Frame& w) {
    const std::size_t n = x.n();
    if (w.n() != n) fail(ErrorKind::Input, "frame dimension does not match matrix");
    double sum = 0.0;
    for (const auto& vec : w.vectors()) {
        for (std::size_t i = 0; i < n; ++i) {
            double xi = 0.0;
            for (std::size_t j = 0; j < n; ++j) xi += x(i, j) * vec[j];
            sum += xi * vec[i];
        }
    }
    return sum;
}

Frame top_eigen_frame(const SymMatrix& x, std::size_t k) {
    const std::size_t n = x.n();
    if (k < 1 || k > n) fail(ErrorKind::Parameter, "k outside [1, n]");
    const Eigensystem es = eigen_decompose(x);
    std::vector<std::vector<double>> vecs;
    for (std::size_t col = n - k; col < n; ++col) {
        std::vector<double> v(n);
        for (std::size_t row = 0; row < n; ++row) v[row] = es.vectors[row * n + col];
        vecs.push_back(std::move(v));
    }
    return Frame(std::move(vecs));
}

double evaluate(const Operator& op, const Spectrum& s, double scale) {
    struct Visitor {
        const Spectrum& s;
        double scale;
        double operator()(const PPlusK& o) const { return pplus_k(s, o.k); }
        double operator()(const MPlus01&) const { return mplus_01(s, scale); }
        double operator()(const MMinus& o) const { return mminus(s, o.params); }
    };
    return std::visit(Visitor{s, scale}, op);
}

double evaluate(const Operator& op, const SymMatrix& x) {
    return evaluate(op, eigenvalues(x), x.frobenius_norm());
}

std::vector<double> evaluate_batch_serial(const Operator& op, std::span<const SymMatrix> xs) {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = evaluate(op, xs[i]);
    return out;
}

std::vector<double> evaluate_batch(const Operator& op, std::span<const SymMatrix> xs) {
    std::vector<double> out(xs.size());
    const auto count = static_cast<std::ptrdiff_t>(xs.size());
    // Exceptions cannot cross the parallel region; validate k up front.
    if (const auto* p = std::get_if<PPlusK>(&op)) {
        for (const auto& x : xs)
            if (p->k < 1 || p->k > x.n()) fail(ErrorKind::Parameter, "k outside [1, n]");
    }
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) out[i] = evaluate(op, xs[i]);
    return out;
}

}  // namespace ko
