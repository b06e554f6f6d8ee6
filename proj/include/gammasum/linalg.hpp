#pragma once

#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <vector>

namespace gammasum {

/// Largest branch count the eigen-solver and the Lauricella kernels accept.
inline constexpr std::size_t kMaxBranches = 32;

/// Dense row-major n x n matrix of doubles.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}
    SquareMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static SquareMatrix identity(std::size_t n);

    std::size_t size() const noexcept { return n_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }

    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * n_, n_}; }

    bool operator==(const SquareMatrix&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// Pairwise correlation coefficients between gamma branches.
///
/// Construction validates: symmetric, unit diagonal, every entry in [0, 1],
/// and the element-wise square-root matrix C positive definite (Cholesky
/// attempt). Inputs within 1e-12 of symmetric / unit diagonal are accepted
/// and snapped exactly.
class CorrelationMatrix {
public:
    explicit CorrelationMatrix(SquareMatrix rho);

    /// Uncorrelated branches.
    static CorrelationMatrix identity(std::size_t n);
    /// rho_ij = value for all i != j.
    static CorrelationMatrix constant(std::size_t n, double value);
    /// rho_ij = base^|i-j|.
    static CorrelationMatrix exponential(std::size_t n, double base);

    std::size_t size() const noexcept { return rho_.size(); }
    double operator()(std::size_t i, std::size_t j) const noexcept { return rho_(i, j); }
    const SquareMatrix& matrix() const noexcept { return rho_; }

private:
    SquareMatrix rho_;
};

/// Per-branch gamma scale parameters, all strictly positive.
class ScaleVector {
public:
    explicit ScaleVector(std::vector<double> betas);

    std::size_t size() const noexcept { return betas_.size(); }
    double operator[](std::size_t i) const noexcept { return betas_[i]; }
    std::span<const double> values() const noexcept { return betas_; }

private:
    std::vector<double> betas_;
};

/// Eigenvalues of A = DC (ascending) and det(A).
struct Spectrum {
    std::vector<double> lambdas;
    double det_a = 1.0;

    std::size_t size() const noexcept { return lambdas.size(); }
    /// Sum of log(lambda); finite even when det_a under/overflows.
    double log_det() const noexcept;
    double trace() const noexcept;
    double min_lambda() const noexcept { return lambdas.front(); }
    double max_lambda() const noexcept { return lambdas.back(); }
};

/// Shared shape alpha, per-branch scales and correlations of the model.
struct GammaSumParams {
    double alpha;
    ScaleVector betas;
    CorrelationMatrix rho;

    /// Throws std::invalid_argument on alpha <= 0 or dimension mismatch.
    void validate() const;
    std::size_t size() const noexcept { return betas.size(); }
};

/// C[i][j] = sqrt(rho[i][j]).
SquareMatrix build_c(const CorrelationMatrix& rho);

/// S = D^{1/2} C D^{1/2}; similar to A = DC, hence same eigenvalues, and symmetric.
SquareMatrix symmetric_equivalent(const ScaleVector& betas, const SquareMatrix& c);

/// Lower-triangular Cholesky factor L with L L^T = m. Throws
/// NotPositiveDefinite naming the first leading minor whose pivot is not
/// above `rel_pivot_tol` times the corresponding diagonal entry.
SquareMatrix cholesky_factor(const SquareMatrix& m, double rel_pivot_tol = 1e-12);

/// det(m) through the Cholesky factorization (independent of the eigen-solver).
double cholesky_determinant(const SquareMatrix& m);

/// Cyclic Jacobi eigenvalues of a symmetric positive definite matrix.
///
/// Sweeps until the off-diagonal Frobenius mass is at most `tol` times the
/// Frobenius norm of `s`; at most 30 sweeps. Rejects eigenvalues
/// <= tol * max eigenvalue as singular.
Spectrum eigenvalues_symmetric(const SquareMatrix& s, double tol = 1e-14);

/// Composition build_c -> symmetric_equivalent -> eigenvalues_symmetric.
Spectrum spectrum_of(const GammaSumParams& params);

/// n rows of n comma-separated decimals; blank lines and '#' comments skipped.
CorrelationMatrix parse_correlation_csv(std::istream& in);
CorrelationMatrix load_correlation_csv(const std::filesystem::path& path);

}  // namespace gammasum
