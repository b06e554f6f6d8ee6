#include "gammasum/linalg.hpp"

#include "gammasum/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>
#include <string>

namespace gammasum {

namespace {

constexpr double kSnapTol = 1e-12;

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double frobenius(const SquareMatrix& m) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (double v : m.row(i)) acc += v * v;
    return std::sqrt(acc);
}

double off_diagonal_mass(const SquareMatrix& m) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j)
            if (i != j) acc += m(i, j) * m(i, j);
    return std::sqrt(acc);
}

}  // namespace

SquareMatrix::SquareMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : n_(rows.size()), data_() {
    data_.reserve(n_ * n_);
    for (const auto& r : rows) {
        if (r.size() != n_) throw std::invalid_argument("SquareMatrix: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

SquareMatrix SquareMatrix::identity(std::size_t n) {
    SquareMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CorrelationMatrix::CorrelationMatrix(SquareMatrix rho) : rho_(std::move(rho)) {
    const std::size_t n = rho_.size();
    if (n == 0) throw std::invalid_argument("correlation matrix must have at least one branch");
    if (n > kMaxBranches)
        throw std::invalid_argument("correlation matrix larger than " + std::to_string(kMaxBranches) +
                                    " branches is not supported");
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(rho_(i, i)) || std::abs(rho_(i, i) - 1.0) > kSnapTol)
            throw std::invalid_argument("correlation matrix diagonal entry " + std::to_string(i) +
                                        " is not 1");
        rho_(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = rho_(i, j);
            const double b = rho_(j, i);
            if (!std::isfinite(a) || !std::isfinite(b) || std::abs(a - b) > kSnapTol)
                throw std::invalid_argument("correlation matrix is not symmetric at (" +
                                            std::to_string(i) + "," + std::to_string(j) + ")");
            if (a < 0.0 || a > 1.0)
                throw std::invalid_argument("correlation coefficient at (" + std::to_string(i) + "," +
                                            std::to_string(j) + ") outside [0, 1]");
            rho_(j, i) = a;
        }
    }
    // Throws NotPositiveDefinite with the failing leading minor.
    (void)cholesky_factor(build_c(*this));
}

CorrelationMatrix CorrelationMatrix::identity(std::size_t n) {
    return CorrelationMatrix(SquareMatrix::identity(n));
}

CorrelationMatrix CorrelationMatrix::constant(std::size_t n, double value) {
    SquareMatrix m(n, value);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return CorrelationMatrix(std::move(m));
}

CorrelationMatrix CorrelationMatrix::exponential(std::size_t n, double base) {
    SquareMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m(i, j) = std::pow(base, static_cast<double>(i > j ? i - j : j - i));
    return CorrelationMatrix(std::move(m));
}

ScaleVector::ScaleVector(std::vector<double> betas) : betas_(std::move(betas)) {
    if (betas_.empty()) throw std::invalid_argument("scale vector must be non-empty");
    for (std::size_t i = 0; i < betas_.size(); ++i)
        if (!(betas_[i] > 0.0) || !std::isfinite(betas_[i]))
            throw std::invalid_argument("scale parameter beta_" + std::to_string(i + 1) +
                                        " must be positive and finite");
}

double Spectrum::log_det() const noexcept {
    double acc = 0.0;
    for (double l : lambdas) acc += std::log(l);
    return acc;
}

double Spectrum::trace() const noexcept {
    return std::accumulate(lambdas.begin(), lambdas.end(), 0.0);
}

void GammaSumParams::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("shape alpha must be positive and finite");
    if (betas.size() != rho.size())
        throw std::invalid_argument("beta count (" + std::to_string(betas.size()) +
                                    ") does not match correlation dimension (" +
                                    std::to_string(rho.size()) + ")");
}

SquareMatrix build_c(const CorrelationMatrix& rho) {
    const std::size_t n = rho.size();
    SquareMatrix c(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) c(i, j) = i == j ? 1.0 : std::sqrt(rho(i, j));
    return c;
}

SquareMatrix symmetric_equivalent(const ScaleVector& betas, const SquareMatrix& c) {
    const std::size_t n = c.size();
    if (betas.size() != n)
        throw std::invalid_argument("symmetric_equivalent: " + std::to_string(betas.size()) +
                                    " scales for a " + std::to_string(n) + "x" + std::to_string(n) +
                                    " matrix");
    std::vector<double> root(n);
    for (std::size_t i = 0; i < n; ++i) root[i] = std::sqrt(betas[i]);
    SquareMatrix s(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s(i, j) = i == j ? betas[i] * c(i, i) : root[i] * c(i, j) * root[j];
    // Bit-exact symmetry regardless of multiplication order.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) s(j, i) = s(i, j);
    return s;
}

SquareMatrix cholesky_factor(const SquareMatrix& m, double rel_pivot_tol) {
    const std::size_t n = m.size();
    SquareMatrix l(n);
    for (std::size_t j = 0; j < n; ++j) {
        double pivot = m(j, j);
        for (std::size_t k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
        if (!(pivot > rel_pivot_tol * std::abs(m(j, j))))
            throw NotPositiveDefinite("matrix is not positive definite: leading minor " +
                                          std::to_string(j + 1) + " has non-positive pivot",
                                      j + 1);
        l(j, j) = std::sqrt(pivot);
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = m(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
            l(i, j) = v / l(j, j);
        }
    }
    return l;
}

double cholesky_determinant(const SquareMatrix& m) {
    const SquareMatrix l = cholesky_factor(m);
    double det = 1.0;
    for (std::size_t i = 0; i < l.size(); ++i) det *= l(i, i) * l(i, i);
    return det;
}

Spectrum eigenvalues_symmetric(const SquareMatrix& s, double tol) {
    const std::size_t n = s.size();
    if (n == 0) throw std::invalid_argument("eigenvalues_symmetric: empty matrix");
    if (n > kMaxBranches) throw std::invalid_argument("eigenvalues_symmetric: matrix too large");
    if (!(tol > 0.0)) throw std::invalid_argument("eigenvalues_symmetric: tol must be positive");

    const double norm = frobenius(s);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(s(i, j) - s(j, i)) > kSnapTol * norm)
                throw std::invalid_argument("eigenvalues_symmetric: matrix is not symmetric");

    constexpr int kMaxSweeps = 30;
    SquareMatrix a = s;
    bool converged = off_diagonal_mass(a) <= tol * norm;
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                // Rutishauser's form of the rotation: small-angle root of
                // t^2 + 2 theta t - 1 = 0.
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (std::isinf(theta * theta)) t = 0.5 / std::abs(theta);
                if (theta < 0.0) t = -t;
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                const double tau = sn / (1.0 + c);

                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = a(q, p) = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = a(r, p);
                    const double arq = a(r, q);
                    a(r, p) = a(p, r) = arp - sn * (arq + tau * arp);
                    a(r, q) = a(q, r) = arq + sn * (arp - tau * arq);
                }
            }
        }
        converged = off_diagonal_mass(a) <= tol * norm;
    }
    if (!converged)
        throw NumericalError("Jacobi eigen-solver did not converge in 30 sweeps (ill-conditioned input)");

    Spectrum out;
    out.lambdas.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.lambdas[i] = a(i, i);
    std::sort(out.lambdas.begin(), out.lambdas.end());
    if (!(out.lambdas.front() > tol * out.lambdas.back()))
        throw NotPositiveDefinite("matrix is singular or indefinite: smallest eigenvalue " +
                                      std::to_string(out.lambdas.front()) + " relative to largest " +
                                      std::to_string(out.lambdas.back()),
                                  n);
    out.det_a = 1.0;
    for (double l : out.lambdas) out.det_a *= l;
    return out;
}

Spectrum spectrum_of(const GammaSumParams& params) {
    params.validate();
    return eigenvalues_symmetric(symmetric_equivalent(params.betas, build_c(params.rho)));
}

CorrelationMatrix parse_correlation_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        std::vector<double> row;
        std::stringstream ss(t);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const std::string c = trim(cell);
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(c, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (c.empty() || used != c.size())
                throw std::invalid_argument("correlation CSV line " + std::to_string(line_no) +
                                            ": cannot parse '" + c + "'");
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    const std::size_t n = rows.size();
    if (n == 0) throw std::invalid_argument("correlation CSV is empty");
    SquareMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n)
            throw std::invalid_argument("correlation CSV row " + std::to_string(i + 1) + " has " +
                                        std::to_string(rows[i].size()) + " entries, expected " +
                                        std::to_string(n));
        for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
    }
    return CorrelationMatrix(std::move(m));
}

CorrelationMatrix load_correlation_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open correlation CSV '" + path.string() + "'");
    return parse_correlation_csv(in);
}

}  // namespace gammasum
