#pragma once

#include "gammasum/eval_result.hpp"
#include "gammasum/inversion.hpp"
#include "gammasum/linalg.hpp"

#include <span>
#include <vector>

namespace gammasum {

/// Which evaluator backs cdf/pdf.
enum class EvalPath { automatic, series, inversion };

struct EvalOptions {
    EvalPath path = EvalPath::automatic;
    /// Absolute accuracy requested from the series path for the cdf/pdf value.
    double target_abs_err = 1e-15;
    InversionConfig inversion{};
};

/// Distribution of Y = X_1 + ... + X_N, X_n ~ Gamma(alpha, beta_n), with
/// pairwise correlations rho_ij.
///
///   F_Y(y) = y^{N a} / (det(A)^a Gamma(1 + N a)) Phi2(a..a; 1 + N a; -y/l_1..-y/l_N)
///   f_Y(y) = y^{N a - 1} / (det(A)^a Gamma(N a)) Phi2(a..a; N a; -y/l_1..-y/l_N)
///
/// where l_n are the eigenvalues of A = diag(beta) C, C_ij = sqrt(rho_ij).
/// Immutable after construction; every member function is safe to call
/// concurrently.
class GammaSumDistribution {
public:
    /// Throws on invalid parameters or a C that is not positive definite.
    explicit GammaSumDistribution(GammaSumParams params);

    const GammaSumParams& params() const noexcept { return params_; }
    const Spectrum& spectrum() const noexcept { return spectrum_; }
    std::size_t branches() const noexcept { return spectrum_.size(); }
    double alpha() const noexcept { return params_.alpha; }

    /// 0 for y <= 0.
    EvalResult cdf(double y, const EvalOptions& opts = {}) const;
    /// 0 for y < 0. At y = 0: 0 when N alpha > 1, det(A)^{-alpha} when
    /// N alpha = 1, std::domain_error when N alpha < 1 (density diverges).
    EvalResult pdf(double y, const EvalOptions& opts = {}) const;

    double mean() const noexcept;      // alpha * sum(lambda)
    double variance() const noexcept;  // alpha * sum(lambda^2)

    /// y with |cdf(y) - p| <= tol, by Illinois regula falsi on a bracket
    /// grown from [max(0, mean - 6 sd), mean + 6 sd].
    double quantile(double p, double tol = 1e-12, const EvalOptions& opts = {}) const;

    /// True when the automatic path would try the series at y.
    bool series_domain(double y) const noexcept;

private:
    EvalResult series_cdf(double y, double target) const;
    EvalResult series_pdf(double y, double target) const;

    GammaSumParams params_;
    Spectrum spectrum_;
};

/// Maximal ratio combining over correlated Nakagami-m branches.
struct NakagamiMrcConfig {
    double m;
    std::vector<double> gammas;  // per-branch average SNR, linear scale
    CorrelationMatrix rho;

    void validate() const;  // m >= 0.5, gammas > 0, dimensions agree
    /// alpha = m, beta_n = gamma_n / m.
    GammaSumParams to_params() const;
};

/// P(combined SNR <= gamma_th) = F_Y(gamma_th) for the mapped parameters.
EvalResult outage_probability(const NakagamiMrcConfig& cfg, double gamma_th, const EvalOptions& opts = {});

double db_to_linear(double db) noexcept;
double linear_to_db(double linear) noexcept;

enum class Quantity { pdf, cdf };

/// Evaluates `kind` at every point of `ys`, OpenMP-parallel over points.
/// Results are in input order and identical to evaluate_grid_serial.
/// The first failing point's exception is rethrown after the loop.
std::vector<EvalResult> evaluate_grid(const GammaSumDistribution& d, std::span<const double> ys, Quantity kind,
                                      const EvalOptions& opts = {});

/// Serial reference for evaluate_grid.
std::vector<EvalResult> evaluate_grid_serial(const GammaSumDistribution& d, std::span<const double> ys,
                                             Quantity kind, const EvalOptions& opts = {});

}  // namespace gammasum
