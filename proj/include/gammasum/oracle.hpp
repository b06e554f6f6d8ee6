#pragma once

#include "gammasum/distribution.hpp"
#include "gammasum/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

/// Monte Carlo ground truth for the gamma-sum model.
///
/// Each draw takes k = 2 alpha independent Gaussian vectors G with
/// covariance Sigma_ij = sqrt(rho_ij beta_i beta_j) / 2 and sets
/// X_n = sum_k G_k[n]^2. Then X_n ~ Gamma(alpha, beta_n), corr(X_i, X_j) =
/// rho_ij, and E[e^{sY}] = det(I - 2 s Sigma)^{-alpha}, which has exactly
/// the eigenvalue structure of the analytic distribution.
///
/// RNG: std::mt19937_64, one engine per sub-stream, seeded with
/// splitmix64(seed + (stream + 1) * 0x9E3779B97F4A7C15). Gaussians come from
/// Box-Muller on 53-bit uniforms in (0, 1]. Draws are split over a fixed
/// number of sub-streams, so results do not depend on the thread count.
namespace gammasum::oracle {

inline constexpr std::size_t kSubStreams = 64;

struct SampleBatch {
    std::uint64_t seed = 0;
    std::size_t n_samples = 0;
    std::vector<double> sums;                // Y per draw, in draw order
    std::vector<double> branch_means;        // per-branch sample mean of X_n
    SquareMatrix branch_correlations;        // pairwise sample correlation of X
};

/// Parallel (OpenMP over sub-streams). Requires 2 alpha to be a positive
/// integer; anything else is rejected with std::invalid_argument.
SampleBatch sample(const GammaSumParams& params, std::size_t n_samples, std::uint64_t seed);

/// Serial reference; produces a batch identical to sample().
SampleBatch sample_serial(const GammaSumParams& params, std::size_t n_samples, std::uint64_t seed);

/// Fraction of sums <= y.
double empirical_cdf(const SampleBatch& batch, double y);

/// Kolmogorov-Smirnov distance between the batch and d.cdf.
///
/// grid_size == 0 (or >= n) evaluates the analytic cdf at every sample and
/// returns the exact statistic. Otherwise the cdf is evaluated at
/// `grid_size` evenly spaced order statistics and the returned value is a
/// rigorous upper bound on the exact statistic (cdf monotonicity brackets
/// the samples in between).
double ks_distance(const SampleBatch& batch, const GammaSumDistribution& d, std::size_t grid_size = 0);

/// Dvoretzky-Kiefer-Wolfowitz band sqrt(ln(2/delta) / (2n)).
double dkw_bound(std::size_t n, double delta);

/// One Y per line after a '#'-prefixed header carrying seed and parameters.
void write_csv(const SampleBatch& batch, const GammaSumParams& params, std::ostream& out);

}  // namespace gammasum::oracle
