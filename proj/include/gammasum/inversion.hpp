#pragma once

#include "gammasum/eval_result.hpp"
#include "gammasum/lauricella.hpp"
#include "gammasum/linalg.hpp"

#include <complex>
#include <functional>

namespace gammasum {

struct InversionConfig {
    /// Talbot node count M; the result uses 2M nodes and is checked against M.
    int method_order = 20;
    /// Relative accuracy requested; a larger error estimate sets a warning.
    double target_rel_err = 1e-10;

    void validate() const;  // method_order in [10, 200], target_rel_err > 0
};

/// MGF of the sum: prod_n (1 - lambda_n s)^{-alpha}, principal branch per factor.
/// Throws std::invalid_argument at a branch point s = 1/lambda_n.
std::complex<double> mgf_eval(const Spectrum& spectrum, double alpha, std::complex<double> s);

/// f_Y(y) by fixed-Talbot inversion of prod_n (1 + lambda_n s)^{-alpha}.
EvalResult invert_pdf(const Spectrum& spectrum, double alpha, double y, const InversionConfig& cfg = {});

/// F_Y(y) by inverting (1/s) prod_n (1 + lambda_n s)^{-alpha}; clamped to [0, 1]
/// with the clamped amount added to the error estimate.
EvalResult invert_cdf(const Spectrum& spectrum, double alpha, double y, const InversionConfig& cfg = {});

/// Phi2^(N)(b; c; x) = Gamma(c) L^{-1}[ s^{-c} prod_i (1 - x_i/s)^{-b_i} ](1).
EvalResult invert_phi2(const Phi2Args& args, const InversionConfig& cfg = {});

namespace detail {

using LaplaceTransform = std::function<std::complex<long double>(std::complex<long double>)>;

struct TalbotSum {
    long double value = 0.0L;
    long double abs_terms = 0.0L;  // (r/M) sum |node contributions|, for the rounding estimate
};

/// Abate-Valko fixed Talbot rule with `order` nodes at time t > 0.
/// The contour crosses the real axis at r = 2 order / (5 t) and encloses
/// the negative real axis, so every singularity must lie at Re(s) <= 0.
TalbotSum fixed_talbot(const LaplaceTransform& transform, double t, int order);

}  // namespace detail

}  // namespace gammasum
