#pragma once

#include "gammasum/eval_result.hpp"

#include <cstddef>
#include <vector>

namespace gammasum {

/// Arguments of the confluent Lauricella function
///   Phi2^(N)(b_1..b_N; c; x_1..x_N)
///     = sum_{m_1..m_N >= 0} prod_i (b_i)_{m_i} x_i^{m_i} / m_i!  /  (c)_{m_1+..+m_N}.
struct Phi2Args {
    std::vector<double> b;
    double c = 1.0;
    std::vector<double> x;

    /// Throws std::invalid_argument unless N >= 1, |b| == |x| <= kMaxBranches,
    /// c > 0 and every entry is finite.
    void validate() const;
    std::size_t size() const noexcept { return b.size(); }
};

/// Dispatch threshold on max|x_i|: at or below it phi2_eval uses the series.
inline constexpr double kPhi2SwitchThreshold = 200.0;
/// Highest total degree the multi-variable series may reach.
inline constexpr std::size_t kPhi2DegreeBudget = 400;
/// Term budget for the scalar 1F1 series.
inline constexpr std::size_t kKummerTermBudget = 5000;

/// ln (a)_m = ln Gamma(a+m) - ln Gamma(a), a > 0. Exactly 0 for m = 0.
double pochhammer_log(double a, std::size_t m);

/// Kummer's 1F1(b; c; x), c > 0. Negative x goes through
/// 1F1(b;c;x) = e^x 1F1(c-b;c;-x) so the summed terms do not alternate.
EvalResult kummer_1f1(double b, double c, double x);

/// Phi2^(N) by its multi-index series, grouped in shells of equal total degree.
///
/// When every x_i <= 0 and c >= sum(b), the series is first rewritten with
/// the exponential shift
///   Phi2(b; c; x) = e^{x_j} Phi2(b'; c; x - x_j, with slot j -> -x_j),
///   b'_j = c - sum(b),
/// around the most negative argument x_j; all terms are then non-negative.
/// Summation stops once the majorant of the current shell plus a geometric
/// tail bound is below `target_abs_err`; the bound (plus a rounding term) is
/// reported as the error estimate.
///
/// Throws NumericalError when the degree budget is exhausted.
EvalResult phi2_series(const Phi2Args& args, double target_abs_err);

/// Routing wrapper. N = 1 goes to kummer_1f1 (method = reduction);
/// max|x_i| <= kPhi2SwitchThreshold goes to phi2_series; everything else,
/// or a series that runs out of budget, goes to numerical Laplace inversion.
/// A series whose estimate misses max(target, 1e-12 |value|) is compared
/// with inversion and the result with the smaller estimate is returned.
EvalResult phi2_eval(const Phi2Args& args, double target_abs_err);

}  // namespace gammasum
