#include "gammasum/lauricella.hpp"

#include "gammasum/errors.hpp"
#include "gammasum/inversion.hpp"
#include "gammasum/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gammasum {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Neumaier's compensated summation.
class CompensatedSum {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// A positive quantity t * exp(pending) built by repeated multiplication.
// The exponential factor is folded in gradually so that a huge negative
// starting exponent (e^{x} with x << -700) does not underflow before the
// recurrence has grown the mantissa back into range.
class ScaledProduct {
public:
    explicit ScaledProduct(double log_start) {
        if (log_start > -700.0) {
            mantissa_ = std::exp(log_start);
        } else {
            pending_ = log_start;
        }
    }

    void multiply(double factor) noexcept {
        mantissa_ *= factor;
        if (pending_ < 0.0 && mantissa_ > 1e200) {
            const double step = std::max(pending_, -460.0);
            mantissa_ *= std::exp(step);
            pending_ -= step;
        }
    }

    double value() const noexcept {
        return pending_ == 0.0 ? mantissa_ : mantissa_ * std::exp(pending_);
    }

private:
    double mantissa_ = 1.0;
    double pending_ = 0.0;
};

bool effectively_zero(double v, double scale) { return std::abs(v) <= 1e-12 * std::max(1.0, scale); }

}  // namespace

void Phi2Args::validate() const {
    if (b.empty()) throw std::invalid_argument("Phi2: need at least one variable");
    if (b.size() != x.size())
        throw std::invalid_argument("Phi2: " + std::to_string(b.size()) + " numerator parameters but " +
                                    std::to_string(x.size()) + " arguments");
    if (b.size() > kMaxBranches) throw std::invalid_argument("Phi2: too many variables");
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("Phi2: c must be positive and finite");
    for (std::size_t i = 0; i < b.size(); ++i)
        if (!std::isfinite(b[i]) || !std::isfinite(x[i]))
            throw std::invalid_argument("Phi2: non-finite parameter or argument");
}

double pochhammer_log(double a, std::size_t m) {
    if (!(a > 0.0)) throw std::invalid_argument("pochhammer_log: a must be positive");
    if (m == 0) return 0.0;
    if (m <= 64) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += std::log(a + static_cast<double>(j));
        return acc;
    }
    return std::lgamma(a + static_cast<double>(m)) - std::lgamma(a);
}

EvalResult kummer_1f1(double b, double c, double x) {
    if (!(c > 0.0) || !std::isfinite(c) || !std::isfinite(b) || !std::isfinite(x))
        throw std::invalid_argument("kummer_1f1: need finite b, x and c > 0");
    if (x == 0.0) return {1.0, 0.0, Method::series, 1, {}};

    double a = b;
    double z = x;
    double log_scale = 0.0;
    if (x < 0.0) {
        a = c - b;
        z = -x;
        log_scale = x;
    }

    const double abs_a = std::abs(a);
    CompensatedSum sum;
    double abs_sum = 0.0;
    ScaledProduct term(log_scale);   // |t_k| e^{log_scale}
    ScaledProduct major(log_scale);  // majorant with |a|
    double sign = 1.0;

    for (std::size_t k = 0; k < kKummerTermBudget; ++k) {
        const double kd = static_cast<double>(k);
        const double t = sign * term.value();
        sum.add(t);
        abs_sum += std::abs(t);

        const double factor = (a + kd) * z / ((kd + 1.0) * (c + kd));
        const double major_ratio = (abs_a + kd) * std::abs(z) / ((kd + 1.0) * (c + kd));
        if (factor == 0.0) {
            // a is a non-positive integer: the series terminates exactly.
            const double rounding = kEps * abs_sum * (2.0 * kd + 4.0 + std::abs(x));
            return {sum.value(), rounding, Method::series, k + 1, {}};
        }
        term.multiply(std::abs(factor));
        major.multiply(major_ratio);
        if (factor < 0.0) sign = -sign;

        const double rho = std::abs(z) * std::max(1.0, (abs_a + kd + 1.0) / (kd + 2.0)) / (c + kd + 1.0);
        if (rho < 1.0) {
            const double tail = major.value() / (1.0 - rho);
            const double value = sum.value();
            if (tail <= 0.5 * kEps * std::abs(value) || tail == 0.0) {
                const double rounding = kEps * abs_sum * (2.0 * kd + 4.0 + std::abs(x));
                return {value, tail + rounding, Method::series, k + 1, {}};
            }
        }
    }
    throw NumericalError("kummer_1f1: term budget exhausted for b=" + std::to_string(b) +
                         ", c=" + std::to_string(c) + ", x=" + std::to_string(x));
}

EvalResult phi2_series(const Phi2Args& args, double target_abs_err) {
    args.validate();
    if (!(target_abs_err > 0.0)) throw std::invalid_argument("phi2_series: target_abs_err must be positive");

    const std::size_t n = args.size();
    const double c = args.c;
    std::vector<double> b = args.b;
    std::vector<double> x = args.x;
    double log_scale = 0.0;

    double sum_b = 0.0;
    for (double v : b) sum_b += v;
    const bool all_nonpositive = std::all_of(x.begin(), x.end(), [](double v) { return v <= 0.0; });
    const auto pivot_it = std::min_element(x.begin(), x.end());
    const std::size_t pivot = static_cast<std::size_t>(pivot_it - x.begin());
    double shifted_b = c - sum_b;
    if (effectively_zero(shifted_b, c)) shifted_b = 0.0;

    if (all_nonpositive && x[pivot] < 0.0 && shifted_b >= 0.0) {
        const double xp = x[pivot];
        for (std::size_t i = 0; i < n; ++i) x[i] -= xp;
        x[pivot] = -xp;
        b[pivot] = shifted_b;
        log_scale = xp;
    }

    double scale = 0.0;
    for (double v : x) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return {1.0, 0.0, Method::series, 1, {}};

    std::vector<double> u(n);
    double major_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = x[i] / scale;
        major_b += std::abs(b[i]);
    }

    // factor[i][m]  = (b_i)_m u_i^m / m!
    // partial[i][k] = degree-k coefficient of prod_{j<=i} (1 - u_j t)^{-b_j}
    std::vector<std::vector<double>> factor(n), partial(n);
    for (std::size_t i = 0; i < n; ++i) {
        factor[i].reserve(kPhi2DegreeBudget + 1);
        partial[i].reserve(kPhi2DegreeBudget + 1);
        factor[i].push_back(1.0);
        partial[i].push_back(1.0);
    }

    CompensatedSum sum;
    double abs_sum = 0.0;
    ScaledProduct weight(log_scale);  // scale^k e^{log_scale} / (c)_k
    double major_coeff = 1.0;         // (B)_k / k!

    for (std::size_t k = 0; k <= kPhi2DegreeBudget; ++k) {
        const double kd = static_cast<double>(k);
        double shell = 1.0;
        if (k > 0) {
            for (std::size_t i = 0; i < n; ++i)
                factor[i].push_back(factor[i][k - 1] * (b[i] + kd - 1.0) / kd * u[i]);
            partial[0].push_back(factor[0][k]);
            for (std::size_t i = 1; i < n; ++i) {
                double acc = 0.0;
                for (std::size_t m = 0; m <= k; ++m) acc += partial[i - 1][k - m] * factor[i][m];
                partial[i].push_back(acc);
            }
            shell = partial[n - 1][k];
            weight.multiply(scale / (c + kd - 1.0));
            major_coeff *= (major_b + kd - 1.0) / kd;
        }
        const double w = weight.value();
        const double term = shell * w;
        if (!std::isfinite(term))
            throw NumericalError("phi2_series: non-finite term at degree " + std::to_string(k));
        sum.add(term);
        abs_sum += std::abs(term);

        const double major_k = major_coeff * w;
        const double rho = scale * std::max(1.0, (major_b + kd + 1.0) / (kd + 2.0)) / (c + kd + 1.0);
        if (rho < 1.0) {
            const double major_next = major_k * scale * (major_b + kd) / ((kd + 1.0) * (c + kd));
            const double tail = major_next / (1.0 - rho);
            if (major_k + tail <= target_abs_err) {
                const double rounding = kEps * abs_sum * (2.0 * kd + static_cast<double>(n) + 4.0);
                return {sum.value(), tail + rounding, Method::series, k + 1, {}};
            }
        }
    }
    throw NumericalError("phi2_series: degree budget " + std::to_string(kPhi2DegreeBudget) +
                         " exhausted (max|x| = " + std::to_string(scale) + ")");
}

EvalResult phi2_eval(const Phi2Args& args, double target_abs_err) {
    args.validate();
    if (args.size() == 1) {
        EvalResult r = kummer_1f1(args.b[0], args.c, args.x[0]);
        r.method = Method::reduction;
        return r;
    }
    double max_abs = 0.0;
    for (double v : args.x) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs <= kPhi2SwitchThreshold) {
        try {
            EvalResult series = phi2_series(args, target_abs_err);
            // Without the exponential shift (c < sum b) an alternating series can
            // cancel badly; its own estimate shows it.
            if (series.abs_error_estimate <= std::max(target_abs_err, 1e-12 * std::abs(series.value))) return series;
            EvalResult inverted = invert_phi2(args);
            return inverted.abs_error_estimate < series.abs_error_estimate ? inverted : series;
        } catch (const NumericalError&) {
            // fall through to inversion
        }
    }
    return invert_phi2(args);
}

}  // namespace gammasum
