#include "gammasum/inversion.hpp"

#include "gammasum/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace gammasum {

namespace {

using cld = std::complex<long double>;

constexpr long double kEpsLd = std::numeric_limits<long double>::epsilon();

struct Doubled {
    long double value;
    long double error;
};

// Order-doubling: report the 2M result, estimate its error by the distance
// to the M result plus the rounding level of the 2M sum.
Doubled talbot_with_estimate(const detail::LaplaceTransform& f, double t, int order) {
    const detail::TalbotSum coarse = detail::fixed_talbot(f, t, order);
    const detail::TalbotSum fine = detail::fixed_talbot(f, t, 2 * order);
    const long double rounding = 16.0L * kEpsLd * fine.abs_terms;
    return {fine.value, std::abs(fine.value - coarse.value) + rounding};
}

void check_inputs(const Spectrum& spectrum, double alpha, double y, const InversionConfig& cfg) {
    cfg.validate();
    if (spectrum.lambdas.empty()) throw std::invalid_argument("inversion: empty spectrum");
    if (!(alpha > 0.0)) throw std::invalid_argument("inversion: alpha must be positive");
    if (!(y > 0.0) || !std::isfinite(y)) throw std::invalid_argument("inversion: y must be positive and finite");
}

EvalResult finish(const Doubled& d, const InversionConfig& cfg, const std::string& what, double y) {
    const double value = static_cast<double>(d.value);
    const double err = static_cast<double>(d.error) + 0.5 * std::numeric_limits<double>::epsilon() * std::abs(value);
    if (!std::isfinite(value) || !std::isfinite(err))
        throw NumericalError("inversion: non-finite " + what + " at y=" + std::to_string(y) +
                             " (argument too extreme for order " + std::to_string(cfg.method_order) + ")");
    EvalResult r{value, err, Method::inversion, static_cast<std::size_t>(2 * cfg.method_order), {}};
    if (err > cfg.target_rel_err * std::abs(value) + std::numeric_limits<double>::min())
        r.warning = "inversion error estimate above requested relative accuracy";
    return r;
}

// exp(z) - 1 without cancellation for small |z|.
cld expm1(cld z) {
    if (std::abs(z) >= 0.5L) return std::exp(z) - 1.0L;
    cld term = z, sum = z;
    for (int k = 2; k < 40 && std::abs(term) > kEpsLd * std::abs(sum); ++k) {
        term *= z / static_cast<long double>(k);
        sum += term;
    }
    return sum;
}

}  // namespace

void InversionConfig::validate() const {
    if (method_order < 10 || method_order > 200)
        throw std::invalid_argument("inversion order must lie in [10, 200]");
    if (!(target_rel_err > 0.0)) throw std::invalid_argument("inversion target_rel_err must be positive");
}

namespace detail {

TalbotSum fixed_talbot(const LaplaceTransform& transform, double t, int order) {
    const long double pi = std::numbers::pi_v<long double>;
    const long double td = t;
    const long double m = order;
    const long double r = 2.0L * m / (5.0L * td);

    const long double head = 0.5L * std::real(transform(cld(r, 0.0L))) * std::exp(r * td);
    long double sum = head;
    long double abs_sum = std::abs(head);
    for (int k = 1; k < order; ++k) {
        const long double theta = static_cast<long double>(k) * pi / m;
        const long double cot = std::cos(theta) / std::sin(theta);
        const cld s(r * theta * cot, r * theta);
        const long double sigma = theta + (theta * cot - 1.0L) * cot;
        const long double contrib = std::real(std::exp(td * s) * transform(s) * cld(1.0L, sigma));
        sum += contrib;
        abs_sum += std::abs(contrib);
    }
    return {r / m * sum, r / m * abs_sum};
}

}  // namespace detail

std::complex<double> mgf_eval(const Spectrum& spectrum, double alpha, std::complex<double> s) {
    std::complex<double> log_acc = 0.0;
    for (double lambda : spectrum.lambdas) {
        const std::complex<double> base = 1.0 - lambda * s;
        if (base == 0.0) throw std::invalid_argument("mgf_eval: s is a branch point 1/lambda");
        log_acc += std::log(base);
    }
    return std::exp(-alpha * log_acc);
}

namespace {

// log M(s) = -alpha sum log(1 + lambda s), the branch points sitting at -1/lambda.
cld log_mgf(const Spectrum& spectrum, long double alpha, cld s) {
    cld acc = 0.0L;
    for (double lambda : spectrum.lambdas) acc += std::log(1.0L + static_cast<long double>(lambda) * s);
    return -alpha * acc;
}

// Inverts F(s - sigma) and multiplies by e^{-sigma y}, with sigma = 1/max(lambda). Both the
// density and the upper tail decay like e^{-y/max(lambda)}; the tilted function is O(1), so
// the absolute error floor of the Talbot sum becomes a relative one.
Doubled tilted(const Spectrum& spectrum, const detail::LaplaceTransform& f, double y, int order) {
    const long double sigma = 1.0L / spectrum.max_lambda();
    const Doubled g = talbot_with_estimate([&](cld s) { return f(s - sigma); }, y, order);
    const long double damping = std::exp(-sigma * static_cast<long double>(y));
    return {g.value * damping, g.error * damping};
}

}  // namespace

EvalResult invert_pdf(const Spectrum& spectrum, double alpha, double y, const InversionConfig& cfg) {
    check_inputs(spectrum, alpha, y, cfg);
    const long double a = alpha;
    const auto transform = [&](cld s) { return std::exp(log_mgf(spectrum, a, s)); };
    return finish(tilted(spectrum, transform, y, cfg.method_order), cfg, "pdf", y);
}

EvalResult invert_cdf(const Spectrum& spectrum, double alpha, double y, const InversionConfig& cfg) {
    check_inputs(spectrum, alpha, y, cfg);
    const long double a = alpha;
    const auto transform = [&](cld s) { return std::exp(log_mgf(spectrum, a, s)) / s; };
    Doubled d = talbot_with_estimate(transform, y, cfg.method_order);
    if (d.value > 0.5L) {
        // Upper half: 1 - (tilted complementary cdf), transform (1 - M(s)) / s.
        const auto complement = [&](cld s) { return -expm1(log_mgf(spectrum, a, s)) / s; };
        const Doubled tail = tilted(spectrum, complement, y, cfg.method_order);
        d = {1.0L - tail.value, tail.error};
    }
    EvalResult r = finish(d, cfg, "cdf", y);
    const double clamped = std::clamp(r.value, 0.0, 1.0);
    const double moved = std::abs(clamped - r.value);
    if (moved > 0.0) {
        r.abs_error_estimate += moved;
        r.value = clamped;
        if (moved > 1e-9) r.warning = "cdf clamped to [0, 1] by " + std::to_string(moved);
    }
    return r;
}

EvalResult invert_phi2(const Phi2Args& args, const InversionConfig& cfg) {
    args.validate();
    cfg.validate();
    // Move every singularity (s = 0 and s = x_i) onto Re(s) <= 0.
    const double shift = std::max(0.0, *std::max_element(args.x.begin(), args.x.end()));
    const long double c = args.c;
    const auto transform = [&](cld sp) {
        const cld s = sp + static_cast<long double>(shift);
        const cld log_s = std::log(s);
        cld log_acc = -c * log_s;
        for (std::size_t i = 0; i < args.size(); ++i)
            log_acc -= static_cast<long double>(args.b[i]) *
                       (std::log(s - static_cast<long double>(args.x[i])) - log_s);
        return std::exp(log_acc);
    };
    Doubled d = talbot_with_estimate(transform, 1.0, cfg.method_order);
    const long double factor = std::exp(std::lgamma(c) + static_cast<long double>(shift));
    d.value *= factor;
    d.error *= factor;
    return finish(d, cfg, "Phi2", 1.0);
}

}  // namespace gammasum
