#include "gammasum/distribution.hpp"

#include "gammasum/errors.hpp"
#include "gammasum/lauricella.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>

namespace gammasum {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

EvalResult clamp_probability(EvalResult r) {
    const double clamped = std::clamp(r.value, 0.0, 1.0);
    const double moved = std::abs(clamped - r.value);
    if (moved > 0.0) {
        r.value = clamped;
        r.abs_error_estimate += moved;
        if (moved > 1e-9) r.warning = "cdf clamped to [0, 1] by " + std::to_string(moved);
    }
    return r;
}

// Target for Phi2 such that prefactor * Phi2 meets `target` on the cdf/pdf scale.
double phi2_target(double target, double log_prefactor) {
    const double t = target * std::exp(-log_prefactor);
    return std::isfinite(t) && t > 0.0 ? t : std::numeric_limits<double>::max();
}

}  // namespace

GammaSumDistribution::GammaSumDistribution(GammaSumParams params)
    : params_(std::move(params)), spectrum_(spectrum_of(params_)) {
    double beta_sum = 0.0;
    for (double b : params_.betas.values()) beta_sum += b;
    if (std::abs(spectrum_.trace() - beta_sum) > 1e-10 * beta_sum)
        throw NumericalError("spectrum fails the trace identity (sum lambda != sum beta)");
}

bool GammaSumDistribution::series_domain(double y) const noexcept {
    return y / spectrum_.min_lambda() <= kPhi2SwitchThreshold;
}

EvalResult GammaSumDistribution::series_cdf(double y, double target) const {
    const double a = params_.alpha;
    const double na = static_cast<double>(branches()) * a;
    const double log_pref = na * std::log(y) - a * spectrum_.log_det() - std::lgamma(1.0 + na);
    Phi2Args args{std::vector<double>(branches(), a), 1.0 + na, {}};
    for (double lambda : spectrum_.lambdas) args.x.push_back(-y / lambda);

    const EvalResult phi = phi2_series(args, phi2_target(target, log_pref));
    const double pref = std::exp(log_pref);
    const double value = pref * phi.value;
    const double err = pref * phi.abs_error_estimate + kEps * std::abs(value) * (4.0 + std::abs(log_pref));
    return {value, err, Method::series, phi.terms_or_nodes, {}};
}

EvalResult GammaSumDistribution::series_pdf(double y, double target) const {
    const double a = params_.alpha;
    const double na = static_cast<double>(branches()) * a;
    const double log_pref = (na - 1.0) * std::log(y) - a * spectrum_.log_det() - std::lgamma(na);
    Phi2Args args{std::vector<double>(branches(), a), na, {}};
    for (double lambda : spectrum_.lambdas) args.x.push_back(-y / lambda);

    const EvalResult phi = phi2_series(args, phi2_target(target, log_pref));
    const double pref = std::exp(log_pref);
    const double value = pref * phi.value;
    const double err = pref * phi.abs_error_estimate + kEps * std::abs(value) * (4.0 + std::abs(log_pref));
    return {value, err, Method::series, phi.terms_or_nodes, {}};
}

EvalResult GammaSumDistribution::cdf(double y, const EvalOptions& opts) const {
    if (std::isnan(y)) throw std::invalid_argument("cdf: y is NaN");
    if (y <= 0.0) return {0.0, 0.0, Method::reduction, 0, {}};
    if (std::isinf(y)) return {1.0, 0.0, Method::reduction, 0, {}};

    switch (opts.path) {
        case EvalPath::series:
            return clamp_probability(series_cdf(y, opts.target_abs_err));
        case EvalPath::inversion:
            return invert_cdf(spectrum_, params_.alpha, y, opts.inversion);
        case EvalPath::automatic:
            break;
    }
    if (series_domain(y)) {
        try {
            return clamp_probability(series_cdf(y, opts.target_abs_err));
        } catch (const NumericalError&) {
            // degree budget exhausted; inversion below
        }
    }
    return invert_cdf(spectrum_, params_.alpha, y, opts.inversion);
}

EvalResult GammaSumDistribution::pdf(double y, const EvalOptions& opts) const {
    if (std::isnan(y)) throw std::invalid_argument("pdf: y is NaN");
    if (y < 0.0 || std::isinf(y)) return {0.0, 0.0, Method::reduction, 0, {}};
    if (y == 0.0) {
        const double na = static_cast<double>(branches()) * params_.alpha;
        if (std::abs(na - 1.0) <= 1e-12)
            return {std::exp(-params_.alpha * spectrum_.log_det()), 0.0, Method::reduction, 0, {}};
        if (na > 1.0) return {0.0, 0.0, Method::reduction, 0, {}};
        throw std::domain_error("pdf: density diverges at y = 0 when N*alpha < 1");
    }

    switch (opts.path) {
        case EvalPath::series:
            return series_pdf(y, opts.target_abs_err);
        case EvalPath::inversion:
            return invert_pdf(spectrum_, params_.alpha, y, opts.inversion);
        case EvalPath::automatic:
            break;
    }
    if (series_domain(y)) {
        try {
            return series_pdf(y, opts.target_abs_err);
        } catch (const NumericalError&) {
        }
    }
    return invert_pdf(spectrum_, params_.alpha, y, opts.inversion);
}

double GammaSumDistribution::mean() const noexcept { return params_.alpha * spectrum_.trace(); }

double GammaSumDistribution::variance() const noexcept {
    double acc = 0.0;
    for (double l : spectrum_.lambdas) acc += l * l;
    return params_.alpha * acc;
}

double GammaSumDistribution::quantile(double p, double tol, const EvalOptions& opts) const {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile: p must lie in (0, 1)");
    if (!(tol > 0.0)) throw std::invalid_argument("quantile: tol must be positive");

    const auto f = [&](double y) { return cdf(y, opts).value - p; };
    const double sd = std::sqrt(variance());
    double lo = std::max(0.0, mean() - 6.0 * sd);
    double hi = mean() + 6.0 * sd;
    double flo = lo > 0.0 ? f(lo) : -p;
    if (flo > 0.0) {
        lo = 0.0;
        flo = -p;
    }
    double fhi = f(hi);
    for (int grow = 0; fhi < 0.0; ++grow) {
        if (grow > 200) throw NumericalError("quantile: could not bracket p=" + std::to_string(p));
        lo = hi;
        flo = fhi;
        hi *= 2.0;
        fhi = f(hi);
    }
    if (std::abs(flo) <= tol && lo > 0.0) return lo;
    if (std::abs(fhi) <= tol) return hi;

    double best = hi;
    double best_res = std::abs(fhi);
    int side = 0;
    for (int iter = 0; iter < 400; ++iter) {
        double x = hi - fhi * (hi - lo) / (fhi - flo);
        if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
        const double fx = f(x);
        if (std::abs(fx) < best_res) {
            best = x;
            best_res = std::abs(fx);
        }
        if (best_res <= tol) return best;
        if (fx > 0.0) {
            hi = x;
            fhi = fx;
            if (side == 1) flo *= 0.5;
            side = 1;
        } else {
            lo = x;
            flo = fx;
            if (side == -1) fhi *= 0.5;
            side = -1;
        }
        if (hi - lo <= 4.0 * kEps * hi) break;
    }
    if (best_res <= tol) return best;
    throw NumericalError("quantile: residual " + std::to_string(best_res) + " above tol for p=" + std::to_string(p));
}

void NakagamiMrcConfig::validate() const {
    if (!(m >= 0.5) || !std::isfinite(m)) throw std::invalid_argument("Nakagami m must be >= 0.5");
    if (gammas.empty()) throw std::invalid_argument("need at least one branch SNR");
    for (std::size_t i = 0; i < gammas.size(); ++i)
        if (!(gammas[i] > 0.0) || !std::isfinite(gammas[i]))
            throw std::invalid_argument("average SNR of branch " + std::to_string(i + 1) + " must be positive");
    if (gammas.size() != rho.size())
        throw std::invalid_argument("branch SNR count does not match correlation dimension");
}

GammaSumParams NakagamiMrcConfig::to_params() const {
    validate();
    std::vector<double> betas;
    betas.reserve(gammas.size());
    for (double g : gammas) betas.push_back(g / m);
    return GammaSumParams{m, ScaleVector(std::move(betas)), rho};
}

EvalResult outage_probability(const NakagamiMrcConfig& cfg, double gamma_th, const EvalOptions& opts) {
    if (!(gamma_th > 0.0)) throw std::invalid_argument("outage threshold must be positive");
    const GammaSumDistribution d(cfg.to_params());
    return d.cdf(gamma_th, opts);
}

double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) noexcept { return 10.0 * std::log10(linear); }

std::vector<EvalResult> evaluate_grid(const GammaSumDistribution& d, std::span<const double> ys, Quantity kind,
                                      const EvalOptions& opts) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(ys.size());
    std::vector<EvalResult> out(ys.size());
    std::vector<std::exception_ptr> errors(ys.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            out[i] = kind == Quantity::cdf ? d.cdf(ys[i], opts) : d.pdf(ys[i], opts);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

std::vector<EvalResult> evaluate_grid_serial(const GammaSumDistribution& d, std::span<const double> ys,
                                             Quantity kind, const EvalOptions& opts) {
    std::vector<EvalResult> out;
    out.reserve(ys.size());
    for (double y : ys) out.push_back(kind == Quantity::cdf ? d.cdf(y, opts) : d.pdf(y, opts));
    return out;
}

}  // namespace gammasum
