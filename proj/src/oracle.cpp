#include "gammasum/oracle.hpp"

#include "gammasum/errors.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

namespace gammasum::oracle {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    // (0, 1], never 0 so the logarithm stays finite.
    double uniform() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

struct StreamAccumulator {
    std::vector<double> sum;      // per-branch sum of X
    std::vector<double> cross;    // row-major sum of X_i X_j
};

struct Plan {
    std::size_t n_branches;
    std::size_t components;  // 2 alpha
    SquareMatrix factor;     // Cholesky factor of Sigma
};

Plan make_plan(const GammaSumParams& params) {
    params.validate();
    const double twice_alpha = 2.0 * params.alpha;
    const double rounded = std::round(twice_alpha);
    if (rounded < 1.0 || std::abs(twice_alpha - rounded) > 1e-12)
        throw std::invalid_argument(
            "Monte Carlo sampler needs 2*alpha to be a positive integer; use the analytic series/inversion "
            "paths for other shapes");
    const std::size_t n = params.size();
    SquareMatrix sigma = symmetric_equivalent(params.betas, build_c(params.rho));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sigma(i, j) *= 0.5;
    // Sigma = S/2 with S positive definite, so this cannot fail for valid
    // params; checked anyway.
    return {n, static_cast<std::size_t>(rounded), cholesky_factor(sigma)};
}

std::uint64_t stream_seed(std::uint64_t seed, std::size_t stream) {
    return splitmix64(seed + (static_cast<std::uint64_t>(stream) + 1) * 0x9E3779B97F4A7C15ULL);
}

void run_stream(const Plan& plan, std::uint64_t seed, std::size_t stream, std::size_t begin, std::size_t end,
                std::vector<double>& sums, StreamAccumulator& acc) {
    const std::size_t n = plan.n_branches;
    GaussianStream gauss(stream_seed(seed, stream));
    std::vector<double> z(n), x(n);
    acc.sum.assign(n, 0.0);
    acc.cross.assign(n * n, 0.0);
    for (std::size_t draw = begin; draw < end; ++draw) {
        std::fill(x.begin(), x.end(), 0.0);
        for (std::size_t k = 0; k < plan.components; ++k) {
            for (std::size_t i = 0; i < n; ++i) z[i] = gauss.next();
            for (std::size_t i = 0; i < n; ++i) {
                double g = 0.0;
                for (std::size_t j = 0; j <= i; ++j) g += plan.factor(i, j) * z[j];
                x[i] += g * g;
            }
        }
        double y = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            y += x[i];
            acc.sum[i] += x[i];
            for (std::size_t j = 0; j < n; ++j) acc.cross[i * n + j] += x[i] * x[j];
        }
        sums[draw] = y;
    }
}

SampleBatch assemble(const Plan& plan, std::uint64_t seed, std::size_t n_samples, std::vector<double> sums,
                     const std::vector<StreamAccumulator>& accs) {
    const std::size_t n = plan.n_branches;
    std::vector<double> sum(n, 0.0), cross(n * n, 0.0);
    for (const auto& a : accs) {  // fixed stream order
        for (std::size_t i = 0; i < n; ++i) sum[i] += a.sum[i];
        for (std::size_t k = 0; k < n * n; ++k) cross[k] += a.cross[k];
    }
    const double count = static_cast<double>(n_samples);
    SampleBatch batch;
    batch.seed = seed;
    batch.n_samples = n_samples;
    batch.sums = std::move(sums);
    batch.branch_means.resize(n);
    for (std::size_t i = 0; i < n; ++i) batch.branch_means[i] = sum[i] / count;
    batch.branch_correlations = SquareMatrix(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double cov = cross[i * n + j] / count - batch.branch_means[i] * batch.branch_means[j];
            const double vi = cross[i * n + i] / count - batch.branch_means[i] * batch.branch_means[i];
            const double vj = cross[j * n + j] / count - batch.branch_means[j] * batch.branch_means[j];
            batch.branch_correlations(i, j) = (vi > 0.0 && vj > 0.0) ? cov / std::sqrt(vi * vj) : 0.0;
        }
    }
    return batch;
}

std::size_t stream_begin(std::size_t stream, std::size_t n_samples) {
    return stream * n_samples / kSubStreams;
}

}  // namespace

SampleBatch sample(const GammaSumParams& params, std::size_t n_samples, std::uint64_t seed) {
    if (n_samples == 0) throw std::invalid_argument("sample: n_samples must be >= 1");
    const Plan plan = make_plan(params);
    std::vector<double> sums(n_samples);
    std::vector<StreamAccumulator> accs(kSubStreams);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(kSubStreams); ++s) {
        const auto stream = static_cast<std::size_t>(s);
        run_stream(plan, seed, stream, stream_begin(stream, n_samples), stream_begin(stream + 1, n_samples), sums,
                   accs[stream]);
    }
    return assemble(plan, seed, n_samples, std::move(sums), accs);
}

SampleBatch sample_serial(const GammaSumParams& params, std::size_t n_samples, std::uint64_t seed) {
    if (n_samples == 0) throw std::invalid_argument("sample: n_samples must be >= 1");
    const Plan plan = make_plan(params);
    std::vector<double> sums(n_samples);
    std::vector<StreamAccumulator> accs(kSubStreams);
    for (std::size_t s = 0; s < kSubStreams; ++s)
        run_stream(plan, seed, s, stream_begin(s, n_samples), stream_begin(s + 1, n_samples), sums, accs[s]);
    return assemble(plan, seed, n_samples, std::move(sums), accs);
}

double empirical_cdf(const SampleBatch& batch, double y) {
    if (batch.sums.empty()) throw std::invalid_argument("empirical_cdf: empty batch");
    const auto below = std::count_if(batch.sums.begin(), batch.sums.end(), [y](double v) { return v <= y; });
    return static_cast<double>(below) / static_cast<double>(batch.sums.size());
}

double ks_distance(const SampleBatch& batch, const GammaSumDistribution& d, std::size_t grid_size) {
    if (batch.sums.empty()) throw std::invalid_argument("ks_distance: empty batch");
    std::vector<double> sorted = batch.sums;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double nd = static_cast<double>(n);

    std::vector<std::size_t> ranks;
    if (grid_size == 0 || grid_size >= n) {
        ranks.resize(n);
        for (std::size_t i = 0; i < n; ++i) ranks[i] = i;
    } else {
        const std::size_t g = std::max<std::size_t>(grid_size, 2);
        for (std::size_t j = 0; j < g; ++j) {
            const std::size_t r = static_cast<std::size_t>(
                std::llround(static_cast<double>(j) * static_cast<double>(n - 1) / static_cast<double>(g - 1)));
            if (ranks.empty() || ranks.back() != r) ranks.push_back(r);
        }
    }

    std::vector<double> points(ranks.size());
    for (std::size_t j = 0; j < ranks.size(); ++j) points[j] = sorted[ranks[j]];
    const std::vector<EvalResult> cdf = evaluate_grid(d, points, Quantity::cdf);

    double dist = 0.0;
    for (std::size_t j = 0; j < ranks.size(); ++j) {
        const double f = cdf[j].value;
        const double r = static_cast<double>(ranks[j]);
        dist = std::max({dist, (r + 1.0) / nd - f, f - r / nd});
        if (j + 1 < ranks.size() && ranks[j + 1] > ranks[j] + 1) {
            // Samples strictly between two grid ranks have cdf in [f_j, f_{j+1}].
            const double f_next = cdf[j + 1].value;
            const double r_next = static_cast<double>(ranks[j + 1]);
            dist = std::max({dist, r_next / nd - f, f_next - (r + 1.0) / nd});
        }
    }
    return dist;
}

double dkw_bound(std::size_t n, double delta) {
    if (n == 0) throw std::invalid_argument("dkw_bound: n must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("dkw_bound: delta must lie in (0, 1)");
    return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

void write_csv(const SampleBatch& batch, const GammaSumParams& params, std::ostream& out) {
    const auto precision = out.precision(17);
    out << "# seed=" << batch.seed << " n_samples=" << batch.n_samples << " alpha=" << params.alpha << " betas=";
    for (std::size_t i = 0; i < params.size(); ++i) out << (i ? ";" : "") << params.betas[i];
    out << " rho=";
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i) out << "|";
        for (std::size_t j = 0; j < params.size(); ++j) out << (j ? ";" : "") << params.rho(i, j);
    }
    out << "\ny\n";
    for (double y : batch.sums) out << y << '\n';
    out.precision(precision);
}

}  // namespace gammasum::oracle
