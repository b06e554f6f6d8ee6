#include "gammasum/distribution.hpp"
#include "gammasum/errors.hpp"
#include "gammasum/inversion.hpp"
#include "gammasum/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace gammasum {
namespace {

Spectrum spectrum(std::vector<double> lambdas) {
    Spectrum s;
    s.lambdas = std::move(lambdas);
    s.det_a = 1.0;
    for (double l : s.lambdas) s.det_a *= l;
    return s;
}

TEST(Mgf, Examples) {
    EXPECT_EQ(mgf_eval(spectrum({1.0, 2.0}), 0.7, 0.0), std::complex<double>(1.0, 0.0));
    EXPECT_NEAR(mgf_eval(spectrum({1.0}), 1.0, -1.0).real(), 0.5, 1e-16);
    EXPECT_NEAR(mgf_eval(spectrum({1.0, 2.0}), 0.5, -1.0).real(), 1.0 / std::sqrt(6.0), 1e-16);
    EXPECT_NEAR(mgf_eval(spectrum({1.0, 2.0}), 0.5, -1.0).real(), 0.4082483, 5e-8);
    EXPECT_THROW(mgf_eval(spectrum({0.5}), 1.0, 2.0), std::invalid_argument);
}

TEST(Mgf, NegativeAxisRealPositiveDecreasing) {
    const Spectrum s = spectrum({0.3, 1.1, 2.7});
    double previous = 1.0;
    for (int i = 1; i <= 200; ++i) {
        const std::complex<double> v = mgf_eval(s, 1.3, -0.05 * i);
        EXPECT_EQ(v.imag(), 0.0);
        EXPECT_GT(v.real(), 0.0);
        EXPECT_LE(v.real(), 1.0);
        EXPECT_LT(v.real(), previous);
        previous = v.real();
    }
}

TEST(Mgf, DerivativeAtZeroIsMean) {
    const Spectrum s = spectrum({0.3, 1.1, 2.7});
    const double alpha = 1.3;
    const double h = 1e-6;
    const double fd = (mgf_eval(s, alpha, h).real() - mgf_eval(s, alpha, -h).real()) / (2.0 * h);
    const double mean = alpha * (0.3 + 1.1 + 2.7);
    EXPECT_NEAR(fd, mean, 1e-6 * mean);
}

TEST(Talbot, InvertsKnownTransforms) {
    using cld = std::complex<long double>;
    for (double t : {0.1, 1.0, 5.0, 20.0}) {
        const auto decay = detail::fixed_talbot([](cld s) { return 1.0L / (s + 1.0L); }, t, 32);
        EXPECT_NEAR(static_cast<double>(decay.value), std::exp(-t), 1e-12);
        const auto root = detail::fixed_talbot([](cld s) { return 1.0L / std::sqrt(s); }, t, 32);
        EXPECT_NEAR(static_cast<double>(root.value), 1.0 / std::sqrt(std::numbers::pi * t), 1e-12);
    }
}

TEST(InvertPdf, Examples) {
    const EvalResult e = invert_pdf(spectrum({1.0}), 1.0, 1.0);
    EXPECT_NEAR(e.value, std::exp(-1.0), 1e-12);
    EXPECT_NEAR(e.value, 0.3678794, 5e-8);
    EXPECT_EQ(e.method, Method::inversion);

    const EvalResult g = invert_pdf(spectrum({1.0, 1.0}), 1.0, 2.0);
    EXPECT_NEAR(g.value, 2.0 * std::exp(-2.0), 1e-12);
    EXPECT_LE(std::abs(g.value - 2.0 * std::exp(-2.0)), g.abs_error_estimate);
}

TEST(InvertPdf, MatchesSeriesAndMonteCarloDensity) {
    // lambda = (0.5, 1, 2): independent branches with those scales.
    const GammaSumParams p{1.5, ScaleVector({0.5, 1.0, 2.0}), CorrelationMatrix::identity(3)};
    const GammaSumDistribution d(p);
    const EvalResult inv = invert_pdf(d.spectrum(), 1.5, 3.0);
    const EvalResult ser = d.pdf(3.0, {EvalPath::series});
    EXPECT_LE(std::abs(inv.value - ser.value), inv.abs_error_estimate + ser.abs_error_estimate);
    EXPECT_NEAR(inv.value, ser.value, 1e-10);

    // Histogram density over [2.95, 3.05] from 10^6 exact draws (2 alpha = 3).
    const auto batch = oracle::sample(p, 1'000'000, 17);
    const double width = 0.1;
    const double mass = oracle::empirical_cdf(batch, 3.0 + width / 2) - oracle::empirical_cdf(batch, 3.0 - width / 2);
    const double density = mass / width;
    const double sigma = std::sqrt(inv.value * width / 1e6) / width;
    EXPECT_NEAR(density, inv.value, 5.0 * sigma);
}

TEST(InvertCdf, Examples) {
    const EvalResult e = invert_cdf(spectrum({1.0}), 1.0, 1.0);
    EXPECT_NEAR(e.value, 1.0 - std::exp(-1.0), 1e-12);
    EXPECT_NEAR(e.value, 0.6321206, 5e-8);

    const EvalResult tiny = invert_cdf(spectrum({0.4, 1.7}), 0.8, 1e-9);
    EXPECT_NEAR(tiny.value, 0.0, 1e-10);
    EXPECT_GE(tiny.value, 0.0);
}

TEST(InvertCdf, MatchesMonteCarlo) {
    // lambda = (1, 3), alpha = 2; independent branches realize that spectrum.
    const GammaSumParams p{2.0, ScaleVector({1.0, 3.0}), CorrelationMatrix::identity(2)};
    const GammaSumDistribution d(p);
    const EvalResult inv = invert_cdf(d.spectrum(), 2.0, 5.0);
    const auto batch = oracle::sample(p, 10'000'000, 5);
    const double empirical = oracle::empirical_cdf(batch, 5.0);
    EXPECT_NEAR(inv.value, empirical, oracle::dkw_bound(10'000'000, 1e-6));
    EXPECT_NEAR(inv.value, d.cdf(5.0, {EvalPath::series}).value, 1e-11);
}

TEST(InvertCdf, MonotoneOnGridAndPdfNonNegative) {
    const Spectrum s = spectrum({0.05, 0.6, 1.4, 3.0});
    const double alpha = 0.8;
    const double scale = alpha * (0.05 + 0.6 + 1.4 + 3.0);
    double previous = -1.0;
    for (int i = 0; i < 120; ++i) {
        const double y = scale * (0.01 + (10.0 - 0.01) * i / 119.0);
        const EvalResult c = invert_cdf(s, alpha, y);
        EXPECT_GE(c.value, previous);
        EXPECT_GE(c.value, 0.0);
        EXPECT_LE(c.value, 1.0);
        previous = c.value;
        const EvalResult f = invert_pdf(s, alpha, y);
        EXPECT_GE(f.value, -f.abs_error_estimate);
    }
}

TEST(InvertPhi2, AgreesWithSeries) {
    const Phi2Args a{{0.9, 1.4, 0.6}, 3.2, {-4.0, -12.0, -30.0}};
    const EvalResult inv = invert_phi2(a);
    const EvalResult ser = phi2_series(a, 1e-20);
    EXPECT_NEAR(inv.value, ser.value, 1e-9 * ser.value);

    // Positive arguments need the shifted contour.
    const Phi2Args pos{{0.9, 1.4}, 3.2, {2.0, 15.0}};
    EXPECT_NEAR(invert_phi2(pos).value, phi2_series(pos, 1e-10).value, 1e-8 * phi2_series(pos, 1e-10).value);
}

TEST(InversionConfig, OrderRange) {
    const Spectrum s = spectrum({1.0});
    EXPECT_THROW(invert_pdf(s, 1.0, 1.0, {9, 1e-10}), std::invalid_argument);
    EXPECT_THROW(invert_pdf(s, 1.0, 1.0, {201, 1e-10}), std::invalid_argument);
    EXPECT_NO_THROW(invert_pdf(s, 1.0, 1.0, {10, 1e-10}));
    EXPECT_THROW(invert_pdf(s, 1.0, -1.0), std::invalid_argument);
    EXPECT_THROW(invert_cdf(s, 0.0, 1.0), std::invalid_argument);
}

TEST(InversionConfig, OrderDoublingEstimateShrinks) {
    const Spectrum s = spectrum({0.5, 2.0});
    const double exact = invert_cdf(s, 1.5, 2.0, {20, 1e-10}).value;
    const EvalResult low = invert_cdf(s, 1.5, 2.0, {10, 1e-10});
    EXPECT_LE(std::abs(low.value - exact), low.abs_error_estimate);
    EXPECT_GT(low.abs_error_estimate, invert_cdf(s, 1.5, 2.0, {20, 1e-10}).abs_error_estimate);
}

}  // namespace
}  // namespace gammasum
