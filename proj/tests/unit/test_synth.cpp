#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <functional>
#include <set>

#include "logrisk/error.hpp"
#include "logrisk/synth.hpp"
#include "logrisk/tailfit.hpp"
#include "support/oracles.hpp"

using namespace logrisk;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

double normal_cdf(double x) { return boost::math::cdf(boost::math::normal(), x); }

/// Target exceedance P[C > c] written from the family definitions.
std::function<double(double)> target_exceedance(const FamilyParams& params) {
    if (auto p = std::get_if<ParetoParams>(&params))
        return [p = *p](double c) { return c <= p.lower ? 1.0 : std::pow(c / p.lower, -p.alpha); };
    if (auto p = std::get_if<BoundedParetoParams>(&params))
        return [p = *p](double c) {
            if (c <= p.lower) return 1.0;
            if (c >= p.upper) return 0.0;
            return (std::pow(c, -p.alpha) - std::pow(p.upper, -p.alpha)) /
                   (std::pow(p.lower, -p.alpha) - std::pow(p.upper, -p.alpha));
        };
    if (auto p = std::get_if<TruncLognormalParams>(&params))
        return [p = *p](double c) {
            auto F = [&](double x) { return x <= 0 ? 0.0 : std::isinf(x) ? 1.0 : normal_cdf((std::log(x) - p.mu) / p.sigma); };
            const double lo = F(p.lower), hi = F(p.upper);
            return std::clamp((hi - F(c)) / (hi - lo), 0.0, 1.0);
        };
    const auto m = std::get<MixtureParams>(params);
    const double beta = (std::log(m.splice) - m.mu) / m.sigma;
    const double h = std::exp(-0.5 * beta * beta) / std::sqrt(2 * M_PI) / (m.sigma * normal_cdf(beta));
    const double w = h / (h + m.alpha);
    return [m, w, beta](double c) {
        if (c >= m.splice) return w * std::pow(c / m.splice, -m.alpha);
        const double body = normal_cdf((std::log(c) - m.mu) / m.sigma) / normal_cdf(beta);
        return w + (1.0 - w) * (1.0 - body);
    };
}

}  // namespace

TEST(InverseExceedance, Boundaries) {
    EXPECT_NEAR(inverse_exceedance(ParetoParams{1.0, 1.0}, 0.01), 100.0, 1e-10);
    const BoundedParetoParams bp{0.75, 2.4, 240312};
    EXPECT_DOUBLE_EQ(inverse_exceedance(bp, 1.0), 2.4);
    EXPECT_NEAR(inverse_exceedance(bp, 0.0), 240312, 1e-6);
    const TruncLognormalParams tl{1.0, 0.5, 1.0, 100.0};
    EXPECT_NEAR(inverse_exceedance(tl, 1.0), 1.0, 1e-9);
    EXPECT_NEAR(inverse_exceedance(tl, 0.0), 100.0, 1e-7);
    EXPECT_THROW(inverse_exceedance(MixtureParams{}, 0.5), ParameterError);
}

TEST(InverseExceedance, InvertsTargetExceedance) {
    const FamilyParams families[] = {ParetoParams{1.3, 2.0}, BoundedParetoParams{0.75, 2.4, 240312},
                                     TruncLognormalParams{2, 2, 2.4, 2.4e5}, TruncLognormalParams{-15, 5, 2.4, kInf}};
    for (const auto& f : families) {
        const auto S = target_exceedance(f);
        for (double u : {0.999, 0.9, 0.5, 0.1, 1e-3, 1e-6}) {
            EXPECT_NEAR(S(inverse_exceedance(f, u)), u, 1e-9 + 1e-7 * u) << family_name(f) << " " << u;
        }
    }
}

TEST(Sample, ParetoKolmogorovSmirnov) {
    const auto xs = sample({ParetoParams{1.47, 2.15}, 100000, 99});
    const double ks = oracle::ks_distance(xs, [](double c) { return 1.0 - std::pow(c / 2.15, -1.47); });
    EXPECT_LT(ks, 0.006);
}

TEST(Sample, DecileExceedanceWithinTolerance) {
    const FamilyParams families[] = {ParetoParams{0.75, 2.4}, BoundedParetoParams{1.0, 1.0, 1e4},
                                     TruncLognormalParams{1.0, 1.5, 2.0, 1e5}, MixtureParams{0.0, 1.0, 1.5, 5.0}};
    const std::size_t n = 100000;
    for (const auto& f : families) {
        auto xs = sample({f, n, 1234});
        std::sort(xs.begin(), xs.end());
        const auto S = target_exceedance(f);
        for (int d = 1; d <= 9; ++d) {
            const double c = xs[n * static_cast<std::size_t>(d) / 10];
            const double empirical =
                static_cast<double>(xs.end() - std::upper_bound(xs.begin(), xs.end(), c)) / static_cast<double>(n);
            EXPECT_NEAR(empirical, S(c), 3.0 / std::sqrt(static_cast<double>(n))) << family_name(f) << " decile " << d;
        }
    }
}

TEST(Sample, Reproducible) {
    const GeneratorSpec spec{MixtureParams{0.5, 1.2, 1.3, 4.0}, 5000, 42};
    EXPECT_EQ(sample(spec), sample(spec));
    GeneratorSpec other = spec;
    other.seed = 43;
    EXPECT_NE(sample(spec), sample(other));
}

TEST(Sample, SupportRespected) {
    for (double x : sample({BoundedParetoParams{0.5, 3.0, 30.0}, 20000, 3})) {
        EXPECT_GE(x, 3.0);
        EXPECT_LE(x, 30.0);
    }
    for (double x : sample({TruncLognormalParams{0.0, 2.0, 1.0, 50.0}, 20000, 3})) {
        EXPECT_GE(x, 1.0);
        EXPECT_LE(x, 50.0);
    }
}

TEST(Validate, RejectsBadSpecs) {
    EXPECT_THROW(validate({ParetoParams{0.0, 1.0}, 10, 1}), ParameterError);
    EXPECT_THROW(validate({BoundedParetoParams{1.0, 5.0, 5.0}, 10, 1}), ParameterError);
    EXPECT_THROW(validate({TruncLognormalParams{0.0, 0.0}, 10, 1}), ParameterError);
    EXPECT_THROW(validate({MixtureParams{0.0, 1.0, -1.0, 5.0}, 10, 1}), ParameterError);
    EXPECT_THROW(validate({ParetoParams{1.0, 1.0}, 0, 1}), ParameterError);
    EXPECT_THROW(sample({ParetoParams{-1.0, 1.0}, 10, 1}), ParameterError);
}

TEST(Seeds, DistinctAndStable) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(replicate_seed(7, i));
    EXPECT_EQ(seen.size(), 10000u);
    EXPECT_EQ(replicate_seed(7, 3), replicate_seed(7, 3));
    EXPECT_NE(replicate_seed(7, 3), replicate_seed(8, 3));

    std::mt19937_64 eng(1);
    for (int i = 0; i < 100000; ++i) {
        const double u = open_uniform(eng);
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(MixtureWeight, DensityContinuousAtSplice) {
    const MixtureParams m{0.3, 0.9, 1.7, 4.0};
    const double w = mixture_tail_weight(m);
    const auto S = target_exceedance(m);
    const double eps = 1e-6;
    const double left = (S(m.splice - eps) - S(m.splice)) / eps;
    const double right = (S(m.splice) - S(m.splice + eps)) / eps;
    EXPECT_NEAR(left, right, 1e-4 * right);
    EXPECT_NEAR(right, w * m.alpha / m.splice, 1e-4 * right);
    EXPECT_DOUBLE_EQ(tail_threshold(m), 4.0);
}

TEST(TrueValue, Families) {
    EXPECT_DOUBLE_EQ(true_value(ParetoParams{0.75, 2.4}, Estimator::hill_alpha), 0.75);
    EXPECT_NEAR(true_value(ParetoParams{0.75, 2.4}, Estimator::alec), std::log10(2.4) + 1 / (0.75 * std::log(10.0)), 1e-14);
    EXPECT_TRUE(std::isinf(true_value(ParetoParams{0.75, 2.4}, Estimator::sample_mean)));
    EXPECT_NEAR(true_value(ParetoParams{1.47, 2.15}, Estimator::sample_mean), 1.47 * 2.15 / 0.47, 1e-12);
    EXPECT_TRUE(std::isnan(true_value(TruncLognormalParams{}, Estimator::hill_alpha)));
    EXPECT_THROW(parse_estimator("median"), ParameterError);
    EXPECT_EQ(parse_estimator("alec"), Estimator::alec);
}

TEST(Study, AlecRseMatchesClosedForm) {
    const auto rep = run_study({ParetoParams{0.75, 2.4}, 384, 0}, Estimator::alec, 10000, 2024);
    EXPECT_EQ(rep.replicates, 10000u);
    EXPECT_EQ(rep.sample_size, 384u);
    EXPECT_NEAR(rep.empirical_rse, 0.031, 0.0031);
    EXPECT_NEAR(rep.bias, 0.0, 0.002);
    ASSERT_TRUE(rep.ci_coverage.has_value());
    EXPECT_NEAR(*rep.ci_coverage, 0.95, 0.01);
}

TEST(Study, SampleMeanIsAnOrderOfMagnitudeWorse) {
    const GeneratorSpec spec{ParetoParams{0.75, 2.4}, 384, 0};
    const auto mean_rep = run_study(spec, Estimator::sample_mean, 2000, 5);
    const auto alec_rep = run_study(spec, Estimator::alec, 2000, 5);
    EXPECT_GE(mean_rep.empirical_rse, 10.0 * alec_rep.empirical_rse);
}

TEST(Study, HillCoverage) {
    const auto rep = run_study({ParetoParams{1.0, 1.0}, 400, 0}, Estimator::hill_alpha, 10000, 77);
    ASSERT_TRUE(rep.ci_coverage.has_value());
    EXPECT_NEAR(*rep.ci_coverage, 0.95, 0.01);
    EXPECT_NEAR(rep.mean_estimate, 1.0, 0.01);
}

TEST(Study, HeavyTailDoesNotAverageOut) {
    const GeneratorSpec small{ParetoParams{0.75, 2.4}, 384, 0};
    const GeneratorSpec large{ParetoParams{0.75, 2.4}, 3840, 0};
    const auto alec_small = run_study(small, Estimator::alec, 2000, 8);
    const auto alec_large = run_study(large, Estimator::alec, 2000, 8);
    EXPECT_NEAR(alec_small.empirical_rse / alec_large.empirical_rse, std::sqrt(10.0), 0.15 * std::sqrt(10.0));

    const auto mean_small = run_study(small, Estimator::sample_mean, 2000, 8);
    const auto mean_large = run_study(large, Estimator::sample_mean, 2000, 8);
    EXPECT_GT(mean_large.empirical_rse, 2.0 * mean_small.empirical_rse / std::sqrt(10.0));
}

TEST(Study, ThreadCountDoesNotChangeResults) {
    const GeneratorSpec spec{MixtureParams{0.0, 1.0, 1.5, 5.0}, 2000, 0};
    const auto one = run_study(spec, Estimator::hill_alpha, 300, 3, {0.95, 1});
    const auto four = run_study(spec, Estimator::hill_alpha, 300, 3, {0.95, 4});
    EXPECT_EQ(one.mean_estimate, four.mean_estimate);
    EXPECT_EQ(one.empirical_rse, four.empirical_rse);
    EXPECT_EQ(one.ci_coverage, four.ci_coverage);
}

TEST(Study, Preconditions) {
    EXPECT_THROW(run_study({ParetoParams{1.0, 1.0}, 100, 0}, Estimator::alec, 99, 1), ParameterError);
}
