#include "normal_math.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "logrisk/error.hpp"

namespace logrisk::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

// log(1 - exp(x)) for x <= 0.
double log1mexp(double x) noexcept {
    if (x == -kInf) return 0.0;
    return x > -std::numbers::ln2 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

// Tails F_j = j / (x + F_{j+1}) of the Laplace continued fraction for the
// Mills ratio, j = 1..4. For W = Z - x with Z a standard normal above x,
// E[W^k] = F_1 F_2 ... F_k, and Q(x) / phi(x) = 1 / (x + F_1).
std::array<double, 5> mills_tails(double x) noexcept {
    double f = 0.0;
    std::array<double, 5> tails{};
    for (int j = 400; j >= 1; --j) {
        f = j / (x + f);
        if (j <= 4) tails[static_cast<std::size_t>(j)] = f;
    }
    return tails;
}

// One-sided moments about lo for the normal truncated to (lo, hi], lo > 0.
AnchoredMoments upper_tail_moments(double lo, double hi) noexcept {
    AnchoredMoments out;
    out.anchor = lo;
    const auto f = mills_tails(lo);
    std::array<double, 5> w{1.0, 0.0, 0.0, 0.0, 0.0};
    for (std::size_t k = 1; k <= 4; ++k) w[k] = w[k - 1] * f[k];
    out.log_mass_shifted = -std::log(lo + f[1]) - kLogSqrt2Pi;
    if (std::isfinite(hi)) {
        // Remove the mass above hi, whose excess over lo is span + W'.
        const auto g = mills_tails(hi);
        std::array<double, 5> v{1.0, 0.0, 0.0, 0.0, 0.0};
        for (std::size_t k = 1; k <= 4; ++k) v[k] = v[k - 1] * g[k];
        const double span = hi - lo;
        const double log_ratio = -std::log(hi + g[1]) + std::log(lo + f[1]) - 0.5 * span * (hi + lo);
        const double ratio = std::exp(log_ratio);
        static constexpr double binom[5][5] = {{1}, {1, 1}, {1, 2, 1}, {1, 3, 3, 1}, {1, 4, 6, 4, 1}};
        for (std::size_t k = 1; k <= 4; ++k) {
            double beyond = 0.0;
            for (std::size_t j = 0; j <= k; ++j) beyond += binom[k][j] * std::pow(span, static_cast<double>(k - j)) * v[j];
            w[k] = (w[k] - ratio * beyond) / (1.0 - ratio);
        }
        out.log_mass_shifted += log1mexp(log_ratio);
    }
    out.w = w;
    return out;
}

}  // namespace

double normal_pdf(double x) noexcept {
    if (std::isinf(x)) return 0.0;
    return std::exp(log_normal_pdf(x));
}

double log_normal_pdf(double x) noexcept { return -0.5 * x * x - kLogSqrt2Pi; }

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) noexcept { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double log_normal_sf(double x) noexcept {
    if (x == kInf) return -kInf;
    if (x == -kInf) return 0.0;
    if (x < 0.0) return std::log1p(-normal_cdf(x));
    if (x < 30.0) return std::log(normal_sf(x));
    // Asymptotic expansion of the Mills ratio; relative error < 1e-12 here.
    const double x2 = x * x;
    const double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2) + 105.0 / (x2 * x2 * x2 * x2);
    return -0.5 * x2 - std::log(x) - kLogSqrt2Pi + std::log(series);
}

double log_normal_interval(double a, double b) noexcept {
    if (!(a < b)) return -kInf;
    if (a >= 0.0) {
        // Both in the upper tail: Q(a) - Q(b).
        const double la = log_normal_sf(a);
        return la + log1mexp(log_normal_sf(b) - la);
    }
    if (b <= 0.0) {
        // Mirror: Phi(b) - Phi(a) = Q(-b) - Q(-a).
        const double lb = log_normal_sf(-b);
        return lb + log1mexp(log_normal_sf(-a) - lb);
    }
    return std::log1p(-(normal_sf(b) + normal_cdf(a)));
}

double normal_quantile(double p) {
    if (p <= 0.0) return -kInf;
    if (p >= 1.0) return kInf;
    return boost::math::quantile(boost::math::normal_distribution<double>{}, p);
}

double normal_isf(double q) {
    if (q <= 0.0) return kInf;
    if (q >= 1.0) return -kInf;
    return boost::math::quantile(boost::math::complement(boost::math::normal_distribution<double>{}, q));
}

double z_for_level(double level) {
    if (!(level > 0.0 && level < 1.0)) throw ParameterError("confidence level must lie in (0, 1)");
    return normal_isf(0.5 * (1.0 - level));
}

double chi_squared_quantile(double dof, double p) {
    return boost::math::quantile(boost::math::chi_squared_distribution<double>{dof}, p);
}

std::array<double, 5> truncated_normal_moments(double a, double b) {
    const double log_mass = log_normal_interval(a, b);
    // x^j * phi(x) / mass, zero at infinite bounds.
    auto edge = [&](double x, int j) {
        if (std::isinf(x)) return 0.0;
        return std::pow(x, j) * std::exp(log_normal_pdf(x) - log_mass);
    };
    std::array<double, 5> m{};
    m[0] = 1.0;
    m[1] = edge(a, 0) - edge(b, 0);
    for (int k = 2; k <= 4; ++k) {
        m[k] = (k - 1) * m[k - 2] + edge(a, k - 1) - edge(b, k - 1);
    }
    return m;
}

AnchoredMoments anchored_truncated_normal_moments(double a, double b) {
    // Beyond this depth the raw moments of Z lose digits to cancellation.
    constexpr double kDeep = 3.0;
    if (a > kDeep) return upper_tail_moments(a, b);
    if (b < -kDeep) {
        auto out = upper_tail_moments(-b, -a);
        out.anchor = b;
        out.sign = -1.0;
        return out;
    }
    AnchoredMoments out;
    out.w = truncated_normal_moments(a, b);
    out.log_mass_shifted = log_normal_interval(a, b);
    return out;
}

}  // namespace logrisk::detail
