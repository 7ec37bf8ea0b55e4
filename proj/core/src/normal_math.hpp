#pragma once

#include <array>

// Standard-normal helpers shared by the fitting and sampling code. Tail
// quantities are evaluated in log space so that probabilities far below
// double precision still compare and divide correctly.
namespace logrisk::detail {

double normal_pdf(double x) noexcept;
double log_normal_pdf(double x) noexcept;
double normal_cdf(double x) noexcept;
/// Upper tail Q(x) = 1 - Phi(x).
double normal_sf(double x) noexcept;
/// log Q(x); finite far into the tail, -inf at +inf.
double log_normal_sf(double x) noexcept;
/// log(Phi(b) - Phi(a)) for a < b, either bound may be infinite.
double log_normal_interval(double a, double b) noexcept;

double normal_quantile(double p);
/// x with Q(x) = q.
double normal_isf(double q);

/// Two-sided standard normal critical value for a central confidence level.
double z_for_level(double level);

double chi_squared_quantile(double dof, double p);

/// Raw moments E[Z^k], k = 0..4, of a standard normal truncated to (a, b].
std::array<double, 5> truncated_normal_moments(double a, double b);

/// Truncated standard normal on (a, b] described relative to an anchor so
/// that deep one-sided truncation keeps full precision. With W = sign (Z -
/// anchor), `w` holds E[W^k], k = 0..4, and `log_mass_shifted` is
/// log P(a < Z <= b) + anchor^2 / 2. The anchor is a when a is far in the
/// upper tail, b when b is far in the lower tail, and 0 otherwise.
struct AnchoredMoments {
    double anchor = 0.0;
    double sign = 1.0;
    std::array<double, 5> w{};
    double log_mass_shifted = 0.0;
};

AnchoredMoments anchored_truncated_normal_moments(double a, double b);

}  // namespace logrisk::detail
