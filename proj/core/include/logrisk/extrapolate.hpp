#pragma once

#include <cstddef>
#include <span>

namespace logrisk {

inline constexpr double kMonthHours = 744.0;

/// Cost of a total blackout lasting `hours`, per customer.
struct MaxCostEstimate {
    double hours = kMonthHours;
    double k = 0.0;
    double c_max = 0.0;
};

/// Pareto tail conditioned to (lower, upper].
struct BoundedParetoFit {
    double alpha = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double mean = 0.0;
    double std = 0.0;
    double rse_of_mean = 0.0;  ///< std / (mean sqrt(M))
};

struct TruncatedLognormalParams {
    double mu = 0.0;
    double sigma = 0.0;
    double log_likelihood = 0.0;
    std::size_t iterations = 0;
    bool at_sigma_bound = false;  ///< optimum sits on the sigma cap
};

/// Lognormal conditioned to (lower, upper].
struct BoundedLognormalFit {
    double mu = 0.0;
    double sigma = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double mean = 0.0;
    double std = 0.0;
    double rse_of_mean = 0.0;
};

MaxCostEstimate c_max_from_k(double k, double hours = kMonthHours);

/// (c^-a - U^-a) / (L^-a - U^-a); 1 at lower, 0 at upper. DomainError
/// outside [lower, upper].
double bounded_pareto_exceedance(double c, double alpha, double lower, double upper);

/// Closed-form mean and std from the density a c^(-a-1) / (L^-a - U^-a).
/// Written through expm1 so alpha = 1 and alpha = 2 take the logarithmic
/// limit without a special case.
BoundedParetoFit bounded_pareto_moments(double alpha, double lower, double upper, std::size_t m);

/// Maximum-likelihood (mu, sigma) of a lognormal conditioned to
/// (lower, upper]. lower may be 0 and upper may be +inf. Needs >= 10 costs,
/// all inside the support. Throws ConvergenceError with diagnostics if the
/// iteration cap is hit.
TruncatedLognormalParams fit_truncated_lognormal(std::span<const double> costs, double lower, double upper);

/// Truncated-lognormal mean and std from normal CDF differences (evaluated in
/// log space). Throws NegligibleSupportError when the conditioning mass is
/// not representable or below `min_support_mass`.
BoundedLognormalFit bounded_lognormal_moments(double mu, double sigma, double lower, double upper, std::size_t m,
                                              double min_support_mass = 0.0);

}  // namespace logrisk
