#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "logrisk/eventize.hpp"
#include "logrisk/riskcurve.hpp"

namespace logrisk {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x) const noexcept { return lo <= x && x <= hi; }
    double width() const noexcept { return hi - lo; }
};

/// How confidence intervals for alpha and ALEC are built.
///  - normal: asymptotic normal, std(alpha_hat) = alpha/sqrt(M) and
///    std(ALEC) = (alpha ln 10)^-1 / sqrt(M).
///  - exact: chi-square pivot. For Pareto data sum ln(c/c_large) is
///    Gamma(M, alpha), so 2*alpha*sum ~ chi2(2M).
enum class CiMethod { normal, exact };

std::string_view to_string(CiMethod m) noexcept;
CiMethod parse_ci_method(std::string_view text);

/// Pareto tail fit above a fixed threshold.
struct TailFit {
    double c_large = 0.0;
    std::size_t n_large = 0;
    double alpha = 0.0;
    double alec = 0.0;  ///< mean log10 cost
    Interval ci_alpha;
    Interval ci_alec;
    /// Empty when 1 + alpha ln c_large <= 0 (see rse_alec()).
    std::optional<double> rse_alec;
    double rate_lambda = 0.0;  ///< alpha * ln 10, rate of the log10 excess
    double shift = 0.0;        ///< log10 c_large
    double level = 0.95;
    CiMethod ci_method = CiMethod::normal;
};

struct CminResult {
    double c_min = 0.0;
    double alpha_at_cmin = 0.0;
    double ks_distance = 0.0;
    std::size_t n_tail = 0;
    std::size_t candidates_evaluated = 0;
};

struct ParetoMean {
    double mean = 0.0;  ///< +inf when alpha <= 1
    bool infinite_mean = false;
    bool infinite_variance = false;
};

/// Mean of log10 cost. 10^alec is the geometric mean. Throws DomainError for
/// nonpositive costs and EmptyTailError for an empty list.
double alec(std::span<const double> large_costs);

/// Hill maximum-likelihood estimate [mean ln(c / c_large)]^-1. Throws
/// DomainError if any cost is below c_large and DegenerateTailError when
/// every cost equals c_large.
double hill_alpha(std::span<const double> large_costs, double c_large);

/// (c / c_large)^-alpha for c >= c_large.
double pareto_exceedance(double c, double alpha, double c_large);

/// Exceedance of x = log10 c under the Pareto tail: a shifted exponential
/// with rate alpha ln 10 and shift log10 c_large.
double shifted_exp_exceedance(double x, double alpha, double c_large);

/// Relative standard error of ALEC from M Pareto samples,
/// [(1 + alpha ln c_large) sqrt(M)]^-1. Throws DomainError when
/// 1 + alpha ln c_large <= 0, i.e. the mean log cost is not positive.
double rse_alec(double alpha, double c_large, double m);

Interval ci_alpha(double alpha_hat, std::size_t m, double level, CiMethod method = CiMethod::normal);

Interval ci_alec(double alec_hat, double alpha_hat, double c_large, std::size_t m, double level,
                 CiMethod method = CiMethod::normal);

/// Full fit over a large-cost selection with M = n_large.
TailFit fit_tail(const LargeCostSelection& selection, double level = 0.95, CiMethod method = CiMethod::normal);

/// Clauset-style lower cutoff: every distinct observed cost is a candidate
/// threshold; alpha is fit by Hill above it and the candidate with the
/// smallest Kolmogorov-Smirnov distance between the tail ECDF and the fitted
/// Pareto wins (ties go to the smaller cost). Candidates with fewer than
/// `min_tail` costs at or above them are skipped.
CminResult clauset_cmin(const CostDataset& dataset, std::size_t min_tail = 10);

ParetoMean pareto_mean(double alpha, double c_large);

}  // namespace logrisk
