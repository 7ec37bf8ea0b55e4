#include "logrisk/tailfit.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "logrisk/error.hpp"
#include "normal_math.hpp"
#include "text_util.hpp"

namespace logrisk {

namespace {

constexpr double kLn10 = std::numbers::ln10;

void require_level(double level) {
    if (!(level > 0.0 && level < 1.0)) throw ParameterError("confidence level must lie in (0, 1)");
}

void require_m(std::size_t m) {
    if (m < 2) throw ParameterError("confidence intervals need M >= 2 samples");
}

}  // namespace

std::string_view to_string(CiMethod m) noexcept { return m == CiMethod::exact ? "exact" : "normal"; }

CiMethod parse_ci_method(std::string_view text) {
    const std::string v = detail::to_lower(detail::trim(text));
    if (v == "normal") return CiMethod::normal;
    if (v == "exact" || v == "chi2" || v == "chisquare") return CiMethod::exact;
    throw ParameterError("unknown CI method '" + std::string(text) + "' (expected normal or exact)");
}

double alec(std::span<const double> large_costs) {
    if (large_costs.empty()) throw EmptyTailError("ALEC of an empty cost list");
    double sum = 0.0;
    for (double c : large_costs) {
        if (!(c > 0.0)) throw DomainError("ALEC needs strictly positive costs, got " + std::to_string(c));
        sum += std::log10(c);
    }
    return sum / static_cast<double>(large_costs.size());
}

double hill_alpha(std::span<const double> large_costs, double c_large) {
    if (!(c_large > 0.0)) throw ParameterError("c_large must be positive");
    if (large_costs.empty()) throw EmptyTailError("Hill estimate of an empty cost list");
    double sum = 0.0;
    for (double c : large_costs) {
        if (c < c_large) {
            throw DomainError("Hill estimate needs every cost >= c_large; got " + std::to_string(c) + " < " +
                              std::to_string(c_large));
        }
        sum += std::log(c / c_large);
    }
    if (!(sum > 0.0)) throw DegenerateTailError("degenerate tail: every cost equals c_large, alpha diverges");
    return static_cast<double>(large_costs.size()) / sum;
}

double pareto_exceedance(double c, double alpha, double c_large) {
    if (!(alpha > 0.0) || !(c_large > 0.0)) throw ParameterError("alpha and c_large must be positive");
    if (c < c_large) throw DomainError("Pareto exceedance is defined for c >= c_large");
    return std::pow(c / c_large, -alpha);
}

double shifted_exp_exceedance(double x, double alpha, double c_large) {
    if (!(alpha > 0.0) || !(c_large > 0.0)) throw ParameterError("alpha and c_large must be positive");
    const double shift = std::log10(c_large);
    if (x < shift) throw DomainError("shifted exponential is defined for x >= log10 c_large");
    return std::exp(-(alpha * kLn10) * (x - shift));
}

double rse_alec(double alpha, double c_large, double m) {
    if (!(alpha > 0.0) || !(c_large > 0.0)) throw ParameterError("alpha and c_large must be positive");
    if (!(m >= 1.0)) throw ParameterError("M must be at least 1");
    const double denom = 1.0 + alpha * std::log(c_large);
    if (!(denom > 0.0)) {
        throw DomainError("RSE_ALEC formula out of domain: 1 + alpha*ln(c_large) = " + std::to_string(denom) +
                          " <= 0, so the expected ALEC is not positive and a relative error is undefined");
    }
    return 1.0 / (denom * std::sqrt(m));
}

Interval ci_alpha(double alpha_hat, std::size_t m, double level, CiMethod method) {
    require_level(level);
    require_m(m);
    const auto md = static_cast<double>(m);
    if (method == CiMethod::exact) {
        const double tail = 0.5 * (1.0 - level);
        return {alpha_hat * detail::chi_squared_quantile(2.0 * md, tail) / (2.0 * md),
                alpha_hat * detail::chi_squared_quantile(2.0 * md, 1.0 - tail) / (2.0 * md)};
    }
    const double half = detail::z_for_level(level) / std::sqrt(md);
    return {alpha_hat * (1.0 - half), alpha_hat * (1.0 + half)};
}

Interval ci_alec(double alec_hat, double alpha_hat, double c_large, std::size_t m, double level, CiMethod method) {
    require_level(level);
    require_m(m);
    const auto md = static_cast<double>(m);
    if (method == CiMethod::exact) {
        const double shift = std::log10(c_large);
        const double excess = alec_hat - shift;
        const double tail = 0.5 * (1.0 - level);
        return {shift + 2.0 * md * excess / detail::chi_squared_quantile(2.0 * md, 1.0 - tail),
                shift + 2.0 * md * excess / detail::chi_squared_quantile(2.0 * md, tail)};
    }
    const double half = detail::z_for_level(level) / (alpha_hat * kLn10 * std::sqrt(md));
    return {alec_hat - half, alec_hat + half};
}

TailFit fit_tail(const LargeCostSelection& selection, double level, CiMethod method) {
    TailFit fit;
    fit.c_large = selection.c_large;
    fit.n_large = selection.n_large;
    fit.alpha = hill_alpha(selection.large_costs, selection.c_large);
    fit.alec = alec(selection.large_costs);
    fit.ci_alpha = ci_alpha(fit.alpha, fit.n_large, level, method);
    fit.ci_alec = ci_alec(fit.alec, fit.alpha, fit.c_large, fit.n_large, level, method);
    try {
        fit.rse_alec = rse_alec(fit.alpha, fit.c_large, static_cast<double>(fit.n_large));
    } catch (const DomainError&) {
        fit.rse_alec.reset();
    }
    fit.rate_lambda = fit.alpha * kLn10;
    fit.shift = std::log10(fit.c_large);
    fit.level = level;
    fit.ci_method = method;
    return fit;
}

CminResult clauset_cmin(const CostDataset& dataset, std::size_t min_tail) {
    const auto x = dataset.sorted_costs();
    const std::size_t n = x.size();

    // run_end[i]: one past the last index holding the value x[i].
    std::vector<std::size_t> run_end(n);
    std::size_t distinct = 0;
    for (std::size_t i = n; i-- > 0;) {
        run_end[i] = (i + 1 < n && x[i + 1] == x[i]) ? run_end[i + 1] : i + 1;
    }
    for (std::size_t i = 0; i < n; i = run_end[i]) ++distinct;
    if (distinct < 10) {
        throw InsufficientDataError("insufficient data: Clauset c_min needs at least 10 distinct costs, got " +
                                    std::to_string(distinct));
    }

    std::vector<double> log_x(n);
    for (std::size_t i = 0; i < n; ++i) log_x[i] = std::log(x[i]);
    // suffix[i] = sum of log_x[i..n)
    std::vector<double> suffix(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + log_x[i];

    CminResult best;
    best.ks_distance = std::numeric_limits<double>::infinity();
    std::size_t evaluated = 0;
    for (std::size_t i = 0; i < n; i = run_end[i]) {
        const std::size_t m = n - i;
        if (m < min_tail) break;
        const double log_sum = suffix[i] - static_cast<double>(m) * log_x[i];
        if (!(log_sum > 0.0)) continue;
        const double alpha = static_cast<double>(m) / log_sum;
        ++evaluated;

        const double inv_m = 1.0 / static_cast<double>(m);
        double ks = 0.0;
        for (std::size_t j = i; j < n; j = run_end[j]) {
            const double fitted = -std::expm1(-alpha * (log_x[j] - log_x[i]));
            const double before = static_cast<double>(j - i) * inv_m;
            const double after = static_cast<double>(run_end[j] - i) * inv_m;
            ks = std::max({ks, std::abs(fitted - before), std::abs(after - fitted)});
            if (ks >= best.ks_distance) break;
        }
        if (ks < best.ks_distance) {
            best.c_min = x[i];
            best.alpha_at_cmin = alpha;
            best.ks_distance = ks;
            best.n_tail = m;
        }
    }
    if (evaluated == 0) {
        throw InsufficientDataError("insufficient data: no candidate threshold leaves at least " +
                                    std::to_string(min_tail) + " costs in the tail");
    }
    best.candidates_evaluated = evaluated;
    return best;
}

ParetoMean pareto_mean(double alpha, double c_large) {
    if (!(alpha > 0.0) || !(c_large > 0.0)) throw ParameterError("alpha and c_large must be positive");
    ParetoMean out;
    out.infinite_variance = alpha <= 2.0;
    if (alpha <= 1.0) {
        out.infinite_mean = true;
        out.mean = std::numeric_limits<double>::infinity();
    } else {
        out.mean = alpha * c_large / (alpha - 1.0);
    }
    return out;
}

}  // namespace logrisk
