#include "logrisk/extrapolate.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "logrisk/error.hpp"
#include "normal_math.hpp"

namespace logrisk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// expm1(x) / x with the removable singularity at 0 filled in.
double exprel(double x) noexcept {
    if (std::abs(x) < 1e-5) return 1.0 + x * (0.5 + x / 6.0);
    return std::expm1(x) / x;
}

void require_support(double lower, double upper) {
    if (!(lower > 0.0) || !(upper > lower) || !std::isfinite(upper)) {
        throw ParameterError("bounded support needs 0 < lower < upper < inf");
    }
}

// E[C^r] of the bounded Pareto.
double bounded_pareto_raw_moment(double r, double alpha, double lower, double span_log) {
    return alpha * std::pow(lower, r) * span_log * exprel((r - alpha) * span_log) / -std::expm1(-alpha * span_log);
}

double log_or_inf(double x) { return x > 0.0 ? std::log(x) : -kInf; }

// Average log-likelihood (up to a data constant) of standardized log costs
// under the truncated normal with natural parameters theta1, theta2 < 0.
struct NaturalState {
    double loglik = -kInf;
    double mean_y = 0.0;
    double mean_y2 = 0.0;
    double var_y = 0.0;
    double cov_y_y2 = 0.0;
    double var_y2 = 0.0;
    bool ok = false;
};

NaturalState evaluate(double theta1, double theta2, double a, double b, double t1, double t2) {
    NaturalState st;
    const double var = -0.5 / theta2;
    const double sd = std::sqrt(var);
    const double mu = theta1 * var;
    const double za = (a - mu) / sd;
    const double zb = (b - mu) / sd;
    if (!(za < zb)) return st;
    const auto z = detail::anchored_truncated_normal_moments(za, zb);
    if (!std::isfinite(z.log_mass_shifted)) return st;

    // Anchor in data units. Using a or b itself rather than mu + sd * anchor
    // keeps the deep-tail case free of cancellation.
    const double y0 = z.anchor == za ? a : z.anchor == zb ? b : mu;
    // mu^2 / (2 var) - anchor^2 / 2 rewritten without the large squares.
    const double quad = y0 * (2.0 * mu - y0) / (2.0 * var);
    const double log_partition = quad + std::log(sd) + 0.5 * std::log(2.0 * std::numbers::pi) + z.log_mass_shifted;
    st.loglik = theta1 * t1 + theta2 * t2 - log_partition;

    // Central moments of W, then of Y = y0 + sign * sd * W.
    const auto& w = z.w;
    const double m = w[1];
    const double k2 = w[2] - m * m;
    const double k3 = w[3] - 3.0 * m * w[2] + 2.0 * m * m * m;
    const double k4 = w[4] - 4.0 * m * w[3] + 6.0 * m * m * w[2] - 3.0 * m * m * m * m;
    const double ey = y0 + z.sign * sd * m;
    const double v = var * k2;
    const double d3 = z.sign * var * sd * k3;
    const double d4 = var * var * k4;
    st.mean_y = ey;
    st.mean_y2 = ey * ey + v;
    st.var_y = v;
    st.cov_y_y2 = 2.0 * ey * v + d3;
    st.var_y2 = 4.0 * ey * ey * v + 4.0 * ey * d3 + d4 - v * v;
    st.ok = std::isfinite(st.loglik) && std::isfinite(st.var_y2) && st.var_y > 0.0;
    return st;
}

}  // namespace

MaxCostEstimate c_max_from_k(double k, double hours) {
    if (!(k > 0.0)) throw ParameterError("k must be positive");
    if (!(hours > 0.0)) throw ParameterError("blackout duration (hours) must be positive");
    return {hours, k, hours * k};
}

double bounded_pareto_exceedance(double c, double alpha, double lower, double upper) {
    require_support(lower, upper);
    if (!(alpha > 0.0)) throw ParameterError("alpha must be positive");
    if (c < lower || c > upper) throw DomainError("bounded Pareto exceedance is defined on [lower, upper]");
    if (c == upper) return 0.0;
    const double top = std::pow(upper / lower, -alpha);
    return (std::pow(c / lower, -alpha) - top) / (1.0 - top);
}

BoundedParetoFit bounded_pareto_moments(double alpha, double lower, double upper, std::size_t m) {
    require_support(lower, upper);
    if (!(alpha > 0.0)) throw ParameterError("alpha must be positive");
    if (m < 1) throw ParameterError("M must be at least 1");
    const double span_log = std::log(upper / lower);
    BoundedParetoFit fit;
    fit.alpha = alpha;
    fit.lower = lower;
    fit.upper = upper;
    fit.mean = bounded_pareto_raw_moment(1.0, alpha, lower, span_log);
    const double second = bounded_pareto_raw_moment(2.0, alpha, lower, span_log);
    fit.std = std::sqrt(std::max(0.0, second - fit.mean * fit.mean));
    fit.rse_of_mean = fit.std / (fit.mean * std::sqrt(static_cast<double>(m)));
    return fit;
}

TruncatedLognormalParams fit_truncated_lognormal(std::span<const double> costs, double lower, double upper) {
    if (!(lower >= 0.0) || !(upper > lower)) throw ParameterError("truncated lognormal needs 0 <= lower < upper");
    if (costs.size() < 10) {
        throw InsufficientDataError("insufficient data: truncated lognormal fit needs at least 10 costs, got " +
                                    std::to_string(costs.size()));
    }
    const auto n = static_cast<double>(costs.size());
    double mean = 0.0;
    for (double c : costs) {
        if (c < lower || c > upper) throw DomainError("every cost must lie in [lower, upper]");
        mean += std::log(c);
    }
    mean /= n;
    double var = 0.0;
    for (double c : costs) var += (std::log(c) - mean) * (std::log(c) - mean);
    var /= n;
    if (!(var > 0.0)) throw ConvergenceError("truncated lognormal fit: all costs are equal");
    const double scale = std::sqrt(var);

    // Work on standardized log costs; their sample mean is 0 and mean square 1.
    const double a = (log_or_inf(lower) - mean) / scale;
    const double b = (std::log(upper) - mean) / scale;
    const double t1 = 0.0;
    const double t2 = 1.0;

    constexpr double kSigmaCap = 1e4;  // standardized units
    constexpr double kTheta2Max = -0.5 / (kSigmaCap * kSigmaCap);
    constexpr std::size_t kMaxIterations = 200;
    constexpr double kTolerance = 1e-24;  // Newton decrement

    double th1 = 0.0;
    double th2 = -0.5;
    NaturalState st = evaluate(th1, th2, a, b, t1, t2);
    if (!st.ok) throw ConvergenceError("truncated lognormal fit: support has no mass at the starting point");

    TruncatedLognormalParams out;
    bool converged = false;
    double decrement = kInf;
    std::size_t it = 0;
    for (; it < kMaxIterations; ++it) {
        const double g1 = t1 - st.mean_y;
        const double g2 = t2 - st.mean_y2;
        const double h11 = st.var_y, h12 = st.cov_y_y2, h22 = st.var_y2;
        const double det = h11 * h22 - h12 * h12;
        double d1 = 0.0, d2 = 0.0;
        const bool on_bound = th2 >= kTheta2Max;
        if (det > 0.0) {
            d1 = (h22 * g1 - h12 * g2) / det;
            d2 = (h11 * g2 - h12 * g1) / det;
        }
        if (!(det > 0.0) || (on_bound && d2 > 0.0)) {
            d1 = g1 / h11;
            d2 = 0.0;
        }
        decrement = g1 * d1 + g2 * d2;
        if (decrement < kTolerance) {
            converged = true;
            out.at_sigma_bound = on_bound;
            break;
        }

        double t = 1.0;
        if (th2 + t * d2 > kTheta2Max) t = (kTheta2Max - th2) / d2;
        bool accepted = false;
        for (int halving = 0; halving < 80; ++halving, t *= 0.5) {
            double n1 = th1 + t * d1;
            double n2 = std::min(th2 + t * d2, kTheta2Max);
            const NaturalState cand = evaluate(n1, n2, a, b, t1, t2);
            if (!cand.ok) continue;
            // Near the optimum the objective change drops below rounding, so
            // the sufficient-increase test is replaced by the Newton step.
            if (decrement < 1e-10 || cand.loglik >= st.loglik + 1e-4 * t * decrement) {
                th1 = n1;
                th2 = n2;
                st = cand;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (decrement < 1e-16) {
                converged = true;
                break;
            }
            break;
        }
    }

    const double sd_std = std::sqrt(-0.5 / th2);
    const double mu_std = th1 * sd_std * sd_std;
    out.mu = mean + scale * mu_std;
    out.sigma = scale * sd_std;
    out.iterations = it;
    if (!converged) {
        std::ostringstream msg;
        msg.precision(10);
        msg << "truncated lognormal fit did not converge after " << it << " iterations (newton decrement "
            << decrement << ", mu " << out.mu << ", sigma " << out.sigma << ")";
        throw ConvergenceError(msg.str());
    }

    // Full log-likelihood in the original cost units.
    const double za = (log_or_inf(lower) - out.mu) / out.sigma;
    const double zb = (std::log(upper) - out.mu) / out.sigma;
    const double log_mass = detail::log_normal_interval(za, zb);
    double ll = 0.0;
    for (double c : costs) {
        const double x = std::log(c);
        const double z = (x - out.mu) / out.sigma;
        ll += -x - std::log(out.sigma) + detail::log_normal_pdf(z);
    }
    out.log_likelihood = ll - n * log_mass;
    return out;
}

BoundedLognormalFit bounded_lognormal_moments(double mu, double sigma, double lower, double upper, std::size_t m,
                                              double min_support_mass) {
    if (!(sigma > 0.0)) throw ParameterError("sigma must be positive");
    if (!(lower >= 0.0) || !(upper > lower)) throw ParameterError("truncated lognormal needs 0 <= lower < upper");
    if (m < 1) throw ParameterError("M must be at least 1");
    const double a = (log_or_inf(lower) - mu) / sigma;
    const double b = (std::log(upper) - mu) / sigma;
    const double log_mass = detail::log_normal_interval(a, b);
    if (!std::isfinite(log_mass) || (min_support_mass > 0.0 && log_mass < std::log(min_support_mass))) {
        throw NegligibleSupportError("negligible support: lognormal(mu=" + std::to_string(mu) +
                                     ", sigma=" + std::to_string(sigma) + ") has no usable mass on (lower, upper]");
    }
    auto raw = [&](double r) {
        return std::exp(r * mu + 0.5 * r * r * sigma * sigma +
                        detail::log_normal_interval(a - r * sigma, b - r * sigma) - log_mass);
    };
    BoundedLognormalFit fit;
    fit.mu = mu;
    fit.sigma = sigma;
    fit.lower = lower;
    fit.upper = upper;
    fit.mean = raw(1.0);
    const double second = raw(2.0);
    fit.std = std::sqrt(std::max(0.0, second - fit.mean * fit.mean));
    fit.rse_of_mean = fit.std / (fit.mean * std::sqrt(static_cast<double>(m)));
    return fit;
}

}  // namespace logrisk
