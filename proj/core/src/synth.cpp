#include "logrisk/synth.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include "logrisk/error.hpp"
#include "logrisk/extrapolate.hpp"
#include "logrisk/tailfit.hpp"
#include "normal_math.hpp"
#include "text_util.hpp"

namespace logrisk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

double trunc_lognormal_inverse(const TruncLognormalParams& p, double u) {
    const double a = p.lower > 0.0 ? (std::log(p.lower) - p.mu) / p.sigma : -kInf;
    const double b = std::isinf(p.upper) ? kInf : (std::log(p.upper) - p.mu) / p.sigma;
    // Invert on whichever side of the median the target falls, using the
    // survival function there so neither tail loses precision.
    const double fa = detail::normal_cdf(a);
    const double fb = detail::normal_cdf(b);
    const double target = fb - u * (fb - fa);
    double z = 0.0;
    if (target <= 0.5) {
        z = detail::normal_quantile(target);
    } else {
        const double qa = detail::normal_sf(a);
        const double qb = detail::normal_sf(b);
        z = detail::normal_isf(qb + u * (qa - qb));
    }
    z = std::clamp(z, a, b);
    return std::clamp(std::exp(p.mu + p.sigma * z), p.lower, p.upper);
}

double mixture_draw(const MixtureParams& p, double w, double u_component, double u_value) {
    if (u_component < w) return p.splice * std::pow(u_value, -1.0 / p.alpha);
    return trunc_lognormal_inverse({p.mu, p.sigma, 0.0, p.splice}, u_value);
}

double estimate(Estimator e, const std::vector<double>& tail, double threshold) {
    switch (e) {
        case Estimator::hill_alpha: return hill_alpha(tail, threshold);
        case Estimator::alec: return alec(tail);
        case Estimator::sample_mean: {
            double s = 0.0;
            for (double c : tail) s += c;
            return s / static_cast<double>(tail.size());
        }
    }
    return kNaN;
}

}  // namespace

std::string_view family_name(const FamilyParams& params) noexcept {
    return std::visit(overloaded{
                          [](const ParetoParams&) { return std::string_view("pareto"); },
                          [](const BoundedParetoParams&) { return std::string_view("bounded_pareto"); },
                          [](const TruncLognormalParams&) { return std::string_view("trunc_lognormal"); },
                          [](const MixtureParams&) { return std::string_view("mixture"); },
                      },
                      params);
}

std::string_view to_string(Estimator e) noexcept {
    switch (e) {
        case Estimator::hill_alpha: return "hill_alpha";
        case Estimator::alec: return "alec";
        case Estimator::sample_mean: return "sample_mean";
    }
    return "";
}

Estimator parse_estimator(std::string_view text) {
    const std::string v = detail::to_lower(detail::trim(text));
    if (v == "hill_alpha" || v == "alpha" || v == "hill") return Estimator::hill_alpha;
    if (v == "alec") return Estimator::alec;
    if (v == "sample_mean" || v == "mean") return Estimator::sample_mean;
    throw ParameterError("unknown estimator '" + std::string(text) +
                         "' (expected hill_alpha, alec or sample_mean)");
}

void validate(const GeneratorSpec& spec) {
    if (spec.n == 0) throw ParameterError("generator sample size n must be positive");
    std::visit(overloaded{
                   [](const ParetoParams& p) {
                       if (!(p.alpha > 0.0) || !(p.lower > 0.0)) {
                           throw ParameterError("pareto needs alpha > 0 and lower > 0");
                       }
                   },
                   [](const BoundedParetoParams& p) {
                       if (!(p.alpha > 0.0) || !(p.lower > 0.0) || !(p.upper > p.lower) || std::isinf(p.upper)) {
                           throw ParameterError("bounded_pareto needs alpha > 0 and 0 < lower < upper < inf");
                       }
                   },
                   [](const TruncLognormalParams& p) {
                       if (!(p.sigma > 0.0) || !(p.lower >= 0.0) || !(p.upper > p.lower) || !std::isfinite(p.mu)) {
                           throw ParameterError("trunc_lognormal needs sigma > 0 and 0 <= lower < upper");
                       }
                   },
                   [](const MixtureParams& p) {
                       if (!(p.sigma > 0.0) || !(p.alpha > 0.0) || !(p.splice > 0.0) || !std::isfinite(p.mu)) {
                           throw ParameterError("mixture needs sigma > 0, alpha > 0 and splice > 0");
                       }
                       const double w = mixture_tail_weight(p);
                       if (!(w > 0.0 && w < 1.0)) {
                           throw ParameterError("mixture weights degenerate: tail weight " + std::to_string(w));
                       }
                   },
               },
               spec.params);
}

double mixture_tail_weight(const MixtureParams& p) {
    const double beta = (std::log(p.splice) - p.mu) / p.sigma;
    // Body density just below the splice relative to the tail's alpha/splice.
    const double h = std::exp(detail::log_normal_pdf(beta) - std::log(detail::normal_cdf(beta))) / p.sigma;
    return h / (h + p.alpha);
}

double tail_threshold(const FamilyParams& params) noexcept {
    return std::visit(overloaded{
                          [](const ParetoParams& p) { return p.lower; },
                          [](const BoundedParetoParams& p) { return p.lower; },
                          [](const TruncLognormalParams& p) { return p.lower; },
                          [](const MixtureParams& p) { return p.splice; },
                      },
                      params);
}

double inverse_exceedance(const FamilyParams& params, double u) {
    if (!(u >= 0.0 && u <= 1.0)) throw ParameterError("exceedance level must lie in [0, 1]");
    return std::visit(overloaded{
                          [u](const ParetoParams& p) {
                              return u == 0.0 ? kInf : p.lower * std::pow(u, -1.0 / p.alpha);
                          },
                          [u](const BoundedParetoParams& p) {
                              const double top = std::pow(p.upper / p.lower, -p.alpha);
                              const double c = p.lower * std::pow(top + u * (1.0 - top), -1.0 / p.alpha);
                              return std::clamp(c, p.lower, p.upper);
                          },
                          [u](const TruncLognormalParams& p) { return trunc_lognormal_inverse(p, u); },
                          [](const MixtureParams&) -> double {
                              throw ParameterError("the mixture family has no single-uniform inverse");
                          },
                      },
                      params);
}

std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return splitmix64(master ^ splitmix64(index));
}

double open_uniform(std::mt19937_64& engine) noexcept {
    return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
}

std::vector<double> sample(const GeneratorSpec& spec) {
    validate(spec);
    std::mt19937_64 engine(spec.seed);
    std::vector<double> out;
    out.reserve(spec.n);
    if (const auto* mix = std::get_if<MixtureParams>(&spec.params)) {
        const double w = mixture_tail_weight(*mix);
        for (std::size_t i = 0; i < spec.n; ++i) {
            const double u1 = open_uniform(engine);
            const double u2 = open_uniform(engine);
            out.push_back(mixture_draw(*mix, w, u1, u2));
        }
        return out;
    }
    for (std::size_t i = 0; i < spec.n; ++i) out.push_back(inverse_exceedance(spec.params, open_uniform(engine)));
    return out;
}

double true_value(const FamilyParams& params, Estimator estimator) {
    constexpr double ln10 = std::numbers::ln10;
    auto pareto_values = [&](double alpha, double lower) {
        switch (estimator) {
            case Estimator::hill_alpha: return alpha;
            case Estimator::alec: return std::log10(lower) + 1.0 / (alpha * ln10);
            case Estimator::sample_mean: return pareto_mean(alpha, lower).mean;
        }
        return kNaN;
    };
    return std::visit(overloaded{
                          [&](const ParetoParams& p) { return pareto_values(p.alpha, p.lower); },
                          [&](const MixtureParams& p) { return pareto_values(p.alpha, p.splice); },
                          [&](const BoundedParetoParams& p) {
                              switch (estimator) {
                                  case Estimator::hill_alpha: return p.alpha;
                                  case Estimator::alec: {
                                      // ln(C/lower) is exponential(alpha) truncated to [0, span].
                                      const double span = std::log(p.upper / p.lower);
                                      const double tail = std::exp(-p.alpha * span);
                                      const double mean_excess = 1.0 / p.alpha - span * tail / (1.0 - tail);
                                      return std::log10(p.lower) + mean_excess / ln10;
                                  }
                                  case Estimator::sample_mean:
                                      return bounded_pareto_moments(p.alpha, p.lower, p.upper, 1).mean;
                              }
                              return kNaN;
                          },
                          [&](const TruncLognormalParams& p) {
                              switch (estimator) {
                                  case Estimator::hill_alpha: return kNaN;
                                  case Estimator::alec: {
                                      const double a = p.lower > 0.0 ? (std::log(p.lower) - p.mu) / p.sigma : -kInf;
                                      const double b =
                                          std::isinf(p.upper) ? kInf : (std::log(p.upper) - p.mu) / p.sigma;
                                      const auto z = detail::truncated_normal_moments(a, b);
                                      return (p.mu + p.sigma * z[1]) / ln10;
                                  }
                                  case Estimator::sample_mean:
                                      return bounded_lognormal_moments(p.mu, p.sigma, p.lower, p.upper, 1).mean;
                              }
                              return kNaN;
                          },
                      },
                      params);
}

StudyReport run_study(const GeneratorSpec& spec, Estimator estimator, std::size_t replicates,
                      std::uint64_t master_seed, const StudyOptions& options) {
    validate(spec);
    if (replicates < 100) throw ParameterError("a study needs at least 100 replicates");
    const double level = options.level;
    const double z = detail::z_for_level(level);
    const double truth = true_value(spec.params, estimator);
    const double threshold = tail_threshold(spec.params);

    std::vector<double> estimates(replicates, kNaN);
    std::vector<signed char> covered(replicates, -1);

    auto run_one = [&](std::size_t i) {
        GeneratorSpec rep = spec;
        rep.seed = replicate_seed(master_seed, i);
        std::vector<double> costs = sample(rep);
        std::erase_if(costs, [threshold](double c) { return c < threshold; });
        if (costs.empty()) throw EmptyTailError("study replicate produced no costs above the tail threshold");
        const double value = estimate(estimator, costs, threshold);
        estimates[i] = value;
        if (!std::isfinite(truth) || costs.size() < 2) return;
        const std::size_t m = costs.size();
        Interval ci;
        switch (estimator) {
            case Estimator::hill_alpha: ci = ci_alpha(value, m, level); break;
            case Estimator::alec: ci = ci_alec(value, hill_alpha(costs, threshold), threshold, m, level); break;
            case Estimator::sample_mean: {
                double ss = 0.0;
                for (double c : costs) ss += (c - value) * (c - value);
                const double se = std::sqrt(ss / static_cast<double>(m - 1) / static_cast<double>(m));
                ci = {value - z * se, value + z * se};
                break;
            }
        }
        covered[i] = ci.contains(truth) ? 1 : 0;
    };

    unsigned threads = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, replicates));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < replicates; i = next++) {
            try {
                run_one(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = replicates;
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    // Aggregation runs in replicate order, independent of scheduling.
    double sum = 0.0;
    for (double v : estimates) sum += v;
    const double mean = sum / static_cast<double>(replicates);
    double ss = 0.0;
    for (double v : estimates) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(replicates - 1));

    StudyReport report;
    report.estimator = std::string(to_string(estimator));
    report.family = std::string(family_name(spec.params));
    report.true_value = truth;
    report.replicates = replicates;
    report.sample_size = spec.n;
    report.mean_estimate = mean;
    report.bias = std::isfinite(truth) ? mean - truth : kNaN;
    report.empirical_rse = sd / std::abs(mean);
    if (std::isfinite(truth)) {
        std::size_t hits = 0, counted = 0;
        for (signed char c : covered) {
            if (c < 0) continue;
            ++counted;
            hits += static_cast<std::size_t>(c);
        }
        if (counted > 0) report.ci_coverage = static_cast<double>(hits) / static_cast<double>(counted);
    }
    return report;
}

}  // namespace logrisk
