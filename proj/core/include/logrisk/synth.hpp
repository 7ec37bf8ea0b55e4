#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace logrisk {

struct ParetoParams {
    double alpha = 1.0;
    double lower = 1.0;
};

struct BoundedParetoParams {
    double alpha = 1.0;
    double lower = 1.0;
    double upper = 10.0;
};

struct TruncLognormalParams {
    double mu = 0.0;
    double sigma = 1.0;
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
};

/// Lognormal(mu, sigma) body on (0, splice] joined to a Pareto(alpha) tail on
/// [splice, inf). The tail weight is whatever makes the density continuous at
/// the splice, see mixture_tail_weight().
struct MixtureParams {
    double mu = 0.0;
    double sigma = 1.0;
    double alpha = 1.5;
    double splice = 1.0;
};

using FamilyParams = std::variant<ParetoParams, BoundedParetoParams, TruncLognormalParams, MixtureParams>;

struct GeneratorSpec {
    FamilyParams params;
    std::size_t n = 0;
    std::uint64_t seed = 0;
};

enum class Estimator { hill_alpha, alec, sample_mean };

std::string_view family_name(const FamilyParams& params) noexcept;
std::string_view to_string(Estimator e) noexcept;
Estimator parse_estimator(std::string_view text);

/// Throws ParameterError for invalid family parameters or n == 0.
void validate(const GeneratorSpec& spec);

double mixture_tail_weight(const MixtureParams& p);

/// Lower end of the Pareto-like region: lower for the single families, the
/// splice point for the mixture. Estimators in run_study use costs >= this.
double tail_threshold(const FamilyParams& params) noexcept;

/// Cost whose exceedance probability is u (u = 1 gives the lower end, u = 0
/// the upper end). Defined for the single-component families; throws
/// ParameterError for the mixture.
double inverse_exceedance(const FamilyParams& params, double u);

/// Seed of replicate `index` under `master`; any order of evaluation gives the
/// same per-replicate streams.
std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Uniform draw strictly inside (0, 1) built from the top 53 bits.
double open_uniform(std::mt19937_64& engine) noexcept;

/// Bit-reproducible for a fixed spec.
std::vector<double> sample(const GeneratorSpec& spec);

struct StudyOptions {
    double level = 0.95;
    unsigned threads = 0;  ///< 0 = hardware concurrency
};

struct StudyReport {
    std::string estimator;
    std::string family;
    double true_value = 0.0;  ///< NaN when the family has no such parameter
    std::size_t replicates = 0;
    std::size_t sample_size = 0;
    double mean_estimate = 0.0;
    double bias = 0.0;
    double empirical_rse = 0.0;  ///< sd(estimates) / |mean(estimates)|
    std::optional<double> ci_coverage;
};

/// Estimator value the family implies (NaN when undefined, +inf for an
/// infinite Pareto mean).
double true_value(const FamilyParams& params, Estimator estimator);

/// Draws `replicates` independent samples of spec.n costs and applies the
/// estimator to the costs at or above tail_threshold(). Needs >= 100
/// replicates.
StudyReport run_study(const GeneratorSpec& spec, Estimator estimator, std::size_t replicates,
                      std::uint64_t master_seed, const StudyOptions& options = {});

}  // namespace logrisk
