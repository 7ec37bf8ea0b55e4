#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "logrisk/config.hpp"
#include "logrisk/eventize.hpp"
#include "logrisk/extrapolate.hpp"
#include "logrisk/ingest.hpp"
#include "logrisk/riskcurve.hpp"
#include "logrisk/tailfit.hpp"

namespace logrisk {

std::string_view version() noexcept;

struct Provenance {
    std::string config_hash;
    std::string version;
    std::string generated_at;  ///< UTC wall clock; the only nondeterministic field
};

struct VarPoint {
    double q = 0.0;
    double cost = 0.0;
};

/// Every per-utility row of the summary table plus the fits behind it.
struct MetricsReport {
    std::size_t n = 0;
    double n_year = 0.0;
    double k = 0.0;
    double e_rate = 0.0;
    double c_maxobs = 0.0;
    LargeCostSelection selection;  ///< large_costs is left empty in reports
    TailFit tail;
    ParetoMean pareto_mean;
    MaxCostEstimate c_max;
    BoundedParetoFit bounded_pareto;
    std::optional<TruncatedLognormalParams> lognormal_params;
    std::optional<BoundedLognormalFit> bounded_lognormal;
    std::optional<CminResult> cmin;
    std::vector<VarPoint> value_at_risk;
    std::vector<std::string> warnings;
    Provenance provenance;
};

struct PipelineResult {
    std::optional<IngestReport> ingest;
    std::vector<EventRecord> events;
    CostDataset dataset;
    MetricsReport report;
};

/// One cost per line; blank lines and `#` comments are skipped. Throws
/// DataError on a malformed line.
std::vector<double> read_cost_list(std::istream& in);
void write_cost_list(std::ostream& out, std::span<const double> costs);

/// Outage files run through ingest and eventize; cost lists are read
/// directly. `result` receives the intermediate products when given.
CostDataset load_dataset(const RunConfig& config, std::optional<IngestReport>* ingest = nullptr,
                         std::vector<EventRecord>* events = nullptr);

/// Metrics from an already built dataset.
MetricsReport compute_metrics(const CostDataset& dataset, const RunConfig& config);

/// ingest -> eventize -> riskcurve -> tailfit -> extrapolate. Errors carry
/// the stage name (Error::stage()).
PipelineResult run_pipeline(const RunConfig& config);

/// Structured text (JSON). `metrics` holds table-precision values (currency
/// to 2 decimals, other quantities to 3 significant figures); `exact` holds
/// the same quantities at full precision.
std::string to_json(const MetricsReport& report);

/// Empirical exceedance curve and, with a fit, the fitted Pareto exceedance
/// at every empirical support point >= c_large (blank below it).
void export_exceedance(const CostDataset& dataset, const std::optional<TailFit>& fit, std::ostream& out,
                       ExportFormat format);
void export_exceedance(const CostDataset& dataset, const std::optional<TailFit>& fit,
                       const std::filesystem::path& destination, ExportFormat format);

/// Writes metrics.json and exceedance.{csv,json} into config.output_dir.
void write_outputs(const PipelineResult& result, const RunConfig& config);

/// Rounding used in the report's `metrics` block.
double round_currency(double value);
double round_significant(double value, int digits = 3);

}  // namespace logrisk
