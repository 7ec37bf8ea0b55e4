#pragma once

#include <cstddef>
#include <vector>

#include "logrisk/eventize.hpp"

namespace logrisk {

struct ExceedancePoint {
    double cost = 0.0;
    double probability = 0.0;
};

/// Empirical exceedance curve, one point per distinct cost, ascending in
/// cost. The probability plotted at c is the fraction of costs >= c, so the
/// largest observation sits at (multiplicity of max)/n rather than 0.
struct ExceedanceCurve {
    std::vector<ExceedancePoint> points;
};

/// Costs at or above a fixed large-cost threshold and the rate metrics
/// derived from them.
struct LargeCostSelection {
    double c_large = 0.0;
    std::vector<double> large_costs;  ///< ascending
    std::size_t n_large = 0;
    double p_large = 0.0;   ///< n_large / n
    double f_large = 0.0;   ///< p_large * E_rate, events per year
    double ri_large = 0.0;  ///< 1 / f_large, years
};

ExceedanceCurve empirical_exceedance(const CostDataset& dataset);

/// Inclusive threshold: every cost >= c_large is selected. Throws
/// ParameterError for c_large <= 0 and EmptyTailError when nothing is selected.
LargeCostSelection select_large(const CostDataset& dataset, double c_large);

/// The ceil(p * n)-th largest cost. Selecting at this threshold yields at
/// least ceil(p * n) costs; ties with the threshold are all included.
double threshold_for_quantile(const CostDataset& dataset, double p);

/// Empirical value at risk at exceedance level q: the smallest observed cost
/// c for which the fraction of costs strictly greater than c is below q.
double value_at_risk(const CostDataset& dataset, double q);

}  // namespace logrisk
