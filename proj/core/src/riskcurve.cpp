#include "logrisk/riskcurve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "logrisk/error.hpp"

namespace logrisk {

ExceedanceCurve empirical_exceedance(const CostDataset& dataset) {
    const auto sorted = dataset.sorted_costs();
    const auto n = static_cast<double>(sorted.size());
    ExceedanceCurve curve;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i > 0 && sorted[i] == sorted[i - 1]) continue;
        const auto at_or_above = static_cast<double>(sorted.size() - i);
        curve.points.push_back({sorted[i], at_or_above / n});
    }
    return curve;
}

LargeCostSelection select_large(const CostDataset& dataset, double c_large) {
    if (!(c_large > 0.0) || !std::isfinite(c_large)) {
        throw ParameterError("c_large must be positive and finite");
    }
    const auto sorted = dataset.sorted_costs();
    const auto first = std::lower_bound(sorted.begin(), sorted.end(), c_large);
    if (first == sorted.end()) {
        throw EmptyTailError("empty tail: no cost >= c_large = " + std::to_string(c_large) +
                             " (c_maxobs = " + std::to_string(dataset.c_maxobs()) + ")");
    }
    LargeCostSelection sel;
    sel.c_large = c_large;
    sel.large_costs.assign(first, sorted.end());
    sel.n_large = sel.large_costs.size();
    sel.p_large = static_cast<double>(sel.n_large) / static_cast<double>(dataset.n());
    sel.f_large = sel.p_large * dataset.e_rate();
    sel.ri_large = 1.0 / sel.f_large;
    return sel;
}

double threshold_for_quantile(const CostDataset& dataset, double p) {
    if (!(p > 0.0 && p < 1.0)) throw ParameterError("p_large target must lie in (0, 1)");
    const auto sorted = dataset.sorted_costs();
    const auto n = sorted.size();
    auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return sorted[n - rank];
}

double value_at_risk(const CostDataset& dataset, double q) {
    if (!(q > 0.0 && q < 1.0)) throw ParameterError("VaR level must lie in (0, 1)");
    const auto sorted = dataset.sorted_costs();
    const auto n = static_cast<double>(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
        const auto above = static_cast<double>(sorted.size() - i - 1);
        if (above < q * n) return sorted[i];
    }
    return sorted.back();
}

}  // namespace logrisk
