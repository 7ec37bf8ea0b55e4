#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "logrisk/ingest.hpp"

namespace logrisk {

/// A group of temporally overlapping outages.
struct EventRecord {
    std::vector<std::size_t> outage_indices;  ///< positions in the grouped input
    TimePoint start{};
    TimePoint end{};
    double customer_hours = 0.0;
    double cost_normalized = 0.0;  ///< filled by price_events; 0 until then

    std::size_t outage_count() const noexcept { return outage_indices.size(); }
};

/// The positive event costs of one utility plus the context needed to turn
/// counts into rates. Costs keep their input order; a sorted copy is held
/// for order-statistic queries.
class CostDataset {
public:
    /// Throws EmptyDatasetError for an empty list, DomainError for a
    /// nonpositive or non-finite cost, ParameterError for n_year <= 0.
    CostDataset(std::vector<double> costs, double n_year, double k = 1.0, double n_customer = 1.0);

    std::span<const double> costs() const noexcept { return costs_; }
    std::span<const double> sorted_costs() const noexcept { return sorted_; }
    std::size_t n() const noexcept { return costs_.size(); }
    double n_year() const noexcept { return n_year_; }
    double k() const noexcept { return k_; }
    double n_customer() const noexcept { return n_customer_; }
    double e_rate() const noexcept { return static_cast<double>(n()) / n_year_; }
    double c_maxobs() const noexcept { return sorted_.back(); }

private:
    std::vector<double> costs_;
    std::vector<double> sorted_;
    double n_year_;
    double k_;
    double n_customer_;
};

/// Connected components of the "overlaps or separated by at most `gap`"
/// relation, found with one sweep over start-sorted intervals. Touching
/// intervals (end == next start) are linked. Events come back in start order.
std::vector<EventRecord> group_events(std::span<const OutageRecord> records, Seconds gap = Seconds{0});

/// k * customer_hours / n_customer. Throws ParameterError unless k > 0 and
/// n_customer > 0.
double event_cost(const EventRecord& event, double k, double n_customer);

/// Sets cost_normalized on every event.
void price_events(std::span<EventRecord> events, double k, double n_customer);

/// Prices the events and keeps the strictly positive costs. Throws
/// EmptyDatasetError when no event has positive cost.
CostDataset build_dataset(std::span<const EventRecord> events, double k, double n_customer, double n_year);

/// Delimited export: start,end,outage_count,customer_hours,cost_normalized.
void write_events(std::ostream& out, std::span<const EventRecord> events);

}  // namespace logrisk
