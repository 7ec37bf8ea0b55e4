#include "logrisk/eventize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "logrisk/error.hpp"

namespace logrisk {

CostDataset::CostDataset(std::vector<double> costs, double n_year, double k, double n_customer)
    : costs_(std::move(costs)), n_year_(n_year), k_(k), n_customer_(n_customer) {
    if (costs_.empty()) throw EmptyDatasetError("empty dataset: no positive-cost events");
    if (!(n_year_ > 0.0) || !std::isfinite(n_year_)) {
        throw ParameterError("n_year must be positive, got " + std::to_string(n_year_));
    }
    for (double c : costs_) {
        if (!(c > 0.0) || !std::isfinite(c)) {
            throw DomainError("costs must be finite and strictly positive, got " + std::to_string(c));
        }
    }
    sorted_ = costs_;
    std::sort(sorted_.begin(), sorted_.end());
}

std::vector<EventRecord> group_events(std::span<const OutageRecord> records, Seconds gap) {
    if (gap < Seconds{0}) throw ParameterError("gap must be nonnegative");

    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return records[a].start < records[b].start; });

    std::vector<EventRecord> events;
    for (std::size_t idx : order) {
        const OutageRecord& r = records[idx];
        if (events.empty() || r.start - events.back().end > gap) {
            EventRecord e;
            e.start = r.start;
            e.end = r.end;
            events.push_back(std::move(e));
        }
        EventRecord& cur = events.back();
        cur.outage_indices.push_back(idx);
        cur.end = std::max(cur.end, r.end);
        cur.customer_hours += r.customer_hours();
    }
    return events;
}

double event_cost(const EventRecord& event, double k, double n_customer) {
    if (!(k > 0.0)) throw ParameterError("k must be positive");
    if (!(n_customer > 0.0)) throw ParameterError("n_customer must be positive");
    return k * event.customer_hours / n_customer;
}

void price_events(std::span<EventRecord> events, double k, double n_customer) {
    for (auto& e : events) e.cost_normalized = event_cost(e, k, n_customer);
}

CostDataset build_dataset(std::span<const EventRecord> events, double k, double n_customer, double n_year) {
    if (!(n_year > 0.0)) throw ParameterError("n_year must be positive");
    std::vector<double> costs;
    costs.reserve(events.size());
    for (const auto& e : events) {
        const double c = event_cost(e, k, n_customer);
        if (c > 0.0) costs.push_back(c);
    }
    return CostDataset(std::move(costs), n_year, k, n_customer);
}

void write_events(std::ostream& out, std::span<const EventRecord> events) {
    out << "start,end,outage_count,customer_hours,cost_normalized\n";
    const auto old_precision = out.precision(17);
    for (const auto& e : events) {
        out << format_timestamp(e.start) << ',' << format_timestamp(e.end) << ',' << e.outage_count() << ','
            << e.customer_hours << ',' << e.cost_normalized << '\n';
    }
    out.precision(old_precision);
}

}  // namespace logrisk
