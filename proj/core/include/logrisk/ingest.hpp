#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace logrisk {

using Seconds = std::chrono::seconds;
using TimePoint = std::chrono::sys_time<Seconds>;

enum class SystemClass { distribution, transmission, other };

std::string_view to_string(SystemClass c) noexcept;

/// One raw outage interval as recorded by the utility.
struct OutageRecord {
    TimePoint start{};
    TimePoint end{};
    std::int64_t customers = 0;
    bool planned = false;
    SystemClass system_class = SystemClass::distribution;
    std::optional<std::string> cause;

    double duration_hours() const noexcept;
    double customer_hours() const noexcept { return duration_hours() * static_cast<double>(customers); }

    friend bool operator==(const OutageRecord&, const OutageRecord&) = default;
};

/// Maps logical fields onto header names. start, end and customers are
/// required. The optional columns (planned, system_class, cause) are read when
/// the header contains them; otherwise records default to unplanned,
/// distribution, no cause.
struct Schema {
    std::string start = "start";
    std::string end = "end";
    std::string customers = "customers";
    std::string planned = "planned";
    std::string system_class = "system_class";
    std::string cause = "cause";
    char delimiter = ',';
};

/// Individually switchable cleaning rules.
struct CleaningRules {
    bool unplanned_only = true;
    bool distribution_only = true;
    bool require_positive_duration = true;
    bool drop_zero_customers = true;
    bool dedupe = true;
};

namespace drop_reason {
inline constexpr std::string_view bad_timestamp = "bad_timestamp";
inline constexpr std::string_view bad_customers = "bad_customers";
inline constexpr std::string_view bad_planned = "bad_planned";
inline constexpr std::string_view planned = "planned";
inline constexpr std::string_view non_distribution = "non_distribution";
inline constexpr std::string_view nonpositive_duration = "nonpositive_duration";
inline constexpr std::string_view zero_customers = "zero_customers";
inline constexpr std::string_view duplicate = "duplicate";
}  // namespace drop_reason

struct IngestReport {
    std::size_t rows_read = 0;
    std::size_t rows_retained = 0;
    std::map<std::string, std::size_t, std::less<>> rows_dropped_by_reason;
    double data_span_years = 0.0;

    std::size_t rows_dropped() const noexcept;
};

struct IngestResult {
    std::vector<OutageRecord> records;
    IngestReport report;
};

inline constexpr double kDaysPerYear = 365.25;

/// Parses ISO-8601 date-times such as `2021-06-01T10:00`, `2021-06-01 10:00:30Z`
/// or `2021-06-01T10:00:00-05:00`. A missing offset means UTC.
std::optional<TimePoint> parse_timestamp(std::string_view text);

/// Formats as `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_timestamp(TimePoint t);

/// Reads a delimited outage file with a header row, applies the row filters
/// and `clean_outages`, and accounts for every input row in the report.
/// Throws SchemaError when a required column is missing from the header.
IngestResult parse_outages(std::istream& source, const Schema& schema, const CleaningRules& rules = {});

/// Drops zero-customer records and exact duplicates, then sorts by start
/// time (ties by end time). Idempotent.
std::vector<OutageRecord> clean_outages(std::vector<OutageRecord> records, const CleaningRules& rules = {});

/// (max end - min start) in 365.25-day years; 0 for an empty list.
double data_span_years(std::span<const OutageRecord> records);

/// Cleaned records back to delimited text with the default schema header.
void write_outages(std::ostream& out, std::span<const OutageRecord> records);

/// Report as a JSON object.
std::string to_json(const IngestReport& report);

}  // namespace logrisk
