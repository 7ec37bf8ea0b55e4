#include "logrisk/ingest.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "logrisk/error.hpp"
#include "text_util.hpp"

namespace logrisk {

namespace {

using namespace std::chrono;

// Reads exactly `width` digits starting at `pos`.
std::optional<int> read_digits(std::string_view s, std::size_t& pos, std::size_t width) {
    if (pos + width > s.size()) return std::nullopt;
    int v = 0;
    for (std::size_t i = 0; i < width; ++i) {
        const char c = s[pos + i];
        if (c < '0' || c > '9') return std::nullopt;
        v = v * 10 + (c - '0');
    }
    pos += width;
    return v;
}

bool expect(std::string_view s, std::size_t& pos, char c) {
    if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
    }
    return false;
}

SystemClass parse_system_class(std::string_view text) {
    const std::string v = detail::to_lower(detail::trim(text));
    if (v.empty() || v == "distribution" || v == "dist" || v == "d") return SystemClass::distribution;
    if (v == "transmission" || v == "trans" || v == "t") return SystemClass::transmission;
    return SystemClass::other;
}

struct Counter {
    IngestReport* report = nullptr;
    void drop(std::string_view reason) const {
        if (report == nullptr) return;
        auto it = report->rows_dropped_by_reason.find(reason);
        if (it == report->rows_dropped_by_reason.end()) {
            report->rows_dropped_by_reason.emplace(std::string(reason), 1);
        } else {
            ++it->second;
        }
    }
};

bool start_order(const OutageRecord& a, const OutageRecord& b) {
    if (a.start != b.start) return a.start < b.start;
    if (a.end != b.end) return a.end < b.end;
    if (a.customers != b.customers) return a.customers < b.customers;
    if (a.planned != b.planned) return a.planned < b.planned;
    if (a.system_class != b.system_class) return a.system_class < b.system_class;
    return a.cause < b.cause;
}

std::vector<OutageRecord> clean_counted(std::vector<OutageRecord> records, const CleaningRules& rules,
                                        const Counter& counter) {
    if (rules.drop_zero_customers) {
        std::erase_if(records, [&](const OutageRecord& r) {
            if (r.customers > 0) return false;
            counter.drop(drop_reason::zero_customers);
            return true;
        });
    }
    // The full lexicographic order puts exact duplicates next to each other.
    std::stable_sort(records.begin(), records.end(), start_order);
    if (rules.dedupe) {
        auto last = std::unique(records.begin(), records.end());
        for (auto it = last; it != records.end(); ++it) counter.drop(drop_reason::duplicate);
        records.erase(last, records.end());
    }
    return records;
}

}  // namespace

std::string_view to_string(SystemClass c) noexcept {
    switch (c) {
        case SystemClass::distribution: return "distribution";
        case SystemClass::transmission: return "transmission";
        case SystemClass::other: return "other";
    }
    return "other";
}

double OutageRecord::duration_hours() const noexcept {
    return duration<double, std::ratio<3600>>(end - start).count();
}

std::size_t IngestReport::rows_dropped() const noexcept {
    std::size_t total = 0;
    for (const auto& [reason, count] : rows_dropped_by_reason) total += count;
    return total;
}

std::optional<TimePoint> parse_timestamp(std::string_view text) {
    const std::string_view s = detail::trim(text);
    std::size_t pos = 0;
    const auto y = read_digits(s, pos, 4);
    if (!y || !expect(s, pos, '-')) return std::nullopt;
    const auto mo = read_digits(s, pos, 2);
    if (!mo || !expect(s, pos, '-')) return std::nullopt;
    const auto d = read_digits(s, pos, 2);
    if (!d) return std::nullopt;

    const year_month_day ymd{year{*y}, month{static_cast<unsigned>(*mo)}, day{static_cast<unsigned>(*d)}};
    if (!ymd.ok()) return std::nullopt;

    int hh = 0, mm = 0, ss = 0;
    if (pos < s.size() && (s[pos] == 'T' || s[pos] == 't' || s[pos] == ' ')) {
        ++pos;
        const auto h = read_digits(s, pos, 2);
        if (!h || !expect(s, pos, ':')) return std::nullopt;
        const auto m = read_digits(s, pos, 2);
        if (!m) return std::nullopt;
        hh = *h;
        mm = *m;
        if (expect(s, pos, ':')) {
            const auto sec = read_digits(s, pos, 2);
            if (!sec) return std::nullopt;
            ss = *sec;
            if (expect(s, pos, '.') || expect(s, pos, ',')) {
                // Fractional seconds are truncated.
                const std::size_t frac_start = pos;
                while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
                if (pos == frac_start) return std::nullopt;
            }
        }
        if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
    }

    Seconds offset{0};
    if (pos < s.size()) {
        const char c = s[pos];
        if (c == 'Z' || c == 'z') {
            ++pos;
        } else if (c == '+' || c == '-') {
            ++pos;
            const auto oh = read_digits(s, pos, 2);
            if (!oh) return std::nullopt;
            int om = 0;
            if (pos < s.size()) {
                expect(s, pos, ':');
                const auto m = read_digits(s, pos, 2);
                if (!m) return std::nullopt;
                om = *m;
            }
            if (*oh > 23 || om > 59) return std::nullopt;
            offset = hours{*oh} + minutes{om};
            if (c == '-') offset = -offset;
        } else {
            return std::nullopt;
        }
    }
    if (pos != s.size()) return std::nullopt;

    const TimePoint local = sys_days{ymd} + hours{hh} + minutes{mm} + Seconds{ss};
    return local - offset;
}

std::string format_timestamp(TimePoint t) {
    const auto day_point = floor<days>(t);
    const year_month_day ymd{day_point};
    const hh_mm_ss<Seconds> tod{t - day_point};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()));
    return buf;
}

double data_span_years(std::span<const OutageRecord> records) {
    if (records.empty()) return 0.0;
    TimePoint lo = records.front().start;
    TimePoint hi = records.front().end;
    for (const auto& r : records) {
        lo = std::min(lo, r.start);
        hi = std::max(hi, r.end);
    }
    return duration<double, days::period>(hi - lo).count() / kDaysPerYear;
}

std::vector<OutageRecord> clean_outages(std::vector<OutageRecord> records, const CleaningRules& rules) {
    return clean_counted(std::move(records), rules, Counter{});
}

IngestResult parse_outages(std::istream& source, const Schema& schema, const CleaningRules& rules) {
    IngestResult result;
    IngestReport& report = result.report;
    const Counter counter{&report};

    std::string line;
    bool have_header = false;
    while (std::getline(source, line)) {
        detail::strip_cr(line);
        if (!detail::trim(line).empty()) {
            have_header = true;
            break;
        }
    }
    if (!have_header) throw SchemaError("outage input is empty: a header row is required");
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);

    const auto header = detail::split_delimited(line, schema.delimiter);
    auto column = [&](const std::string& name) -> std::optional<std::size_t> {
        if (name.empty()) return std::nullopt;
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (detail::trim(header[i]) == name) return i;
        }
        return std::nullopt;
    };
    auto required = [&](const std::string& name, std::string_view field) {
        const auto idx = column(name);
        if (!idx) {
            throw SchemaError("required column '" + name + "' (" + std::string(field) +
                              ") not found in header");
        }
        return *idx;
    };
    const std::size_t c_start = required(schema.start, "start");
    const std::size_t c_end = required(schema.end, "end");
    const std::size_t c_customers = required(schema.customers, "customers");
    const auto c_planned = column(schema.planned);
    const auto c_class = column(schema.system_class);
    const auto c_cause = column(schema.cause);

    std::vector<OutageRecord> rows;
    while (std::getline(source, line)) {
        detail::strip_cr(line);
        if (detail::trim(line).empty()) continue;
        ++report.rows_read;
        const auto fields = detail::split_delimited(line, schema.delimiter);
        auto field = [&](std::size_t i) -> std::string_view {
            return i < fields.size() ? std::string_view(fields[i]) : std::string_view{};
        };

        const auto start = parse_timestamp(field(c_start));
        const auto end = parse_timestamp(field(c_end));
        if (!start || !end) {
            counter.drop(drop_reason::bad_timestamp);
            continue;
        }
        const auto customers = detail::parse_int(field(c_customers));
        if (!customers || *customers < 0) {
            counter.drop(drop_reason::bad_customers);
            continue;
        }
        OutageRecord rec;
        rec.start = *start;
        rec.end = *end;
        rec.customers = *customers;
        if (c_planned) {
            const auto planned = detail::parse_bool(field(*c_planned));
            if (!planned) {
                counter.drop(drop_reason::bad_planned);
                continue;
            }
            rec.planned = *planned;
        }
        if (c_class) rec.system_class = parse_system_class(field(*c_class));
        if (c_cause) {
            const auto cause = detail::trim(field(*c_cause));
            if (!cause.empty()) rec.cause = std::string(cause);
        }

        if (rules.unplanned_only && rec.planned) {
            counter.drop(drop_reason::planned);
            continue;
        }
        if (rules.distribution_only && rec.system_class != SystemClass::distribution) {
            counter.drop(drop_reason::non_distribution);
            continue;
        }
        if (rules.require_positive_duration && !(rec.end > rec.start)) {
            counter.drop(drop_reason::nonpositive_duration);
            continue;
        }
        rows.push_back(std::move(rec));
    }

    result.records = clean_counted(std::move(rows), rules, counter);
    report.rows_retained = result.records.size();
    report.data_span_years = data_span_years(result.records);
    return result;
}

void write_outages(std::ostream& out, std::span<const OutageRecord> records) {
    out << "start,end,customers,planned,system_class,cause\n";
    for (const auto& r : records) {
        out << format_timestamp(r.start) << ',' << format_timestamp(r.end) << ',' << r.customers << ','
            << (r.planned ? "true" : "false") << ',' << to_string(r.system_class) << ',';
        if (r.cause) {
            std::string quoted = "\"";
            for (char c : *r.cause) {
                if (c == '"') quoted.push_back('"');
                quoted.push_back(c);
            }
            out << quoted << '"';
        }
        out << '\n';
    }
}

std::string to_json(const IngestReport& report) {
    nlohmann::ordered_json j;
    j["rows_read"] = report.rows_read;
    j["rows_retained"] = report.rows_retained;
    nlohmann::ordered_json dropped = nlohmann::ordered_json::object();
    for (const auto& [reason, count] : report.rows_dropped_by_reason) dropped[reason] = count;
    j["rows_dropped_by_reason"] = dropped;
    j["data_span_years"] = report.data_span_years;
    return j.dump(2);
}

}  // namespace logrisk
