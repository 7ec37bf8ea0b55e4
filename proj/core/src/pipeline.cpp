#include "logrisk/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "logrisk/error.hpp"
#include "text_util.hpp"

#ifndef LOGRISK_VERSION
#define LOGRISK_VERSION "0.0.0"
#endif

namespace logrisk {

namespace {

using json = nlohmann::ordered_json;

template <class Fn>
auto in_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (Error& e) {
        if (e.stage().empty()) e.set_stage(stage);
        throw;
    }
}

std::string now_utc() {
    const auto now = std::chrono::time_point_cast<Seconds>(std::chrono::system_clock::now());
    return format_timestamp(now);
}

json interval(const Interval& i) { return json::array({i.lo, i.hi}); }

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string_view version() noexcept { return LOGRISK_VERSION; }

double round_currency(double value) {
    if (!std::isfinite(value)) return value;
    return std::round(value * 100.0) / 100.0;
}

double round_significant(double value, int digits) {
    if (!std::isfinite(value) || value == 0.0) return value;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, value);
    return std::strtod(buf, nullptr);
}

std::vector<double> read_cost_list(std::istream& in) {
    std::vector<double> costs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto body = detail::trim(line);
        if (body.empty()) continue;
        const auto v = detail::parse_double(body);
        if (!v || !std::isfinite(*v)) {
            throw DataError("cost list line " + std::to_string(line_no) + ": not a number: '" + std::string(body) +
                            "'");
        }
        costs.push_back(*v);
    }
    return costs;
}

void write_cost_list(std::ostream& out, std::span<const double> costs) {
    for (double c : costs) out << format_g17(c) << '\n';
}

CostDataset load_dataset(const RunConfig& config, std::optional<IngestReport>* ingest,
                         std::vector<EventRecord>* events) {
    if (config.inputs.empty()) throw ConfigError("no input files given");
    if (config.input_kind == InputKind::costs) {
        return in_stage("ingest", [&] {
            std::vector<double> costs;
            for (const auto& path : config.inputs) {
                std::ifstream in(path);
                if (!in) throw IoError("cannot read cost list '" + path.string() + "'");
                const auto part = read_cost_list(in);
                for (double c : part) {
                    if (c < 0.0) throw DataError("negative cost in '" + path.string() + "'");
                    if (c > 0.0) costs.push_back(c);
                }
            }
            if (!config.n_year) throw ConfigError("n_year must be set for cost-list input");
            return CostDataset(std::move(costs), *config.n_year, config.k.value_or(1.0),
                               config.n_customer.value_or(1.0));
        });
    }

    std::vector<OutageRecord> records;
    IngestReport merged;
    in_stage("ingest", [&] {
        for (const auto& path : config.inputs) {
            std::ifstream in(path);
            if (!in) throw IoError("cannot read outage file '" + path.string() + "'");
            auto part = parse_outages(in, config.schema, config.cleaning);
            merged.rows_read += part.report.rows_read;
            for (const auto& [reason, count] : part.report.rows_dropped_by_reason) {
                merged.rows_dropped_by_reason[reason] += count;
            }
            records.insert(records.end(), part.records.begin(), part.records.end());
        }
        if (config.inputs.size() > 1) {
            // Duplicates across files only show up after merging.
            const std::size_t before = records.size();
            records = clean_outages(std::move(records), config.cleaning);
            if (before != records.size()) merged.rows_dropped_by_reason["duplicate"] += before - records.size();
        }
        merged.rows_retained = records.size();
        merged.data_span_years = data_span_years(records);
    });
    if (ingest) *ingest = merged;

    return in_stage("eventize", [&] {
        auto grouped = group_events(records, config.gap);
        if (!config.k || !config.n_customer) throw ConfigError("k and n_customer are required for outage input");
        price_events(grouped, *config.k, *config.n_customer);
        double n_year = config.n_year.value_or(merged.data_span_years);
        if (!(n_year > 0.0)) throw DataError("cannot infer n_year: retained outages span no time");
        CostDataset ds = build_dataset(grouped, *config.k, *config.n_customer, n_year);
        if (events) *events = std::move(grouped);
        return ds;
    });
}

MetricsReport compute_metrics(const CostDataset& dataset, const RunConfig& config) {
    MetricsReport r;
    r.n = dataset.n();
    r.n_year = dataset.n_year();
    r.k = config.k.value_or(dataset.k());
    r.e_rate = dataset.e_rate();
    r.c_maxobs = dataset.c_maxobs();

    in_stage("riskcurve", [&] {
        const double c_large = config.c_large ? *config.c_large : threshold_for_quantile(dataset, *config.p_large);
        r.selection = select_large(dataset, c_large);
        for (double q : {0.1, 0.05, 0.01}) r.value_at_risk.push_back({q, value_at_risk(dataset, q)});
    });

    in_stage("tailfit", [&] {
        r.tail = fit_tail(r.selection, config.confidence, config.ci_method);
        if (!r.tail.rse_alec) {
            r.warnings.push_back("RSE_ALEC undefined: 1 + alpha*ln(c_large) <= 0 for this threshold");
        }
        r.pareto_mean = pareto_mean(r.tail.alpha, r.tail.c_large);
        if (config.compute_cmin) {
            try {
                r.cmin = clauset_cmin(dataset, config.min_tail);
            } catch (const InsufficientDataError& e) {
                r.warnings.push_back(std::string("c_min skipped: ") + e.what());
            }
        }
    });

    in_stage("extrapolate", [&] {
        r.c_max = c_max_from_k(r.k, config.c_max_hours);
        if (!(r.c_max.c_max > r.tail.c_large)) {
            throw DomainError("c_max = " + std::to_string(r.c_max.c_max) + " does not exceed c_large = " +
                              std::to_string(r.tail.c_large));
        }
        r.bounded_pareto = bounded_pareto_moments(r.tail.alpha, r.tail.c_large, r.c_max.c_max, r.tail.n_large);

        std::vector<double> inside;
        for (double c : r.selection.large_costs) {
            if (c <= r.c_max.c_max) inside.push_back(c);
        }
        if (inside.size() != r.selection.large_costs.size()) {
            r.warnings.push_back(std::to_string(r.selection.large_costs.size() - inside.size()) +
                                 " large costs exceed c_max and were left out of the lognormal fit");
        }
        try {
            r.lognormal_params = fit_truncated_lognormal(inside, r.tail.c_large, r.c_max.c_max);
            r.bounded_lognormal = bounded_lognormal_moments(r.lognormal_params->mu, r.lognormal_params->sigma,
                                                            r.tail.c_large, r.c_max.c_max, r.tail.n_large);
        } catch (const NumericError& e) {
            r.warnings.push_back(std::string("bounded lognormal skipped: ") + e.what());
        }
    });

    r.selection.large_costs.clear();
    r.provenance.config_hash = config.config_hash;
    r.provenance.version = std::string(version());
    r.provenance.generated_at = now_utc();
    return r;
}

PipelineResult run_pipeline(const RunConfig& config) {
    config.validate();
    std::optional<IngestReport> ingest;
    std::vector<EventRecord> events;
    CostDataset dataset = load_dataset(config, &ingest, &events);
    MetricsReport report = compute_metrics(dataset, config);
    return PipelineResult{std::move(ingest), std::move(events), std::move(dataset), std::move(report)};
}

std::string to_json(const MetricsReport& r) {
    const auto& t = r.tail;
    const auto& s = r.selection;
    auto cur = round_currency;
    auto sig = [](double v) { return round_significant(v); };
    auto sig_interval = [&](const Interval& i) { return json::array({sig(i.lo), sig(i.hi)}); };

    json metrics;
    metrics["n"] = r.n;
    metrics["n_year"] = sig(r.n_year);
    metrics["k"] = cur(r.k);
    metrics["E_rate"] = sig(r.e_rate);
    metrics["c_maxobs"] = cur(r.c_maxobs);
    metrics["c_large"] = cur(s.c_large);
    metrics["n_large"] = s.n_large;
    metrics["p_large"] = sig(s.p_large);
    metrics["f_large"] = sig(s.f_large);
    metrics["RI_large"] = sig(s.ri_large);
    metrics["alpha"] = sig(t.alpha);
    metrics["CI_alpha"] = sig_interval(t.ci_alpha);
    metrics["ALEC"] = sig(t.alec);
    metrics["CI_ALEC"] = sig_interval(t.ci_alec);
    metrics["RSE_ALEC"] = t.rse_alec ? json(sig(*t.rse_alec)) : json(nullptr);
    metrics["c_max"] = cur(r.c_max.c_max);
    metrics["RSE_Pb"] = sig(r.bounded_pareto.rse_of_mean);
    metrics["RSE_LNb"] = r.bounded_lognormal ? json(sig(r.bounded_lognormal->rse_of_mean)) : json(nullptr);
    metrics["mu"] = r.lognormal_params ? json(sig(r.lognormal_params->mu)) : json(nullptr);
    metrics["sigma"] = r.lognormal_params ? json(sig(r.lognormal_params->sigma)) : json(nullptr);

    json exact;
    exact["n"] = r.n;
    exact["n_year"] = r.n_year;
    exact["k"] = r.k;
    exact["E_rate"] = r.e_rate;
    exact["c_maxobs"] = r.c_maxobs;
    exact["c_large"] = s.c_large;
    exact["n_large"] = s.n_large;
    exact["p_large"] = s.p_large;
    exact["f_large"] = s.f_large;
    exact["RI_large"] = s.ri_large;
    exact["alpha"] = t.alpha;
    exact["CI_alpha"] = interval(t.ci_alpha);
    exact["ALEC"] = t.alec;
    exact["CI_ALEC"] = interval(t.ci_alec);
    exact["RSE_ALEC"] = optional_number(t.rse_alec);
    exact["rate_lambda"] = t.rate_lambda;
    exact["shift"] = t.shift;
    exact["c_max"] = r.c_max.c_max;
    exact["c_max_hours"] = r.c_max.hours;
    exact["Pb_mean"] = r.bounded_pareto.mean;
    exact["Pb_std"] = r.bounded_pareto.std;
    exact["RSE_Pb"] = r.bounded_pareto.rse_of_mean;
    if (r.bounded_lognormal) {
        exact["mu"] = r.lognormal_params->mu;
        exact["sigma"] = r.lognormal_params->sigma;
        exact["LNb_mean"] = r.bounded_lognormal->mean;
        exact["LNb_std"] = r.bounded_lognormal->std;
        exact["RSE_LNb"] = r.bounded_lognormal->rse_of_mean;
    } else {
        exact["RSE_LNb"] = nullptr;
    }

    json tail_info;
    tail_info["confidence"] = t.level;
    tail_info["ci_method"] = std::string(to_string(t.ci_method));
    tail_info["pareto_mean"] = r.pareto_mean.infinite_mean ? json(nullptr) : json(r.pareto_mean.mean);
    tail_info["infinite_mean"] = r.pareto_mean.infinite_mean;
    tail_info["infinite_variance"] = r.pareto_mean.infinite_variance;
    if (r.cmin) {
        tail_info["c_min"] = r.cmin->c_min;
        tail_info["alpha_at_cmin"] = r.cmin->alpha_at_cmin;
        tail_info["ks_distance"] = r.cmin->ks_distance;
        tail_info["cmin_candidates"] = r.cmin->candidates_evaluated;
    }
    json var = json::array();
    for (const auto& v : r.value_at_risk) var.push_back({{"q", v.q}, {"cost", v.cost}});
    tail_info["value_at_risk"] = var;

    json out;
    out["metrics"] = metrics;
    out["exact"] = exact;
    out["tail"] = tail_info;
    out["warnings"] = r.warnings;
    out["provenance"] = {{"config_hash", r.provenance.config_hash},
                         {"version", r.provenance.version},
                         {"generated_at", r.provenance.generated_at}};
    return out.dump(2);
}

void export_exceedance(const CostDataset& dataset, const std::optional<TailFit>& fit, std::ostream& out,
                       ExportFormat format) {
    const auto curve = empirical_exceedance(dataset);
    auto fitted = [&](double c) -> std::optional<double> {
        if (!fit || c < fit->c_large) return std::nullopt;
        return pareto_exceedance(c, fit->alpha, fit->c_large);
    };
    if (format == ExportFormat::structured) {
        json j;
        json empirical = json::array();
        for (const auto& p : curve.points) empirical.push_back({{"cost", p.cost}, {"exceedance_prob", p.probability}});
        j["empirical"] = empirical;
        if (fit) {
            json points = json::array();
            for (const auto& p : curve.points) {
                if (const auto f = fitted(p.cost)) points.push_back({{"cost", p.cost}, {"exceedance_prob", *f}});
            }
            j["fit"] = {{"alpha", fit->alpha}, {"c_large", fit->c_large}, {"points", points}};
        }
        out << j.dump(2) << '\n';
        return;
    }
    out << "cost,exceedance_prob,log10_cost,log10_exceedance_prob";
    if (fit) out << ",pareto_fit";
    out << '\n';
    for (const auto& p : curve.points) {
        out << format_g17(p.cost) << ',' << format_g17(p.probability) << ',' << format_g17(std::log10(p.cost))
            << ',' << format_g17(std::log10(p.probability));
        if (fit) {
            out << ',';
            if (const auto f = fitted(p.cost)) out << format_g17(*f);
        }
        out << '\n';
    }
}

void export_exceedance(const CostDataset& dataset, const std::optional<TailFit>& fit,
                       const std::filesystem::path& destination, ExportFormat format) {
    std::ofstream out(destination);
    if (!out) throw IoError("cannot write exceedance export to '" + destination.string() + "'");
    export_exceedance(dataset, fit, out, format);
    if (!out) throw IoError("write failed for '" + destination.string() + "'");
}

void write_outputs(const PipelineResult& result, const RunConfig& config) {
    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + config.output_dir.string() + "': " + ec.message());
    const auto report_path = config.output_dir / "metrics.json";
    std::ofstream out(report_path);
    if (!out) throw IoError("cannot write '" + report_path.string() + "'");
    out << to_json(result.report) << '\n';
    const char* ext = config.export_format == ExportFormat::structured ? "exceedance.json" : "exceedance.csv";
    export_exceedance(result.dataset, result.report.tail, config.output_dir / ext, config.export_format);
}

}  // namespace logrisk
