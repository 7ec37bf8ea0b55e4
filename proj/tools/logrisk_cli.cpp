// logrisk command-line front end.
//
//   logrisk <subcommand> [--config FILE] [--set key=value ...] [flags]
//
// Exit codes: 0 success, 1 configuration error, 2 data error, 3 numeric error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "logrisk/config.hpp"
#include "logrisk/error.hpp"
#include "logrisk/eventize.hpp"
#include "logrisk/extrapolate.hpp"
#include "logrisk/ingest.hpp"
#include "logrisk/pipeline.hpp"
#include "logrisk/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Options {
    std::string config;
    std::vector<std::string> sets;
    std::vector<std::string> inputs;
    std::optional<std::string> input_kind;
    std::optional<double> k;
    std::optional<double> n_customer;
    std::optional<double> n_year;
    std::optional<double> p_large;
    std::optional<double> c_large;
    std::optional<long long> seed;
    std::optional<std::string> output_dir;
    std::optional<double> confidence;
    std::optional<std::string> ci_method;
    std::optional<std::string> format;

    // simulate
    std::optional<std::string> study;
    std::optional<long long> replicates;
    unsigned threads = 0;
    // simulate / export
    std::optional<std::string> out;
    bool no_fit = false;
};

std::string number_text(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

std::string absolute_paths(const std::string& list) {
    std::string out;
    std::string_view rest = list;
    while (true) {
        const auto comma = rest.find(',');
        std::string item(rest.substr(0, comma));
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) {
            if (!out.empty()) out += ',';
            out += fs::absolute(item).lexically_normal().string();
        }
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

/// Config file (or $LOGRISK_CONFIG) overlaid with --set pairs and flags.
/// Paths given on the command line resolve against the working directory.
logrisk::KeyValueConfig build_config(const Options& o) {
    using logrisk::ConfigError;
    logrisk::KeyValueConfig kv;
    std::string path = o.config;
    if (path.empty()) {
        if (const char* env = std::getenv(logrisk::kConfigEnvVar); env && *env) path = env;
    }
    if (!path.empty()) {
        kv = logrisk::KeyValueConfig::load(path);
    } else {
        kv.set_base_dir(fs::current_path());
    }

    auto set_path = [&](const std::string& key, const std::string& value) { kv.set(key, absolute_paths(value)); };
    for (const auto& pair : o.sets) {
        const auto eq = pair.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + pair + "'");
        std::string key = pair.substr(0, eq);
        std::string value = pair.substr(eq + 1);
        key.erase(key.find_last_not_of(" \t") + 1);
        value.erase(0, value.find_first_not_of(" \t"));
        if (key == "input" || key == "output_dir") {
            set_path(key, value);
        } else {
            kv.set(key, value);
        }
    }
    if (!o.inputs.empty()) {
        std::string joined;
        for (const auto& i : o.inputs) joined += (joined.empty() ? "" : ",") + i;
        set_path("input", joined);
    }
    if (o.input_kind) kv.set("input_kind", *o.input_kind);
    if (o.k) kv.set("k", number_text(*o.k));
    if (o.n_customer) kv.set("n_customer", number_text(*o.n_customer));
    if (o.n_year) kv.set("n_year", number_text(*o.n_year));
    if (o.p_large) kv.set("p_large", number_text(*o.p_large));
    if (o.c_large) kv.set("c_large", number_text(*o.c_large));
    if (o.seed) kv.set("seed", std::to_string(*o.seed));
    if (o.output_dir) set_path("output_dir", *o.output_dir);
    if (o.confidence) kv.set("confidence", number_text(*o.confidence));
    if (o.ci_method) kv.set("ci_method", *o.ci_method);
    if (o.format) kv.set("export_format", *o.format);
    return kv;
}

ordered_json interval_json(const logrisk::Interval& iv) { return ordered_json::array({iv.lo, iv.hi}); }

ordered_json optional_json(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

void write_file(const fs::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path);
    if (!out) throw logrisk::IoError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw logrisk::IoError("write failed for '" + path.string() + "'");
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw logrisk::IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

logrisk::RunConfig outage_config(const logrisk::KeyValueConfig& kv) {
    auto cfg = logrisk::RunConfig::from(kv);
    if (cfg.inputs.empty()) throw logrisk::ConfigError("no input files given (key 'input')");
    if (cfg.input_kind != logrisk::InputKind::outages) {
        throw logrisk::ConfigError("this subcommand needs outage input (input_kind = outages)");
    }
    return cfg;
}

int run_ingest(const logrisk::KeyValueConfig& kv) {
    const auto cfg = outage_config(kv);
    std::vector<logrisk::OutageRecord> all;
    logrisk::IngestReport total;
    for (const auto& path : cfg.inputs) {
        std::ifstream in(path);
        if (!in) throw logrisk::IoError("cannot open outage file '" + path.string() + "'");
        auto part = logrisk::parse_outages(in, cfg.schema, cfg.cleaning);
        total.rows_read += part.report.rows_read;
        for (const auto& [reason, count] : part.report.rows_dropped_by_reason) total.rows_dropped_by_reason[reason] += count;
        all.insert(all.end(), part.records.begin(), part.records.end());
    }
    const auto before = all.size();
    all = logrisk::clean_outages(std::move(all), cfg.cleaning);
    if (all.size() != before) total.rows_dropped_by_reason["duplicate"] += before - all.size();
    total.rows_retained = all.size();
    total.data_span_years = logrisk::data_span_years(all);

    ensure_dir(cfg.output_dir);
    std::ostringstream cleaned;
    logrisk::write_outages(cleaned, all);
    write_file(cfg.output_dir / "outages_clean.csv", cleaned.str());
    const auto report = logrisk::to_json(total);
    write_file(cfg.output_dir / "ingest_report.json", report + "\n");
    std::cout << report << '\n';
    return 0;
}

int run_events(const logrisk::KeyValueConfig& kv) {
    auto cfg = outage_config(kv);
    if (!cfg.k || !(*cfg.k > 0.0)) throw logrisk::ConfigError("k (cost per customer-hour) must be set and positive");
    if (!cfg.n_customer || !(*cfg.n_customer > 0.0)) throw logrisk::ConfigError("n_customer must be set and positive");
    std::optional<logrisk::IngestReport> ingest;
    std::vector<logrisk::EventRecord> events;
    const auto dataset = logrisk::load_dataset(cfg, &ingest, &events);

    ensure_dir(cfg.output_dir);
    std::ostringstream csv;
    logrisk::write_events(csv, events);
    write_file(cfg.output_dir / "events.csv", csv.str());

    ordered_json j;
    j["events"] = events.size();
    j["n"] = dataset.n();
    j["n_year"] = dataset.n_year();
    j["E_rate"] = dataset.e_rate();
    j["c_maxobs"] = dataset.c_maxobs();
    std::cout << j.dump(2) << '\n';
    return 0;
}

logrisk::PipelineResult pipeline(const logrisk::KeyValueConfig& kv, logrisk::RunConfig* out = nullptr) {
    auto cfg = logrisk::RunConfig::from(kv);
    auto result = logrisk::run_pipeline(cfg);
    if (out) *out = std::move(cfg);
    return result;
}

int run_metrics(const logrisk::KeyValueConfig& kv) {
    logrisk::RunConfig cfg;
    const auto result = pipeline(kv, &cfg);
    logrisk::write_outputs(result, cfg);
    for (const auto& w : result.report.warnings) std::cerr << "logrisk: warning: " << w << '\n';
    std::cout << logrisk::to_json(result.report) << '\n';
    return 0;
}

int run_fit_tail(const logrisk::KeyValueConfig& kv) {
    const auto result = pipeline(kv);
    const auto& r = result.report;
    const auto& t = r.tail;
    ordered_json j;
    j["c_large"] = r.selection.c_large;
    j["n_large"] = r.selection.n_large;
    j["p_large"] = r.selection.p_large;
    j["f_large"] = r.selection.f_large;
    j["RI_large"] = r.selection.ri_large;
    j["alpha"] = t.alpha;
    j["CI_alpha"] = interval_json(t.ci_alpha);
    j["ALEC"] = t.alec;
    j["CI_ALEC"] = interval_json(t.ci_alec);
    j["RSE_ALEC"] = optional_json(t.rse_alec);
    j["confidence"] = t.level;
    j["ci_method"] = std::string(logrisk::to_string(t.ci_method));
    j["rate_lambda"] = t.rate_lambda;
    j["shift"] = t.shift;
    if (r.cmin) {
        j["c_min"] = r.cmin->c_min;
        j["alpha_at_cmin"] = r.cmin->alpha_at_cmin;
        j["ks_distance"] = r.cmin->ks_distance;
    }
    std::cout << j.dump(2) << '\n';
    return 0;
}

int run_extrapolate(const logrisk::KeyValueConfig& kv) {
    const auto result = pipeline(kv);
    const auto& r = result.report;
    ordered_json j;
    j["c_max_hours"] = r.c_max.hours;
    j["c_max"] = r.c_max.c_max;
    j["M"] = r.selection.n_large;
    j["Pb_mean"] = r.bounded_pareto.mean;
    j["Pb_std"] = r.bounded_pareto.std;
    j["RSE_Pb"] = r.bounded_pareto.rse_of_mean;
    if (r.lognormal_params && r.bounded_lognormal) {
        j["mu"] = r.lognormal_params->mu;
        j["sigma"] = r.lognormal_params->sigma;
        j["LNb_mean"] = r.bounded_lognormal->mean;
        j["LNb_std"] = r.bounded_lognormal->std;
        j["RSE_LNb"] = r.bounded_lognormal->rse_of_mean;
    } else {
        j["RSE_LNb"] = nullptr;
    }
    j["warnings"] = r.warnings;
    std::cout << j.dump(2) << '\n';
    return 0;
}

int run_simulate(const logrisk::KeyValueConfig& kv, const Options& o) {
    const auto spec = logrisk::generator_from(kv);
    if (!spec) throw logrisk::ConfigError("simulate needs a generator (synth.family and its parameters)");

    if (o.study || kv.contains("study.estimator")) {
        const auto estimator = logrisk::parse_estimator(o.study ? *o.study : *kv.get("study.estimator"));
        const long long reps = o.replicates ? *o.replicates : kv.get_int("study.replicates").value_or(1000);
        if (reps < 100) throw logrisk::ConfigError("a study needs at least 100 replicates");
        logrisk::StudyOptions opts;
        opts.level = kv.get_double("confidence").value_or(0.95);
        opts.threads = o.threads;
        const auto rep = logrisk::run_study(*spec, estimator, static_cast<std::size_t>(reps), spec->seed, opts);
        ordered_json j;
        j["estimator"] = rep.estimator;
        j["family"] = rep.family;
        j["true_value"] = std::isfinite(rep.true_value) ? ordered_json(rep.true_value) : ordered_json(nullptr);
        j["replicates"] = rep.replicates;
        j["sample_size"] = rep.sample_size;
        j["mean_estimate"] = rep.mean_estimate;
        j["bias"] = std::isfinite(rep.bias) ? ordered_json(rep.bias) : ordered_json(nullptr);
        j["empirical_rse"] = rep.empirical_rse;
        j["ci_coverage"] = optional_json(rep.ci_coverage);
        j["seed"] = spec->seed;
        std::cout << j.dump(2) << '\n';
        return 0;
    }

    const auto costs = logrisk::sample(*spec);
    std::ostringstream text;
    logrisk::write_cost_list(text, costs);
    if (o.out && *o.out == "-") {
        std::cout << text.str();
        return 0;
    }
    fs::path dest;
    if (o.out) {
        dest = *o.out;
    } else {
        const auto cfg = logrisk::RunConfig::from(kv);
        dest = cfg.output_dir / "synthetic_costs.txt";
    }
    write_file(dest, text.str());
    std::cerr << "logrisk: wrote " << costs.size() << " costs to " << dest.string() << '\n';
    return 0;
}

int run_export(const logrisk::KeyValueConfig& kv, const Options& o) {
    logrisk::RunConfig cfg;
    const auto result = pipeline(kv, &cfg);
    std::optional<logrisk::TailFit> fit;
    if (!o.no_fit) fit = result.report.tail;
    if (o.out && *o.out == "-") {
        logrisk::export_exceedance(result.dataset, fit, std::cout, cfg.export_format);
        return 0;
    }
    fs::path dest;
    if (o.out) {
        dest = *o.out;
    } else {
        ensure_dir(cfg.output_dir);
        dest = cfg.output_dir /
               (cfg.export_format == logrisk::ExportFormat::structured ? "exceedance.json" : "exceedance.csv");
    }
    logrisk::export_exceedance(result.dataset, fit, dest, cfg.export_format);
    std::cerr << "logrisk: wrote " << dest.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Logarithmic risk metrics for large blackout costs"};
    app.set_version_flag("--version", std::string(logrisk::version()));
    app.require_subcommand(1);
    app.fallthrough();

    Options o;
    app.add_option("-c,--config", o.config, "Config file (default: $LOGRISK_CONFIG)");
    app.add_option("--set", o.sets, "Override a config key, key=value (repeatable)");
    app.add_option("-i,--input", o.inputs, "Input file (repeatable)");
    app.add_option("--input-kind", o.input_kind, "outages or costs");
    app.add_option("--k", o.k, "Cost per customer-hour");
    app.add_option("--n-customer", o.n_customer, "Customers served");
    app.add_option("--n-year", o.n_year, "Years of data");
    app.add_option("--p-large", o.p_large, "Target large-event probability");
    app.add_option("--c-large", o.c_large, "Explicit large-cost threshold");
    app.add_option("--seed", o.seed, "Seed for synthetic runs");
    app.add_option("-o,--output-dir", o.output_dir, "Output directory");
    app.add_option("--confidence", o.confidence, "Confidence level for intervals");
    app.add_option("--ci-method", o.ci_method, "normal or exact");
    app.add_option("--format", o.format, "Exceedance export format: delimited or structured");

    auto* ingest = app.add_subcommand("ingest", "Clean outage records and report what was dropped");
    auto* events = app.add_subcommand("events", "Group outages into events and price them");
    auto* metrics = app.add_subcommand("metrics", "Full pipeline: metrics report and exceedance export");
    auto* fit_tail = app.add_subcommand("fit-tail", "Pareto tail fit, ALEC and confidence intervals");
    auto* extrapolate = app.add_subcommand("extrapolate", "Bounded Pareto and truncated lognormal extrapolation");
    auto* simulate = app.add_subcommand("simulate", "Draw synthetic costs or run an estimator study");
    simulate->add_option("--study", o.study, "Estimator to study: hill_alpha, alec or sample_mean");
    simulate->add_option("--replicates", o.replicates, "Study replicates (>= 100)");
    simulate->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
    simulate->add_option("--out", o.out, "Cost list destination, '-' for stdout");
    auto* export_cmd = app.add_subcommand("export", "Write the exceedance curve for plotting");
    export_cmd->add_option("--out", o.out, "Destination file, '-' for stdout");
    export_cmd->add_flag("--no-fit", o.no_fit, "Omit the fitted Pareto series");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(logrisk::ErrorKind::config);
    }

    try {
        const auto kv = build_config(o);
        if (ingest->parsed()) return run_ingest(kv);
        if (events->parsed()) return run_events(kv);
        if (metrics->parsed()) return run_metrics(kv);
        if (fit_tail->parsed()) return run_fit_tail(kv);
        if (extrapolate->parsed()) return run_extrapolate(kv);
        if (simulate->parsed()) return run_simulate(kv, o);
        if (export_cmd->parsed()) return run_export(kv, o);
    } catch (const logrisk::Error& e) {
        std::cerr << "logrisk: error";
        if (!e.stage().empty()) std::cerr << " in " << e.stage();
        std::cerr << ": " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "logrisk: unexpected error: " << e.what() << '\n';
        return static_cast<int>(logrisk::ErrorKind::numeric);
    }
    return 0;
}
