#include <gtest/gtest.h>

#include <cmath>
#include <json.hpp>
#include <sstream>

#include "logrisk/config.hpp"
#include "logrisk/error.hpp"
#include "logrisk/pipeline.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

using namespace logrisk;
using testing_support::slurp;
using testing_support::TempDir;
using nlohmann::json;

namespace {

KeyValueConfig kv_from(const std::string& text) {
    std::istringstream in(text);
    return KeyValueConfig::parse(in);
}

std::string cost_list(const std::vector<double>& costs) {
    std::ostringstream out;
    write_cost_list(out, costs);
    return out.str();
}

/// Tail-only cost list in the shape of the fifth utility in the summary table.
RunConfig utility_five(const TempDir& dir) {
    const auto costs = oracle::pareto_sample(1.47, 2.15, 325, 55);
    const auto input = dir.write("costs.txt", cost_list(costs));
    auto kv = kv_from("input = " + input.string() +
                      "\ninput_kind = costs\nk = 339.9\nn_year = 10\nc_large = 2.15\noutput_dir = " +
                      (dir.path() / "out").string() + "\n");
    return RunConfig::from(kv);
}

json without_timestamp(const std::string& text) {
    auto j = json::parse(text);
    j["provenance"].erase("generated_at");
    return j;
}

}  // namespace

TEST(KeyValueConfigTest, ParsesCommentsAndOverrides) {
    const auto kv = kv_from("# header\nk = 3.5  # trailing\n\nseed=9\nk = 4\n");
    EXPECT_EQ(kv.get_double("k"), 4.0);
    EXPECT_EQ(kv.get_int("seed"), 9);
    EXPECT_FALSE(kv.contains("missing"));
    EXPECT_THROW(kv_from("just words\n"), ConfigError);
}

TEST(KeyValueConfigTest, TypedAccessorsReject) {
    const auto kv = kv_from("k = abc\nflag = maybe\n");
    EXPECT_THROW(kv.get_double("k"), ConfigError);
    EXPECT_THROW(kv.get_bool("flag"), ConfigError);
}

TEST(RunConfigTest, ThresholdExclusivity) {
    auto both = RunConfig::from(kv_from("input = x\nk = 1\nn_customer = 10\np_large = 0.1\nc_large = 3\n"));
    EXPECT_THROW(both.validate(), ConfigError);
    auto neither = RunConfig::from(kv_from("input = x\nk = 1\nn_customer = 10\n"));
    EXPECT_THROW(neither.validate(), ConfigError);
    auto ok = RunConfig::from(kv_from("input = x\nk = 1\nn_customer = 10\np_large = 0.1\n"));
    EXPECT_NO_THROW(ok.validate());
}

TEST(RunConfigTest, RejectsUnknownKeysAndBadValues) {
    EXPECT_THROW(RunConfig::from(kv_from("p_lage = 0.1\n")), ConfigError);
    EXPECT_THROW(RunConfig::from(kv_from("gap_minutes = -1\n")), ConfigError);
    auto negative_k = RunConfig::from(kv_from("input = x\nk = -1\nn_customer = 10\np_large = 0.1\n"));
    EXPECT_THROW(negative_k.validate(), ConfigError);
    auto cost_needs_years = RunConfig::from(kv_from("input = x\ninput_kind = costs\nk = 1\np_large = 0.1\n"));
    EXPECT_THROW(cost_needs_years.validate(), ConfigError);
}

TEST(RunConfigTest, HashTracksEveryChange) {
    const auto a = config_hash(kv_from("k = 1\np_large = 0.1\n"));
    EXPECT_EQ(a, config_hash(kv_from("p_large = 0.1\n# comment\nk = 1\n")));
    EXPECT_NE(a, config_hash(kv_from("k = 1\np_large = 0.05\n")));
    EXPECT_NE(a, config_hash(kv_from("k = 1\np_large = 0.1\nseed = 1\n")));
    EXPECT_EQ(a.size(), 16u);
}

TEST(RunConfigTest, RelativeInputsResolveAgainstConfigFile) {
    TempDir dir;
    const auto path = dir.write("run.cfg", "input = data/a.csv, b.csv\n");
    const auto cfg = RunConfig::from(KeyValueConfig::load(path));
    ASSERT_EQ(cfg.inputs.size(), 2u);
    EXPECT_EQ(cfg.inputs[0], dir.path() / "data/a.csv");
    EXPECT_EQ(cfg.inputs[1], dir.path() / "b.csv");
}

TEST(RunConfigTest, GeneratorKeys) {
    const auto spec = generator_from(kv_from("synth.family = pareto\nsynth.alpha = 1.5\nsynth.lower = 2\nsynth.n = 50\nseed = 4\n"));
    ASSERT_TRUE(spec);
    EXPECT_EQ(spec->n, 50u);
    EXPECT_EQ(spec->seed, 4u);
    EXPECT_DOUBLE_EQ(std::get<ParetoParams>(spec->params).alpha, 1.5);
    EXPECT_FALSE(generator_from(kv_from("k = 1\n")));
    EXPECT_THROW(generator_from(kv_from("synth.family = cauchy\nsynth.n = 5\n")), ConfigError);
}

TEST(CostList, RoundTripAndErrors) {
    const std::vector<double> costs{0.1, 2.5e-7, 12345.678901234567};
    std::istringstream in(cost_list(costs) + "\n# comment\n");
    EXPECT_EQ(read_cost_list(in), costs);
    std::istringstream bad("1.0\nfoo\n");
    EXPECT_THROW(read_cost_list(bad), DataError);
}

TEST(Pipeline, UtilityFiveShape) {
    TempDir dir;
    const auto cfg = utility_five(dir);
    const auto result = run_pipeline(cfg);
    const auto& r = result.report;
    EXPECT_EQ(r.selection.n_large, 325u);
    EXPECT_NEAR(r.tail.alec, 0.63, 0.05);
    ASSERT_TRUE(r.tail.rse_alec);
    EXPECT_NEAR(*r.tail.rse_alec, 0.026, 0.003);
    EXPECT_NEAR(r.c_max.c_max, 252885.6, 1e-6);
    EXPECT_NEAR(r.tail.alpha * std::log(10.0) * (r.tail.alec - std::log10(r.selection.c_large)), 1.0, 1e-12);
    EXPECT_NEAR(r.selection.f_large, r.selection.p_large * r.n / r.n_year, 1e-12);
    EXPECT_EQ(r.value_at_risk.size(), 3u);
}

TEST(Pipeline, QuantileThresholdOnOutageInput) {
    TempDir dir;
    std::ostringstream csv;
    csv << "start,end,customers,planned,system_class\n";
    const auto durations = oracle::pareto_sample(1.2, 1.0, 400, 6);
    const auto origin = *parse_timestamp("2020-01-01T00:00");
    for (std::size_t i = 0; i < durations.size(); ++i) {
        // Outages start 20 hours apart so most events are singletons.
        const auto start = origin + std::chrono::hours{20 * static_cast<long long>(i)};
        const auto length = std::chrono::minutes{1 + static_cast<long long>(std::min(durations[i] * 30.0, 600.0))};
        csv << format_timestamp(start) << ',' << format_timestamp(start + length) << ',' << 1 + i % 97
            << ",false,distribution\n";
    }
    csv << "2020-03-01T00:00,2020-03-01T01:00,5,true,distribution\n";
    const auto input = dir.write("outages.csv", csv.str());
    auto cfg = RunConfig::from(kv_from("input = " + input.string() + "\nk = 20\nn_customer = 1000\np_large = 0.1\n"));
    const auto result = run_pipeline(cfg);
    ASSERT_TRUE(result.ingest);
    EXPECT_EQ(result.ingest->rows_dropped_by_reason.at("planned"), 1u);
    EXPECT_GT(result.events.size(), 10u);
    EXPECT_NEAR(result.report.selection.p_large, 0.1, 0.1);
    EXPECT_GT(result.report.n_year, 0.0);
    EXPECT_EQ(result.dataset.n(), result.report.n);
}

TEST(Pipeline, StageNamesOnErrors) {
    TempDir dir;
    auto cfg = utility_five(dir);
    cfg.c_large = 1e9;
    try {
        run_pipeline(cfg);
        FAIL() << "expected an empty tail";
    } catch (const EmptyTailError& e) {
        EXPECT_EQ(e.stage(), "riskcurve");
        EXPECT_EQ(e.exit_code(), 3);
    }
    cfg.c_large = 2.15;
    cfg.inputs = {dir.path() / "missing.txt"};
    try {
        run_pipeline(cfg);
        FAIL() << "expected an I/O error";
    } catch (const IoError& e) {
        EXPECT_EQ(e.exit_code(), 2);
    }
}

TEST(Pipeline, DeterministicReport) {
    TempDir dir;
    const auto cfg = utility_five(dir);
    const auto a = to_json(run_pipeline(cfg).report);
    const auto b = to_json(run_pipeline(cfg).report);
    EXPECT_EQ(without_timestamp(a), without_timestamp(b));
    const auto j = json::parse(a);
    EXPECT_EQ(j["provenance"]["config_hash"], cfg.config_hash);
    EXPECT_EQ(j["metrics"]["n_large"], 325);
}

TEST(Pipeline, ReportRounding) {
    TempDir dir;
    const auto result = run_pipeline(utility_five(dir));
    const auto j = json::parse(to_json(result.report));
    const double alpha = j["metrics"]["alpha"];
    EXPECT_DOUBLE_EQ(alpha, round_significant(result.report.tail.alpha));
    EXPECT_DOUBLE_EQ(j["metrics"]["c_max"].get<double>(), 252885.6);
    EXPECT_DOUBLE_EQ(j["exact"]["alpha"].get<double>(), result.report.tail.alpha);
    EXPECT_DOUBLE_EQ(round_currency(2.345678), 2.35);
    EXPECT_DOUBLE_EQ(round_significant(0.0262345), 0.0262);
    EXPECT_DOUBLE_EQ(round_significant(952.66), 953.0);
}

TEST(Pipeline, WritesOutputs) {
    TempDir dir;
    auto cfg = utility_five(dir);
    write_outputs(run_pipeline(cfg), cfg);
    EXPECT_TRUE(std::filesystem::exists(cfg.output_dir / "metrics.json"));
    EXPECT_TRUE(std::filesystem::exists(cfg.output_dir / "exceedance.csv"));
    cfg.export_format = ExportFormat::structured;
    write_outputs(run_pipeline(cfg), cfg);
    const auto exported = json::parse(slurp(cfg.output_dir / "exceedance.json"));
    EXPECT_TRUE(exported.contains("fit"));
}

TEST(Export, EmpiricalOnly) {
    std::ostringstream out;
    export_exceedance(CostDataset({1, 10, 100}, 1.0), std::nullopt, out, ExportFormat::delimited);
    std::istringstream in(out.str());
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    ASSERT_EQ(lines.size(), 4u);
    EXPECT_EQ(lines[0], "cost,exceedance_prob,log10_cost,log10_exceedance_prob");
    EXPECT_EQ(lines[1].substr(0, 4), "1,1,");
    EXPECT_EQ(lines[2].substr(0, 3), "10,");
    EXPECT_NEAR(std::stod(lines[2].substr(3)), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(std::stod(lines[3].substr(4)), 1.0 / 3.0, 1e-15);
}

TEST(Export, FitColumnBlankBelowThreshold) {
    TailFit fit;
    fit.alpha = 0.75;
    fit.c_large = 2.4;
    std::ostringstream out;
    export_exceedance(CostDataset({1, 2.4, 24}, 1.0), fit, out, ExportFormat::delimited);
    std::istringstream in(out.str());
    std::string header, below, at, above;
    std::getline(in, header);
    std::getline(in, below);
    std::getline(in, at);
    std::getline(in, above);
    EXPECT_EQ(header, "cost,exceedance_prob,log10_cost,log10_exceedance_prob,pareto_fit");
    EXPECT_EQ(below.back(), ',');
    EXPECT_EQ(at.substr(at.rfind(',') + 1), "1");
    EXPECT_NEAR(std::stod(above.substr(above.rfind(',') + 1)), std::pow(10.0, -0.75), 1e-15);
}

TEST(Export, StructuredHasBothSeries) {
    TailFit fit;
    fit.alpha = 0.75;
    fit.c_large = 2.4;
    std::ostringstream out;
    export_exceedance(CostDataset({1, 2.4, 24}, 1.0), fit, out, ExportFormat::structured);
    const auto j = json::parse(out.str());
    EXPECT_EQ(j["empirical"].size(), 3u);
    EXPECT_EQ(j["fit"]["points"].size(), 2u);
    EXPECT_DOUBLE_EQ(j["fit"]["alpha"].get<double>(), 0.75);
}

TEST(Export, UnwritableDestination) {
    EXPECT_THROW(export_exceedance(CostDataset({1.0}, 1.0), std::nullopt,
                                   std::filesystem::path("/nonexistent_dir_xyz/out.csv"), ExportFormat::delimited),
                 IoError);
}
