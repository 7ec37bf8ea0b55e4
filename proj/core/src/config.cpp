#include "logrisk/config.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "logrisk/error.hpp"
#include "text_util.hpp"

namespace logrisk {

namespace {

constexpr std::array kKnownKeys = {
    "input", "input_kind", "delimiter",
    "schema.start", "schema.end", "schema.customers", "schema.planned", "schema.system_class", "schema.cause",
    "clean.unplanned_only", "clean.distribution_only", "clean.positive_duration", "clean.drop_zero_customers",
    "clean.dedupe",
    "k", "n_customer", "n_year", "gap_minutes",
    "p_large", "c_large", "c_max_hours", "confidence", "ci_method",
    "seed", "output_dir", "min_tail", "cmin", "export_format",
    "synth.family", "synth.alpha", "synth.lower", "synth.upper", "synth.mu", "synth.sigma", "synth.splice",
    "synth.n",
    "study.estimator", "study.replicates",
};

bool known(std::string_view key) {
    for (const char* k : kKnownKeys) {
        if (key == k) return true;
    }
    return false;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    std::filesystem::path p(value);
    if (p.is_relative() && !base.empty()) p = base / p;
    return p;
}

double require_double(const KeyValueConfig& kv, std::string_view key) {
    const auto v = kv.get_double(key);
    if (!v) throw ConfigError("missing required key '" + std::string(key) + "'");
    return *v;
}

}  // namespace

ExportFormat parse_export_format(std::string_view text) {
    const std::string v = detail::to_lower(detail::trim(text));
    if (v == "delimited" || v == "csv") return ExportFormat::delimited;
    if (v == "structured" || v == "json") return ExportFormat::structured;
    throw ConfigError("unknown export format '" + std::string(text) + "' (expected delimited or structured)");
}

KeyValueConfig KeyValueConfig::parse(std::istream& in, std::string_view origin) {
    KeyValueConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto body = detail::trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) + ": expected 'key = value'");
        }
        const auto key = detail::trim(body.substr(0, eq));
        if (key.empty()) {
            throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) + ": empty key");
        }
        cfg.set(std::string(key), std::string(detail::trim(body.substr(eq + 1))));
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    KeyValueConfig cfg = parse(in, path.string());
    cfg.base_dir_ = path.parent_path();
    return cfg;
}

void KeyValueConfig::set(std::string key, std::string value) { entries_[std::move(key)] = std::move(value); }

bool KeyValueConfig::contains(std::string_view key) const { return entries_.find(key) != entries_.end(); }

std::optional<std::string> KeyValueConfig::get(std::string_view key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::optional<double> KeyValueConfig::get_double(std::string_view key) const {
    const auto raw = get(key);
    if (!raw) return std::nullopt;
    const auto v = detail::parse_double(*raw);
    if (!v) throw ConfigError("key '" + std::string(key) + "' expects a number, got '" + *raw + "'");
    return v;
}

std::optional<long long> KeyValueConfig::get_int(std::string_view key) const {
    const auto raw = get(key);
    if (!raw) return std::nullopt;
    const auto v = detail::parse_int(*raw);
    if (!v) throw ConfigError("key '" + std::string(key) + "' expects an integer, got '" + *raw + "'");
    return v;
}

std::optional<bool> KeyValueConfig::get_bool(std::string_view key) const {
    const auto raw = get(key);
    if (!raw) return std::nullopt;
    const auto v = detail::parse_bool(*raw);
    if (!v || detail::trim(*raw).empty()) {
        throw ConfigError("key '" + std::string(key) + "' expects true/false, got '" + *raw + "'");
    }
    return v;
}

std::string KeyValueConfig::canonical() const {
    std::string out;
    for (const auto& [k, v] : entries_) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

std::string config_hash(const KeyValueConfig& kv) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : kv.canonical()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::optional<GeneratorSpec> generator_from(const KeyValueConfig& kv) {
    const auto family = kv.get("synth.family");
    if (!family) return std::nullopt;
    GeneratorSpec spec;
    const auto n = kv.get_int("synth.n");
    if (!n || *n <= 0) throw ConfigError("synth.n must be a positive integer");
    spec.n = static_cast<std::size_t>(*n);
    spec.seed = static_cast<std::uint64_t>(kv.get_int("seed").value_or(0));
    const std::string f = detail::to_lower(*family);
    if (f == "pareto") {
        spec.params = ParetoParams{require_double(kv, "synth.alpha"), require_double(kv, "synth.lower")};
    } else if (f == "bounded_pareto") {
        spec.params = BoundedParetoParams{require_double(kv, "synth.alpha"), require_double(kv, "synth.lower"),
                                          require_double(kv, "synth.upper")};
    } else if (f == "trunc_lognormal") {
        spec.params = TruncLognormalParams{require_double(kv, "synth.mu"), require_double(kv, "synth.sigma"),
                                           kv.get_double("synth.lower").value_or(0.0),
                                           kv.get_double("synth.upper").value_or(HUGE_VAL)};
    } else if (f == "mixture") {
        spec.params = MixtureParams{require_double(kv, "synth.mu"), require_double(kv, "synth.sigma"),
                                    require_double(kv, "synth.alpha"), require_double(kv, "synth.splice")};
    } else {
        throw ConfigError("unknown synth.family '" + *family +
                          "' (expected pareto, bounded_pareto, trunc_lognormal or mixture)");
    }
    try {
        validate(spec);
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("invalid generator spec: ") + e.what());
    }
    return spec;
}

RunConfig RunConfig::from(const KeyValueConfig& kv) {
    for (const auto& [key, value] : kv.entries()) {
        if (!known(key)) throw ConfigError("unknown config key '" + key + "'");
    }
    RunConfig cfg;
    const auto& base = kv.base_dir();

    if (const auto input = kv.get("input")) {
        std::string_view rest = *input;
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const auto item = detail::trim(rest.substr(0, comma));
            if (!item.empty()) cfg.inputs.push_back(resolve(base, std::string(item)));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
    }
    if (const auto kind = kv.get("input_kind")) {
        const std::string v = detail::to_lower(*kind);
        if (v == "outages") {
            cfg.input_kind = InputKind::outages;
        } else if (v == "costs") {
            cfg.input_kind = InputKind::costs;
        } else {
            throw ConfigError("input_kind must be 'outages' or 'costs', got '" + *kind + "'");
        }
    }
    if (const auto d = kv.get("delimiter")) {
        if (*d == "\\t" || *d == "tab") {
            cfg.schema.delimiter = '\t';
        } else if (d->size() == 1) {
            cfg.schema.delimiter = (*d)[0];
        } else {
            throw ConfigError("delimiter must be a single character or 'tab'");
        }
    }
    auto column = [&](std::string_view key, std::string& target) {
        if (const auto v = kv.get(key)) target = *v;
    };
    column("schema.start", cfg.schema.start);
    column("schema.end", cfg.schema.end);
    column("schema.customers", cfg.schema.customers);
    column("schema.planned", cfg.schema.planned);
    column("schema.system_class", cfg.schema.system_class);
    column("schema.cause", cfg.schema.cause);

    auto toggle = [&](std::string_view key, bool& target) {
        if (const auto v = kv.get_bool(key)) target = *v;
    };
    toggle("clean.unplanned_only", cfg.cleaning.unplanned_only);
    toggle("clean.distribution_only", cfg.cleaning.distribution_only);
    toggle("clean.positive_duration", cfg.cleaning.require_positive_duration);
    toggle("clean.drop_zero_customers", cfg.cleaning.drop_zero_customers);
    toggle("clean.dedupe", cfg.cleaning.dedupe);

    cfg.k = kv.get_double("k");
    cfg.n_customer = kv.get_double("n_customer");
    cfg.n_year = kv.get_double("n_year");
    if (const auto g = kv.get_double("gap_minutes")) {
        if (*g < 0.0) throw ConfigError("gap_minutes must be nonnegative");
        cfg.gap = Seconds{static_cast<long long>(std::llround(*g * 60.0))};
    }
    cfg.p_large = kv.get_double("p_large");
    cfg.c_large = kv.get_double("c_large");
    cfg.c_max_hours = kv.get_double("c_max_hours").value_or(cfg.c_max_hours);
    cfg.confidence = kv.get_double("confidence").value_or(cfg.confidence);
    if (const auto m = kv.get("ci_method")) {
        try {
            cfg.ci_method = parse_ci_method(*m);
        } catch (const ParameterError& e) {
            throw ConfigError(e.what());
        }
    }
    if (const auto seed = kv.get_int("seed")) cfg.seed = static_cast<std::uint64_t>(*seed);
    if (const auto out = kv.get("output_dir")) cfg.output_dir = resolve(base, *out);
    if (const auto mt = kv.get_int("min_tail")) {
        if (*mt < 2) throw ConfigError("min_tail must be at least 2");
        cfg.min_tail = static_cast<std::size_t>(*mt);
    }
    toggle("cmin", cfg.compute_cmin);
    if (const auto f = kv.get("export_format")) cfg.export_format = parse_export_format(*f);
    cfg.generator = generator_from(kv);
    cfg.config_hash = logrisk::config_hash(kv);
    return cfg;
}

void RunConfig::validate() const {
    if (p_large.has_value() == c_large.has_value()) {
        throw ConfigError("exactly one of p_large (target probability) and c_large (explicit threshold) must be set");
    }
    if (p_large && !(*p_large > 0.0 && *p_large < 1.0)) throw ConfigError("p_large must lie in (0, 1)");
    if (c_large && !(*c_large > 0.0)) throw ConfigError("c_large must be positive");
    if (!k || !(*k > 0.0)) throw ConfigError("k (cost per customer-hour) must be set and positive");
    if (!(c_max_hours > 0.0)) throw ConfigError("c_max_hours must be positive");
    if (!(confidence > 0.0 && confidence < 1.0)) throw ConfigError("confidence must lie in (0, 1)");
    if (n_year && !(*n_year > 0.0)) throw ConfigError("n_year must be positive");
    if (inputs.empty()) throw ConfigError("no input files given (key 'input')");
    if (input_kind == InputKind::outages) {
        if (!n_customer || !(*n_customer > 0.0)) {
            throw ConfigError("n_customer must be set and positive for outage input");
        }
    } else if (!n_year) {
        throw ConfigError("n_year must be set for cost-list input");
    }
}

}  // namespace logrisk
