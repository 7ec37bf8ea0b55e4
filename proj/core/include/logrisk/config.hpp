#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "logrisk/ingest.hpp"
#include "logrisk/synth.hpp"
#include "logrisk/tailfit.hpp"

namespace logrisk {

/// Flat `key = value` text. `#` starts a comment, blank lines are ignored,
/// later assignments override earlier ones.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::istream& in, std::string_view origin = "<config>");
    /// Relative paths inside the file resolve against its directory.
    static KeyValueConfig load(const std::filesystem::path& path);

    void set(std::string key, std::string value);
    bool contains(std::string_view key) const;
    std::optional<std::string> get(std::string_view key) const;
    std::optional<double> get_double(std::string_view key) const;
    std::optional<long long> get_int(std::string_view key) const;
    std::optional<bool> get_bool(std::string_view key) const;

    const std::map<std::string, std::string, std::less<>>& entries() const noexcept { return entries_; }
    const std::filesystem::path& base_dir() const noexcept { return base_dir_; }
    void set_base_dir(std::filesystem::path dir) { base_dir_ = std::move(dir); }

    /// Sorted `key=value` lines; the basis of the config hash.
    std::string canonical() const;

private:
    std::map<std::string, std::string, std::less<>> entries_;
    std::filesystem::path base_dir_;
};

/// Environment variable naming the default config file.
inline constexpr const char* kConfigEnvVar = "LOGRISK_CONFIG";

enum class InputKind { outages, costs };

enum class ExportFormat { delimited, structured };

ExportFormat parse_export_format(std::string_view text);

struct RunConfig {
    std::vector<std::filesystem::path> inputs;
    InputKind input_kind = InputKind::outages;
    Schema schema;
    CleaningRules cleaning;
    std::optional<double> k;
    std::optional<double> n_customer;
    std::optional<double> n_year;
    Seconds gap{0};
    std::optional<double> p_large;
    std::optional<double> c_large;
    double c_max_hours = 744.0;
    double confidence = 0.95;
    CiMethod ci_method = CiMethod::normal;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = ".";
    std::size_t min_tail = 10;
    bool compute_cmin = true;
    ExportFormat export_format = ExportFormat::delimited;
    std::optional<GeneratorSpec> generator;
    std::string config_hash;

    /// Reads every known key; unknown keys raise ConfigError so typos surface.
    static RunConfig from(const KeyValueConfig& kv);

    /// Pipeline preconditions: exactly one threshold choice, positive
    /// parameters, inputs present. Throws ConfigError.
    void validate() const;
};

/// FNV-1a 64 of the canonical text, as 16 hex digits.
std::string config_hash(const KeyValueConfig& kv);

/// GeneratorSpec from the `synth.*` keys (plus `seed`); empty when
/// `synth.family` is absent.
std::optional<GeneratorSpec> generator_from(const KeyValueConfig& kv);

}  // namespace logrisk
