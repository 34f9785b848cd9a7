#pragma once

#include "rxledger/auth.hpp"
#include "rxledger/cbr.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rxledger {

/// Service settings. Keys (file, env, flag) are the field names below with
/// dashes for flags and RXLEDGER_ + upper case for environment variables,
/// e.g. `cbr_k`, `--cbr-k`, `RXLEDGER_CBR_K`.
struct Config {
    int port = 8080;
    std::string bind = "127.0.0.1";
    std::string data_dir = "rxledger-data";
    double fingerprint_threshold = 0.95;
    int kdf_iterations = 100'000;
    int session_ttl_minutes = 30;
    int pediatric_age = 12;
    int cbr_k = 5;
    double cbr_threshold = 0.4;
    double cbr_weight_diagnosis = 0.8;
    double cbr_weight_age_band = 0.2;

    AuthPolicy auth_policy() const;
    RetrievalParams retrieval_params() const;

    friend bool operator==(const Config&, const Config&) = default;
};

/// Every recognised key, in declaration order.
const std::vector<std::string>& config_keys();

/// Sets one key from its textual form. Accepts dashes in place of
/// underscores. Throws InvalidArgument for unknown keys or bad values.
void apply_setting(Config& config, std::string_view key, std::string_view value);

/// Applies a flat JSON object of settings; unknown keys are rejected.
void apply_json(Config& config, const nlohmann::json& object);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads RXLEDGER_<KEY> for every key.
void apply_env(Config& config, const EnvLookup& env);

/// Range checks; throws InvalidArgument.
void check(const Config& config);

EnvLookup process_env();

/// defaults < config file < environment < flags. The file comes from the
/// `config` flag, else RXLEDGER_CONFIG, else none.
Config resolve_config(const std::map<std::string, std::string>& flags, const EnvLookup& env);

nlohmann::json to_json(const Config& config);

}  // namespace rxledger
