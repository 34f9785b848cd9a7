#include "rxledger/config.hpp"

#include "rxledger/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>

namespace rxledger {

AuthPolicy Config::auth_policy() const {
    AuthPolicy p;
    p.fingerprint_threshold = fingerprint_threshold;
    p.kdf_iterations = kdf_iterations;
    p.session_ttl = std::chrono::minutes(session_ttl_minutes);
    return p;
}

RetrievalParams Config::retrieval_params() const {
    RetrievalParams p;
    p.k = static_cast<std::size_t>(cbr_k);
    p.threshold = cbr_threshold;
    p.weights = SimilarityWeights{cbr_weight_diagnosis, cbr_weight_age_band};
    return p;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "port", "bind", "data_dir", "fingerprint_threshold", "kdf_iterations",
        "session_ttl_minutes", "pediatric_age", "cbr_k", "cbr_threshold",
        "cbr_weight_diagnosis", "cbr_weight_age_band"};
    return keys;
}

namespace {

std::string canonical_key(std::string_view key) {
    std::string out(key);
    std::replace(out.begin(), out.end(), '-', '_');
    return out;
}

int parse_int(std::string_view key, std::string_view text) {
    int value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        throw Error(ErrorCode::InvalidArgument,
                    "setting " + std::string(key) + " expects an integer, got '" + std::string(text) + "'");
    }
    return value;
}

double parse_double(std::string_view key, std::string_view text) {
    const std::string s(text);
    char* end = nullptr;
    const double value = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
        throw Error(ErrorCode::InvalidArgument,
                    "setting " + std::string(key) + " expects a number, got '" + s + "'");
    }
    return value;
}

}  // namespace

void apply_setting(Config& c, std::string_view raw_key, std::string_view value) {
    const auto key = canonical_key(raw_key);
    if (key == "port") c.port = parse_int(key, value);
    else if (key == "bind") c.bind = std::string(value);
    else if (key == "data_dir") c.data_dir = std::string(value);
    else if (key == "fingerprint_threshold") c.fingerprint_threshold = parse_double(key, value);
    else if (key == "kdf_iterations") c.kdf_iterations = parse_int(key, value);
    else if (key == "session_ttl_minutes") c.session_ttl_minutes = parse_int(key, value);
    else if (key == "pediatric_age") c.pediatric_age = parse_int(key, value);
    else if (key == "cbr_k") c.cbr_k = parse_int(key, value);
    else if (key == "cbr_threshold") c.cbr_threshold = parse_double(key, value);
    else if (key == "cbr_weight_diagnosis") c.cbr_weight_diagnosis = parse_double(key, value);
    else if (key == "cbr_weight_age_band") c.cbr_weight_age_band = parse_double(key, value);
    else throw Error(ErrorCode::InvalidArgument, "unknown setting: " + std::string(raw_key));
}

void apply_json(Config& c, const nlohmann::json& object) {
    if (!object.is_object()) {
        throw Error(ErrorCode::InvalidArgument, "config file must hold a JSON object");
    }
    for (const auto& [key, value] : object.items()) {
        if (value.is_string()) {
            apply_setting(c, key, value.get<std::string>());
        } else if (value.is_number()) {
            apply_setting(c, key, value.dump());
        } else {
            throw Error(ErrorCode::InvalidArgument, "setting " + key + " must be a string or number");
        }
    }
}

void apply_env(Config& c, const EnvLookup& env) {
    for (const auto& key : config_keys()) {
        std::string name = "RXLEDGER_";
        for (char ch : key) name.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
        if (auto value = env(name)) apply_setting(c, key, *value);
    }
}

void check(const Config& c) {
    if (c.port < 0 || c.port > 65535) throw Error(ErrorCode::InvalidArgument, "port out of range");
    if (c.data_dir.empty()) throw Error(ErrorCode::InvalidArgument, "data_dir is empty");
    if (!(c.fingerprint_threshold > 0.0 && c.fingerprint_threshold <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "fingerprint_threshold must lie in (0,1]");
    }
    if (c.kdf_iterations < 1) throw Error(ErrorCode::InvalidArgument, "kdf_iterations must be >= 1");
    if (c.session_ttl_minutes < 1) {
        throw Error(ErrorCode::InvalidArgument, "session_ttl_minutes must be >= 1");
    }
    if (c.pediatric_age < 0) throw Error(ErrorCode::InvalidArgument, "pediatric_age must be >= 0");
    if (c.cbr_k < 1) throw Error(ErrorCode::InvalidArgument, "cbr_k must be >= 1");
    validate(c.retrieval_params());
}

EnvLookup process_env() {
    return [](const std::string& name) -> std::optional<std::string> {
        if (const char* v = std::getenv(name.c_str())) return std::string(v);
        return std::nullopt;
    };
}

Config resolve_config(const std::map<std::string, std::string>& flags, const EnvLookup& env) {
    Config c;
    std::optional<std::string> file;
    if (auto it = flags.find("config"); it != flags.end()) {
        file = it->second;
    } else if (auto v = env("RXLEDGER_CONFIG")) {
        file = *v;
    }
    if (file) {
        std::ifstream in(*file);
        if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read config file " + *file);
        nlohmann::json object;
        try {
            in >> object;
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::InvalidArgument, "config file " + *file + ": " + e.what());
        }
        apply_json(c, object);
    }
    apply_env(c, env);
    for (const auto& [key, value] : flags) {
        if (key != "config") apply_setting(c, key, value);
    }
    check(c);
    return c;
}

nlohmann::json to_json(const Config& c) {
    return {{"port", c.port},
            {"bind", c.bind},
            {"data_dir", c.data_dir},
            {"fingerprint_threshold", c.fingerprint_threshold},
            {"kdf_iterations", c.kdf_iterations},
            {"session_ttl_minutes", c.session_ttl_minutes},
            {"pediatric_age", c.pediatric_age},
            {"cbr_k", c.cbr_k},
            {"cbr_threshold", c.cbr_threshold},
            {"cbr_weight_diagnosis", c.cbr_weight_diagnosis},
            {"cbr_weight_age_band", c.cbr_weight_age_band}};
}

}  // namespace rxledger
