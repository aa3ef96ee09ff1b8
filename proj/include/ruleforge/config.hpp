#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "ruleforge/engine.hpp"

namespace ruleforge {

/// Every recognised key with its default value. Keys whose default is null
/// are optional and derived from the environment when absent.
nlohmann::json default_config();

/// Overlays `user` onto the defaults. Keys the defaults do not have are
/// rejected with ConfigError naming the full dotted path.
nlohmann::json merge_config(const nlohmann::json& user);

/// Applies "dotted.key=value" to a merged config. The value is read as JSON
/// when it parses, else as a string. Throws ConfigError on unknown keys.
void apply_override(nlohmann::json& config, std::string_view assignment);

/// Converts a merged config. Throws ConfigError on type or range errors.
RunConfig run_config_from_json(const nlohmann::json& config);

/// The merged config without scheduling-only keys (engine.workers); running
/// from it reproduces the same results.
nlohmann::json config_echo(const nlohmann::json& config);

/// Reads and merges a config file. Throws ConfigError.
nlohmann::json load_config_file(const std::string& path);

}  // namespace ruleforge
