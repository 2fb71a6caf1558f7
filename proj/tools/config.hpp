#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace gkpmod::cli {

using Json = nlohmann::json;

// every key the commands read, with its default; unknown keys in a config file are errors
Json default_config();

// defaults merged with the file (if path is nonempty), then with each key=value override;
// override values are parsed as JSON and fall back to plain strings
Json resolve_config(const std::string& path, const std::vector<std::string>& overrides);

void apply_override(Json& cfg, const std::string& assignment);

// typed access by dotted path; throws ConfigError on a missing key or wrong type
double get_double(const Json& cfg, const std::string& path);
int get_int(const Json& cfg, const std::string& path);
bool get_bool(const Json& cfg, const std::string& path);
std::vector<double> get_doubles(const Json& cfg, const std::string& path);

}  // namespace gkpmod::cli
