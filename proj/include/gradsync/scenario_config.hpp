#pragma once

#include "gradsync/simengine.hpp"

#include <string>

namespace gradsync {

/// Parses flat `section.key = value` text with `#` comments. Unknown keys and
/// invariant violations are hard errors; omitted keys take defaults.
Scenario parse_scenario_config(const std::string& text);

Scenario load_scenario_file(const std::string& path);

/// Applies a single `section.key = value` override; same key set and
/// validation as the config parser.
void set_scenario_key(Scenario& sc, const std::string& key, const std::string& value);

} // namespace gradsync
