#pragma once

#include "json.hpp"
#include "pdw/channel.hpp"
#include "pdw/dataset.hpp"

namespace pdw {

nlohmann::json scenario_config_to_json(const ScenarioConfig& cfg);
ScenarioConfig scenario_config_from_json(const nlohmann::json& j);

nlohmann::json load_json_file(const std::filesystem::path& path);
void save_json_file(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace pdw
