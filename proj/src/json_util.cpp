#include "pdw/json_util.hpp"

#include <fstream>

namespace pdw {

nlohmann::json scenario_config_to_json(const ScenarioConfig& cfg) {
  nlohmann::json j{{"scenario", scenario_name(cfg.scenario)},
                   {"snr_db", cfg.snr_db},
                   {"window_len", cfg.window_len},
                   {"num_packets", cfg.num_packets},
                   {"seed", cfg.seed}};
  if (cfg.sigma_override) j["sigma_override"] = *cfg.sigma_override;
  return j;
}

ScenarioConfig scenario_config_from_json(const nlohmann::json& j) {
  ScenarioConfig cfg;
  const auto scenario = scenario_from_name(j.at("scenario").get<std::string>());
  if (!scenario)
    throw std::runtime_error("unknown scenario name: " +
                             j.at("scenario").get<std::string>());
  cfg.scenario = *scenario;
  cfg.snr_db = j.at("snr_db").get<double>();
  cfg.window_len = j.at("window_len").get<std::size_t>();
  cfg.num_packets = j.at("num_packets").get<std::size_t>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("sigma_override"))
    cfg.sigma_override = j.at("sigma_override").get<double>();
  return cfg;
}

nlohmann::json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  nlohmann::json j;
  in >> j;
  return j;
}

void save_json_file(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace pdw
