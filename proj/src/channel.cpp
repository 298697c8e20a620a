#include "pdw/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pdw {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

PreambleSequence make_preamble() {
  PreambleSequence p;
  p.bits = {1, 1, 1, 0, 1, 0, 1, 1, 1, 0, 0, 1, 0, 0, 0, 0};  // 0xEB90
  for (std::size_t i = 0; i < kPreambleLen; ++i)
    p.symbols[i] = 1.0 - 2.0 * p.bits[i];
  return p;
}

PacketBits make_packet(Rng& rng) {
  PacketBits pkt;
  const PreambleSequence preamble = make_preamble();
  std::uniform_int_distribution<int> bit(0, 1);
  for (std::size_t i = 0; i < kPreambleLen; ++i) pkt.bits[i] = preamble.bits[i];
  for (std::size_t i = kPreambleLen; i < kPacketLen; ++i)
    pkt.bits[i] = static_cast<std::uint8_t>(bit(rng));
  return pkt;
}

std::vector<double> bpsk_map(std::span<const std::uint8_t> bits) {
  std::vector<double> symbols;
  symbols.reserve(bits.size());
  for (std::uint8_t b : bits) {
    if (b > 1)
      throw std::invalid_argument("bpsk_map: non-binary input value " +
                                  std::to_string(int(b)));
    symbols.push_back(1.0 - 2.0 * b);
  }
  return symbols;
}

double awgn_sigma(double snr_db) {
  if (!std::isfinite(snr_db))
    throw std::invalid_argument("awgn_sigma: snr_db must be finite");
  return std::pow(10.0, -snr_db / 20.0);
}

std::string_view scenario_name(Scenario scenario) {
  return scenario == Scenario::Awgn ? "awgn" : "interference";
}

std::optional<Scenario> scenario_from_name(std::string_view name) {
  if (name == "awgn") return Scenario::Awgn;
  if (name == "interference") return Scenario::Interference;
  return std::nullopt;
}

ScenarioConfig ScenarioConfig::awgn(double snr_db, std::uint64_t seed) {
  return {Scenario::Awgn, snr_db, 2 * kPacketLen, 1, seed, std::nullopt};
}

ScenarioConfig ScenarioConfig::interference(double snr_db, std::uint64_t seed) {
  return {Scenario::Interference, snr_db, 4 * kPacketLen, 3, seed, std::nullopt};
}

double ScenarioConfig::noise_sigma() const {
  return sigma_override ? *sigma_override : awgn_sigma(snr_db);
}

void ScenarioConfig::validate() const {
  if (scenario == Scenario::Awgn) {
    if (window_len != 2 * kPacketLen || num_packets != 1)
      throw std::invalid_argument(
          "ScenarioConfig: awgn scenario requires window_len 2N and 1 packet");
  } else {
    if (window_len != 4 * kPacketLen || num_packets != 3)
      throw std::invalid_argument(
          "ScenarioConfig: interference scenario requires window_len 4N and 3 "
          "packets (load G = 0.75)");
  }
  if (sigma_override && (*sigma_override < 0.0 || !std::isfinite(*sigma_override)))
    throw std::invalid_argument("ScenarioConfig: sigma_override must be >= 0");
  if (!sigma_override && !std::isfinite(snr_db))
    throw std::invalid_argument("ScenarioConfig: snr_db must be finite");
}

SymbolWindow synth_window(const ScenarioConfig& cfg, Rng& rng) {
  cfg.validate();
  SymbolWindow w;
  w.noise_sigma = cfg.noise_sigma();
  w.samples.assign(cfg.window_len, 0.0);
  w.placements.reserve(cfg.num_packets);

  // Packets fully contained in the window; collisions superpose additively.
  std::uniform_int_distribution<std::size_t> start_dist(0, cfg.window_len - kPacketLen);
  for (std::size_t k = 0; k < cfg.num_packets; ++k) {
    const PacketBits pkt = make_packet(rng);
    const std::size_t start = start_dist(rng);
    for (std::size_t i = 0; i < kPacketLen; ++i)
      w.samples[start + i] += 1.0 - 2.0 * pkt.bits[i];
    w.placements.push_back(start);
  }

  if (w.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, w.noise_sigma);
    for (double& s : w.samples) s += noise(rng);
  }
  return w;
}

}  // namespace pdw
