#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace pdw {

using Rng = std::mt19937_64;

// Derives an independent stream seed from (seed, index) via splitmix64-style
// mixing, so parallel generation is independent of worker count.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

inline constexpr std::size_t kPreambleLen = 16;  // syncword length L
inline constexpr std::size_t kPacketLen = 256;   // packet length N in symbols

struct PreambleSequence {
  std::array<std::uint8_t, kPreambleLen> bits;
  std::array<double, kPreambleLen> symbols;  // antipodal: symbols[i] = 1 - 2*bits[i]
};

// The fixed CCSDS 16-bit syncword (0xEB90) in bit and antipodal form.
PreambleSequence make_preamble();

struct PacketBits {
  std::array<std::uint8_t, kPacketLen> bits;  // 16 preamble + 240 payload
};

PacketBits make_packet(Rng& rng);

// 0 -> +1, 1 -> -1 (unit symbol energy). Throws std::invalid_argument on
// non-binary input.
std::vector<double> bpsk_map(std::span<const std::uint8_t> bits);

// Noise standard deviation such that Es/sigma^2 in dB equals snr_db, Es = 1.
double awgn_sigma(double snr_db);

enum class Scenario { Awgn, Interference };

std::string_view scenario_name(Scenario scenario);
std::optional<Scenario> scenario_from_name(std::string_view name);

struct ScenarioConfig {
  Scenario scenario = Scenario::Awgn;
  double snr_db = 0.0;
  std::size_t window_len = 2 * kPacketLen;
  std::size_t num_packets = 1;
  std::uint64_t seed = 0;
  // Exact noise std instead of awgn_sigma(snr_db); 0 gives noise-free windows.
  std::optional<double> sigma_override;

  static ScenarioConfig awgn(double snr_db, std::uint64_t seed);
  static ScenarioConfig interference(double snr_db, std::uint64_t seed);

  double noise_sigma() const;
  void validate() const;  // throws std::invalid_argument
};

struct SymbolWindow {
  std::vector<double> samples;
  std::vector<std::size_t> placements;  // packet start offsets
  double noise_sigma = 0.0;
};

// Places cfg.num_packets packets at starts uniform on [0, window_len - N],
// superposes them sample-wise and adds white Gaussian noise.
SymbolWindow synth_window(const ScenarioConfig& cfg, Rng& rng);

}  // namespace pdw
