#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "pdw/channel.hpp"

namespace pdw {

inline constexpr std::size_t kNumFeatures = 17;  // 16 samples + aggregate power

enum class LabelScheme { Binary, Awgn6, Interf4 };

// Class index 1 is always "p": the window starts exactly at a packet's first
// symbol, i.e. it holds a complete (possibly noisy/interfered) preamble.
inline constexpr int kPositiveClass = 1;

int num_classes(LabelScheme scheme);
std::string_view scheme_name(LabelScheme scheme);
std::optional<LabelScheme> scheme_from_name(std::string_view name);
std::string_view label_name(LabelScheme scheme, int label);
std::optional<int> label_from_name(LabelScheme scheme, std::string_view token);

struct FeatureVector {
  std::array<double, kNumFeatures> values{};
};

// 16 consecutive samples starting at `offset` plus their sum of squares.
// Throws std::out_of_range unless offset + 16 <= window length.
FeatureVector extract_features(const SymbolWindow& window, std::size_t offset);

// Ground-truth labels for the L-symbol span starting at `offset`.
// Awgn6 classes: 0 n, 1 p, 2 n-p, 3 p-d, 4 d, 5 d-n (single-packet windows).
// Interf4 classes: 0 np, 1 p, 2 p+1, 3 p+m.
int label_awgn6(const SymbolWindow& window, std::size_t offset);
int label_interf4(const SymbolWindow& window, std::size_t offset);
int label_binary(const SymbolWindow& window, std::size_t offset);
int label_window(LabelScheme scheme, const SymbolWindow& window, std::size_t offset);

struct LabeledSample {
  FeatureVector features;
  int label = 0;
  // Derived per-window seed; the source window is regenerable from it, which
  // makes stored labels auditable against ground truth.
  std::uint64_t window_id = 0;
  std::uint32_t offset = 0;
};

struct Dataset {
  LabelScheme scheme = LabelScheme::Binary;
  ScenarioConfig cfg;
  std::vector<LabeledSample> samples;
};

// Synthesizes windows until target_size samples are collected. Each window
// contributes its preamble-aligned vectors plus 4 (awgn) or 12 (interference)
// uniformly random offsets; the final batch is truncated.
Dataset build_dataset(const ScenarioConfig& cfg, LabelScheme scheme,
                      std::size_t target_size);

// Regenerates the source window of a stored sample from its window_id.
SymbolWindow regenerate_window(const ScenarioConfig& cfg, std::uint64_t window_id);

// CSV with header f0,...,f16,label,window_id,offset plus a JSON metadata
// sidecar (dataset_meta_path) holding the generating config.
void save_dataset(const Dataset& ds, const std::filesystem::path& csv_path);
Dataset load_dataset(const std::filesystem::path& csv_path);
std::filesystem::path dataset_meta_path(const std::filesystem::path& csv_path);

}  // namespace pdw
