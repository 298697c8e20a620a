#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pdw/dataset.hpp"

namespace pdw {

struct CorrelatorConfig {
  std::array<double, kPreambleLen> template_symbols = make_preamble().symbols;
  std::vector<double> thresholds;  // strictly increasing; empty -> default sweep
};

// Sliding correlation of the received stream against the preamble template:
// sum over i of samples[n+i] * template[i]. Throws std::out_of_range when
// fewer than L samples remain at n.
double correlate_at(std::span<const double> samples, std::size_t n,
                    std::span<const double, kPreambleLen> template_symbols);

// Declares a preamble start iff the correlation strictly exceeds threshold.
bool detect(std::span<const double> samples, std::size_t n, double threshold,
            std::span<const double, kPreambleLen> template_symbols);

struct RocPoint {
  double threshold = 0.0;
  double pd = 0.0;
  double pfa = 0.0;
};

// Correlation score of each sample's 16-symbol span against the template.
std::vector<double> correlation_scores(
    const Dataset& ds, std::span<const double, kPreambleLen> template_symbols);

// 201 thresholds uniformly spanning [min - eps, max + eps] of the scores.
std::vector<double> default_thresholds(std::span<const double> scores);

// Every achievable operating point: midpoints between consecutive distinct
// scores plus one threshold below the minimum and one above the maximum.
std::vector<double> exhaustive_thresholds(std::span<const double> scores);

// One point per threshold over a binary-labeled test set: pd on label-p
// samples, pfa on the rest. Throws if either class is empty.
std::vector<RocPoint> roc_sweep(const Dataset& binary_test,
                                const CorrelatorConfig& cfg);

void save_roc_csv(std::span<const RocPoint> roc, const std::filesystem::path& path,
                  const std::string& audit_comment);
std::vector<RocPoint> load_roc_csv(const std::filesystem::path& path);

}  // namespace pdw
