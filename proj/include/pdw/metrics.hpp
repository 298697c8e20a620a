#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pdw/dataset.hpp"

namespace pdw {

struct ConfusionMatrix {
  int num_classes = 0;
  // counts[i][j]: predicted class i, true class j
  std::vector<std::vector<std::size_t>> counts;
  // each column divided by its column sum; empty columns stay all-zero
  std::vector<std::vector<double>> normalized;
  std::vector<bool> empty_columns;
  std::size_t total = 0;
};

ConfusionMatrix confusion(std::span<const int> predictions,
                          std::span<const int> labels, int num_classes);

// Fraction of predictions equal to the true label.
double accuracy(std::span<const int> predictions, std::span<const int> labels);

// #(predicted positive, truly negative) / #(predicted positive); empty when
// nothing was predicted positive (never reported as 0).
std::optional<double> pfa_eq5(std::span<const int> predictions,
                              std::span<const int> labels, int positive_class);

// #(predicted positive, truly positive) / #(truly positive); empty when the
// test set has no positives.
std::optional<double> pd_eq6(std::span<const int> predictions,
                             std::span<const int> labels, int positive_class);

// Row-sum convention over the column-normalized matrix:
// P_d = a[p][p], P_fa = sum_j a[p][j] - a[p][p].
// Throws std::invalid_argument when the positive column is empty.
std::pair<double, double> pd_pfa_from_confusion(const ConfusionMatrix& cm,
                                                int positive_class);

// Rate of preamble declarations on windows whose true class is the first one
// (np/n): the column mass of rows 1..K-1 in column 0. This is Eq.-(2)'s
// P(D | no complete preamble) and the false-alarm reading behind the
// reference tables' ML operating points.
double preamble_declaration_rate(const ConfusionMatrix& cm);

struct ReportMeta {
  std::string detector;  // corr | nn | rf
  std::string scheme;
  std::string scenario;
  double snr_db = 0.0;
  std::uint64_t seed_train = 0;
  std::uint64_t seed_test = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

struct EvalReport {
  ReportMeta meta;
  double accuracy = 0.0;
  std::optional<double> pd_eq6;   // Eq.-(6) estimator
  std::optional<double> pfa_eq5;  // Eq.-(5) estimator (precision complement)
  std::optional<double> pd_cm;    // confusion-matrix row-sum convention
  std::optional<double> pfa_cm;   // the two P_fa definitions differ in general
  ConfusionMatrix confusion;
};

EvalReport make_eval_report(std::span<const int> predictions,
                            std::span<const int> labels, LabelScheme scheme,
                            const ReportMeta& meta);

void save_report(const EvalReport& report, const std::filesystem::path& path);
EvalReport load_report(const std::filesystem::path& path);

void save_confusion_csv(const ConfusionMatrix& cm, LabelScheme scheme,
                        const std::filesystem::path& path,
                        const std::string& audit_comment);

}  // namespace pdw
