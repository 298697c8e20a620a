#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "pdw/correlator.hpp"
#include "pdw/forest.hpp"
#include "pdw/metrics.hpp"
#include "pdw/mlp.hpp"

namespace pdw {

// Documented defaults; committed reports are regenerable from them.
inline constexpr std::uint64_t kDefaultTrainSeed = 101;
inline constexpr std::uint64_t kDefaultTestSeed = 202;
inline constexpr std::uint64_t kDefaultNnSeed = 7;
inline constexpr std::uint64_t kDefaultRfSeed = 13;

enum class Detector { Correlation, NeuralNet, RandomForest };

std::string_view detector_name(Detector d);
std::optional<Detector> detector_from_name(std::string_view name);

struct ExperimentSpec {
  Scenario scenario = Scenario::Awgn;
  std::vector<double> snrs_db = {0.0, 3.0, 8.0};
  LabelScheme scheme = LabelScheme::Binary;
  std::vector<Detector> detectors = {Detector::Correlation, Detector::NeuralNet,
                                     Detector::RandomForest};
  std::size_t dataset_size = 10000;
  std::uint64_t seed_train = kDefaultTrainSeed;
  std::uint64_t seed_test = kDefaultTestSeed;
  TrainConfig nn{.seed = kDefaultNnSeed};
  ForestConfig rf{.seed = kDefaultRfSeed};
  std::filesystem::path out_dir = "out";

  void validate() const;
};

// File-name stem per experiment cell, e.g. "awgn_3dB_awgn6".
std::string cell_stem(Scenario scenario, double snr_db, LabelScheme scheme);

// Subcommand bodies: gen writes datasets, train fits models from dataset
// files, eval writes reports/ROCs from model and dataset files.
void run_gen(const ExperimentSpec& spec, std::ostream& log);
void run_train(const ExperimentSpec& spec, std::ostream& log);
void run_eval(const ExperimentSpec& spec, std::ostream& log);

// In-memory experiment runner with dataset/cell caching; everything it
// computes is also written under out_dir.
class Workbench {
 public:
  explicit Workbench(ExperimentSpec spec);

  const Dataset& train_set(Scenario scenario, double snr_db, LabelScheme scheme);
  const Dataset& test_set(Scenario scenario, double snr_db, LabelScheme scheme);

  struct MlResult {
    EvalReport report;
    double train_seconds = 0.0;
    int nn_best_epoch = 0;
    std::vector<EpochStats> nn_log;  // empty for forests
  };

  const MlResult& nn_cell(Scenario scenario, double snr_db, LabelScheme scheme);
  const MlResult& rf_cell(Scenario scenario, double snr_db, LabelScheme scheme);
  // Exhaustive-threshold sweep on the binary test set; the CSV written next
  // to it uses the 201-point default sweep.
  const std::vector<RocPoint>& corr_roc(Scenario scenario, double snr_db);

  const ExperimentSpec& spec() const { return spec_; }

 private:
  ExperimentSpec spec_;
  std::map<std::string, Dataset> datasets_;
  std::map<std::string, MlResult> cells_;
  std::map<std::string, std::vector<RocPoint>> rocs_;

  const Dataset& dataset(Scenario scenario, double snr_db, LabelScheme scheme,
                         std::uint64_t seed, const char* role);
};

struct ReproCheck {
  std::string name;
  std::string reference;  // value or claim from the published reference tables
  std::string obtained;
  bool gating = true;    // false: shown for comparison only
  bool pass = true;
};

struct ReproResult {
  std::string id;
  std::vector<ReproCheck> checks;

  bool all_passed() const;
};

const std::vector<std::string>& repro_ids();  // fig3, fig4, table2, table3

// Runs gen -> train -> eval for one reference experiment and returns the
// side-by-side comparison; artifacts land under spec.out_dir.
ReproResult run_repro(const std::string& id, const ExperimentSpec& spec,
                      std::ostream& log);

void print_repro_table(const ReproResult& result, std::ostream& out);

// Best detection probability subject to a false-alarm budget, and the lowest
// false alarm among points reaching a detection floor. Scans ROC points.
double max_pd_at_pfa(std::span<const RocPoint> roc, double pfa_limit);
double min_pfa_at_pd(std::span<const RocPoint> roc, double pd_floor);

}  // namespace pdw
