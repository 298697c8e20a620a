#include "pdw/experiments.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "pdw/json_util.hpp"

namespace pdw {

namespace fs = std::filesystem;

std::string_view detector_name(Detector d) {
  switch (d) {
    case Detector::Correlation: return "corr";
    case Detector::NeuralNet: return "nn";
    case Detector::RandomForest: return "rf";
  }
  return "";
}

std::optional<Detector> detector_from_name(std::string_view name) {
  if (name == "corr") return Detector::Correlation;
  if (name == "nn") return Detector::NeuralNet;
  if (name == "rf") return Detector::RandomForest;
  return std::nullopt;
}

void ExperimentSpec::validate() const {
  if (dataset_size == 0)
    throw std::invalid_argument("experiment: dataset size must be positive");
  if (snrs_db.empty()) throw std::invalid_argument("experiment: no SNR points");
  if (detectors.empty()) throw std::invalid_argument("experiment: no detectors");
  if (scheme == LabelScheme::Awgn6 && scenario != Scenario::Awgn)
    throw std::invalid_argument("experiment: awgn6 scheme needs the awgn scenario");
  if (scheme == LabelScheme::Interf4 && scenario != Scenario::Interference)
    throw std::invalid_argument(
        "experiment: interf4 scheme needs the interference scenario");
  if (seed_train == seed_test)
    throw std::invalid_argument("experiment: train and test seeds must differ");
  nn.validate();
  if (rf.num_trees < 1 || rf.features_per_split < 1 ||
      rf.features_per_split > static_cast<int>(kNumFeatures))
    throw std::invalid_argument("experiment: bad forest config");
}

namespace {

std::string snr_str(double snr_db) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", snr_db);
  return buf;
}

std::string fmt(double v, int digits = 4) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

ScenarioConfig make_cfg(Scenario scenario, double snr_db, std::uint64_t seed) {
  return scenario == Scenario::Awgn ? ScenarioConfig::awgn(snr_db, seed)
                                    : ScenarioConfig::interference(snr_db, seed);
}

fs::path cell_file(const fs::path& dir, const std::string& stem,
                   const std::string& suffix) {
  return dir / (stem + suffix);
}

std::string audit_line(const ExperimentSpec& spec, Scenario scenario, double snr_db,
                       LabelScheme scheme, std::string_view detector) {
  std::ostringstream os;
  os << "detector=" << detector << " scenario=" << scenario_name(scenario)
     << " snr_db=" << snr_str(snr_db) << " scheme=" << scheme_name(scheme)
     << " size=" << spec.dataset_size << " seed_train=" << spec.seed_train
     << " seed_test=" << spec.seed_test << " nn_seed=" << spec.nn.seed
     << " rf_seed=" << spec.rf.seed;
  return os.str();
}

ReportMeta make_meta(const ExperimentSpec& spec, Scenario scenario, double snr_db,
                     LabelScheme scheme, std::string_view detector,
                     std::size_t train_size, std::size_t test_size) {
  ReportMeta meta;
  meta.detector = detector;
  meta.scheme = scheme_name(scheme);
  meta.scenario = scenario_name(scenario);
  meta.snr_db = snr_db;
  meta.seed_train = spec.seed_train;
  meta.seed_test = spec.seed_test;
  meta.train_size = train_size;
  meta.test_size = test_size;
  return meta;
}

void save_nn_trainlog(const TrainResult& result, const fs::path& path,
                      const std::string& audit) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "# " << audit << '\n' << "epoch,train_loss,val_accuracy\n";
  char buf[96];
  for (const EpochStats& e : result.log) {
    std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g\n", e.epoch, e.train_loss,
                  e.val_accuracy);
    out << buf;
  }
}

void save_rf_treelog(const ForestModel& model, const fs::path& path,
                     const std::string& audit) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "# " << audit << '\n' << "tree,depth,leaves\n";
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    const TreeStats stats = tree_stats(model.trees[t]);
    out << t << ',' << stats.depth << ',' << stats.leaves << '\n';
  }
}

std::vector<int> dataset_labels(const Dataset& ds) {
  std::vector<int> labels;
  labels.reserve(ds.samples.size());
  for (const LabeledSample& s : ds.samples) labels.push_back(s.label);
  return labels;
}

EvalReport eval_model_predictions(const std::vector<int>& predictions,
                                  const Dataset& test, const ReportMeta& meta) {
  return make_eval_report(predictions, dataset_labels(test), test.scheme, meta);
}

Dataset load_dataset_or_explain(const fs::path& path) {
  if (!fs::exists(path))
    throw std::runtime_error("missing dataset " + path.string() +
                             " (run the gen command first)");
  return load_dataset(path);
}

}  // namespace

std::string cell_stem(Scenario scenario, double snr_db, LabelScheme scheme) {
  return std::string(scenario_name(scenario)) + "_" + snr_str(snr_db) + "dB_" +
         std::string(scheme_name(scheme));
}

void run_gen(const ExperimentSpec& spec, std::ostream& log) {
  spec.validate();
  fs::create_directories(spec.out_dir);
  for (double snr : spec.snrs_db) {
    const std::string stem = cell_stem(spec.scenario, snr, spec.scheme);
    const Dataset train =
        build_dataset(make_cfg(spec.scenario, snr, spec.seed_train), spec.scheme,
                      spec.dataset_size);
    const Dataset test =
        build_dataset(make_cfg(spec.scenario, snr, spec.seed_test), spec.scheme,
                      spec.dataset_size);
    save_dataset(train, cell_file(spec.out_dir, stem, "_train.csv"));
    save_dataset(test, cell_file(spec.out_dir, stem, "_test.csv"));
    log << "gen: " << stem << ": " << train.samples.size() << " train + "
        << test.samples.size() << " test samples\n";
  }
}

void run_train(const ExperimentSpec& spec, std::ostream& log) {
  spec.validate();
  for (double snr : spec.snrs_db) {
    const std::string stem = cell_stem(spec.scenario, snr, spec.scheme);
    Dataset train;
    bool loaded = false;
    for (Detector d : spec.detectors) {
      if (d == Detector::Correlation) {
        log << "train: " << stem << ": corr needs no training (skipped)\n";
        continue;
      }
      if (!loaded) {
        train = load_dataset_or_explain(cell_file(spec.out_dir, stem, "_train.csv"));
        loaded = true;
      }
      const std::string audit =
          audit_line(spec, spec.scenario, snr, spec.scheme, detector_name(d));
      if (d == Detector::NeuralNet) {
        Rng init_rng(derive_seed(spec.nn.seed, 1));
        TrainResult result =
            train_mlp(init_model(num_classes(spec.scheme), init_rng), train, spec.nn);
        save_mlp(result.model, spec.scheme, spec.nn,
                 cell_file(spec.out_dir, stem, "_nn.model.json"), audit);
        save_nn_trainlog(result, cell_file(spec.out_dir, stem, "_nn.trainlog.csv"),
                         audit);
        log << "train: " << stem << ": nn best epoch " << result.best_epoch << " of "
            << result.log.size() << '\n';
      } else {
        const ForestModel model = train_forest(train, spec.rf);
        save_forest(model, cell_file(spec.out_dir, stem, "_rf.model.json"), audit);
        save_rf_treelog(model, cell_file(spec.out_dir, stem, "_rf.treelog.csv"), audit);
        log << "train: " << stem << ": rf " << model.trees.size() << " trees\n";
      }
    }
  }
}

void run_eval(const ExperimentSpec& spec, std::ostream& log) {
  spec.validate();
  for (double snr : spec.snrs_db) {
    const std::string stem = cell_stem(spec.scenario, snr, spec.scheme);
    const Dataset test =
        load_dataset_or_explain(cell_file(spec.out_dir, stem, "_test.csv"));
    for (Detector d : spec.detectors) {
      const std::string audit =
          audit_line(spec, spec.scenario, snr, spec.scheme, detector_name(d));
      if (d == Detector::Correlation) {
        if (test.scheme != LabelScheme::Binary)
          throw std::runtime_error("eval: corr needs a binary test set");
        CorrelatorConfig cfg;
        const std::vector<RocPoint> roc = roc_sweep(test, cfg);
        save_roc_csv(roc, cell_file(spec.out_dir, stem, "_corr.roc.csv"), audit);
        log << "eval: " << stem << ": corr roc with " << roc.size() << " points\n";
        continue;
      }
      std::vector<int> predictions;
      predictions.reserve(test.samples.size());
      if (d == Detector::NeuralNet) {
        const LoadedMlp loaded =
            load_mlp(cell_file(spec.out_dir, stem, "_nn.model.json"));
        if (loaded.scheme != test.scheme)
          throw std::runtime_error(
              "eval: scheme mismatch: nn model trained for " +
              std::string(scheme_name(loaded.scheme)) + " but test set is " +
              std::string(scheme_name(test.scheme)));
        for (const LabeledSample& s : test.samples)
          predictions.push_back(predict(loaded.model, s.features));
      } else {
        const ForestModel model =
            load_forest(cell_file(spec.out_dir, stem, "_rf.model.json"));
        if (model.scheme != test.scheme)
          throw std::runtime_error(
              "eval: scheme mismatch: rf model trained for " +
              std::string(scheme_name(model.scheme)) + " but test set is " +
              std::string(scheme_name(test.scheme)));
        for (const LabeledSample& s : test.samples)
          predictions.push_back(predict_forest(model, s.features));
      }
      const EvalReport report = eval_model_predictions(
          predictions, test,
          make_meta(spec, spec.scenario, snr, spec.scheme, detector_name(d), 0,
                    test.samples.size()));
      const std::string det(detector_name(d));
      save_report(report, cell_file(spec.out_dir, stem, "_" + det + ".report.json"));
      save_confusion_csv(report.confusion, test.scheme,
                         cell_file(spec.out_dir, stem, "_" + det + ".confusion.csv"),
                         audit);
      log << "eval: " << stem << ": " << det << " accuracy " << fmt(report.accuracy)
          << '\n';
    }
  }
}

Workbench::Workbench(ExperimentSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  fs::create_directories(spec_.out_dir);
}

const Dataset& Workbench::dataset(Scenario scenario, double snr_db,
                                  LabelScheme scheme, std::uint64_t seed,
                                  const char* role) {
  const std::string stem = cell_stem(scenario, snr_db, scheme);
  const std::string key = stem + "_" + role + "_" + std::to_string(seed);
  const auto it = datasets_.find(key);
  if (it != datasets_.end()) return it->second;
  Dataset ds = build_dataset(make_cfg(scenario, snr_db, seed), scheme,
                             spec_.dataset_size);
  save_dataset(ds, cell_file(spec_.out_dir, stem, "_" + std::string(role) + ".csv"));
  return datasets_.emplace(key, std::move(ds)).first->second;
}

const Dataset& Workbench::train_set(Scenario scenario, double snr_db,
                                    LabelScheme scheme) {
  return dataset(scenario, snr_db, scheme, spec_.seed_train, "train");
}

const Dataset& Workbench::test_set(Scenario scenario, double snr_db,
                                   LabelScheme scheme) {
  return dataset(scenario, snr_db, scheme, spec_.seed_test, "test");
}

const Workbench::MlResult& Workbench::nn_cell(Scenario scenario, double snr_db,
                                              LabelScheme scheme) {
  const std::string stem = cell_stem(scenario, snr_db, scheme);
  const auto it = cells_.find(stem + "_nn");
  if (it != cells_.end()) return it->second;

  const Dataset& train = train_set(scenario, snr_db, scheme);
  const Dataset& test = test_set(scenario, snr_db, scheme);
  const std::string audit = audit_line(spec_, scenario, snr_db, scheme, "nn");

  const auto t0 = std::chrono::steady_clock::now();
  Rng init_rng(derive_seed(spec_.nn.seed, 1));
  TrainResult trained =
      train_mlp(init_model(num_classes(scheme), init_rng), train, spec_.nn);
  const auto t1 = std::chrono::steady_clock::now();

  std::vector<int> predictions;
  predictions.reserve(test.samples.size());
  for (const LabeledSample& s : test.samples)
    predictions.push_back(predict(trained.model, s.features));

  MlResult result;
  result.train_seconds = std::chrono::duration<double>(t1 - t0).count();
  result.nn_best_epoch = trained.best_epoch;
  result.nn_log = trained.log;
  result.report = eval_model_predictions(
      predictions, test,
      make_meta(spec_, scenario, snr_db, scheme, "nn", train.samples.size(),
                test.samples.size()));

  save_mlp(trained.model, scheme, spec_.nn,
           cell_file(spec_.out_dir, stem, "_nn.model.json"), audit);
  save_nn_trainlog(trained, cell_file(spec_.out_dir, stem, "_nn.trainlog.csv"), audit);
  save_report(result.report, cell_file(spec_.out_dir, stem, "_nn.report.json"));
  save_confusion_csv(result.report.confusion, scheme,
                     cell_file(spec_.out_dir, stem, "_nn.confusion.csv"), audit);
  return cells_.emplace(stem + "_nn", std::move(result)).first->second;
}

const Workbench::MlResult& Workbench::rf_cell(Scenario scenario, double snr_db,
                                              LabelScheme scheme) {
  const std::string stem = cell_stem(scenario, snr_db, scheme);
  const auto it = cells_.find(stem + "_rf");
  if (it != cells_.end()) return it->second;

  const Dataset& train = train_set(scenario, snr_db, scheme);
  const Dataset& test = test_set(scenario, snr_db, scheme);
  const std::string audit = audit_line(spec_, scenario, snr_db, scheme, "rf");

  const auto t0 = std::chrono::steady_clock::now();
  const ForestModel model = train_forest(train, spec_.rf);
  const auto t1 = std::chrono::steady_clock::now();

  std::vector<int> predictions;
  predictions.reserve(test.samples.size());
  for (const LabeledSample& s : test.samples)
    predictions.push_back(predict_forest(model, s.features));

  MlResult result;
  result.train_seconds = std::chrono::duration<double>(t1 - t0).count();
  result.report = eval_model_predictions(
      predictions, test,
      make_meta(spec_, scenario, snr_db, scheme, "rf", train.samples.size(),
                test.samples.size()));

  save_forest(model, cell_file(spec_.out_dir, stem, "_rf.model.json"), audit);
  save_rf_treelog(model, cell_file(spec_.out_dir, stem, "_rf.treelog.csv"), audit);
  save_report(result.report, cell_file(spec_.out_dir, stem, "_rf.report.json"));
  save_confusion_csv(result.report.confusion, scheme,
                     cell_file(spec_.out_dir, stem, "_rf.confusion.csv"), audit);
  return cells_.emplace(stem + "_rf", std::move(result)).first->second;
}

const std::vector<RocPoint>& Workbench::corr_roc(Scenario scenario, double snr_db) {
  const std::string stem = cell_stem(scenario, snr_db, LabelScheme::Binary);
  const auto it = rocs_.find(stem);
  if (it != rocs_.end()) return it->second;

  const Dataset& test = test_set(scenario, snr_db, LabelScheme::Binary);
  CorrelatorConfig cfg;
  const std::vector<double> scores = correlation_scores(test, cfg.template_symbols);

  CorrelatorConfig file_cfg;  // 201-point default sweep for the CSV artifact
  save_roc_csv(roc_sweep(test, file_cfg),
               cell_file(spec_.out_dir, stem, "_corr.roc.csv"),
               audit_line(spec_, scenario, snr_db, LabelScheme::Binary, "corr"));

  cfg.thresholds = exhaustive_thresholds(scores);
  return rocs_.emplace(stem, roc_sweep(test, cfg)).first->second;
}

bool ReproResult::all_passed() const {
  for (const ReproCheck& c : checks)
    if (c.gating && !c.pass) return false;
  return true;
}

const std::vector<std::string>& repro_ids() {
  static const std::vector<std::string> ids = {"fig3", "fig4", "table2", "table3"};
  return ids;
}

double max_pd_at_pfa(std::span<const RocPoint> roc, double pfa_limit) {
  double best = 0.0;
  for (const RocPoint& p : roc)
    if (p.pfa <= pfa_limit) best = std::max(best, p.pd);
  return best;
}

double min_pfa_at_pd(std::span<const RocPoint> roc, double pd_floor) {
  double best = 1.0;
  for (const RocPoint& p : roc)
    if (p.pd >= pd_floor) best = std::min(best, p.pfa);
  return best;
}

namespace {

std::string pd_pfa_str(const EvalReport& r) {
  std::string pd = r.pd_eq6 ? fmt(*r.pd_eq6) : "n/a";
  std::string pfa = r.pfa_eq5 ? fmt(*r.pfa_eq5) : "n/a";
  return "pd=" + pd + " pfa=" + pfa;
}

void write_ml_points_csv(const Workbench::MlResult& nn,
                         const Workbench::MlResult& rf, double snr_db,
                         std::ofstream& out) {
  const auto row = [&](const char* det, const EvalReport& r) {
    out << det << ',' << snr_str(snr_db) << ','
        << (r.pd_eq6 ? fmt(*r.pd_eq6, 6) : "nan") << ','
        << (r.pfa_eq5 ? fmt(*r.pfa_eq5, 6) : "nan") << ',' << fmt(r.accuracy, 6)
        << '\n';
  };
  row("nn", nn.report);
  row("rf", rf.report);
}

ReproResult repro_roc_figure(Workbench& wb, Scenario scenario,
                             const std::string& id, std::ostream& log) {
  ReproResult result;
  result.id = id;
  std::ofstream points(wb.spec().out_dir /
                       (std::string(scenario_name(scenario)) + "_ml_points.csv"));
  points << "# scenario=" << scenario_name(scenario)
         << " scheme=binary snr_db=0,3,8 size=" << wb.spec().dataset_size
         << " seed_train=" << wb.spec().seed_train
         << " seed_test=" << wb.spec().seed_test << " nn_seed=" << wb.spec().nn.seed
         << " rf_seed=" << wb.spec().rf.seed << '\n';
  points << "detector,snr_db,pd_eq6,pfa_eq5,accuracy\n";

  for (double snr : {0.0, 3.0, 8.0}) {
    log << id << ": running " << cell_stem(scenario, snr, LabelScheme::Binary)
        << " cells\n";
    wb.corr_roc(scenario, snr);
    const auto& nn = wb.nn_cell(scenario, snr, LabelScheme::Binary);
    const auto& rf = wb.rf_cell(scenario, snr, LabelScheme::Binary);
    write_ml_points_csv(nn, rf, snr, points);
  }

  if (scenario == Scenario::Awgn) {
    const auto& nn0 = wb.nn_cell(scenario, 0.0, LabelScheme::Binary);
    const auto& rf0 = wb.rf_cell(scenario, 0.0, LabelScheme::Binary);
    const auto& rf3 = wb.rf_cell(scenario, 3.0, LabelScheme::Binary);
    const auto& roc3 = wb.corr_roc(scenario, 3.0);
    const auto& roc8 = wb.corr_roc(scenario, 8.0);

    result.checks.push_back({"NN accuracy, awgn 0 dB (>= 0.95)", "0.9771",
                             fmt(nn0.report.accuracy), true,
                             nn0.report.accuracy >= 0.95});
    result.checks.push_back({"RF accuracy, awgn 0 dB (>= 0.92)", "0.9502",
                             fmt(rf0.report.accuracy), true,
                             rf0.report.accuracy >= 0.92});
    result.checks.push_back(
        {"NN point, awgn 0 dB (pd >= 0.90, eq-5 pfa <= 0.05)", "pd=0.90 pfa<0.05",
         pd_pfa_str(nn0.report) + " np-rate=" +
             fmt(preamble_declaration_rate(nn0.report.confusion)),
         true,
         nn0.report.pd_eq6.value_or(0) >= 0.90 &&
             nn0.report.pfa_eq5.value_or(1) <= 0.05});
    result.checks.push_back(
        {"runtime, awgn 0 dB NN+RF training (<= 300 s)", "<= 300 s",
         fmt(nn0.train_seconds + rf0.train_seconds, 1) + " s", true,
         nn0.train_seconds + rf0.train_seconds <= 300.0});

    const double pd8 = max_pd_at_pfa(roc8, 0.09);
    result.checks.push_back({"corr, awgn 8 dB: max pd with pfa <= 0.09 (>= 0.93)",
                             "0.96 @ 0.062", fmt(pd8), true, pd8 >= 0.93});
    const double pfa3 = min_pfa_at_pd(roc3, 0.90);
    result.checks.push_back(
        {"corr, awgn 3 dB: min pfa with pd >= 0.90 (>= 0.30)", "> 0.40", fmt(pfa3),
         true, pfa3 >= 0.30});
    const double pd3 = max_pd_at_pfa(roc3, 0.003);
    result.checks.push_back({"corr, awgn 3 dB: max pd with pfa <= 0.003 (<= 0.25)",
                             "~0.11", fmt(pd3), true, pd3 <= 0.25});
    result.checks.push_back(
        {"RF point, awgn 3 dB (pd >= 0.95, pfa <= 0.003)", "pd=0.995 pfa=0.003",
         pd_pfa_str(rf3.report), true,
         rf3.report.pd_eq6.value_or(0) >= 0.95 &&
             rf3.report.pfa_eq5.value_or(1) <= 0.003});
  } else {
    const auto& roc8 = wb.corr_roc(scenario, 8.0);
    const auto& nn8 = wb.nn_cell(scenario, 8.0, LabelScheme::Binary);
    const auto& rf8 = wb.rf_cell(scenario, 8.0, LabelScheme::Binary);

    const double pd8 = max_pd_at_pfa(roc8, 0.01);
    result.checks.push_back(
        {"corr, interference 8 dB: max pd with pfa <= 1e-2 (in [0.45, 0.70])",
         "0.5734", fmt(pd8), true, pd8 >= 0.45 && pd8 <= 0.70});
    // ML false alarms compared as the declaration rate on np windows, the
    // definition behind the reference figures' ML points.
    const auto ml_point = [](const Workbench::MlResult& r) {
      const double pd = r.report.pd_eq6.value_or(0.0);
      const double fpr = preamble_declaration_rate(r.report.confusion);
      return std::pair<double, double>(pd, fpr);
    };
    const auto [nn_pd, nn_fpr] = ml_point(nn8);
    result.checks.push_back(
        {"NN point, interference 8 dB (pd >= 0.95, np-rate <= 0.03)", "pd=0.98",
         "pd=" + fmt(nn_pd) + " np-rate=" + fmt(nn_fpr), true,
         nn_pd >= 0.95 && nn_fpr <= 0.03});
    const auto [rf_pd, rf_fpr] = ml_point(rf8);
    result.checks.push_back(
        {"RF point, interference 8 dB (pd >= 0.95, np-rate <= 0.03)", "pd=0.98",
         "pd=" + fmt(rf_pd) + " np-rate=" + fmt(rf_fpr), true,
         rf_pd >= 0.95 && rf_fpr <= 0.03});
  }
  return result;
}

void log_confusion(const EvalReport& r, LabelScheme scheme, std::ostream& log) {
  log << r.meta.detector << " confusion (column-normalized, predicted x true):\n";
  for (int i = 0; i < r.confusion.num_classes; ++i) {
    log << "  " << label_name(scheme, i) << ":";
    for (int j = 0; j < r.confusion.num_classes; ++j)
      log << ' ' << fmt(r.confusion.normalized[i][j]);
    log << '\n';
  }
}

ReproResult repro_table2(Workbench& wb, std::ostream& log) {
  ReproResult result;
  result.id = "table2";
  const auto& nn = wb.nn_cell(Scenario::Awgn, 3.0, LabelScheme::Awgn6);
  const auto& rf = wb.rf_cell(Scenario::Awgn, 3.0, LabelScheme::Awgn6);
  log_confusion(nn.report, LabelScheme::Awgn6, log);
  log_confusion(rf.report, LabelScheme::Awgn6, log);

  result.checks.push_back({"NN accuracy, awgn6 3 dB (in [0.58, 0.70])", "0.6329",
                           fmt(nn.report.accuracy), true,
                           nn.report.accuracy >= 0.58 && nn.report.accuracy <= 0.70});
  result.checks.push_back({"RF accuracy, awgn6 3 dB (in [0.59, 0.70])", "0.6421",
                           fmt(rf.report.accuracy), true,
                           rf.report.accuracy >= 0.59 && rf.report.accuracy <= 0.70});
  result.checks.push_back({"NN confusion pd, awgn6 3 dB (>= 0.95)", "0.9958",
                           fmt(nn.report.pd_cm.value_or(0)), true,
                           nn.report.pd_cm.value_or(0) >= 0.95});
  result.checks.push_back({"RF confusion pd, awgn6 3 dB (>= 0.95)", "0.9616",
                           fmt(rf.report.pd_cm.value_or(0)), true,
                           rf.report.pd_cm.value_or(0) >= 0.95});
  result.checks.push_back({"NN confusion pfa, awgn6 3 dB (<= 0.06)", "0.0198",
                           fmt(nn.report.pfa_cm.value_or(1)), true,
                           nn.report.pfa_cm.value_or(1) <= 0.06});
  result.checks.push_back({"RF confusion pfa, awgn6 3 dB (<= 0.06)", "0.0438",
                           fmt(rf.report.pfa_cm.value_or(1)), true,
                           rf.report.pfa_cm.value_or(1) <= 0.06});
  const double nn_diag = nn.report.confusion.normalized[kPositiveClass][kPositiveClass];
  const double rf_diag = rf.report.confusion.normalized[kPositiveClass][kPositiveClass];
  result.checks.push_back({"NN (p,p) diagonal, awgn6 3 dB (>= 0.93)", "0.9958",
                           fmt(nn_diag), true, nn_diag >= 0.93});
  result.checks.push_back({"RF (p,p) diagonal, awgn6 3 dB (>= 0.93)", "0.9616",
                           fmt(rf_diag), true, rf_diag >= 0.93});
  return result;
}

ReproResult repro_table3(Workbench& wb, std::ostream& log) {
  ReproResult result;
  result.id = "table3";
  const auto& nn = wb.nn_cell(Scenario::Interference, 3.0, LabelScheme::Interf4);
  const auto& rf = wb.rf_cell(Scenario::Interference, 3.0, LabelScheme::Interf4);
  log_confusion(nn.report, LabelScheme::Interf4, log);
  log_confusion(rf.report, LabelScheme::Interf4, log);

  result.checks.push_back({"NN accuracy, interf4 3 dB (in [0.90, 0.96])", "0.9335",
                           fmt(nn.report.accuracy), true,
                           nn.report.accuracy >= 0.90 && nn.report.accuracy <= 0.96});
  result.checks.push_back({"RF accuracy, interf4 3 dB (in [0.85, 0.93])", "0.8920",
                           fmt(rf.report.accuracy), true,
                           rf.report.accuracy >= 0.85 && rf.report.accuracy <= 0.93});
  result.checks.push_back({"NN pd (eq. 6), interf4 3 dB (>= 0.94)", "0.9714",
                           fmt(nn.report.pd_eq6.value_or(0)), true,
                           nn.report.pd_eq6.value_or(0) >= 0.94});
  // The reference 0.0272 is the np-column mass on preamble rows, i.e. the
  // declaration rate conditioned on np windows, not the eq-5 estimator.
  const double nn_rate = preamble_declaration_rate(nn.report.confusion);
  result.checks.push_back({"NN preamble rate on np, interf4 3 dB (<= 0.06)", "0.0272",
                           fmt(nn_rate) + " (eq5 " +
                               fmt(nn.report.pfa_eq5.value_or(1)) + ")",
                           true, nn_rate <= 0.06});
  const double mass = nn.report.confusion.normalized[2][3] +
                      nn.report.confusion.normalized[3][3];
  result.checks.push_back(
      {"NN p+m column mass on rows p+1,p+m (>= 0.70)", "0.8308", fmt(mass), true,
       mass >= 0.70});
  result.checks.push_back({"RF pd (eq. 6), interf4 3 dB", "0.9311",
                           fmt(rf.report.pd_eq6.value_or(0)), false, true});
  result.checks.push_back({"RF pfa (eq. 5), interf4 3 dB", "0.0324",
                           fmt(rf.report.pfa_eq5.value_or(1)), false, true});
  return result;
}

}  // namespace

ReproResult run_repro(const std::string& id, const ExperimentSpec& spec,
                      std::ostream& log) {
  ExperimentSpec fixed = spec;
  fixed.snrs_db = {0.0, 3.0, 8.0};
  if (id == "fig3" || id == "fig4") {
    fixed.scenario = id == "fig3" ? Scenario::Awgn : Scenario::Interference;
    fixed.scheme = LabelScheme::Binary;
    Workbench wb(fixed);
    return repro_roc_figure(wb, fixed.scenario, id, log);
  }
  if (id == "table2") {
    fixed.scenario = Scenario::Awgn;
    fixed.scheme = LabelScheme::Awgn6;
    Workbench wb(fixed);
    return repro_table2(wb, log);
  }
  if (id == "table3") {
    fixed.scenario = Scenario::Interference;
    fixed.scheme = LabelScheme::Interf4;
    Workbench wb(fixed);
    return repro_table3(wb, log);
  }
  std::string known;
  for (const std::string& k : repro_ids()) known += " " + k;
  throw std::invalid_argument("unknown repro id '" + id + "'; valid ids:" + known);
}

void print_repro_table(const ReproResult& result, std::ostream& out) {
  out << "\nreproduction: " << result.id << '\n';
  const auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
  };
  out << pad("check", 62) << pad("reference", 20) << pad("obtained", 20) << "status\n";
  out << std::string(108, '-') << '\n';
  for (const ReproCheck& c : result.checks)
    out << pad(c.name, 62) << pad(c.reference, 20) << pad(c.obtained, 20)
        << (c.gating ? (c.pass ? "PASS" : "FAIL") : "--") << '\n';
  out << std::string(108, '-') << '\n';
  out << (result.all_passed() ? "all gated checks passed"
                              : "some gated checks FAILED")
      << '\n';
}

}  // namespace pdw
