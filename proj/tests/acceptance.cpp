// Acceptance suite: runs every reference-reproduction criterion at its stated
// tolerance and prints one pass/fail line per criterion. Exit code is the
// number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include "pdw/experiments.hpp"

using namespace pdw;
namespace fs = std::filesystem;

namespace {

struct Clause {
  std::string name;
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  std::vector<Clause> clauses;

  bool pass() const {
    for (const Clause& c : clauses)
      if (!c.pass) return false;
    return true;
  }
};

std::string fmt(double v, int digits = 4) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Criterion criterion1(Workbench& wb) {
  Criterion c{1, "binary awgn at 0 dB", {}};
  const auto t0 = std::chrono::steady_clock::now();
  const auto& nn = wb.nn_cell(Scenario::Awgn, 0.0, LabelScheme::Binary);
  const auto& rf = wb.rf_cell(Scenario::Awgn, 0.0, LabelScheme::Binary);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  c.clauses.push_back({"NN accuracy >= 0.95 (reference 0.9771)",
                       nn.report.accuracy >= 0.95, fmt(nn.report.accuracy)});
  c.clauses.push_back({"RF accuracy >= 0.92 (reference 0.9502)",
                       rf.report.accuracy >= 0.92, fmt(rf.report.accuracy)});
  const double pd = nn.report.pd_eq6.value_or(0.0);
  const double pfa = nn.report.pfa_eq5.value_or(1.0);
  c.clauses.push_back({"NN pd >= 0.90 with eq-5 pfa <= 0.05",
                       pd >= 0.90 && pfa <= 0.05,
                       "pd=" + fmt(pd) + " pfa=" + fmt(pfa) + " (declaration rate on np " +
                           fmt(preamble_declaration_rate(nn.report.confusion)) + ")"});
  c.clauses.push_back(
      {"gen+train+eval within 300 s", elapsed <= 300.0, fmt(elapsed, 1) + " s"});
  return c;
}

Criterion criterion2(Workbench& wb) {
  Criterion c{2, "6-class awgn at 3 dB", {}};
  const auto& nn = wb.nn_cell(Scenario::Awgn, 3.0, LabelScheme::Awgn6);
  const auto& rf = wb.rf_cell(Scenario::Awgn, 3.0, LabelScheme::Awgn6);

  c.clauses.push_back({"NN accuracy in [0.58, 0.70] (reference 0.6329)",
                       nn.report.accuracy >= 0.58 && nn.report.accuracy <= 0.70,
                       fmt(nn.report.accuracy)});
  c.clauses.push_back({"RF accuracy in [0.59, 0.70] (reference 0.6421)",
                       rf.report.accuracy >= 0.59 && rf.report.accuracy <= 0.70,
                       fmt(rf.report.accuracy)});
  const double nn_pd = nn.report.pd_cm.value_or(0.0);
  const double rf_pd = rf.report.pd_cm.value_or(0.0);
  c.clauses.push_back({"NN confusion pd >= 0.95 (reference 0.9958)", nn_pd >= 0.95,
                       fmt(nn_pd)});
  c.clauses.push_back({"RF confusion pd >= 0.95 (reference 0.9616)", rf_pd >= 0.95,
                       fmt(rf_pd)});
  const double nn_pfa = nn.report.pfa_cm.value_or(1.0);
  const double rf_pfa = rf.report.pfa_cm.value_or(1.0);
  c.clauses.push_back({"NN confusion pfa <= 0.06 (reference 0.0198)", nn_pfa <= 0.06,
                       fmt(nn_pfa)});
  c.clauses.push_back({"RF confusion pfa <= 0.06 (reference 0.0438)", rf_pfa <= 0.06,
                       fmt(rf_pfa)});
  const double nn_diag = nn.report.confusion.normalized[kPositiveClass][kPositiveClass];
  const double rf_diag = rf.report.confusion.normalized[kPositiveClass][kPositiveClass];
  c.clauses.push_back({"NN (p,p) diagonal >= 0.93", nn_diag >= 0.93, fmt(nn_diag)});
  c.clauses.push_back({"RF (p,p) diagonal >= 0.93", rf_diag >= 0.93, fmt(rf_diag)});
  return c;
}

Criterion criterion3(Workbench& wb) {
  Criterion c{3, "correlation roc, awgn", {}};
  const auto& roc8 = wb.corr_roc(Scenario::Awgn, 8.0);
  const auto& roc3 = wb.corr_roc(Scenario::Awgn, 3.0);
  const auto& rf3 = wb.rf_cell(Scenario::Awgn, 3.0, LabelScheme::Binary);

  const double pd8 = max_pd_at_pfa(roc8, 0.09);
  c.clauses.push_back({"8 dB: some threshold reaches pd >= 0.93 at pfa <= 0.09",
                       pd8 >= 0.93, "max pd " + fmt(pd8)});
  const double pfa3 = min_pfa_at_pd(roc3, 0.90);
  c.clauses.push_back({"3 dB: every threshold with pd >= 0.90 has pfa >= 0.30",
                       pfa3 >= 0.30, "min pfa " + fmt(pfa3)});
  const double pd3 = max_pd_at_pfa(roc3, 0.003);
  c.clauses.push_back({"3 dB: correlation pd <= 0.25 at pfa <= 0.003 (reference ~0.11)",
                       pd3 <= 0.25, "max pd " + fmt(pd3)});
  const double rf_pd = rf3.report.pd_eq6.value_or(0.0);
  const double rf_pfa = rf3.report.pfa_eq5.value_or(1.0);
  c.clauses.push_back({"3 dB: RF pd >= 0.95 with eq-5 pfa <= 0.003 (reference 0.995)",
                       rf_pd >= 0.95 && rf_pfa <= 0.003,
                       "pd=" + fmt(rf_pd) + " pfa=" + fmt(rf_pfa)});
  return c;
}

Criterion criterion4(Workbench& wb) {
  Criterion c{4, "4-class interference at 3 dB, G = 0.75", {}};
  const auto& nn = wb.nn_cell(Scenario::Interference, 3.0, LabelScheme::Interf4);
  const auto& rf = wb.rf_cell(Scenario::Interference, 3.0, LabelScheme::Interf4);

  c.clauses.push_back({"NN accuracy in [0.90, 0.96] (reference 0.9335)",
                       nn.report.accuracy >= 0.90 && nn.report.accuracy <= 0.96,
                       fmt(nn.report.accuracy)});
  c.clauses.push_back({"RF accuracy in [0.85, 0.93] (reference 0.8920)",
                       rf.report.accuracy >= 0.85 && rf.report.accuracy <= 0.93,
                       fmt(rf.report.accuracy)});
  const double pd = nn.report.pd_eq6.value_or(0.0);
  c.clauses.push_back({"NN pd >= 0.94 (reference 0.9714)", pd >= 0.94, fmt(pd)});
  // The reference value 0.0272 is the rate of preamble declarations on np
  // windows (its np column mass on preamble rows), not the eq-5 estimator.
  const double fpr = preamble_declaration_rate(nn.report.confusion);
  c.clauses.push_back({"NN preamble-declaration rate on np <= 0.06 (reference 0.0272)",
                       fpr <= 0.06, fmt(fpr)});
  const double mass = nn.report.confusion.normalized[2][3] +
                      nn.report.confusion.normalized[3][3];
  c.clauses.push_back({"NN p+m column mass on rows p+1,p+m >= 0.70 (reference 0.83)",
                       mass >= 0.70, fmt(mass)});
  return c;
}

Criterion criterion5(Workbench& wb) {
  Criterion c{5, "interference roc at 8 dB", {}};
  const auto& roc = wb.corr_roc(Scenario::Interference, 8.0);
  const auto& nn = wb.nn_cell(Scenario::Interference, 8.0, LabelScheme::Binary);
  const auto& rf = wb.rf_cell(Scenario::Interference, 8.0, LabelScheme::Binary);

  const double pd_corr = max_pd_at_pfa(roc, 0.01);
  c.clauses.push_back({"correlation pd in [0.45, 0.70] at eq-2 pfa ~1e-2 (reference 0.5734)",
                       pd_corr >= 0.45 && pd_corr <= 0.70, "max pd " + fmt(pd_corr)});
  // ML false alarms measured as the declaration rate on np windows, the
  // definition behind the reference tables' ML points.
  const auto ml_clause = [&](const char* name, const Workbench::MlResult& r) {
    const double pd = r.report.pd_eq6.value_or(0.0);
    const double fpr = preamble_declaration_rate(r.report.confusion);
    c.clauses.push_back({std::string(name) + " pd >= 0.95 at fpr <= 0.03 (reference 0.98)",
                         pd >= 0.95 && fpr <= 0.03,
                         "pd=" + fmt(pd) + " fpr=" + fmt(fpr) + " (eq5 pfa=" +
                             fmt(r.report.pfa_eq5.value_or(1.0)) + ")"});
  };
  ml_clause("NN", nn);
  ml_clause("RF", rf);
  return c;
}

// Property suites; no tolerance relaxation anywhere.
Criterion criterion6(Workbench& wb, const fs::path& scratch) {
  Criterion c{6, "property suites", {}};

  {  // gradients vs central finite differences on a 17-8-8-K network
    bool ok = true;
    double worst = 0.0;
    for (const int k : {2, 6}) {
      Rng rng(31 + k);
      MlpModel model = init_model(std::vector<int>{17, 8, 8, k}, rng);
      Rng brng(55 + k);
      std::normal_distribution<double> value(0.0, 1.5);
      std::uniform_int_distribution<int> cls(0, k - 1);
      std::vector<LabeledSample> batch(5);
      for (LabeledSample& s : batch) {
        for (double& v : s.features.values) v = value(brng);
        s.label = cls(brng);
      }
      MlpGradients grads;
      loss_and_gradients(model, batch, grads);
      for (std::size_t l = 0; l < model.weights.size() && ok; ++l) {
        for (int i = 0; i < model.weights[l].rows() && ok; ++i)
          for (int j = 0; j < model.weights[l].cols() && ok; ++j) {
            const double fd = oracle::fd_weight_gradient(model, batch, l, i, j, 1e-5);
            const double bp = grads.weights[l](i, j);
            const double rel =
                std::abs(bp - fd) / std::max({std::abs(bp), std::abs(fd), 1e-6});
            worst = std::max(worst, rel);
            ok = ok && rel <= 1e-4;
          }
        for (int i = 0; i < model.biases[l].size() && ok; ++i) {
          const double fd = oracle::fd_bias_gradient(model, batch, l, i, 1e-5);
          const double rel = std::abs(grads.biases[l](i) - fd) /
                             std::max({std::abs(grads.biases[l](i)), std::abs(fd), 1e-6});
          worst = std::max(worst, rel);
          ok = ok && rel <= 1e-4;
        }
      }
    }
    c.clauses.push_back({"mlp gradients match finite differences within 1e-4",
                         ok, "worst rel err " + fmt(worst, 8)});
  }

  {  // entropy / information-gain oracle equivalence on random count vectors
    bool ok = true;
    Rng rng(3);
    std::uniform_int_distribution<std::size_t> count(0, 40);
    for (int trial = 0; trial < 1000 && ok; ++trial) {
      std::vector<std::size_t> left(5), right(5), parent(5);
      std::size_t nl = 0, nr = 0;
      for (std::size_t k = 0; k < 5; ++k) {
        left[k] = count(rng);
        right[k] = count(rng);
        parent[k] = left[k] + right[k];
        nl += left[k];
        nr += right[k];
      }
      if (nl == 0 || nr == 0) continue;
      ok = ok && std::abs(entropy(parent) - oracle::entropy_bits(parent)) <= 1e-12;
      ok = ok && std::abs(information_gain(parent, left, right) -
                          oracle::info_gain(parent, left, right)) <= 1e-12;
    }
    c.clauses.push_back({"entropy and IG match the oracle on 1000 random vectors",
                         ok, ok ? "exact to 1e-12" : "mismatch"});
  }

  {  // single-tree equivalence against brute-force exhaustive splits
    bool ok = true;
    for (std::uint64_t seed = 0; seed < 5 && ok; ++seed) {
      Rng srng(derive_seed(400, seed));
      std::normal_distribution<double> value(0.0, 1.0);
      std::uniform_int_distribution<int> cls(0, 1 + int(seed % 2));
      std::vector<LabeledSample> samples(30);
      for (LabeledSample& s : samples) {
        for (double& v : s.features.values) v = value(srng);
        s.label = cls(srng);
      }
      std::vector<std::size_t> idx(30);
      std::iota(idx.begin(), idx.end(), 0);
      const int k = 2 + int(seed % 2);
      Rng grng(seed);
      const DecisionTree tree =
          grow_tree(samples, idx, k, int(kNumFeatures), 0.01, grng);
      const auto ref = oracle::ref_grow(samples, idx, k, 0.01);
      ok = ok && oracle::ref_equals(*ref, tree, 0);
    }
    c.clauses.push_back({"single tree equals brute-force search on 30-sample sets",
                         ok, ok ? "5 instances" : "structural mismatch"});
  }

  {  // correlation equals a naive inner product on random windows
    bool ok = true;
    const PreambleSequence p = make_preamble();
    Rng rng(17);
    std::normal_distribution<double> noise(0.0, 2.0);
    for (int trial = 0; trial < 1000 && ok; ++trial) {
      std::vector<double> stream(48);
      for (double& v : stream) v = noise(rng);
      const std::size_t n = std::uniform_int_distribution<std::size_t>(0, 32)(rng);
      ok = ok && correlate_at(stream, n, p.symbols) ==
                     oracle::naive_correlation(stream, n, p.symbols);
    }
    c.clauses.push_back({"correlation matches the naive oracle on 1000 windows",
                         ok, ok ? "bit-exact" : "mismatch"});
  }

  {  // roc monotonicity on a real sweep
    const auto& roc = wb.corr_roc(Scenario::Awgn, 3.0);
    bool ok = true;
    for (std::size_t i = 1; i < roc.size(); ++i)
      ok = ok && roc[i].pd <= roc[i - 1].pd && roc[i].pfa <= roc[i - 1].pfa;
    c.clauses.push_back({"roc pd and pfa are non-increasing in the threshold", ok,
                         std::to_string(roc.size()) + " thresholds"});
  }

  {  // confusion columns sum to 1 within 1e-12
    const auto& cm = wb.nn_cell(Scenario::Awgn, 3.0, LabelScheme::Awgn6)
                         .report.confusion;
    bool ok = true;
    for (int j = 0; j < cm.num_classes; ++j) {
      if (cm.empty_columns[j]) continue;
      double col = 0.0;
      for (int i = 0; i < cm.num_classes; ++i) col += cm.normalized[i][j];
      ok = ok && std::abs(col - 1.0) <= 1e-12;
    }
    c.clauses.push_back({"normalized confusion columns sum to 1 within 1e-12", ok,
                         ok ? "all columns" : "column sum off"});
  }

  {  // smoothed loss decrease on a reference training run
    const auto& log = wb.nn_cell(Scenario::Awgn, 0.0, LabelScheme::Binary).nn_log;
    const std::size_t slice = std::max<std::size_t>(1, log.size() / 10);
    double head = 0.0, tail = 0.0;
    for (std::size_t i = 0; i < slice; ++i) {
      head += log[i].train_loss;
      tail += log[log.size() - 1 - i].train_loss;
    }
    c.clauses.push_back({"mean training loss over the last 10% of epochs is below "
                         "the first 10%",
                         tail < head,
                         fmt(head / double(slice)) + " -> " + fmt(tail / double(slice))});
  }

  {  // stored power feature equals the sum of squares exactly
    const Dataset& test = wb.test_set(Scenario::Awgn, 3.0, LabelScheme::Binary);
    bool ok = true;
    for (const LabeledSample& s : test.samples) {
      double power = 0.0;
      for (std::size_t i = 0; i < kPreambleLen; ++i)
        power += s.features.values[i] * s.features.values[i];
      ok = ok && power == s.features.values[16];
    }
    c.clauses.push_back({"power feature redundancy is exact over a full dataset",
                         ok, std::to_string(test.samples.size()) + " samples"});
  }

  {  // end-to-end determinism: a full small pipeline twice, byte-identical
    ExperimentSpec small;
    small.dataset_size = 1500;
    small.nn.epochs = 8;
    small.nn.patience = 0;
    small.rf.num_trees = 40;
    small.nn.seed = kDefaultNnSeed;
    small.rf.seed = kDefaultRfSeed;

    const auto run_once = [&](const fs::path& dir) {
      ExperimentSpec spec = small;
      spec.out_dir = dir;
      Workbench w(spec);
      w.nn_cell(Scenario::Awgn, 3.0, LabelScheme::Binary);
      w.rf_cell(Scenario::Awgn, 3.0, LabelScheme::Binary);
    };
    const fs::path dir_a = scratch / "det_a", dir_b = scratch / "det_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    run_once(dir_a);
    run_once(dir_b);

    bool ok = true;
    for (const char* name :
         {"awgn_3dB_binary_train.csv", "awgn_3dB_binary_test.csv",
          "awgn_3dB_binary_nn.model.json", "awgn_3dB_binary_rf.model.json",
          "awgn_3dB_binary_nn.report.json", "awgn_3dB_binary_rf.report.json"}) {
      const std::string a = slurp(dir_a / name), b = slurp(dir_b / name);
      ok = ok && !a.empty() && a == b;
    }
    c.clauses.push_back({"end-to-end rerun is byte-identical", ok,
                         ok ? "datasets, models, reports" : "files differ"});
  }

  return c;
}

}  // namespace

int main() {
  const fs::path out = fs::current_path() / "acceptance_out";
  fs::create_directories(out);

  ExperimentSpec spec;
  spec.out_dir = out;
  Workbench wb(spec);

  std::vector<Criterion> criteria;
  criteria.push_back(criterion1(wb));
  criteria.push_back(criterion2(wb));
  criteria.push_back(criterion3(wb));
  criteria.push_back(criterion4(wb));
  criteria.push_back(criterion5(wb));
  criteria.push_back(criterion6(wb, out));

  int failed = 0;
  for (const Criterion& c : criteria) {
    for (const Clause& clause : c.clauses)
      std::cout << "    " << (clause.pass ? "[ok]  " : "[FAIL]") << ' '
                << clause.name << ": " << clause.detail << '\n';
    const bool pass = c.pass();
    failed += !pass;
    std::cout << "criterion " << c.id << " (" << c.title << "): "
              << (pass ? "PASS" : "FAIL") << '\n';
  }
  std::cout << "acceptance: " << (criteria.size() - failed) << '/'
            << criteria.size() << " criteria passed\n";
  return failed;
}
