#include "pdw/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "pdw/json_util.hpp"

namespace pdw {

ConfusionMatrix confusion(std::span<const int> predictions,
                          std::span<const int> labels, int num_classes) {
  if (predictions.size() != labels.size())
    throw std::invalid_argument("confusion: size mismatch");
  ConfusionMatrix cm;
  cm.num_classes = num_classes;
  cm.total = predictions.size();
  cm.counts.assign(num_classes, std::vector<std::size_t>(num_classes, 0));
  cm.normalized.assign(num_classes, std::vector<double>(num_classes, 0.0));
  cm.empty_columns.assign(num_classes, true);

  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const int p = predictions[i], t = labels[i];
    if (p < 0 || p >= num_classes || t < 0 || t >= num_classes)
      throw std::invalid_argument("confusion: class index out of range");
    ++cm.counts[p][t];
  }
  for (int j = 0; j < num_classes; ++j) {
    std::size_t col = 0;
    for (int i = 0; i < num_classes; ++i) col += cm.counts[i][j];
    if (col == 0) continue;
    cm.empty_columns[j] = false;
    for (int i = 0; i < num_classes; ++i)
      cm.normalized[i][j] =
          static_cast<double>(cm.counts[i][j]) / static_cast<double>(col);
  }
  return cm;
}

double accuracy(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size())
    throw std::invalid_argument("accuracy: size mismatch");
  if (predictions.empty()) throw std::invalid_argument("accuracy: empty input");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    if (predictions[i] == labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

std::optional<double> pfa_eq5(std::span<const int> predictions,
                              std::span<const int> labels, int positive_class) {
  if (predictions.size() != labels.size())
    throw std::invalid_argument("pfa_eq5: size mismatch");
  std::size_t declared = 0, false_alarms = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] != positive_class) continue;
    ++declared;
    if (labels[i] != positive_class) ++false_alarms;
  }
  if (declared == 0) return std::nullopt;
  return static_cast<double>(false_alarms) / static_cast<double>(declared);
}

std::optional<double> pd_eq6(std::span<const int> predictions,
                             std::span<const int> labels, int positive_class) {
  if (predictions.size() != labels.size())
    throw std::invalid_argument("pd_eq6: size mismatch");
  std::size_t positives = 0, detected = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (labels[i] != positive_class) continue;
    ++positives;
    if (predictions[i] == positive_class) ++detected;
  }
  if (positives == 0) return std::nullopt;
  return static_cast<double>(detected) / static_cast<double>(positives);
}

std::pair<double, double> pd_pfa_from_confusion(const ConfusionMatrix& cm,
                                                int positive_class) {
  if (positive_class < 0 || positive_class >= cm.num_classes)
    throw std::invalid_argument("pd_pfa_from_confusion: bad positive class");
  if (cm.empty_columns[positive_class])
    throw std::invalid_argument("pd_pfa_from_confusion: empty positive column");
  const double pd = cm.normalized[positive_class][positive_class];
  double row = 0.0;
  for (int j = 0; j < cm.num_classes; ++j) row += cm.normalized[positive_class][j];
  return {pd, row - pd};
}

double preamble_declaration_rate(const ConfusionMatrix& cm) {
  if (cm.num_classes < 2)
    throw std::invalid_argument("preamble_declaration_rate: need >= 2 classes");
  if (cm.empty_columns[0])
    throw std::invalid_argument("preamble_declaration_rate: no negative samples");
  double rate = 0.0;
  for (int i = 1; i < cm.num_classes; ++i) rate += cm.normalized[i][0];
  return rate;
}

EvalReport make_eval_report(std::span<const int> predictions,
                            std::span<const int> labels, LabelScheme scheme,
                            const ReportMeta& meta) {
  EvalReport r;
  r.meta = meta;
  r.accuracy = accuracy(predictions, labels);
  r.pd_eq6 = pd_eq6(predictions, labels, kPositiveClass);
  r.pfa_eq5 = pfa_eq5(predictions, labels, kPositiveClass);
  r.confusion = confusion(predictions, labels, num_classes(scheme));
  if (!r.confusion.empty_columns[kPositiveClass]) {
    const auto [pd, pfa] = pd_pfa_from_confusion(r.confusion, kPositiveClass);
    r.pd_cm = pd;
    r.pfa_cm = pfa;
  }
  return r;
}

namespace {

nlohmann::json optional_to_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> optional_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

void save_report(const EvalReport& r, const std::filesystem::path& path) {
  nlohmann::json j{
      {"detector", r.meta.detector},
      {"scheme", r.meta.scheme},
      {"scenario", r.meta.scenario},
      {"snr_db", r.meta.snr_db},
      {"seed_train", r.meta.seed_train},
      {"seed_test", r.meta.seed_test},
      {"train_size", r.meta.train_size},
      {"test_size", r.meta.test_size},
      {"accuracy", r.accuracy},
      {"pd_eq6", optional_to_json(r.pd_eq6)},
      {"pfa_eq5", optional_to_json(r.pfa_eq5)},
      {"pd_confusion", optional_to_json(r.pd_cm)},
      {"pfa_confusion", optional_to_json(r.pfa_cm)},
      {"confusion_counts", r.confusion.counts},
      {"confusion_normalized", r.confusion.normalized},
  };
  save_json_file(j, path);
}

EvalReport load_report(const std::filesystem::path& path) {
  const nlohmann::json j = load_json_file(path);
  EvalReport r;
  r.meta.detector = j.at("detector").get<std::string>();
  r.meta.scheme = j.at("scheme").get<std::string>();
  r.meta.scenario = j.at("scenario").get<std::string>();
  r.meta.snr_db = j.at("snr_db").get<double>();
  r.meta.seed_train = j.at("seed_train").get<std::uint64_t>();
  r.meta.seed_test = j.at("seed_test").get<std::uint64_t>();
  r.meta.train_size = j.at("train_size").get<std::size_t>();
  r.meta.test_size = j.at("test_size").get<std::size_t>();
  r.accuracy = j.at("accuracy").get<double>();
  r.pd_eq6 = optional_from_json(j.at("pd_eq6"));
  r.pfa_eq5 = optional_from_json(j.at("pfa_eq5"));
  r.pd_cm = optional_from_json(j.at("pd_confusion"));
  r.pfa_cm = optional_from_json(j.at("pfa_confusion"));
  r.confusion.counts = j.at("confusion_counts").get<std::vector<std::vector<std::size_t>>>();
  r.confusion.normalized = j.at("confusion_normalized").get<std::vector<std::vector<double>>>();
  r.confusion.num_classes = static_cast<int>(r.confusion.counts.size());
  r.confusion.empty_columns.assign(r.confusion.num_classes, false);
  r.confusion.total = 0;
  for (int j2 = 0; j2 < r.confusion.num_classes; ++j2) {
    std::size_t col = 0;
    for (int i = 0; i < r.confusion.num_classes; ++i) col += r.confusion.counts[i][j2];
    if (col == 0) r.confusion.empty_columns[j2] = true;
    r.confusion.total += col;
  }
  return r;
}

void save_confusion_csv(const ConfusionMatrix& cm, LabelScheme scheme,
                        const std::filesystem::path& path,
                        const std::string& audit_comment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_confusion_csv: cannot open " + path.string());
  if (!audit_comment.empty()) out << "# " << audit_comment << '\n';
  out << "predicted\\true";
  for (int j = 0; j < cm.num_classes; ++j) out << ',' << label_name(scheme, j);
  out << '\n';
  char buf[32];
  for (int i = 0; i < cm.num_classes; ++i) {
    out << label_name(scheme, i);
    for (int j = 0; j < cm.num_classes; ++j) {
      std::snprintf(buf, sizeof(buf), "%.6f", cm.normalized[i][j]);
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("save_confusion_csv: write failed");
}

}  // namespace pdw
