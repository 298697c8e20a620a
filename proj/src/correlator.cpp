#include "pdw/correlator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace pdw {

double correlate_at(std::span<const double> samples, std::size_t n,
                    std::span<const double, kPreambleLen> template_symbols) {
  if (n + kPreambleLen > samples.size())
    throw std::out_of_range("correlate_at: window exceeds sample stream");
  double c = 0.0;
  for (std::size_t i = 0; i < kPreambleLen; ++i)
    c += samples[n + i] * template_symbols[i];
  return c;
}

bool detect(std::span<const double> samples, std::size_t n, double threshold,
            std::span<const double, kPreambleLen> template_symbols) {
  return correlate_at(samples, n, template_symbols) > threshold;
}

std::vector<double> correlation_scores(
    const Dataset& ds, std::span<const double, kPreambleLen> template_symbols) {
  std::vector<double> scores;
  scores.reserve(ds.samples.size());
  for (const LabeledSample& s : ds.samples) {
    const std::span<const double> window(s.features.values.data(), kPreambleLen);
    scores.push_back(correlate_at(window, 0, template_symbols));
  }
  return scores;
}

std::vector<double> default_thresholds(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("default_thresholds: no scores");
  const auto [lo_it, hi_it] = std::minmax_element(scores.begin(), scores.end());
  double lo = *lo_it, hi = *hi_it;
  const double eps = std::max((hi - lo) * 5e-3, 1e-9);
  lo -= eps;
  hi += eps;
  std::vector<double> thresholds(201);
  for (std::size_t i = 0; i < thresholds.size(); ++i)
    thresholds[i] = lo + (hi - lo) * static_cast<double>(i) / 200.0;
  return thresholds;
}

std::vector<double> exhaustive_thresholds(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("exhaustive_thresholds: no scores");
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> thresholds;
  thresholds.reserve(sorted.size() + 1);
  thresholds.push_back(sorted.front() - 1.0);
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    if (sorted[i] != sorted[i + 1])
      thresholds.push_back(sorted[i] + (sorted[i + 1] - sorted[i]) / 2.0);
  thresholds.push_back(sorted.back());  // strict >: nothing detected
  return thresholds;
}

std::vector<RocPoint> roc_sweep(const Dataset& binary_test,
                                const CorrelatorConfig& cfg) {
  if (binary_test.scheme != LabelScheme::Binary)
    throw std::invalid_argument("roc_sweep: needs a binary-labeled dataset");
  for (std::size_t i = 1; i < cfg.thresholds.size(); ++i)
    if (!(cfg.thresholds[i - 1] < cfg.thresholds[i]))
      throw std::invalid_argument("roc_sweep: thresholds must be strictly increasing");

  const std::vector<double> scores =
      correlation_scores(binary_test, cfg.template_symbols);
  std::vector<double> pos, neg;
  for (std::size_t i = 0; i < scores.size(); ++i)
    (binary_test.samples[i].label == kPositiveClass ? pos : neg).push_back(scores[i]);
  if (pos.empty() || neg.empty())
    throw std::invalid_argument("roc_sweep: test set misses a class");

  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  const std::vector<double> thresholds =
      cfg.thresholds.empty() ? default_thresholds(scores) : cfg.thresholds;

  // Survival fraction: #(scores > t) / n via binary search on the sorted set.
  const auto survival = [](const std::vector<double>& sorted, double t) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
    return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
  };

  std::vector<RocPoint> roc;
  roc.reserve(thresholds.size());
  for (double t : thresholds)
    roc.push_back({t, survival(pos, t), survival(neg, t)});
  return roc;
}

void save_roc_csv(std::span<const RocPoint> roc, const std::filesystem::path& path,
                  const std::string& audit_comment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_roc_csv: cannot open " + path.string());
  if (!audit_comment.empty()) out << "# " << audit_comment << '\n';
  out << "threshold,pd,pfa\n";
  char buf[120];
  for (const RocPoint& p : roc) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", p.threshold, p.pd, p.pfa);
    out << buf;
  }
  if (!out) throw std::runtime_error("save_roc_csv: write failed for " + path.string());
}

std::vector<RocPoint> load_roc_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_roc_csv: cannot open " + path.string());
  std::vector<RocPoint> roc;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("threshold", 0) == 0) continue;
    RocPoint p;
    const char* ptr = line.c_str();
    const char* end = ptr + line.size();
    for (double* field : {&p.threshold, &p.pd, &p.pfa}) {
      const auto res = std::from_chars(ptr, end, *field);
      if (res.ec != std::errc{})
        throw std::runtime_error("load_roc_csv: bad row in " + path.string());
      ptr = res.ptr;
      if (ptr != end && *ptr == ',') ++ptr;
    }
    roc.push_back(p);
  }
  return roc;
}

}  // namespace pdw
