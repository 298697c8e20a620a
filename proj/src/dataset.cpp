#include "pdw/dataset.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "pdw/json_util.hpp"

namespace pdw {

namespace {

const char* kBinaryNames[] = {"np", "p"};
const char* kAwgn6Names[] = {"n", "p", "n-p", "p-d", "d", "d-n"};
const char* kInterf4Names[] = {"np", "p", "p+1", "p+m"};

constexpr std::string_view kCsvHeader =
    "f0,f1,f2,f3,f4,f5,f6,f7,f8,f9,f10,f11,f12,f13,f14,f15,f16,label,"
    "window_id,offset";

}  // namespace

int num_classes(LabelScheme scheme) {
  switch (scheme) {
    case LabelScheme::Binary: return 2;
    case LabelScheme::Awgn6: return 6;
    case LabelScheme::Interf4: return 4;
  }
  return 0;
}

std::string_view scheme_name(LabelScheme scheme) {
  switch (scheme) {
    case LabelScheme::Binary: return "binary";
    case LabelScheme::Awgn6: return "awgn6";
    case LabelScheme::Interf4: return "interf4";
  }
  return "";
}

std::optional<LabelScheme> scheme_from_name(std::string_view name) {
  if (name == "binary") return LabelScheme::Binary;
  if (name == "awgn6") return LabelScheme::Awgn6;
  if (name == "interf4") return LabelScheme::Interf4;
  return std::nullopt;
}

std::string_view label_name(LabelScheme scheme, int label) {
  if (label < 0 || label >= num_classes(scheme))
    throw std::out_of_range("label_name: class index out of range");
  switch (scheme) {
    case LabelScheme::Binary: return kBinaryNames[label];
    case LabelScheme::Awgn6: return kAwgn6Names[label];
    case LabelScheme::Interf4: return kInterf4Names[label];
  }
  return "";
}

std::optional<int> label_from_name(LabelScheme scheme, std::string_view token) {
  for (int k = 0; k < num_classes(scheme); ++k)
    if (label_name(scheme, k) == token) return k;
  return std::nullopt;
}

FeatureVector extract_features(const SymbolWindow& window, std::size_t offset) {
  if (offset + kPreambleLen > window.samples.size())
    throw std::out_of_range("extract_features: offset past window end");
  FeatureVector fv;
  double power = 0.0;
  for (std::size_t i = 0; i < kPreambleLen; ++i) {
    const double v = window.samples[offset + i];
    fv.values[i] = v;
    power += v * v;
  }
  fv.values[kPreambleLen] = power;
  return fv;
}

int label_awgn6(const SymbolWindow& window, std::size_t offset) {
  if (window.placements.size() != 1)
    throw std::invalid_argument("label_awgn6: expects a single-packet window");
  const std::size_t s = window.placements.front();
  const std::size_t l = offset;
  if (l + kPreambleLen <= s || l >= s + kPacketLen) return 0;  // n
  if (l == s) return 1;                                        // p
  if (l < s) return 2;                                         // n-p
  if (l < s + kPreambleLen) return 3;                          // p-d
  if (l + kPreambleLen <= s + kPacketLen) return 4;            // d
  return 5;                                                    // d-n
}

int label_interf4(const SymbolWindow& window, std::size_t offset) {
  const std::size_t l = offset;
  bool aligned = false;
  std::size_t overlapping = 0;
  for (std::size_t s : window.placements) {
    if (s == l) aligned = true;
    if (s < l + kPreambleLen && s + kPacketLen > l) ++overlapping;
  }
  if (!aligned) return 0;  // np
  // The window's own packet always overlaps; the rest are interferers.
  const std::size_t interferers = overlapping - 1;
  if (interferers == 0) return 1;  // p
  if (interferers == 1) return 2;  // p+1
  return 3;                        // p+m
}

int label_binary(const SymbolWindow& window, std::size_t offset) {
  for (std::size_t s : window.placements)
    if (s == offset) return kPositiveClass;
  return 0;
}

int label_window(LabelScheme scheme, const SymbolWindow& window, std::size_t offset) {
  switch (scheme) {
    case LabelScheme::Binary: return label_binary(window, offset);
    case LabelScheme::Awgn6: return label_awgn6(window, offset);
    case LabelScheme::Interf4: return label_interf4(window, offset);
  }
  return 0;
}

Dataset build_dataset(const ScenarioConfig& cfg, LabelScheme scheme,
                      std::size_t target_size) {
  cfg.validate();
  if (target_size == 0)
    throw std::invalid_argument("build_dataset: target_size must be positive");
  if (scheme == LabelScheme::Awgn6 && cfg.scenario != Scenario::Awgn)
    throw std::invalid_argument("build_dataset: awgn6 labels need the awgn scenario");
  if (scheme == LabelScheme::Interf4 && cfg.scenario != Scenario::Interference)
    throw std::invalid_argument(
        "build_dataset: interf4 labels need the interference scenario");

  Dataset ds;
  ds.scheme = scheme;
  ds.cfg = cfg;
  ds.samples.reserve(target_size);

  const std::size_t vectors_per_window = 5 * cfg.num_packets;
  for (std::uint64_t w = 0; ds.samples.size() < target_size; ++w) {
    const std::uint64_t window_seed = derive_seed(cfg.seed, w);
    Rng rng(window_seed);
    const SymbolWindow win = synth_window(cfg, rng);

    std::vector<std::size_t> offsets(win.placements);
    std::uniform_int_distribution<std::size_t> off_dist(
        0, cfg.window_len - kPreambleLen);
    while (offsets.size() < vectors_per_window) offsets.push_back(off_dist(rng));

    for (std::size_t l : offsets) {
      if (ds.samples.size() == target_size) break;
      ds.samples.push_back({extract_features(win, l),
                            label_window(scheme, win, l), window_seed,
                            static_cast<std::uint32_t>(l)});
    }
  }
  return ds;
}

SymbolWindow regenerate_window(const ScenarioConfig& cfg, std::uint64_t window_id) {
  Rng rng(window_id);
  return synth_window(cfg, rng);
}

std::filesystem::path dataset_meta_path(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_extension(".meta.json");
  return p;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& csv_path) {
  std::ofstream out(csv_path);
  if (!out) throw std::runtime_error("save_dataset: cannot open " + csv_path.string());
  out << kCsvHeader << '\n';
  char buf[32];
  for (const LabeledSample& s : ds.samples) {
    for (double v : s.features.values) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << buf << ',';
    }
    out << label_name(ds.scheme, s.label) << ',' << s.window_id << ','
        << s.offset << '\n';
  }
  if (!out) throw std::runtime_error("save_dataset: write failed for " + csv_path.string());

  nlohmann::json meta = scenario_config_to_json(ds.cfg);
  meta["scheme"] = scheme_name(ds.scheme);
  meta["size"] = ds.samples.size();
  save_json_file(meta, dataset_meta_path(csv_path));
}

Dataset load_dataset(const std::filesystem::path& csv_path) {
  const nlohmann::json meta = load_json_file(dataset_meta_path(csv_path));
  Dataset ds;
  ds.cfg = scenario_config_from_json(meta);
  const auto scheme = scheme_from_name(meta.at("scheme").get<std::string>());
  if (!scheme)
    throw std::runtime_error("load_dataset: unknown scheme in metadata: " +
                             meta.at("scheme").get<std::string>());
  ds.scheme = *scheme;

  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("load_dataset: cannot open " + csv_path.string());
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw std::runtime_error("load_dataset: bad or missing header in " +
                             csv_path.string());

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    while (true) {
      const std::size_t comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != kNumFeatures + 3)
      throw std::runtime_error("load_dataset: feature-count mismatch at line " +
                               std::to_string(line_no) + " (" +
                               std::to_string(fields.size()) + " fields)");

    LabeledSample s;
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
      const auto f = fields[i];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), s.features.values[i]);
      if (res.ec != std::errc{} || res.ptr != f.data() + f.size())
        throw std::runtime_error("load_dataset: bad float at line " +
                                 std::to_string(line_no));
    }
    const auto label = label_from_name(ds.scheme, fields[kNumFeatures]);
    if (!label)
      throw std::runtime_error("load_dataset: unknown label token '" +
                               std::string(fields[kNumFeatures]) + "' at line " +
                               std::to_string(line_no));
    s.label = *label;
    const auto wid = fields[kNumFeatures + 1];
    auto res = std::from_chars(wid.data(), wid.data() + wid.size(), s.window_id);
    if (res.ec != std::errc{} || res.ptr != wid.data() + wid.size())
      throw std::runtime_error("load_dataset: bad window_id at line " +
                               std::to_string(line_no));
    const auto off = fields[kNumFeatures + 2];
    res = std::from_chars(off.data(), off.data() + off.size(), s.offset);
    if (res.ec != std::errc{} || res.ptr != off.data() + off.size() ||
        s.offset + kPreambleLen > ds.cfg.window_len)
      throw std::runtime_error("load_dataset: bad offset at line " +
                               std::to_string(line_no));
    ds.samples.push_back(s);
  }
  return ds;
}

}  // namespace pdw
