#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pdw/experiments.hpp"

namespace {

struct CliOptions {
  std::string scenario = "awgn";
  std::vector<double> snrs = {0.0, 3.0, 8.0};
  std::string scheme = "binary";
  std::vector<std::string> detectors = {"corr", "nn", "rf"};
  std::size_t size = 10000;
  pdw::ExperimentSpec spec;
};

void add_options(CLI::App& app, CliOptions& opt) {
  app.add_option("--scenario", opt.scenario, "Channel scenario")
      ->check(CLI::IsMember({"awgn", "interference"}))
      ->capture_default_str();
  app.add_option("--snr", opt.snrs, "SNR points in dB")->capture_default_str();
  app.add_option("--scheme", opt.scheme, "Label scheme")
      ->check(CLI::IsMember({"binary", "awgn6", "interf4"}))
      ->capture_default_str();
  app.add_option("--detector", opt.detectors, "Detectors to run")
      ->check(CLI::IsMember({"corr", "nn", "rf"}))
      ->capture_default_str();
  app.add_option("--size", opt.size, "Samples per dataset")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--seed-train", opt.spec.seed_train, "Training dataset seed")
      ->capture_default_str();
  app.add_option("--seed-test", opt.spec.seed_test, "Test dataset seed")
      ->capture_default_str();
  app.add_option("--out", opt.spec.out_dir, "Output directory")
      ->capture_default_str();
  app.add_option("--nn-lr", opt.spec.nn.learning_rate, "NN learning rate")
      ->capture_default_str();
  app.add_option("--nn-epochs", opt.spec.nn.epochs, "NN epoch limit")
      ->capture_default_str();
  app.add_option("--nn-batch", opt.spec.nn.batch_size, "NN mini-batch size")
      ->capture_default_str();
  app.add_option("--nn-seed", opt.spec.nn.seed, "NN init/shuffle seed")
      ->capture_default_str();
  app.add_option("--nn-val-fraction", opt.spec.nn.validation_fraction,
                 "NN validation split fraction")
      ->capture_default_str();
  app.add_option("--nn-patience", opt.spec.nn.patience,
                 "NN early-stopping patience (0 disables)")
      ->capture_default_str();
  app.add_option("--rf-trees", opt.spec.rf.num_trees, "Forest size")
      ->capture_default_str();
  app.add_option("--rf-features", opt.spec.rf.features_per_split,
                 "Features drawn per split")
      ->capture_default_str();
  app.add_option("--rf-min-ig", opt.spec.rf.min_info_gain,
                 "Growth stop: information gain floor (bits)")
      ->capture_default_str();
  app.add_option("--rf-seed", opt.spec.rf.seed, "Forest seed")
      ->capture_default_str();
  app.set_config("--config", "", "Plain-text key=value configuration file");
}

pdw::ExperimentSpec to_spec(const CliOptions& opt) {
  pdw::ExperimentSpec spec = opt.spec;
  spec.scenario = *pdw::scenario_from_name(opt.scenario);
  spec.scheme = *pdw::scheme_from_name(opt.scheme);
  spec.snrs_db = opt.snrs;
  spec.dataset_size = opt.size;
  spec.detectors.clear();
  for (const std::string& d : opt.detectors)
    spec.detectors.push_back(*pdw::detector_from_name(d));
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Packet-detection workbench: ALOHA/BPSK preamble detection with "
               "correlation, neural network and random forest detectors"};
  app.require_subcommand(1);

  CliOptions opt;
  add_options(app, opt);

  CLI::App* gen = app.add_subcommand("gen", "Generate train/test datasets");
  CLI::App* train =
      app.add_subcommand("train", "Train detectors on generated datasets");
  CLI::App* eval = app.add_subcommand("eval", "Evaluate trained detectors");

  std::string repro_id;
  CLI::App* repro = app.add_subcommand(
      "repro", "Reproduce a reference experiment (fig3, fig4, table2, table3)");
  repro->add_option("id", repro_id, "One of: fig3, fig4, table2, table3")
      ->required()
      ->check(CLI::IsMember(pdw::repro_ids()));

  // shared options live on the main app; let subcommands pass them up
  for (CLI::App* sub : {gen, train, eval, repro}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      pdw::run_gen(to_spec(opt), std::cout);
    } else if (train->parsed()) {
      pdw::run_train(to_spec(opt), std::cout);
    } else if (eval->parsed()) {
      pdw::run_eval(to_spec(opt), std::cout);
    } else if (repro->parsed()) {
      const pdw::ReproResult result = pdw::run_repro(repro_id, to_spec(opt), std::cout);
      pdw::print_repro_table(result, std::cout);
      return result.all_passed() ? 0 : 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
