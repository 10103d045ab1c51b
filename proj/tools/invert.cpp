// Command-line driver for the inversion experiments.
#include <cstdlib>
#include <exception>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lbinv/config.hpp"
#include "lbinv/errors.hpp"
#include "lbinv/experiments.hpp"

namespace {

constexpr int kUsageError = 2;

struct Flags {
  std::map<std::string, std::string> values;  // config key -> raw flag value
  std::vector<std::string> sets;
  std::string config_path;
};

void add_flag(CLI::App* cmd, Flags& flags, const std::string& name, const std::string& key,
              const std::string& help) {
  cmd->add_option_function<std::string>(
      name, [&flags, key](const std::string& v) { flags.values[key] = v; }, help);
}

void add_common(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--config", flags.config_path, "key=value settings file");
  cmd->add_option("--set", flags.sets, "override any setting, key=value (repeatable)");
  add_flag(cmd, flags, "--alpha", "alpha", "regularisation parameter");
  add_flag(cmd, flags, "--noise-std", "noise_std", "Gaussian noise standard deviation");
  add_flag(cmd, flags, "--seed", "seed", "64-bit seed");
  add_flag(cmd, flags, "--max-iters", "max_iters", "solver iteration cap");
  add_flag(cmd, flags, "--out-dir", "out_dir", "artifact directory");
  add_flag(cmd, flags, "--model", "model", "LBNN autoencoder archive to use instead of training");
  add_flag(cmd, flags, "--data-dir", "data_dir", "directory holding the MNIST IDX files");
}

lbinv::ExperimentConfig build_config(const Flags& flags) {
  lbinv::ExperimentConfig cfg;
  if (!flags.config_path.empty()) cfg = lbinv::ExperimentConfig::from_file(flags.config_path);
  for (const auto& s : flags.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw lbinv::ParameterError("--set expects key=value, got '" + s + "'");
    cfg.set(s.substr(0, eq), s.substr(eq + 1));
  }
  for (const auto& [k, v] : flags.values) cfg.set(k, v);
  if (!cfg.has("data_dir") && !std::getenv("LB_DATA_DIR")) cfg.set("data_dir", LBINV_DEFAULT_DATA_DIR);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lifted-Bregman network inversion experiments"};
  app.require_subcommand(1);

  Flags flags;
  std::map<CLI::App*, std::function<int(const lbinv::ExperimentConfig&)>> commands;
  auto sub = [&](const char* name, const char* help, auto fn) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_common(cmd, flags);
    commands[cmd] = fn;
    return cmd;
  };

  sub("circle", "TV-PDHG against Landweber on a disk phantom", lbinv::cmd_circle);
  sub("mnist-perceptron", "invert a dense MNIST encoder", lbinv::cmd_mnist_perceptron);
  sub("mnist-cnn", "invert a convolutional MNIST encoder", lbinv::cmd_mnist_cnn);
  sub("noise-sweep", "PSNR of inversion and decoding across noise levels", lbinv::cmd_noise_sweep);
  CLI::App* rate = sub("rate", "check the convergence-rate bound on a random ReLU layer", lbinv::cmd_rate);
  add_flag(rate, flags, "--c", "c", "constant c in (0, 1]");
  add_flag(rate, flags, "--deltas", "deltas", "noise grid, e.g. 1e-1:1e-4:geometric:7");
  CLI::App* train = sub("train", "train an MNIST autoencoder and save it", lbinv::cmd_train);
  add_flag(train, flags, "--architecture", "architecture", "dense or conv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    const lbinv::ExperimentConfig cfg = build_config(flags);
    for (const auto& [cmd, fn] : commands) {
      if (cmd->parsed()) return fn(cfg);
    }
  } catch (const lbinv::ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const lbinv::FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kUsageError;
}
