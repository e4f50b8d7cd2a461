// Copyright 2026 The wpseizure Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// wpseizure: EEG seizure classification with wavelet packet features and an
// RBF support vector machine.

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "wpseizure/commands.hpp"

namespace {

using wpseizure::Settings;

struct Invocation {
  Settings flags;
  std::string config_path;
};

void add_value(CLI::App* sub, Invocation& inv, const std::string& names, const std::string& key,
               const std::string& help) {
  sub->add_option_function<std::string>(
      names, [&inv, key](const std::string& v) { inv.flags[key] = v; }, help);
}

void add_switch(CLI::App* sub, Invocation& inv, const std::string& names, const std::string& key,
                const std::string& value, const std::string& help) {
  sub->add_flag_callback(names, [&inv, key, value] { inv.flags[key] = value; }, help);
}

void add_common(CLI::App* sub, Invocation& inv) {
  sub->add_option("--config", inv.config_path, "key = value settings file");
  add_value(sub, inv, "--data-root", "data-root",
            "directory holding the five Bonn sets (default: $WPSEIZURE_DATA_ROOT)");
  add_value(sub, inv, "--out,--output-dir", "out", "output directory (default: results)");
  add_value(sub, inv, "--seed", "seed", "seed for fold assignment (default: 1)");
}

void add_pipeline(CLI::App* sub, Invocation& inv) {
  add_value(sub, inv, "--case", "case", "AvsE, BvsE, CvsE, DvsE, ABvsE, CDvsE or ABCDvsE");
  add_value(sub, inv, "--k", "k", "number of folds: 2, 5 or 10");
  add_value(sub, inv, "--wavelet", "wavelet", "db2, db4, db6, sym4, bior1.1, bior2.2, bior2.4, rbio2.2");
  add_value(sub, inv, "--nodes", "nodes", "packet nodes, e.g. \"(5,1)(4,1)(4,2)\"");
  add_value(sub, inv, "--node-order", "node-order", "natural or frequency indexing of --nodes");
  add_value(sub, inv, "--C", "C", "SVM box constraint (default: 10)");
  add_value(sub, inv, "--gamma", "gamma", "RBF width, a number or 'scale' (default: scale)");
  add_switch(sub, inv, "--grid-search", "grid-search", "true", "select C and gamma by inner 3-fold CV");
  add_switch(sub, inv, "--no-grid-search", "grid-search", "false", "use --C and --gamma as given");
  add_switch(sub, inv, "--class-weight", "class-weight", "true", "scale C of the seizure class by n-/n+");
  add_switch(sub, inv, "--no-normalize", "normalize", "false", "skip z-scoring of features");
  add_value(sub, inv, "--cv-mode", "cv-mode", "subsegment_stratified or grouped_by_segment");
  add_value(sub, inv, "--metric-mode", "metric-mode", "pooled or fold_averaged");
}

/// Defaults < environment < config file < flags.
int dispatch(const Invocation& inv,
             const std::function<int(const Settings&, std::ostream&, std::ostream&)>& cmd) {
  Settings merged;
  if (const char* env = std::getenv("WPSEIZURE_DATA_ROOT"); env && *env) merged["data-root"] = env;
  if (!inv.config_path.empty()) {
    std::ifstream in(inv.config_path, std::ios::binary);
    if (!in) {
      std::cerr << "error: cannot open config file " << inv.config_path << '\n';
      return wpseizure::kExitUsage;
    }
    std::ostringstream text;
    text << in.rdbuf();
    try {
      for (auto& [k, v] : wpseizure::parse_config_text(text.str(), inv.config_path)) merged[k] = v;
    } catch (const wpseizure::InvalidArgument& e) {
      std::cerr << "error: " << e.what() << '\n';
      return wpseizure::kExitUsage;
    }
  }
  for (const auto& [k, v] : inv.flags) merged[k] = v;
  return cmd(merged, std::cout, std::cerr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wavelet-packet and SVM seizure classification for the Bonn EEG sets"};
  app.set_version_flag("--version", std::string(wpseizure::kVersion));
  app.require_subcommand(1, 1);
  Invocation inv;

  auto* validate = app.add_subcommand("validate", "check that all five sets are complete");
  add_common(validate, inv);

  auto* run = app.add_subcommand("run", "cross-validate one case and write metrics and a model");
  add_common(run, inv);
  add_pipeline(run, inv);

  auto* sweep = app.add_subcommand("sweep", "compare node sets or wavelets on one case");
  add_common(sweep, inv);
  add_pipeline(sweep, inv);
  sweep->add_option_function<std::string>(
      "kind", [&inv](const std::string& v) { inv.flags["sweep"] = v; }, "bases or wavelets");
  add_value(sweep, inv, "--candidates", "candidates",
            "node sets separated by '|', or wavelets separated by ','");

  auto* reproduce = app.add_subcommand(
      "reproduce", "node-set sweep, wavelet sweep, then every case at k = 2, 5, 10");
  add_common(reproduce, inv);
  add_pipeline(reproduce, inv);

  auto* train = app.add_subcommand("train", "train one model on a whole case");
  add_common(train, inv);
  add_pipeline(train, inv);
  add_value(train, inv, "--model", "model", "model file to write (default: OUT/model.txt)");

  auto* apply = app.add_subcommand("apply", "classify every sub-segment of the given sets");
  add_common(apply, inv);
  add_value(apply, inv, "--model", "model", "model file written by train or run");
  add_value(apply, inv, "--sets", "sets", "set letters, e.g. AE (default: all)");

  auto* synth = app.add_subcommand("synth", "write a synthetic dataset in the Bonn layout");
  add_value(synth, inv, "--out,--output-dir", "out", "output directory");
  add_value(synth, inv, "--seed", "seed", "generator seed (default: 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return wpseizure::kExitUsage;
  }

  if (*validate) return dispatch(inv, wpseizure::cmd_validate);
  if (*run) return dispatch(inv, wpseizure::cmd_run);
  if (*sweep) return dispatch(inv, wpseizure::cmd_sweep);
  if (*reproduce) return dispatch(inv, wpseizure::cmd_reproduce);
  if (*train) return dispatch(inv, wpseizure::cmd_train);
  if (*apply) return dispatch(inv, wpseizure::cmd_apply);
  return dispatch(inv, wpseizure::cmd_synth);
}
