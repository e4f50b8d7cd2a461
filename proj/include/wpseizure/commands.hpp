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

// Command implementations behind the wpseizure executable. Each command
// validates its whole configuration first, computes everything in memory and
// only then writes its files, so a failed run leaves no partial output.

#pragma once

#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "wpseizure/report.hpp"

namespace wpseizure {

/// Process exit codes.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

/// Raw option values keyed by long option name, as given on the command line
/// or in a config file.
using Settings = std::map<std::string, std::string>;

inline const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "data-root", "case",         "k",           "wavelet",   "nodes",     "node-order",
      "C",         "gamma",        "grid-search", "class-weight", "normalize", "cv-mode",
      "metric-mode", "seed",       "out",         "sweep",     "candidates", "model",
      "sets"};
  return keys;
}

struct RunConfig {
  std::optional<std::filesystem::path> data_root;
  CaseName case_name = CaseName::AvsE;
  int k = 2;
  WaveletName wavelet = WaveletName::bior1_1;
  NodeSelection nodes = default_selection();
  double C = 10.0;
  std::optional<double> gamma;
  bool grid_search = false;
  bool class_weight = false;
  bool normalize = true;
  FoldMode cv_mode = FoldMode::subsegment_stratified;
  MetricMode metric_mode = MetricMode::pooled;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "results";
  SweepKind sweep = SweepKind::bases;
  /// Sweep candidates as given; empty means the built-in list.
  std::optional<std::string> candidates;
  std::optional<std::filesystem::path> model;
  std::vector<SetId> sets = {kAllSets.begin(), kAllSets.end()};

  RunOptions run_options() const {
    RunOptions o;
    o.k = k;
    o.wavelet = wavelet;
    o.selection = nodes;
    o.trainer.svm.C = C;
    o.trainer.svm.gamma = gamma;
    o.trainer.svm.class_weight = class_weight;
    o.trainer.svm.normalize = normalize;
    o.trainer.grid_search = grid_search;
    o.mode = cv_mode;
    o.metric = metric_mode;
    o.seed = seed;
    return o;
  }
};

namespace detail {

inline bool parse_bool(const std::string& key, const std::string& v) {
  std::string s = lower(v);
  if (s == "1" || s == "true" || s == "on" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "off" || s == "no") return false;
  throw InvalidArgument(key + ": expected true or false, got '" + v + "'");
}

inline double parse_positive(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !(out > 0.0) || !std::isfinite(out)) {
    throw InvalidArgument(key + ": expected a positive number, got '" + v + "'");
  }
  return out;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& v) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw InvalidArgument(key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

}  // namespace detail

/// Builds and validates a configuration. `grid_default` is the grid-search
/// setting used when the key is absent.
inline RunConfig make_config(const Settings& s, bool grid_default = false) {
  for (const auto& [key, value] : s) {
    if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end()) {
      throw InvalidArgument("unknown setting '" + key + "'");
    }
  }
  auto get = [&](const char* key) -> std::optional<std::string> {
    auto it = s.find(key);
    if (it == s.end()) return std::nullopt;
    return it->second;
  };
  RunConfig c;
  c.grid_search = grid_default;
  if (auto v = get("data-root"); v && !v->empty()) c.data_root = *v;
  if (auto v = get("case")) c.case_name = parse_case_name(*v);
  if (auto v = get("k")) {
    c.k = detail::parse_int<int>("k", *v);
    if (c.k != 2 && c.k != 5 && c.k != 10) {
      throw InvalidArgument("k: expected 2, 5 or 10, got '" + *v + "'");
    }
  }
  if (auto v = get("wavelet")) c.wavelet = parse_wavelet(*v);
  NodeOrder order = NodeOrder::natural;
  if (auto v = get("node-order")) order = parse_node_order(*v);
  if (auto v = get("nodes")) {
    c.nodes = parse_selection(*v, order);
  } else {
    for (auto& n : c.nodes.nodes) n.order = order;
  }
  if (auto v = get("C")) c.C = detail::parse_positive("C", *v);
  if (auto v = get("gamma")) {
    if (*v != "scale") c.gamma = detail::parse_positive("gamma", *v);
  }
  if (auto v = get("grid-search")) c.grid_search = detail::parse_bool("grid-search", *v);
  if (auto v = get("class-weight")) c.class_weight = detail::parse_bool("class-weight", *v);
  if (auto v = get("normalize")) c.normalize = detail::parse_bool("normalize", *v);
  if (auto v = get("cv-mode")) c.cv_mode = parse_fold_mode(*v);
  if (auto v = get("metric-mode")) c.metric_mode = parse_metric_mode(*v);
  if (auto v = get("seed")) c.seed = detail::parse_int<std::uint64_t>("seed", *v);
  if (auto v = get("out")) {
    if (v->empty()) throw InvalidArgument("out: empty output directory");
    c.output_dir = *v;
  }
  if (auto v = get("sweep")) c.sweep = parse_sweep_kind(*v);
  if (auto v = get("candidates")) c.candidates = *v;
  if (auto v = get("model")) c.model = *v;
  if (auto v = get("sets")) {
    c.sets.clear();
    for (char ch : *v) {
      if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) continue;
      const SetId id = parse_set_id(ch);
      if (std::find(c.sets.begin(), c.sets.end(), id) != c.sets.end()) {
        throw InvalidArgument("sets: set " + std::string(1, set_letter(id)) + " given twice");
      }
      c.sets.push_back(id);
    }
    if (c.sets.empty()) throw InvalidArgument("sets: no set given");
  }
  return c;
}

/// Parses a flat `key = value` file. Blank lines and lines starting with '#'
/// are ignored.
inline Settings parse_config_text(const std::string& text, const std::string& origin = "config") {
  Settings out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto trim = [](std::string t) {
    const auto b = t.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = t.find_last_not_of(" \t\r");
    return t.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end()) {
      throw InvalidArgument(origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Output staging

/// Files produced by a command, written together once computation is done.
class OutputSet {
 public:
  void add(const std::string& name, std::string content) { files_[name] = std::move(content); }
  const std::map<std::string, std::string>& files() const { return files_; }

  /// Writes every file through a temporary sibling and a rename.
  void commit(const std::filesystem::path& dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    for (const auto& [name, content] : files_) {
      const fs::path target = dir / name;
      const fs::path tmp = dir / ("." + name + ".tmp");
      {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        if (!out) throw Error("cannot write " + tmp.string());
      }
      fs::rename(tmp, target);
    }
  }

 private:
  std::map<std::string, std::string> files_;
};

inline std::string manifest(const std::string& command, const RunConfig& c,
                            const std::vector<std::pair<std::string, std::string>>& extra = {}) {
  std::ostringstream os;
  os << "tool = wpseizure " << kVersion << '\n';
  os << "command = " << command << '\n';
  os << "data-root = " << (c.data_root ? c.data_root->string() : "") << '\n';
  os << "case = " << to_string(c.case_name) << '\n';
  os << "k = " << c.k << '\n';
  os << "wavelet = " << to_string(c.wavelet) << '\n';
  os << "nodes = " << to_string(c.nodes) << '\n';
  os << "node-order = " << to_string(c.nodes.nodes.front().order) << '\n';
  os << "C = " << csv::exact(c.C) << '\n';
  os << "gamma = " << gamma_text(c.gamma) << '\n';
  os << "grid-search = " << (c.grid_search ? "true" : "false") << '\n';
  os << "class-weight = " << (c.class_weight ? "true" : "false") << '\n';
  os << "normalize = " << (c.normalize ? "true" : "false") << '\n';
  os << "cv-mode = " << to_string(c.cv_mode) << '\n';
  os << "metric-mode = " << to_string(c.metric_mode) << '\n';
  os << "seed = " << c.seed << '\n';
  for (const auto& [k, v] : extra) os << k << " = " << v << '\n';
  return os.str();
}

inline const char* kDataHelp =
    "no data root given. Pass --data-root DIR or set WPSEIZURE_DATA_ROOT. DIR must hold the "
    "five Bonn EEG sets (Z, O, N, F, S; 100 text files of 4097 samples each), unpacked from "
    "the archives published by the University of Bonn epileptology department, e.g. DIR/Z/Z001.txt. "
    "See the Data section of README.md; `wpseizure synth --out DIR` writes a synthetic stand-in.";

inline const std::filesystem::path& require_root(const RunConfig& c) {
  if (!c.data_root) throw InvalidArgument(kDataHelp);
  return *c.data_root;
}

inline SetMap load_sets(const std::filesystem::path& root, const std::vector<SetId>& ids) {
  SetMap sets;
  for (SetId s : ids) sets[s] = load_set(root, s);
  return sets;
}

inline std::vector<SetId> sets_of(const CaseSpec& spec) {
  std::vector<SetId> out = spec.negative_sets;
  out.insert(out.end(), spec.positive_sets.begin(), spec.positive_sets.end());
  return out;
}

/// Runs `body`, mapping errors to exit codes and printing them to `err`.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

// ---------------------------------------------------------------------------
// Commands

inline int cmd_validate(const Settings& s, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig c = make_config(s);
    const DatasetCheck check = validate_dataset(require_root(c));
    out << check.summary();
    return check.ok() ? kExitOk : kExitFailure;
  });
}

inline PipelineModel fit_pipeline(const CaseSpec& spec, FeatureBank& bank, const RunConfig& c) {
  const RunOptions opt = c.run_options();
  const auto data = bank.dataset(spec, opt.wavelet, opt.selection);
  const FittedModel fitted = fit_svm(data, opt.trainer, opt.seed);
  return {c.wavelet, c.nodes, fitted.chosen, fitted.model};
}

inline std::string model_text(const PipelineModel& m) {
  std::ostringstream os;
  write_model(os, m);
  return os.str();
}

inline int cmd_run(const Settings& s, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig c = make_config(s);
    const CaseSpec spec = case_spec(c.case_name);
    const SetMap sets = load_sets(require_root(c), sets_of(spec));
    FeatureBank bank(sets);
    const CaseResult r = run_case(spec, bank, c.run_options());
    const std::vector<CaseRow> rows = {case_row(r)};
    OutputSet files;
    files.add("metrics.csv", cases_csv(rows, true));
    files.add("model.txt", model_text(fit_pipeline(spec, bank, c)));
    files.add("manifest.txt", manifest("run", c));
    const std::string table = cases_text(rows, true);
    files.add("metrics.txt", table);
    files.commit(c.output_dir);
    out << table;
    return kExitOk;
  });
}

inline std::vector<NodeSelection> basis_candidates(const RunConfig& c) {
  if (!c.candidates) {
    auto list = reference_basis_candidates();
    for (auto& sel : list) {
      for (auto& n : sel.nodes) n.order = c.nodes.nodes.front().order;
    }
    return list;
  }
  std::vector<NodeSelection> out;
  std::string item;
  std::istringstream in(*c.candidates);
  while (std::getline(in, item, '|')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(parse_selection(item, c.nodes.nodes.front().order));
  }
  if (out.empty()) throw InvalidArgument("candidates: no node sets given");
  return out;
}

inline std::vector<WaveletName> wavelet_candidates(const RunConfig& c) {
  if (!c.candidates) return {kSweepWavelets.begin(), kSweepWavelets.end()};
  std::vector<WaveletName> out;
  std::string item;
  std::istringstream in(*c.candidates);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(parse_wavelet(item.substr(b, item.find_last_not_of(" \t") - b + 1)));
  }
  if (out.empty()) throw InvalidArgument("candidates: no wavelets given");
  return out;
}

/// Validates sweep candidates before any computation starts.
inline void check_candidates(const std::vector<NodeSelection>& bases) {
  std::set<std::string> seen;
  for (const auto& b : bases) {
    if (!seen.insert(to_string(b)).second) {
      throw InvalidArgument("duplicate sweep candidate " + to_string(b));
    }
  }
}

inline void check_candidates(const std::vector<WaveletName>& names) {
  std::set<WaveletName> seen;
  for (WaveletName w : names) {
    if (!seen.insert(w).second) throw InvalidArgument("duplicate sweep candidate " + to_string(w));
  }
}

inline int cmd_sweep(const Settings& s, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig c = make_config(s);
    const CaseSpec spec = case_spec(c.case_name);
    std::vector<NodeSelection> bases;
    std::vector<WaveletName> names;
    if (c.sweep == SweepKind::bases) {
      bases = basis_candidates(c);
      check_candidates(bases);
    } else {
      names = wavelet_candidates(c);
      check_candidates(names);
    }
    const SetMap sets = load_sets(require_root(c), sets_of(spec));
    FeatureBank bank(sets);
    const RunOptions opt = c.run_options();
    const SweepResult r = c.sweep == SweepKind::bases ? sweep_bases(bases, spec, bank, opt)
                                                      : sweep_wavelets(names, spec, bank, opt);
    OutputSet files;
    const std::string stem = "sweep_" + to_string(c.sweep);
    files.add(stem + ".csv", sweep_csv(r, c.sweep, spec.name, opt));
    const std::string table = sweep_text(r, c.sweep);
    files.add(stem + ".txt", table);
    files.add("manifest.txt", manifest("sweep", c, {{"sweep", to_string(c.sweep)}}));
    files.commit(c.output_dir);
    out << table;
    return kExitOk;
  });
}

/// Everything `reproduce` produces, kept in memory.
struct Reproduction {
  SweepResult bases;
  SweepResult wavelets;
  NodeSelection best_nodes;
  WaveletName best_wavelet = WaveletName::bior1_1;
  std::vector<CaseRow> cases;
  OutputSet files;
};

/// Two-stage adaptation followed by every case at k = 2, 5 and 10.
/// Stage one compares the reference bases on ABCD vs E with db4 at k = 2;
/// stage two compares wavelets with the winning bases; the winners are then
/// used for all cases.
inline Reproduction reproduce(const SetMap& sets, const RunConfig& c, std::ostream* progress) {
  Reproduction rep;
  FeatureBank bank(sets);
  const CaseSpec stage_case = case_spec(CaseName::ABCDvsE);

  RunOptions base = c.run_options();
  base.k = 2;
  base.wavelet = WaveletName::db4;
  const auto bases = basis_candidates(c);
  check_candidates(bases);
  if (progress) *progress << "stage 1: " << bases.size() << " node sets, db4, ABCDvsE, k=2\n";
  rep.bases = sweep_bases(bases, stage_case, bank, base);
  rep.best_nodes = bases[rep.bases.winner()];

  base.selection = rep.best_nodes;
  const std::vector<WaveletName> names(kSweepWavelets.begin(), kSweepWavelets.end());
  if (progress) {
    *progress << "stage 2: " << names.size() << " wavelets with " << to_string(rep.best_nodes)
              << '\n';
  }
  rep.wavelets = sweep_wavelets(names, stage_case, bank, base);
  rep.best_wavelet = names[rep.wavelets.winner()];

  RunConfig final_cfg = c;
  final_cfg.nodes = rep.best_nodes;
  final_cfg.wavelet = rep.best_wavelet;
  if (progress) {
    *progress << "stage 3: 7 cases x k in {2,5,10} with " << to_string(rep.best_wavelet) << ' '
              << to_string(rep.best_nodes) << '\n';
  }
  for (CaseName name : kAllCases) {
    for (int k : {2, 5, 10}) {
      final_cfg.k = k;
      rep.cases.push_back(case_row(run_case(case_spec(name), bank, final_cfg.run_options())));
    }
  }

  RunOptions bases_opt = base;
  bases_opt.selection = c.nodes;
  rep.files.add("sweep_bases.csv",
                sweep_csv(rep.bases, SweepKind::bases, stage_case.name, bases_opt));
  rep.files.add("sweep_wavelets.csv",
                sweep_csv(rep.wavelets, SweepKind::wavelets, stage_case.name, base));
  rep.files.add("cases.csv", cases_csv(rep.cases, true));
  std::string report;
  report += "Node-set comparison (ABCDvsE, db4, k=2)\n" + sweep_text(rep.bases, SweepKind::bases);
  report += "\nWavelet comparison (ABCDvsE, k=2, " + to_string(rep.best_nodes) + ")\n" +
            sweep_text(rep.wavelets, SweepKind::wavelets);
  report += "\nCases (" + to_string(rep.best_wavelet) + ", " + to_string(rep.best_nodes) + ")\n" +
            cases_text(rep.cases, true);
  rep.files.add("report.txt", report);
  rep.files.add("manifest.txt",
                manifest("reproduce", c,
                         {{"best-nodes", to_string(rep.best_nodes)},
                          {"best-wavelet", to_string(rep.best_wavelet)}}));
  return rep;
}

inline int cmd_reproduce(const Settings& s, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig c = make_config(s, /*grid_default=*/true);
    const SetMap sets = load_all_sets(require_root(c));
    Reproduction rep = reproduce(sets, c, &err);
    rep.files.commit(c.output_dir);
    out << rep.files.files().at("report.txt");
    return kExitOk;
  });
}

inline int cmd_train(const Settings& s, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig c = make_config(s);
    const CaseSpec spec = case_spec(c.case_name);
    const std::filesystem::path target = c.model ? *c.model : c.output_dir / "model.txt";
    const SetMap sets = load_sets(require_root(c), sets_of(spec));
    FeatureBank bank(sets);
    const PipelineModel m = fit_pipeline(spec, bank, c);
    OutputSet files;
    files.add(target.filename().string(), model_text(m));
    files.commit(target.has_parent_path() ? target.parent_path() : std::filesystem::path("."));
    out << "model with " << m.svm.support_vectors.size() << " support vectors written to "
        << target.string() << '\n';
    return kExitOk;
  });
}

inline int cmd_apply(const Settings& s, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig c = make_config(s);
    if (!c.model) throw InvalidArgument("apply needs --model FILE");
    const auto& root = require_root(c);
    std::ifstream in(*c.model, std::ios::binary);
    if (!in) throw LoadError("cannot open model file " + c.model->string());
    const PipelineModel m = read_model(in);
    const FilterBank fb = filter_bank(m.wavelet);
    std::string csv_text =
        csv::row({"set", "segment", "window", "decision_value", "predicted"});
    std::map<SetId, std::array<std::size_t, 2>> counts;
    for (SetId set : c.sets) {
      for (const Segment& seg : load_set(root, set)) {
        for (const SubSegment& sub : segment(seg)) {
          const FeatureVector fv = extract(sub, fb, m.selection);
          const double f = decision_value(m.svm, fv);
          const Label p = f > 0.0 ? Label::seizure : Label::non_seizure;
          ++counts[set][p == Label::seizure ? 1 : 0];
          csv_text += csv::row({std::string(1, set_letter(set)), std::to_string(sub.segment_index),
                                std::to_string(sub.window_index), csv::fixed(f, 6),
                                std::string(to_string(p))});
        }
      }
    }
    OutputSet files;
    files.add("predictions.csv", csv_text);
    files.commit(c.output_dir);
    std::vector<std::vector<std::string>> t = {{"set", "non_seizure", "seizure"}};
    for (const auto& [set, n] : counts) {
      t.push_back({std::string(1, set_letter(set)), std::to_string(n[0]), std::to_string(n[1])});
    }
    out << aligned(t);
    return kExitOk;
  });
}

inline int cmd_synth(const Settings& s, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig c = make_config(s);
    if (s.find("out") == s.end()) throw InvalidArgument("synth needs --out DIR");
    const SetMap sets = synth_bonn_dataset(c.seed);
    for (const auto& [set, segs] : sets) write_set(c.output_dir, set, segs);
    out << "wrote 5 synthetic sets (seed " << c.seed << ") to " << c.output_dir.string() << '\n';
    return kExitOk;
  });
}

}  // namespace wpseizure
