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

// Cross-validation harness, model selection and the basis / wavelet sweeps.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "wpseizure/common.hpp"
#include "wpseizure/dataio.hpp"
#include "wpseizure/features.hpp"
#include "wpseizure/svm.hpp"

namespace wpseizure {

// ---------------------------------------------------------------------------
// Fold plans

enum class FoldMode : std::uint8_t { subsegment_stratified, grouped_by_segment };

inline std::string to_string(FoldMode m) {
  return m == FoldMode::subsegment_stratified ? "subsegment_stratified" : "grouped_by_segment";
}

inline FoldMode parse_fold_mode(std::string_view s) {
  if (s == "subsegment_stratified" || s == "stratified") return FoldMode::subsegment_stratified;
  if (s == "grouped_by_segment" || s == "grouped") return FoldMode::grouped_by_segment;
  throw InvalidArgument("unknown cv mode '" + std::string(s) + "'");
}

/// What fold assignment needs to know about one item.
struct FoldKey {
  Label label = Label::non_seizure;
  /// Items sharing a group stay together in grouped mode.
  std::uint32_t group = 0;
};

struct FoldPlan {
  int k = 2;
  std::vector<int> assignment;
  std::uint64_t seed = 0;
  FoldMode mode = FoldMode::subsegment_stratified;

  std::vector<std::size_t> test_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      if (assignment[i] == fold) out.push_back(i);
    }
    return out;
  }
  std::vector<std::size_t> train_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      if (assignment[i] != fold) out.push_back(i);
    }
    return out;
  }

  friend bool operator==(const FoldPlan&, const FoldPlan&) = default;
};

inline std::uint32_t segment_group(SetId set, int segment_index) {
  return static_cast<std::uint32_t>(set) * 1000U + static_cast<std::uint32_t>(segment_index);
}

inline std::vector<FoldKey> fold_keys(std::span<const FeatureVector> data) {
  std::vector<FoldKey> keys;
  keys.reserve(data.size());
  for (const auto& fv : data) {
    if (!fv.label) throw InvalidArgument("fold assignment needs labeled data");
    keys.push_back({*fv.label, segment_group(fv.set, fv.segment_index)});
  }
  return keys;
}

/// Stratified k-fold assignment. Each class (or, in grouped mode, each
/// class's list of groups) is shuffled and dealt round-robin, continuing the
/// deal across classes so fold totals stay balanced too.
inline FoldPlan make_folds(std::span<const FoldKey> keys, int k, std::uint64_t seed,
                           FoldMode mode = FoldMode::subsegment_stratified) {
  if (k < 2) throw InvalidArgument("k must be at least 2");
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.mode = mode;
  plan.assignment.assign(keys.size(), -1);

  std::size_t offset = 0;
  for (Label label : {Label::non_seizure, Label::seizure}) {
    // Units are single items or whole groups; each unit is a list of indices.
    std::vector<std::vector<std::size_t>> units;
    if (mode == FoldMode::subsegment_stratified) {
      for (std::size_t i = 0; i < keys.size(); ++i) {
        if (keys[i].label == label) units.push_back({i});
      }
    } else {
      std::map<std::uint32_t, std::size_t> slot;
      for (std::size_t i = 0; i < keys.size(); ++i) {
        if (keys[i].label != label) continue;
        auto [it, fresh] = slot.emplace(keys[i].group, units.size());
        if (fresh) units.emplace_back();
        units[it->second].push_back(i);
      }
    }
    if (units.size() < static_cast<std::size_t>(k)) {
      throw InvalidArgument("class " + std::string(to_string(label)) + " has " +
                            std::to_string(units.size()) +
                            (mode == FoldMode::grouped_by_segment ? " segments" : " items") +
                            ", fewer than k = " + std::to_string(k));
    }
    detail::Rng rng(seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(label) + 1);
    rng.shuffle(units.begin(), units.end());
    for (std::size_t u = 0; u < units.size(); ++u) {
      const int fold = static_cast<int>((offset + u) % static_cast<std::size_t>(k));
      for (std::size_t i : units[u]) plan.assignment[i] = fold;
    }
    offset += units.size();
  }
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (plan.assignment[i] < 0) throw InvalidArgument("fold assignment left an item unassigned");
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Metrics

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }

  void add(Label truth, Label predicted) {
    if (truth == Label::seizure) {
      (predicted == Label::seizure ? tp : fn) += 1;
    } else {
      (predicted == Label::seizure ? fp : tn) += 1;
    }
  }

  Confusion& operator+=(const Confusion& o) {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
  }

  friend bool operator==(const Confusion&, const Confusion&) = default;
};

/// Seizure is the positive class.
struct Metrics {
  Confusion confusion;
  double ca = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
};

namespace detail {
inline double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? std::numeric_limits<double>::quiet_NaN()
                  : static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace detail

inline Metrics metrics_from(const Confusion& c) {
  return {c, detail::ratio(c.tp + c.tn, c.total()), detail::ratio(c.tp, c.tp + c.fn),
          detail::ratio(c.tn, c.tn + c.fp)};
}

enum class MetricMode : std::uint8_t { pooled, fold_averaged };

inline std::string to_string(MetricMode m) {
  return m == MetricMode::pooled ? "pooled" : "fold_averaged";
}

inline MetricMode parse_metric_mode(std::string_view s) {
  if (s == "pooled") return MetricMode::pooled;
  if (s == "fold_averaged" || s == "averaged") return MetricMode::fold_averaged;
  throw InvalidArgument("unknown metric mode '" + std::string(s) + "'");
}

struct CvOutcome {
  FoldPlan plan;
  std::vector<Confusion> per_fold;
  /// Prediction for every item, in dataset order.
  std::vector<Label> predictions;

  Confusion pooled() const {
    Confusion c;
    for (const auto& f : per_fold) c += f;
    return c;
  }

  Metrics metrics(MetricMode mode = MetricMode::pooled) const {
    const Confusion all = pooled();
    if (mode == MetricMode::pooled) return metrics_from(all);
    Metrics avg{all, 0.0, 0.0, 0.0};
    for (const auto& f : per_fold) {
      const Metrics m = metrics_from(f);
      avg.ca += m.ca;
      avg.sensitivity += m.sensitivity;
      avg.specificity += m.specificity;
    }
    const double k = static_cast<double>(per_fold.size());
    avg.ca /= k;
    avg.sensitivity /= k;
    avg.specificity /= k;
    return avg;
  }
};

/// Runs `trainer` on each fold's training part and scores the held-out part.
/// `trainer(train_span, fold)` must return a callable mapping a FeatureVector
/// to a Label; it only ever sees training items.
template <typename Trainer>
CvOutcome cross_validate(std::span<const FeatureVector> data, const FoldPlan& plan,
                         Trainer&& trainer) {
  if (plan.assignment.size() != data.size()) {
    throw InvalidArgument("fold plan does not match the dataset size");
  }
  CvOutcome out;
  out.plan = plan;
  out.predictions.assign(data.size(), Label::non_seizure);
  for (int fold = 0; fold < plan.k; ++fold) {
    std::vector<FeatureVector> train;
    for (std::size_t i : plan.train_indices(fold)) train.push_back(data[i]);
    auto predictor = trainer(std::span<const FeatureVector>(train), fold);
    Confusion c;
    for (std::size_t i : plan.test_indices(fold)) {
      const Label p = predictor(data[i]);
      out.predictions[i] = p;
      c.add(*data[i].label, p);
    }
    out.per_fold.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model selection

struct TrainerConfig {
  SvmParams svm;
  bool grid_search = false;
  std::vector<double> grid_C = {0.1, 1.0, 10.0, 100.0};
  /// nullopt stands for the scale rule.
  std::vector<std::optional<double>> grid_gamma = {0.01, 0.1, std::nullopt, 1.0};
  int inner_folds = 3;
};

inline std::string gamma_text(const std::optional<double>& g) {
  return g ? csv::exact(*g) : "scale";
}

struct FittedModel {
  SvmModel model;
  SvmParams chosen;
  double inner_ca = std::numeric_limits<double>::quiet_NaN();
};

/// Trains one SVM, selecting (C, gamma) by inner stratified CV on `data`
/// when grid search is enabled. Ties keep the earlier grid point.
inline FittedModel fit_svm(std::span<const FeatureVector> data, const TrainerConfig& cfg,
                           std::uint64_t seed) {
  FittedModel fitted;
  fitted.chosen = cfg.svm;
  if (cfg.grid_search) {
    if (cfg.grid_C.empty() || cfg.grid_gamma.empty()) throw InvalidArgument("empty grid");
    const auto keys = fold_keys(data);
    const FoldPlan inner = make_folds(keys, cfg.inner_folds, seed, FoldMode::subsegment_stratified);
    double best = -1.0;
    for (double c : cfg.grid_C) {
      for (const auto& g : cfg.grid_gamma) {
        SvmParams p = cfg.svm;
        p.C = c;
        p.gamma = g;
        const CvOutcome cv = cross_validate(data, inner, [&](std::span<const FeatureVector> t, int) {
          SvmModel m = train_detailed(t, p, seed).model;
          return [m = std::move(m)](const FeatureVector& x) { return predict(m, x); };
        });
        const double ca = cv.metrics().ca;
        if (ca > best) {
          best = ca;
          fitted.chosen = p;
        }
      }
    }
    fitted.inner_ca = best;
  }
  fitted.model = train(data, fitted.chosen, seed);
  return fitted;
}

// ---------------------------------------------------------------------------
// Feature extraction shared across runs

/// Per-set feature vectors for each (wavelet, selection), computed on demand.
class FeatureBank {
 public:
  explicit FeatureBank(const SetMap& sets) : sets_(&sets) {}

  /// Labeled features for `spec`, in build_dataset order.
  std::vector<FeatureVector> dataset(const CaseSpec& spec, WaveletName wavelet,
                                     const NodeSelection& sel) {
    check_case(spec);
    std::map<SetId, Label> labels;
    for (SetId s : spec.negative_sets) labels[s] = Label::non_seizure;
    for (SetId s : spec.positive_sets) labels[s] = Label::seizure;
    std::vector<FeatureVector> out;
    for (const auto& [set, label] : labels) {
      for (FeatureVector fv : set_features(set, wavelet, sel)) {
        fv.label = label;
        out.push_back(std::move(fv));
      }
    }
    return out;
  }

 private:
  const std::vector<FeatureVector>& set_features(SetId set, WaveletName wavelet,
                                                 const NodeSelection& sel) {
    const auto key = std::make_tuple(set, wavelet, to_string(sel));
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    auto sit = sets_->find(set);
    if (sit == sets_->end()) {
      throw InvalidArgument(std::string("set ") + set_letter(set) + " is not loaded");
    }
    std::vector<SubSegment> subs;
    std::vector<const Segment*> ordered;
    for (const Segment& seg : sit->second) ordered.push_back(&seg);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const Segment* a, const Segment* b) { return a->index < b->index; });
    for (const Segment* seg : ordered) {
      for (SubSegment& s : segment(*seg)) subs.push_back(s);
    }
    return cache_.emplace(key, extract_all(subs, wavelet, sel)).first->second;
  }

  const SetMap* sets_;
  std::map<std::tuple<SetId, WaveletName, std::string>, std::vector<FeatureVector>> cache_;
};

// ---------------------------------------------------------------------------
// Case runs and sweeps

struct RunOptions {
  int k = 2;
  WaveletName wavelet = WaveletName::bior1_1;
  NodeSelection selection = default_selection();
  TrainerConfig trainer;
  FoldMode mode = FoldMode::subsegment_stratified;
  MetricMode metric = MetricMode::pooled;
  std::uint64_t seed = 1;
};

struct CaseResult {
  CaseSpec spec;
  RunOptions options;
  CvOutcome cv;
  Metrics metrics;
  /// Hyperparameters used in each outer fold.
  std::vector<SvmParams> fold_params;
  /// Final model of the last fold, for inspection.
  std::optional<SvmModel> last_model;
};

inline std::uint64_t fold_seed(std::uint64_t seed, int fold) {
  return seed * 1315423911ULL + static_cast<std::uint64_t>(fold) + 7;
}

inline CaseResult run_case_on(std::span<const FeatureVector> data, const CaseSpec& spec,
                              const RunOptions& opt, const FoldPlan& plan) {
  CaseResult r;
  r.spec = spec;
  r.options = opt;
  r.cv = cross_validate(data, plan, [&](std::span<const FeatureVector> train, int fold) {
    FittedModel fitted = fit_svm(train, opt.trainer, fold_seed(opt.seed, fold));
    r.fold_params.push_back(fitted.chosen);
    r.last_model = fitted.model;
    return [m = std::move(fitted.model)](const FeatureVector& x) { return predict(m, x); };
  });
  r.metrics = r.cv.metrics(opt.metric);
  return r;
}

inline CaseResult run_case(const CaseSpec& spec, FeatureBank& bank, const RunOptions& opt) {
  const auto data = bank.dataset(spec, opt.wavelet, opt.selection);
  const auto keys = fold_keys(data);
  const FoldPlan plan = make_folds(keys, opt.k, opt.seed, opt.mode);
  return run_case_on(data, spec, opt, plan);
}

inline CaseResult run_case(const CaseSpec& spec, const SetMap& sets, const RunOptions& opt) {
  FeatureBank bank(sets);
  return run_case(spec, bank, opt);
}

struct SweepRow {
  std::string configuration;
  Metrics metrics;
  std::vector<SvmParams> fold_params;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  /// The single fold plan every row was evaluated on.
  FoldPlan plan;

  /// Index of the best row by CA; ties keep the earlier row.
  std::size_t winner() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].metrics.ca > rows[best].metrics.ca) best = i;
    }
    return best;
  }
};

namespace detail {

template <typename Config, typename Describe, typename Apply>
SweepResult sweep(std::span<const Config> candidates, const CaseSpec& spec, FeatureBank& bank,
                  const RunOptions& base, Describe describe, Apply apply) {
  if (candidates.empty()) throw InvalidArgument("sweep needs at least one candidate");
  std::set<std::string> seen;
  for (const auto& c : candidates) {
    if (!seen.insert(describe(c)).second) {
      throw InvalidArgument("duplicate sweep candidate " + describe(c));
    }
  }
  SweepResult out;
  bool planned = false;
  for (const auto& c : candidates) {
    RunOptions opt = base;
    apply(opt, c);
    const auto data = bank.dataset(spec, opt.wavelet, opt.selection);
    if (!planned) {
      const auto keys = fold_keys(data);
      out.plan = make_folds(keys, opt.k, opt.seed, opt.mode);
      planned = true;
    }
    CaseResult r = run_case_on(data, spec, opt, out.plan);
    out.rows.push_back({describe(c), r.metrics, std::move(r.fold_params)});
  }
  return out;
}

}  // namespace detail

inline SweepResult sweep_bases(std::span<const NodeSelection> candidates, const CaseSpec& spec,
                               FeatureBank& bank, const RunOptions& base) {
  for (const auto& c : candidates) check_selection(c);
  return detail::sweep<NodeSelection>(
      candidates, spec, bank, base, [](const NodeSelection& s) { return to_string(s); },
      [](RunOptions& o, const NodeSelection& s) { o.selection = s; });
}

inline SweepResult sweep_wavelets(std::span<const WaveletName> names, const CaseSpec& spec,
                                  FeatureBank& bank, const RunOptions& base) {
  return detail::sweep<WaveletName>(
      names, spec, bank, base, [](WaveletName w) { return to_string(w); },
      [](RunOptions& o, WaveletName w) { o.wavelet = w; });
}

/// The six basis candidates compared for ABCD vs E with db4.
inline std::vector<NodeSelection> reference_basis_candidates() {
  return {parse_selection("(5,1)(4,1)(4,2)"),      parse_selection("(5,1)(4,1)(4,2)(4,3)"),
          parse_selection("(5,1)(4,1)(3,1)"),      parse_selection("(5,0)(5,1)(4,1)(4,2)"),
          parse_selection("(4,1)(4,2)(4,3)"),      parse_selection("(5,0)(5,1)(4,1)")};
}

}  // namespace wpseizure
