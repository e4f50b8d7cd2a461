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

// STD/RMS features of selected wavelet packet nodes, and z-score scaling.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <vector>

#include "wpseizure/common.hpp"
#include "wpseizure/csv.hpp"
#include "wpseizure/dataio.hpp"
#include "wpseizure/filters.hpp"
#include "wpseizure/wpt.hpp"

namespace wpseizure {

/// Population standard deviation.
inline double stddev(std::span<const double> v) {
  if (v.empty()) throw InvalidArgument("stddev of an empty vector");
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

inline double rms(std::span<const double> v) {
  if (v.empty()) throw InvalidArgument("rms of an empty vector");
  double ss = 0.0;
  for (double x : v) ss += x * x;
  return std::sqrt(ss / static_cast<double>(v.size()));
}

struct NodeSelection {
  std::vector<NodeId> nodes;

  friend bool operator==(const NodeSelection&, const NodeSelection&) = default;
};

/// (5,1), (4,1), (4,2) in natural order.
inline NodeSelection default_selection() {
  return {{{5, 1, NodeOrder::natural}, {4, 1, NodeOrder::natural}, {4, 2, NodeOrder::natural}}};
}

inline void check_selection(const NodeSelection& sel) {
  if (sel.nodes.empty()) throw InvalidArgument("node selection is empty");
  for (std::size_t i = 0; i < sel.nodes.size(); ++i) {
    check_node(sel.nodes[i], kMaxLevel);
    for (std::size_t j = 0; j < i; ++j) {
      if (to_natural_order(sel.nodes[i]) == to_natural_order(sel.nodes[j])) {
        throw InvalidArgument("node selection lists " + to_string(sel.nodes[i]) + " twice");
      }
    }
  }
}

inline std::string to_string(const NodeSelection& sel) {
  std::string out;
  for (const NodeId& n : sel.nodes) out += to_string(n);
  return out;
}

/// Parses "(5,1)(4,1)(4,2)", "(5,1),(4,1)" or "5,1;4,1;4,2".
inline NodeSelection parse_selection(const std::string& text,
                                     NodeOrder order = NodeOrder::natural) {
  static const std::regex parenthesized(R"(\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\))");
  static const std::regex bare(R"((-?\d+)\s*,\s*(-?\d+))");
  const bool with_parens = text.find('(') != std::string::npos;
  const std::regex& re = with_parens ? parenthesized : bare;
  // Anything left between matches must be separators; bare pairs need ';'.
  const std::string separators = with_parens ? " ,;\t" : " ;\t";

  NodeSelection sel;
  std::string leftover;
  std::size_t last = 0;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator();
       ++it) {
    const std::string gap = text.substr(last, static_cast<std::size_t>(it->position()) - last);
    if (!sel.nodes.empty() && !with_parens && gap.find(';') == std::string::npos) {
      throw InvalidArgument("cannot parse node list '" + text + "'");
    }
    leftover += gap;
    last = static_cast<std::size_t>(it->position() + it->length());
    sel.nodes.push_back({std::stoi((*it)[1]), std::stoi((*it)[2]), order});
  }
  leftover += text.substr(last);
  if (leftover.find_first_not_of(separators) != std::string::npos) {
    throw InvalidArgument("cannot parse node list '" + text + "'");
  }
  check_selection(sel);
  return sel;
}

struct FeatureVector {
  std::vector<double> values;
  std::optional<Label> label;
  SetId set = SetId::A;
  int segment_index = 1;
  int window_index = 1;
};

/// Column names, node-major with STD before RMS.
inline std::vector<std::string> feature_names(const NodeSelection& sel) {
  std::vector<std::string> names;
  for (const NodeId& n : sel.nodes) {
    const std::string base = "n" + std::to_string(n.level) + "_" + std::to_string(n.index) +
                             (n.order == NodeOrder::frequency ? "f" : "");
    names.push_back(base + "_std");
    names.push_back(base + "_rms");
  }
  return names;
}

inline FeatureVector extract(const SubSegment& sub, const FilterBank& fb,
                             const NodeSelection& sel) {
  check_selection(sel);
  int depth = 1;
  for (const NodeId& n : sel.nodes) depth = std::max(depth, n.level);
  const WptTree tree = wpt_decompose(sub.samples, fb, depth);
  FeatureVector fv;
  fv.values.reserve(2 * sel.nodes.size());
  for (const NodeId& n : sel.nodes) {
    const auto c = tree.node(n);
    fv.values.push_back(stddev(c));
    fv.values.push_back(rms(c));
  }
  fv.label = sub.label;
  fv.set = sub.set;
  fv.segment_index = sub.segment_index;
  fv.window_index = sub.window_index;
  return fv;
}

inline FeatureVector extract(const SubSegment& sub, WaveletName wavelet,
                             const NodeSelection& sel) {
  return extract(sub, filter_bank(wavelet), sel);
}

inline std::vector<FeatureVector> extract_all(std::span<const SubSegment> subs,
                                              WaveletName wavelet, const NodeSelection& sel) {
  const FilterBank fb = filter_bank(wavelet);
  std::vector<FeatureVector> out;
  out.reserve(subs.size());
  for (const SubSegment& s : subs) out.push_back(extract(s, fb, sel));
  return out;
}

// ---------------------------------------------------------------------------

/// Per-dimension z-scoring. A zero-variance dimension maps to 0.
struct Normalizer {
  std::vector<double> mean;
  std::vector<double> stdev;

  std::size_t dimension() const { return mean.size(); }

  std::vector<double> apply(std::span<const double> x) const {
    if (x.size() != mean.size()) {
      throw InvalidArgument("normalizer expects dimension " + std::to_string(mean.size()) +
                            ", got " + std::to_string(x.size()));
    }
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      out[i] = stdev[i] > 0.0 ? (x[i] - mean[i]) / stdev[i] : 0.0;
    }
    return out;
  }

  FeatureVector apply(const FeatureVector& fv) const {
    FeatureVector out = fv;
    out.values = apply(std::span<const double>(fv.values));
    return out;
  }

  friend bool operator==(const Normalizer&, const Normalizer&) = default;
};

inline Normalizer identity_normalizer(std::size_t dimension) {
  return {std::vector<double>(dimension, 0.0), std::vector<double>(dimension, 1.0)};
}

inline Normalizer normalizer_fit(std::span<const FeatureVector> train) {
  if (train.empty()) throw InvalidArgument("cannot fit a normalizer on an empty set");
  const std::size_t d = train.front().values.size();
  Normalizer n{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (const auto& fv : train) {
    if (fv.values.size() != d) throw InvalidArgument("feature vectors differ in dimension");
    for (std::size_t i = 0; i < d; ++i) n.mean[i] += fv.values[i];
  }
  const double count = static_cast<double>(train.size());
  for (double& m : n.mean) m /= count;
  for (const auto& fv : train) {
    for (std::size_t i = 0; i < d; ++i) {
      const double c = fv.values[i] - n.mean[i];
      n.stdev[i] += c * c;
    }
  }
  for (double& s : n.stdev) s = std::sqrt(s / count);
  return n;
}

inline FeatureVector normalizer_apply(const Normalizer& n, const FeatureVector& fv) {
  return n.apply(fv);
}

/// CSV with a header row of feature names, provenance columns and the label.
inline std::string features_csv(std::span<const FeatureVector> rows, const NodeSelection& sel) {
  std::vector<std::string> header = {"set", "segment", "window"};
  for (auto& n : feature_names(sel)) header.push_back(n);
  header.push_back("label");
  std::string out = csv::row(header);
  for (const auto& fv : rows) {
    std::vector<std::string> f = {std::string(1, set_letter(fv.set)),
                                  std::to_string(fv.segment_index),
                                  std::to_string(fv.window_index)};
    for (double v : fv.values) f.push_back(csv::exact(v));
    f.push_back(fv.label ? std::string(to_string(*fv.label)) : "");
    out += csv::row(f);
  }
  return out;
}

}  // namespace wpseizure
