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

// Result tables, published reference values and the pipeline model file.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "wpseizure/csv.hpp"
#include "wpseizure/experiments.hpp"

namespace wpseizure {

// ---------------------------------------------------------------------------
// Published reference values, in percent.

struct ReferenceCell {
  CaseName name;
  int k;
  double ca;
  double sensitivity;
  double specificity;
};

// CA, sensitivity and specificity per case and fold count.
inline constexpr std::array<ReferenceCell, 21> kReferenceTable3 = {{
    {CaseName::AvsE, 2, 99.64, 99.70, 100.0},    {CaseName::AvsE, 5, 99.64, 99.64, 100.0},
    {CaseName::AvsE, 10, 99.64, 99.64, 100.0},   {CaseName::BvsE, 2, 98.41, 98.47, 99.94},
    {CaseName::BvsE, 5, 98.38, 98.00, 99.94},    {CaseName::BvsE, 10, 98.44, 98.05, 99.94},
    {CaseName::CvsE, 2, 98.00, 98.05, 99.29},    {CaseName::CvsE, 5, 98.14, 98.29, 98.64},
    {CaseName::CvsE, 10, 98.14, 98.17, 98.58},   {CaseName::DvsE, 2, 94.86, 97.74, 95.18},
    {CaseName::DvsE, 5, 95.06, 97.69, 94.72},    {CaseName::DvsE, 10, 95.15, 97.42, 94.89},
    {CaseName::ABvsE, 2, 98.83, 99.37, 99.82},   {CaseName::ABvsE, 5, 98.96, 98.91, 99.80},
    {CaseName::ABvsE, 10, 98.93, 98.86, 99.74},  {CaseName::CDvsE, 2, 96.04, 98.29, 96.23},
    {CaseName::CDvsE, 5, 96.41, 98.02, 96.38},   {CaseName::CDvsE, 10, 96.48, 97.94, 96.35},
    {CaseName::ABCDvsE, 2, 97.48, 98.14, 97.48}, {CaseName::ABCDvsE, 5, 97.63, 98.24, 97.47},
    {CaseName::ABCDvsE, 10, 97.85, 98.19, 97.58},
}};

inline std::optional<ReferenceCell> reference_cell(CaseName name, int k) {
  for (const auto& c : kReferenceTable3) {
    if (c.name == name && c.k == k) return c;
  }
  return std::nullopt;
}

struct ReferenceBasis {
  const char* nodes;
  double ca;
};

// Basis comparison for ABCD vs E, db4, 2-fold.
inline constexpr std::array<ReferenceBasis, 6> kReferenceTable2 = {{
    {"(5,1)(4,1)(4,2)", 93.5},
    {"(5,1)(4,1)(4,2)(4,3)", 90.0},
    {"(5,1)(4,1)(3,1)", 89.0},
    {"(5,0)(5,1)(4,1)(4,2)", 89.0},
    {"(4,1)(4,2)(4,3)", 91.0},
    {"(5,0)(5,1)(4,1)", 91.0},
}};

inline std::optional<double> reference_basis_ca(const std::string& nodes) {
  for (const auto& b : kReferenceTable2) {
    if (nodes == b.nodes) return b.ca;
  }
  return std::nullopt;
}

/// The wavelet reported best in the wavelet comparison.
inline constexpr WaveletName kReferenceBestWavelet = WaveletName::bior1_1;

// ---------------------------------------------------------------------------
// Provenance carried by every result row.

struct Provenance {
  std::uint64_t seed = 1;
  std::string C;
  std::string gamma;
  bool grid_search = false;
  FoldMode mode = FoldMode::subsegment_stratified;
  MetricMode metric = MetricMode::pooled;
  std::string wavelet;
  std::string nodes;
};

inline Provenance provenance_of(const RunOptions& opt, const std::vector<SvmParams>& per_fold) {
  Provenance p;
  p.seed = opt.seed;
  p.grid_search = opt.trainer.grid_search;
  if (opt.trainer.grid_search) {
    std::string cs;
    std::string gs;
    for (std::size_t i = 0; i < per_fold.size(); ++i) {
      if (i) {
        cs += ';';
        gs += ';';
      }
      cs += csv::exact(per_fold[i].C);
      gs += gamma_text(per_fold[i].gamma);
    }
    p.C = cs;
    p.gamma = gs;
  } else {
    p.C = csv::exact(opt.trainer.svm.C);
    p.gamma = gamma_text(opt.trainer.svm.gamma);
  }
  p.mode = opt.mode;
  p.metric = opt.metric;
  p.wavelet = to_string(opt.wavelet);
  p.nodes = to_string(opt.selection);
  return p;
}

inline std::vector<std::string> provenance_header() {
  return {"seed", "C", "gamma", "grid_search", "cv_mode", "metric_mode", "wavelet", "nodes"};
}

inline std::vector<std::string> provenance_fields(const Provenance& p) {
  return {std::to_string(p.seed), p.C,           p.gamma,   p.grid_search ? "on" : "off",
          to_string(p.mode),      to_string(p.metric), p.wavelet, p.nodes};
}

/// Percent with two decimals, or "nan".
inline std::string percent(double fraction) {
  if (std::isnan(fraction)) return "nan";
  return csv::fixed(100.0 * fraction, 2);
}

inline std::string delta(double fraction, std::optional<double> reference_percent) {
  if (!reference_percent || std::isnan(fraction)) return "";
  return csv::fixed(100.0 * fraction - *reference_percent, 2);
}

// ---------------------------------------------------------------------------
// Case results, one row per (case, k)

struct CaseRow {
  std::string case_name;
  int k = 2;
  Metrics metrics;
  Provenance provenance;
};

inline CaseRow case_row(const CaseResult& r) {
  return {r.spec.name, r.options.k, r.metrics, provenance_of(r.options, r.fold_params)};
}

inline std::string cases_csv(const std::vector<CaseRow>& rows, bool with_reference) {
  std::vector<std::string> header = {"case", "k", "tp", "fp", "tn", "fn", "ca", "sensitivity",
                                     "specificity"};
  if (with_reference) {
    for (const char* h : {"reference_ca", "reference_sensitivity", "reference_specificity", "delta_ca",
                          "delta_sensitivity", "delta_specificity"}) {
      header.push_back(h);
    }
  }
  for (auto& h : provenance_header()) header.push_back(h);
  std::string out = csv::row(header);
  for (const auto& r : rows) {
    const auto& c = r.metrics.confusion;
    std::vector<std::string> f = {r.case_name,          std::to_string(r.k),
                                  std::to_string(c.tp), std::to_string(c.fp),
                                  std::to_string(c.tn), std::to_string(c.fn),
                                  percent(r.metrics.ca), percent(r.metrics.sensitivity),
                                  percent(r.metrics.specificity)};
    if (with_reference) {
      std::optional<ReferenceCell> ref;
      for (CaseName n : kAllCases) {
        if (to_string(n) == r.case_name) ref = reference_cell(n, r.k);
      }
      if (ref) {
        f.push_back(csv::fixed(ref->ca, 2));
        f.push_back(csv::fixed(ref->sensitivity, 2));
        f.push_back(csv::fixed(ref->specificity, 2));
        f.push_back(delta(r.metrics.ca, ref->ca));
        f.push_back(delta(r.metrics.sensitivity, ref->sensitivity));
        f.push_back(delta(r.metrics.specificity, ref->specificity));
      } else {
        f.insert(f.end(), 6, "");
      }
    }
    for (auto& p : provenance_fields(r.provenance)) f.push_back(p);
    out += csv::row(f);
  }
  return out;
}

/// Left-aligned plain-text table.
inline std::string aligned(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    if (width.size() < r.size()) width.resize(r.size(), 0);
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  std::string out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      line += r[i];
      if (i + 1 < r.size()) line += std::string(width[i] - r[i].size() + 2, ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + '\n';
  }
  return out;
}

inline std::string cases_text(const std::vector<CaseRow>& rows, bool with_reference) {
  std::vector<std::vector<std::string>> t;
  std::vector<std::string> head = {"case", "k", "CA%", "Sens%", "Spec%"};
  if (with_reference) {
    for (const char* h : {"ref CA%", "dCA", "dSens", "dSpec"}) head.push_back(h);
  }
  t.push_back(head);
  for (const auto& r : rows) {
    std::vector<std::string> line = {r.case_name, std::to_string(r.k), percent(r.metrics.ca),
                                     percent(r.metrics.sensitivity),
                                     percent(r.metrics.specificity)};
    if (with_reference) {
      std::optional<ReferenceCell> ref;
      for (CaseName n : kAllCases) {
        if (to_string(n) == r.case_name) ref = reference_cell(n, r.k);
      }
      if (ref) {
        line.push_back(csv::fixed(ref->ca, 2));
        line.push_back(delta(r.metrics.ca, ref->ca));
        line.push_back(delta(r.metrics.sensitivity, ref->sensitivity));
        line.push_back(delta(r.metrics.specificity, ref->specificity));
      }
    }
    t.push_back(std::move(line));
  }
  return aligned(t);
}

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepKind : std::uint8_t { bases, wavelets };

inline std::string to_string(SweepKind k) { return k == SweepKind::bases ? "bases" : "wavelets"; }

inline SweepKind parse_sweep_kind(std::string_view s) {
  if (s == "bases") return SweepKind::bases;
  if (s == "wavelets") return SweepKind::wavelets;
  throw InvalidArgument("unknown sweep '" + std::string(s) + "' (expected bases or wavelets)");
}

/// 1-based competition ranks by CA (equal CA shares a rank).
inline std::vector<int> ranks(const SweepResult& s) {
  std::vector<int> out(s.rows.size(), 1);
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    for (const auto& other : s.rows) {
      if (other.metrics.ca > s.rows[i].metrics.ca) ++out[i];
    }
  }
  return out;
}

inline std::string sweep_csv(const SweepResult& s, SweepKind kind, const std::string& case_name,
                             const RunOptions& base) {
  std::vector<std::string> header = {kind == SweepKind::bases ? "nodes" : "wavelet_candidate",
                                     "case", "k", "ca", "sensitivity", "specificity", "rank"};
  if (kind == SweepKind::bases) {
    header.push_back("reference_ca");
    header.push_back("delta_ca");
  }
  for (auto& h : provenance_header()) header.push_back(h);
  std::string out = csv::row(header);
  const auto r = ranks(s);
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    const auto& row = s.rows[i];
    RunOptions opt = base;
    if (kind == SweepKind::bases) {
      opt.selection = parse_selection(row.configuration, base.selection.nodes.front().order);
    } else {
      opt.wavelet = parse_wavelet(row.configuration);
    }
    std::vector<std::string> f = {row.configuration, case_name, std::to_string(base.k),
                                  percent(row.metrics.ca), percent(row.metrics.sensitivity),
                                  percent(row.metrics.specificity), std::to_string(r[i])};
    if (kind == SweepKind::bases) {
      const auto ref = reference_basis_ca(row.configuration);
      f.push_back(ref ? csv::fixed(*ref, 2) : "");
      f.push_back(delta(row.metrics.ca, ref));
    }
    for (auto& p : provenance_fields(provenance_of(opt, row.fold_params))) f.push_back(p);
    out += csv::row(f);
  }
  return out;
}

inline std::string sweep_text(const SweepResult& s, SweepKind kind) {
  std::vector<std::vector<std::string>> t;
  t.push_back({kind == SweepKind::bases ? "nodes" : "wavelet", "CA%", "Sens%", "Spec%", "rank"});
  const auto r = ranks(s);
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    const auto& row = s.rows[i];
    t.push_back({row.configuration, percent(row.metrics.ca), percent(row.metrics.sensitivity),
                 percent(row.metrics.specificity), std::to_string(r[i])});
  }
  std::string out = aligned(t);
  if (!s.rows.empty()) {
    const auto& w = s.rows[s.winner()];
    out += "winner: " + w.configuration + " (CA " + percent(w.metrics.ca) + "%)\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline model file

inline constexpr std::string_view kModelHeader = "wpseizure-model v1";

struct PipelineModel {
  WaveletName wavelet = WaveletName::bior1_1;
  NodeSelection selection = default_selection();
  SvmParams params;
  SvmModel svm;
};

inline void write_model(std::ostream& os, const PipelineModel& m) {
  os << kModelHeader << '\n';
  os << "wavelet " << to_string(m.wavelet) << '\n';
  os << "node_order " << to_string(m.selection.nodes.front().order) << '\n';
  os << "nodes";
  for (const auto& n : m.selection.nodes) os << ' ' << n.level << ',' << n.index;
  os << '\n';
  os << "C " << csv::exact(m.params.C) << '\n';
  os << "gamma_rule " << gamma_text(m.params.gamma) << '\n';
  os << "tol " << csv::exact(m.params.tol) << '\n';
  os << "normalize " << (m.params.normalize ? 1 : 0) << '\n';
  os << "class_weight " << (m.params.class_weight ? 1 : 0) << '\n';
  write_svm(os, m.svm);
}

inline PipelineModel read_model(std::istream& is) {
  std::string header;
  std::getline(is, header);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header != kModelHeader) {
    throw LoadError("not a model file (expected header '" + std::string(kModelHeader) + "')");
  }
  PipelineModel m;
  detail::expect_key(is, "wavelet");
  m.wavelet = parse_wavelet(detail::read_value<std::string>(is, "wavelet"));
  detail::expect_key(is, "node_order");
  const NodeOrder order = parse_node_order(detail::read_value<std::string>(is, "node order"));
  detail::expect_key(is, "nodes");
  std::string line;
  std::getline(is, line);
  std::istringstream nodes(line);
  m.selection.nodes.clear();
  std::string pair;
  while (nodes >> pair) {
    const auto comma = pair.find(',');
    if (comma == std::string::npos) throw LoadError("model file: bad node '" + pair + "'");
    try {
      m.selection.nodes.push_back(
          {std::stoi(pair.substr(0, comma)), std::stoi(pair.substr(comma + 1)), order});
    } catch (const std::logic_error&) {
      throw LoadError("model file: bad node '" + pair + "'");
    }
  }
  check_selection(m.selection);
  detail::expect_key(is, "C");
  m.params.C = detail::read_value<double>(is, "C");
  detail::expect_key(is, "gamma_rule");
  const auto g = detail::read_value<std::string>(is, "gamma rule");
  if (g != "scale") m.params.gamma = std::stod(g);
  detail::expect_key(is, "tol");
  m.params.tol = detail::read_value<double>(is, "tol");
  detail::expect_key(is, "normalize");
  m.params.normalize = detail::read_value<int>(is, "normalize") != 0;
  detail::expect_key(is, "class_weight");
  m.params.class_weight = detail::read_value<int>(is, "class_weight") != 0;
  m.svm = read_svm(is);
  if (m.svm.dimension() != 2 * m.selection.nodes.size()) {
    throw LoadError("model file: SVM dimension does not match the node selection");
  }
  return m;
}

}  // namespace wpseizure
