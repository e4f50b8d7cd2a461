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

// Periodized wavelet packet decomposition and reconstruction.
//
// Each split maps a node of length n to two children of length ceil(n/2).
// Odd-length nodes are extended by one sample before the circular
// convolution: a zero for orthogonal banks (the split is then an exact
// isometry) and a copy of the last sample for biorthogonal banks (constants
// stay in the low-pass branch). The extension sample is discarded on
// reconstruction, so the transform inverts exactly either way.

#pragma once

#include <cstdint>
#include <iomanip>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wpseizure/common.hpp"
#include "wpseizure/filters.hpp"

namespace wpseizure {

inline constexpr int kMaxLevel = 5;

enum class NodeOrder : std::uint8_t { natural, frequency };

inline std::string to_string(NodeOrder o) { return o == NodeOrder::natural ? "natural" : "frequency"; }

inline NodeOrder parse_node_order(std::string_view s) {
  if (s == "natural") return NodeOrder::natural;
  if (s == "frequency") return NodeOrder::frequency;
  throw InvalidArgument("unknown node order '" + std::string(s) + "' (expected natural or frequency)");
}

struct NodeId {
  int level = 0;
  int index = 0;
  NodeOrder order = NodeOrder::natural;

  friend bool operator==(const NodeId&, const NodeId&) = default;
};

/// "(j,k)" for natural order, "f(j,k)" for frequency order.
inline std::string to_string(const NodeId& node) {
  return std::string(node.order == NodeOrder::frequency ? "f" : "") + "(" +
         std::to_string(node.level) + "," + std::to_string(node.index) + ")";
}

inline void check_node(const NodeId& node, int max_level) {
  if (node.level < 0 || node.level > max_level || node.index < 0 ||
      node.index >= (1 << node.level)) {
    throw InvalidArgument("node " + to_string(node) + " is outside a " +
                          std::to_string(max_level) + "-level tree");
  }
}

inline constexpr int gray_code(int k) { return k ^ (k >> 1); }

inline constexpr int inverse_gray_code(int g) {
  int k = 0;
  for (; g != 0; g >>= 1) k ^= g;
  return k;
}

/// Natural (filter-tree) index to ascending-frequency index. High-pass
/// branches come out spectrally mirrored after decimation, which makes the
/// natural index the Gray code of the frequency index.
inline NodeId to_frequency_order(const NodeId& node) {
  if (node.order == NodeOrder::frequency) return node;
  check_node(node, 30);
  return {node.level, inverse_gray_code(node.index), NodeOrder::frequency};
}

inline NodeId to_natural_order(const NodeId& node) {
  if (node.order == NodeOrder::natural) return node;
  check_node(node, 30);
  return {node.level, gray_code(node.index), NodeOrder::natural};
}

/// Frequency band [lo, hi) covered by a frequency-ordered node.
inline std::pair<double, double> node_band(const NodeId& node, double sample_rate_hz) {
  if (node.order != NodeOrder::frequency) {
    throw InvalidArgument("node_band needs a frequency-ordered node; convert " + to_string(node) +
                          " with to_frequency_order first");
  }
  check_node(node, 30);
  const double width = sample_rate_hz / static_cast<double>(1LL << (node.level + 1));
  return {node.index * width, (node.index + 1) * width};
}

enum class OddExtension : std::uint8_t { zero, replicate };

inline OddExtension default_extension(const FilterBank& fb) {
  return fb.orthogonal ? OddExtension::zero : OddExtension::replicate;
}

class WptTree {
 public:
  WptTree() = default;

  /// Zero-filled tree of the right shape.
  WptTree(std::size_t source_length, int levels, WaveletName wavelet)
      : source_length_(source_length), levels_(levels), wavelet_(wavelet) {
    if (levels < 0) throw InvalidArgument("levels must be non-negative");
    if (levels >= 31 || (std::size_t{1} << levels) > source_length) {
      throw InvalidArgument("signal of length " + std::to_string(source_length) +
                            " is too short for " + std::to_string(levels) + " levels");
    }
    lengths_.push_back(source_length);
    for (int j = 1; j <= levels; ++j) lengths_.push_back((lengths_.back() + 1) / 2);
    nodes_.resize((std::size_t{2} << levels) - 1);
    for (int j = 0; j <= levels; ++j) {
      for (int k = 0; k < (1 << j); ++k) coefficients(j, k).assign(lengths_[j], 0.0);
    }
  }

  int levels() const { return levels_; }
  std::size_t source_length() const { return source_length_; }
  WaveletName wavelet() const { return wavelet_; }
  std::size_t length_at(int level) const { return lengths_.at(static_cast<std::size_t>(level)); }

  /// Natural-order storage of node (level, k).
  std::vector<double>& coefficients(int level, int k) { return nodes_[flat(level, k)]; }
  const std::vector<double>& coefficients(int level, int k) const { return nodes_[flat(level, k)]; }

  std::span<const double> node(const NodeId& id) const {
    const NodeId n = to_natural_order(id);
    check_node(n, levels_);
    return coefficients(n.level, n.index);
  }

  /// Text table of every node: natural id, frequency index, length, energy.
  std::string dump() const {
    std::ostringstream os;
    os << "# wavelet " << to_string(wavelet_) << ", levels " << levels_ << ", source length "
       << source_length_ << '\n';
    os << std::left << std::setw(10) << "node" << std::setw(8) << "freq" << std::setw(8)
       << "length" << "energy\n";
    for (int j = 0; j <= levels_; ++j) {
      for (int k = 0; k < (1 << j); ++k) {
        const auto& c = coefficients(j, k);
        const double e = std::inner_product(c.begin(), c.end(), c.begin(), 0.0);
        os << std::left << std::setw(10) << to_string(NodeId{j, k}) << std::setw(8)
           << inverse_gray_code(k) << std::setw(8) << c.size() << std::setprecision(10) << e
           << '\n';
      }
    }
    return os.str();
  }

 private:
  std::size_t flat(int level, int k) const {
    if (level < 0 || level > levels_ || k < 0 || k >= (1 << level)) {
      throw InvalidArgument("node " + to_string(NodeId{level, k}) + " is outside the tree");
    }
    return (std::size_t{1} << level) - 1 + static_cast<std::size_t>(k);
  }

  std::size_t source_length_ = 0;
  int levels_ = 0;
  WaveletName wavelet_ = WaveletName::bior1_1;
  std::vector<std::size_t> lengths_;
  std::vector<std::vector<double>> nodes_;
};

// ---------------------------------------------------------------------------
// One-level periodized split and merge

namespace detail {

// Offset that centres each output sample on its filter window; this matches
// the usual periodization alignment of PyWavelets and MATLAB.
inline std::size_t window_offset(std::size_t period, std::size_t taps) {
  return (period * taps + 1 - taps / 2) % period;
}

}  // namespace detail

/// Splits `x` into low/high halves of length ceil(n/2) each.
inline void analysis_step(std::span<const double> x, const FilterBank& fb, OddExtension ext,
                          std::span<double> lo, std::span<double> hi) {
  const std::size_t n = x.size();
  const std::size_t period = n + (n & 1U);
  const std::size_t half = period / 2;
  if (n == 0 || lo.size() != half || hi.size() != half) {
    throw InvalidArgument("analysis_step: bad buffer sizes");
  }
  const double pad = (n & 1U) ? (ext == OddExtension::zero ? 0.0 : x[n - 1]) : 0.0;
  const std::size_t taps = fb.dec_lo.size();
  const std::size_t shift = detail::window_offset(period, taps);
  for (std::size_t k = 0; k < half; ++k) {
    double a = 0.0;
    double d = 0.0;
    for (std::size_t m = 0; m < taps; ++m) {
      const std::size_t i = (2 * k + m + shift) % period;
      const double v = i < n ? x[i] : pad;
      a += fb.dec_lo[m] * v;
      d += fb.dec_hi[m] * v;
    }
    lo[k] = a;
    hi[k] = d;
  }
}

/// Inverse of analysis_step; writes the first `out.size()` samples of the
/// reconstructed (possibly extended) signal.
inline void synthesis_step(std::span<const double> lo, std::span<const double> hi,
                           const FilterBank& fb, std::span<double> out) {
  const std::size_t half = lo.size();
  const std::size_t period = 2 * half;
  if (hi.size() != half || out.size() + 1 < period || out.size() > period) {
    throw InvalidArgument("synthesis_step: bad buffer sizes");
  }
  std::vector<double> y(period, 0.0);
  const std::size_t taps = fb.rec_lo.size();
  const std::size_t shift = detail::window_offset(period, taps);
  for (std::size_t k = 0; k < half; ++k) {
    for (std::size_t m = 0; m < taps; ++m) {
      y[(2 * k + m + shift) % period] += fb.rec_lo[m] * lo[k] + fb.rec_hi[m] * hi[k];
    }
  }
  std::copy_n(y.begin(), out.size(), out.begin());
}

// ---------------------------------------------------------------------------
// Full packet tree

inline WptTree wpt_decompose(std::span<const double> signal, const FilterBank& fb,
                             int levels = kMaxLevel) {
  if (levels < 1) throw InvalidArgument("levels must be at least 1");
  WptTree tree(signal.size(), levels, fb.name);
  const OddExtension ext = default_extension(fb);
  tree.coefficients(0, 0).assign(signal.begin(), signal.end());
  for (int j = 0; j < levels; ++j) {
    for (int k = 0; k < (1 << j); ++k) {
      analysis_step(tree.coefficients(j, k), fb, ext, tree.coefficients(j + 1, 2 * k),
                    tree.coefficients(j + 1, 2 * k + 1));
    }
  }
  return tree;
}

/// Rebuilds the source signal from the nodes at `from_level` only.
inline std::vector<double> wpt_reconstruct(const WptTree& tree, const FilterBank& fb,
                                           int from_level) {
  if (from_level < 0 || from_level > tree.levels()) {
    throw InvalidArgument("reconstruction level " + std::to_string(from_level) +
                          " is outside the tree");
  }
  std::vector<std::vector<double>> current;
  for (int k = 0; k < (1 << from_level); ++k) {
    const auto& c = tree.coefficients(from_level, k);
    if (c.size() != tree.length_at(from_level)) {
      throw InvalidArgument("level " + std::to_string(from_level) + " is incomplete: node " +
                            to_string(NodeId{from_level, k}) + " holds " +
                            std::to_string(c.size()) + " of " +
                            std::to_string(tree.length_at(from_level)) + " coefficients");
    }
    current.push_back(c);
  }
  for (int j = from_level; j > 0; --j) {
    std::vector<std::vector<double>> parents(std::size_t{1} << (j - 1));
    for (std::size_t k = 0; k < parents.size(); ++k) {
      parents[k].resize(tree.length_at(j - 1));
      synthesis_step(current[2 * k], current[2 * k + 1], fb, parents[k]);
    }
    current = std::move(parents);
  }
  return std::move(current.front());
}

}  // namespace wpseizure
