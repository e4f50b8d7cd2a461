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

// Bonn EEG ingestion, sub-segmentation and case assembly.

#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wpseizure/common.hpp"

namespace wpseizure {

inline constexpr std::size_t kEpochSamples = 4097;
inline constexpr double kSampleRateHz = 173.61;
inline constexpr double kEpochSeconds = 23.6;
inline constexpr std::size_t kWindowsPerEpoch = 17;
inline constexpr std::size_t kWindowSamples = kEpochSamples / kWindowsPerEpoch;
inline constexpr int kEpochsPerSet = 100;
inline constexpr double kNyquistHz = kSampleRateHz / 2.0;

static_assert(kWindowSamples * kWindowsPerEpoch == kEpochSamples);

enum class SetId : std::uint8_t { A = 0, B, C, D, E };

inline constexpr std::array<SetId, 5> kAllSets = {SetId::A, SetId::B, SetId::C,
                                                  SetId::D, SetId::E};

/// Set letter as used in the literature (A..E).
inline constexpr char set_letter(SetId set) {
  return static_cast<char>('A' + static_cast<int>(set));
}

/// Letter code of the Bonn release directory and file names (Z, O, N, F, S).
inline constexpr char letter_code(SetId set) {
  constexpr std::array<char, 5> codes = {'Z', 'O', 'N', 'F', 'S'};
  return codes[static_cast<std::size_t>(set)];
}

inline SetId parse_set_id(char c) {
  const char u = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (SetId s : kAllSets) {
    if (set_letter(s) == u || letter_code(s) == u) return s;
  }
  throw InvalidArgument(std::string("unknown set '") + c + "'");
}

struct Segment {
  std::vector<double> samples;
  SetId set = SetId::A;
  int index = 1;
  double sample_rate_hz = kSampleRateHz;
};

inline void check_segment(const Segment& seg) {
  if (seg.samples.size() != kEpochSamples) {
    throw InvalidArgument("segment must hold " + std::to_string(kEpochSamples) +
                          " samples, got " + std::to_string(seg.samples.size()));
  }
  if (seg.index < 1 || seg.index > kEpochsPerSet) {
    throw InvalidArgument("segment index out of range: " + std::to_string(seg.index));
  }
  for (double v : seg.samples) {
    if (!std::isfinite(v)) throw InvalidArgument("segment contains a non-finite sample");
  }
}

struct SubSegment {
  std::array<double, kWindowSamples> samples{};
  SetId set = SetId::A;
  int segment_index = 1;
  int window_index = 1;
  std::optional<Label> label;
};

enum class CaseName : std::uint8_t { AvsE, BvsE, CvsE, DvsE, ABvsE, CDvsE, ABCDvsE };

inline constexpr std::array<CaseName, 7> kAllCases = {
    CaseName::AvsE,  CaseName::BvsE,  CaseName::CvsE,   CaseName::DvsE,
    CaseName::ABvsE, CaseName::CDvsE, CaseName::ABCDvsE};

struct CaseSpec {
  std::string name;
  std::vector<SetId> negative_sets;
  std::vector<SetId> positive_sets;
};

inline std::string to_string(CaseName name) {
  constexpr std::array<std::string_view, 7> names = {
      "AvsE", "BvsE", "CvsE", "DvsE", "ABvsE", "CDvsE", "ABCDvsE"};
  return std::string(names[static_cast<std::size_t>(name)]);
}

inline CaseSpec case_spec(CaseName name) {
  CaseSpec spec;
  spec.name = to_string(name);
  const std::string& s = spec.name;
  for (char c : s.substr(0, s.find("vs"))) spec.negative_sets.push_back(parse_set_id(c));
  spec.positive_sets = {SetId::E};
  return spec;
}

inline CaseName parse_case_name(std::string_view text) {
  for (CaseName c : kAllCases) {
    if (to_string(c) == text) return c;
  }
  throw InvalidArgument("unknown case '" + std::string(text) +
                        "' (expected one of AvsE, BvsE, CvsE, DvsE, ABvsE, CDvsE, ABCDvsE)");
}

inline void check_case(const CaseSpec& spec) {
  if (spec.negative_sets.empty()) throw InvalidArgument("case " + spec.name + " has no negative sets");
  if (spec.positive_sets.empty()) throw InvalidArgument("case " + spec.name + " has no positive sets");
  for (SetId n : spec.negative_sets) {
    for (SetId p : spec.positive_sets) {
      if (n == p) throw InvalidArgument("case " + spec.name + " uses a set on both sides");
    }
  }
}

using SetMap = std::map<SetId, std::vector<Segment>>;

// ---------------------------------------------------------------------------
// Loading

namespace detail {

inline std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Returns the epoch number encoded in a file name like "Z001.txt" / "z1.TXT",
// or nullopt when the name does not belong to the set.
inline std::optional<int> epoch_number(const std::string& filename, SetId set) {
  const std::string name = lower(filename);
  const char code = static_cast<char>(std::tolower(letter_code(set)));
  if (name.size() < 6 || name[0] != code) return std::nullopt;
  if (name.substr(name.size() - 4) != ".txt") return std::nullopt;
  const std::string_view digits(name.data() + 1, name.size() - 5);
  if (digits.empty() || digits.size() > 4) return std::nullopt;
  int value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) return std::nullopt;
  return value;
}

inline std::filesystem::path set_directory(const std::filesystem::path& root, SetId set) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) {
    throw LoadError("data root is not a directory: " + root.string());
  }
  const std::string code(1, static_cast<char>(std::tolower(letter_code(set))));
  const std::string letter(1, static_cast<char>(std::tolower(set_letter(set))));
  std::vector<fs::path> matches;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_directory()) continue;
    const std::string n = lower(entry.path().filename().string());
    if (n == code || n == letter || n == "set" + letter || n == "set_" + letter) {
      matches.push_back(entry.path());
    }
  }
  if (matches.size() > 1) {
    throw LoadError("ambiguous directories for set " + std::string(1, set_letter(set)) +
                    " under " + root.string());
  }
  // Flat layout: all epoch files directly under the root.
  return matches.empty() ? root : matches.front();
}

inline std::vector<double> read_epoch_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  std::vector<double> samples;
  samples.reserve(kEpochSamples);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view v(line);
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.remove_suffix(1);
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.remove_prefix(1);
    if (v.empty()) {
      // Tolerate trailing blank lines only.
      std::string rest;
      bool only_blank = true;
      while (std::getline(in, rest)) {
        if (rest.find_first_not_of(" \t\r") != std::string::npos) only_blank = false;
      }
      if (!only_blank) {
        throw LoadError(path.filename().string() + ":" + std::to_string(line_no) + ": empty line");
      }
      break;
    }
    if (v.front() == '+') v.remove_prefix(1);
    long long value = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
      throw LoadError(path.filename().string() + ":" + std::to_string(line_no) +
                      ": not an integer: '" + std::string(v) + "'");
    }
    samples.push_back(static_cast<double>(value));
  }
  if (samples.size() != kEpochSamples) {
    throw LoadError(path.filename().string() + ": expected " + std::to_string(kEpochSamples) +
                    " samples, found " + std::to_string(samples.size()));
  }
  return samples;
}

}  // namespace detail

/// Loads the 100 epochs of one set from `root`. The set's files may live in a
/// subdirectory named after its letter code (Z, O, N, F, S) or set letter, or
/// directly under `root`. File names are matched case-insensitively, with or
/// without zero padding.
inline std::vector<Segment> load_set(const std::filesystem::path& root, SetId set) {
  namespace fs = std::filesystem;
  const fs::path dir = detail::set_directory(root, set);
  std::map<int, fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto num = detail::epoch_number(entry.path().filename().string(), set);
    if (!num) continue;
    if (*num < 1 || *num > kEpochsPerSet) {
      throw LoadError("epoch number out of range in " + entry.path().string());
    }
    auto [it, inserted] = files.emplace(*num, entry.path());
    if (!inserted) {
      throw LoadError("duplicate epoch " + std::to_string(*num) + ": " + it->second.string() +
                      " and " + entry.path().string());
    }
  }
  std::vector<Segment> out;
  out.reserve(kEpochsPerSet);
  for (int i = 1; i <= kEpochsPerSet; ++i) {
    auto it = files.find(i);
    if (it == files.end()) {
      char name[16];
      std::snprintf(name, sizeof name, "%c%03d.txt", letter_code(set), i);
      throw LoadError("missing file " + (dir / name).string());
    }
    Segment seg;
    seg.samples = detail::read_epoch_file(it->second);
    seg.set = set;
    seg.index = i;
    out.push_back(std::move(seg));
  }
  return out;
}

/// Writes segments in the Bonn text format (one rounded integer per line).
inline void write_set(const std::filesystem::path& root, SetId set,
                      std::span<const Segment> segments) {
  namespace fs = std::filesystem;
  const fs::path dir = root / std::string(1, letter_code(set));
  fs::create_directories(dir);
  for (const Segment& seg : segments) {
    char name[16];
    std::snprintf(name, sizeof name, "%c%03d.txt", letter_code(set), seg.index);
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + (dir / name).string());
    for (double v : seg.samples) out << std::llround(v) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Sub-segmentation and case assembly

inline std::vector<SubSegment> segment(const Segment& seg) {
  check_segment(seg);
  std::vector<SubSegment> windows(kWindowsPerEpoch);
  for (std::size_t w = 0; w < kWindowsPerEpoch; ++w) {
    SubSegment& sub = windows[w];
    std::copy_n(seg.samples.begin() + static_cast<std::ptrdiff_t>(w * kWindowSamples),
                kWindowSamples, sub.samples.begin());
    sub.set = seg.set;
    sub.segment_index = seg.index;
    sub.window_index = static_cast<int>(w) + 1;
  }
  return windows;
}

/// Labeled sub-segments for `spec`, ordered by (set, segment, window).
inline std::vector<SubSegment> build_dataset(const CaseSpec& spec, const SetMap& sets) {
  check_case(spec);
  std::map<SetId, Label> labels;
  for (SetId s : spec.negative_sets) labels[s] = Label::non_seizure;
  for (SetId s : spec.positive_sets) labels[s] = Label::seizure;

  std::vector<SubSegment> out;
  for (const auto& [set, label] : labels) {
    auto it = sets.find(set);
    if (it == sets.end()) {
      throw InvalidArgument("case " + spec.name + " needs set " +
                            std::string(1, set_letter(set)) + ", which is not loaded");
    }
    std::vector<const Segment*> ordered;
    for (const Segment& seg : it->second) ordered.push_back(&seg);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const Segment* a, const Segment* b) { return a->index < b->index; });
    for (const Segment* seg : ordered) {
      for (SubSegment& sub : segment(*seg)) {
        sub.label = label;
        out.push_back(sub);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic signals

struct SynthKind {
  enum class Type { white_noise, tone, noise_plus_burst };
  Type type = Type::white_noise;
  double freq_hz = 0.0;
  double amplitude = 1.0;
  double snr = 0.0;

  static SynthKind white_noise() { return {}; }
  static SynthKind tone(double freq_hz, double amplitude) {
    return {Type::tone, freq_hz, amplitude, 0.0};
  }
  /// Unit-variance white noise plus a slowly amplitude-modulated rhythm at
  /// `freq_hz`; `snr` is the ratio of peak rhythm power to noise power.
  static SynthKind noise_plus_burst(double freq_hz, double snr) {
    return {Type::noise_plus_burst, freq_hz, 1.0, snr};
  }
};

inline Segment synth_segment(const SynthKind& kind, std::uint64_t seed, SetId set = SetId::A,
                             int index = 1) {
  if (kind.type != SynthKind::Type::white_noise) {
    if (!(kind.freq_hz >= 0.0) || kind.freq_hz >= kNyquistHz) {
      throw InvalidArgument("synthetic frequency must lie in [0, " + std::to_string(kNyquistHz) +
                            ") Hz, got " + std::to_string(kind.freq_hz));
    }
  }
  Segment seg;
  seg.set = set;
  seg.index = index;
  seg.samples.resize(kEpochSamples);
  detail::Rng rng(seed);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  switch (kind.type) {
    case SynthKind::Type::white_noise:
      for (double& v : seg.samples) v = rng.gaussian();
      break;
    case SynthKind::Type::tone:
      for (std::size_t i = 0; i < kEpochSamples; ++i) {
        seg.samples[i] = kind.amplitude * std::sin(two_pi * kind.freq_hz * i / kSampleRateHz);
      }
      break;
    case SynthKind::Type::noise_plus_burst: {
      const double peak = std::sqrt(2.0 * kind.snr);
      const double phase = two_pi * rng.uniform();
      const double env_phase = two_pi * rng.uniform();
      for (std::size_t i = 0; i < kEpochSamples; ++i) {
        const double t = i / kSampleRateHz;
        const double envelope = 0.75 + 0.25 * std::sin(two_pi * 0.2 * t + env_phase);
        seg.samples[i] = rng.gaussian() + peak * envelope * std::sin(two_pi * kind.freq_hz * t + phase);
      }
      break;
    }
  }
  return seg;
}

/// A Bonn-shaped synthetic dataset: A/B healthy-like background (B with a
/// strong alpha rhythm), C/D low-pass background, E rhythmic 5 Hz activity.
/// Samples are rounded to integers as in the real release.
inline SetMap synth_bonn_dataset(std::uint64_t seed) {
  SetMap sets;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (SetId set : kAllSets) {
    auto& segments = sets[set];
    for (int i = 1; i <= kEpochsPerSet; ++i) {
      const std::uint64_t s = seed * 1000003ULL + static_cast<std::uint64_t>(set) * 1000 +
                              static_cast<std::uint64_t>(i);
      Segment seg = synth_segment(SynthKind::white_noise(), s, set, i);
      detail::Rng rng(s ^ 0x5eedULL);
      const double phase = two_pi * rng.uniform();
      double ar = 0.0;
      for (std::size_t n = 0; n < kEpochSamples; ++n) {
        const double t = n / kSampleRateHz;
        double& v = seg.samples[n];
        switch (set) {
          case SetId::A: v = 40.0 * v + 15.0 * std::sin(two_pi * 10.0 * t + phase); break;
          case SetId::B: v = 40.0 * v + 60.0 * std::sin(two_pi * 10.0 * t + phase); break;
          case SetId::C: ar = 0.9 * ar + v; v = 25.0 * ar; break;
          case SetId::D: ar = 0.8 * ar + v; v = 35.0 * ar; break;
          case SetId::E: v = 60.0 * v + 250.0 * std::sin(two_pi * 5.0 * t + phase); break;
        }
        v = std::round(v);
      }
      segments.push_back(std::move(seg));
    }
  }
  return sets;
}

// ---------------------------------------------------------------------------
// Validation

struct SetCheck {
  SetId set = SetId::A;
  bool ok = false;
  std::string message;
};

struct DatasetCheck {
  std::vector<SetCheck> sets;
  bool ok() const {
    return std::all_of(sets.begin(), sets.end(), [](const SetCheck& c) { return c.ok; });
  }
  std::string summary() const {
    std::ostringstream os;
    int good = 0;
    for (const auto& c : sets) {
      os << "set " << set_letter(c.set) << " (" << letter_code(c.set) << "): "
         << (c.ok ? "OK" : c.message) << '\n';
      good += c.ok ? 1 : 0;
    }
    if (ok()) {
      os << sets.size() << " sets, " << sets.size() * kEpochsPerSet << " epochs, OK\n";
    } else {
      os << good << " of " << sets.size() << " sets valid, FAILED\n";
    }
    return os.str();
  }
};

inline DatasetCheck validate_dataset(const std::filesystem::path& root) {
  DatasetCheck report;
  for (SetId set : kAllSets) {
    SetCheck c{set, false, {}};
    try {
      (void)load_set(root, set);
      c.ok = true;
    } catch (const Error& e) {
      c.message = e.what();
    }
    report.sets.push_back(std::move(c));
  }
  return report;
}

inline SetMap load_all_sets(const std::filesystem::path& root) {
  SetMap sets;
  for (SetId set : kAllSets) sets[set] = load_set(root, set);
  return sets;
}

}  // namespace wpseizure
