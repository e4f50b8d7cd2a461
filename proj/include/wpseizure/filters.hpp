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

// Two-channel FIR filter banks for the candidate mother wavelets.
//
// Taps are stored in correlation order: the analysis step computes
//   lo[k] = sum_m dec_lo[m] * x[2k + m]
// and synthesis is the transpose of the same operator built from rec_lo /
// rec_hi. With this convention an orthogonal bank has rec == dec, and perfect
// reconstruction is equivalent to the even-shift biorthogonality relations
//   <dec_a, S^{2k} rec_b> = delta(a, b) delta(k, 0),  a, b in {lo, hi}.

#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <initializer_list>
#include <vector>

#include "wpseizure/common.hpp"

namespace wpseizure {

enum class WaveletName : std::uint8_t { db2, db4, db6, sym4, bior1_1, bior2_2, bior2_4, rbio2_2 };

inline constexpr std::array<WaveletName, 8> kAllWavelets = {
    WaveletName::db2,     WaveletName::db4,     WaveletName::db6,     WaveletName::sym4,
    WaveletName::bior1_1, WaveletName::bior2_2, WaveletName::bior2_4, WaveletName::rbio2_2};

/// The six candidates compared in the mother-wavelet sweep.
inline constexpr std::array<WaveletName, 6> kSweepWavelets = {
    WaveletName::db2,  WaveletName::sym4,    WaveletName::rbio2_2,
    WaveletName::db6,  WaveletName::bior2_4, WaveletName::bior1_1};

inline std::string to_string(WaveletName w) {
  constexpr std::array<std::string_view, 8> names = {"db2",     "db4",     "db6",     "sym4",
                                                     "bior1_1", "bior2_2", "bior2_4", "rbio2_2"};
  return std::string(names[static_cast<std::size_t>(w)]);
}

/// Accepts "bior1_1" and the toolbox spelling "bior1.1", case-insensitively.
inline WaveletName parse_wavelet(std::string_view text) {
  std::string s;
  for (char c : text) {
    s += c == '.' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  for (WaveletName w : kAllWavelets) {
    if (to_string(w) == s) return w;
  }
  throw InvalidArgument("unknown wavelet '" + std::string(text) + "'");
}

struct FilterBank {
  WaveletName name = WaveletName::bior1_1;
  std::vector<double> dec_lo;
  std::vector<double> dec_hi;
  std::vector<double> rec_lo;
  std::vector<double> rec_hi;
  bool orthogonal = false;
};

namespace detail {

// Alternating flip: out[m] = (-1)^m * in[L-1-m].
inline std::vector<double> alternating_flip(const std::vector<double>& in) {
  const std::size_t n = in.size();
  std::vector<double> out(n);
  for (std::size_t m = 0; m < n; ++m) {
    out[m] = ((m & 1U) ? -1.0 : 1.0) * in[n - 1 - m];
  }
  return out;
}

inline std::vector<double> scaled(std::initializer_list<double> values, double factor) {
  std::vector<double> out;
  for (double v : values) out.push_back(v * factor);
  return out;
}

// Daubechies / symlet scaling filters, minimum-phase (db) and least-asymmetric
// (sym) spectral factors, to full double precision.
inline std::vector<double> orthogonal_lowpass(WaveletName w) {
  switch (w) {
    case WaveletName::db2:
      return {0.48296291314453414337, 0.83651630373780790558, 0.22414386804201338103,
              -0.12940952255126038117};
    case WaveletName::db4:
      return {0.23037781330889650086,  0.71484657055291564709,  0.63088076792985890788,
              -0.027983769416859854211, -0.18703481171909308408, 0.030841381835560763627,
              0.032883011666885199735,  -0.010597401785069032105};
    case WaveletName::db6:
      return {0.11154074335010946362,   0.49462389039845308568,  0.75113390802109535068,
              0.31525035170919762909,   -0.22626469396543982008, -0.12976686756726193556,
              0.097501605587323049102,  0.027522865530305728626, -0.031582039317486029565,
              0.00055384220116149613925, 0.0047772575109455106396, -0.0010773010853084795649};
    case WaveletName::sym4:
      return {0.032223100604051467872, -0.012603967262031303754, -0.099219543576633532585,
              0.2978577956053060514,   0.80373875180513208088,   0.49761866763277498998,
              -0.029635527646002491764, -0.075765714789502213228};
    default:
      throw InvalidArgument("not an orthogonal wavelet: " + to_string(w));
  }
}

}  // namespace detail

inline FilterBank filter_bank(WaveletName name) {
  FilterBank fb;
  fb.name = name;
  const double r2 = std::numbers::sqrt2;
  switch (name) {
    case WaveletName::db2:
    case WaveletName::db4:
    case WaveletName::db6:
    case WaveletName::sym4:
      fb.orthogonal = true;
      fb.dec_lo = detail::orthogonal_lowpass(name);
      fb.rec_lo = fb.dec_lo;
      break;
    case WaveletName::bior1_1:
      fb.dec_lo = {1.0 / r2, 1.0 / r2};
      fb.rec_lo = fb.dec_lo;
      break;
    case WaveletName::bior2_2:
      fb.dec_lo = detail::scaled({-1.0 / 8, 1.0 / 4, 3.0 / 4, 1.0 / 4, -1.0 / 8, 0.0}, r2);
      fb.rec_lo = detail::scaled({0.0, 1.0 / 4, 1.0 / 2, 1.0 / 4, 0.0, 0.0}, r2);
      break;
    case WaveletName::bior2_4:
      fb.dec_lo = detail::scaled({3.0 / 128, -3.0 / 64, -1.0 / 8, 19.0 / 64, 45.0 / 64, 19.0 / 64,
                                  -1.0 / 8, -3.0 / 64, 3.0 / 128, 0.0},
                                 r2);
      fb.rec_lo = detail::scaled({0.0, 0.0, 0.0, 1.0 / 4, 1.0 / 2, 1.0 / 4, 0.0, 0.0, 0.0, 0.0}, r2);
      break;
    case WaveletName::rbio2_2:
      // bior2.2 with the analysis and synthesis roles exchanged.
      fb.dec_lo = detail::scaled({0.0, 1.0 / 4, 1.0 / 2, 1.0 / 4, 0.0, 0.0}, r2);
      fb.rec_lo = detail::scaled({-1.0 / 8, 1.0 / 4, 3.0 / 4, 1.0 / 4, -1.0 / 8, 0.0}, r2);
      break;
  }
  fb.dec_hi = detail::alternating_flip(fb.rec_lo);
  fb.rec_hi = detail::alternating_flip(fb.dec_lo);
  return fb;
}

}  // namespace wpseizure
