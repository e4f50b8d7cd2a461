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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "wpseizure/dataio.hpp"

namespace wpseizure {
namespace {

namespace fs = std::filesystem;

void write_epoch(const fs::path& file, std::size_t lines, int start = 0) {
  std::ofstream out(file);
  for (std::size_t i = 0; i < lines; ++i) out << static_cast<int>(i) * ((i % 2) ? -1 : 1) + start << '\n';
}

fs::path make_set_dir(const std::string& tag, SetId set, const std::string& dirname,
                      bool padded = true, bool upper_ext = false) {
  const fs::path root = oracle::temp_dir(tag);
  const fs::path dir = root / dirname;
  fs::create_directories(dir);
  for (int i = 1; i <= kEpochsPerSet; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, padded ? "%c%03d.%s" : "%c%d.%s", letter_code(set), i,
                  upper_ext ? "TXT" : "txt");
    write_epoch(dir / name, kEpochSamples, i);
  }
  return root;
}

TEST(Constants, EpochDurationMatchesSampleRate) {
  EXPECT_NEAR(kSampleRateHz * kEpochSeconds, static_cast<double>(kEpochSamples), 1.0);
  EXPECT_EQ(kWindowSamples, 241u);
  EXPECT_NEAR(kWindowSamples / kSampleRateHz, 1.388, 1e-3);
}

TEST(SetId, AliasBijection) {
  const std::string codes = "ZONFS";
  for (SetId s : kAllSets) {
    EXPECT_EQ(parse_set_id(set_letter(s)), s);
    EXPECT_EQ(parse_set_id(letter_code(s)), s);
    EXPECT_EQ(codes[static_cast<std::size_t>(s)], letter_code(s));
  }
  EXPECT_THROW(parse_set_id('Q'), InvalidArgument);
}

TEST(LoadSet, WellFormedDirectory) {
  const fs::path root = make_set_dir("load_ok", SetId::A, "Z");
  const auto segs = load_set(root, SetId::A);
  ASSERT_EQ(segs.size(), 100u);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(segs[i].index, i + 1);
    EXPECT_EQ(segs[i].samples.size(), kEpochSamples);
    EXPECT_EQ(segs[i].set, SetId::A);
  }
  // write_epoch produces start, -1+start, 2+start, ...
  EXPECT_EQ(segs[0].samples[0], 1.0);
  EXPECT_EQ(segs[0].samples[1], 0.0);
  fs::remove_all(root);
}

TEST(LoadSet, UnpaddedUppercaseNamesInLowercaseDirectory) {
  const fs::path root = make_set_dir("load_unpadded", SetId::E, "s", false, true);
  const auto segs = load_set(root, SetId::E);
  ASSERT_EQ(segs.size(), 100u);
  EXPECT_EQ(segs[9].index, 10);
  fs::remove_all(root);
}

TEST(LoadSet, VerbatimParse) {
  const fs::path root = make_set_dir("load_verbatim", SetId::B, "O");
  {
    std::ofstream out(root / "O" / "O001.txt");
    out << "12\r\n-7\r\n";
    for (std::size_t i = 2; i < kEpochSamples; ++i) out << "+3\n";
  }
  const auto segs = load_set(root, SetId::B);
  EXPECT_EQ(segs[0].samples[0], 12.0);
  EXPECT_EQ(segs[0].samples[1], -7.0);
  EXPECT_EQ(segs[0].samples[2], 3.0);
  fs::remove_all(root);
}

TEST(LoadSet, ShortFileNamed) {
  const fs::path root = make_set_dir("load_short", SetId::C, "N");
  write_epoch(root / "N" / "N042.txt", 4096);
  try {
    (void)load_set(root, SetId::C);
    FAIL() << "expected LoadError";
  } catch (const LoadError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("N042.txt"), std::string::npos) << msg;
    EXPECT_NE(msg.find("expected 4097 samples"), std::string::npos) << msg;
    EXPECT_NE(msg.find("4096"), std::string::npos) << msg;
  }
  fs::remove_all(root);
}

TEST(LoadSet, NonNumericLineNamed) {
  const fs::path root = make_set_dir("load_nonnum", SetId::D, "F");
  {
    std::ofstream out(root / "F" / "F007.txt");
    for (std::size_t i = 0; i < kEpochSamples; ++i) out << (i == 16 ? "abc" : "1") << '\n';
  }
  try {
    (void)load_set(root, SetId::D);
    FAIL() << "expected LoadError";
  } catch (const LoadError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("F007.txt:17"), std::string::npos) << msg;
  }
  fs::remove_all(root);
}

TEST(LoadSet, MissingFileNamed) {
  const fs::path root = make_set_dir("load_missing", SetId::A, "Z");
  fs::remove(root / "Z" / "Z055.txt");
  try {
    (void)load_set(root, SetId::A);
    FAIL() << "expected LoadError";
  } catch (const LoadError& e) {
    EXPECT_NE(std::string(e.what()).find("Z055.txt"), std::string::npos) << e.what();
  }
  fs::remove_all(root);
}

TEST(LoadSet, Deterministic) {
  const fs::path root = make_set_dir("load_det", SetId::A, "Z");
  const auto a = load_set(root, SetId::A);
  const auto b = load_set(root, SetId::A);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].samples, b[i].samples);
  fs::remove_all(root);
}

TEST(Segment, RampWindows) {
  Segment seg;
  seg.samples.resize(kEpochSamples);
  for (std::size_t i = 0; i < kEpochSamples; ++i) seg.samples[i] = static_cast<double>(i);
  const auto w = segment(seg);
  ASSERT_EQ(w.size(), 17u);
  EXPECT_EQ(w[0].samples[0], 0.0);
  EXPECT_EQ(w[16].samples[0], 3856.0);
  EXPECT_EQ(w[16].samples[240], 4096.0);
  EXPECT_EQ(w[16].window_index, 17);
  EXPECT_FALSE(w[3].label.has_value());
}

TEST(Segment, PartitionPropertyOnRandomSegments) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Segment seg = synth_segment(SynthKind::white_noise(), seed, SetId::C, 5);
    std::vector<double> joined;
    for (const auto& w : segment(seg)) {
      EXPECT_EQ(w.set, SetId::C);
      EXPECT_EQ(w.segment_index, 5);
      joined.insert(joined.end(), w.samples.begin(), w.samples.end());
    }
    EXPECT_EQ(joined, seg.samples);
  }
}

TEST(Segment, RejectsWrongLength) {
  Segment seg;
  seg.samples.resize(100);
  EXPECT_THROW(segment(seg), InvalidArgument);
}

SetMap tiny_sets() {
  SetMap sets;
  for (SetId s : kAllSets) {
    for (int i = 1; i <= kEpochsPerSet; ++i) {
      sets[s].push_back(synth_segment(SynthKind::white_noise(), i, s, i));
    }
  }
  return sets;
}

TEST(BuildDataset, CountsAndLabels) {
  const SetMap sets = tiny_sets();
  for (CaseName c : kAllCases) {
    const CaseSpec spec = case_spec(c);
    const auto data = build_dataset(spec, sets);
    EXPECT_EQ(data.size(), 1700u * (spec.negative_sets.size() + 1)) << spec.name;
  }
  const auto ae = build_dataset(case_spec(CaseName::AvsE), sets);
  std::size_t pos = 0;
  for (const auto& s : ae) pos += *s.label == Label::seizure;
  EXPECT_EQ(pos, 1700u);

  const auto all = build_dataset(case_spec(CaseName::ABCDvsE), sets);
  ASSERT_EQ(all.size(), 8500u);
  pos = 0;
  for (const auto& s : all) pos += *s.label == Label::seizure;
  EXPECT_EQ(pos, 1700u);
  // Ordered by set, segment, window.
  for (std::size_t i = 1; i < all.size(); ++i) {
    const auto key = [](const SubSegment& s) {
      return std::make_tuple(s.set, s.segment_index, s.window_index);
    };
    EXPECT_LT(key(all[i - 1]), key(all[i]));
  }
}

TEST(BuildDataset, Errors) {
  SetMap sets = tiny_sets();
  CaseSpec empty{"none", {}, {SetId::E}};
  EXPECT_THROW(build_dataset(empty, sets), InvalidArgument);
  sets.erase(SetId::B);
  EXPECT_THROW(build_dataset(case_spec(CaseName::BvsE), sets), InvalidArgument);
}

TEST(CaseSpec, SevenCases) {
  EXPECT_EQ(case_spec(CaseName::CDvsE).negative_sets, (std::vector<SetId>{SetId::C, SetId::D}));
  EXPECT_EQ(case_spec(CaseName::ABCDvsE).positive_sets, (std::vector<SetId>{SetId::E}));
  EXPECT_EQ(parse_case_name("ABvsE"), CaseName::ABvsE);
  EXPECT_THROW(parse_case_name("AvsB"), InvalidArgument);
}

TEST(Synth, ToneHasPeakAtItsFrequency) {
  const Segment seg = synth_segment(SynthKind::tone(4.0, 1.0), 3);
  double best_f = 0.0;
  double best_p = -1.0;
  for (double f = 0.5; f < 86.0; f += 0.25) {
    const double p = oracle::dft_power(seg.samples, f, kSampleRateHz);
    if (p > best_p) {
      best_p = p;
      best_f = f;
    }
  }
  EXPECT_DOUBLE_EQ(best_f, 4.0);
}

TEST(Synth, DeterministicForSeed) {
  const Segment a = synth_segment(SynthKind::white_noise(), 7);
  const Segment b = synth_segment(SynthKind::white_noise(), 7);
  const Segment c = synth_segment(SynthKind::white_noise(), 8);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_NE(a.samples, c.samples);
  EXPECT_EQ(a.samples.size(), kEpochSamples);
}

TEST(Synth, RejectsAboveNyquist) {
  EXPECT_THROW(synth_segment(SynthKind::tone(90.0, 1.0), 1), InvalidArgument);
  EXPECT_THROW(synth_segment(SynthKind::noise_plus_burst(86.805, 4.0), 1), InvalidArgument);
  EXPECT_NO_THROW(synth_segment(SynthKind::tone(86.0, 1.0), 1));
}

TEST(Synth, BonnDatasetRoundTripsThroughFiles) {
  const SetMap sets = synth_bonn_dataset(11);
  const fs::path root = oracle::temp_dir("synth_roundtrip");
  for (const auto& [set, segs] : sets) write_set(root, set, segs);
  const DatasetCheck check = validate_dataset(root);
  EXPECT_TRUE(check.ok()) << check.summary();
  EXPECT_NE(check.summary().find("5 sets, 500 epochs, OK"), std::string::npos);
  const SetMap loaded = load_all_sets(root);
  for (SetId s : kAllSets) {
    ASSERT_EQ(loaded.at(s).size(), 100u);
    EXPECT_EQ(loaded.at(s)[17].samples, sets.at(s)[17].samples);
  }
  fs::remove_all(root);
}

}  // namespace
}  // namespace wpseizure
