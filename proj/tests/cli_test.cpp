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
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string output;
};

/// Runs the CLI with `args` and no data root in the environment.
Result cli(const std::string& args) {
  const std::string cmd =
      "env -u WPSEIZURE_DATA_ROOT '" + std::string(WPSEIZURE_CLI) + "' " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, "popen failed"};
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("wpseizure_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

bool contains(const std::string& text, const std::string& part) {
  return text.find(part) != std::string::npos;
}

TEST(Cli, HelpAndVersion) {
  const Result help = cli("--help");
  EXPECT_EQ(help.code, 0);
  for (const char* sub : {"validate", "run", "sweep", "reproduce", "train", "apply", "synth"}) {
    EXPECT_TRUE(contains(help.output, sub)) << sub;
  }
  const Result run_help = cli("run --help");
  EXPECT_EQ(run_help.code, 0);
  EXPECT_TRUE(contains(run_help.output, "--grid-search"));
  EXPECT_EQ(cli("--version").code, 0);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("run --bogus").code, 2);
  const Result bad_case = cli("run --data-root /nonexistent --case EvsA");
  EXPECT_EQ(bad_case.code, 2);
  EXPECT_TRUE(contains(bad_case.output, "EvsA")) << bad_case.output;
  EXPECT_EQ(cli("run --data-root /nonexistent --k 4").code, 2);
  EXPECT_EQ(cli("run --config /nonexistent/run.cfg").code, 2);
}

TEST(Cli, MissingDataRootIsActionable) {
  const Result r = cli("run --case AvsE");
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.output, "--data-root")) << r.output;
  EXPECT_TRUE(contains(r.output, "WPSEIZURE_DATA_ROOT")) << r.output;
}

TEST(Cli, SynthValidateAndRun) {
  const fs::path data = scratch("data");
  const fs::path out = scratch("out");
  ASSERT_EQ(cli("synth --out " + data.string() + " --seed 3").code, 0);

  const Result ok = cli("validate --data-root " + data.string());
  EXPECT_EQ(ok.code, 0) << ok.output;

  const fs::path cfg = out.string() + ".cfg";
  {
    std::ofstream c(cfg);
    c << "# test run\ndata-root = " << data.string() << "\ncase = DvsE\nk = 5\n";
  }
  const Result run = cli("run --config " + cfg.string() + " --k 2 --out " + out.string());
  EXPECT_EQ(run.code, 0) << run.output;
  EXPECT_TRUE(fs::exists(out / "metrics.csv"));
  std::ifstream manifest(out / "manifest.txt");
  const std::string text((std::istreambuf_iterator<char>(manifest)), {});
  EXPECT_TRUE(contains(text, "case = DvsE")) << text;
  EXPECT_TRUE(contains(text, "k = 2")) << text;

  {
    std::ofstream c(cfg);
    c << "colour = red\n";
  }
  const Result bad_key = cli("run --config " + cfg.string());
  EXPECT_EQ(bad_key.code, 2);
  EXPECT_TRUE(contains(bad_key.output, "colour")) << bad_key.output;

  fs::remove(data / "S" / "S042.txt");
  const Result broken = cli("validate --data-root " + data.string());
  EXPECT_EQ(broken.code, 1);
  EXPECT_TRUE(contains(broken.output, "S042.txt")) << broken.output;

  fs::remove_all(data);
  fs::remove_all(out);
  fs::remove(cfg);
}

}  // namespace
