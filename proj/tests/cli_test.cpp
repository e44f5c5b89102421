// softalign/cli_test.cpp

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <doctest.h>

#include "softalign/io.hpp"
#include "testing_util.hpp"

using namespace softalign;
using softalign::testing::TempDir;

namespace {

#ifndef SOFTALIGN_CLI_PATH
#error "SOFTALIGN_CLI_PATH must point at the softalign binary"
#endif

struct RunResult {
  int exit_code;
  std::string out;
};

// Runs the CLI with stderr folded away; stdout is the machine contract.
RunResult run_cli(const std::string& args) {
  const std::string command = std::string(SOFTALIGN_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buffer;
  std::size_t got = 0;
  while ((got = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
    out.append(buffer.data(), got);
  }
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("dist prints nine significant digits and nothing else") {
  TempDir dir("clidist");
  write_text_file(dir.file("a.seq"), "0\n1\n2\n");
  write_text_file(dir.file("b.seq"), "0\n2\n");
  const RunResult dtw = run_cli("dist " + dir.file("a.seq") + " " + dir.file("b.seq"));
  CHECK(dtw.exit_code == 0);
  CHECK(dtw.out == "1.00000000e+00\n");
  const RunResult soft = run_cli("dist " + dir.file("a.seq") + " " + dir.file("b.seq") +
                                 " --metric softdtw --gamma 1");
  CHECK(soft.exit_code == 0);
  CHECK(soft.out == "2.97704733e-02\n");
  const RunResult zero = run_cli("dist " + dir.file("a.seq") + " " + dir.file("a.seq"));
  CHECK(zero.exit_code == 0);
  CHECK(zero.out == "0.00000000e+00\n");
  const RunResult sq = run_cli("dist " + dir.file("a.seq") + " " + dir.file("b.seq") +
                               " --cost sqeuclidean");
  CHECK(sq.exit_code == 0);
  CHECK(sq.out == "1.00000000e+00\n");
}

TEST_CASE("align prints the canonical path") {
  TempDir dir("clialign");
  write_text_file(dir.file("a.seq"), "0\n1\n2\n");
  write_text_file(dir.file("b.seq"), "0\n2\n");
  const RunResult result = run_cli("align " + dir.file("a.seq") + " " + dir.file("b.seq"));
  CHECK(result.exit_code == 0);
  CHECK(result.out == "1,1\n2,2\n3,2\n");
}

TEST_CASE("usage errors exit 1") {
  TempDir dir("cliusage");
  write_text_file(dir.file("a.seq"), "0\n1\n");
  CHECK(run_cli("dist " + dir.file("a.seq") + " " + dir.file("a.seq") +
                " --metric softdtw --gamma 0")
            .exit_code == 1);
  CHECK(run_cli("dist " + dir.file("a.seq") + " " + dir.file("a.seq") + " --metric fancy")
            .exit_code == 1);
  CHECK(run_cli("nosuchcommand").exit_code == 1);
  CHECK(run_cli("dist --metric dtw").exit_code == 1);  // missing positionals
  CHECK(run_cli("dist " + dir.file("a.seq") + " " + dir.file("a.seq") + " --bogus-flag")
            .exit_code == 1);
}

TEST_CASE("data errors exit 2") {
  TempDir dir("clidata");
  write_text_file(dir.file("a.seq"), "0\n1\n");
  write_text_file(dir.file("ragged.seq"), "0,1\n2\n");
  CHECK(run_cli("dist " + dir.file("a.seq") + " " + dir.file("missing.seq")).exit_code == 2);
  CHECK(run_cli("dist " + dir.file("a.seq") + " " + dir.file("ragged.seq")).exit_code == 2);
}

TEST_CASE("help exits 0") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("dist --help").exit_code == 0);
}

TEST_CASE("gen then train then eval round-trips through files") {
  TempDir dir("clipipe");
  const std::string data = dir.file("data");
  const RunResult gen = run_cli("gen --config rec --seed 5 --out " + data +
                                " --utterances 3 --val 2 --test 2");
  CHECK(gen.exit_code == 0);
  CHECK(gen.out == (std::filesystem::path(data) / "manifest.txt").string() + "\n");

  const std::string params = dir.file("params.txt");
  const RunResult train = run_cli("train --data " + data + " --loss softdtw --epochs 2" +
                                  " --seed 1 --params-out " + params);
  CHECK(train.exit_code == 0);
  CHECK(train.out.find("best_epoch ") == 0);

  const RunResult eval = run_cli("eval --data " + data + " --params " + params +
                                 " --split test");
  CHECK(eval.exit_code == 0);
  CHECK(eval.out.find("softalign-metric-report v1\n") == 0);
  CHECK(eval.out.find("utterances 2 mse_score ") != std::string::npos);
}

TEST_CASE("train reads config files with flag overrides") {
  TempDir dir("clicfg");
  const std::string data = dir.file("data");
  REQUIRE(run_cli("gen --config rec --seed 6 --out " + data +
                  " --utterances 3 --val 2 --test 2")
              .exit_code == 0);
  write_text_file(dir.file("train.cfg"),
                  "loss=l2\nepochs=2\nlearning-rate=0.001\noptimizer=sgd\nseed=3\n");
  const std::string params = dir.file("params.txt");
  const std::string report = dir.file("report.txt");
  const RunResult result =
      run_cli("train --data " + data + " --config " + dir.file("train.cfg") +
              " --epochs 1 --params-out " + params + " --report-out " + report);
  CHECK(result.exit_code == 0);
  const std::string text = read_text_file(report);
  CHECK(text.find("epochs 1 ") != std::string::npos);  // flag beat the file
  CHECK(text.find("epoch 1 ") != std::string::npos);

  CHECK(run_cli("train --data " + data + " --config " + dir.file("nope.cfg")).exit_code == 2);
}

TEST_CASE("repro writes a run directory with a summary") {
  TempDir dir("clirepro");
  const RunResult result = run_cli("repro --config rec --loss l2 --seed 2 --out " + dir.path() +
                                   " --utterances 3 --epochs 2");
  CHECK(result.exit_code == 0);
  CHECK(result.out.find("run run_rec_l2_seed2 mse_score ") == 0);
  const std::string run_dir = dir.file("run_rec_l2_seed2");
  for (const char* name : {"params.txt", "train_report.txt", "metric_report.txt", "summary.txt"}) {
    CHECK(std::filesystem::exists(std::filesystem::path(run_dir) / name));
  }
  const std::string summary = read_text_file(run_dir + "/summary.txt");
  CHECK(summary.find("softalign-repro-summary v1\n") == 0);
  CHECK(summary.find("siblings none") != std::string::npos);

  // A second run under the same output root compares against the first.
  const RunResult second = run_cli("repro --config rec --loss softdtw --seed 2 --out " +
                                   dir.path() + " --utterances 3 --epochs 2");
  CHECK(second.exit_code == 0);
  const std::string summary2 =
      read_text_file(dir.file("run_rec_softdtw_seed2") + "/summary.txt");
  CHECK(summary2.find("sibling run_rec_l2_seed2 ") != std::string::npos);
  CHECK(summary2.find("mse_winner ") != std::string::npos);
}

}  // TEST_SUITE
