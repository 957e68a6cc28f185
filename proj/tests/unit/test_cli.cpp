// Copyright 2026 The dbp Authors.
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


#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "doctest.h"
#include "dbp/asymptotics.hpp"
#include "dbp/cli/commands.hpp"
#include "dbp/cli/config.hpp"

using namespace dbp;
using namespace dbp::cli;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name)
      : dir(fs::temp_directory_path() / ("dbp_cli_test_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }

  fs::path write(const std::string& file, const std::string& text) const {
    const auto p = dir / file;
    std::ofstream(p) << text;
    return p;
  }
};

struct Run {
  int code;
  std::string out, err;
};

Run run(std::string_view command, const RunOptions& options) {
  std::ostringstream out, err;
  const int code = run_command(command, options, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

ConfigFile parse(const std::string& text) {
  std::istringstream in(text);
  return ConfigFile::parse(in, "test.ini");
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse("# comment\n[system]\nB = 64 ; trailing\n  U=8\n\n[sweep]\nbeta = 0.1, 0.2\n");
  REQUIRE(cfg.find("system", "B"));
  CHECK(cfg.find("system", "U")->value == "8");
  CHECK(cfg.find("system", "U")->line == 4);
  CHECK(cfg.has_section("sweep"));
  CHECK_FALSE(cfg.has_section("output"));
  CHECK(cfg.find("sweep", "missing") == nullptr);

  CHECK_THROWS_AS(parse("B = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[a]\nx = 1\nx = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse("[a\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[a]\njust text\n"), ConfigError);
}

TEST_CASE("typed config access and unknown keys") {
  const auto cfg = parse("[s]\nn = 12\nx = 2.5\nlist = 1, 2 ,3\nrange = 0.5:0.5:2\nwords = a, B\nbad = 1.5x\n");
  ConfigReader r(cfg);
  CHECK(r.integer("s", "n") == 12);
  CHECK(r.real("s", "x") == 2.5);
  CHECK(r.reals("s", "list") == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(r.reals("s", "range") == std::vector<double>{0.5, 1.0, 1.5, 2.0});
  CHECK(r.words("s", "words") == std::vector<std::string>{"a", "B"});
  CHECK(r.real_or("s", "absent", 7.0) == 7.0);
  CHECK_THROWS_AS(r.real("s", "bad"), ConfigError);
  CHECK_NOTHROW(r.finish());

  ConfigReader partial(cfg);
  partial.integer("s", "n");
  CHECK_THROWS_AS(partial.finish(), ConfigError);

  CHECK_THROWS_AS(parse_real_list("1:0:3"), ConfigError);
  CHECK_THROWS_AS(parse_real_list(""), ConfigError);
  CHECK(parse_real_list("0.25:0.25:1").size() == 4);
}

TEST_CASE("analyze single point") {
  Scratch s("analyze");
  RunOptions o;
  o.config = s.write("a.ini",
                     "[equalizer]\nkinds = lmmse\narchitectures = pd\n"
                     "[sweep]\nbeta = 0.25\nes_over_n0_db = 10\n[output]\nfile = a.csv\n");
  o.out_dir = s.dir;
  const auto r = run("analyze", o);
  REQUIRE(r.code == kExitOk);
  const auto rows = read_csv(s.dir / "a.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"beta", "es_over_n0_db", "equalizer", "architecture",
                                            "weights", "sinr", "sinr_db", "sigma2",
                                            "cluster_sinr"});
  CHECK(std::stod(rows[1][5]) == doctest::Approx(7.78459).epsilon(1e-5));
  CHECK(std::stod(rows[1][6]) == doctest::Approx(10.0 * std::log10(std::stod(rows[1][5]))));
}

TEST_CASE("analyze near beta = 0 reports the AWGN SINR") {
  Scratch s("analyze0");
  RunOptions o;
  o.config = s.write("a.ini",
                     "[partition]\nclusters = 2\n"
                     "[equalizer]\nkinds = mrc, zf, lmmse, lama\narchitectures = pd, fd\n"
                     "[sweep]\nbeta = 1e-9\nes_over_n0_db = 7\n");
  o.out_dir = s.dir;
  REQUIRE(run("analyze", o).code == kExitOk);
  const auto rows = read_csv(s.dir / "analyze.csv");
  REQUIRE(rows.size() == 9);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::abs(std::stod(rows[i][6]) - 7.0) < 1e-5);
  }
}

TEST_CASE("analyze error paths") {
  Scratch s("analyze_err");
  RunOptions o;
  o.out_dir = s.dir;
  o.config = s.write("zf.ini",
                     "[partition]\nclusters = 4\n[equalizer]\nkinds = zf\narchitectures = fd\n"
                     "[sweep]\nbeta = 0.3\nes_over_n0_db = 10\n");
  const auto zf = run("analyze", o);
  CHECK(zf.code == kExitNumerical);
  CHECK(zf.err.find("InvalidRegime") != std::string::npos);
  CHECK(zf.err.find("beta=0.3") != std::string::npos);

  o.config = s.write("typo.ini", "[sweep]\nbeta = 0.3\nes_over_n0_db = 10\nbetta = 1\n");
  const auto typo = run("analyze", o);
  CHECK(typo.code == kExitUsage);
  CHECK(typo.err.find("betta") != std::string::npos);

  o.config = s.dir / "missing.ini";
  CHECK(run("analyze", o).code == kExitUsage);
  o.config.reset();
  CHECK(run("analyze", o).code == kExitUsage);
  CHECK(run("frobnicate", o).code == kExitUsage);
}

TEST_CASE("simulate rejects zero trials and is byte-reproducible") {
  Scratch s("simulate");
  RunOptions o;
  o.out_dir = s.dir;
  const std::string base =
      "[system]\nconstellation = qpsk\nB = 32\nU = 4\n[partition]\nclusters = 2\n"
      "[equalizer]\nkinds = zf, lama\narchitectures = pd, fd\n[sweep]\nsnr_db = 5, 10\nseed = 4\n";
  o.config = s.write("zero.ini", base + "trials = 0\n");
  CHECK(run("simulate", o).code == kExitUsage);

  o.config = s.write("ok.ini", base + "trials = 40\n[output]\nfile = ser.csv\n");
  REQUIRE(run("simulate", o).code == kExitOk);
  const auto first = slurp(s.dir / "ser.csv");
  o.workers = 1;
  REQUIRE(run("simulate", o).code == kExitOk);
  CHECK(slurp(s.dir / "ser.csv") == first);
  CHECK(read_csv(s.dir / "ser.csv").size() == 1 + 4 * 2);

  o.seed = 5;
  REQUIRE(run("simulate", o).code == kExitOk);
  CHECK(slurp(s.dir / "ser.csv") != first);
}

TEST_CASE("rate-search agrees with the library and reports infeasible points") {
  Scratch s("rate");
  RunOptions o;
  o.out_dir = s.dir;
  o.config = s.write("r.ini",
                     "[equalizer]\nkinds = lmmse\narchitectures = pd\n"
                     "[sweep]\ntarget_rate = 1.5\nsnr_loss_db = 1\n");
  REQUIRE(run("rate-search", o).code == kExitOk);
  const auto rows = read_csv(s.dir / "rate_search.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].back() == "min_inv_beta");
  RateSearchSpec spec;
  spec.target_rate = 1.5;
  spec.snr_loss_db = 1.0;
  CHECK(std::stod(rows[1].back()) ==
        doctest::Approx(min_antenna_ratio(spec).inv_beta).epsilon(1e-9));

  o.config = s.write("inf.ini",
                     "[equalizer]\nkinds = lmmse\narchitectures = pd\n"
                     "[sweep]\ntarget_rate = 1.999\nsnr_loss_db = 0\n");
  const auto r = run("rate-search", o);
  CHECK(r.code == kExitNumerical);
  CHECK(r.err.find("Infeasible") != std::string::npos);
}

TEST_CASE("volumes") {
  Scratch s("volumes");
  RunOptions o;
  o.out_dir = s.dir;
  const auto r = run("volumes", o);
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("17.58 MiB") != std::string::npos);
  CHECK(r.out.find("8.20 MiB") != std::string::npos);
  CHECK(fs::exists(s.dir / "volumes.csv"));

  o.config = s.write("v.ini", "[volumes]\nclusters = 0\n");
  CHECK(run("volumes", o).code == kExitUsage);
}

TEST_CASE("validate passes and the corrupted-weights hook is caught") {
  RunOptions o;
  const auto ok = run("validate", o);
  CHECK(ok.code == kExitOk);
  const auto results = run_validation({});
  CHECK(results.size() >= 12);
  std::set<std::string> names;
  for (const auto& p : results) {
    names.insert(p.name);
    CHECK_MESSAGE(p.passed, p.name << ": " << p.detail);
  }
  CHECK(names.size() == results.size());

  o.corrupt_fusion_weights = true;
  const auto bad = run("validate", o);
  CHECK(bad.code == kExitNumerical);
  CHECK(bad.out.find("FAIL  optimal fusion") != std::string::npos);
}

TEST_CASE("shipped configs parse") {
  const fs::path dir = DBP_CONFIG_DIR;
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".ini") continue;
    ++seen;
    CHECK_NOTHROW(ConfigFile::load(entry.path().string()));
  }
  CHECK(seen >= 5);
}

TEST_CASE("the dbp executable maps outcomes onto exit codes") {
  Scratch s("exe");
  const std::string tool = DBP_TOOL_PATH;
  auto code = [&](const std::string& args) {
    const std::string cmd = "\"" + tool + "\" " + args + " > \"" + (s.dir / "log").string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  CHECK(code("volumes --out \"" + s.dir.string() + "\"") == 0);
  CHECK(code("analyze") == 2);
  CHECK(code("analyze --config \"" + (s.dir / "nope.ini").string() + "\"") == 2);
  const auto zf = s.write("zf.ini",
                          "[partition]\nclusters = 4\n[equalizer]\nkinds = zf\n"
                          "architectures = fd\n[sweep]\nbeta = 0.3\nes_over_n0_db = 10\n");
  CHECK(code("analyze --config \"" + zf.string() + "\" --out \"" + s.dir.string() + "\"") == 3);
}
