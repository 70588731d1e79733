#include "doctest.h"
#include "wsc/cli.hpp"
#include "wsc/errors.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "json.hpp"

using namespace wsc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("wsc_cli_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "wscbench");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  auto* old_out = std::cout.rdbuf(out.rdbuf());
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  const int code = cli_main(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("generate is deterministic and validates input") {
  TempDir d;
  CHECK(run({"generate", "--pairs", "1", "--count", "1", "--seed", "7", "--out", d / "a"}).code == 0);
  CHECK(run({"generate", "--pairs", "1", "--count", "1", "--seed", "7", "--out", d / "b"}).code == 0);
  const auto a = read_text_file(d / "a/p1_i000.json");
  CHECK(a == read_text_file(d / "b/p1_i000.json"));
  CHECK(load_instance(d / "a/p1_i000.json").n() == 16);
  CHECK(read_text_file(d / "a/manifest.json") == read_text_file(d / "b/manifest.json"));
  CHECK(run({"generate", "--pairs", "0", "--seed", "1", "--out", d / "c"}).code == kExitUsage);
  CHECK(run({"generate", "--pairs", "1", "--out", d / "c"}).code == kExitUsage);
  CHECK(run({"generate", "--grid", "2x2", "--seed", "1", "--out", d / "g"}).code == 0);
  CHECK(run({"generate", "--grid", "2by2", "--seed", "1", "--out", d / "g"}).code == kExitUsage);
}

TEST_CASE("solve appends deterministic rows") {
  TempDir d;
  run({"generate", "--pairs", "1", "--seed", "7", "--out", d / "i"});
  const std::string inst = d / "i/p1_i000.json";
  CHECK(run({"solve", "--solver", "sa", "--instance", inst, "--seed", "3", "--log", d / "runs.csv"}).code == 0);
  CHECK(run({"solve", "--solver", "sa", "--instance", inst, "--seed", "3", "--log", d / "runs.csv"}).code == 0);
  const auto rows = parse_run_log(read_text_file(d / "runs.csv"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].success);
  CHECK(rows[0].work == rows[1].work);
  CHECK(rows[0].seed == rows[1].seed);
  CHECK(rows[0].t_ann_work == rows[1].t_ann_work);

  CHECK(run({"solve", "--solver", "bogus", "--instance", inst, "--seed", "1"}).code == kExitUsage);
  CHECK(run({"solve", "--solver", "sa", "--instance", d / "missing.json", "--seed", "1"}).code == kExitIo);

  auto j = nlohmann::json::parse(read_text_file(inst));
  j["layout"] = nullptr;
  write_text_file(d / "flat.json", j.dump());
  const auto r = run({"solve", "--solver", "ss", "--instance", d / "flat.json", "--seed", "1"});
  CHECK(r.code == kExitValidation);
  CHECK(r.err.find("HCM/SS require cell structure") != std::string::npos);
}

TEST_CASE("bench is resumable and deterministic") {
  TempDir d;
  const std::string plan = R"({"instances": {"pairs": [1, 2], "count": 5, "seed": 3},
    "solvers": [{"solver": "sa", "grid": [{"sa": {"steps": 10, "sweeps_per_beta": 4}}]},
                {"solver": "pt-icm", "grid": [{"pt": {"sweeps": 20}}]}],
    "trials": 4, "seed": 9, "reference": {"runs": 1, "sweeps": 200}, "output": "out"})";
  write_text_file(d / "plan.json", plan);
  auto r = run({"bench", d / "plan.json"});
  REQUIRE(r.code == 0);
  for (const char* f : {"runs.csv", "tts.csv", "tts_instances.csv", "fit.json", "report.json",
                        "instances/manifest.json"})
    CHECK(fs::exists(d.path / "out" / f));
  auto strip = [](std::vector<RunRecord> v) {
    for (auto& x : v) x.wall_ns = 0;
    return v;
  };
  const auto first = strip(parse_run_log(read_text_file(d / "out/runs.csv")));
  CHECK(first.size() == 2 * 5 * 2 * 4);

  // Truncate mid-row, as an interrupted run would, then resume.
  const auto text = read_text_file(d / "out/runs.csv");
  write_text_file(d / "out/runs.csv", text.substr(0, text.size() / 2));
  r = run({"bench", d / "plan.json"});
  REQUIRE(r.code == 0);
  CHECK(strip(parse_run_log(read_text_file(d / "out/runs.csv"))) == first);

  r = run({"bench", d / "plan.json", "--out", d / "other", "--jobs", "3"});
  REQUIRE(r.code == 0);
  CHECK(strip(parse_run_log(read_text_file(d / "other/runs.csv"))) == first);

  const auto report = nlohmann::json::parse(read_text_file(d / "out/report.json"));
  CHECK(report["tool_version"] == std::string(kToolVersion));
  CHECK(report.contains("plan"));

  write_text_file(d / "bad.json", R"({"instances": {"pairs": [1]}, "solvers": [{"solver": "qmc"}], "output": "bad"})");
  CHECK(run({"bench", d / "bad.json"}).code == kExitValidation);
  CHECK(!fs::exists(d.path / "bad"));
}

TEST_CASE("tts and fit subcommands") {
  TempDir d;
  std::string log = std::string(kRunLogHeader) + "\n";
  for (int t = 0; t < 4; ++t) log += "sa,16,a," + std::to_string(t) + "," + (t < 2 ? "1" : "0") + ",100,5,100\n";
  write_text_file(d / "runs.csv", log);
  CHECK(run({"tts", "--log", d / "runs.csv", "--out", d / "tts.csv"}).code == 0);
  CHECK(read_text_file(d / "tts.csv").find("sa,16,50,664.38") != std::string::npos);

  std::string pts = "n,tts\n";
  for (double n : {180.0, 296.0, 489.0, 681.0, 945.0})
    pts += std::to_string(n) + "," + std::to_string(std::pow(10, 2 + 0.1 * std::sqrt(n))) + "\n";
  write_text_file(d / "pts.csv", pts);
  REQUIRE(run({"fit", "--tts", d / "pts.csv", "--model", "linear", "--last-k", "3", "--out", d / "fit.json",
               "--curve", d / "curve.csv"})
              .code == 0);
  const auto j = nlohmann::json::parse(read_text_file(d / "fit.json"));
  CHECK(j["fits"]["data"]["coefficients"]["b"]["value"].get<double>() == doctest::Approx(0.1).epsilon(1e-6));
  CHECK(j["fits"]["data"]["coefficients"]["a"]["value"].get<double>() == doctest::Approx(2).epsilon(1e-6));
  CHECK(run({"fit", "--tts", d / "pts.csv", "--model", "cubic"}).code == kExitUsage);
}

TEST_CASE("twolevel subcommand") {
  TempDir d;
  CHECK(run({"twolevel", "--n-max", "16", "--t-ann", "500", "--dt", "0.01", "--noise", "0.1", "--out",
             d / "tl.csv"})
            .code == 0);
  const auto csv = read_text_file(d / "tl.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 33);
  CHECK(run({"twolevel", "--dt", "-1"}).code == kExitValidation);
}

TEST_CASE("import stores and lists curves") {
  TempDir d;
  write_text_file(d / "curve.csv", "n,tts\n180,1.5\n296,2\n489,3\n681,5\n945,9\n");
  auto r = run({"import", "--csv", d / "curve.csv", "--label", "dw2x", "--units", "us", "--store", d / "ext"});
  CHECK(r.code == 0);
  r = run({"import", "--list", "--store", d / "ext"});
  CHECK(r.out.find("dw2x\tus\t5 points") != std::string::npos);
  write_text_file(d / "bad.csv", "n,tts\n180,1.5\n296,abc\n");
  r = run({"import", "--csv", d / "bad.csv", "--label", "x", "--store", d / "ext"});
  CHECK(r.code == kExitValidation);
  CHECK(r.err.find("line 3") != std::string::npos);
}

TEST_CASE("landscape subcommand") {
  TempDir d;
  run({"generate", "--pairs", "1", "--seed", "2", "--out", d / "i"});
  const auto r = run({"landscape", "--instance", d / "i/p1_i000.json", "--sweeps", "400", "--seed", "1", "--out",
                      d / "l"});
  CHECK(r.code == 0);
  CHECK(fs::exists(d.path / "l/p1_i000_hist.csv"));
  CHECK(fs::exists(d.path / "l/p1_i000_verdict.json"));
  const auto j = nlohmann::json::parse(read_text_file(d / "l/landscape.json"));
  CHECK(j["peak_fraction"].is_null());
}
