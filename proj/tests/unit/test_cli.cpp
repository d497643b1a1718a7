#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "admd/io.hpp"
#include "admd/text.hpp"
#include "cli.hpp"
#include "oracles.hpp"

using namespace admd;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "admd");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(int(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string data(const std::string& name) { return std::string(ADMD_DATA_DIR) + "/" + name; }

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

}  // namespace

TEST_CASE("fit on the bundled single tone finds one cycle per wave") {
  const auto dir = oracle::scratch_dir("cli_fit");
  const auto r = invoke({"fit", data("single_tone.csv"), "--niw", "4", "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "manifest.json"));
  const auto model = load_model((dir / "model.json").string());
  const auto table = mode_table(model);
  REQUIRE(table.rows.size() == 2);
  CHECK(table.number(0, "frequency_per_wave") == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(table.number(1, "frequency_per_wave") == doctest::Approx(1.0).epsilon(1e-6));

  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["command"] == "fit");
  CHECK(manifest.contains("duration_seconds"));
  CHECK(manifest["outputs"].size() >= 1);
}

TEST_CASE("usage errors exit with 2") {
  const auto dir = oracle::scratch_dir("cli_usage");
  auto r = invoke({"fit", data("single_tone.csv"), "--nde", "5", "--out", dir.string()});
  CHECK(r.code == 2);
  r = invoke({"fit", (dir / "missing.csv").string(), "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("missing.csv") != std::string::npos);
  r = invoke({"bogus"});
  CHECK(r.code == 2);
  r = invoke({});
  CHECK(r.code == 2);
  r = invoke({"--help"});
  CHECK(r.code == 0);
}

TEST_CASE("forecast scores the continuation of the training window") {
  const auto dir = oracle::scratch_dir("cli_forecast");
  REQUIRE(invoke({"fit", data("single_tone.csv"), "--niw", "4", "--out", (dir / "fit").string()}).code == 0);
  const auto r = invoke({"forecast", (dir / "fit" / "model.json").string(), data("single_tone.csv"),
                         "--horizon-waves", "2", "--out", (dir / "fc").string()});
  REQUIRE(r.code == 0);
  const auto metrics = nlohmann::json::parse(slurp(dir / "fc" / "metrics.json"));
  CHECK(metrics["nrmse"].get<double>() <= 1e-6);
  CHECK(metrics["steps_scored"].get<int>() == 64);
  std::ifstream in(dir / "fc" / "forecast.csv");
  const auto table = read_table(in);
  CHECK(table.columns == std::vector<std::string>{"t/T_e", "variable", "predicted", "measured"});
  CHECK(table.rows.size() == 2 * 64);
  // Training covered waves [0, 4) of the record, so the forecast starts at 4.
  CHECK(table.number(0, "t/T_e") == doctest::Approx(4.0));
}

TEST_CASE("zero horizon writes an empty forecast and no metrics") {
  const auto dir = oracle::scratch_dir("cli_horizon0");
  REQUIRE(invoke({"fit", data("single_tone.csv"), "--out", (dir / "fit").string()}).code == 0);
  const auto r = invoke({"forecast", (dir / "fit" / "model.json").string(), data("single_tone.csv"),
                         "--horizon-waves", "0", "--out", (dir / "fc").string()});
  CHECK(r.code == 0);
  std::ifstream in(dir / "fc" / "forecast.csv");
  CHECK(read_table(in).rows.empty());
  CHECK_FALSE(fs::exists(dir / "fc" / "metrics.json"));
}

TEST_CASE("forecast against a record with other variables exits with 3") {
  const auto dir = oracle::scratch_dir("cli_names");
  REQUIRE(invoke({"fit", data("single_tone.csv"), "--out", (dir / "fit").string()}).code == 0);
  // Same data with the columns swapped.
  std::ifstream in(data("single_tone.csv"));
  const auto table = read_table(in);
  Table swapped;
  swapped.columns = {table.columns[0], table.columns[2], table.columns[1]};
  for (const auto& row : table.rows) swapped.add_row({row[0], row[2], row[1]});
  save_table((dir / "swapped.csv").string(), swapped);
  const auto r = invoke({"forecast", (dir / "fit" / "model.json").string(), (dir / "swapped.csv").string(),
                         "--out", (dir / "fc").string()});
  CHECK(r.code == 3);
}

TEST_CASE("experiment output does not depend on --jobs") {
  const auto dir = oracle::scratch_dir("cli_experiment");
  write_text(dir / "sweep.cfg",
             "niw_set = 1, 2\nnow_set = 1, 2\nnde_set = 0, 1\nnts_set = 0, 4\nsamples = 8\nseed = 3\n");
  const auto a = invoke({"experiment", data("two_tone.csv"), "--config-file", (dir / "sweep.cfg").string(),
                         "--out-dir", (dir / "a").string(), "--jobs", "1"});
  const auto b = invoke({"experiment", data("two_tone.csv"), "--config-file", (dir / "sweep.cfg").string(),
                         "--out-dir", (dir / "b").string(), "--jobs", "2"});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  for (const auto* name : {"report.json", "summary.csv", "accounting.csv", "best_setups.csv", "outliers.csv"}) {
    CAPTURE(name);
    REQUIRE(fs::exists(dir / "a" / name));
    CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
  }
  CHECK(fs::exists(dir / "a" / "modes_plain_statistics.csv"));
  CHECK(fs::exists(dir / "a" / "manifest.json"));
}

TEST_CASE("experiment config errors exit with 2") {
  const auto dir = oracle::scratch_dir("cli_bad_config");
  write_text(dir / "empty.cfg", "niw_set =\n");
  auto r = invoke({"experiment", data("two_tone.csv"), "--config-file", (dir / "empty.cfg").string(), "--out-dir",
                   (dir / "out").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("niw_set") != std::string::npos);
  write_text(dir / "unknown.cfg", "samples = 3\ncolour = red\n");
  r = invoke({"experiment", data("two_tone.csv"), "--config-file", (dir / "unknown.cfg").string(), "--out-dir",
              (dir / "out").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 2") != std::string::npos);
}

TEST_CASE("modes over fitted models") {
  const auto dir = oracle::scratch_dir("cli_modes");
  std::vector<std::string> models;
  for (const auto* start : {"3", "37", "91"}) {
    const auto out = dir / (std::string("fit") + start);
    REQUIRE(invoke({"fit", data("two_tone.csv"), "--niw", "4", "--nts", "2", "--start", start, "--out",
                    out.string()})
                .code == 0);
    models.push_back((out / "model.json").string());
  }

  // A single model gives one sorted listing whose participation sums to one.
  auto r = invoke({"modes", models[0], "--out", (dir / "one").string()});
  REQUIRE(r.code == 0);
  {
    std::ifstream in(dir / "one" / "modes.csv");
    const auto table = read_table(in);
    double total = 0.0;
    for (std::size_t k = 0; k < table.rows.size(); ++k) total += table.number(k, "participation");
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t k = 1; k < table.rows.size(); ++k) {
      CHECK(table.number(k - 1, "im_omega") <= table.number(k, "im_omega"));
    }
  }

  // Identical models give zero spread.
  r = invoke({"modes", models[0], models[0], models[0], "--out", (dir / "same").string()});
  REQUIRE(r.code == 0);
  {
    std::ifstream in(dir / "same" / "mode_statistics.csv");
    const auto table = read_table(in);
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
      for (const std::string q : {"re_omega", "im_omega", "participation"}) {
        CHECK(table.number(k, q + "_q1") == table.number(k, q + "_q3"));
      }
    }
  }

  // Different windows of the same two-tone record share the top slots'
  // frequencies: one wave frequency and the golden ratio times it.
  r = invoke({"modes", models[0], models[1], models[2], "--participation", "energy", "--steps", "64", "--out",
              (dir / "three").string()});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "three" / "component_bands.csv"));
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  for (int m = 0; m < 3; ++m) {
    std::ifstream in(dir / "three" / ("modes_" + std::to_string(m) + ".csv"));
    const auto table = read_table(in);
    auto has = [&](double f) {
      for (std::size_t k = 0; k < table.rows.size(); ++k) {
        if (std::abs(std::abs(table.number(k, "frequency_per_wave")) - f) < 1e-6) return true;
      }
      return false;
    };
    CHECK(has(1.0));
    CHECK(has(golden));
  }
}

TEST_CASE("modes over models of different size exit with 3") {
  const auto dir = oracle::scratch_dir("cli_modes_mismatch");
  REQUIRE(invoke({"fit", data("two_tone.csv"), "--out", (dir / "a").string()}).code == 0);
  REQUIRE(invoke({"fit", data("two_tone.csv"), "--nts", "2", "--out", (dir / "b").string()}).code == 0);
  const auto r = invoke({"modes", (dir / "a" / "model.json").string(), (dir / "b" / "model.json").string(), "--out",
                         (dir / "out").string()});
  CHECK(r.code == 3);
}

TEST_CASE("synth writes a readable record") {
  const auto dir = oracle::scratch_dir("cli_synth");
  const auto r = invoke({"synth", "quasi-periodic", "--variables", "3", "--steps", "500", "--seed", "4", "--out",
                         (dir / "qp.csv").string()});
  REQUIRE(r.code == 0);
  std::ifstream in(dir / "qp.csv");
  const auto ts = read_csv(in);
  CHECK(ts.variables() == 3);
  CHECK(ts.steps() == 500);
  CHECK(invoke({"synth", "square", "--out", (dir / "x.csv").string()}).code == 2);
}
