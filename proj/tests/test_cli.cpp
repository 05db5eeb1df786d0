#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cmimo/cli.hpp"
#include "cmimo/report_io.hpp"
#include "support.hpp"

using namespace cmimo;
namespace ts = testing_support;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "cmimo_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string write_channel(const std::string& name, const ComplexMatrix& h) {
  const fs::path p = scratch(name);
  std::ofstream(p) << matrix_to_json(h).dump();
  return p.string();
}

RunConfig config(Command c, const std::string& input) {
  RunConfig cfg;
  cfg.command = c;
  cfg.input = input;
  return cfg;
}

int invoke(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "compound-mimo");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST_CASE("capacity on the identity channel") {
  RunConfig cfg = config(Command::Capacity, write_channel("eye.json", ComplexMatrix::Identity(2, 2)));
  cfg.constraint = SumPower{2.0};
  const RunResult res = run(cfg);
  REQUIRE(res.exit_code == kExitOk);
  const Json j = Json::parse(res.report);
  CHECK(std::abs(j["report"]["c_maxmin"].get<double>() - 2.0 * std::log(2.0)) <= 1e-14);
  CHECK(std::abs(j["report"]["duality_gap"].get<double>()) <= 1e-8);
  CHECK(res.table.find("1.38629436112") != std::string::npos);
}

TEST_CASE("bits divide capacities by ln 2 at render time") {
  RunConfig cfg = config(Command::Capacity, write_channel("eye.json", ComplexMatrix::Identity(2, 2)));
  cfg.bits = true;
  const Json j = Json::parse(run(cfg).report);
  CHECK(std::abs(j["report"]["c_maxmin"].get<double>() - 2.0) <= 1e-14);
  CHECK(j["units"] == "bits");
}

TEST_CASE("counterexample report carries both values") {
  const RunResult res = run(config(Command::Counterexample, ""));
  CHECK(res.exit_code == kExitOk);
  CHECK(res.report.find("15.63") != std::string::npos);
  CHECK(res.report.find("15.5") != std::string::npos);
  CHECK(res.table.find("15.631898") != std::string::npos);
}

TEST_CASE("counterexample with an exploratory search") {
  RunConfig cfg = config(Command::Counterexample, "");
  cfg.search_trials = 3;
  cfg.seed = 4;
  const Json j = Json::parse(run(cfg).report);
  CHECK(j["search"]["exploratory"] == true);
}

TEST_CASE("verify on a seeded 3x3 instance") {
  RunConfig cfg = config(Command::Verify, write_channel("v.json", ts::random_complex(3, 3, 2024)));
  cfg.epsilon = 0.4;
  cfg.seed = 1;
  cfg.samples = 5000;
  cfg.grid_step = 2e-2;
  const RunResult res = run(cfg);
  CHECK(res.exit_code == kExitOk);
  const Json j = Json::parse(res.report);
  for (const auto& c : j["verification"]["checks"]) CHECK(c["passed"] == true);
}

TEST_CASE("identical configs give byte-identical reports") {
  RunConfig cfg = config(Command::Verify, write_channel("d.json", ts::random_complex(2, 3, 5)));
  cfg.epsilon = 0.2;
  cfg.samples = 1000;
  cfg.seed = 99;
  cfg.grid_step = 5e-2;
  CHECK(run(cfg).report == run(cfg).report);
  cfg.threads = 3;
  const std::string threaded = run(cfg).report;
  cfg.threads = 1;
  CHECK(run(cfg).report == threaded);
}

TEST_CASE("capacity report round-trips bit-exactly") {
  RunConfig cfg = config(Command::Capacity, write_channel("rt.json", ts::random_complex(3, 2, 8)));
  cfg.epsilon = 0.3;
  cfg.gamma = 3.7;
  cfg.output = scratch("rt_report.json").string();
  CHECK(invoke({"capacity", "--input", cfg.input, "--epsilon", "0.3", "--gamma", "3.7", "--output",
                cfg.output}) == kExitOk);
  std::ifstream f(cfg.output);
  const Json first = Json::parse(f);
  const CapacityReport rep = capacity_report_from_json(first["report"]);
  const Json again = capacity_report_to_json(rep);
  CHECK(again == first["report"]);
  CHECK(again.dump() == first["report"].dump());
}

TEST_CASE("channel parsing") {
  const ComplexMatrix h = parse_channel_json(R"({"rows":1,"cols":2,"entries":[[1,2],[3,-4]]})");
  CHECK(h(0, 1) == Complex(3.0, -4.0));
  const ComplexMatrix c = parse_channel_csv("# comment\n1,2\n\n3,4\n");
  CHECK(c.rows() == 2);
  CHECK(c(1, 0) == Complex(3.0, 0.0));
  try {
    parse_channel_json(R"({"rows":2,"cols":2,"entries":[[1,0]]})");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
    CHECK(std::string(e.what()).find("entries") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_channel_csv("1,2\n3\n"), Error);
  CHECK_THROWS_AS(parse_channel_json("{nope"), Error);

  const fs::path csv = scratch("h.csv");
  std::ofstream(csv) << "2,0\n0,1\n";
  RunConfig cfg = config(Command::Capacity, csv.string());
  CHECK(run(cfg).exit_code == kExitOk);
}

TEST_CASE("sweep is monotone along both axes") {
  std::string out;
  const std::string input = write_channel("sw.json", ts::random_complex(3, 3, 12));
  REQUIRE(invoke({"sweep", "--input", input, "--grid", "0:1.2:7,0.05:20:6"}, &out) == kExitOk);
  const Json j = Json::parse(out);
  const auto& rows = j["report"]["c_maxmin"];
  REQUIRE(rows.size() == 7);
  for (std::size_t e = 0; e < rows.size(); ++e) {
    REQUIRE(rows[e].size() == 6);
    for (std::size_t g = 0; g < rows[e].size(); ++g) {
      if (e > 0) CHECK(rows[e][g].get<double>() <= rows[e - 1][g].get<double>() + 1e-12);
      if (g > 0) CHECK(rows[e][g].get<double>() >= rows[e][g - 1].get<double>() - 1e-12);
    }
  }
}

TEST_CASE("argument errors map to exit 1 with a named field") {
  std::string err;
  const std::string input = write_channel("e.json", ComplexMatrix::Identity(2, 2));
  CHECK(invoke({"capacity", "--input", input, "--constraint", "half"}, nullptr, &err) == kExitValidation);
  CHECK(err.find("--constraint") != std::string::npos);
  CHECK(invoke({"capacity", "--input", input, "--gamma", "-1"}, nullptr, &err) == kExitValidation);
  CHECK(err.find("--gamma") != std::string::npos);
  CHECK(invoke({"capacity", "--input", input, "--norm", "frobenius"}, nullptr, &err) == kExitValidation);
  CHECK(err.find("UnsupportedNorm") != std::string::npos);
  CHECK(invoke({"capacity"}, nullptr, &err) == kExitValidation);
  CHECK(err.find("--input") != std::string::npos);
  CHECK(invoke({"sweep", "--input", input, "--grid", "0:1"}, nullptr, &err) == kExitValidation);
  CHECK(err.find("--grid") != std::string::npos);
  CHECK(invoke({"capacity", "--input", scratch("missing.json").string()}, nullptr, &err) == kExitValidation);
  CHECK(invoke({"frobnicate"}, nullptr, &err) == kExitValidation);
}

TEST_CASE("constraint and axis parsing") {
  CHECK(std::get<SumPower>(parse_constraint("sum", 3.0)).budget == 3.0);
  CHECK(std::get<SumPower>(parse_constraint("sum:2.5", 3.0)).budget == 2.5);
  CHECK(std::get<MaxPower>(parse_constraint("max:0.5", 3.0)).cap == 0.5);
  CHECK_THROWS_AS(parse_constraint("max", 1.0), Error);
  const GridAxis a = parse_axis("0:1:5", "--grid");
  CHECK(a.steps == 5);
  CHECK(a.at(0) == 0.0);
  CHECK(a.at(4) == 1.0);
  CHECK(a.at(2) == 0.5);
  CHECK_THROWS_AS(parse_axis("0:1:0", "--grid"), Error);
}

TEST_CASE("minmax and bounds commands") {
  const std::string input = write_channel("mb.json", diag_embed(Eigen::Vector2d(2.0, 1.0), 2, 2));
  std::string out;
  REQUIRE(invoke({"minmax", "--input", input, "--epsilon", "1", "--norm", "frobenius", "--constraint", "sum:2"},
                 &out) == kExitOk);
  CHECK(std::abs(Json::parse(out)["report"]["c_minmax"].get<double>() - 1.1896421896861051) <= 1e-4);
  REQUIRE(invoke({"bounds", "--input", input, "--epsilon", "0.5", "--norm", "frobenius"}, &out) == kExitOk);
  const Json b = Json::parse(out)["report"];
  CHECK(b["lower"].get<double>() <= b["upper"].get<double>());
}
