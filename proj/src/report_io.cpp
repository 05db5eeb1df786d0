#include "cmimo/report_io.hpp"

#include <fstream>
#include <sstream>
#include <vector>

namespace cmimo {

namespace {

[[noreturn]] void parse_fail(const std::string& msg) { throw Error(ErrorCode::ParseError, msg); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_fail("--input: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ChannelMatrix parse_channel_json(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    parse_fail(std::string("channel: malformed JSON (") + e.what() + ")");
  }
  if (!doc.is_object()) parse_fail("channel: top level must be an object");
  for (const char* key : {"rows", "cols", "entries"}) {
    if (!doc.contains(key)) parse_fail(std::string("channel: missing field '") + key + "'");
  }
  if (!doc["rows"].is_number_integer() || doc["rows"].get<long long>() < 1)
    parse_fail("channel.rows: must be a positive integer");
  if (!doc["cols"].is_number_integer() || doc["cols"].get<long long>() < 1)
    parse_fail("channel.cols: must be a positive integer");
  const auto rows = doc["rows"].get<Eigen::Index>();
  const auto cols = doc["cols"].get<Eigen::Index>();
  const Json& entries = doc["entries"];
  if (!entries.is_array()) parse_fail("channel.entries: must be an array of [re, im] pairs");
  if (static_cast<Eigen::Index>(entries.size()) != rows * cols) {
    throw Error(ErrorCode::DimensionMismatch,
                "channel.entries: expected rows*cols = " + std::to_string(rows * cols) +
                    " pairs, got " + std::to_string(entries.size()));
  }
  ChannelMatrix m(rows, cols);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const Json& e = entries[k];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      parse_fail("channel.entries[" + std::to_string(k) + "]: expected [re, im]");
    }
    const auto i = static_cast<Eigen::Index>(k) / cols;
    const auto j = static_cast<Eigen::Index>(k) % cols;
    m(i, j) = Complex(e[0].get<double>(), e[1].get<double>());
  }
  require_valid_channel(m, "channel");
  return m;
}

ChannelMatrix parse_channel_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        parse_fail("channel csv line " + std::to_string(line_no) + ": '" + cell +
                   "' is not a number");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "channel csv line " + std::to_string(line_no) + ": expected " +
                      std::to_string(rows.front().size()) + " columns");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) parse_fail("channel csv: no data rows");
  ChannelMatrix m(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  require_valid_channel(m, "channel");
  return m;
}

ChannelMatrix load_channel(const std::string& path) {
  const std::string text = read_file(path);
  const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  return csv ? parse_channel_csv(text) : parse_channel_json(text);
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json entries = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      entries.push_back({m(i, j).real(), m(i, j).imag()});
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

ComplexMatrix matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  ComplexMatrix m(rows, cols);
  const Json& e = j.at("entries");
  for (Eigen::Index k = 0; k < rows * cols; ++k)
    m(k / cols, k % cols) = Complex(e.at(k).at(0).get<double>(), e.at(k).at(1).get<double>());
  return m;
}

Json vector_to_json(const RealVector& v, double scale) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i) * scale);
  return out;
}

RealVector vector_from_json(const Json& j) {
  RealVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

Json constraint_to_json(const PowerConstraint& c) {
  if (const auto* p = std::get_if<SumPower>(&c)) return Json{{"type", "sum"}, {"budget", p->budget}};
  return Json{{"type", "max"}, {"cap", std::get<MaxPower>(c).cap}};
}

PowerConstraint constraint_from_json(const Json& j) {
  if (j.at("type") == "sum") return SumPower{j.at("budget").get<double>()};
  return MaxPower{j.at("cap").get<double>()};
}

Json capacity_report_to_json(const CapacityReport& rep, double unit_scale) {
  return Json{
      {"c_maxmin", rep.c_maxmin * unit_scale},
      {"c_minmax", rep.c_minmax * unit_scale},
      {"duality_gap", rep.duality_gap * unit_scale},
      {"gamma", rep.star.gamma},
      {"sigma0", vector_to_json(rep.sigma0)},
      {"sigma_star", vector_to_json(rep.star.sigma)},
      {"lambda_star", vector_to_json(rep.star.lambda)},
      {"q_star", matrix_to_json(rep.q_star)},
      {"h_star", matrix_to_json(rep.h_star)},
      {"saddle",
       {{"max_side_gap", rep.saddle.max_side * unit_scale},
        {"min_side_gap", rep.saddle.min_side * unit_scale},
        {"certified", rep.saddle_certified}}},
      {"all_zero_channel", rep.all_zero_channel},
      {"solver_iterations", rep.solver_iterations},
  };
}

CapacityReport capacity_report_from_json(const Json& j, double unit_scale) {
  CapacityReport rep;
  rep.c_maxmin = j.at("c_maxmin").get<double>() / unit_scale;
  rep.c_minmax = j.at("c_minmax").get<double>() / unit_scale;
  rep.duality_gap = j.at("duality_gap").get<double>() / unit_scale;
  rep.star.gamma = j.at("gamma").get<double>();
  rep.sigma0 = vector_from_json(j.at("sigma0"));
  rep.star.sigma = vector_from_json(j.at("sigma_star"));
  rep.star.lambda = vector_from_json(j.at("lambda_star"));
  rep.q_star = matrix_from_json(j.at("q_star"));
  rep.h_star = matrix_from_json(j.at("h_star"));
  rep.saddle.max_side = j.at("saddle").at("max_side_gap").get<double>() / unit_scale;
  rep.saddle.min_side = j.at("saddle").at("min_side_gap").get<double>() / unit_scale;
  rep.saddle_certified = j.at("saddle").at("certified").get<bool>();
  rep.all_zero_channel = j.at("all_zero_channel").get<bool>();
  rep.solver_iterations = j.at("solver_iterations").get<int>();
  return rep;
}

Json verification_report_to_json(const VerificationReport& rep) {
  Json checks = Json::array();
  for (const Check& c : rep.checks) {
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"observed", c.observed},
                      {"bound", c.bound},
                      {"margin", c.margin},
                      {"sense", c.sense == CheckSense::AtLeast ? ">=" : "<="}});
  }
  Json out{{"checks", checks},
           {"all_passed", rep.all_passed()},
           {"min_observed_mi", rep.min_observed_mi}};
  if (rep.worst_delta.size() > 0) out["worst_delta"] = matrix_to_json(rep.worst_delta);
  return out;
}

Json counterexample_to_json(const CounterexampleL1& ce) {
  return Json{{"sigma", {2.0, 1.0}},
              {"lambda", {4.0, 3.0}},
              {"epsilon", 1.0},
              {"norm", "nuclear"},
              {"diag_restricted_min", ce.diag_restricted_min},
              {"diag_argmin", {ce.diag_argmin_first, ce.diag_argmin_second}},
              {"full_matrix_value", ce.full_matrix_value},
              {"full_delta", matrix_to_json(ComplexMatrix::Constant(2, 2, Complex(-0.5, 0.0)))},
              {"full_delta_nuclear_norm", ce.full_delta_nuclear_norm},
              {"full_below_diag", ce.full_below_diag}};
}

Json lemma_search_to_json(const LemmaSearchResult& res) {
  Json out{{"exploratory", true},
           {"norm", std::string(to_string(res.kind))},
           {"trials", res.trials},
           {"best_margin", res.best_margin},
           {"candidate_found", res.best_margin > 0.0}};
  if (res.best_margin > 0.0) {
    out["best_trial"] = res.best_trial;
    out["best_sigma"] = vector_to_json(res.best_s);
    out["best_lambda"] = vector_to_json(res.best_d);
    out["best_epsilon"] = res.best_epsilon;
    out["best_delta"] = matrix_to_json(res.best_delta);
  }
  return out;
}

}  // namespace cmimo
