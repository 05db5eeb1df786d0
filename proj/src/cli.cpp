#include "cmimo/cli.hpp"

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>

#include "cmimo/parallel.hpp"
#include "cmimo/report_io.hpp"
#include "cmimo/verification.hpp"

namespace cmimo {

namespace {

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string_view command_name(Command c) {
  switch (c) {
    case Command::Capacity: return "capacity";
    case Command::Minmax: return "minmax";
    case Command::Bounds: return "bounds";
    case Command::Verify: return "verify";
    case Command::Counterexample: return "counterexample";
    case Command::Sweep: return "sweep";
  }
  return "unknown";
}

double parse_number(std::string_view text, std::string_view field) {
  try {
    std::size_t used = 0;
    const std::string s(text);
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError,
                std::string(field) + ": '" + std::string(text) + "' is not a number");
  }
}

void require_input(const RunConfig& cfg) {
  if (cfg.input.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "--input: required for the " + std::string(command_name(cfg.command)) +
                    " command");
  }
}

void check_scalars(const RunConfig& cfg) {
  if (!(cfg.gamma > 0.0) || !std::isfinite(cfg.gamma))
    throw Error(ErrorCode::InvalidArgument, "--gamma: must be positive");
  if (!(cfg.epsilon >= 0.0) || !std::isfinite(cfg.epsilon))
    throw Error(ErrorCode::InvalidArgument, "--epsilon: must be >= 0");
}

struct Loaded {
  ChannelMatrix h0;
  PowerConstraint constraint;
};

Loaded load(const RunConfig& cfg) {
  require_input(cfg);
  check_scalars(cfg);
  Loaded l{load_channel(cfg.input), SumPower{}};
  l.constraint = cfg.constraint.value_or(SumPower{static_cast<double>(l.h0.cols())});
  validate(l.constraint);
  return l;
}

Json header(const RunConfig& cfg, const Loaded* l) {
  Json j{{"command", std::string(command_name(cfg.command))},
         {"units", cfg.bits ? "bits" : "nats"}};
  if (l) {
    j["rows"] = l->h0.rows();
    j["cols"] = l->h0.cols();
    j["gamma"] = cfg.gamma;
    j["epsilon"] = cfg.epsilon;
    j["norm"] = std::string(to_string(cfg.norm));
    j["constraint"] = constraint_to_json(l->constraint);
  }
  return j;
}

RunResult run_capacity(const RunConfig& cfg, double scale) {
  if (cfg.norm != NormKind::Spectral) {
    throw Error(ErrorCode::UnsupportedNorm,
                "--norm: capacity needs spectral; use minmax or bounds for " +
                    std::string(to_string(cfg.norm)));
  }
  const Loaded l = load(cfg);
  const CapacityReport rep =
      compound_capacity(l.h0, {NormKind::Spectral, cfg.epsilon}, cfg.gamma, l.constraint);
  Json j = header(cfg, &l);
  j["report"] = capacity_report_to_json(rep, scale);

  std::ostringstream t;
  t << "C_maxmin      " << fmt12(rep.c_maxmin * scale) << '\n'
    << "C_minmax      " << fmt12(rep.c_minmax * scale) << '\n'
    << "duality gap   " << fmt12(rep.duality_gap * scale) << '\n'
    << "saddle        " << (rep.saddle_certified ? "certified" : "NOT certified") << '\n'
    << "mode  sigma0          sigma*          lambda*\n";
  for (Eigen::Index i = 0; i < rep.sigma0.size(); ++i) {
    char line[128];
    std::snprintf(line, sizeof line, "%-5ld %-15.12g %-15.12g %.12g\n", static_cast<long>(i),
                  rep.sigma0(i), rep.star.sigma(i), rep.star.lambda(i));
    t << line;
  }
  return {rep.saddle_certified ? kExitOk : kExitNoConvergence, j.dump(2), t.str(), ""};
}

RunResult run_minmax(const RunConfig& cfg, double scale) {
  const Loaded l = load(cfg);
  const MinmaxResult res =
      minmax_capacity(l.h0, {cfg.norm, cfg.epsilon}, cfg.gamma, l.constraint);
  Json j = header(cfg, &l);
  j["report"] = {{"c_minmax", res.capacity * scale},
                 {"sigma", vector_to_json(res.sigma)},
                 {"lambda", vector_to_json(res.lambda)},
                 {"iterations", res.iterations},
                 {"converged", res.converged}};
  std::ostringstream t;
  t << "C_minmax      " << fmt12(res.capacity * scale) << '\n'
    << "iterations    " << res.iterations << '\n'
    << "converged     " << (res.converged ? "yes" : "no") << '\n';
  return {res.converged ? kExitOk : kExitNoConvergence, j.dump(2), t.str(),
          res.converged ? "" : "minmax: descent hit the iteration cap; best iterate reported"};
}

RunResult run_bounds(const RunConfig& cfg, double scale) {
  const Loaded l = load(cfg);
  const CapacityBounds b =
      capacity_bounds_other_norm(l.h0, cfg.norm, cfg.epsilon, cfg.gamma, l.constraint);
  Json j = header(cfg, &l);
  j["report"] = {{"lower", b.lower * scale},
                 {"upper", b.upper * scale},
                 {"alpha_low", b.alpha_low},
                 {"alpha_high", b.alpha_high}};
  std::ostringstream t;
  t << "lower         " << fmt12(b.lower * scale) << '\n'
    << "upper         " << fmt12(b.upper * scale) << '\n';
  return {kExitOk, j.dump(2), t.str(), ""};
}

RunResult run_verify(const RunConfig& cfg, double scale) {
  if (cfg.norm != NormKind::Spectral) {
    throw Error(ErrorCode::UnsupportedNorm, "--norm: verify needs a spectral region");
  }
  const Loaded l = load(cfg);
  VerificationConfig vc;
  vc.samples = cfg.samples;
  vc.seed = cfg.seed;
  vc.grid_step = cfg.grid_step;
  vc.threads = cfg.threads;
  const InstanceVerification v = verify_instance(l.h0, cfg.epsilon, cfg.gamma, l.constraint, vc);
  Json j = header(cfg, &l);
  j["samples"] = cfg.samples;
  j["seed"] = cfg.seed;
  j["capacity"] = capacity_report_to_json(v.capacity, scale);
  j["verification"] = verification_report_to_json(v.report);

  std::ostringstream t;
  t << "C_maxmin " << fmt12(v.capacity.c_maxmin * scale) << '\n';
  for (const Check& c : v.report.checks) {
    char line[256];
    std::snprintf(line, sizeof line, "%-4s %-40s observed %-20.12g %s %-20.12g margin %.3g\n",
                  c.passed ? "PASS" : "FAIL", c.name.c_str(), c.observed,
                  c.sense == CheckSense::AtLeast ? ">=" : "<=", c.bound, c.margin);
    t << line;
  }
  const bool ok = v.report.all_passed();
  return {ok ? kExitOk : kExitVerificationFailed, j.dump(2), t.str(),
          ok ? "" : "verify: at least one check failed"};
}

RunResult run_counterexample(const RunConfig& cfg) {
  const CounterexampleL1 ce = counterexample_l1();
  Json j{{"command", "counterexample"}, {"report", counterexample_to_json(ce)}};
  std::ostringstream t;
  t << "diagonal-restricted minimum  " << fmt12(ce.diag_restricted_min) << '\n'
    << "value at Delta = -0.5*ones   " << fmt12(ce.full_matrix_value) << '\n'
    << "nuclear norm of that Delta   " << fmt12(ce.full_delta_nuclear_norm) << '\n'
    << "full < diagonal              " << (ce.full_below_diag ? "yes" : "no") << '\n';
  if (cfg.search_trials > 0) {
    LemmaSearchOptions opt;
    opt.threads = cfg.threads;
    const LemmaSearchResult s = lemma_search(cfg.search_norm, cfg.search_rows, cfg.search_cols,
                                             cfg.search_trials, cfg.seed, opt);
    j["search"] = lemma_search_to_json(s);
    t << "exploratory " << to_string(s.kind) << " search over " << s.trials
      << " trials: best margin " << fmt12(s.best_margin) << '\n';
  }
  return {ce.full_below_diag ? kExitOk : kExitVerificationFailed, j.dump(2), t.str(), ""};
}

RunResult run_sweep(const RunConfig& cfg, double scale) {
  if (cfg.norm != NormKind::Spectral) {
    throw Error(ErrorCode::UnsupportedNorm, "--norm: sweep needs a spectral region");
  }
  const Loaded l = load(cfg);
  const GridAxis& ea = cfg.epsilon_axis;
  const GridAxis& ga = cfg.gamma_axis;
  for (int k = 0; k < ea.steps; ++k)
    if (!(ea.at(k) >= 0.0)) throw Error(ErrorCode::InvalidArgument, "--grid: epsilon must be >= 0");
  for (int k = 0; k < ga.steps; ++k)
    if (!(ga.at(k) > 0.0)) throw Error(ErrorCode::InvalidArgument, "--grid: gamma must be > 0");

  const int cells = ea.steps * ga.steps;
  std::vector<double> cap(static_cast<std::size_t>(cells), 0.0);
  std::vector<int> failed(static_cast<std::size_t>(cells), 0);
#pragma omp parallel for schedule(dynamic) num_threads(resolve_threads(cfg.threads))
  for (int c = 0; c < cells; ++c) {
    const int ei = c / ga.steps;
    const int gi = c % ga.steps;
    try {
      cap[static_cast<std::size_t>(c)] =
          compound_capacity(l.h0, {NormKind::Spectral, ea.at(ei)}, ga.at(gi), l.constraint)
              .c_maxmin;
    } catch (...) {
      failed[static_cast<std::size_t>(c)] = 1;
    }
  }
  for (int f : failed)
    if (f) throw Error(ErrorCode::ConvergenceFailure, "sweep: a grid point failed to solve");

  Json eps = Json::array(), gam = Json::array(), rows = Json::array();
  for (int k = 0; k < ea.steps; ++k) eps.push_back(ea.at(k));
  for (int k = 0; k < ga.steps; ++k) gam.push_back(ga.at(k));
  std::ostringstream t;
  t << "eps\\gamma";
  for (int k = 0; k < ga.steps; ++k) t << ' ' << fmt12(ga.at(k));
  t << '\n';
  for (int ei = 0; ei < ea.steps; ++ei) {
    Json row = Json::array();
    t << fmt12(ea.at(ei));
    for (int gi = 0; gi < ga.steps; ++gi) {
      const double v = cap[static_cast<std::size_t>(ei * ga.steps + gi)] * scale;
      row.push_back(v);
      t << ' ' << fmt12(v);
    }
    rows.push_back(row);
    t << '\n';
  }
  Json j = header(cfg, &l);
  j.erase("epsilon");
  j.erase("gamma");
  j["report"] = {{"epsilon", eps}, {"gamma", gam}, {"c_maxmin", rows}};
  return {kExitOk, j.dump(2), t.str(), ""};
}

int exit_for(ErrorCode code) {
  return code == ErrorCode::ConvergenceFailure ? kExitNoConvergence : kExitValidation;
}

}  // namespace

double GridAxis::at(int k) const {
  if (steps <= 1) return lo;
  if (k == steps - 1) return hi;
  return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(steps - 1);
}

PowerConstraint parse_constraint(std::string_view text, double default_budget) {
  const auto colon = text.find(':');
  const std::string_view kind = text.substr(0, colon);
  if (kind == "sum") {
    if (colon == std::string_view::npos) return SumPower{default_budget};
    return SumPower{parse_number(text.substr(colon + 1), "--constraint")};
  }
  if (kind == "max" && colon != std::string_view::npos) {
    return MaxPower{parse_number(text.substr(colon + 1), "--constraint")};
  }
  throw Error(ErrorCode::ParseError,
              "--constraint: expected sum:BUDGET or max:CAP, got '" + std::string(text) + "'");
}

GridAxis parse_axis(std::string_view text, std::string_view field) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(':', start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (parts.size() != 3) {
    throw Error(ErrorCode::ParseError,
                std::string(field) + ": expected lo:hi:steps, got '" + std::string(text) + "'");
  }
  GridAxis a;
  a.lo = parse_number(parts[0], field);
  a.hi = parse_number(parts[1], field);
  const double steps = parse_number(parts[2], field);
  if (steps < 1 || steps != std::floor(steps) || steps > 1e6) {
    throw Error(ErrorCode::ParseError, std::string(field) + ": steps must be a positive integer");
  }
  a.steps = static_cast<int>(steps);
  return a;
}

RunResult run(const RunConfig& config) {
  const double scale = config.bits ? 1.0 / std::log(2.0) : 1.0;
  try {
    switch (config.command) {
      case Command::Capacity: return run_capacity(config, scale);
      case Command::Minmax: return run_minmax(config, scale);
      case Command::Bounds: return run_bounds(config, scale);
      case Command::Verify: return run_verify(config, scale);
      case Command::Counterexample: return run_counterexample(config);
      case Command::Sweep: return run_sweep(config, scale);
    }
  } catch (const Error& e) {
    return {exit_for(e.code()), "", "",
            std::string(to_string(e.code())) + ": " + e.what()};
  } catch (const std::exception& e) {
    return {kExitValidation, "", "", std::string("error: ") + e.what()};
  }
  return {kExitValidation, "", "", "unknown command"};
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compound MIMO capacity under norm-bounded channel uncertainty"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::string norm = "spectral";
  std::string constraint;
  std::string grid;
  std::string search_norm = "frobenius";
  app.add_option("--input", cfg.input, "Channel file (JSON {rows, cols, entries} or real CSV)");
  app.add_option("--gamma", cfg.gamma, "Per-antenna SNR");
  app.add_option("--epsilon", cfg.epsilon, "Uncertainty radius");
  app.add_option("--norm", norm, "spectral|frobenius|nuclear");
  app.add_option("--constraint", constraint, "sum:BUDGET or max:CAP (default sum:t)");
  app.add_option("--samples", cfg.samples, "Monte Carlo samples for verify");
  app.add_option("--seed", cfg.seed, "Random seed");
  app.add_flag("--bits", cfg.bits, "Report capacities in bits instead of nats");
  app.add_flag("--table", cfg.table, "Also print a plain-text table");
  app.add_option("--output", cfg.output, "Write the JSON report here instead of stdout");
  app.add_option("--grid", grid, "eps_lo:eps_hi:steps,gamma_lo:gamma_hi:steps");
  app.add_option("--grid-step", cfg.grid_step, "Grid oracle step used by verify");
  app.add_option("--threads", cfg.threads, "Worker threads (default: COMPOUND_MIMO_THREADS)");

  const std::vector<std::pair<Command, const char*>> commands{
      {Command::Capacity, "Max-min capacity, worst channel and saddle certificate"},
      {Command::Minmax, "Min-max capacity for spectral or Frobenius regions"},
      {Command::Bounds, "Capacity bracket for Frobenius or nuclear regions"},
      {Command::Verify, "Run the adversarial verification suite on one instance"},
      {Command::Counterexample, "Reproduce the nuclear-norm counterexample"},
      {Command::Sweep, "Capacity table over an (epsilon, gamma) grid"}};
  std::vector<CLI::App*> subs;
  for (const auto& [cmd, help] : commands) {
    subs.push_back(app.add_subcommand(std::string(command_name(cmd)), help));
  }
  CLI::App* ce = subs[static_cast<int>(Command::Counterexample)];
  ce->add_option("--search", cfg.search_trials, "Also run an exploratory lemma search");
  ce->add_option("--search-norm", search_norm, "Norm for the search (default frobenius)");
  ce->add_option("--search-rows", cfg.search_rows);
  ce->add_option("--search-cols", cfg.search_cols);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  RunResult res;
  try {
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (subs[i]->parsed()) cfg.command = commands[i].first;
    cfg.norm = parse_norm_kind(norm);
    cfg.search_norm = parse_norm_kind(search_norm);
    if (!constraint.empty()) cfg.constraint = parse_constraint(constraint, 0.0);
    if (constraint == "sum") cfg.constraint.reset();
    if (cfg.command == Command::Sweep) {
      const auto comma = grid.find(',');
      if (grid.empty() || comma == std::string::npos) {
        throw Error(ErrorCode::ParseError,
                    "--grid: expected eps_lo:eps_hi:steps,gamma_lo:gamma_hi:steps");
      }
      cfg.epsilon_axis = parse_axis(std::string_view(grid).substr(0, comma), "--grid (epsilon)");
      cfg.gamma_axis = parse_axis(std::string_view(grid).substr(comma + 1), "--grid (gamma)");
    }
    res = run(cfg);
  } catch (const Error& e) {
    res = {kExitValidation, "", "", std::string(to_string(e.code())) + ": " + e.what()};
  }

  if (!res.error.empty()) err << res.error << '\n';
  if (!res.report.empty()) {
    if (!cfg.output.empty()) {
      std::ofstream f(cfg.output, std::ios::binary);
      if (!f) {
        err << "--output: cannot write '" << cfg.output << "'\n";
        return kExitValidation;
      }
      f << res.report << '\n';
    } else {
      out << res.report << '\n';
    }
  }
  if (cfg.table && !res.table.empty()) out << res.table;
  return res.exit_code;
}

}  // namespace cmimo
