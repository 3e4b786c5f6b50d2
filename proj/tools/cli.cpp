#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "restraint/closed_form.hpp"
#include "restraint/io.hpp"
#include "restraint/montecarlo.hpp"
#include "restraint/oracle.hpp"
#include "restraint/sweep.hpp"

namespace restraint::cli {

namespace {

using io::json;

/// Everything one invocation needs. Field names double as the config-file schema.
struct RunConfig {
  std::string command;
  MechanismSpec spec;
  ModelParams params;
  std::optional<double> m;
  std::vector<double> messages;
  std::vector<Axis> axes;
  std::map<Symbol, double> fixed;
  double oracle_fraction = 0.05;
  std::uint64_t seed = 0;
  std::uint64_t trials = 100000;
  DriftMode drift_mode = DriftMode::Literal;
  bool allow_degenerate_prior = false;
  json profile = "pooling";
  TiePolicy t2_ties = TiePolicy::Restraint;
  std::string output = "-";
  std::string format;  // empty: command default
  std::string trace_output;
  unsigned jobs = 1;
};

json to_json(const RunConfig& c) {
  json j = {{"command", c.command},
            {"mechanism", to_string(c.spec.mechanism)},
            {"variant", to_string(c.spec.variant)},
            {"params", io::to_json(c.params)},
            {"oracle_fraction", c.oracle_fraction},
            {"seed", c.seed},
            {"trials", c.trials},
            {"drift_mode", to_string(c.drift_mode)},
            {"allow_degenerate_prior", c.allow_degenerate_prior},
            {"profile", c.profile},
            {"t2_ties", c.t2_ties == TiePolicy::Either ? "either" : "restraint"},
            {"output", c.output},
            {"jobs", c.jobs}};
  if (c.m) j["m"] = *c.m;
  if (!c.messages.empty()) j["messages"] = c.messages;
  if (!c.axes.empty()) {
    GridSpec g{c.spec, c.axes, c.fixed};
    auto gj = io::to_json(g);
    j["axes"] = gj["axes"];
    j["fixed"] = gj["fixed"];
  }
  if (!c.format.empty()) j["format"] = c.format;
  if (!c.trace_output.empty()) j["trace_output"] = c.trace_output;
  return j;
}

TiePolicy parse_ties(const std::string& s) {
  if (s == "restraint") return TiePolicy::Restraint;
  if (s == "either") return TiePolicy::Either;
  throw ValidationError("t2 ties in {restraint, either}", "got '" + s + "'");
}

void apply_config_file(RunConfig& c, const json& j) {
  for (const auto& [key, v] : j.items()) {
    if (key == "command") {
      if (v.get<std::string>() != c.command) {
        throw ValidationError("config command matches subcommand", v.get<std::string>() + " vs " + c.command);
      }
    } else if (key == "mechanism") c.spec.mechanism = parse_mechanism(v.get<std::string>());
    else if (key == "variant") c.spec.variant = parse_variant(v.get<std::string>());
    else if (key == "params") c.params = io::params_from_json(v, c.params);
    else if (key == "m") c.m = v.get<double>();
    else if (key == "messages") c.messages = v.get<std::vector<double>>();
    else if (key == "axes" || key == "fixed") continue;  // read below as a unit
    else if (key == "oracle_fraction") c.oracle_fraction = v.get<double>();
    else if (key == "seed") c.seed = v.get<std::uint64_t>();
    else if (key == "trials") c.trials = v.get<std::uint64_t>();
    else if (key == "drift_mode") c.drift_mode = parse_drift_mode(v.get<std::string>());
    else if (key == "allow_degenerate_prior") c.allow_degenerate_prior = v.get<bool>();
    else if (key == "profile") c.profile = v;
    else if (key == "t2_ties") c.t2_ties = parse_ties(v.get<std::string>());
    else if (key == "output") c.output = v.get<std::string>();
    else if (key == "format") c.format = v.get<std::string>();
    else if (key == "trace_output") c.trace_output = v.get<std::string>();
    else if (key == "jobs") c.jobs = v.get<unsigned>();
    else throw ValidationError("known config keys", "unknown key '" + key + "'");
  }
  if (j.contains("axes")) {
    auto g = io::grid_spec_from_json(j);
    c.axes = g.axes;
    c.fixed = g.fixed;
  }
}

StrategyProfile resolve_profile(const RunConfig& c) {
  const double m = *c.m;
  if (c.profile.is_string()) {
    const auto name = c.profile.get<std::string>();
    if (name == "pooling") return pooling_on_restraint_profile(m);
    if (name == "separating") return separating_profile(m);
    throw ValidationError("profile in {pooling, separating} or a profile object", "got '" + name + "'");
  }
  return io::profile_from_json(c.profile, signal_grid(m));
}

std::string default_format(const std::string& command) { return command == "sweep" ? "csv" : "json"; }

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw ValidationError("writable output path", path);
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

void write_json(std::ostream& os, const json& j) { os << j.dump(2) << '\n'; }

void error_line(std::ostream& err, const std::string& kind, const std::string& message,
                const std::string& constraint = {}) {
  json j = {{"error", kind}, {"message", message}};
  if (!constraint.empty()) j["constraint"] = constraint;
  err << j.dump() << '\n';
}

spdlog::level::level_enum log_level() {
  const char* env = std::getenv("RESTRAINT_GAMES_LOG");
  const std::string v = env ? env : "error";
  if (v == "debug") return spdlog::level::debug;
  if (v == "info") return spdlog::level::info;
  return spdlog::level::err;
}

double require_m(const RunConfig& c) {
  if (!c.m) throw ValidationError("m given", "--m is required for " + c.command);
  return *c.m;
}

int run_classify(const RunConfig& c, std::ostream& os) {
  const double m = require_m(c);
  const auto report = classify(c.spec, c.params, m);
  if (c.format == "json") {
    write_json(os, io::to_json(report));
  } else {
    RegionRow row;
    row.params = c.params;
    row.m = m;
    row.report = report;
    row.classification = region_of(report.pooling_on_restraint.holds, report.separating.holds);
    io::write_region_csv(os, {row}, c.spec);
  }
  return kOk;
}

int run_oracle(const RunConfig& c, std::ostream& os, spdlog::logger& log) {
  if (c.format != "json") throw ValidationError("format json for oracle", "got " + c.format);
  std::vector<double> messages = c.messages;
  if (messages.empty()) messages = signal_grid(require_m(c));
  OracleOptions opts;
  opts.t2_ties = c.t2_ties;
  opts.jobs = c.jobs;

  DiscreteGame game{c.spec, c.params, messages};
  const auto certs = find_all_pbe(game, opts);
  log.info("oracle: {} certificates over {} messages", certs.size(), messages.size());

  std::vector<GridPoint> points;
  for (double m : messages) {
    if (m > 0.0) points.push_back({c.params, m});
  }
  const auto discrepancies = verify_against_closed_form(c.spec, points, opts);

  json certificates = json::array();
  for (const auto& cert : certs) certificates.push_back(io::to_json(cert, game));
  write_json(os, {{"mechanism", to_string(c.spec.mechanism)},
                  {"variant", to_string(c.spec.variant)},
                  {"params", io::to_json(c.params)},
                  {"messages", messages},
                  {"certificates", certificates},
                  {"discrepancies", io::to_json(discrepancies)}});
  if (!discrepancies.empty()) throw DiscrepancyError(discrepancies);
  return kOk;
}

GridSpec resolve_grid(const RunConfig& c, const std::map<Symbol, double>& flag_values) {
  GridSpec g;
  g.mechanism = c.spec;
  g.axes = c.axes;
  if (g.axes.empty()) throw ValidationError("sweep axes given", "no axes in config");
  g.fixed = c.fixed;
  if (g.fixed.empty()) {
    // No explicit fixed block: take every non-axis symbol from params and m.
    g.fixed = {{Symbol::c, c.params.c}, {Symbol::V_D, c.params.V_D}, {Symbol::V_B, c.params.V_B},
               {Symbol::r, c.params.r}, {Symbol::p, c.params.p},     {Symbol::prior, c.params.prior}};
    if (c.m) g.fixed[Symbol::m] = *c.m;
  }
  for (const auto& [symbol, value] : flag_values) g.fixed[symbol] = value;
  for (const auto& axis : g.axes) g.fixed.erase(axis.symbol);
  return g;
}

int run_sweep_cmd(const RunConfig& c, const std::map<Symbol, double>& flag_values, std::ostream& os,
                  spdlog::logger& log) {
  const auto grid = resolve_grid(c, flag_values);
  SweepOptions opts;
  opts.oracle_fraction = c.oracle_fraction;
  opts.seed = c.seed;
  opts.oracle.t2_ties = c.t2_ties;
  opts.oracle.jobs = c.jobs;
  std::vector<RegionRow> rows;
  try {
    rows = run_sweep(grid, opts);
  } catch (const DiscrepancyError& e) {
    write_json(os, io::to_json(e.report()));
    throw;
  }
  std::size_t checked = 0;
  for (const auto& r : rows) checked += r.oracle_checked;
  log.info("sweep: {} rows, {} oracle-checked", rows.size(), checked);
  if (c.format == "json") {
    write_json(os, io::to_json(rows, grid.mechanism));
  } else {
    io::write_region_csv(os, rows, grid.mechanism);
  }
  return kOk;
}

int run_simulate(const RunConfig& c, std::ostream& os) {
  SimConfig sim;
  sim.spec = c.spec;
  sim.params = c.params;
  sim.m = require_m(c);
  sim.profile = resolve_profile(c);
  sim.drift_mode = c.drift_mode;
  sim.n_trials = c.trials;
  sim.seed = c.seed;
  sim.allow_degenerate_prior = c.allow_degenerate_prior;
  sim.jobs = c.jobs;

  SimResult result;
  if (!c.trace_output.empty()) {
    std::vector<TrialRecord> trace;
    result = simulate(sim, trace);
    std::ofstream f(c.trace_output, std::ios::binary);
    if (!f) throw ValidationError("writable trace path", c.trace_output);
    io::write_trace_csv(f, trace);
  } else {
    result = simulate(sim);
  }

  if (c.format == "json") {
    write_json(os, io::to_json(result));
  } else {
    os << "conflict,exploit,restraint,mean_u_A,mean_u_B,standard_error_u_B\n"
       << result.count(Outcome::PreventiveConflict) << ',' << result.count(Outcome::Exploit) << ','
       << result.count(Outcome::Restraint) << ',' << io::format_number(result.mean_u_A) << ','
       << io::format_number(result.mean_u_B) << ',' << io::format_number(result.standard_error_u_B)
       << '\n';
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  spdlog::logger log("restraint", sink);
  log.set_level(log_level());
  log.set_pattern("[%l] %v");

  CLI::App app{"Equilibrium engine for costly restraint-signaling games"};
  app.require_subcommand(1);

  std::string mechanism, variant, drift, config_path, output, format, dump_config, trace, profile, ties;
  double c = 0, vd = 0, vb = 0, r = 0, p = 0, prior = 0, m = 0, oracle_fraction = 0;
  std::vector<double> messages;
  std::uint64_t seed = 0, trials = 0;
  unsigned jobs = 1;
  bool degenerate = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--mechanism", mechanism, "tying-hands | sunk | installment | reducible");
    sub->add_option("--variant", variant, "base | risk");
    sub->add_option("--c", c, "cost of preventive conflict");
    sub->add_option("--vd", vd, "aggressive type's gain from exploiting");
    sub->add_option("--vb", vb, "State B's loss when exploited");
    sub->add_option("--r", r, "aggressive type's risk cost of restraint");
    sub->add_option("--p", p, "type drift probability");
    sub->add_option("--prior", prior, "prior probability State A is restrained");
    sub->add_option("--m", m, "signal level");
    sub->add_option("--config", config_path, "JSON config file; flags override it");
    sub->add_option("-o,--output", output, "output path, - for stdout");
    sub->add_option("--format", format, "csv | json");
    sub->add_option("--jobs", jobs, "worker threads");
    sub->add_option("--dump-config", dump_config, "write the resolved config as JSON");
  };

  auto* classify_cmd = app.add_subcommand("classify", "closed-form equilibrium conditions at one point");
  auto* oracle_cmd = app.add_subcommand("oracle", "enumerate weak PBE on a signal grid");
  auto* sweep_cmd = app.add_subcommand("sweep", "classify a parameter grid into regions");
  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo play with type drift");
  for (auto* sub : {classify_cmd, oracle_cmd, sweep_cmd, simulate_cmd}) add_common(sub);

  oracle_cmd->add_option("--messages", messages, "comma-separated signal grid")->delimiter(',');
  oracle_cmd->add_option("--t2-ties", ties, "restraint | either");
  sweep_cmd->add_option("--oracle-fraction", oracle_fraction, "share of valid points re-checked by the oracle");
  sweep_cmd->add_option("--seed", seed, "oracle sampling seed");
  sweep_cmd->add_option("--t2-ties", ties, "restraint | either");
  simulate_cmd->add_option("--seed", seed, "trial stream seed");
  simulate_cmd->add_option("--trials", trials, "number of plays");
  simulate_cmd->add_option("--drift-mode", drift, "literal | prior-weighted | best-response");
  simulate_cmd->add_option("--profile", profile, "pooling | separating");
  simulate_cmd->add_flag("--allow-degenerate-prior", degenerate, "admit prior 0 or 1");
  simulate_cmd->add_option("--dump-trials", trace, "per-trial CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    error_line(err, "usage", e.what());
    return kValidation;
  }

  CLI::App* sub = app.get_subcommands().front();
  RunConfig cfg;
  cfg.command = sub->get_name();
  auto given = [&](const char* flag) {
    const auto* opt = sub->get_option_no_throw(flag);
    return opt != nullptr && opt->count() > 0;
  };

  try {
    if (given("--config")) {
      std::ifstream f(config_path);
      if (!f) throw ValidationError("readable config file", config_path);
      json j;
      try {
        j = json::parse(f);
      } catch (const json::parse_error& e) {
        throw ValidationError("valid JSON config", e.what());
      }
      apply_config_file(cfg, j);
    }

    std::map<Symbol, double> flag_values;
    if (given("--mechanism")) cfg.spec.mechanism = parse_mechanism(mechanism);
    if (given("--variant")) cfg.spec.variant = parse_variant(variant);
    if (given("--c")) cfg.params.c = flag_values[Symbol::c] = c;
    if (given("--vd")) cfg.params.V_D = flag_values[Symbol::V_D] = vd;
    if (given("--vb")) cfg.params.V_B = flag_values[Symbol::V_B] = vb;
    if (given("--r")) cfg.params.r = flag_values[Symbol::r] = r;
    if (given("--p")) cfg.params.p = flag_values[Symbol::p] = p;
    if (given("--prior")) cfg.params.prior = flag_values[Symbol::prior] = prior;
    if (given("--m")) cfg.m = flag_values[Symbol::m] = m;
    if (given("--messages")) cfg.messages = messages;
    if (given("--oracle-fraction")) cfg.oracle_fraction = oracle_fraction;
    if (given("--seed")) cfg.seed = seed;
    if (given("--trials")) cfg.trials = trials;
    if (given("--drift-mode")) cfg.drift_mode = parse_drift_mode(drift);
    if (given("--profile")) cfg.profile = profile;
    if (given("--allow-degenerate-prior")) cfg.allow_degenerate_prior = degenerate;
    if (given("--t2-ties")) cfg.t2_ties = parse_ties(ties);
    if (given("--dump-trials")) cfg.trace_output = trace;
    if (given("--output")) cfg.output = output;
    if (given("--format")) cfg.format = format;
    if (given("--jobs")) cfg.jobs = jobs;
    if (cfg.format.empty()) cfg.format = default_format(cfg.command);
    if (cfg.format != "csv" && cfg.format != "json") {
      throw ValidationError("format in {csv, json}", "got '" + cfg.format + "'");
    }

    if (given("--dump-config")) {
      std::ofstream f(dump_config, std::ios::binary);
      if (!f) throw ValidationError("writable dump-config path", dump_config);
      write_json(f, to_json(cfg));
    }

    log.debug("running {}", cfg.command);
    Output target(cfg.output, out);
    if (cfg.command == "classify") return run_classify(cfg, target.get());
    if (cfg.command == "oracle") return run_oracle(cfg, target.get(), log);
    if (cfg.command == "sweep") return run_sweep_cmd(cfg, flag_values, target.get(), log);
    return run_simulate(cfg, target.get());
  } catch (...) {
    return report_error(std::current_exception(), err);
  }
}

int report_error(std::exception_ptr error, std::ostream& err) {
  try {
    std::rethrow_exception(error);
  } catch (const ValidationError& e) {
    error_line(err, "validation", e.what(), e.constraint());
    return kValidation;
  } catch (const DiscrepancyError& e) {
    error_line(err, "discrepancy", e.what());
    return kDiscrepancy;
  } catch (const SizeGuardError& e) {
    error_line(err, "size_guard", e.what());
    return kSizeGuard;
  } catch (const json::exception& e) {
    error_line(err, "validation", e.what());
    return kValidation;
  }
}

}  // namespace restraint::cli
