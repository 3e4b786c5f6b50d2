#include "restraint/io.hpp"

#include <cmath>
#include <optional>
#include <ostream>

#include <fmt/format.h>

namespace restraint::io {

namespace {

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string csv_cell(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

struct RowSummary {
  std::optional<double> pooling, sep1, sep2, typeshift;
};

RowSummary summarize(const RegionRow& row) {
  RowSummary s;
  if (!row.report) return s;
  s.pooling = row.report->pooling_on_restraint.min_slack();
  const auto& sep = row.report->separating.clauses;
  if (!sep.empty()) s.sep1 = sep[0].slack;
  if (sep.size() > 1) s.sep2 = sep[1].slack;
  if (row.report->type_shift_refrain) s.typeshift = row.report->type_shift_refrain->condition.min_slack();
  return s;
}

std::size_t message_index(const std::vector<double>& messages, double v) {
  for (std::size_t k = 0; k < messages.size(); ++k) {
    if (std::abs(messages[k] - v) <= kTolerance) return k;
  }
  throw ValidationError("profile messages on the grid", "message " + format_number(v) + " not in grid");
}

T2Action parse_t2(const std::string& s) {
  if (s == "exploit") return T2Action::Exploit;
  if (s == "restraint") return T2Action::Restraint;
  throw ValidationError("t2 action in {exploit, restraint}", "got '" + s + "'");
}

}  // namespace

std::string format_number(double v) { return fmt::format("{}", v); }

json to_json(const ModelParams& p) {
  return {{"c", p.c}, {"V_D", p.V_D}, {"V_B", p.V_B}, {"r", p.r}, {"p", p.p}, {"prior", p.prior}};
}

ModelParams params_from_json(const json& j, ModelParams defaults) {
  ModelParams p = defaults;
  for (const auto& [key, value] : j.items()) {
    if (key == "c") p.c = value.get<double>();
    else if (key == "V_D") p.V_D = value.get<double>();
    else if (key == "V_B") p.V_B = value.get<double>();
    else if (key == "r") p.r = value.get<double>();
    else if (key == "p") p.p = value.get<double>();
    else if (key == "prior") p.prior = value.get<double>();
    else throw ValidationError("params keys in {c, V_D, V_B, r, p, prior}", "unknown key '" + key + "'");
  }
  return p;
}

json to_json(const ConditionReport& r) {
  json clauses = json::array();
  for (const auto& c : r.clauses) {
    clauses.push_back({{"name", c.name}, {"expression", c.expression}, {"slack", c.slack}});
  }
  return {{"holds", r.holds}, {"clauses", clauses}};
}

json to_json(const EquilibriumReport& r) {
  json j = {{"mechanism", to_string(r.mechanism.mechanism)},
            {"variant", to_string(r.mechanism.variant)},
            {"m", r.m},
            {"pooling_on_restraint", to_json(r.pooling_on_restraint)},
            {"separating", to_json(r.separating)}};
  if (r.type_shift_refrain) {
    j["type_shift_refrain"] = to_json(r.type_shift_refrain->condition);
    j["type_shift_refrain"]["expected_no_fight_payoff"] = r.type_shift_refrain->expected_no_fight_payoff;
  }
  return j;
}

json to_json(const StrategyProfile& s, const std::vector<double>& messages) {
  json t2 = json::object();
  for (auto t : {TypeLabel::Restrained, TypeLabel::Aggressive}) {
    json row = json::array();
    for (auto a : s.t2_action[theta(t)]) row.push_back(to_string(a));
    t2[std::string(to_string(t))] = row;
  }
  json fights = json::array();
  for (bool f : s.fight_after) fights.push_back(f);
  return {{"messages", messages},
          {"signal_of",
           {{"restrained", messages.at(s.signal(TypeLabel::Restrained))},
            {"aggressive", messages.at(s.signal(TypeLabel::Aggressive))}}},
          {"fight_after", fights},
          {"t2_action", t2}};
}

StrategyProfile profile_from_json(const json& j, const std::vector<double>& messages) {
  const std::size_t n = messages.size();
  StrategyProfile s;
  s.signal_of = {message_index(messages, j.at("signal_of").at("restrained").get<double>()),
                 message_index(messages, j.at("signal_of").at("aggressive").get<double>())};
  const auto& fights = j.at("fight_after");
  if (fights.size() != n) throw ValidationError("profile total over the message grid", "fight_after length");
  for (const auto& f : fights) s.fight_after.push_back(f.get<bool>());
  for (auto t : {TypeLabel::Restrained, TypeLabel::Aggressive}) {
    const auto& row = j.at("t2_action").at(std::string(to_string(t)));
    if (row.size() != n) throw ValidationError("profile total over the message grid", "t2_action length");
    for (const auto& a : row) s.t2_action[theta(t)].push_back(parse_t2(a.get<std::string>()));
  }
  return s;
}

json to_json(const PBECertificate& cert, const DiscreteGame& game) {
  json beliefs = json::array();
  for (std::size_t k = 0; k < game.messages.size(); ++k) {
    beliefs.push_back({{"message", game.messages[k]},
                       {"posterior_restrained", cert.beliefs.posterior[k]},
                       {"on_path", static_cast<bool>(cert.beliefs.on_path[k])},
                       {"support", {cert.beliefs.support[k][0], cert.beliefs.support[k][1]}}});
  }
  return {{"class", to_string(cert.cls)},
          {"profile", to_json(cert.profile, game.messages)},
          {"beliefs", beliefs}};
}

json to_json(const std::vector<Discrepancy>& report) {
  json out = json::array();
  for (const auto& d : report) {
    DiscreteGame game{d.spec, d.params, d.messages};
    json certs = json::array();
    for (const auto& c : d.certificates) certs.push_back(to_json(c, game));
    auto verdict = [](const Verdicts& v) {
      return json{{"pooling_on_restraint", v.pooling_on_restraint}, {"separating", v.separating}};
    };
    out.push_back({{"mechanism", to_string(d.spec.mechanism)},
                   {"variant", to_string(d.spec.variant)},
                   {"params", to_json(d.params)},
                   {"m", d.m},
                   {"closed_form_verdict", verdict(d.closed_form_verdict)},
                   {"oracle_verdict", verdict(d.oracle_verdict)},
                   {"certificates", certs}});
  }
  return out;
}

json to_json(const GridSpec& g) {
  json axes = json::array();
  for (const auto& a : g.axes) {
    axes.push_back({{"symbol", to_string(a.symbol)}, {"min", a.min}, {"max", a.max}, {"steps", a.steps}});
  }
  json fixed = json::object();
  for (const auto& [symbol, value] : g.fixed) fixed[std::string(to_string(symbol))] = value;
  return {{"mechanism", to_string(g.mechanism.mechanism)},
          {"variant", to_string(g.mechanism.variant)},
          {"axes", axes},
          {"fixed", fixed}};
}

GridSpec grid_spec_from_json(const json& j) {
  GridSpec g;
  if (j.contains("mechanism")) g.mechanism.mechanism = parse_mechanism(j.at("mechanism").get<std::string>());
  if (j.contains("variant")) g.mechanism.variant = parse_variant(j.at("variant").get<std::string>());
  for (const auto& a : j.at("axes")) {
    Axis axis;
    axis.symbol = parse_symbol(a.at("symbol").get<std::string>());
    axis.min = a.at("min").get<double>();
    axis.max = a.at("max").get<double>();
    axis.steps = a.at("steps").get<std::size_t>();
    g.axes.push_back(axis);
  }
  if (j.contains("fixed")) {
    for (const auto& [key, value] : j.at("fixed").items()) g.fixed[parse_symbol(key)] = value.get<double>();
  }
  return g;
}

json to_json(const RegionRow& row, const MechanismSpec& spec) {
  const auto s = summarize(row);
  return {{"mechanism", to_string(spec.mechanism)},
          {"variant", to_string(spec.variant)},
          {"c", row.params.c},
          {"V_D", row.params.V_D},
          {"V_B", row.params.V_B},
          {"r", row.params.r},
          {"p", row.params.p},
          {"prior", row.params.prior},
          {"m", row.m},
          {"classification", to_string(row.classification)},
          {"pooling_slack", nullable(s.pooling)},
          {"separating_slack_1", nullable(s.sep1)},
          {"separating_slack_2", nullable(s.sep2)},
          {"typeshift_slack", nullable(s.typeshift)},
          {"oracle_checked", row.oracle_checked}};
}

json to_json(const std::vector<RegionRow>& rows, const MechanismSpec& spec) {
  json out = json::array();
  for (const auto& row : rows) out.push_back(to_json(row, spec));
  return out;
}

void write_region_csv(std::ostream& os, const std::vector<RegionRow>& rows, const MechanismSpec& spec) {
  os << kRegionCsvHeader << '\n';
  for (const auto& row : rows) {
    const auto s = summarize(row);
    os << to_string(spec.mechanism) << ',' << to_string(spec.variant) << ','
       << format_number(row.params.c) << ',' << format_number(row.params.V_D) << ','
       << format_number(row.params.V_B) << ',' << format_number(row.params.r) << ','
       << format_number(row.params.p) << ',' << format_number(row.params.prior) << ','
       << format_number(row.m) << ',' << to_string(row.classification) << ',' << csv_cell(s.pooling)
       << ',' << csv_cell(s.sep1) << ',' << csv_cell(s.sep2) << ',' << csv_cell(s.typeshift) << ','
       << (row.oracle_checked ? "true" : "false") << '\n';
  }
}

json to_json(const std::vector<BoundaryPoint>& points) {
  json out = json::array();
  for (const auto& bp : points) {
    json coords = json::object();
    for (const auto& [symbol, value] : bp.coordinates) coords[std::string(to_string(symbol))] = value;
    out.push_back({{"coordinates", coords}, {"condition", bp.condition}, {"along", to_string(bp.along)}});
  }
  return out;
}

json to_json(const SimResult& r) {
  json counts = json::object();
  for (auto o : {Outcome::PreventiveConflict, Outcome::Exploit, Outcome::Restraint}) {
    counts[std::string(to_string(o))] = r.count(o);
  }
  json j = {{"outcome_counts", counts},
            {"mean_u_A", r.mean_u_A},
            {"mean_u_B", r.mean_u_B},
            {"standard_error_u_B", r.standard_error_u_B},
            {"no_fight_trials", r.no_fight_trials},
            {"exploit_rate_given_no_fight", r.exploit_rate_given_no_fight}};
  if (!r.posterior_stats.empty()) {
    json stats = json::array();
    for (const auto& s : r.posterior_stats) {
      stats.push_back({{"message", s.message},
                       {"pre_drift_posterior", s.pre_drift_posterior},
                       {"no_fight_trials", s.no_fight_trials},
                       {"predicted_exploit_rate", s.predicted_exploit_rate},
                       {"empirical_exploit_rate", s.empirical_exploit_rate},
                       {"predicted_mean_u_B", s.predicted_mean_u_B},
                       {"empirical_mean_u_B", s.empirical_mean_u_B}});
    }
    j["posterior_stats"] = stats;
  }
  return j;
}

void write_trace_csv(std::ostream& os, const std::vector<TrialRecord>& trace) {
  os << kTraceCsvHeader << '\n';
  for (const auto& t : trace) {
    os << t.trial << ',' << to_string(t.theta_initial) << ',' << to_string(t.theta_final) << ','
       << format_number(t.message) << ',' << (t.fought ? "true" : "false") << ',' << to_string(t.outcome)
       << ',' << format_number(t.u_A) << ',' << format_number(t.u_B) << '\n';
  }
}

}  // namespace restraint::io
