#include "restraint/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace restraint {

namespace {

void validate_signal(double m, const char* name) {
  if (!(m >= 0.0) || !std::isfinite(m)) {
    throw ValidationError(std::string(name) + " >= 0", std::string(name) + "=" + std::to_string(m));
  }
}

ConditionReport make_report(std::vector<Clause> clauses) {
  ConditionReport report;
  report.clauses = std::move(clauses);
  report.holds = report.recompute_holds();
  return report;
}

bool signal_costs_every_cell(Mechanism m) {
  return m == Mechanism::SunkCosts || m == Mechanism::InstallmentCosts;
}

}  // namespace

double ConditionReport::min_slack() const {
  double s = std::numeric_limits<double>::infinity();
  for (const auto& clause : clauses) s = std::min(s, clause.slack);
  return s;
}

bool ConditionReport::recompute_holds() const {
  return std::all_of(clauses.begin(), clauses.end(),
                     [](const Clause& c) { return c.slack >= -kTolerance; });
}

ConditionReport pooling_exists(const MechanismSpec& spec, const ModelParams& params, double m) {
  params.validate();
  validate_signal(m, "m");
  const double risk = effective_risk(spec, params);

  if (signal_costs_every_cell(spec.mechanism)) {
    // Exploit and restraint both carry m, so the aggressive type compares
    // V_D against -r regardless of the signal and always exploits.
    return make_report({{"aggressive_restrains", spec.variant == Variant::Risk ? "0 >= V_D + r" : "0 >= V_D",
                         -(params.V_D + risk)}});
  }

  std::vector<Clause> clauses;
  if (spec.variant == Variant::Risk) {
    clauses.push_back({"aggressive_restrains", "V_D <= m - r", m - risk - params.V_D});
    // Deviating to the unsignaled message is fought; restraint must beat it.
    clauses.push_back({"aggressive_accepts_restraint", "r <= c", params.c - risk});
  } else {
    clauses.push_back({"aggressive_restrains", "V_D <= m", m - params.V_D});
  }
  return make_report(std::move(clauses));
}

ConditionReport separating_exists(const MechanismSpec& spec, const ModelParams& params,
                                  double m_star) {
  params.validate();
  validate_signal(m_star, "m_star");
  const double risk = effective_risk(spec, params);

  if (signal_costs_every_cell(spec.mechanism)) {
    // Keeping the aggressive type at 0 needs m* >= V_D + c; keeping the
    // restrained type at m* needs m* <= c. Together they need V_D <= 0.
    return make_report({
        {"aggressive_prefers_conflict", "V_D <= m_star - c", m_star - params.c - params.V_D},
        {"restrained_prefers_signal", "m_star <= c", params.c - m_star},
        {"jointly_feasible", "0 >= V_D", -params.V_D},
    });
  }

  return make_report({
      {"aggressive_prefers_conflict_to_exploit", "V_D <= m_star - c",
       m_star - params.c - params.V_D},
      {"aggressive_prefers_conflict_to_restraint",
       spec.variant == Variant::Risk ? "c <= r" : "c <= 0 (no risk term in base variant)",
       risk - params.c},
  });
}

TypeShiftReport type_shift_refrain(const ModelParams& params) {
  params.validate();
  TypeShiftReport out;
  out.condition = make_report({{"refrain_under_drift", "p <= c / V_B", params.c / params.V_B - params.p}});
  out.expected_no_fight_payoff = -params.p * params.V_B;
  return out;
}

EquilibriumReport classify(const MechanismSpec& spec, const ModelParams& params, double m) {
  EquilibriumReport report;
  report.mechanism = spec;
  report.m = m;
  report.pooling_on_restraint = pooling_exists(spec, params, m);
  report.separating = separating_exists(spec, params, m);
  if (params.p > 0.0) report.type_shift_refrain = type_shift_refrain(params);
  return report;
}

}  // namespace restraint
