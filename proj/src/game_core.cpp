#include "restraint/game_core.hpp"

#include <cmath>
#include <sstream>

namespace restraint {

namespace {

std::string describe(const ModelParams& p) {
  std::ostringstream os;
  os << "c=" << p.c << " V_D=" << p.V_D << " V_B=" << p.V_B << " r=" << p.r << " p=" << p.p
     << " prior=" << p.prior;
  return os.str();
}

}  // namespace

std::string ModelParams::violated_constraint(bool allow_degenerate_prior) const {
  for (double v : {c, V_D, V_B, r, p, prior}) {
    if (!std::isfinite(v)) return "finite parameters";
  }
  if (!(c > 0.0)) return "c > 0";
  if (!(V_D > 0.0)) return "V_D > 0";
  if (!(V_B > c)) return "V_B > c";
  if (!(r >= 0.0)) return "r >= 0";
  if (!(p >= 0.0 && p <= 1.0)) return "0 <= p <= 1";
  if (allow_degenerate_prior) {
    if (!(prior >= 0.0 && prior <= 1.0)) return "0 <= prior <= 1";
  } else if (!(prior > 0.0 && prior < 1.0)) {
    return "0 < prior < 1";
  }
  return {};
}

void ModelParams::validate(bool allow_degenerate_prior) const {
  auto violated = violated_constraint(allow_degenerate_prior);
  if (!violated.empty()) throw ValidationError(violated, describe(*this));
}

double effective_risk(const MechanismSpec& spec, const ModelParams& params) {
  return spec.variant == Variant::Risk ? params.r : 0.0;
}

PayoffPair payoff(const MechanismSpec& spec, const ModelParams& params, TypeLabel type,
                  Outcome outcome, double m) {
  if (!(m >= 0.0) || !std::isfinite(m)) {
    throw ValidationError("m >= 0", "m=" + std::to_string(m));
  }
  params.validate(/*allow_degenerate_prior=*/true);

  const double th = theta(type);
  const double risk = th * effective_risk(spec, params);
  // Which of A's cells carry the signal cost m. Exploit always does.
  bool conflict_pays_m = false;
  bool restraint_pays_m = false;
  switch (spec.mechanism) {
    case Mechanism::TyingHands:
      break;
    case Mechanism::SunkCosts:
      conflict_pays_m = restraint_pays_m = true;
      break;
    case Mechanism::InstallmentCosts:
      restraint_pays_m = true;
      break;
    case Mechanism::ReducibleCosts:
      conflict_pays_m = true;
      break;
  }

  switch (outcome) {
    case Outcome::PreventiveConflict:
      return {-params.c - (conflict_pays_m ? m : 0.0), -params.c};
    case Outcome::Exploit:
      return {th * params.V_D - m, -params.V_B};
    case Outcome::Restraint:
      return {-risk - (restraint_pays_m ? m : 0.0), 0.0};
  }
  throw std::logic_error("unknown outcome");
}

std::string_view to_string(Mechanism m) {
  switch (m) {
    case Mechanism::TyingHands: return "tying-hands";
    case Mechanism::SunkCosts: return "sunk";
    case Mechanism::InstallmentCosts: return "installment";
    case Mechanism::ReducibleCosts: return "reducible";
  }
  return "?";
}

std::string_view to_string(Variant v) { return v == Variant::Risk ? "risk" : "base"; }

std::string_view to_string(TypeLabel t) {
  return t == TypeLabel::Aggressive ? "aggressive" : "restrained";
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::PreventiveConflict: return "conflict";
    case Outcome::Exploit: return "exploit";
    case Outcome::Restraint: return "restraint";
  }
  return "?";
}

std::string_view to_string(T2Action a) {
  return a == T2Action::Exploit ? "exploit" : "restraint";
}

Mechanism parse_mechanism(std::string_view name) {
  for (auto m : {Mechanism::TyingHands, Mechanism::SunkCosts, Mechanism::InstallmentCosts,
                 Mechanism::ReducibleCosts}) {
    if (name == to_string(m)) return m;
  }
  throw ValidationError("mechanism in {tying-hands, sunk, installment, reducible}",
                        "got '" + std::string(name) + "'");
}

Variant parse_variant(std::string_view name) {
  if (name == "base") return Variant::Base;
  if (name == "risk") return Variant::Risk;
  throw ValidationError("variant in {base, risk}", "got '" + std::string(name) + "'");
}

}  // namespace restraint
