#pragma once

#include <optional>
#include <string>
#include <vector>

#include "restraint/game_core.hpp"

namespace restraint {

/// Absolute tolerance for every weak inequality. Boundaries count as satisfied.
inline constexpr double kTolerance = 1e-9;

struct Clause {
  std::string name;
  std::string expression;
  double slack = 0.0;  // > 0 strict, 0 boundary, < 0 violated
};

struct ConditionReport {
  bool holds = false;
  std::vector<Clause> clauses;

  /// Smallest clause slack (the binding one).
  double min_slack() const;
  /// Recomputes `holds` from the clause slacks.
  bool recompute_holds() const;
};

struct TypeShiftReport {
  ConditionReport condition;
  /// B's expected payoff from not fighting after the restraint signal, -p*V_B.
  double expected_no_fight_payoff = 0.0;
};

struct EquilibriumReport {
  MechanismSpec mechanism;
  double m = 0.0;
  ConditionReport pooling_on_restraint;
  ConditionReport separating;
  std::optional<TypeShiftReport> type_shift_refrain;  // present iff p > 0
};

/// Pooling on restraint at signal m: both types send m, B does not fight
/// after m and fights after 0, and neither type exploits.
ConditionReport pooling_exists(const MechanismSpec& spec, const ModelParams& params, double m);

/// Separating profile: restrained sends m_star and is left alone, aggressive
/// sends 0 and is fought.
ConditionReport separating_exists(const MechanismSpec& spec, const ModelParams& params,
                                  double m_star);

/// B keeps refraining after the restraint signal when types drift: p <= c / V_B.
TypeShiftReport type_shift_refrain(const ModelParams& params);

EquilibriumReport classify(const MechanismSpec& spec, const ModelParams& params, double m);

}  // namespace restraint
