#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace restraint {

/// Thrown when a parameter bundle or an operation input violates a model
/// constraint. `constraint()` names the violated inequality, e.g. "V_B > c".
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string constraint, const std::string& detail)
      : std::invalid_argument(constraint + " violated: " + detail),
        constraint_(std::move(constraint)) {}

  const std::string& constraint() const noexcept { return constraint_; }

 private:
  std::string constraint_;
};

/// Scalar parameters shared by every game.
///   c      cost of preventive conflict to each side
///   V_D    aggressive type's gain from exploiting the strategic advantage
///   V_B    State B's loss when exploited
///   r      aggressive type's risk cost from leaving the advantage unexploited
///   p      probability a restrained type drifts to aggressive before t2
///   prior  common prior that State A is restrained
struct ModelParams {
  double c = 0.5;
  double V_D = 1.0;
  double V_B = 2.0;
  double r = 0.0;
  double p = 0.0;
  double prior = 0.5;

  /// Throws ValidationError naming the first violated constraint. With
  /// `allow_degenerate_prior` the prior may sit at 0 or 1 (simulation only).
  void validate(bool allow_degenerate_prior = false) const;

  /// Returns the violated constraint name, or an empty string when valid.
  std::string violated_constraint(bool allow_degenerate_prior = false) const;

  bool operator==(const ModelParams&) const = default;
};

enum class TypeLabel { Restrained, Aggressive };

constexpr int theta(TypeLabel t) { return t == TypeLabel::Aggressive ? 1 : 0; }

enum class Mechanism { TyingHands, SunkCosts, InstallmentCosts, ReducibleCosts };
enum class Variant { Base, Risk };

struct MechanismSpec {
  Mechanism mechanism = Mechanism::TyingHands;
  Variant variant = Variant::Base;

  bool operator==(const MechanismSpec&) const = default;
};

enum class Outcome { PreventiveConflict, Exploit, Restraint };

/// t2 choice of State A after State B declined to fight.
enum class T2Action { Exploit, Restraint };

struct PayoffPair {
  double u_A = 0.0;
  double u_B = 0.0;

  bool operator==(const PayoffPair&) const = default;
};

/// Risk cost actually in force: r under the risk variant, 0 under base.
double effective_risk(const MechanismSpec& spec, const ModelParams& params);

/// Terminal payoffs of one outcome. `m` is the signal level State A paid.
PayoffPair payoff(const MechanismSpec& spec, const ModelParams& params, TypeLabel type,
                  Outcome outcome, double m);

/// Payoff of State A's t2 action, i.e. the outcome reached when B did not fight.
inline PayoffPair t2_payoff(const MechanismSpec& spec, const ModelParams& params,
                            TypeLabel type, T2Action action, double m) {
  return payoff(spec, params, type,
                action == T2Action::Exploit ? Outcome::Exploit : Outcome::Restraint, m);
}

// Names used on the command line and in every serialized file.
std::string_view to_string(Mechanism m);
std::string_view to_string(Variant v);
std::string_view to_string(TypeLabel t);
std::string_view to_string(Outcome o);
std::string_view to_string(T2Action a);

Mechanism parse_mechanism(std::string_view name);
Variant parse_variant(std::string_view name);

}  // namespace restraint
