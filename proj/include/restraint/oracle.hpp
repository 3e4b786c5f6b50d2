#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "restraint/closed_form.hpp"
#include "restraint/game_core.hpp"

namespace restraint {

/// The three-stage game with State A's signal restricted to a finite grid.
struct DiscreteGame {
  MechanismSpec spec;
  ModelParams params;
  std::vector<double> messages;  // ascending, distinct, >= 0, contains 0

  /// Throws ValidationError on an ill-formed grid or invalid params.
  void validate() const;
};

/// Pure strategies for both players. Messages are referred to by their index
/// in DiscreteGame::messages; containers are indexed by theta() where typed.
struct StrategyProfile {
  std::array<std::size_t, 2> signal_of{};          // [theta] -> message index
  std::vector<bool> fight_after;                   // [message index]
  std::array<std::vector<T2Action>, 2> t2_action;  // [theta][message index]

  std::size_t signal(TypeLabel t) const { return signal_of[theta(t)]; }
  T2Action t2(TypeLabel t, std::size_t k) const { return t2_action[theta(t)][k]; }

  /// Lexicographic key: signals, fight bits, restrained t2, aggressive t2.
  std::vector<std::uint32_t> encode() const;
  bool operator==(const StrategyProfile&) const = default;
};

/// Belief State B holds after each message that State A is restrained.
struct BeliefAssignment {
  std::vector<double> posterior;
  std::vector<bool> on_path;
  /// Closed interval of posteriors under which B's prescribed action is optimal.
  std::vector<std::array<double, 2>> support;
};

/// Hybrid is part of the schema but never produced: with two types and pure
/// signals a profile either pools or separates.
enum class EquilibriumClass { PoolingOnRestraint, PoolingOther, Separating, Hybrid };

std::string_view to_string(EquilibriumClass c);

struct PBECertificate {
  StrategyProfile profile;
  BeliefAssignment beliefs;
  EquilibriumClass cls = EquilibriumClass::PoolingOther;
};

/// How State A's t2 indifference is resolved. `Restraint` admits only
/// Restraint at a tie; `Either` admits both actions.
enum class TiePolicy { Restraint, Either };

struct OracleOptions {
  TiePolicy t2_ties = TiePolicy::Restraint;
  std::uint64_t profile_budget = 100'000'000;
  unsigned jobs = 1;
};

class SizeGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Number of pure profiles over a grid of n messages: n^2 * 2^n * 4^n,
/// saturating at UINT64_MAX.
std::uint64_t profile_count(std::size_t n);

/// Certificate for `profile` if some belief assignment supports it as a weak
/// PBE, otherwise empty.
std::optional<PBECertificate> is_weak_pbe(const DiscreteGame& game, const StrategyProfile& profile,
                                          const OracleOptions& options = {});

/// Every certified pure profile, in ascending order of StrategyProfile::encode().
std::vector<PBECertificate> find_all_pbe(const DiscreteGame& game,
                                         const OracleOptions& options = {});

/// Whether `action` is a best t2 reply for `type` after message value m.
bool t2_admissible(const MechanismSpec& spec, const ModelParams& params, TypeLabel type,
                   T2Action action, double m, TiePolicy ties);

struct GridPoint {
  ModelParams params;
  double m = 0.0;
};

struct Verdicts {
  bool pooling_on_restraint = false;
  bool separating = false;
  bool operator==(const Verdicts&) const = default;
};

struct Discrepancy {
  MechanismSpec spec;
  ModelParams params;
  double m = 0.0;
  std::vector<double> messages;
  Verdicts closed_form_verdict;
  Verdicts oracle_verdict;
  std::vector<PBECertificate> certificates;
};

/// Oracle verdicts on the grid {0, m}: a PoolingOnRestraint certificate at m,
/// and a Separating certificate with the restrained type at m.
Verdicts oracle_verdicts(const DiscreteGame& game, double m,
                         const std::vector<PBECertificate>& certificates);

/// Compares closed-form verdicts to the oracle at every point. Empty = agreement.
std::vector<Discrepancy> verify_against_closed_form(const MechanismSpec& spec,
                                                    std::span<const GridPoint> grid,
                                                    const OracleOptions& options = {});

/// Grid {0, m} (just {0} when m == 0).
std::vector<double> signal_grid(double m);

}  // namespace restraint
