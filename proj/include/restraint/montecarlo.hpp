#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "restraint/game_core.hpp"
#include "restraint/oracle.hpp"

namespace restraint {

/// How State A picks its t2 action once B has not fought.
///   Literal        final type decides: aggressive exploits, restrained restrains.
///   PriorWeighted  plays as Literal; additionally reports per-message
///                  statistics against the pre-drift Bayes posterior.
///   BestResponse   final type plays its payoff-maximizing action (ties to Restraint).
enum class DriftMode { Literal, PriorWeighted, BestResponse };

std::string_view to_string(DriftMode d);
DriftMode parse_drift_mode(std::string_view name);

struct SimConfig {
  MechanismSpec spec;
  ModelParams params;
  double m = 0.0;
  /// Over signal_grid(m). Only signal_of and fight_after drive play; t2
  /// actions follow the drift mode.
  StrategyProfile profile;
  DriftMode drift_mode = DriftMode::Literal;
  std::uint64_t n_trials = 1;
  std::uint64_t seed = 0;
  /// Admits prior in {0, 1}; test-only degenerate populations.
  bool allow_degenerate_prior = false;
  unsigned jobs = 1;

  void validate() const;
};

/// Both types send m, B fights only after 0, both restrain at m.
StrategyProfile pooling_on_restraint_profile(double m);
/// Restrained sends m and is left alone, aggressive sends 0 and is fought.
StrategyProfile separating_profile(double m);

struct PosteriorStat {
  double message = 0.0;
  double pre_drift_posterior = 0.0;  // P(restrained | message) before drift
  std::uint64_t no_fight_trials = 0;
  double predicted_exploit_rate = 0.0;  // (1 - q) + q p
  double empirical_exploit_rate = 0.0;
  double predicted_mean_u_B = 0.0;
  double empirical_mean_u_B = 0.0;
};

struct SimResult {
  std::array<std::uint64_t, 3> outcome_counts{};  // indexed by Outcome
  double mean_u_A = 0.0;
  double mean_u_B = 0.0;
  double standard_error_u_B = 0.0;
  std::uint64_t no_fight_trials = 0;
  double exploit_rate_given_no_fight = 0.0;
  std::vector<PosteriorStat> posterior_stats;  // PriorWeighted only

  std::uint64_t count(Outcome o) const { return outcome_counts[static_cast<std::size_t>(o)]; }
};

struct TrialRecord {
  std::uint64_t trial = 0;
  TypeLabel theta_initial = TypeLabel::Restrained;
  TypeLabel theta_final = TypeLabel::Restrained;
  double message = 0.0;
  bool fought = false;
  Outcome outcome = Outcome::Restraint;
  double u_A = 0.0;
  double u_B = 0.0;
};

/// Runs n_trials i.i.d. plays. Every trial draws from its own stream keyed by
/// (seed, trial index), so results do not depend on `jobs`.
SimResult simulate(const SimConfig& config);

/// As above, and fills `trace` with one record per trial in trial order.
SimResult simulate(const SimConfig& config, std::vector<TrialRecord>& trace);

/// Uniform draw in [0, 1) number `draw` of trial `trial` under `seed`.
double trial_uniform(std::uint64_t seed, std::uint64_t trial, std::uint64_t draw);

/// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values);

}  // namespace restraint
