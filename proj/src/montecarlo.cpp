#include "restraint/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace restraint {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct TrialOutput {
  TrialRecord record;
  bool exploit = false;
};

TrialOutput play(const SimConfig& cfg, const std::vector<double>& grid, std::uint64_t trial) {
  TrialOutput out;
  auto& rec = out.record;
  rec.trial = trial;
  rec.theta_initial =
      trial_uniform(cfg.seed, trial, 0) < cfg.params.prior ? TypeLabel::Restrained : TypeLabel::Aggressive;
  rec.theta_final = rec.theta_initial;

  const std::size_t k = cfg.profile.signal(rec.theta_initial);
  rec.message = grid[k];
  rec.fought = cfg.profile.fight_after[k];

  // The drift draw is consumed on every trial so streams stay aligned.
  const bool drifts = trial_uniform(cfg.seed, trial, 1) < cfg.params.p;
  if (rec.fought) {
    rec.outcome = Outcome::PreventiveConflict;
  } else {
    if (rec.theta_initial == TypeLabel::Restrained && drifts) rec.theta_final = TypeLabel::Aggressive;
    T2Action action;
    if (cfg.drift_mode == DriftMode::BestResponse) {
      action = t2_admissible(cfg.spec, cfg.params, rec.theta_final, T2Action::Exploit, rec.message,
                             TiePolicy::Restraint)
                   ? T2Action::Exploit
                   : T2Action::Restraint;
    } else {
      action = rec.theta_final == TypeLabel::Aggressive ? T2Action::Exploit : T2Action::Restraint;
    }
    rec.outcome = action == T2Action::Exploit ? Outcome::Exploit : Outcome::Restraint;
    out.exploit = action == T2Action::Exploit;
  }
  const auto u = payoff(cfg.spec, cfg.params, rec.theta_final, rec.outcome, rec.message);
  rec.u_A = u.u_A;
  rec.u_B = u.u_B;
  return out;
}

SimResult run(const SimConfig& cfg, std::vector<TrialRecord>* trace) {
  cfg.validate();
  const auto grid = signal_grid(cfg.m);
  const std::uint64_t n = cfg.n_trials;

  std::vector<double> u_A(n), u_B(n);
  std::vector<std::uint8_t> outcome(n), exploit(n), message(n);
  if (trace) trace->assign(n, TrialRecord{});

  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t t = begin; t < end; ++t) {
      const auto o = play(cfg, grid, t);
      u_A[t] = o.record.u_A;
      u_B[t] = o.record.u_B;
      outcome[t] = static_cast<std::uint8_t>(o.record.outcome);
      exploit[t] = o.exploit;
      message[t] = static_cast<std::uint8_t>(cfg.profile.signal(o.record.theta_initial));
      if (trace) (*trace)[t] = o.record;
    }
  };
  const std::uint64_t jobs = std::clamp<std::uint64_t>(cfg.jobs, 1, n);
  if (jobs == 1) {
    work(0, n);
  } else {
    std::vector<std::jthread> threads;
    const std::uint64_t block = (n + jobs - 1) / jobs;
    for (std::uint64_t w = 0; w < jobs; ++w) {
      const auto begin = std::min(n, w * block);
      threads.emplace_back(work, begin, std::min(n, begin + block));
    }
  }

  SimResult result;
  for (auto o : outcome) ++result.outcome_counts[o];
  const double dn = static_cast<double>(n);
  result.mean_u_A = pairwise_sum(u_A) / dn;
  result.mean_u_B = pairwise_sum(u_B) / dn;
  if (n > 1) {
    std::vector<double> sq(n);
    for (std::uint64_t t = 0; t < n; ++t) sq[t] = (u_B[t] - result.mean_u_B) * (u_B[t] - result.mean_u_B);
    const double stdev = std::sqrt(pairwise_sum(sq) / (dn - 1.0));
    result.standard_error_u_B = stdev / std::sqrt(dn);
  }

  std::uint64_t exploits = 0;
  for (std::uint64_t t = 0; t < n; ++t) {
    if (outcome[t] != static_cast<std::uint8_t>(Outcome::PreventiveConflict)) {
      ++result.no_fight_trials;
      exploits += exploit[t];
    }
  }
  if (result.no_fight_trials > 0) {
    result.exploit_rate_given_no_fight =
        static_cast<double>(exploits) / static_cast<double>(result.no_fight_trials);
  }

  if (cfg.drift_mode == DriftMode::PriorWeighted) {
    const auto sr = cfg.profile.signal(TypeLabel::Restrained);
    const auto sa = cfg.profile.signal(TypeLabel::Aggressive);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (k != sr && k != sa) continue;
      if (cfg.profile.fight_after[k]) continue;
      PosteriorStat stat;
      stat.message = grid[k];
      stat.pre_drift_posterior = (k == sr && k == sa) ? cfg.params.prior : (k == sr ? 1.0 : 0.0);
      stat.predicted_exploit_rate =
          (1.0 - stat.pre_drift_posterior) + stat.pre_drift_posterior * cfg.params.p;
      stat.predicted_mean_u_B = -cfg.params.V_B * stat.predicted_exploit_rate;
      std::vector<double> ub;
      std::uint64_t ex = 0;
      for (std::uint64_t t = 0; t < n; ++t) {
        if (message[t] != k || outcome[t] == static_cast<std::uint8_t>(Outcome::PreventiveConflict)) continue;
        ub.push_back(u_B[t]);
        ex += exploit[t];
      }
      stat.no_fight_trials = ub.size();
      if (!ub.empty()) {
        stat.empirical_exploit_rate = static_cast<double>(ex) / static_cast<double>(ub.size());
        stat.empirical_mean_u_B = pairwise_sum(ub) / static_cast<double>(ub.size());
      }
      result.posterior_stats.push_back(stat);
    }
  }
  return result;
}

}  // namespace

std::string_view to_string(DriftMode d) {
  switch (d) {
    case DriftMode::Literal: return "literal";
    case DriftMode::PriorWeighted: return "prior-weighted";
    case DriftMode::BestResponse: return "best-response";
  }
  return "?";
}

DriftMode parse_drift_mode(std::string_view name) {
  for (auto d : {DriftMode::Literal, DriftMode::PriorWeighted, DriftMode::BestResponse}) {
    if (name == to_string(d)) return d;
  }
  throw ValidationError("drift mode in {literal, prior-weighted, best-response}",
                        "got '" + std::string(name) + "'");
}

void SimConfig::validate() const {
  params.validate(allow_degenerate_prior);
  if (!(m >= 0.0) || !std::isfinite(m)) throw ValidationError("m >= 0", "m=" + std::to_string(m));
  if (n_trials < 1) throw ValidationError("n_trials >= 1", "n_trials=0");
  const auto n = signal_grid(m).size();
  if (profile.fight_after.size() != n || profile.t2_action[0].size() != n ||
      profile.t2_action[1].size() != n || profile.signal_of[0] >= n || profile.signal_of[1] >= n) {
    throw ValidationError("profile total over {0, m}", "profile does not match " + std::to_string(n) + " messages");
  }
}

StrategyProfile pooling_on_restraint_profile(double m) {
  const auto n = signal_grid(m).size();
  StrategyProfile s;
  s.signal_of = {n - 1, n - 1};
  s.fight_after.assign(n, false);
  s.fight_after[0] = n > 1;
  s.t2_action = {std::vector<T2Action>(n, T2Action::Restraint), std::vector<T2Action>(n, T2Action::Restraint)};
  s.t2_action[1][0] = T2Action::Exploit;
  return s;
}

StrategyProfile separating_profile(double m) {
  if (m == 0.0) throw ValidationError("m > 0 for a separating profile", "m=0");
  StrategyProfile s;
  s.signal_of = {1, 0};
  s.fight_after = {true, false};
  s.t2_action = {std::vector<T2Action>{T2Action::Restraint, T2Action::Restraint},
                 std::vector<T2Action>{T2Action::Exploit, T2Action::Exploit}};
  return s;
}

double trial_uniform(std::uint64_t seed, std::uint64_t trial, std::uint64_t draw) {
  const std::uint64_t key = mix(seed ^ mix(trial * kGolden + 0x632be59bd9b4e019ULL));
  const std::uint64_t bits = mix(key + (draw + 1) * kGolden);
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 64) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const auto half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

SimResult simulate(const SimConfig& config) { return run(config, nullptr); }

SimResult simulate(const SimConfig& config, std::vector<TrialRecord>& trace) {
  return run(config, &trace);
}

}  // namespace restraint
