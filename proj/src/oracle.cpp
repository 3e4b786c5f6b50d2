#include "restraint/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace restraint {

namespace {

constexpr std::array<TypeLabel, 2> kTypes{TypeLabel::Restrained, TypeLabel::Aggressive};

std::optional<PBECertificate> certify(const DiscreteGame& game, const StrategyProfile& s,
                                      const OracleOptions& options);

double u_B_of(T2Action a, const ModelParams& params) {
  return a == T2Action::Exploit ? -params.V_B : 0.0;
}

// Continuation value of sending message k for a type, given B's rule and the
// type's own t2 play.
double continuation(const DiscreteGame& g, const StrategyProfile& s, TypeLabel t, std::size_t k) {
  const double m = g.messages[k];
  if (s.fight_after[k]) return payoff(g.spec, g.params, t, Outcome::PreventiveConflict, m).u_A;
  return t2_payoff(g.spec, g.params, t, s.t2(t, k), m).u_A;
}

// B's advantage from not fighting at posterior q is a + b*q + c. Returns the
// sub-interval of [0,1] on which the prescribed action is weakly optimal.
std::optional<std::array<double, 2>> supporting_interval(double a, double b, double c, bool fight,
                                                        double tol) {
  const double k = a + c;
  double lo = 0.0, hi = 1.0;
  if (b == 0.0) {
    const bool ok = fight ? k <= tol : k >= -tol;
    if (!ok) return std::nullopt;
    return std::array<double, 2>{lo, hi};
  }
  const double root = fight ? (tol - k) / b : (-tol - k) / b;
  // fight: k + b q <= tol; no fight: k + b q >= -tol.
  const bool upper_bound = (fight && b > 0) || (!fight && b < 0);
  if (upper_bound) {
    hi = std::min(1.0, root);
  } else {
    lo = std::max(0.0, root);
  }
  if (lo > hi) return std::nullopt;
  return std::array<double, 2>{lo, hi};
}

bool b_action_optimal(double a, double b, double c, bool fight, double q) {
  const double advantage = a + b * q + c;
  return fight ? advantage <= kTolerance : advantage >= -kTolerance;
}

EquilibriumClass classify_profile(const StrategyProfile& s) {
  const auto sr = s.signal(TypeLabel::Restrained);
  const auto sa = s.signal(TypeLabel::Aggressive);
  if (sr != sa) return EquilibriumClass::Separating;
  if (!s.fight_after[sr] && s.t2(TypeLabel::Restrained, sr) == T2Action::Restraint &&
      s.t2(TypeLabel::Aggressive, sr) == T2Action::Restraint) {
    return EquilibriumClass::PoolingOnRestraint;
  }
  return EquilibriumClass::PoolingOther;
}

void enumerate_pair(const DiscreteGame& g, const OracleOptions& options, std::size_t sr,
                    std::size_t sa, std::vector<PBECertificate>& out) {
  const std::size_t n = g.messages.size();

  // Admissible t2 actions per (type, message); anything else fails sequential
  // rationality, so it is skipped rather than enumerated.
  std::array<std::vector<std::vector<T2Action>>, 2> admissible;
  for (auto t : kTypes) {
    auto& cells = admissible[theta(t)];
    cells.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      for (auto a : {T2Action::Exploit, T2Action::Restraint}) {
        if (t2_admissible(g.spec, g.params, t, a, g.messages[k], options.t2_ties)) {
          cells[k].push_back(a);
        }
      }
    }
  }

  StrategyProfile s;
  s.signal_of = {sr, sa};
  s.fight_after.assign(n, false);
  for (auto& v : s.t2_action) v.assign(n, T2Action::Exploit);

  // Odometer over the 2n t2 cells; ordering matches encode() (Exploit < Restraint).
  std::vector<std::size_t> digit(2 * n, 0);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (std::size_t k = 0; k < n; ++k) s.fight_after[k] = (mask >> (n - 1 - k)) & 1U;
    std::fill(digit.begin(), digit.end(), 0);
    while (true) {
      for (std::size_t i = 0; i < 2 * n; ++i) {
        s.t2_action[i / n][i % n] = admissible[i / n][i % n][digit[i]];
      }
      if (auto cert = certify(g, s, options)) out.push_back(std::move(*cert));
      bool carry = true;
      for (std::size_t i = 2 * n; carry && i > 0;) {
        --i;
        carry = ++digit[i] == admissible[i / n][i % n].size();
        if (carry) digit[i] = 0;
      }
      if (carry) break;
    }
  }
}

}  // namespace

void DiscreteGame::validate() const {
  params.validate();
  if (messages.empty()) throw ValidationError("messages nonempty", "empty signal grid");
  for (std::size_t i = 0; i < messages.size(); ++i) {
    if (!(messages[i] >= 0.0) || !std::isfinite(messages[i])) {
      throw ValidationError("messages >= 0", "m=" + std::to_string(messages[i]));
    }
    if (i > 0 && !(messages[i] > messages[i - 1])) {
      throw ValidationError("messages ascending and distinct", "at index " + std::to_string(i));
    }
  }
  if (messages.front() != 0.0) throw ValidationError("messages contain 0", "smallest message is not 0");
}

std::vector<std::uint32_t> StrategyProfile::encode() const {
  std::vector<std::uint32_t> key;
  key.reserve(2 + 3 * fight_after.size());
  key.push_back(static_cast<std::uint32_t>(signal_of[0]));
  key.push_back(static_cast<std::uint32_t>(signal_of[1]));
  for (bool f : fight_after) key.push_back(f ? 1U : 0U);
  for (const auto& row : t2_action) {
    for (auto a : row) key.push_back(a == T2Action::Restraint ? 1U : 0U);
  }
  return key;
}

std::string_view to_string(EquilibriumClass c) {
  switch (c) {
    case EquilibriumClass::PoolingOnRestraint: return "pooling_on_restraint";
    case EquilibriumClass::PoolingOther: return "pooling_other";
    case EquilibriumClass::Separating: return "separating";
    case EquilibriumClass::Hybrid: return "hybrid";
  }
  return "?";
}

std::uint64_t profile_count(std::size_t n) {
  // n^2 * 2^(3n)
  if (3 * n >= 64) return std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t pow = std::uint64_t{1} << (3 * n);
  const std::uint64_t sq = static_cast<std::uint64_t>(n) * n;
  if (sq != 0 && pow > std::numeric_limits<std::uint64_t>::max() / sq) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return sq * pow;
}

bool t2_admissible(const MechanismSpec& spec, const ModelParams& params, TypeLabel type,
                   T2Action action, double m, TiePolicy ties) {
  const double exploit = t2_payoff(spec, params, type, T2Action::Exploit, m).u_A;
  const double restraint = t2_payoff(spec, params, type, T2Action::Restraint, m).u_A;
  if (action == T2Action::Restraint) return restraint >= exploit - kTolerance;
  if (ties == TiePolicy::Either) return exploit >= restraint - kTolerance;
  return exploit > restraint + kTolerance;
}

std::optional<PBECertificate> is_weak_pbe(const DiscreteGame& game, const StrategyProfile& s,
                                          const OracleOptions& options) {
  game.validate();
  return certify(game, s, options);
}

namespace {

std::optional<PBECertificate> certify(const DiscreteGame& game, const StrategyProfile& s,
                                      const OracleOptions& options) {
  const std::size_t n = game.messages.size();
  if (s.fight_after.size() != n || s.t2_action[0].size() != n || s.t2_action[1].size() != n ||
      s.signal_of[0] >= n || s.signal_of[1] >= n) {
    throw ValidationError("profile total over the message grid",
                          "profile does not match a grid of " + std::to_string(n) + " messages");
  }
  const auto& params = game.params;

  // (c) t2 sequential rationality at every cell, on or off path.
  for (auto t : kTypes) {
    for (std::size_t k = 0; k < n; ++k) {
      if (!t2_admissible(game.spec, params, t, s.t2(t, k), game.messages[k], options.t2_ties)) {
        return std::nullopt;
      }
    }
  }

  // (d) t0: each type's message maximizes its continuation value.
  for (auto t : kTypes) {
    const double chosen = continuation(game, s, t, s.signal(t));
    for (std::size_t k = 0; k < n; ++k) {
      if (continuation(game, s, t, k) > chosen + kTolerance) return std::nullopt;
    }
  }

  // (a)+(b) Bayes on path, and a supporting belief at every message.
  PBECertificate cert;
  cert.profile = s;
  auto& beliefs = cert.beliefs;
  beliefs.posterior.resize(n);
  beliefs.on_path.resize(n);
  beliefs.support.resize(n);
  const auto sr = s.signal(TypeLabel::Restrained);
  const auto sa = s.signal(TypeLabel::Aggressive);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = u_B_of(s.t2(TypeLabel::Aggressive, k), params);
    const double b = u_B_of(s.t2(TypeLabel::Restrained, k), params) - a;
    // Report the exact interval; fall back to the tolerance-widened one only
    // when B's action is optimal solely within tolerance.
    auto interval = supporting_interval(a, b, params.c, s.fight_after[k], 0.0);
    if (!interval) interval = supporting_interval(a, b, params.c, s.fight_after[k], kTolerance);
    if (!interval) return std::nullopt;
    beliefs.support[k] = *interval;

    const bool from_r = k == sr;
    const bool from_a = k == sa;
    beliefs.on_path[k] = from_r || from_a;
    if (from_r || from_a) {
      const double q = from_r && from_a ? params.prior : (from_r ? 1.0 : 0.0);
      if (!b_action_optimal(a, b, params.c, s.fight_after[k], q)) return std::nullopt;
      beliefs.posterior[k] = q;
    } else {
      beliefs.posterior[k] = std::clamp(params.prior, (*interval)[0], (*interval)[1]);
    }
  }

  cert.cls = classify_profile(s);
  return cert;
}

}  // namespace

std::vector<PBECertificate> find_all_pbe(const DiscreteGame& game, const OracleOptions& options) {
  game.validate();
  const std::size_t n = game.messages.size();
  const auto count = profile_count(n);
  if (count > options.profile_budget) {
    throw SizeGuardError("profile enumeration of " + std::to_string(count) +
                         " exceeds budget " + std::to_string(options.profile_budget) + " (" +
                         std::to_string(n) + " messages)");
  }

  const std::size_t pairs = n * n;
  const unsigned jobs = std::max(1U, std::min<unsigned>(options.jobs, static_cast<unsigned>(pairs)));
  std::vector<std::vector<PBECertificate>> partial(jobs);
  auto work = [&](unsigned worker) {
    for (std::size_t idx = worker; idx < pairs; idx += jobs) {
      enumerate_pair(game, options, idx / n, idx % n, partial[worker]);
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::jthread> threads;
    for (unsigned w = 0; w < jobs; ++w) threads.emplace_back(work, w);
  }

  std::vector<PBECertificate> all;
  for (auto& chunk : partial) {
    std::move(chunk.begin(), chunk.end(), std::back_inserter(all));
  }
  std::sort(all.begin(), all.end(), [](const PBECertificate& x, const PBECertificate& y) {
    return x.profile.encode() < y.profile.encode();
  });
  return all;
}

std::vector<double> signal_grid(double m) {
  if (m == 0.0) return {0.0};
  return {0.0, m};
}

Verdicts oracle_verdicts(const DiscreteGame& game, double m,
                         const std::vector<PBECertificate>& certificates) {
  Verdicts v;
  for (const auto& cert : certificates) {
    const auto& s = cert.profile;
    const double m_r = game.messages[s.signal(TypeLabel::Restrained)];
    if (cert.cls == EquilibriumClass::PoolingOnRestraint && m_r == m) v.pooling_on_restraint = true;
    if (cert.cls == EquilibriumClass::Separating && m_r == m) v.separating = true;
  }
  return v;
}

std::vector<Discrepancy> verify_against_closed_form(const MechanismSpec& spec,
                                                    std::span<const GridPoint> grid,
                                                    const OracleOptions& options) {
  std::vector<Discrepancy> report;
  for (const auto& point : grid) {
    DiscreteGame game{spec, point.params, signal_grid(point.m)};
    auto certs = find_all_pbe(game, options);
    Verdicts oracle = oracle_verdicts(game, point.m, certs);
    Verdicts closed{pooling_exists(spec, point.params, point.m).holds,
                    separating_exists(spec, point.params, point.m).holds};
    if (!(oracle == closed)) {
      report.push_back({spec, point.params, point.m, game.messages, closed, oracle, std::move(certs)});
    }
  }
  return report;
}

}  // namespace restraint
