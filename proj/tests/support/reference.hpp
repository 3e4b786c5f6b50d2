#pragma once

// Test-only reference models. Nothing here calls into the library's payoff or
// equilibrium code, so tests can use them as an independent second route.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "restraint/game_core.hpp"
#include "restraint/oracle.hpp"

namespace restraint::testing {

// Payoff cells written out per mechanism, exactly as tabulated:
//   tying hands   conflict [-c, -c]      exploit [th V_D - m, -V_B]  restraint [-th r, 0]
//   sunk          conflict [-c - m, -c]  exploit [th V_D - m, -V_B]  restraint [-th r - m, 0]
//   installment   conflict [-c, -c]      exploit [th V_D - m, -V_B]  restraint [-th r - m, 0]
//   reducible     conflict [-c - m, -c]  exploit [th V_D - m, -V_B]  restraint [-th r, 0]
inline std::array<double, 2> reference_payoff(Mechanism mech, bool risk, const ModelParams& p, int th,
                                              Outcome o, double m) {
  const double r = risk ? p.r : 0.0;
  switch (mech) {
    case Mechanism::TyingHands:
      if (o == Outcome::PreventiveConflict) return {-p.c, -p.c};
      if (o == Outcome::Exploit) return {th * p.V_D - m, -p.V_B};
      return {-th * r, 0.0};
    case Mechanism::SunkCosts:
      if (o == Outcome::PreventiveConflict) return {-p.c - m, -p.c};
      if (o == Outcome::Exploit) return {th * p.V_D - m, -p.V_B};
      return {-th * r - m, 0.0};
    case Mechanism::InstallmentCosts:
      if (o == Outcome::PreventiveConflict) return {-p.c, -p.c};
      if (o == Outcome::Exploit) return {th * p.V_D - m, -p.V_B};
      return {-th * r - m, 0.0};
    case Mechanism::ReducibleCosts:
      if (o == Outcome::PreventiveConflict) return {-p.c - m, -p.c};
      if (o == Outcome::Exploit) return {th * p.V_D - m, -p.V_B};
      return {-th * r, 0.0};
  }
  return {0.0, 0.0};
}

/// Re-checks a certificate directly: t2 best replies (ties go to restraint
/// unless `either`), t0 best messages, Bayes-consistent on-path posteriors,
/// and B's action optimal at the certificate's own posterior everywhere.
inline bool recheck_certificate(const DiscreteGame& g, const PBECertificate& cert, bool either = false) {
  constexpr double tol = 1e-9;
  const bool risk = g.spec.variant == Variant::Risk;
  const auto& s = cert.profile;
  const std::size_t n = g.messages.size();
  auto uA = [&](int th, Outcome o, double m) { return reference_payoff(g.spec.mechanism, risk, g.params, th, o, m)[0]; };
  auto uB = [&](Outcome o, double m) { return reference_payoff(g.spec.mechanism, risk, g.params, 0, o, m)[1]; };
  auto out_of = [](T2Action a) { return a == T2Action::Exploit ? Outcome::Exploit : Outcome::Restraint; };

  for (int th = 0; th < 2; ++th) {
    for (std::size_t k = 0; k < n; ++k) {
      const double m = g.messages[k];
      const double e = uA(th, Outcome::Exploit, m);
      const double rs = uA(th, Outcome::Restraint, m);
      const auto a = s.t2_action[th][k];
      if (a == T2Action::Restraint && rs < e - tol) return false;
      if (a == T2Action::Exploit && (either ? e < rs - tol : e <= rs + tol)) return false;
    }
    auto value = [&](std::size_t k) {
      const double m = g.messages[k];
      return s.fight_after[k] ? uA(th, Outcome::PreventiveConflict, m) : uA(th, out_of(s.t2_action[th][k]), m);
    };
    for (std::size_t k = 0; k < n; ++k) {
      if (value(k) > value(s.signal_of[th]) + tol) return false;
    }
  }

  for (std::size_t k = 0; k < n; ++k) {
    const double m = g.messages[k];
    const bool from_r = s.signal_of[0] == k, from_a = s.signal_of[1] == k;
    const double q = cert.beliefs.posterior[k];
    if (q < 0.0 || q > 1.0) return false;
    if (from_r && from_a && std::abs(q - g.params.prior) > 1e-12) return false;
    if (from_r && !from_a && q != 1.0) return false;
    if (from_a && !from_r && q != 0.0) return false;
    const double no_fight = q * uB(out_of(s.t2_action[0][k]), m) + (1 - q) * uB(out_of(s.t2_action[1][k]), m);
    const double fight = uB(Outcome::PreventiveConflict, m);
    if (s.fight_after[k] ? fight < no_fight - tol : no_fight < fight - tol) return false;
  }
  return true;
}

/// Random valid parameters for property tests.
inline ModelParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ModelParams p;
  p.c = 0.05 + 2.0 * u(rng);
  p.V_D = 0.05 + 3.0 * u(rng);
  p.V_B = p.c + 0.05 + 3.0 * u(rng);
  p.r = 2.0 * u(rng);
  p.p = u(rng);
  p.prior = 0.05 + 0.9 * u(rng);
  return p;
}

inline MechanismSpec spec_of(Mechanism m, Variant v) { return MechanismSpec{m, v}; }

inline const std::array<Mechanism, 4> kMechanisms{Mechanism::TyingHands, Mechanism::SunkCosts,
                                                  Mechanism::InstallmentCosts, Mechanism::ReducibleCosts};

}  // namespace restraint::testing
