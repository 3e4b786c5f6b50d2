#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "restraint/io.hpp"
#include "restraint/sweep.hpp"

using namespace restraint;

namespace {

GridSpec four_by_four() {
  GridSpec g;
  g.mechanism = {Mechanism::TyingHands, Variant::Base};
  g.axes = {{Symbol::V_D, 0.5, 2.0, 4}, {Symbol::m, 0.5, 2.0, 4}};
  g.fixed = {{Symbol::c, 0.5}, {Symbol::V_B, 2.0}, {Symbol::r, 0.0}, {Symbol::p, 0.0}};
  return g;
}

GridSpec risk_r_axis() {
  GridSpec g;
  g.mechanism = {Mechanism::TyingHands, Variant::Risk};
  g.axes = {{Symbol::r, 0.0, 1.0, 5}};
  g.fixed = {{Symbol::V_D, 1.0}, {Symbol::c, 0.5}, {Symbol::m, 1.6}, {Symbol::V_B, 2.0}};
  return g;
}

bool same_rows(const std::vector<RegionRow>& a, const std::vector<RegionRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].coordinates != b[i].coordinates || a[i].classification != b[i].classification ||
        a[i].oracle_checked != b[i].oracle_checked || a[i].m != b[i].m) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("4x4 tying-hands grid: pooling exactly where V_D <= m") {
  SweepOptions opt;
  opt.oracle_fraction = 1.0;  // every point re-checked on {0, m}
  const auto rows = run_sweep(four_by_four(), opt);
  REQUIRE(rows.size() == 16);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double vd = rows[i].coordinates.at(Symbol::V_D);
    const double m = rows[i].coordinates.at(Symbol::m);
    // row-major: V_D is the slow axis
    CHECK(vd == doctest::Approx(0.5 + 0.5 * static_cast<double>(i / 4)));
    CHECK(m == doctest::Approx(0.5 + 0.5 * static_cast<double>(i % 4)));
    CHECK(rows[i].classification == (vd <= m ? Region::PoolingOnly : Region::Neither));
    CHECK(rows[i].oracle_checked);
  }
}

TEST_CASE("tying-hands risk: separating exactly for r >= c") {
  SweepOptions opt;
  opt.oracle_fraction = 1.0;
  const auto rows = run_sweep(risk_r_axis(), opt);
  REQUIRE(rows.size() == 5);
  const Region want[] = {Region::PoolingOnly, Region::PoolingOnly, Region::Both, Region::SeparatingOnly,
                         Region::SeparatingOnly};
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(rows[i].coordinates.at(Symbol::r) == doctest::Approx(0.25 * static_cast<double>(i)));
    CHECK(rows[i].classification == want[i]);
    CHECK(rows[i].report->separating.holds == (rows[i].params.r >= 0.5));
  }
}

TEST_CASE("points with V_B = c are emitted as Invalid") {
  GridSpec g;
  g.mechanism = {Mechanism::SunkCosts, Variant::Base};
  g.axes = {{Symbol::V_B, 0.25, 1.0, 4}};
  g.fixed = {{Symbol::c, 0.5}, {Symbol::V_D, 1.0}, {Symbol::m, 1.0}};
  SweepOptions opt;
  opt.oracle_fraction = 1.0;
  const auto rows = run_sweep(g, opt);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].classification == Region::Invalid);
  CHECK(rows[1].classification == Region::Invalid);  // V_B = c
  CHECK(rows[1].invalid_reason == "V_B > c");
  CHECK_FALSE(rows[1].report.has_value());
  CHECK_FALSE(rows[1].oracle_checked);
  CHECK(rows[2].classification == Region::Neither);
  CHECK(rows[3].oracle_checked);
}

TEST_CASE("grid spec validation") {
  auto g = four_by_four();
  g.axes[0].steps = 1;
  CHECK_THROWS_AS(run_sweep(g), ValidationError);
  g = four_by_four();
  g.axes[0].max = g.axes[0].min;
  CHECK_THROWS_AS(run_sweep(g), ValidationError);
  g = four_by_four();
  g.fixed.erase(Symbol::c);
  CHECK_THROWS_AS(run_sweep(g), ValidationError);
  g = four_by_four();
  g.axes.clear();
  CHECK_THROWS_AS(run_sweep(g), ValidationError);
  g = four_by_four();
  g.axes.push_back({Symbol::r, 0, 1, 2});
  g.axes.push_back({Symbol::p, 0, 1, 2});
  CHECK_THROWS_AS(run_sweep(g), ValidationError);
  g = four_by_four();
  g.axes[1].symbol = Symbol::V_D;
  CHECK_THROWS_AS(run_sweep(g), ValidationError);
  SweepOptions bad;
  bad.oracle_fraction = 1.5;
  CHECK_THROWS_AS(run_sweep(four_by_four(), bad), ValidationError);
}

TEST_CASE("axis endpoints are exact") {
  const Axis a{Symbol::m, 0.1, 0.7, 7};
  CHECK(a.value(0) == 0.1);
  CHECK(a.value(6) == 0.7);
}

TEST_CASE("oracle sampling: size, distinctness, determinism") {
  for (std::size_t n : {0U, 1U, 7U, 100U, 1000U}) {
    for (double f : {0.0, 0.05, 0.5, 1.0}) {
      const auto s = oracle_sample(n, f, 42);
      CHECK(s.size() == static_cast<std::size_t>(std::ceil(f * static_cast<double>(n))));
      CHECK(std::set<std::size_t>(s.begin(), s.end()).size() == s.size());
      for (auto i : s) CHECK(i < n);
      CHECK(s == oracle_sample(n, f, 42));
    }
  }
  CHECK(oracle_sample(1000, 0.05, 1) != oracle_sample(1000, 0.05, 2));
}

TEST_CASE("sweep determinism and region correctness") {
  GridSpec g;
  g.mechanism = {Mechanism::ReducibleCosts, Variant::Risk};
  g.axes = {{Symbol::m, 0.0, 3.0, 7}, {Symbol::r, 0.0, 1.5, 7}, {Symbol::V_B, 0.3, 2.0, 4}};
  g.fixed = {{Symbol::c, 0.5}, {Symbol::V_D, 1.0}, {Symbol::p, 0.1}};
  SweepOptions opt;
  opt.oracle_fraction = 0.2;
  opt.seed = 42;
  const auto a = run_sweep(g, opt);
  const auto b = run_sweep(g, opt);
  CHECK(a.size() == 196);
  CHECK(same_rows(a, b));

  opt.oracle.jobs = 3;
  CHECK(same_rows(a, run_sweep(g, opt)));

  std::size_t checked = 0, valid = 0;
  for (const auto& row : a) {
    if (row.classification == Region::Invalid) {
      CHECK_FALSE(row.report.has_value());
      continue;
    }
    ++valid;
    checked += row.oracle_checked;
    REQUIRE(row.report.has_value());
    CHECK(row.classification ==
          region_of(row.report->pooling_on_restraint.recompute_holds(), row.report->separating.recompute_holds()));
  }
  CHECK(checked == static_cast<std::size_t>(std::ceil(0.2 * static_cast<double>(valid))));
}

TEST_CASE("boundary trace: 4x4 grid straddles V_D = m") {
  const auto points = boundary_trace(four_by_four());
  REQUIRE_FALSE(points.empty());
  const double cell = 0.5;
  for (const auto& bp : points) {
    CHECK(bp.condition == "pooling");
    const double vd = bp.coordinates.at(Symbol::V_D), m = bp.coordinates.at(Symbol::m);
    CHECK(std::abs(vd - m) <= cell);
    // the two cells sit on opposite sides of the line
    const double lo_vd = bp.along == Symbol::V_D ? vd - cell / 2 : vd;
    const double hi_vd = bp.along == Symbol::V_D ? vd + cell / 2 : vd;
    const double lo_m = bp.along == Symbol::m ? m - cell / 2 : m;
    const double hi_m = bp.along == Symbol::m ? m + cell / 2 : m;
    CHECK((lo_vd <= lo_m + 1e-12) != (hi_vd <= hi_m + 1e-12));
  }
}

TEST_CASE("boundary trace: single region is empty") {
  auto g = four_by_four();
  g.axes = {{Symbol::V_D, 0.5, 1.0, 4}, {Symbol::m, 1.0, 3.0, 4}};
  CHECK(boundary_trace(g).empty());

  g.axes.pop_back();
  g.fixed[Symbol::m] = 2.0;
  CHECK_THROWS_AS(boundary_trace(g), ValidationError);
}

TEST_CASE("boundary trace: type shift follows p * V_B = c") {
  GridSpec g;
  g.mechanism = {Mechanism::TyingHands, Variant::Base};
  g.axes = {{Symbol::p, 0.0, 1.0, 21}, {Symbol::V_B, 1.0, 3.0, 21}};
  g.fixed = {{Symbol::c, 0.5}, {Symbol::V_D, 1.0}, {Symbol::m, 2.0}};
  const double dp = 0.05, dvb = 0.1;
  std::size_t n = 0;
  for (const auto& bp : boundary_trace(g)) {
    if (bp.condition != "type_shift") continue;
    ++n;
    const double p = bp.coordinates.at(Symbol::p), vb = bp.coordinates.at(Symbol::V_B);
    if (bp.along == Symbol::p) {
      CHECK(std::abs(p - 0.5 / vb) <= dp);
    } else {
      CHECK(std::abs(vb - 0.5 / p) <= dvb);
    }
  }
  CHECK(n >= 21);
}

TEST_CASE("region CSV header and row count") {
  const auto rows = run_sweep(four_by_four());
  std::ostringstream os;
  io::write_region_csv(os, rows, four_by_four().mechanism);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == io::kRegionCsvHeader);
  CHECK(line ==
        "mechanism,variant,c,V_D,V_B,r,p,prior,m,classification,pooling_slack,separating_slack_1,"
        "separating_slack_2,typeshift_slack,oracle_checked");
  std::size_t count = 0;
  while (std::getline(is, line)) {
    ++count;
    CHECK(line.rfind("tying-hands,base,", 0) == 0);
    CHECK(std::count(line.begin(), line.end(), ',') == 14);
  }
  CHECK(count == 16);
  CHECK(os.str().find('\r') == std::string::npos);
}
