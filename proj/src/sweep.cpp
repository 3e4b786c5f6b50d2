#include "restraint/sweep.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <random>
#include <set>
#include <thread>

namespace restraint {

namespace {

constexpr std::array<Symbol, 7> kAllSymbols{Symbol::c, Symbol::V_D, Symbol::V_B, Symbol::r,
                                            Symbol::p, Symbol::prior, Symbol::m};

void assign(ModelParams& params, double& m, Symbol s, double v) {
  switch (s) {
    case Symbol::c: params.c = v; break;
    case Symbol::V_D: params.V_D = v; break;
    case Symbol::V_B: params.V_B = v; break;
    case Symbol::r: params.r = v; break;
    case Symbol::p: params.p = v; break;
    case Symbol::prior: params.prior = v; break;
    case Symbol::m: m = v; break;
  }
}

RegionRow evaluate_point(const GridSpec& spec, const std::vector<std::size_t>& index) {
  RegionRow row;
  row.params = ModelParams{};
  row.params.r = 0.0;
  row.params.p = 0.0;
  row.params.prior = 0.5;
  for (const auto& [symbol, value] : spec.fixed) assign(row.params, row.m, symbol, value);
  for (std::size_t a = 0; a < spec.axes.size(); ++a) {
    const auto& axis = spec.axes[a];
    const double v = axis.value(index[a]);
    row.coordinates[axis.symbol] = v;
    assign(row.params, row.m, axis.symbol, v);
  }

  row.invalid_reason = row.params.violated_constraint();
  if (row.invalid_reason.empty() && !(row.m >= 0.0)) row.invalid_reason = "m >= 0";
  if (!row.invalid_reason.empty()) return row;

  row.report = classify(spec.mechanism, row.params, row.m);
  row.classification =
      region_of(row.report->pooling_on_restraint.holds, row.report->separating.holds);
  return row;
}

// Uniform integer in [0, bound) by rejection, independent of the standard
// library's distribution implementation.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace

std::string_view to_string(Symbol s) {
  switch (s) {
    case Symbol::c: return "c";
    case Symbol::V_D: return "V_D";
    case Symbol::V_B: return "V_B";
    case Symbol::r: return "r";
    case Symbol::p: return "p";
    case Symbol::prior: return "prior";
    case Symbol::m: return "m";
  }
  return "?";
}

Symbol parse_symbol(std::string_view name) {
  for (auto s : kAllSymbols) {
    if (name == to_string(s)) return s;
  }
  throw ValidationError("symbol in {c, V_D, V_B, r, p, prior, m}", "got '" + std::string(name) + "'");
}

double Axis::value(std::size_t i) const {
  if (i + 1 == steps) return max;
  return min + static_cast<double>(i) * (max - min) / static_cast<double>(steps - 1);
}

void GridSpec::validate() const {
  if (axes.empty() || axes.size() > 3) {
    throw ValidationError("1 <= axes <= 3", std::to_string(axes.size()) + " axes");
  }
  std::set<Symbol> seen;
  for (const auto& axis : axes) {
    if (axis.symbol == Symbol::prior) throw ValidationError("axis symbol in {c, V_D, V_B, r, p, m}", "prior");
    if (axis.steps < 2) throw ValidationError("steps >= 2", std::string(to_string(axis.symbol)));
    if (!(axis.min < axis.max)) throw ValidationError("min < max", std::string(to_string(axis.symbol)));
    if (!seen.insert(axis.symbol).second) {
      throw ValidationError("distinct axes", "duplicate " + std::string(to_string(axis.symbol)));
    }
    if (fixed.count(axis.symbol)) {
      throw ValidationError("axis symbols not fixed", std::string(to_string(axis.symbol)));
    }
  }
  for (auto required : {Symbol::c, Symbol::V_D, Symbol::V_B, Symbol::m}) {
    if (!seen.count(required) && !fixed.count(required)) {
      throw ValidationError("fixed and axes cover c, V_D, V_B, m",
                            "missing " + std::string(to_string(required)));
    }
  }
}

std::size_t GridSpec::point_count() const {
  std::size_t n = 1;
  for (const auto& axis : axes) n *= axis.steps;
  return n;
}

std::string_view to_string(Region r) {
  switch (r) {
    case Region::PoolingOnly: return "PoolingOnly";
    case Region::SeparatingOnly: return "SeparatingOnly";
    case Region::Both: return "Both";
    case Region::Neither: return "Neither";
    case Region::Invalid: return "Invalid";
  }
  return "?";
}

Region region_of(bool pooling, bool separating) {
  if (pooling && separating) return Region::Both;
  if (pooling) return Region::PoolingOnly;
  if (separating) return Region::SeparatingOnly;
  return Region::Neither;
}

std::vector<std::size_t> oracle_sample(std::size_t valid_count, double fraction,
                                       std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw ValidationError("0 <= oracle_fraction <= 1", std::to_string(fraction));
  }
  const auto take = std::min<std::size_t>(
      valid_count, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(valid_count))));
  std::vector<std::size_t> order(valid_count);
  for (std::size_t i = 0; i < valid_count; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < take; ++i) {
    const auto j = i + bounded(rng, valid_count - i);
    std::swap(order[i], order[j]);
  }
  order.resize(take);
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<RegionRow> run_sweep(const GridSpec& spec, const SweepOptions& options) {
  spec.validate();
  const std::size_t total = spec.point_count();
  std::vector<RegionRow> rows;
  rows.reserve(total);

  std::vector<std::size_t> index(spec.axes.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    rows.push_back(evaluate_point(spec, index));
    for (std::size_t a = spec.axes.size(); a-- > 0;) {
      if (++index[a] < spec.axes[a].steps) break;
      index[a] = 0;
    }
  }

  std::vector<std::size_t> valid;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].classification != Region::Invalid) valid.push_back(i);
  }
  std::vector<std::size_t> picked;
  for (auto k : oracle_sample(valid.size(), options.oracle_fraction, options.seed)) {
    picked.push_back(valid[k]);
  }

  std::vector<std::vector<Discrepancy>> found(picked.size());
  OracleOptions per_point = options.oracle;
  per_point.jobs = 1;
  auto check = [&](std::size_t slot) {
    const auto& row = rows[picked[slot]];
    GridPoint point{row.params, row.m};
    found[slot] = verify_against_closed_form(spec.mechanism, std::span(&point, 1), per_point);
  };
  const unsigned jobs = std::max(1U, options.oracle.jobs);
  if (jobs == 1 || picked.size() < 2) {
    for (std::size_t i = 0; i < picked.size(); ++i) check(i);
  } else {
    std::vector<std::jthread> threads;
    for (unsigned w = 0; w < jobs; ++w) {
      threads.emplace_back([&, w] {
        for (std::size_t i = w; i < picked.size(); i += jobs) check(i);
      });
    }
  }

  std::vector<Discrepancy> mismatches;
  for (std::size_t i = 0; i < picked.size(); ++i) {
    rows[picked[i]].oracle_checked = true;
    for (auto& d : found[i]) mismatches.push_back(std::move(d));
  }
  if (!mismatches.empty()) throw DiscrepancyError(std::move(mismatches));
  return rows;
}

std::vector<BoundaryPoint> boundary_trace(const GridSpec& spec) {
  if (spec.axes.size() != 2) {
    throw ValidationError("exactly 2 axes for boundary tracing",
                          std::to_string(spec.axes.size()) + " axes");
  }
  SweepOptions no_oracle;
  no_oracle.oracle_fraction = 0.0;
  const auto rows = run_sweep(spec, no_oracle);
  const std::size_t n0 = spec.axes[0].steps;
  const std::size_t n1 = spec.axes[1].steps;
  auto at = [&](std::size_t i, std::size_t j) -> const RegionRow& { return rows[i * n1 + j]; };

  std::vector<BoundaryPoint> out;
  auto compare = [&](const RegionRow& x, const RegionRow& y, Symbol along) {
    auto emit = [&](std::string condition) {
      BoundaryPoint bp;
      for (const auto& [symbol, value] : x.coordinates) {
        bp.coordinates[symbol] = 0.5 * (value + y.coordinates.at(symbol));
      }
      bp.condition = std::move(condition);
      bp.along = along;
      out.push_back(std::move(bp));
    };
    const bool xv = x.report.has_value();
    const bool yv = y.report.has_value();
    if (xv != yv) {
      emit("validity");
      return;
    }
    if (!xv) return;
    if (x.report->pooling_on_restraint.holds != y.report->pooling_on_restraint.holds) emit("pooling");
    if (x.report->separating.holds != y.report->separating.holds) emit("separating");
    if (type_shift_refrain(x.params).condition.holds != type_shift_refrain(y.params).condition.holds) {
      emit("type_shift");
    }
  };

  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      if (i + 1 < n0) compare(at(i, j), at(i + 1, j), spec.axes[0].symbol);
      if (j + 1 < n1) compare(at(i, j), at(i, j + 1), spec.axes[1].symbol);
    }
  }
  return out;
}

}  // namespace restraint
