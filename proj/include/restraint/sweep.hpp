#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "restraint/closed_form.hpp"
#include "restraint/game_core.hpp"
#include "restraint/oracle.hpp"

namespace restraint {

enum class Symbol { c, V_D, V_B, r, p, prior, m };

std::string_view to_string(Symbol s);
Symbol parse_symbol(std::string_view name);

struct Axis {
  Symbol symbol = Symbol::m;
  double min = 0.0;
  double max = 1.0;
  std::size_t steps = 2;

  double value(std::size_t i) const;
};

/// Rectangular parameter grid. Symbols not on an axis come from `fixed`;
/// c, V_D, V_B and m are required, r and p default to 0, prior to 0.5.
struct GridSpec {
  MechanismSpec mechanism;
  std::vector<Axis> axes;
  std::map<Symbol, double> fixed;

  void validate() const;
  std::size_t point_count() const;
};

enum class Region { PoolingOnly, SeparatingOnly, Both, Neither, Invalid };

std::string_view to_string(Region r);
Region region_of(bool pooling, bool separating);

struct RegionRow {
  std::map<Symbol, double> coordinates;  // axis symbols only
  ModelParams params;
  double m = 0.0;
  Region classification = Region::Invalid;
  std::string invalid_reason;  // violated constraint for Invalid rows
  std::optional<EquilibriumReport> report;  // absent for Invalid rows
  bool oracle_checked = false;
};

class DiscrepancyError : public std::runtime_error {
 public:
  explicit DiscrepancyError(std::vector<Discrepancy> report)
      : std::runtime_error("oracle disagrees with closed-form verdicts at " +
                           std::to_string(report.size()) + " point(s)"),
        report_(std::move(report)) {}

  const std::vector<Discrepancy>& report() const noexcept { return report_; }

 private:
  std::vector<Discrepancy> report_;
};

struct SweepOptions {
  double oracle_fraction = 0.05;
  std::uint64_t seed = 0;
  OracleOptions oracle;
};

/// One row per grid point in row-major order (first axis slowest). A seeded
/// sample of ceil(oracle_fraction * valid points) rows is re-checked by the
/// oracle on {0, m}; any disagreement throws DiscrepancyError.
std::vector<RegionRow> run_sweep(const GridSpec& spec, const SweepOptions& options = {});

/// Indices of valid rows picked for oracle verification.
std::vector<std::size_t> oracle_sample(std::size_t valid_count, double fraction, std::uint64_t seed);

struct BoundaryPoint {
  std::map<Symbol, double> coordinates;  // midpoint between the two cells
  std::string condition;                 // validity, pooling, separating or type_shift
  Symbol along = Symbol::m;              // axis crossed
};

/// Midpoints between adjacent cells of a two-axis grid whose verdict differs.
std::vector<BoundaryPoint> boundary_trace(const GridSpec& spec);

}  // namespace restraint
