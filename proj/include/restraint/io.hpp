#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "restraint/closed_form.hpp"
#include "restraint/montecarlo.hpp"
#include "restraint/oracle.hpp"
#include "restraint/sweep.hpp"

namespace restraint::io {

using nlohmann::json;

/// Column header of the region table.
inline constexpr const char* kRegionCsvHeader =
    "mechanism,variant,c,V_D,V_B,r,p,prior,m,classification,pooling_slack,"
    "separating_slack_1,separating_slack_2,typeshift_slack,oracle_checked";

inline constexpr const char* kTraceCsvHeader =
    "trial,theta_initial,theta_final,message,fought,outcome,u_A,u_B";

/// Shortest decimal that round-trips, '.' separator regardless of locale.
std::string format_number(double v);

json to_json(const ModelParams& p);
ModelParams params_from_json(const json& j, ModelParams defaults = {});

json to_json(const ConditionReport& r);
json to_json(const EquilibriumReport& r);

json to_json(const PBECertificate& cert, const DiscreteGame& game);
json to_json(const std::vector<Discrepancy>& report);

json to_json(const StrategyProfile& s, const std::vector<double>& messages);
StrategyProfile profile_from_json(const json& j, const std::vector<double>& messages);

json to_json(const GridSpec& g);
GridSpec grid_spec_from_json(const json& j);

/// Same field names as the CSV columns; absent values are null.
json to_json(const RegionRow& row, const MechanismSpec& spec);
json to_json(const std::vector<RegionRow>& rows, const MechanismSpec& spec);
void write_region_csv(std::ostream& os, const std::vector<RegionRow>& rows, const MechanismSpec& spec);

json to_json(const std::vector<BoundaryPoint>& points);

json to_json(const SimResult& r);
void write_trace_csv(std::ostream& os, const std::vector<TrialRecord>& trace);

}  // namespace restraint::io
