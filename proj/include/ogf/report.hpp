#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ogf/solution.hpp"

namespace ogf {

/// Run report: method, cost, wall time, status, per-node pressures,
/// per-edge ratios and solver diagnostics. Keys are emitted in a fixed
/// order so that identical runs serialize identically apart from
/// wall_time_s.
nlohmann::ordered_json report_json(const FlowModel& m, const OgfSolution& s, double wall_time_s);
std::string report_string(const FlowModel& m, const OgfSolution& s, double wall_time_s);

struct ProfileRow {
  double milepost_km = 0.0;
  double pressure_psi = 0.0;
  std::string method;
};

/// Rows sorted by milepost. Throws InputError if a node has no milepost.
std::vector<ProfileRow> pressure_profile(const Network& n, const OgfSolution& s);
std::string pressure_profile_csv(const std::vector<ProfileRow>& rows);

struct SweepRow {
  int nbeta = 0;
  int nalpha = 0;
  double runtime_s = 0.0;
  double frac_error = 0.0;
};
std::string sweep_csv(const std::vector<SweepRow>& rows);

struct MethodRun {
  std::string method;
  OgfSolution solution;
  double seconds = 0.0;
};

/// |a - b| / max(|b|, floor).
double fractional_difference(double a, double b, double floor = 1e-9);

/// Checks GP <= SP, SP <= DP + slack, DP - slack <= greedy and SP <= greedy,
/// each with tolerance 1e-6 (1 + cost), over the methods present and
/// feasible. Returns one message per violation.
std::vector<std::string> ordering_violations(const std::vector<MethodRun>& runs, double disc_slack);

std::string compare_table(const std::vector<MethodRun>& runs, const std::vector<std::string>& violations);

}  // namespace ogf
