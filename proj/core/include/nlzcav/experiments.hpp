#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nlzcav/atomstruct.hpp"
#include "nlzcav/cavitysys.hpp"
#include "nlzcav/hom.hpp"

namespace nlzcav {

struct SweepRange {
  double start = 0.0;  // rad/s
  double stop = 0.0;   // rad/s
  int points = 97;

  std::vector<double> grid() const;
};

struct Scenario {
  std::string name;
  std::string line;  // "D1" or "D2"
  CavityParams cavity;
  double delta_Z = 0.0;  // rad/s
  Pulse pulse;           // laser_detuning is re-derived per run
  bool nlz_enabled = true;
  SweepRange sweep;

  void validate() const;
};

/// The read-only presets: D2-current, D2-HOM, D1-current, D1-short, D1-fibre.
const std::vector<Scenario>& scenario_presets();
const Scenario& find_preset(const std::string& name);

/// JSON form with all frequencies in MHz (/2pi) and times in ns.
std::string scenario_to_json(const Scenario& s);
/// Accepts a preset name or a JSON document; missing fields fall back to the
/// preset named in "base" (if any). Throws ConfigError on schema violations.
Scenario scenario_from_json(const std::string& text);

/// Field (tesla) that produces the scenario's ground Zeeman splitting.
double scenario_field(const Scenario& s, const AtomData& data);

CavitySystem build_scenario_system(const Scenario& s, double delta_C, const AtomData& data);

struct OperatingPoint {
  double delta_C = 0.0;
  EmissionResult plus;   // sigma+ production, starting in m = +1
  EmissionResult minus;  // sigma- production, starting in m = -1
  std::optional<DepopulationResult> depop_plus;   // sigma+ pulse acting on m = -1
  std::optional<DepopulationResult> depop_minus;  // sigma- pulse acting on m = +1
};

OperatingPoint run_operating_point(const Scenario& s, double delta_C, const AtomData& data,
                                   bool with_depopulation = false, const RunOptions& options = {});

struct SweepPoint {
  double delta_C = 0.0;
  double eta_plus = 0.0;
  double eta_minus = 0.0;
  double n_spont_plus = 0.0;
  double n_spont_minus = 0.0;
  double F_P_plus = 0.0;
  double F_P_minus = 0.0;
  double depop_plus = 0.0;
  double depop_minus = 0.0;
  Hygiene hygiene_plus;
  Hygiene hygiene_minus;
  bool ok = true;
  std::string error;
};

struct SweepResult {
  Scenario scenario;
  std::vector<SweepPoint> points;
};

struct SweepOptions {
  int jobs = 1;
  bool with_depopulation = false;
  RunOptions run;
};

/// Runs both production directions at each grid point; failures are recorded
/// per point and the sweep continues. Points may run concurrently; results are
/// ordered by grid index.
SweepResult sweep_cavity_detuning(const Scenario& s, const std::vector<double>& delta_C, const AtomData& data,
                                  const SweepOptions& options = {});
SweepResult sweep_cavity_detuning(const Scenario& s, double start, double stop, int n_points, const AtomData& data,
                                  const SweepOptions& options = {});

/// eta_plus / (eta_plus + eta_minus).
double conditional_imbalance(double eta_plus, double eta_minus);

/// Detunings where eta_plus - eta_minus changes sign, by linear interpolation.
std::vector<double> find_crossings(const SweepResult& result);

/// Detuning of largest eta_plus + eta_minus: coarse scan with the given number of
/// points over [lo, hi], then Brent refinement around the best grid point.
double most_efficient_detuning(const Scenario& s, double lo, double hi, int coarse_points, const AtomData& data,
                               const SweepOptions& options = {});

/// Efficiencies, Purcell factors and the probability that a spontaneous decay
/// returns the atom to the initial sublevel of each production direction.
ContaminationInputs contamination_inputs(const OperatingPoint& op);

void write_sweep_csv(const SweepResult& result, std::ostream& out);
void write_sweep_csv(const SweepResult& result, const std::string& path);
/// Writes the CSV and a JSON sidecar (path + ".json") describing the scenario.
void export_sweep(const SweepResult& result, const std::string& csv_path);

}  // namespace nlzcav
