#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "nlzcav/atomstruct.hpp"
#include "nlzcav/cavitysys.hpp"
#include "nlzcav/csv.hpp"
#include "nlzcav/experiments.hpp"
#include "nlzcav/hom.hpp"
#include "nlzcav/mesolve.hpp"

namespace {

using namespace nlzcav;
using json = nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

// Failure of a computation at a known grid coordinate.
struct PointFailure : std::runtime_error {
  PointFailure(const std::string& where, const std::string& what) : std::runtime_error(where + ": " + what) {}
};

struct Common {
  std::string scenario;
  std::string config;
  std::string out;
  std::string nlz;
  std::string grid;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void check_writable(const std::string& path) {
  if (path.empty()) throw ConfigError("--out is required");
  const auto parent = std::filesystem::absolute(path).parent_path();
  if (!std::filesystem::is_directory(parent)) throw ConfigError("output directory '" + parent.string() + "' does not exist");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << text;
}

Scenario resolve_scenario(const Common& c) {
  if (!c.config.empty() && !c.scenario.empty()) throw ConfigError("give either --scenario or --config, not both");
  Scenario s;
  if (!c.config.empty())
    s = scenario_from_json(read_file(c.config));
  else if (!c.scenario.empty())
    s = scenario_from_json(c.scenario);
  else
    throw ConfigError("a scenario is required (--scenario NAME|JSON or --config FILE)");
  if (!c.nlz.empty()) s.nlz_enabled = c.nlz == "on";
  return s;
}

double parse_double(const std::string& text, const std::string& what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) throw ConfigError("bad number '" + text + "' in " + what);
  return v;
}

// start:stop:points in MHz.
SweepRange parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw ConfigError("--grid must be start:stop:points, got '" + text + "'");
  const double start = parse_double(parts[0], "--grid");
  const double stop = parse_double(parts[1], "--grid");
  const double n = parse_double(parts[2], "--grid");
  if (n != std::floor(n) || n < 2 || n > 1e6) throw ConfigError("--grid needs an integer point count >= 2");
  if (!(stop > start)) throw ConfigError("--grid needs stop > start");
  return SweepRange{mhz_to_angular(start), mhz_to_angular(stop), static_cast<int>(n)};
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

std::string mhz_text(double omega) { return fmt(angular_to_mhz(omega), 6) + " MHz"; }

// levels -------------------------------------------------------------------

struct LevelsArgs {
  std::string level = "5P3_2";
  double bmax = 250.0;
  int points = 251;
  std::string out;
  std::string couplings;
};

std::string state_label(HalfInt F, HalfInt m) { return "|F=" + F.str() + " m=" + m.str() + ">"; }

int run_levels(const LevelsArgs& a) {
  check_writable(a.out);
  if (!a.couplings.empty()) check_writable(a.couplings);
  if (!(a.bmax > 0) || a.points < 2) throw ConfigError("levels needs --bmax > 0 and --points >= 2");
  const AtomData data = AtomData::load_default();
  const FineLevel& level = data.level(a.level);
  const TransitionLine* line = nullptr;
  for (const auto& [name, l] : data.lines)
    if (l.excited.label == a.level) line = &l;
  if (!a.couplings.empty() && !line) throw ConfigError("level '" + a.level + "' is not the excited level of a line");

  std::vector<double> fields;
  for (int i = 0; i < a.points; ++i) fields.push_back(a.bmax * i / (a.points - 1) * kTeslaPerGauss);
  const auto sols = diagonalize_along(level, fields, data.constants);
  const auto basis = hyperfine_basis(level);

  std::ofstream out(a.out);
  if (!out) throw ConfigError("cannot open '" + a.out + "' for writing");
  out << "B_gauss,level_label,F,m_F,energy_MHz\n";
  for (std::size_t i = 0; i < sols.size(); ++i)
    for (auto [F, m] : basis)
      out << format_number(fields[i] / kTeslaPerGauss) << ',' << a.level << ',' << format_number(F.value()) << ','
          << format_number(m.value()) << ',' << format_number(angular_to_mhz(sols[i].energy(F, m))) << '\n';

  std::size_t rows = 0;
  if (line) {
    const auto ground = hyperfine_basis(line->ground);
    std::ofstream cpl;
    if (!a.couplings.empty()) {
      cpl.open(a.couplings);
      if (!cpl) throw ConfigError("cannot open '" + a.couplings + "' for writing");
      cpl << "B_gauss,ground_label,excited_label,q,A_coeff\n";
    }
    for (std::size_t i = 0; i < sols.size() && cpl.is_open(); ++i)
      for (auto [Fg, mg] : ground)
        for (auto [Fx, mx] : basis) {
          const int q = integer_difference(mg, mx);
          if (q < -1 || q > 1) continue;
          cpl << format_number(fields[i] / kTeslaPerGauss) << ',' << state_label(Fg, mg) << ','
              << state_label(Fx, mx) << "~," << q << ','
              << format_number(mixed_coupling(Fg, mg, Fx, mx, q, *line, sols[i])) << '\n';
          ++rows;
        }
  }
  std::cout << "levels " << a.level << ": " << basis.size() << " sublevels, " << a.points << " fields up to " << a.bmax
            << " G -> " << a.out;
  if (rows) std::cout << ", " << rows << " couplings -> " << a.couplings;
  std::cout << '\n';
  return 0;
}

// produce ------------------------------------------------------------------

json hygiene_json(const Hygiene& h) {
  return {{"max_trace_error", h.max_trace_error},
          {"min_eigenvalue", h.min_eigenvalue},
          {"max_purity", h.max_purity},
          {"max_hermiticity_error", h.max_hermiticity_error},
          {"accounting_error", h.accounting_error}};
}

json emission_json(const EmissionResult& r) {
  return {{"eta", r.eta},
          {"F_P", r.F_P},
          {"n_cav_plus", r.n_cav_plus},
          {"n_cav_minus", r.n_cav_minus},
          {"n_spont", r.n_spont},
          {"depopulation", r.depopulation},
          {"final_populations", r.final_populations},
          {"decay_branching", r.decay_branching},
          {"hygiene", hygiene_json(r.hygiene)}};
}

OperatingPoint operating_point_or_fail(const Scenario& s, double dC, const AtomData& data, bool depop) {
  try {
    return run_operating_point(s, dC, data, depop);
  } catch (const NumericalError& e) {
    throw PointFailure("delta_C = " + mhz_text(dC), e.what());
  }
}

int run_produce(const Common& c, double delta_c_mhz, bool depop) {
  const Scenario s = resolve_scenario(c);
  s.validate();
  if (!c.out.empty()) check_writable(c.out);
  const AtomData data = AtomData::load_default();
  const double dC = mhz_to_angular(delta_c_mhz);
  const OperatingPoint op = operating_point_or_fail(s, dC, data, depop);

  std::cout << s.name << " delta_C=" << delta_c_mhz << " MHz nlz=" << (s.nlz_enabled ? "on" : "off")
            << ": eta+=" << fmt(op.plus.eta) << " eta-=" << fmt(op.minus.eta) << " F_P+=" << fmt(op.plus.F_P)
            << " F_P-=" << fmt(op.minus.F_P) << " n_sp+=" << fmt(op.plus.n_spont) << " n_sp-=" << fmt(op.minus.n_spont);
  if (op.depop_plus && op.depop_minus)
    std::cout << " depop+=" << fmt(op.depop_plus->depopulation) << " depop-=" << fmt(op.depop_minus->depopulation);
  std::cout << '\n';

  if (!c.out.empty()) {
    json j{{"scenario", json::parse(scenario_to_json(s))},
           {"delta_C_MHz", delta_c_mhz},
           {"plus", emission_json(op.plus)},
           {"minus", emission_json(op.minus)},
           {"conditional_imbalance", conditional_imbalance(op.plus.eta, op.minus.eta)}};
    if (op.depop_plus) j["depop_plus"] = op.depop_plus->depopulation;
    if (op.depop_minus) j["depop_minus"] = op.depop_minus->depopulation;
    write_text(c.out, j.dump(2) + '\n');
  }
  return 0;
}

// sweep --------------------------------------------------------------------

int run_sweep(const Common& c, bool depop) {
  Scenario s = resolve_scenario(c);
  if (!c.grid.empty()) s.sweep = parse_grid(c.grid);
  s.validate();
  check_writable(c.out);
  const AtomData data = AtomData::load_default();
  SweepOptions opt;
  opt.jobs = c.jobs;
  opt.with_depopulation = depop;
  const SweepResult r = sweep_cavity_detuning(s, s.sweep.grid(), data, opt);
  export_sweep(r, c.out);

  for (const auto& p : r.points)
    if (!p.ok) {
      std::cerr << "nlzcav: numerical failure at delta_C = " << mhz_text(p.delta_C) << ": " << p.error << '\n';
      return kExitNumerical;
    }

  std::cout << s.name << ": " << r.points.size() << " points, nlz=" << (s.nlz_enabled ? "on" : "off")
            << ", eta+ = eta- at";
  const auto crossings = find_crossings(r);
  if (crossings.empty()) std::cout << " (none)";
  for (double x : crossings) std::cout << ' ' << fmt(angular_to_mhz(x), 4);
  std::cout << " MHz -> " << c.out << '\n';
  return 0;
}

// scattering ---------------------------------------------------------------

int run_scattering(const Common& c, double delta_c_mhz, std::optional<double> rabi_mhz, double dwell_us) {
  const Scenario s = resolve_scenario(c);
  s.validate();
  check_writable(c.out);
  if (!(dwell_us > 0)) throw ConfigError("--dwell must be positive");
  const AtomData data = AtomData::load_default();
  const double dC = mhz_to_angular(delta_c_mhz);
  const SweepRange range = c.grid.empty() ? SweepRange{dC - 4 * s.delta_Z, dC + 4 * s.delta_Z, 201} : parse_grid(c.grid);
  const std::vector<double> grid = range.grid();
  const double rabi = rabi_mhz ? mhz_to_angular(*rabi_mhz) : s.pulse.peak_rabi;
  const CavitySystem sys = build_scenario_system(s, dC, data);

  std::vector<ScatteringPoint> pts(grid.size());
  std::vector<std::string> errors(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < grid.size();) {
      try {
        pts[i] = run_cw_scattering(sys, rabi, {grid[i]}, dwell_us * 1e-6).at(0);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const int n = std::clamp(c.jobs, 1, static_cast<int>(grid.size()));
    for (int k = 0; k < n; ++k) pool.emplace_back(worker);
  }
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (!errors[i].empty()) throw PointFailure("delta_L = " + mhz_text(grid[i]), errors[i]);

  CsvTable t;
  t.header = {"delta_L_MHz", "n_plus", "n_minus", "n_spont"};
  for (const auto& p : pts) t.rows.push_back({angular_to_mhz(p.delta_L), p.n_plus, p.n_minus, p.n_spont});
  write_csv(t, c.out);

  const auto best = std::max_element(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.n_plus + a.n_minus < b.n_plus + b.n_minus;
  });
  std::cout << s.name << " scattering at delta_C=" << delta_c_mhz << " MHz: " << pts.size()
            << " detunings, strongest emission " << fmt(best->n_plus + best->n_minus) << " photons at delta_L="
            << fmt(angular_to_mhz(best->delta_L), 5) << " MHz -> " << c.out << '\n';
  return 0;
}

// fit / hom ----------------------------------------------------------------

struct FitArgs {
  std::string profile;
  std::string initial;
  double L_ph_ns = 300.0;
  bool relation = false;
  std::optional<double> fix_p_cont;
};

EmissionFit fit_profile(const FitArgs& a) {
  const CsvTable t = read_csv_file(a.profile);
  if (t.header.size() < 2) throw ConfigError("profile CSV needs columns time_ns, counts");
  std::vector<double> time, counts;
  for (const auto& row : t.rows) {
    time.push_back(row[0] * 1e-9);
    counts.push_back(row[1]);
  }
  WavepacketModel init = a.initial.empty() ? WavepacketModel::fitted_d2(0.1) : wavepacket_model_from_json(read_file(a.initial));
  init.L_ph = a.L_ph_ns * 1e-9;
  EmissionFitOptions opt;
  opt.enforce_contamination_relation = a.relation;
  if (a.fix_p_cont) {
    init.P_cont = *a.fix_p_cont;
    opt.fix_P_cont = true;
  }
  try {
    init.validate();
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("initial model: ") + e.what());
  }
  return fit_emission_model(time, counts, init, opt);
}

void print_model(const WavepacketModel& m) {
  std::cout << "dt=" << fmt(m.delta_t * 1e9) << " t0=" << fmt(m.t0 * 1e9) << " dt'=" << fmt(m.delta_t_prime * 1e9)
            << " t0'=" << fmt(m.t0_prime * 1e9) << " jitter=" << fmt(m.jitter * 1e9) << " ns P_cont=" << fmt(m.P_cont);
}

int run_fit(const FitArgs& a, const std::string& out) {
  check_writable(out);
  const EmissionFit f = fit_profile(a);
  write_text(out, wavepacket_model_to_json(f.model) + '\n');
  std::cout << "fit: ";
  print_model(f.model);
  std::cout << " rms=" << fmt(f.rms_residual) << " iterations=" << f.iterations << " -> " << out << '\n';
  return 0;
}

struct HomArgs {
  std::string model;
  std::optional<double> p_cont;
  std::optional<double> delta_c;
  std::optional<double> beat_fraction;
  std::optional<double> beat_freq;
  double tau_max_ns = 600.0;
  double tau_step_ns = 2.0;
  std::optional<double> window_ns;
  FitArgs fit;
};

int run_hom(const Common& c, HomArgs a) {
  check_writable(c.out);
  const int sources = !a.model.empty() + !a.fit.profile.empty() + (!c.scenario.empty() || !c.config.empty());
  if (sources != 1) throw ConfigError("hom needs exactly one of --model, --profile or a scenario");
  if (!(a.tau_step_ns > 0) || !(a.tau_max_ns > a.tau_step_ns)) throw ConfigError("hom needs 0 < --tau-step < --tau-max");

  WavepacketModel m;
  json origin;
  if (!a.model.empty()) {
    m = wavepacket_model_from_json(read_file(a.model));
    origin = {{"model", a.model}};
  } else if (!a.fit.profile.empty()) {
    const EmissionFit f = fit_profile(a.fit);
    m = f.model;
    origin = {{"profile", a.fit.profile}, {"fit_rms", f.rms_residual}};
  } else {
    const Scenario s = resolve_scenario(c);
    s.validate();
    const AtomData data = AtomData::load_default();
    double dC = 0.0;
    if (a.delta_c) {
      dC = mhz_to_angular(*a.delta_c);
    } else {
      SweepOptions opt;
      opt.jobs = c.jobs;
      dC = most_efficient_detuning(s, s.sweep.start, s.sweep.stop, 27, data, opt);
    }
    const OperatingPoint op = operating_point_or_fail(s, dC, data, false);
    const double P = contamination_probability(contamination_inputs(op));
    m = WavepacketModel::fitted_d2(P);
    origin = {{"scenario", s.name}, {"delta_C_MHz", angular_to_mhz(dC)}, {"eta_plus", op.plus.eta}, {"eta_minus", op.minus.eta}};
  }
  if (a.p_cont) m.P_cont = *a.p_cont;
  if (a.beat_fraction) m.beat_fraction = *a.beat_fraction;
  if (a.beat_freq) m.beat_freq = mhz_to_angular(*a.beat_freq);
  try {
    m.validate();
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("wavepacket model: ") + e.what());
  }

  std::vector<double> tau, tau_ns;
  const int n = static_cast<int>(std::floor(a.tau_max_ns / a.tau_step_ns + 1e-9));
  for (int i = -n; i <= n; ++i) {
    tau_ns.push_back(i * a.tau_step_ns);
    tau.push_back(tau_ns.back() * 1e-9);
  }
  const PairWeights w = PairWeights::from_contamination(m.P_cont, m.P_cont);
  const CorrelationCurve curve = weighted_pair_interference(m, w, tau);
  for (std::size_t i = 0; i < tau.size(); ++i)
    if (!std::isfinite(curve.P_perp[i]) || !std::isfinite(curve.P_para[i]))
      throw PointFailure("tau = " + fmt(tau_ns[i], 6) + " ns", "non-finite correlation");

  CsvTable t;
  t.header = {"tau_ns", "P_perp", "P_para"};
  for (std::size_t i = 0; i < tau.size(); ++i) t.rows.push_back({tau_ns[i], curve.P_perp[i] * 1e-9, curve.P_para[i] * 1e-9});
  write_csv(t, c.out);

  const double v_full = visibility(curve);
  json summary{{"model", json::parse(wavepacket_model_to_json(m))},
               {"source", origin},
               {"weights",
                {{"clean_clean", w.clean_clean},
                 {"clean_contaminated", w.clean_contaminated},
                 {"contaminated_clean", w.contaminated_clean},
                 {"contaminated_contaminated", w.contaminated_contaminated}}},
               {"tau_max_ns", a.tau_max_ns},
               {"tau_step_ns", a.tau_step_ns},
               {"visibility_full", v_full}};
  std::optional<double> v_window;
  if (a.window_ns) {
    v_window = visibility(curve, *a.window_ns * 1e-9);
    summary["window_half_width_ns"] = *a.window_ns;
    summary["visibility_window"] = *v_window;
  }
  write_text(c.out + ".json", summary.dump(2) + '\n');

  std::cout << "hom: P_cont=" << fmt(m.P_cont) << " V=" << fmt(v_full);
  if (v_window) std::cout << " V(|tau|<=" << *a.window_ns << " ns)=" << fmt(*v_window);
  std::cout << " -> " << c.out << '\n';
  return 0;
}

void add_scenario_flags(CLI::App* sub, Common& c) {
  sub->add_option("--scenario", c.scenario, "preset name or inline scenario JSON");
  sub->add_option("--config", c.config, "scenario JSON file");
  sub->add_option("--nlz", c.nlz, "nonlinear Zeeman effects")->check(CLI::IsMember({"on", "off"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cavity photon production and two-photon interference with nonlinear Zeeman effects.\n"
               "All frequencies are ordinary frequencies in MHz (the /2pi convention); times in ns."};
  app.require_subcommand(1);

  Common c;
  LevelsArgs lv;
  auto* levels = app.add_subcommand("levels", "Zeeman sublevel energies versus field (CSV)");
  levels->add_option("--level", lv.level, "fine-structure level label")->capture_default_str();
  levels->add_option("--bmax", lv.bmax, "largest field in gauss")->capture_default_str();
  levels->add_option("--points", lv.points, "number of field points")->capture_default_str();
  levels->add_option("--out", lv.out, "energy CSV output")->required();
  levels->add_option("--couplings", lv.couplings, "coupling-coefficient CSV output (excited levels only)");

  double delta_c = 0.0;
  bool depop = false;
  auto* produce = app.add_subcommand("produce", "photon production in both directions at one cavity detuning");
  add_scenario_flags(produce, c);
  produce->add_option("--delta-c", delta_c, "cavity detuning (MHz)")->required();
  produce->add_flag("--depop", depop, "also evolve the wrong initial state");
  produce->add_option("--out", c.out, "optional JSON report");

  auto* sweep = app.add_subcommand("sweep", "cavity-detuning sweep (CSV plus scenario sidecar)");
  add_scenario_flags(sweep, c);
  sweep->add_option("--grid", c.grid, "start:stop:points in MHz");
  sweep->add_option("--jobs", c.jobs, "concurrent grid points")->check(CLI::PositiveNumber);
  sweep->add_flag("--depop", depop, "also evolve the wrong initial states");
  sweep->add_option("--out", c.out, "CSV output")->required();

  std::optional<double> rabi;
  double dwell_us = 2.0;
  auto* scattering = app.add_subcommand("scattering", "continuous-drive emission versus laser detuning (CSV)");
  add_scenario_flags(scattering, c);
  scattering->add_option("--delta-c", delta_c, "cavity detuning (MHz)")->required();
  scattering->add_option("--rabi", rabi, "drive Rabi frequency (MHz), default the scenario peak");
  scattering->add_option("--dwell", dwell_us, "drive duration (us)")->capture_default_str();
  scattering->add_option("--grid", c.grid, "laser detuning start:stop:points in MHz");
  scattering->add_option("--jobs", c.jobs, "concurrent detunings")->check(CLI::PositiveNumber);
  scattering->add_option("--out", c.out, "CSV output")->required();

  HomArgs h;
  auto* hom = app.add_subcommand("hom", "two-photon interference curves (CSV plus JSON summary)");
  add_scenario_flags(hom, c);
  hom->add_option("--model", h.model, "wavepacket model JSON");
  hom->add_option("--profile", h.fit.profile, "measured emission profile CSV (time_ns, counts) to fit first");
  hom->add_option("--L-ph", h.fit.L_ph_ns, "photon length for fitting (ns)")->capture_default_str();
  hom->add_option("--delta-c", h.delta_c, "operating detuning (MHz) when deriving from a scenario");
  hom->add_option("--p-cont", h.p_cont, "override the contamination probability")->check(CLI::Range(0.0, 1.0));
  hom->add_option("--beat-fraction", h.beat_fraction, "share of pairs with a frequency difference")->check(CLI::Range(0.0, 1.0));
  hom->add_option("--beat-freq", h.beat_freq, "frequency difference of those pairs (MHz)");
  hom->add_option("--tau-max", h.tau_max_ns, "largest delay (ns)")->capture_default_str();
  hom->add_option("--tau-step", h.tau_step_ns, "delay step (ns)")->capture_default_str();
  hom->add_option("--window", h.window_ns, "half width of the visibility window (ns)");
  hom->add_option("--jobs", c.jobs, "concurrent solves when locating the operating point")->check(CLI::PositiveNumber);
  hom->add_option("--out", c.out, "CSV output")->required();

  FitArgs f;
  std::string fit_out;
  auto* fit = app.add_subcommand("fit", "fit the clean / contaminated emission model to a profile");
  fit->add_option("--profile", f.profile, "CSV with columns time_ns, counts")->required();
  fit->add_option("--initial", f.initial, "starting wavepacket model JSON");
  fit->add_option("--L-ph", f.L_ph_ns, "photon length (ns)")->capture_default_str();
  fit->add_flag("--relation", f.relation, "tie the contaminated shape to one reset time");
  fit->add_option("--fix-p-cont", f.fix_p_cont, "hold the contamination probability fixed")->check(CLI::Range(0.0, 1.0));
  fit->add_option("--out", fit_out, "wavepacket model JSON output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*levels) return run_levels(lv);
    if (*produce) return run_produce(c, delta_c, depop);
    if (*sweep) return run_sweep(c, depop);
    if (*scattering) return run_scattering(c, delta_c, rabi, dwell_us);
    if (*hom) return run_hom(c, h);
    if (*fit) return run_fit(f, fit_out);
  } catch (const ConfigError& e) {
    std::cerr << "nlzcav: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const LookupError& e) {
    std::cerr << "nlzcav: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const PointFailure& e) {
    std::cerr << "nlzcav: numerical failure at " << e.what() << '\n';
    return kExitNumerical;
  } catch (const NumericalError& e) {
    std::cerr << "nlzcav: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const FitError& e) {
    std::cerr << "nlzcav: fit failed: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "nlzcav: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
