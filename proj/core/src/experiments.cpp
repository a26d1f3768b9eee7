#include "nlzcav/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <thread>

#include <boost/math/tools/minima.hpp>
#include <json.hpp>

#include "nlzcav/csv.hpp"

namespace nlzcav {

namespace {

using nlohmann::json;

constexpr const char* kSchema = "nlzcav-scenario/1";

Scenario make(std::string name, std::string line, double g_bar, double kappa, double delta_Z, double duration_ns,
              double rabi, double sweep_lo, double sweep_hi) {
  Scenario s;
  s.name = std::move(name);
  s.line = std::move(line);
  s.cavity.g_bar = mhz_to_angular(g_bar);
  s.cavity.kappa = mhz_to_angular(kappa);
  s.cavity.gamma = mhz_to_angular(3.0);
  s.cavity.coupling_reduction = 0.7;
  s.delta_Z = mhz_to_angular(delta_Z);
  s.pulse = Pulse{PulseShape::sin_squared, mhz_to_angular(rabi), duration_ns * 1e-9, 0.0};
  s.sweep = SweepRange{mhz_to_angular(sweep_lo), mhz_to_angular(sweep_hi), 97};
  return s;
}

// MHz (or ns) text for a stored value such that reading it back yields the same double.
double stable_unit(double stored, double scale) {
  // Prefer the shortest decimal that maps back exactly.
  for (int digits = 1; digits <= 17; ++digits) {
    char buf[64];
    const auto end = std::to_chars(buf, buf + sizeof buf, stored / scale, std::chars_format::general, digits).ptr;
    double v = 0.0;
    std::from_chars(buf, end, v);
    if (v * scale == stored) return v;
  }
  double u = stored / scale;
  for (int i = 0; i < 8 && u * scale != stored; ++i) u = std::nextafter(u, u * scale < stored ? HUGE_VAL : -HUGE_VAL);
  return u;
}

double to_mhz(double omega) { return stable_unit(omega, kTwoPi * 1e6); }
double to_ns(double seconds) { return stable_unit(seconds, 1e-9); }
double from_mhz(double mhz) { return mhz * (kTwoPi * 1e6); }
double from_ns(double ns) { return ns * 1e-9; }

double number_or(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
  return obj.at(key).get<double>();
}

const json& object_or_empty(const json& obj, const char* key) {
  static const json empty = json::object();
  if (!obj.contains(key)) return empty;
  if (!obj.at(key).is_object()) throw ConfigError(std::string("field '") + key + "' must be an object");
  return obj.at(key);
}

}  // namespace

std::vector<double> SweepRange::grid() const {
  if (points < 2) throw std::invalid_argument("a sweep needs at least 2 points");
  if (!(stop > start)) throw std::invalid_argument("sweep stop must exceed start");
  std::vector<double> g(static_cast<std::size_t>(points));
  const double step = (stop - start) / (points - 1);
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = start + i * step;
  g.back() = stop;
  return g;
}

void Scenario::validate() const {
  if (name.empty()) throw ConfigError("scenario name must not be empty");
  if (line != "D1" && line != "D2") throw ConfigError("line must be \"D1\" or \"D2\"");
  try {
    cavity.validate();
    pulse.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(delta_Z > 0)) throw ConfigError("delta_Z must be positive");
  if (sweep.points < 2 || !(sweep.stop > sweep.start)) throw ConfigError("sweep range must be increasing with >= 2 points");
}

const std::vector<Scenario>& scenario_presets() {
  static const std::vector<Scenario> presets = [] {
    std::vector<Scenario> p;
    p.push_back(make("D2-current", "D2", 7.32, 1.875, 14.0, 500.0, 14.0, -20.0, 110.0));
    p.push_back(make("D2-HOM", "D2", 7.32, 1.875, 14.0, 300.0, 19.0, -20.0, 110.0));
    p.push_back(make("D1-current", "D1", 7.27, 1.875, 14.0, 500.0, 35.0, -50.0, 150.0));
    p.push_back(make("D1-short", "D1", 24.29, 9.375, 70.0, 500.0, 120.0, -50.0, 150.0));
    p.push_back(make("D1-fibre", "D1", 66.0, 6.06, 42.0, 500.0, 66.0, -50.0, 150.0));
    for (const auto& s : p) s.validate();
    return p;
  }();
  return presets;
}

const Scenario& find_preset(const std::string& name) {
  for (const auto& s : scenario_presets())
    if (s.name == name) return s;
  throw ConfigError("unknown scenario '" + name + "'");
}

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["schema"] = kSchema;
  j["name"] = s.name;
  j["line"] = s.line;
  j["cavity"] = {{"g_bar_MHz", to_mhz(s.cavity.g_bar)},
                 {"kappa_MHz", to_mhz(s.cavity.kappa)},
                 {"gamma_MHz", to_mhz(s.cavity.gamma)},
                 {"coupling_reduction", s.cavity.coupling_reduction}};
  j["delta_Z_MHz"] = to_mhz(s.delta_Z);
  j["pulse"] = {{"shape", s.pulse.shape == PulseShape::sin_squared ? "sin2" : "constant"},
                {"peak_rabi_MHz", to_mhz(s.pulse.peak_rabi)},
                {"duration_ns", to_ns(s.pulse.duration)}};
  j["nlz"] = s.nlz_enabled;
  j["sweep"] = {{"start_MHz", to_mhz(s.sweep.start)}, {"stop_MHz", to_mhz(s.sweep.stop)}, {"points", s.sweep.points}};
  return j.dump(2);
}

Scenario scenario_from_json(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] != '{' && text[first] != '"') {
    const auto last = text.find_last_not_of(" \t\r\n");
    return find_preset(text.substr(first, last - first + 1));
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario JSON: ") + e.what());
  }
  if (j.is_string()) return find_preset(j.get<std::string>());
  if (!j.is_object()) throw ConfigError("scenario JSON must be an object or a preset name");
  if (j.contains("schema") && j.at("schema") != kSchema) throw ConfigError("unsupported scenario schema");

  auto only_keys = [](const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
    for (const auto& item : obj.items())
      if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return item.key() == k; }))
        throw ConfigError("unknown field '" + where + item.key() + "'");
  };
  only_keys(j, {"schema", "base", "name", "line", "nlz", "delta_Z_MHz", "cavity", "pulse", "sweep"}, "");
  if (j.contains("cavity") && j.at("cavity").is_object())
    only_keys(j.at("cavity"), {"g_bar_MHz", "kappa_MHz", "gamma_MHz", "coupling_reduction"}, "cavity.");
  if (j.contains("pulse") && j.at("pulse").is_object())
    only_keys(j.at("pulse"), {"shape", "duration_ns", "peak_rabi_MHz"}, "pulse.");
  if (j.contains("sweep") && j.at("sweep").is_object())
    only_keys(j.at("sweep"), {"start_MHz", "stop_MHz", "points"}, "sweep.");

  Scenario s;
  bool have_base = false;
  if (j.contains("base")) {
    if (!j.at("base").is_string()) throw ConfigError("field 'base' must name a preset");
    s = find_preset(j.at("base").get<std::string>());
    have_base = true;
  }
  auto require = [&](const json& obj, const char* key) {
    if (!have_base && !obj.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  };

  require(j, "name");
  if (j.contains("name")) {
    if (!j.at("name").is_string()) throw ConfigError("field 'name' must be a string");
    s.name = j.at("name").get<std::string>();
  }
  require(j, "line");
  if (j.contains("line")) {
    if (!j.at("line").is_string()) throw ConfigError("field 'line' must be a string");
    s.line = j.at("line").get<std::string>();
  }

  const json& cav = object_or_empty(j, "cavity");
  for (const char* k : {"g_bar_MHz", "kappa_MHz", "gamma_MHz"}) require(cav, k);
  s.cavity.g_bar = from_mhz(number_or(cav, "g_bar_MHz", to_mhz(s.cavity.g_bar)));
  s.cavity.kappa = from_mhz(number_or(cav, "kappa_MHz", to_mhz(s.cavity.kappa)));
  s.cavity.gamma = from_mhz(number_or(cav, "gamma_MHz", to_mhz(s.cavity.gamma)));
  s.cavity.coupling_reduction = number_or(cav, "coupling_reduction", have_base ? s.cavity.coupling_reduction : 1.0);

  require(j, "delta_Z_MHz");
  s.delta_Z = from_mhz(number_or(j, "delta_Z_MHz", to_mhz(s.delta_Z)));

  const json& pulse = object_or_empty(j, "pulse");
  for (const char* k : {"peak_rabi_MHz", "duration_ns"}) require(pulse, k);
  if (pulse.contains("shape")) {
    const auto shape = pulse.at("shape");
    if (shape == "sin2")
      s.pulse.shape = PulseShape::sin_squared;
    else if (shape == "constant")
      s.pulse.shape = PulseShape::constant;
    else
      throw ConfigError("pulse shape must be \"sin2\" or \"constant\"");
  }
  s.pulse.peak_rabi = from_mhz(number_or(pulse, "peak_rabi_MHz", to_mhz(s.pulse.peak_rabi)));
  s.pulse.duration = from_ns(number_or(pulse, "duration_ns", to_ns(s.pulse.duration)));

  if (j.contains("nlz")) {
    if (!j.at("nlz").is_boolean()) throw ConfigError("field 'nlz' must be true or false");
    s.nlz_enabled = j.at("nlz").get<bool>();
  }

  if (j.contains("sweep")) {
    const json& sw = object_or_empty(j, "sweep");
    s.sweep.start = from_mhz(number_or(sw, "start_MHz", to_mhz(s.sweep.start)));
    s.sweep.stop = from_mhz(number_or(sw, "stop_MHz", to_mhz(s.sweep.stop)));
    if (sw.contains("points")) {
      if (!sw.at("points").is_number_integer()) throw ConfigError("field 'points' must be an integer");
      s.sweep.points = sw.at("points").get<int>();
    }
  } else if (!have_base) {
    s.sweep = SweepRange{from_mhz(-20.0), from_mhz(110.0), 97};
  }
  s.validate();
  return s;
}

double scenario_field(const Scenario& s, const AtomData& data) {
  return zeeman_field_from_splitting(s.delta_Z, data.line(s.line).ground, 1, 1, data.constants);
}

CavitySystem build_scenario_system(const Scenario& s, double delta_C, const AtomData& data) {
  CavityParams p = s.cavity;
  p.delta_C = delta_C;
  return build_system(data.line(s.line), p, scenario_field(s, data), data.constants, SystemOptions{s.nlz_enabled, false});
}

OperatingPoint run_operating_point(const Scenario& s, double delta_C, const AtomData& data, bool with_depopulation,
                                   const RunOptions& options) {
  const CavitySystem sys = build_scenario_system(s, delta_C, data);
  OperatingPoint op;
  op.delta_C = delta_C;
  const Pulse plus = raman_resonant_pulse(sys, s.pulse, 1);
  const Pulse minus = raman_resonant_pulse(sys, s.pulse, -1);
  op.plus = run_photon_production(sys, plus, 1, options);
  op.minus = run_photon_production(sys, minus, -1, options);
  if (with_depopulation) {
    op.depop_plus = run_depopulation(sys, plus, -1, options);
    op.depop_minus = run_depopulation(sys, minus, 1, options);
  }
  return op;
}

SweepResult sweep_cavity_detuning(const Scenario& s, const std::vector<double>& delta_C, const AtomData& data,
                                  const SweepOptions& options) {
  if (delta_C.size() < 2) throw std::invalid_argument("a sweep needs at least 2 points");
  for (std::size_t i = 1; i < delta_C.size(); ++i)
    if (!(delta_C[i] > delta_C[i - 1])) throw std::invalid_argument("sweep grid must be strictly increasing");
  s.validate();

  SweepResult result;
  result.scenario = s;
  result.points.resize(delta_C.size());

  auto run_point = [&](std::size_t i) {
    SweepPoint& pt = result.points[i];
    pt.delta_C = delta_C[i];
    try {
      const OperatingPoint op = run_operating_point(s, delta_C[i], data, options.with_depopulation, options.run);
      pt.eta_plus = op.plus.eta;
      pt.eta_minus = op.minus.eta;
      pt.n_spont_plus = op.plus.n_spont;
      pt.n_spont_minus = op.minus.n_spont;
      pt.F_P_plus = op.plus.F_P;
      pt.F_P_minus = op.minus.F_P;
      pt.hygiene_plus = op.plus.hygiene;
      pt.hygiene_minus = op.minus.hygiene;
      if (op.depop_plus) pt.depop_plus = op.depop_plus->depopulation;
      if (op.depop_minus) pt.depop_minus = op.depop_minus->depopulation;
    } catch (const std::exception& e) {
      pt.ok = false;
      pt.error = e.what();
    }
  };

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(options.jobs, 1)), delta_C.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < delta_C.size(); ++i) run_point(i);
    return result;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < delta_C.size(); i = next++) run_point(i);
      });
  }
  return result;
}

SweepResult sweep_cavity_detuning(const Scenario& s, double start, double stop, int n_points, const AtomData& data,
                                  const SweepOptions& options) {
  return sweep_cavity_detuning(s, SweepRange{start, stop, n_points}.grid(), data, options);
}

double conditional_imbalance(double eta_plus, double eta_minus) {
  if (eta_plus < 0 || eta_minus < 0) throw std::domain_error("efficiencies must be non-negative");
  if (!(eta_plus + eta_minus > 0)) throw std::domain_error("imbalance undefined when both efficiencies vanish");
  return eta_plus / (eta_plus + eta_minus);
}

std::vector<double> find_crossings(const SweepResult& result) {
  std::vector<double> out;
  const auto& p = result.points;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (!p[i - 1].ok || !p[i].ok) continue;
    const double a = p[i - 1].eta_plus - p[i - 1].eta_minus;
    const double b = p[i].eta_plus - p[i].eta_minus;
    if (a == 0.0) {
      if (out.empty() || out.back() != p[i - 1].delta_C) out.push_back(p[i - 1].delta_C);
    } else if (a * b < 0) {
      out.push_back(p[i - 1].delta_C + (p[i].delta_C - p[i - 1].delta_C) * a / (a - b));
    }
  }
  if (!p.empty() && p.back().ok && p.back().eta_plus == p.back().eta_minus) out.push_back(p.back().delta_C);
  return out;
}

double most_efficient_detuning(const Scenario& s, double lo, double hi, int coarse_points, const AtomData& data,
                               const SweepOptions& options) {
  const SweepResult coarse = sweep_cavity_detuning(s, lo, hi, coarse_points, data, options);
  std::size_t best = 0;
  double best_eta = -1.0;
  for (std::size_t i = 0; i < coarse.points.size(); ++i) {
    const auto& p = coarse.points[i];
    if (p.ok && p.eta_plus + p.eta_minus > best_eta) {
      best_eta = p.eta_plus + p.eta_minus;
      best = i;
    }
  }
  if (best_eta < 0) throw std::runtime_error("no sweep point succeeded");
  const auto& pts = coarse.points;
  const double a = pts[best == 0 ? 0 : best - 1].delta_C;
  const double b = pts[std::min(best + 1, pts.size() - 1)].delta_C;
  auto negative_eta = [&](double dc) {
    const OperatingPoint op = run_operating_point(s, dc, data, false, options.run);
    return -(op.plus.eta + op.minus.eta);
  };
  std::uintmax_t iterations = 60;
  return boost::math::tools::brent_find_minima(negative_eta, a, b, 30, iterations).first;
}

ContaminationInputs contamination_inputs(const OperatingPoint& op) {
  // decay_branching is ordered m = -1, 0, +1, sink.
  return {op.plus.eta, op.minus.eta, op.plus.F_P, op.minus.F_P, op.plus.decay_branching.at(2),
          op.minus.decay_branching.at(0)};
}

namespace {

CsvTable sweep_table(const SweepResult& result) {
  CsvTable t;
  t.header = {"delta_C_MHz", "eta_plus",    "eta_minus",   "n_spont_plus", "n_spont_minus", "F_P_plus",
              "F_P_minus",   "depop_plus",  "depop_minus", "ok"};
  for (const auto& p : result.points)
    t.rows.push_back({to_mhz(p.delta_C), p.eta_plus, p.eta_minus, p.n_spont_plus, p.n_spont_minus, p.F_P_plus,
                      p.F_P_minus, p.depop_plus, p.depop_minus, p.ok ? 1.0 : 0.0});
  return t;
}

}  // namespace

void write_sweep_csv(const SweepResult& result, std::ostream& out) { write_csv(sweep_table(result), out); }

void write_sweep_csv(const SweepResult& result, const std::string& path) { write_csv(sweep_table(result), path); }

void export_sweep(const SweepResult& result, const std::string& csv_path) {
  write_sweep_csv(result, csv_path);
  std::ofstream side(csv_path + ".json");
  if (!side) throw std::runtime_error("cannot open '" + csv_path + ".json' for writing");
  side << scenario_to_json(result.scenario) << '\n';
}

}  // namespace nlzcav
