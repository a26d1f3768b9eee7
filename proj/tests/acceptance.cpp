// Acceptance run: one [PASS]/[FAIL] line per criterion.
// Usage: acceptance [--known-red 8,11,12]
// Exit status is nonzero only when a criterion outside the known-red set fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "nlzcav/angular.hpp"
#include "nlzcav/atomstruct.hpp"
#include "nlzcav/cavitysys.hpp"
#include "nlzcav/experiments.hpp"
#include "nlzcav/hom.hpp"
#include "oracles.hpp"

using namespace nlzcav;

namespace {

constexpr double ns = 1e-9;

const AtomData& data() {
  static const AtomData d = AtomData::load_default();
  return d;
}

double mhz(double w) { return angular_to_mhz(w); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [out of tolerance]");
  }
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

// Hygiene of every master-equation solve made by the criteria.
struct HygieneLog {
  int runs = 0;
  int failed = 0;
  Hygiene worst;

  void add(const Hygiene& h) {
    ++runs;
    if (!h.ok()) ++failed;
    worst.max_trace_error = std::max(worst.max_trace_error, h.max_trace_error);
    worst.min_eigenvalue = std::min(worst.min_eigenvalue, h.min_eigenvalue);
    worst.max_purity = std::max(worst.max_purity, h.max_purity);
    worst.accounting_error = std::max(worst.accounting_error, h.accounting_error);
  }
  void add(const EmissionResult& r) { add(r.hygiene); }
  void add(const OperatingPoint& op) {
    add(op.plus);
    add(op.minus);
    if (op.depop_plus) add(op.depop_plus->emission);
    if (op.depop_minus) add(op.depop_minus->emission);
  }
  void add(const SweepResult& r) {
    for (const auto& p : r.points) {
      if (!p.ok) {
        ++runs;
        ++failed;
        continue;
      }
      add(p.hygiene_plus);
      add(p.hygiene_minus);
    }
  }
};

HygieneLog hygiene;

SweepOptions parallel() {
  SweepOptions o;
  o.jobs = std::max(1u, std::thread::hardware_concurrency());
  return o;
}

Outcome breit_rabi() {
  Outcome o;
  const auto& c = data().constants;
  const FineLevel& g = data().level("5S1_2");
  const double gJ = oracle::g_J(0, 0.5, 0.5, c.g_L, c.g_S);
  double worst = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int k = 0; k < 200; ++k) {
    const double B = 100.0 * k / 199 * kTeslaPerGauss;
    const auto sol = diagonalize_level(g, B, c);
    for (int F = 1; F <= 2; ++F)
      for (int m = -F; m <= F; ++m) {
        const double ref = oracle::breit_rabi(1.5, m, F == 2, 2 * g.A_hfs, gJ, c.g_I, c.mu_B * B / c.hbar());
        worst = std::max(worst, std::abs(sol.energy(F, m) - ref) / std::abs(ref));
      }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.check(worst < 1e-9, "max relative deviation " + fmt(worst, 3));
  o.check(secs < 1.0, "runtime " + fmt(secs, 3) + " s");
  return o;
}

Outcome field_anchor() {
  Outcome o;
  const auto& g = data().level("5S1_2");
  const double B = zeeman_field_from_splitting(mhz_to_angular(10.0), g, 1, 1, data().constants) / kTeslaPerGauss;
  const double Bm = zeeman_field_from_splitting(mhz_to_angular(10.0), g, 1, -1, data().constants) / kTeslaPerGauss;
  o.check(within(std::abs(B), 14.0, 0.5), "|B|(m=+1) = " + fmt(std::abs(B)) + " G");
  o.check(within(std::abs(Bm), 14.0, 0.5), "|B|(m=-1) = " + fmt(std::abs(Bm)) + " G");
  return o;
}

Outcome coupling_conservation() {
  Outcome o;
  for (const char* name : {"D1", "D2"}) {
    const auto& line = data().line(name);
    auto strength = [&](const ZeemanSolution& xs, HalfInt Fx, HalfInt mx) {
      double s = 0.0;
      for (auto [Fg, mg] : hyperfine_basis(line.ground))
        for (int q = -1; q <= 1; ++q) {
          const double A = mixed_coupling(Fg, mg, Fx, mx, q, line, xs);
          s += A * A;
        }
      return s;
    };
    const auto zero = diagonalize_level(line.excited, 0.0, data().constants);
    double worst = 0.0;
    for (int k = 0; k <= 125; ++k) {
      const auto xs = diagonalize_level(line.excited, 2.0 * k * kTeslaPerGauss, data().constants);
      for (auto [Fx, mx] : hyperfine_basis(line.excited))
        worst = std::max(worst, std::abs(strength(xs, Fx, mx) - strength(zero, Fx, mx)));
    }
    o.check(worst < 1e-10, std::string(name) + " max change " + fmt(worst, 3));
  }
  return o;
}

Outcome cooperativity() {
  Outcome o;
  struct Target {
    const char* scenario;
    double g, C;
  };
  for (Target t : {Target{"D1-current", 2.12, 0.40}, Target{"D1-short", 7.07, 0.89}}) {
    const Scenario& s = find_preset(t.scenario);
    CavityParams p = s.cavity;
    const auto sys = build_system(data().line(s.line), p, 0.0, data().constants);
    const auto c = atom_cavity_coupling(sys, 1, 1, 0);
    const double g = mhz(c.g);
    o.check(std::abs(g - t.g) / t.g < 0.05 && std::abs(c.cooperativity - t.C) / t.C < 0.05,
            std::string(t.scenario) + " g = " + fmt(g, 3) + " MHz, C = " + fmt(c.cooperativity, 3));
  }
  return o;
}

Outcome geometry() {
  Outcome o;
  CavityGeometry cur;
  cur.length = 339e-6;
  cur.transmission_1 = 1e6 * kTwoPi / 118000;
  cur.wavelength = 780.241e-9;
  cur.mirror_radius = 5e-2;
  const double fwhm_cur = mhz(cavity_params_from_geometry(cur).fwhm);
  o.check(std::abs(fwhm_cur - 3.75) / 3.75 < 0.01, "339 um cavity FWHM " + fmt(fwhm_cur) + " MHz");
  const CavityGeometry fib{128e-6, 5, 40, 10, 10, 794.979e-9, 200e-6, data().line("D1").reduced_dipole};
  const double fwhm_fib = mhz(cavity_params_from_geometry(fib).fwhm);
  o.check(std::abs(fwhm_fib - 12.12) / 12.12 < 0.01, "fibre cavity FWHM " + fmt(fwhm_fib) + " MHz");
  return o;
}

Outcome crossings() {
  Outcome o;
  const Scenario& s = find_preset("D2-current");
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = sweep_cavity_detuning(s, s.sweep.grid(), data(), parallel());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  hygiene.add(r);
  const auto x = find_crossings(r);
  std::string found;
  for (double v : x) found += (found.empty() ? "" : ", ") + fmt(mhz(v));
  o.detail << "crossings at " << found << " MHz";
  for (double target : {-13.0, 19.5, 81.0}) {
    double best = 1e300;
    for (double v : x) best = std::min(best, std::abs(mhz(v) - target));
    o.check(best <= 2.0, "nearest to " + fmt(target) + " off by " + fmt(best, 3));
  }
  o.check(secs < 300, "runtime " + fmt(secs, 3) + " s");
  return o;
}

Outcome imbalance() {
  Outcome o;
  Scenario s = find_preset("D2-current");
  for (auto [nlz, target] : {std::pair{true, 0.76}, std::pair{false, 0.41}}) {
    s.nlz_enabled = nlz;
    const auto op = run_operating_point(s, mhz_to_angular(72), data());
    hygiene.add(op);
    const double v = conditional_imbalance(op.plus.eta, op.minus.eta);
    o.check(within(v, target, 0.05), std::string("NLZ ") + (nlz ? "on" : "off") + " " + fmt(v, 3));
  }
  return o;
}

Outcome d1_fibre() {
  Outcome o;
  const Scenario& s = find_preset("D1-fibre");
  {
    const auto op = run_operating_point(s, mhz_to_angular(29), data());
    hygiene.add(op);
    o.check(within(op.plus.eta, 0.863, 0.02), "29 MHz eta+ " + fmt(op.plus.eta));
    o.check(within(op.minus.eta, 0.863, 0.02), "eta- " + fmt(op.minus.eta));
    o.check(within(op.plus.F_P, 14.1, 1.41), "F_P+ " + fmt(op.plus.F_P));
    o.check(within(op.minus.F_P, 7.86, 0.786), "F_P- " + fmt(op.minus.F_P));
  }
  {
    const auto op = run_operating_point(s, mhz_to_angular(10), data());
    hygiene.add(op);
    o.check(within(op.plus.eta, 0.900, 0.02), "10 MHz eta+ " + fmt(op.plus.eta));
    o.check(within(op.minus.eta, 0.783, 0.02), "eta- " + fmt(op.minus.eta));
    o.check(within(op.plus.F_P, 10.85, 1.085), "F_P+ " + fmt(op.plus.F_P));
    o.check(within(op.minus.F_P, 10.85, 1.085), "F_P- " + fmt(op.minus.F_P));
  }
  return o;
}

Outcome d1_short() {
  Outcome o;
  const auto op = run_operating_point(find_preset("D1-short"), mhz_to_angular(3.9), data());
  hygiene.add(op);
  o.check(within(op.plus.F_P, 1.34, 0.134), "F_P+ " + fmt(op.plus.F_P));
  o.check(within(op.minus.F_P, 1.47, 0.147), "F_P- " + fmt(op.minus.F_P));
  return o;
}

Outcome depopulation() {
  Outcome o;
  const Scenario& s = find_preset("D2-current");
  // Midway between the two m = 0 excited sublevels the cavity is resonant with.
  const auto sys = build_scenario_system(s, 0.0, data());
  std::vector<double> m0;
  for (const auto& a : sys.atomic)
    if (a.kind == AtomicKind::excited && a.m == HalfInt(0)) m0.push_back(a.energy);
  std::sort(m0.begin(), m0.end());
  const double mid = 0.5 * (m0.front() + m0.back());
  const auto op = run_operating_point(s, mid, data(), true);
  hygiene.add(op);
  o.detail << "Delta_C = " << fmt(mhz(mid)) << " MHz";
  o.check(op.depop_plus->depopulation < 0.25, "sigma+ pulse on m=-1 " + fmt(op.depop_plus->depopulation, 3));
  o.check(op.depop_minus->depopulation < 0.25, "sigma- pulse on m=+1 " + fmt(op.depop_minus->depopulation, 3));
  return o;
}

// Contamination probability at the most efficient D2-HOM detuning, shared by the last two criteria.
double hom_contamination() {
  static const double P = [] {
    const Scenario& s = find_preset("D2-HOM");
    const double dc = most_efficient_detuning(s, s.sweep.start, s.sweep.stop, 27, data(), parallel());
    const auto op = run_operating_point(s, dc, data());
    hygiene.add(op);
    const double p = contamination_probability(contamination_inputs(op));
    std::cout << "  D2-HOM operating point " << fmt(mhz(dc)) << " MHz, P_cont = " << fmt(p) << '\n';
    return p;
  }();
  return P;
}

Outcome appendix_chain() {
  Outcome o;
  const auto m = WavepacketModel::fitted_d2(hom_contamination());
  const auto t0 = std::chrono::steady_clock::now();
  const auto st = spontaneous_timing(m.L_ph, [&](double t) { return model_emission_profile(m, t); });
  const auto cp = contaminated_params(97.4 * ns, m.t0, m.L_ph, st.t_sp);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.check(within(st.t_sp / ns, 153.4, 1.0), "t_sp " + fmt(st.t_sp / ns) + " ns");
  o.check(within(st.jitter / ns, 45.0, 1.0), "jitter " + fmt(st.jitter / ns) + " ns");
  o.check(within(cp.delta_t_prime / ns, 47.6, 0.1), "delta_t' " + fmt(cp.delta_t_prime / ns) + " ns");
  o.check(within(cp.t0_prime / ns, 226.7, 0.1), "t0' " + fmt(cp.t0_prime / ns) + " ns");
  o.check(secs < 1.0, "runtime " + fmt(secs, 3) + " s");
  return o;
}

Outcome hom_visibility() {
  Outcome o;
  const double P = hom_contamination();
  std::vector<double> tau;
  for (int i = -1000; i <= 1000; ++i) tau.push_back(i * ns);
  const auto t0 = std::chrono::steady_clock::now();
  auto m = WavepacketModel::fitted_d2(P);
  const auto w = PairWeights::from_contamination(P, P);
  const auto plain = weighted_pair_interference(m, w, tau);
  const double V = visibility(plain);
  o.check(within(V, 0.809, 0.01), "V = " + fmt(V));

  m.beat_fraction = 0.09;
  m.beat_freq = mhz_to_angular(15);
  const auto beat = weighted_pair_interference(m, w, tau);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  auto at = [&](const std::vector<double>& v, double t_ns) { return v[static_cast<std::size_t>(std::lround(t_ns)) + 1000]; };
  auto excess = [&](double t_ns) { return at(beat.P_para, t_ns) - at(plain.P_para, t_ns); };
  bool nonneg = true;
  for (std::size_t i = 0; i < tau.size(); ++i) nonneg = nonneg && beat.P_para[i] >= plain.P_para[i] - 1e-12 * plain.P_perp[i];
  const double period = 1e3 / 15.0;
  o.check(nonneg, "beat only adds coincidences");
  o.check(excess(period / 2) > 10 * std::abs(excess(period)) && excess(1.5 * period) > 10 * std::abs(excess(period)) &&
              std::abs(excess(0)) < 1e-12 * at(plain.P_perp, 0),
          "oscillation with period " + fmt(period, 3) + " ns");
  auto half_width = [&](const CorrelationCurve& c) {
    for (std::size_t i = 1000; i < tau.size(); ++i)
      if (c.P_para[i] >= 0.5 * c.P_perp[i]) return tau[i] / ns;
    return 1e300;
  };
  const double hw_plain = half_width(plain), hw_beat = half_width(beat);
  o.check(hw_beat < hw_plain, "dip half width " + fmt(hw_plain, 3) + " -> " + fmt(hw_beat, 3) + " ns");
  o.check(secs < 10, "runtime " + fmt(secs, 3) + " s");
  return o;
}

Outcome hygiene_summary() {
  Outcome o;
  o.check(hygiene.runs > 0 && hygiene.failed == 0,
          std::to_string(hygiene.runs - hygiene.failed) + "/" + std::to_string(hygiene.runs) + " solves clean");
  o.detail << "; worst trace error " << fmt(hygiene.worst.max_trace_error, 2) << ", min eigenvalue "
           << fmt(hygiene.worst.min_eigenvalue, 2) << ", max purity " << fmt(hygiene.worst.max_purity, 12)
           << ", accounting " << fmt(hygiene.worst.accounting_error, 2);
  return o;
}

std::set<int> parse_list(const std::string& s) {
  std::set<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.insert(std::stoi(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known_red;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--known-red" && i + 1 < argc) {
      known_red = parse_list(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--known-red N,M,...]\n";
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"Breit-Rabi oracle", breit_rabi},
      {"field-strength anchor", field_anchor},
      {"coupling conservation", coupling_conservation},
      {"cooperativity identities", cooperativity},
      {"cavity geometry", geometry},
      {"equal-emission crossings", crossings},
      {"imbalance reproduction", imbalance},
      {"D1-fibre operating points", d1_fibre},
      {"D1-short operating point", d1_short},
      {"depopulation bound", depopulation},
      {"contaminated-photon timing chain", appendix_chain},
      {"HOM model visibility", hom_visibility},
      {"master-equation hygiene", hygiene_summary},
  };

  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "error: " << e.what();
    }
    const bool red = known_red.count(n) > 0;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << n << ". " << criteria[i].first << ": " << o.detail.str();
    if (!o.pass && red) std::cout << " (known red)";
    if (o.pass && red) std::cout << " (listed as known red but passes)";
    std::cout << std::endl;
    if (!o.pass && !red) ++unexpected;
  }
  std::cout << "[SKIP] 14. experimental data points and measured visibilities: excluded, not reproducible by simulation"
            << std::endl;
  return unexpected == 0 ? 0 : 1;
}
