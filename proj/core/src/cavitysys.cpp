#include "nlzcav/cavitysys.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nlzcav/angular.hpp"

namespace nlzcav {

namespace {

constexpr PhotonSector kSectors[] = {PhotonSector::vacuum, PhotonSector::plus, PhotonSector::minus};

}  // namespace

double Pulse::envelope(double t) const {
  if (t < 0.0 || t > duration) return 0.0;
  if (shape == PulseShape::constant) return 1.0;
  const double s = std::sin(kPi * t / duration);
  return s * s;
}

void Pulse::validate() const {
  if (!(duration > 0)) throw std::invalid_argument("pulse duration must be positive");
  if (peak_rabi < 0) throw std::invalid_argument("peak Rabi frequency must be non-negative");
}

void CavityParams::validate() const {
  if (!(g_bar > 0 && kappa > 0 && gamma > 0)) throw std::invalid_argument("g_bar, kappa and gamma must be positive");
  if (!(coupling_reduction > 0 && coupling_reduction <= 1)) {
    throw std::invalid_argument("coupling reduction must lie in (0, 1]");
  }
}

std::string AtomicState::label() const {
  switch (kind) {
    case AtomicKind::ground:
      return "|" + F.str() + "," + m.str() + ">";
    case AtomicKind::excited:
      return "|" + F.str() + "," + m.str() + ">~";
    case AtomicKind::sink:
      return "sink";
  }
  return "?";
}

std::size_t CavitySystem::ground_index(int m) const {
  for (std::size_t a = 0; a < atomic.size(); ++a) {
    if (atomic[a].kind == AtomicKind::ground && atomic[a].m == HalfInt(m)) return a;
  }
  throw LookupError("no ground sublevel m=" + std::to_string(m));
}

std::size_t CavitySystem::excited_index(HalfInt F, HalfInt m) const {
  for (std::size_t a = 0; a < atomic.size(); ++a) {
    if (atomic[a].kind == AtomicKind::excited && atomic[a].F == F && atomic[a].m == m) return a;
  }
  throw LookupError("no excited sublevel |" + F.str() + "," + m.str() + ">~");
}

double CavitySystem::coupling(std::size_t ground, std::size_t excited) const {
  for (const auto& c : couplings)
    if (c.ground == ground && c.excited == excited) return c.A;
  return 0.0;
}

double CavitySystem::total_decay(std::size_t excited) const {
  double total = 0.0;
  for (const auto& d : decays)
    if (d.excited == excited) total += d.rate;
  return total;
}

std::vector<HalfInt> CavitySystem::excited_manifolds() const {
  std::vector<HalfInt> out;
  for (const auto& s : atomic)
    if (s.kind == AtomicKind::excited && std::find(out.begin(), out.end(), s.F) == out.end()) out.push_back(s.F);
  return out;
}

CavitySystem build_system(const TransitionLine& line, const CavityParams& params, double B,
                          const PhysicalConstants& constants, const SystemOptions& options) {
  if (B < 0) throw std::domain_error("field magnitude must be non-negative");
  params.validate();
  const FineLevel& gl = line.ground;
  const FineLevel& xl = line.excited;
  const auto ground_F = gl.allowed_F();
  auto excited_F = xl.allowed_F();
  if (std::find(ground_F.begin(), ground_F.end(), HalfInt(1)) == ground_F.end() || excited_F.size() < 2) {
    throw LookupError("unsupported transition line '" + line.name + "'");
  }
  // The two lowest excited hyperfine manifolds take part in the dynamics.
  excited_F.resize(2);

  CavitySystem sys;
  sys.line = line;
  sys.params = params;
  sys.options = options;
  sys.B = B;
  sys.delta_Z = std::abs(linear_zeeman_shift(gl, 1, 1, B, constants));

  const ZeemanSolution gsol = diagonalize_level(gl, B, constants);
  const ZeemanSolution xsol = diagonalize_level(xl, B, constants);
  const double ground_ref = hyperfine_energy(gl, 1);
  const double excited_ref = hyperfine_energy(xl, excited_F.front());

  for (int m = -1; m <= 1; ++m) {
    AtomicState s{AtomicKind::ground, 1, m, 0.0};
    s.energy = options.nlz ? gsol.energy(1, m) - ground_ref : linear_zeeman_shift(gl, 1, m, B, constants);
    sys.atomic.push_back(s);
  }
  for (HalfInt F : excited_F) {
    for (HalfInt m = -F; m <= F; m += 1) {
      AtomicState s{AtomicKind::excited, F, m, 0.0};
      s.energy = options.nlz ? xsol.energy(F, m) - excited_ref
                             : hyperfine_energy(xl, F) - excited_ref + linear_zeeman_shift(xl, F, m, B, constants);
      sys.atomic.push_back(s);
    }
  }
  sys.dark_sink = sys.atomic.size();
  sys.atomic.push_back(AtomicState{AtomicKind::sink, 0, 0, 0.0});

  for (std::size_t a = 0; a < sys.atomic.size(); ++a)
    for (PhotonSector p : kSectors)
      sys.basis.push_back(BasisState{a, p == PhotonSector::plus ? 1 : 0, p == PhotonSector::minus ? 1 : 0});

  auto coupling_A = [&](HalfInt Fg, HalfInt mg, HalfInt Fx, HalfInt mx) {
    const int q = integer_difference(mg, mx);
    if (q < -1 || q > 1) return 0.0;
    if (!options.nlz) return coupling_zero_field(Fg, mg, Fx, mx, q, gl.I, gl.J, xl.J);
    return mixed_coupling(Fg, mg, Fx, mx, q, line, xsol, options.ground_mixing ? &gsol : nullptr);
  };

  for (std::size_t x = 0; x < sys.atomic.size(); ++x) {
    const auto& xs = sys.atomic[x];
    if (xs.kind != AtomicKind::excited) continue;

    double total = 0.0;  // full decay manifold, both ground hyperfine levels
    std::vector<std::pair<std::size_t, double>> to_coupled;
    for (HalfInt Fg : ground_F) {
      for (HalfInt mg = -Fg; mg <= Fg; mg += 1) {
        const double A = coupling_A(Fg, mg, xs.F, xs.m);
        total += A * A;
        if (Fg == HalfInt(1) && A != 0.0) {
          const std::size_t g = sys.ground_index(integer_difference(mg, 0));
          to_coupled.emplace_back(g, A);
        }
      }
    }
    if (total <= 0) throw std::logic_error("excited state " + xs.label() + " has no decay channel");

    double coupled_fraction = 0.0;
    for (auto [g, A] : to_coupled) {
      sys.couplings.push_back(CouplingEntry{g, x, integer_difference(sys.atomic[g].m, xs.m), A});
      const double fraction = A * A / total;
      coupled_fraction += fraction;
      sys.decays.push_back(DecayEntry{x, g, 2.0 * params.gamma * fraction});
    }
    const double sink_fraction = 1.0 - coupled_fraction;
    if (sink_fraction > 1e-14) sys.decays.push_back(DecayEntry{x, sys.dark_sink, 2.0 * params.gamma * sink_fraction});
  }
  return sys;
}

namespace {

CMatrix diagonal_energies(const CavitySystem& sys, double delta_L) {
  const auto D = static_cast<Eigen::Index>(sys.dim());
  CMatrix H = CMatrix::Zero(D, D);
  const double dC = sys.params.delta_C;
  for (std::size_t a = 0; a < sys.atomic.size(); ++a) {
    const auto& s = sys.atomic[a];
    for (PhotonSector p : kSectors) {
      const auto i = static_cast<Eigen::Index>(sys.index(a, p));
      const bool photon = p != PhotonSector::vacuum;
      switch (s.kind) {
        case AtomicKind::ground:
          H(i, i) = (photon ? dC : delta_L) + s.energy;
          break;
        case AtomicKind::excited:
          H(i, i) = s.energy + (photon ? dC - delta_L : 0.0);
          break;
        case AtomicKind::sink:
          break;
      }
    }
  }
  return H;
}

void add_cavity_terms(const CavitySystem& sys, CMatrix& H) {
  for (const auto& c : sys.couplings) {
    const int dm = integer_difference(sys.atomic[c.excited].m, sys.atomic[c.ground].m);
    const PhotonSector mode = dm == 1 ? PhotonSector::plus : PhotonSector::minus;
    if (dm != 1 && dm != -1) continue;
    const auto x0 = static_cast<Eigen::Index>(sys.index(c.excited, PhotonSector::vacuum));
    const auto g1 = static_cast<Eigen::Index>(sys.index(c.ground, mode));
    H(x0, g1) += -c.A * sys.params.g_bar;
    H(g1, x0) += -c.A * sys.params.g_bar;
  }
}

CMatrix laser_terms(const CavitySystem& sys, double peak_rabi) {
  const auto D = static_cast<Eigen::Index>(sys.dim());
  CMatrix H = CMatrix::Zero(D, D);
  for (const auto& c : sys.couplings) {
    if (c.q == 0) continue;  // linear polarisation orthogonal to the axis drives sigma+ and sigma- only
    for (PhotonSector p : kSectors) {
      const auto x = static_cast<Eigen::Index>(sys.index(c.excited, p));
      const auto g = static_cast<Eigen::Index>(sys.index(c.ground, p));
      H(x, g) += -0.5 * c.A * peak_rabi;
      H(g, x) += -0.5 * c.A * peak_rabi;
    }
  }
  return H;
}

}  // namespace

Hamiltonian build_interaction(const CavitySystem& system, const Pulse& pulse) {
  const auto D = static_cast<Eigen::Index>(system.dim());
  CMatrix cavity = CMatrix::Zero(D, D);
  add_cavity_terms(system, cavity);
  return Hamiltonian(cavity, laser_terms(system, pulse.peak_rabi), [pulse](double t) { return pulse.envelope(t); });
}

Hamiltonian build_hamiltonian(const CavitySystem& system, const Pulse& pulse) {
  CMatrix H = diagonal_energies(system, pulse.laser_detuning);
  add_cavity_terms(system, H);
  return Hamiltonian(H, laser_terms(system, pulse.peak_rabi), [pulse](double t) { return pulse.envelope(t); });
}

std::vector<CollapseChannel> build_collapse_channels(const CavitySystem& system) {
  const auto D = static_cast<Eigen::Index>(system.dim());
  std::vector<CollapseChannel> out;
  const double cav = std::sqrt(2.0 * system.params.kappa);
  for (PhotonSector mode : {PhotonSector::plus, PhotonSector::minus}) {
    CMatrix op = CMatrix::Zero(D, D);
    for (std::size_t a = 0; a < system.atomic.size(); ++a) {
      op(static_cast<Eigen::Index>(system.index(a, PhotonSector::vacuum)),
         static_cast<Eigen::Index>(system.index(a, mode))) = cav;
    }
    const bool plus = mode == PhotonSector::plus;
    out.push_back({std::move(op), plus ? "cavity sigma+ decay" : "cavity sigma- decay",
                   plus ? EmissionKind::cavity_plus : EmissionKind::cavity_minus});
  }
  for (const auto& d : system.decays) {
    CMatrix op = CMatrix::Zero(D, D);
    const double amp = std::sqrt(d.rate);
    for (PhotonSector p : kSectors) {
      op(static_cast<Eigen::Index>(system.index(d.target, p)), static_cast<Eigen::Index>(system.index(d.excited, p))) = amp;
    }
    out.push_back({std::move(op), "spont " + system.atomic[d.excited].label() + " -> " + system.atomic[d.target].label(),
                   EmissionKind::spontaneous});
  }
  return out;
}

CMatrix excitation_number(const CavitySystem& system) {
  const auto D = static_cast<Eigen::Index>(system.dim());
  CMatrix N = CMatrix::Zero(D, D);
  for (std::size_t a = 0; a < system.atomic.size(); ++a) {
    for (PhotonSector p : kSectors) {
      const auto i = static_cast<Eigen::Index>(system.index(a, p));
      N(i, i) = (system.atomic[a].kind == AtomicKind::excited ? 1.0 : 0.0) + (p != PhotonSector::vacuum ? 1.0 : 0.0);
    }
  }
  return N;
}

Pulse raman_resonant_pulse(const CavitySystem& system, const Pulse& pulse, int initial_m) {
  if (initial_m != 1 && initial_m != -1) throw std::invalid_argument("initial sublevel must be m = +1 or -1");
  Pulse out = pulse;
  out.laser_detuning = system.params.delta_C + 2.0 * initial_m * system.delta_Z;
  return out;
}

bool Hygiene::ok(double trace_tol, double eig_tol, double purity_tol, double accounting_tol) const {
  return max_trace_error < trace_tol && min_eigenvalue > -eig_tol && max_purity <= 1.0 + purity_tol &&
         accounting_error < accounting_tol;
}

namespace {

EmissionResult summarize(const CavitySystem& system, const Trajectory& traj, const std::vector<CollapseChannel>& channels,
                         const DensityMatrix& rho0, const CMatrix& N) {
  EmissionResult r;
  r.n_cav_plus = integrate_channel_flux(traj, EmissionKind::cavity_plus);
  r.n_cav_minus = integrate_channel_flux(traj, EmissionKind::cavity_minus);
  r.n_spont = integrate_channel_flux(traj, EmissionKind::spontaneous);
  r.F_P = r.n_spont > 0 ? (r.n_cav_plus + r.n_cav_minus) / r.n_spont : 0.0;

  const CMatrix& rho = traj.final_state.rho;
  r.final_populations.assign(4, 0.0);
  for (int m = -1; m <= 1; ++m) {
    const std::size_t a = system.ground_index(m);
    for (PhotonSector p : kSectors) {
      const auto i = static_cast<Eigen::Index>(system.index(a, p));
      r.final_populations[static_cast<std::size_t>(m + 1)] += rho(i, i).real();
    }
  }
  for (PhotonSector p : kSectors) {
    const auto i = static_cast<Eigen::Index>(system.index(system.dark_sink, p));
    r.final_populations[3] += rho(i, i).real();
  }

  r.decay_branching.assign(4, 0.0);
  std::size_t spont = 0;
  for (std::size_t c = 0; c < channels.size(); ++c) {
    if (channels[c].counts_as != EmissionKind::spontaneous) continue;
    const auto& d = system.decays[spont++];
    const std::size_t slot = d.target == system.dark_sink ? 3 : static_cast<std::size_t>(
                                                                   integer_difference(system.atomic[d.target].m, 0) + 1);
    r.decay_branching[slot] += traj.cumulative_flux[c].back();
  }
  if (r.n_spont > 0)
    for (double& b : r.decay_branching) b /= r.n_spont;

  r.stored_excitation = expectation(traj.final_state, N);
  r.injected_excitation = traj.injected_excitation.empty() ? 0.0 : traj.injected_excitation.back();
  const double initial = expectation(rho0, N);
  r.hygiene.max_trace_error = traj.max_trace_error;
  r.hygiene.min_eigenvalue = traj.min_eigenvalue;
  r.hygiene.max_purity = traj.max_purity;
  r.hygiene.max_hermiticity_error = traj.max_hermiticity_error;
  r.hygiene.accounting_error =
      std::abs(r.stored_excitation - initial + r.n_cav_plus + r.n_cav_minus + r.n_spont - r.injected_excitation);
  return r;
}

EmissionResult simulate(const CavitySystem& system, const Pulse& pulse, const DensityMatrix& rho0, double t_end,
                        const RunOptions& options) {
  const Hamiltonian H = build_hamiltonian(system, pulse);
  const auto channels = build_collapse_channels(system);
  const CMatrix N = excitation_number(system);
  EvolveOptions eo = options.evolve;
  eo.store_states = false;
  eo.excitation_number = N;
  const Trajectory traj = evolve(H, channels, rho0, uniform_grid(0.0, t_end, options.report_step), eo);
  return summarize(system, traj, channels, rho0, N);
}

}  // namespace

EmissionResult run_photon_production(const CavitySystem& system, const Pulse& pulse, int initial_m,
                                     const RunOptions& options) {
  pulse.validate();
  if (initial_m != 1 && initial_m != -1) throw std::invalid_argument("initial sublevel must be m = +1 or -1");
  const auto D = static_cast<Eigen::Index>(system.dim());
  const auto start = static_cast<Eigen::Index>(system.index(system.ground_index(initial_m), PhotonSector::vacuum));
  const DensityMatrix rho0 = DensityMatrix::pure(D, start);
  EmissionResult r = simulate(system, pulse, rho0, pulse.duration, options);
  r.eta = initial_m == 1 ? r.n_cav_plus : r.n_cav_minus;
  r.depopulation = 1.0 - r.final_populations[static_cast<std::size_t>(initial_m + 1)];
  return r;
}

DepopulationResult run_depopulation(const CavitySystem& system, const Pulse& pulse, int wrong_state_m,
                                    const RunOptions& options) {
  pulse.validate();
  if (wrong_state_m != 1 && wrong_state_m != -1) throw std::invalid_argument("wrong state must be m = +1 or -1");
  const auto D = static_cast<Eigen::Index>(system.dim());
  const auto start = static_cast<Eigen::Index>(system.index(system.ground_index(wrong_state_m), PhotonSector::vacuum));
  const DensityMatrix rho0 = DensityMatrix::pure(D, start);
  DepopulationResult out;
  out.emission = simulate(system, pulse, rho0, pulse.duration, options);
  out.emission.depopulation = 1.0 - out.emission.final_populations[static_cast<std::size_t>(wrong_state_m + 1)];
  out.depopulation = out.emission.depopulation;
  out.n_spont = out.emission.n_spont;
  return out;
}

std::vector<ScatteringPoint> run_cw_scattering(const CavitySystem& system, double rabi,
                                               const std::vector<double>& delta_L, double dwell,
                                               const RunOptions& options) {
  if (!(dwell > 0)) throw std::invalid_argument("dwell time must be positive");
  const auto D = static_cast<Eigen::Index>(system.dim());
  CMatrix rho = CMatrix::Zero(D, D);
  for (int m = -1; m <= 1; ++m) {
    const auto i = static_cast<Eigen::Index>(system.index(system.ground_index(m), PhotonSector::vacuum));
    rho(i, i) = 1.0 / 3.0;
  }
  const DensityMatrix rho0(rho);
  std::vector<ScatteringPoint> out;
  out.reserve(delta_L.size());
  for (double dL : delta_L) {
    Pulse pulse{PulseShape::constant, rabi, dwell, dL};
    const EmissionResult r = simulate(system, pulse, rho0, dwell, options);
    out.push_back(ScatteringPoint{dL, r.n_cav_plus, r.n_cav_minus, r.n_spont, r.hygiene});
  }
  return out;
}

CouplingSummary atom_cavity_coupling(const CavitySystem& system, int m_g, HalfInt F_x, HalfInt m_x) {
  const double A = system.coupling(system.ground_index(m_g), system.excited_index(F_x, m_x));
  CouplingSummary s;
  s.A = A;
  s.g = system.params.g_bar * std::abs(A);
  s.cooperativity = s.g * s.g / (2.0 * system.params.kappa * system.params.gamma);
  return s;
}

}  // namespace nlzcav
