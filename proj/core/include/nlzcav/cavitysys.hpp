#pragma once

#include <string>
#include <vector>

#include "nlzcav/atomstruct.hpp"
#include "nlzcav/half_int.hpp"
#include "nlzcav/mesolve.hpp"

namespace nlzcav {

enum class PulseShape { sin_squared, constant };

struct Pulse {
  PulseShape shape = PulseShape::sin_squared;
  double peak_rabi = 0.0;       // rad/s
  double duration = 0.0;        // s
  double laser_detuning = 0.0;  // rad/s

  /// Omega(t) / Omega_0: sin^2(pi t / L) or 1 inside [0, L], 0 outside.
  double envelope(double t) const;
  double rabi(double t) const { return peak_rabi * envelope(t); }
  void validate() const;
};

struct CavityParams {
  double g_bar = 0.0;                // rad/s, effective coupling entering the Hamiltonian
  double kappa = 0.0;                // rad/s, field decay; FWHM = 2 kappa
  double gamma = 0.0;                // rad/s, atomic amplitude decay
  double coupling_reduction = 1.0;   // g_bar / g_bar_0
  double delta_C = 0.0;              // rad/s

  double g_bar_0() const { return g_bar / coupling_reduction; }
  void validate() const;
};

enum class AtomicKind { ground, excited, sink };

struct AtomicState {
  AtomicKind kind = AtomicKind::ground;
  HalfInt F;
  HalfInt m;
  double energy = 0.0;  // rad/s, relative to the zero-field lowest excited level
  std::string label() const;
};

/// Photon sector of a basis state: vacuum, one sigma+ photon or one sigma- photon.
enum class PhotonSector { vacuum = 0, plus = 1, minus = 2 };

struct BasisState {
  std::size_t atomic = 0;
  int n_plus = 0;
  int n_minus = 0;
};

struct CouplingEntry {
  std::size_t ground = 0;
  std::size_t excited = 0;
  int q = 0;
  double A = 0.0;
};

struct DecayEntry {
  std::size_t excited = 0;
  std::size_t target = 0;  // ground sublevel or the dark sink
  double rate = 0.0;       // gamma_ij, population decay rate (rad/s)
};

struct SystemOptions {
  /// false: zero-field couplings everywhere and linear Zeeman energies.
  bool nlz = true;
  /// Expand the ground state over its own mixed components as well.
  bool ground_mixing = false;
};

class CavitySystem {
 public:
  TransitionLine line;
  CavityParams params;
  SystemOptions options;
  double B = 0.0;        // tesla
  double delta_Z = 0.0;  // rad/s, linear shift of |F_g=1, m=+-1>

  std::vector<AtomicState> atomic;
  std::vector<BasisState> basis;
  std::vector<CouplingEntry> couplings;
  std::vector<DecayEntry> decays;
  std::size_t dark_sink = 0;

  std::size_t atomic_dim() const { return atomic.size(); }
  std::size_t dim() const { return atomic.size() * 3; }
  std::size_t index(std::size_t atomic_index, PhotonSector p) const { return atomic_index * 3 + static_cast<std::size_t>(p); }
  std::size_t ground_index(int m) const;
  std::size_t excited_index(HalfInt F, HalfInt m) const;
  /// Coupling prefactor A between two atomic states (0 if not dipole-connected).
  double coupling(std::size_t ground, std::size_t excited) const;
  /// Total decay rate out of an excited state, summed over targets.
  double total_decay(std::size_t excited) const;
  std::vector<HalfInt> excited_manifolds() const;
};

/// Basis, energies, coupling and decay tables at field B.
CavitySystem build_system(const TransitionLine& line, const CavityParams& params, double B,
                          const PhysicalConstants& constants, const SystemOptions& options = {});

/// Laser and cavity coupling terms only (static part: cavity, modulated part: laser at unit envelope).
Hamiltonian build_interaction(const CavitySystem& system, const Pulse& pulse);

/// Diagonal energies plus build_interaction.
Hamiltonian build_hamiltonian(const CavitySystem& system, const Pulse& pulse);

std::vector<CollapseChannel> build_collapse_channels(const CavitySystem& system);

/// Excited-state population plus intracavity photon number.
CMatrix excitation_number(const CavitySystem& system);

/// Copy of pulse with the laser detuning set to the Raman resonance Delta_C + 2 m Delta_Z
/// for a transfer starting in |F_g=1, m>.
Pulse raman_resonant_pulse(const CavitySystem& system, const Pulse& pulse, int initial_m);

struct Hygiene {
  double max_trace_error = 0.0;
  double min_eigenvalue = 0.0;
  double max_purity = 0.0;
  double max_hermiticity_error = 0.0;
  /// |N(T) - N(0) + emitted - injected|.
  double accounting_error = 0.0;
  bool ok(double trace_tol = 1e-8, double eig_tol = 1e-8, double purity_tol = 1e-10,
          double accounting_tol = 1e-4) const;
};

struct EmissionResult {
  double n_cav_plus = 0.0;
  double n_cav_minus = 0.0;
  double n_spont = 0.0;
  double eta = 0.0;
  double F_P = 0.0;
  /// Final populations of |F_g=1, m=-1,0,+1> followed by the dark sink.
  std::vector<double> final_populations;
  /// Fraction of spontaneous emission ending in |F_g=1, m=-1,0,+1> and the sink.
  std::vector<double> decay_branching;
  double depopulation = 0.0;
  double stored_excitation = 0.0;
  double injected_excitation = 0.0;
  Hygiene hygiene;
};

struct RunOptions {
  EvolveOptions evolve;
  double report_step = 1e-9;  // s
};

/// Photon production starting from |F_g=1, initial_m> with an empty cavity. The
/// pulse is used as given; see raman_resonant_pulse.
EmissionResult run_photon_production(const CavitySystem& system, const Pulse& pulse, int initial_m,
                                     const RunOptions& options = {});

struct DepopulationResult {
  double depopulation = 0.0;
  double n_spont = 0.0;
  EmissionResult emission;
};

/// Evolution of an atom left in the stretched state not addressed by the pulse's Raman resonance.
DepopulationResult run_depopulation(const CavitySystem& system, const Pulse& pulse, int wrong_state_m,
                                    const RunOptions& options = {});

struct ScatteringPoint {
  double delta_L = 0.0;  // rad/s
  double n_plus = 0.0;
  double n_minus = 0.0;
  double n_spont = 0.0;
  Hygiene hygiene;
};

/// Constant drive of Rabi frequency rabi for dwell seconds at each laser detuning,
/// starting from an equal mixture of the |F_g=1> sublevels.
std::vector<ScatteringPoint> run_cw_scattering(const CavitySystem& system, double rabi,
                                               const std::vector<double>& delta_L, double dwell = 2e-6,
                                               const RunOptions& options = {});

struct CouplingSummary {
  double A = 0.0;
  double g = 0.0;            // rad/s
  double cooperativity = 0.0;
};

/// g = g_bar |A| for one transition and C = g^2 / (2 kappa gamma).
CouplingSummary atom_cavity_coupling(const CavitySystem& system, int m_g, HalfInt F_x, HalfInt m_x);

struct CavityGeometry {
  double length = 0.0;                   // m
  double transmission_1 = 0.0;           // ppm
  double transmission_2 = 0.0;           // ppm
  double loss_1 = 0.0;                   // ppm, scattering and absorption per mirror
  double loss_2 = 0.0;                   // ppm
  double wavelength = 0.0;               // m
  double mirror_radius = 0.0;            // m, both mirrors
  double dipole = 0.0;                   // C m
};

struct CavityRates {
  double finesse = 0.0;
  double fsr = 0.0;         // rad/s
  double kappa = 0.0;       // rad/s
  double fwhm = 0.0;        // rad/s (= 2 kappa)
  double waist = 0.0;       // m
  double mode_volume = 0.0; // m^3
  double g0 = 0.0;          // rad/s, single-atom coupling at an antinode
};

/// Finesse, linewidth and maximal coupling of a symmetric two-mirror Fabry-Perot cavity.
CavityRates cavity_params_from_geometry(const CavityGeometry& geometry);

}  // namespace nlzcav
