#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nlzcav {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

/// Raised when the adaptive integrator cannot continue. last_good_time is the
/// latest time at which a state was accepted.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double last_good_time)
      : std::runtime_error(what), last_good_time(last_good_time) {}
  double last_good_time;
};

struct DensityMatrix {
  CMatrix rho;

  DensityMatrix() = default;
  explicit DensityMatrix(CMatrix m) : rho(std::move(m)) {}

  Eigen::Index dim() const { return rho.rows(); }
  static DensityMatrix pure(Eigen::Index dim, Eigen::Index index);
  static DensityMatrix from_state(const Eigen::VectorXcd& psi);

  double trace() const { return rho.trace().real(); }
  double purity() const;
  double min_eigenvalue() const;
  double hermiticity_error() const;
  /// Throws std::invalid_argument unless Hermitian, unit-trace and positive
  /// within the given tolerances.
  void check(double trace_tol = 1e-8, double eig_tol = 1e-8, double herm_tol = 1e-12) const;
};

enum class EmissionKind { cavity_plus, cavity_minus, spontaneous };

std::string to_string(EmissionKind kind);

struct CollapseChannel {
  CMatrix op;
  std::string tag;
  EmissionKind counts_as = EmissionKind::spontaneous;
};

/// H(t) = static_part + envelope(t) * modulated_part (rad/s). A custom
/// callback may replace the split form; it is then used as-is.
class Hamiltonian {
 public:
  Hamiltonian(CMatrix static_part, CMatrix modulated_part, std::function<double(double)> envelope);
  Hamiltonian(Eigen::Index dim, std::function<CMatrix(double)> full);
  explicit Hamiltonian(CMatrix constant);

  Eigen::Index dim() const { return dim_; }
  CMatrix at(double t) const;
  bool is_split() const { return !full_; }
  const CMatrix& static_part() const { return static_; }
  const CMatrix& modulated_part() const { return modulated_; }
  double envelope(double t) const { return envelope_ ? envelope_(t) : 0.0; }

 private:
  Eigen::Index dim_ = 0;
  CMatrix static_;
  CMatrix modulated_;
  std::function<double(double)> envelope_;
  std::function<CMatrix(double)> full_;
};

struct EvolveOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  /// Upper bound on the internal step; 0 selects the smallest spacing of the
  /// reporting grid so that a pulse switching on between reports is not skipped.
  double max_step = 0.0;
  /// Keep every reported density matrix (false keeps only the final state).
  bool store_states = true;
  /// Optional excitation-number observable N. When set, the integrator also
  /// accumulates the excitation injected by the coherent dynamics,
  /// the time integral of Tr(i[H, N] rho).
  std::optional<CMatrix> excitation_number;
  /// Tolerance used when checking the Hermiticity of H at construction.
  double hermiticity_tol = 1e-9;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  std::vector<std::string> channel_tags;
  std::vector<EmissionKind> channel_kinds;
  /// channel_flux[c][k] = Tr(C_c^dag C_c rho(times[k])).
  std::vector<std::vector<double>> channel_flux;
  /// cumulative_flux[c][k] = integral of channel_flux[c] from times[0] to times[k].
  std::vector<std::vector<double>> cumulative_flux;
  std::vector<double> injected_excitation;
  DensityMatrix final_state;

  double max_trace_error = 0.0;
  double min_eigenvalue = 0.0;
  double max_purity = 0.0;
  double max_hermiticity_error = 0.0;
};

/// Integrates the Lindblad equation d rho/dt = -i[H, rho] + sum_n (C rho C^dag - {C^dag C, rho}/2)
/// with an adaptive Dormand-Prince 5(4) stepper, reporting on t_grid.
Trajectory evolve(const Hamiltonian& H, const std::vector<CollapseChannel>& channels, const DensityMatrix& rho0,
                  const std::vector<double>& t_grid, const EvolveOptions& options = {});

double expectation(const DensityMatrix& rho, const CMatrix& observable);

/// Photon number emitted through all channels of one kind up to the last grid time.
double integrate_channel_flux(const Trajectory& traj, EmissionKind selector);

/// Uniform grid from t0 to t1 inclusive with spacing no larger than dt.
std::vector<double> uniform_grid(double t0, double t1, double dt);

}  // namespace nlzcav
