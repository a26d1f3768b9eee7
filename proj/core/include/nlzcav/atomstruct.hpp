#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nlzcav/half_int.hpp"

namespace nlzcav {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kTeslaPerGauss = 1e-4;

/// MHz (ordinary frequency, the "/2pi" convention) to angular frequency in rad/s.
constexpr double mhz_to_angular(double mhz) { return kTwoPi * 1e6 * mhz; }
constexpr double angular_to_mhz(double omega) { return omega / (kTwoPi * 1e6); }

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class LookupError : public std::out_of_range {
 public:
  explicit LookupError(const std::string& what) : std::out_of_range(what) {}
};

struct PhysicalConstants {
  double mu_B = 0.0;  // J/T
  double h = 0.0;     // J s
  double g_S = 0.0;
  double g_L = 0.0;
  double g_I = 0.0;

  double hbar() const { return h / kTwoPi; }
  void validate() const;
};

struct FineLevel {
  std::string label;
  HalfInt I;
  HalfInt J;
  HalfInt L;
  HalfInt S;
  double A_hfs = 0.0;  // rad/s
  double B_hfs = 0.0;  // rad/s

  /// Hyperfine quantum numbers |I-J| ... I+J.
  std::vector<HalfInt> allowed_F() const;
  double g_J(const PhysicalConstants& c) const;
  void validate() const;
};

struct TransitionLine {
  std::string name;
  FineLevel ground;
  FineLevel excited;
  double reduced_dipole = 0.0;  // C m
  double wavelength = 0.0;      // m

  double angular_frequency() const;
  void validate() const;
};

/// Constants, levels and lines for one isotope, loaded from a JSON data file.
struct AtomData {
  std::string source;
  PhysicalConstants constants;
  std::map<std::string, FineLevel> levels;
  std::map<std::string, TransitionLine> lines;

  const FineLevel& level(const std::string& label) const;
  const TransitionLine& line(const std::string& name) const;

  static AtomData load(const std::string& path);
  /// Loads the installed data file; NLZCAV_DATA (a file path) overrides the location.
  static AtomData load_default();
  static std::string default_path();
};

/// Ordered |F, m_F> basis of a level: F ascending, then m_F ascending.
std::vector<std::pair<HalfInt, HalfInt>> hyperfine_basis(const FineLevel& level);

/// Hyperfine energy of manifold F (rad/s), dipole plus quadrupole term.
double hyperfine_energy(const FineLevel& level, HalfInt F);

double lande_g_F(const FineLevel& level, HalfInt F, const PhysicalConstants& c);

Eigen::MatrixXcd build_hyperfine_hamiltonian(const FineLevel& level);

/// Zeeman Hamiltonian (rad/s) for a field B (tesla) along the quantisation axis,
/// expressed in the hyperfine_basis ordering.
Eigen::MatrixXcd build_zeeman_hamiltonian(const FineLevel& level, double B, const PhysicalConstants& c);

/// Eigen-decomposition of one m_F block. Row i of mixing is the field-dressed
/// state adiabatically connected to |F_labels[i], m_F>; column k is its
/// amplitude c_{F_i F'_k} on the zero-field state |F_labels[k], m_F>.
struct ZeemanBlock {
  HalfInt m_F;
  std::vector<HalfInt> F_labels;
  Eigen::VectorXd energies;  // rad/s, absolute
  Eigen::MatrixXd mixing;

  std::size_t row_of(HalfInt F) const;
};

struct ZeemanSolution {
  FineLevel level;
  double B = 0.0;  // tesla
  std::vector<ZeemanBlock> blocks;
  std::vector<std::string> warnings;

  const ZeemanBlock& block(HalfInt m_F) const;
  double energy(HalfInt F, HalfInt m_F) const;
  /// c_{F F'} for the dressed state labelled (F, m_F).
  double mixing(HalfInt F, HalfInt F_prime, HalfInt m_F) const;
};

struct DiagonalizeOptions {
  /// Largest field increment used when tracking labels from B = 0.
  double max_step_gauss = 0.1;
};

ZeemanSolution diagonalize_level(const FineLevel& level, double B, const PhysicalConstants& c,
                                 const DiagonalizeOptions& options = {});

/// Same as diagonalize_level on a non-decreasing field grid, tracking labels
/// continuously from one grid point to the next.
std::vector<ZeemanSolution> diagonalize_along(const FineLevel& level, const std::vector<double>& fields,
                                              const PhysicalConstants& c, const DiagonalizeOptions& options = {});

/// Field magnitude (tesla) giving the linear Zeeman shift delta_Z (rad/s) of |F, m_F>.
double zeeman_field_from_splitting(double delta_Z, const FineLevel& level, HalfInt F, HalfInt m_F,
                                   const PhysicalConstants& c);

/// Linear Zeeman shift (rad/s) of |F, m_F> at field B.
double linear_zeeman_shift(const FineLevel& level, HalfInt F, HalfInt m_F, double B, const PhysicalConstants& c);

/// Coupling prefactor between a ground sublevel and a field-dressed excited
/// sublevel, summed over the excited manifold. When ground_solution is given the
/// ground state is also expanded over its mixed components.
double mixed_coupling(HalfInt F_g, HalfInt m_g, HalfInt F_x, HalfInt m_x, int q, const TransitionLine& line,
                      const ZeemanSolution& excited_solution,
                      const ZeemanSolution* ground_solution = nullptr);

}  // namespace nlzcav
