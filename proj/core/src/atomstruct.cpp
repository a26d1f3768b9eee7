#include "nlzcav/atomstruct.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nlzcav/angular.hpp"

namespace nlzcav {

namespace {

double jj1(HalfInt j) { return j.value() * (j.value() + 1.0); }

// <F m|(g_J J_z + g_I I_z)|F' m> via the uncoupled |m_I m_J> expansion, I coupled first.
double zeeman_element(const FineLevel& level, HalfInt F1, HalfInt F2, HalfInt m, double g_J, double g_I) {
  double sum = 0.0;
  for (HalfInt m_J = -level.J; m_J <= level.J; m_J += 1) {
    const HalfInt m_I = m - m_J;
    if (abs(m_I) > level.I) continue;
    const double c1 = clebsch_gordan(level.I, m_I, level.J, m_J, F1, m);
    const double c2 = clebsch_gordan(level.I, m_I, level.J, m_J, F2, m);
    sum += c1 * c2 * (g_J * m_J.value() + g_I * m_I.value());
  }
  return sum;
}

std::vector<HalfInt> block_labels(const FineLevel& level, HalfInt m) {
  std::vector<HalfInt> out;
  for (HalfInt F : level.allowed_F()) {
    if (abs(m) <= F) out.push_back(F);
  }
  return out;
}

std::vector<HalfInt> block_projections(const FineLevel& level) {
  const auto Fs = level.allowed_F();
  const HalfInt F_max = Fs.back();
  std::vector<HalfInt> out;
  for (HalfInt m = -F_max; m <= F_max; m += 1) out.push_back(m);
  return out;
}

struct BlockMatrices {
  Eigen::MatrixXd hyperfine;  // diagonal
  Eigen::MatrixXd zeeman;     // per unit field, rad/s per tesla
};

BlockMatrices block_matrices(const FineLevel& level, HalfInt m, const PhysicalConstants& c) {
  const auto labels = block_labels(level, m);
  const auto n = static_cast<Eigen::Index>(labels.size());
  const double g_J = level.g_J(c);
  const double scale = c.mu_B / c.hbar();
  BlockMatrices out{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};
  for (Eigen::Index a = 0; a < n; ++a) {
    out.hyperfine(a, a) = hyperfine_energy(level, labels[static_cast<std::size_t>(a)]);
    for (Eigen::Index b = 0; b < n; ++b) {
      out.zeeman(a, b) = scale * zeeman_element(level, labels[static_cast<std::size_t>(a)],
                                                labels[static_cast<std::size_t>(b)], m, g_J, c.g_I);
    }
  }
  return out;
}

// Reorders the eigenpairs of H so that row i continues the state in row i of `rows`.
// Returns true when two eigenvalues coincide, i.e. the labelling relied on overlap order alone.
bool track_step(const Eigen::MatrixXd& H, Eigen::MatrixXd& rows, Eigen::VectorXd& energies) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H);
  const Eigen::VectorXd w = solver.eigenvalues();
  const Eigen::MatrixXd v = solver.eigenvectors();
  const Eigen::Index n = H.rows();

  bool degenerate = false;
  for (Eigen::Index k = 1; k < n; ++k) {
    const double scale = std::max(std::abs(w(k)), std::abs(w(k - 1)));
    if (std::abs(w(k) - w(k - 1)) <= 1e-12 * scale) degenerate = true;
  }

  const Eigen::MatrixXd overlap = (rows * v).cwiseAbs();
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) pairs.emplace_back(i, j);
  std::stable_sort(pairs.begin(), pairs.end(),
                   [&](auto a, auto b) { return overlap(a.first, a.second) > overlap(b.first, b.second); });

  std::vector<bool> row_done(static_cast<std::size_t>(n), false);
  std::vector<bool> col_done(static_cast<std::size_t>(n), false);
  Eigen::MatrixXd next(n, n);
  Eigen::VectorXd next_e(n);
  for (auto [i, j] : pairs) {
    if (row_done[static_cast<std::size_t>(i)] || col_done[static_cast<std::size_t>(j)]) continue;
    row_done[static_cast<std::size_t>(i)] = col_done[static_cast<std::size_t>(j)] = true;
    Eigen::VectorXd col = v.col(j);
    if (rows.row(i).dot(col) < 0) col = -col;
    next.row(i) = col.transpose();
    next_e(i) = w(j);
  }
  rows = next;
  energies = next_e;
  return degenerate;
}

// Advances every block of `sol` from its current field to B in steps no larger than max_step.
void advance(ZeemanSolution& sol, double B, const PhysicalConstants& c, double max_step_gauss) {
  const double from = sol.B;
  const double span_gauss = (B - from) / kTeslaPerGauss;
  const int steps = span_gauss > 0 ? std::max(1, static_cast<int>(std::ceil(span_gauss / max_step_gauss))) : 0;
  for (auto& block : sol.blocks) {
    if (steps == 0) break;
    const auto mats = block_matrices(sol.level, block.m_F, c);
    bool warned = false;
    for (int k = 1; k <= steps; ++k) {
      const double Bk = from + (B - from) * static_cast<double>(k) / steps;
      if (track_step(mats.hyperfine + Bk * mats.zeeman, block.mixing, block.energies) && !warned) {
        sol.warnings.push_back("near-degenerate eigenvalues in m_F=" + block.m_F.str() + " block at B=" +
                               std::to_string(Bk / kTeslaPerGauss) + " G; labels follow overlap order");
        warned = true;
      }
    }
  }
  sol.B = B;
}

ZeemanBlock start_block(const FineLevel& level, HalfInt m) {
  ZeemanBlock block;
  block.m_F = m;
  block.F_labels = block_labels(level, m);
  const auto n = static_cast<Eigen::Index>(block.F_labels.size());
  block.mixing = Eigen::MatrixXd::Identity(n, n);
  block.energies.resize(n);
  for (Eigen::Index a = 0; a < n; ++a) block.energies(a) = hyperfine_energy(level, block.F_labels[static_cast<std::size_t>(a)]);
  return block;
}

}  // namespace

std::vector<HalfInt> FineLevel::allowed_F() const {
  std::vector<HalfInt> out;
  for (HalfInt F = abs(I - J); F <= I + J; F += 1) out.push_back(F);
  return out;
}

double FineLevel::g_J(const PhysicalConstants& c) const {
  const double jj = jj1(J);
  const double ss = jj1(S);
  const double ll = jj1(L);
  return c.g_L * (jj - ss + ll) / (2 * jj) + c.g_S * (jj + ss - ll) / (2 * jj);
}

void FineLevel::validate() const {
  if (I.twice() < 0 || J.twice() < 0 || L.twice() < 0 || S.twice() < 0) {
    throw ConfigError(label + ": angular momenta must be non-negative");
  }
  if (!is_triangle(L, S, J)) throw ConfigError(label + ": J does not couple L and S");
  if (B_hfs != 0.0 && (J.twice() <= 1 || I.twice() <= 1)) {
    throw ConfigError(label + ": quadrupole constant requires I > 1/2 and J > 1/2");
  }
}

double TransitionLine::angular_frequency() const { return kTwoPi * 299792458.0 / wavelength; }

void TransitionLine::validate() const {
  if (!(reduced_dipole > 0)) throw ConfigError(name + ": reduced dipole must be positive");
  if (!(wavelength > 0)) throw ConfigError(name + ": wavelength must be positive");
  if (ground.I != excited.I) throw ConfigError(name + ": ground and excited nuclear spins differ");
}

std::vector<std::pair<HalfInt, HalfInt>> hyperfine_basis(const FineLevel& level) {
  std::vector<std::pair<HalfInt, HalfInt>> out;
  for (HalfInt F : level.allowed_F())
    for (HalfInt m = -F; m <= F; m += 1) out.emplace_back(F, m);
  return out;
}

double hyperfine_energy(const FineLevel& level, HalfInt F) {
  const double I = level.I.value();
  const double J = level.J.value();
  const double K = jj1(F) - jj1(level.I) - jj1(level.J);
  double energy = 0.5 * level.A_hfs * K;
  if (level.B_hfs != 0.0) {
    if (level.J.twice() <= 1 || level.I.twice() <= 1) {
      throw ConfigError(level.label + ": quadrupole term undefined for I or J = 1/2");
    }
    energy += level.B_hfs * (1.5 * K * (K + 1) - 2.0 * jj1(level.I) * jj1(level.J)) /
              (4.0 * I * (2 * I - 1) * J * (2 * J - 1));
  }
  return energy;
}

double lande_g_F(const FineLevel& level, HalfInt F, const PhysicalConstants& c) {
  const double ff = jj1(F);
  if (ff == 0.0) return 0.0;
  const double ii = jj1(level.I);
  const double jj = jj1(level.J);
  return level.g_J(c) * (ff - ii + jj) / (2 * ff) + c.g_I * (ff + ii - jj) / (2 * ff);
}

Eigen::MatrixXcd build_hyperfine_hamiltonian(const FineLevel& level) {
  level.validate();
  const auto basis = hyperfine_basis(level);
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) H(a, a) = hyperfine_energy(level, basis[static_cast<std::size_t>(a)].first);
  return H;
}

Eigen::MatrixXcd build_zeeman_hamiltonian(const FineLevel& level, double B, const PhysicalConstants& c) {
  const auto basis = hyperfine_basis(level);
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n, n);
  if (B == 0.0) return H;
  const double g_J = level.g_J(c);
  const double scale = B * c.mu_B / c.hbar();
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      const auto [F1, m1] = basis[static_cast<std::size_t>(a)];
      const auto [F2, m2] = basis[static_cast<std::size_t>(b)];
      if (m1 != m2) continue;
      H(a, b) = scale * zeeman_element(level, F1, F2, m1, g_J, c.g_I);
    }
  }
  return H;
}

std::size_t ZeemanBlock::row_of(HalfInt F) const {
  auto it = std::find(F_labels.begin(), F_labels.end(), F);
  if (it == F_labels.end()) {
    throw LookupError("no dressed state |" + F.str() + ", " + m_F.str() + ">~ in this block");
  }
  return static_cast<std::size_t>(it - F_labels.begin());
}

const ZeemanBlock& ZeemanSolution::block(HalfInt m_F) const {
  for (const auto& b : blocks)
    if (b.m_F == m_F) return b;
  throw LookupError(level.label + ": no m_F=" + m_F.str() + " block");
}

double ZeemanSolution::energy(HalfInt F, HalfInt m_F) const {
  const auto& b = block(m_F);
  return b.energies(static_cast<Eigen::Index>(b.row_of(F)));
}

double ZeemanSolution::mixing(HalfInt F, HalfInt F_prime, HalfInt m_F) const {
  const auto& b = block(m_F);
  return b.mixing(static_cast<Eigen::Index>(b.row_of(F)), static_cast<Eigen::Index>(b.row_of(F_prime)));
}

ZeemanSolution diagonalize_level(const FineLevel& level, double B, const PhysicalConstants& c,
                                 const DiagonalizeOptions& options) {
  return diagonalize_along(level, {B}, c, options).front();
}

std::vector<ZeemanSolution> diagonalize_along(const FineLevel& level, const std::vector<double>& fields,
                                              const PhysicalConstants& c, const DiagonalizeOptions& options) {
  level.validate();
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (fields[k] < 0) throw std::domain_error("field magnitude must be non-negative");
    if (k > 0 && fields[k] < fields[k - 1]) throw std::invalid_argument("field grid must be non-decreasing");
  }
  ZeemanSolution current;
  current.level = level;
  current.B = 0.0;
  for (HalfInt m : block_projections(level)) current.blocks.push_back(start_block(level, m));

  std::vector<ZeemanSolution> out;
  out.reserve(fields.size());
  for (double B : fields) {
    advance(current, B, c, options.max_step_gauss);
    out.push_back(current);
  }
  return out;
}

double linear_zeeman_shift(const FineLevel& level, HalfInt F, HalfInt m_F, double B, const PhysicalConstants& c) {
  return m_F.value() * lande_g_F(level, F, c) * c.mu_B * B / c.hbar();
}

double zeeman_field_from_splitting(double delta_Z, const FineLevel& level, HalfInt F, HalfInt m_F,
                                   const PhysicalConstants& c) {
  if (m_F.twice() == 0) throw std::domain_error("m_F = 0 has no linear Zeeman shift");
  const double g_F = lande_g_F(level, F, c);
  if (g_F == 0.0) throw std::domain_error("level has vanishing g_F");
  return std::abs(delta_Z * c.hbar() / (m_F.value() * g_F * c.mu_B));
}

double mixed_coupling(HalfInt F_g, HalfInt m_g, HalfInt F_x, HalfInt m_x, int q, const TransitionLine& line,
                      const ZeemanSolution& excited_solution, const ZeemanSolution* ground_solution) {
  if (q < -1 || q > 1) throw AngularDomainError("dipole component q must be -1, 0 or +1");
  const auto& xb = excited_solution.block(m_x);
  const auto row = static_cast<Eigen::Index>(xb.row_of(F_x));
  if (m_g != m_x + HalfInt(q)) return 0.0;

  const auto& gl = line.ground;
  const auto& xl = line.excited;
  auto excited_sum = [&](HalfInt Fg_prime) {
    double s = 0.0;
    for (std::size_t k = 0; k < xb.F_labels.size(); ++k) {
      const double ck = xb.mixing(row, static_cast<Eigen::Index>(k));
      if (ck == 0.0) continue;
      s += ck * coupling_zero_field(Fg_prime, m_g, xb.F_labels[k], m_x, q, gl.I, gl.J, xl.J);
    }
    return s;
  };

  if (ground_solution == nullptr) {
    if (abs(m_g) > F_g) throw LookupError("ground sublevel |" + F_g.str() + ", " + m_g.str() + "> does not exist");
    return excited_sum(F_g);
  }
  const auto& gb = ground_solution->block(m_g);
  const auto grow = static_cast<Eigen::Index>(gb.row_of(F_g));
  double total = 0.0;
  for (std::size_t k = 0; k < gb.F_labels.size(); ++k) {
    const double ck = gb.mixing(grow, static_cast<Eigen::Index>(k));
    if (ck == 0.0) continue;
    total += ck * excited_sum(gb.F_labels[k]);
  }
  return total;
}

}  // namespace nlzcav
