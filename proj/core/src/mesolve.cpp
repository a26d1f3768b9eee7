#include "nlzcav/mesolve.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <boost/numeric/odeint.hpp>

namespace nlzcav {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::vector<double>;

struct Entry {
  Eigen::Index row;
  Eigen::Index col;
  Complex value;
};

std::vector<Entry> nonzeros(const CMatrix& m) {
  std::vector<Entry> out;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != Complex(0.0, 0.0)) out.push_back({i, j, m(i, j)});
  return out;
}

double relative_antihermitian(const CMatrix& m) {
  const double scale = std::max(1.0, m.norm());
  return (m - m.adjoint()).norm() / scale;
}

void require_hermitian(const CMatrix& m, double tol, const char* what) {
  if (m.rows() != m.cols()) throw std::invalid_argument(std::string(what) + " is not square");
  if (relative_antihermitian(m) > tol) throw std::invalid_argument(std::string(what) + " is not Hermitian");
}

// Everything the right-hand side needs, shared by the copies odeint makes of the system functor.
struct Model {
  Eigen::Index dim = 0;
  std::size_t n_channels = 0;
  bool track_injection = false;

  const Hamiltonian* H = nullptr;
  CMatrix decay;          // sum_n C^dag C / 2
  CMatrix static_eff;     // H_static - i decay (split form only)
  CMatrix inject_static;  // i[H_static, N]
  CMatrix inject_mod;     // i[H_mod, N]
  CMatrix N;
  std::vector<std::vector<Entry>> jumps;
  std::vector<std::vector<Entry>> rate_ops;  // C^dag C per channel

  CMatrix work;
  CMatrix heff;

  std::size_t rho_size() const { return static_cast<std::size_t>(2 * dim * dim); }

  void rhs(const State& y, State& dy, double t) {
    Eigen::Map<const CMatrix> rho(reinterpret_cast<const Complex*>(y.data()), dim, dim);
    Eigen::Map<CMatrix> drho(reinterpret_cast<Complex*>(dy.data()), dim, dim);

    const double env = H->is_split() ? H->envelope(t) : 0.0;
    if (H->is_split()) {
      heff = static_eff;
      if (env != 0.0) heff.noalias() += env * H->modulated_part();
    } else {
      heff = H->at(t) - Complex(0.0, 1.0) * decay;
    }
    work.noalias() = heff * rho;
    // -i H_eff rho + i rho H_eff^dag, the second term being the adjoint of the first.
    drho = Complex(0.0, -1.0) * work;
    drho += drho.adjoint().eval();

    for (const auto& entries : jumps) {
      for (const auto& a : entries)
        for (const auto& b : entries) drho(a.row, b.row) += a.value * std::conj(b.value) * rho(a.col, b.col);
    }

    std::size_t offset = rho_size();
    for (const auto& entries : rate_ops) {
      double flux = 0.0;
      for (const auto& e : entries) flux += (e.value * rho(e.col, e.row)).real();
      dy[offset++] = flux;
    }
    if (track_injection) {
      Complex inj;
      if (H->is_split()) {
        inj = (inject_static.cwiseProduct(rho.transpose())).sum();
        if (env != 0.0) inj += env * (inject_mod.cwiseProduct(rho.transpose())).sum();
      } else {
        const CMatrix Ht = H->at(t);
        const CMatrix K = Complex(0.0, 1.0) * (Ht * N - N * Ht);
        inj = (K.cwiseProduct(rho.transpose())).sum();
      }
      dy[offset] = inj.real();
    }
  }
};

struct System {
  std::shared_ptr<Model> model;
  void operator()(const State& y, State& dy, double t) const { model->rhs(y, dy, t); }
};

}  // namespace

DensityMatrix DensityMatrix::pure(Eigen::Index dim, Eigen::Index index) {
  if (index < 0 || index >= dim) throw std::out_of_range("pure state index outside the basis");
  CMatrix m = CMatrix::Zero(dim, dim);
  m(index, index) = 1.0;
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::from_state(const Eigen::VectorXcd& psi) {
  const Eigen::VectorXcd n = psi / psi.norm();
  return DensityMatrix(n * n.adjoint());
}

double DensityMatrix::purity() const { return (rho * rho).trace().real(); }

double DensityMatrix::min_eigenvalue() const {
  const CMatrix h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double DensityMatrix::hermiticity_error() const { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }

void DensityMatrix::check(double trace_tol, double eig_tol, double herm_tol) const {
  if (rho.rows() == 0 || rho.rows() != rho.cols()) throw std::invalid_argument("density matrix must be square and non-empty");
  if (hermiticity_error() > herm_tol) throw std::invalid_argument("density matrix is not Hermitian");
  if (std::abs(trace() - 1.0) > trace_tol) throw std::invalid_argument("density matrix trace differs from 1");
  if (min_eigenvalue() < -eig_tol) throw std::invalid_argument("density matrix has a negative eigenvalue");
}

std::string to_string(EmissionKind kind) {
  switch (kind) {
    case EmissionKind::cavity_plus:
      return "cavity_plus";
    case EmissionKind::cavity_minus:
      return "cavity_minus";
    case EmissionKind::spontaneous:
      return "spontaneous";
  }
  return "unknown";
}

Hamiltonian::Hamiltonian(CMatrix static_part, CMatrix modulated_part, std::function<double(double)> envelope)
    : dim_(static_part.rows()),
      static_(std::move(static_part)),
      modulated_(std::move(modulated_part)),
      envelope_(std::move(envelope)) {
  if (modulated_.size() == 0) modulated_ = CMatrix::Zero(dim_, dim_);
  if (modulated_.rows() != dim_ || modulated_.cols() != dim_) {
    throw std::invalid_argument("static and modulated Hamiltonian parts differ in dimension");
  }
  require_hermitian(static_, 1e-9, "static Hamiltonian");
  require_hermitian(modulated_, 1e-9, "modulated Hamiltonian");
  if (!envelope_) envelope_ = [](double) { return 0.0; };
}

Hamiltonian::Hamiltonian(Eigen::Index dim, std::function<CMatrix(double)> full) : dim_(dim), full_(std::move(full)) {
  if (!full_) throw std::invalid_argument("empty Hamiltonian callback");
  const CMatrix h0 = full_(0.0);
  if (h0.rows() != dim_) throw std::invalid_argument("Hamiltonian callback returns the wrong dimension");
  require_hermitian(h0, 1e-9, "Hamiltonian");
}

Hamiltonian::Hamiltonian(CMatrix constant) : Hamiltonian(std::move(constant), CMatrix(), nullptr) {}

CMatrix Hamiltonian::at(double t) const {
  if (full_) return full_(t);
  const double env = envelope_(t);
  if (env == 0.0) return static_;
  return static_ + env * modulated_;
}

std::vector<double> uniform_grid(double t0, double t1, double dt) {
  if (!(t1 > t0) || !(dt > 0)) throw std::invalid_argument("uniform_grid needs t1 > t0 and dt > 0");
  const auto n = static_cast<std::size_t>(std::ceil((t1 - t0) / dt - 1e-9));
  std::vector<double> out(n + 1);
  for (std::size_t k = 0; k <= n; ++k) out[k] = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(n);
  return out;
}

double expectation(const DensityMatrix& rho, const CMatrix& observable) {
  if (observable.rows() != rho.dim() || observable.cols() != rho.dim()) {
    throw std::invalid_argument("observable and density matrix dimensions differ");
  }
  const Complex value = (observable * rho.rho).trace();
  const double scale = std::max(1.0, std::abs(value));
  if (std::abs(value.imag()) > 1e-10 * scale) throw std::domain_error("expectation value has an imaginary part");
  return value.real();
}

double integrate_channel_flux(const Trajectory& traj, EmissionKind selector) {
  if (traj.times.empty()) throw std::invalid_argument("empty trajectory");
  double total = 0.0;
  for (std::size_t c = 0; c < traj.channel_kinds.size(); ++c) {
    if (traj.channel_kinds[c] == selector) total += traj.cumulative_flux[c].back();
  }
  return total;
}

Trajectory evolve(const Hamiltonian& H, const std::vector<CollapseChannel>& channels, const DensityMatrix& rho0,
                  const std::vector<double>& t_grid, const EvolveOptions& options) {
  const Eigen::Index D = H.dim();
  if (rho0.dim() != D) throw std::invalid_argument("initial state and Hamiltonian dimensions differ");
  rho0.check();
  if (t_grid.empty()) throw std::invalid_argument("empty time grid");
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    if (!(t_grid[k] > t_grid[k - 1])) throw std::invalid_argument("time grid must be strictly increasing");
  }

  auto model = std::make_shared<Model>();
  model->dim = D;
  model->H = &H;
  model->n_channels = channels.size();
  model->decay = CMatrix::Zero(D, D);
  for (const auto& ch : channels) {
    if (ch.op.rows() != D || ch.op.cols() != D) throw std::invalid_argument("collapse operator '" + ch.tag + "' has the wrong dimension");
    const CMatrix cdc = ch.op.adjoint() * ch.op;
    model->decay += 0.5 * cdc;
    model->jumps.push_back(nonzeros(ch.op));
    model->rate_ops.push_back(nonzeros(cdc));
  }
  if (H.is_split()) {
    require_hermitian(H.static_part(), options.hermiticity_tol, "static Hamiltonian");
    model->static_eff = H.static_part() - Complex(0.0, 1.0) * model->decay;
  }
  if (options.excitation_number) {
    const CMatrix& N = *options.excitation_number;
    if (N.rows() != D || N.cols() != D) throw std::invalid_argument("excitation observable has the wrong dimension");
    model->track_injection = true;
    model->N = N;
    if (H.is_split()) {
      model->inject_static = Complex(0.0, 1.0) * (H.static_part() * N - N * H.static_part());
      model->inject_mod = Complex(0.0, 1.0) * (H.modulated_part() * N - N * H.modulated_part());
    }
  }
  model->work.resize(D, D);
  model->heff.resize(D, D);

  const std::size_t n_rho = model->rho_size();
  State y(n_rho + channels.size() + (model->track_injection ? 1 : 0), 0.0);
  Eigen::Map<CMatrix>(reinterpret_cast<Complex*>(y.data()), D, D) = rho0.rho;

  Trajectory traj;
  for (const auto& ch : channels) {
    traj.channel_tags.push_back(ch.tag);
    traj.channel_kinds.push_back(ch.counts_as);
  }
  traj.channel_flux.assign(channels.size(), {});
  traj.cumulative_flux.assign(channels.size(), {});
  traj.min_eigenvalue = 1.0;

  double last_good = t_grid.front();
  auto observe = [&](const State& x, double t) {
    Eigen::Map<const CMatrix> rho(reinterpret_cast<const Complex*>(x.data()), D, D);
    if (!rho.allFinite()) throw NumericalError("non-finite density matrix", last_good);
    DensityMatrix state{CMatrix(rho)};
    traj.times.push_back(t);
    for (std::size_t c = 0; c < channels.size(); ++c) {
      double flux = 0.0;
      for (const auto& e : model->rate_ops[c]) flux += (e.value * rho(e.col, e.row)).real();
      traj.channel_flux[c].push_back(flux);
      traj.cumulative_flux[c].push_back(x[n_rho + c]);
    }
    if (model->track_injection) traj.injected_excitation.push_back(x[n_rho + channels.size()]);
    traj.max_trace_error = std::max(traj.max_trace_error, std::abs(state.trace() - 1.0));
    traj.min_eigenvalue = std::min(traj.min_eigenvalue, state.min_eigenvalue());
    traj.max_purity = std::max(traj.max_purity, state.purity());
    traj.max_hermiticity_error = std::max(traj.max_hermiticity_error, state.hermiticity_error());
    if (options.store_states) traj.states.push_back(state);
    traj.final_state = std::move(state);
    last_good = t;
  };

  if (t_grid.size() == 1) {
    observe(y, t_grid.front());
    return traj;
  }

  double max_step = options.max_step;
  if (max_step <= 0) {
    max_step = t_grid.back() - t_grid.front();
    for (std::size_t k = 1; k < t_grid.size(); ++k) max_step = std::min(max_step, t_grid[k] - t_grid[k - 1]);
  }
  auto stepper = odeint::make_dense_output(options.atol, options.rtol, max_step, odeint::runge_kutta_dopri5<State>());
  const double dt0 = std::min(max_step, 1e-3 * (t_grid.back() - t_grid.front()));
  try {
    odeint::integrate_times(stepper, System{model}, y, t_grid.begin(), t_grid.end(), dt0, observe);
  } catch (const NumericalError&) {
    throw;
  } catch (const std::exception& e) {
    throw NumericalError(std::string("integrator failure: ") + e.what(), last_good);
  }
  return traj;
}

}  // namespace nlzcav
