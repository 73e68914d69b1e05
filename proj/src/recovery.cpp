#include "tnqst/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "contraction_detail.hpp"
#include "tnqst/rng.hpp"

namespace tnqst {

// ---------------------------------------------------------------------------
// Hermitian coordinates

RVector hermitian_coords(const CMatrix& x) {
  const Eigen::Index n = x.rows();
  RVector c(n * n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) c(k++) = x(i, i).real();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      c(k++) = std::sqrt(2.0) * x(i, j).real();
      c(k++) = std::sqrt(2.0) * x(i, j).imag();
    }
  return c;
}

CMatrix hermitian_from_coords(const RVector& c, std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  if (c.size() != n * n) throw DimensionError("coordinate vector has wrong length");
  CMatrix x(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) x(i, i) = c(k++);
  const double inv = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const cplx v{c(k) * inv, c(k + 1) * inv};
      k += 2;
      x(i, j) = v;
      x(j, i) = std::conj(v);
    }
  return x;
}

// ---------------------------------------------------------------------------
// Gram operator

namespace {

// Coordinates of weight * v v^dagger without forming the matrix.
void rank_one_coords(const CVector& v, double weight, double* out) {
  const Eigen::Index n = v.size();
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) out[k++] = weight * std::norm(v(i));
  const double s = std::sqrt(2.0) * weight;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const cplx a = v(i) * std::conj(v(j));
      out[k++] = s * a.real();
      out[k++] = s * a.imag();
    }
}

}  // namespace

GramOperator::GramOperator(const MeasurementMap& map) : dim_(map.dim()) {
  const auto n2 = static_cast<Eigen::Index>(dim_ * dim_);
  gram_ = RMatrix::Zero(n2, n2);
  constexpr Eigen::Index kChunk = 2048;
  for (const auto& block : map.blocks()) {
    const Eigen::Index k = block.vectors.cols();
    for (Eigen::Index start = 0; start < k; start += kChunk) {
      const Eigen::Index len = std::min(kChunk, k - start);
      RMatrix alpha(n2, len);
      for (Eigen::Index c = 0; c < len; ++c)
        rank_one_coords(block.vectors.col(start + c), block.weight, alpha.col(c).data());
      gram_.selfadjointView<Eigen::Lower>().rankUpdate(alpha);
    }
  }
  gram_.triangularView<Eigen::StrictlyUpper>() = gram_.transpose();
}

RVector GramOperator::linear_term(const MeasurementMap& map, std::span<const double> p_hat) const {
  if (map.dim() != dim_) throw DimensionError("Gram operator of another map");
  return hermitian_coords(apply_adjoint(map, p_hat));
}

// ---------------------------------------------------------------------------
// Environments

std::vector<std::vector<cplx>> environment_adjoint(const TensorNetworkState& state,
                                                   const CMatrix& cotangent) {
  const LatticeShape& shape = state.shape();
  const std::size_t dim = shape.hilbert_dim();
  const bool peps = state.kind() == NetworkKind::Peps;
  if (peps ? (static_cast<std::size_t>(cotangent.size()) != dim)
           : (static_cast<std::size_t>(cotangent.rows()) != dim ||
              static_cast<std::size_t>(cotangent.cols()) != dim))
    throw DimensionError("cotangent does not match the contracted state");

  const auto order = detail::absorption_order(shape);
  const std::size_t d = shape.phys_dim();
  std::vector<std::size_t> weight(shape.num_sites());
  for (std::size_t s = 0, w = 1; s < weight.size(); ++s, w *= d) weight[s] = w;

  std::vector<std::vector<cplx>> grads(state.sites().size());
  auto views = detail::site_views(state);
  for (std::size_t s = 0; s < state.sites().size(); ++s) {
    const SiteTensor& site = state.sites()[s];
    const auto bond_size = static_cast<std::size_t>(site.bond_size());
    const auto phys = static_cast<std::size_t>(site.phys_size());
    // Open the site: an identity that exports its bond legs as a physical leg.
    std::vector<cplx> identity(bond_size * bond_size, cplx{0.0, 0.0});
    for (std::size_t b = 0; b < bond_size; ++b) identity[b * bond_size + b] = 1.0;
    auto open_views = views;
    open_views[s] = {identity.data(), static_cast<int>(bond_size), site.bonds()};
    const auto env = kernels::sweep_contract(shape.rows(), shape.cols(), open_views);
    const auto offsets =
        detail::dense_offsets(shape, state.kind(), static_cast<int>(s), bond_size);

    std::size_t stride = 1;
    for (auto it = order.rbegin(); it != order.rend() && *it != static_cast<int>(s); ++it)
      stride *= peps ? d : d * d;

    std::vector<cplx> g(phys * bond_size, cplx{0.0, 0.0});
    for (std::size_t idx = 0; idx < env.size(); ++idx) {
      const cplx e = std::conj(env[idx]);
      if (e == cplx{0.0, 0.0}) continue;
      const std::size_t b = (idx / stride) % bond_size;
      const std::size_t base = offsets[idx];
      for (std::size_t v = 0; v < phys; ++v) {
        cplx c;
        if (peps) {
          c = cotangent(static_cast<Eigen::Index>(base + v * weight[s]), 0);
        } else {
          const std::size_t y = base + (v / d) * weight[s] * dim + (v % d) * weight[s];
          c = cotangent(static_cast<Eigen::Index>(y / dim), static_cast<Eigen::Index>(y % dim));
        }
        g[v * bond_size + b] += e * c;
      }
    }
    grads[s] = std::move(g);
  }
  return grads;
}

// ---------------------------------------------------------------------------
// Objective

namespace {

bool prefer_gram(const MeasurementMap& map) {
  const std::size_t d2 = map.dim() * map.dim();
  return d2 <= 1024 && d2 < map.total_outcomes();
}

}  // namespace

Objective::Objective(const MeasurementMap& map, std::vector<double> p_hat, double trace_weight,
                     LossRoute route, std::shared_ptr<const GramOperator> gram)
    : map_(&map), p_hat_(std::move(p_hat)), trace_weight_(trace_weight) {
  if (p_hat_.size() != map.total_outcomes())
    throw DimensionError("p_hat has " + std::to_string(p_hat_.size()) + " entries, map has " +
                         std::to_string(map.total_outcomes()) + " outcomes");
  if (trace_weight < 0.0) throw RangeError("trace penalty weight must be >= 0");
  p_hat_norm2_ = std::inner_product(p_hat_.begin(), p_hat_.end(), p_hat_.begin(), 0.0);
  const bool use_gram =
      route == LossRoute::gram || (route == LossRoute::automatic && (gram || prefer_gram(map)));
  if (use_gram) {
    if (gram && gram->dim() != map.dim()) throw DimensionError("Gram operator of another map");
    gram_ = gram ? std::move(gram) : std::make_shared<const GramOperator>(map);
    gram_linear_ = gram_->linear_term(map, p_hat_);
  }
}

double Objective::data_term(const CMatrix& rho, CMatrix* residual_op) const {
  if (gram_) {
    const RVector x = hermitian_coords(rho);
    const RVector gx = gram_->matrix() * x;
    const double value = x.dot(gx) - 2.0 * gram_linear_.dot(x) + p_hat_norm2_;
    if (residual_op) *residual_op = hermitian_from_coords(gx - gram_linear_, map_->dim());
    return std::max(value, 0.0);
  }
  std::vector<double> r = apply_map(*map_, rho);
  double value = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    r[k] -= p_hat_[k];
    value += r[k] * r[k];
  }
  if (residual_op) *residual_op = apply_adjoint(*map_, r);
  return value;
}

double Objective::data_term_pure(const CVector& u, double norm2, CMatrix* residual_op) const {
  if (gram_) return data_term(u * u.adjoint() / norm2, residual_op);
  std::vector<double> r = apply_map(*map_, DenseState::vector(u));
  double value = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    r[k] = r[k] / norm2 - p_hat_[k];
    value += r[k] * r[k];
  }
  if (residual_op) *residual_op = apply_adjoint(*map_, r);
  return value;
}

double Objective::loss(const TensorNetworkState& state) const {
  const DenseState c = contract(state);
  if (state.kind() == NetworkKind::Peps) {
    const double norm2 = c.values.squaredNorm();
    if (!(norm2 > 0.0)) return std::numeric_limits<double>::infinity();
    return data_term_pure(c.values.col(0), norm2, nullptr);
  }
  const CMatrix sym = 0.5 * (c.values + c.values.adjoint());
  const double tr = sym.trace().real();
  return data_term(sym, nullptr) + trace_weight_ * (tr - 1.0) * (tr - 1.0);
}

double Objective::loss_and_gradient(const TensorNetworkState& state,
                                    std::vector<std::vector<cplx>>& gradient) const {
  const DenseState c = contract(state);
  CMatrix w;
  CMatrix cotangent;
  double value;
  if (state.kind() == NetworkKind::Peps) {
    const CVector u = c.values.col(0);
    const double norm2 = u.squaredNorm();
    if (!(norm2 > 0.0)) return std::numeric_limits<double>::infinity();
    value = data_term_pure(u, norm2, &w);
    // d/d conj(u) of g(u u^dagger / N): 2 (W u - (u^dagger W u / N) u) / N.
    const CVector wu = w * u;
    const double quad = u.dot(wu).real();
    cotangent = 2.0 * (wu - (quad / norm2) * u) / norm2;
  } else {
    const CMatrix sym = 0.5 * (c.values + c.values.adjoint());
    const double tr = sym.trace().real();
    value = data_term(sym, &w) + trace_weight_ * (tr - 1.0) * (tr - 1.0);
    cotangent = w;
    cotangent.diagonal().array() += trace_weight_ * (tr - 1.0);
  }
  gradient = environment_adjoint(state, cotangent);
  return value;
}

double loss(const TensorNetworkState& state, const MeasurementMap& map,
            std::span<const double> p_hat, double trace_weight) {
  return Objective(map, {p_hat.begin(), p_hat.end()}, trace_weight, LossRoute::direct).loss(state);
}

std::vector<std::vector<cplx>> gradient(const TensorNetworkState& state, const MeasurementMap& map,
                                        std::span<const double> p_hat, double trace_weight) {
  std::vector<std::vector<cplx>> g;
  Objective(map, {p_hat.begin(), p_hat.end()}, trace_weight, LossRoute::direct)
      .loss_and_gradient(state, g);
  return g;
}

// ---------------------------------------------------------------------------
// Optimizer

void RecoveryConfig::validate() const {
  if (!(shrink > 0.0 && shrink < 1.0)) throw RangeError("backtracking shrink must lie in (0, 1)");
  if (!(sufficient_decrease > 0.0 && sufficient_decrease < 1.0))
    throw RangeError("sufficient-decrease constant must lie in (0, 1)");
  if (max_iters < 0 || restarts < 1) throw RangeError("need max_iters >= 0 and restarts >= 1");
  if (!(initial_step > 0.0)) throw RangeError("initial step must be positive");
  if (patience < 1) throw RangeError("patience must be >= 1");
  if (bonds.lattice_rows() != shape.rows() || bonds.lattice_cols() != shape.cols())
    throw StructuralError("estimated bonds do not belong to the configured lattice");
}

namespace {

double squared_norm(const std::vector<std::vector<cplx>>& g) {
  double s = 0.0;
  for (const auto& site : g)
    for (const cplx& x : site) s += std::norm(x);
  return s;
}

void axpy(TensorNetworkState& x, cplx alpha, const std::vector<std::vector<cplx>>& dir) {
  for (std::size_t s = 0; s < dir.size(); ++s) {
    auto& data = x.sites()[s].data();
    for (std::size_t i = 0; i < data.size(); ++i) data[i] += alpha * dir[s][i];
  }
}

TensorNetworkState random_init(const RecoveryConfig& cfg, std::uint64_t seed) {
  TensorNetworkState x = TensorNetworkState::zeros(cfg.shape, cfg.bonds);
  auto rng = make_stream(seed, {});
  for (auto& site : x.sites()) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(site.bond_size()));
    for (auto& v : site.data()) v = scale * complex_normal(rng);
  }
  const double n = cfg.shape.num_sites();
  const DenseState c = contract(x);
  if (x.kind() == NetworkKind::Peps) {
    const double norm = c.values.norm();
    if (norm > 0.0)
      for (auto& site : x.sites())
        for (auto& v : site.data()) v *= std::pow(norm, -1.0 / n);
  } else {
    const cplx tr = c.values.trace();
    if (std::abs(tr) >= kDegenerateTrace) {
      const double per_site = std::pow(std::abs(tr), -1.0 / n);
      for (auto& site : x.sites())
        for (auto& v : site.data()) v *= per_site;
      for (auto& v : x.sites().front().data()) v *= std::conj(tr) / std::abs(tr);
    }
  }
  return x;
}

struct RestartResult {
  RestartTrace trace;
  std::optional<TensorNetworkState> state;
};

RestartResult run_restart(const RecoveryConfig& cfg, const Objective& obj, std::uint64_t seed) {
  RestartResult result;
  result.trace.seed = seed;
  TensorNetworkState x = random_init(cfg, seed);
  std::vector<std::vector<cplx>> g;
  double f = obj.loss_and_gradient(x, g);
  if (!std::isfinite(f)) {
    result.trace.diverged = true;
    result.trace.final_loss = f;
    return result;
  }
  result.trace.trajectory.push_back({f, 0.0});

  double next_step = 0.0;
  int quiet = 0;
  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    const double gnorm2 = squared_norm(g);
    if (!(gnorm2 > 0.0) || f <= 0.0) break;
    // First trial: the step at which the linear model reaches zero loss.
    double step = next_step > 0.0 ? next_step : cfg.initial_step * f / (2.0 * gnorm2);
    TensorNetworkState trial = x;
    double f_trial = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int bt = 0; bt < 100; ++bt) {
      trial = x;
      axpy(trial, -step, g);
      f_trial = obj.loss(trial);
      if (std::isfinite(f_trial) && f_trial <= f - cfg.sufficient_decrease * step * gnorm2) {
        accepted = true;
        break;
      }
      step *= cfg.shrink;
    }
    if (!accepted) break;

    std::vector<std::vector<cplx>> g_new;
    f_trial = obj.loss_and_gradient(trial, g_new);
    // Barzilai-Borwein proposal for the next trial step; the line search
    // above keeps every accepted step monotone.
    double sy = 0.0;
    double ss = 0.0;
    for (std::size_t s = 0; s < g.size(); ++s)
      for (std::size_t i = 0; i < g[s].size(); ++i) {
        const cplx ds = -step * g[s][i];
        const cplx dy = g_new[s][i] - g[s][i];
        sy += (std::conj(ds) * dy).real();
        ss += std::norm(ds);
      }
    next_step = sy > 0.0 ? ss / sy : 2.0 * step;

    const double rel = (f - f_trial) / std::max(f, std::numeric_limits<double>::min());
    x = std::move(trial);
    g = std::move(g_new);
    f = f_trial;
    result.trace.trajectory.push_back({f, step});
    quiet = rel < cfg.tolerance ? quiet + 1 : 0;
    if (quiet >= cfg.patience) {
      ++it;
      break;
    }
  }
  result.trace.iterations = it;
  result.trace.final_loss = f;
  result.trace.diverged = !std::isfinite(f);
  result.state = std::move(x);
  return result;
}

}  // namespace

RecoveryReport fit(const RecoveryConfig& config, const MeasurementMap& map,
                   std::span<const double> p_hat, const std::optional<DenseState>& ground_truth,
                   std::shared_ptr<const GramOperator> gram) {
  config.validate();
  if (map.dim() != config.shape.hilbert_dim())
    throw DimensionError("measurement map acts on dimension " + std::to_string(map.dim()) +
                         ", lattice has d^n = " + std::to_string(config.shape.hilbert_dim()));
  const bool pepo = config.kind() == NetworkKind::Pepo;
  double lambda = 0.0;
  if (pepo) {
    const double per_block = static_cast<double>(map.total_outcomes()) / map.num_blocks();
    lambda = config.trace_weight >= 0.0 ? config.trace_weight
                                        : 10.0 * per_block / static_cast<double>(map.dim());
  }
  const Objective obj(map, {p_hat.begin(), p_hat.end()}, lambda, config.route, std::move(gram));

  std::vector<RestartResult> runs(static_cast<std::size_t>(config.restarts));
  std::vector<std::string> errors(runs.size());
  const auto n_runs = static_cast<std::ptrdiff_t>(runs.size());
#pragma omp parallel for schedule(dynamic, 1) if (config.parallel_restarts)
  for (std::ptrdiff_t r = 0; r < n_runs; ++r) {
    try {
      runs[r] = run_restart(config, obj, derive_seed(config.init_seed, {static_cast<std::uint64_t>(r)}));
    } catch (const std::exception& e) {
      errors[r] = e.what();
      runs[r].trace.diverged = true;
      runs[r].trace.final_loss = std::numeric_limits<double>::quiet_NaN();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw Error("restart failed: " + e);

  RecoveryReport report;
  report.trace_weight = lambda;
  int best = -1;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    report.restarts.push_back(runs[r].trace);
    const double fl = runs[r].trace.final_loss;
    if (runs[r].state && std::isfinite(fl) && (best < 0 || fl < runs[best].trace.final_loss))
      best = static_cast<int>(r);
  }
  if (best < 0) throw OptimizationFailure("every restart diverged", report.restarts);

  report.best_restart = best;
  report.best_loss = runs[best].trace.final_loss;
  report.final_state = runs[best].state;
  const DenseState c = contract(*report.final_state);
  CMatrix estimate;
  if (pepo) {
    estimate = 0.5 * (c.values + c.values.adjoint());
  } else {
    const CVector u = c.values.col(0) / c.values.norm();
    estimate = u * u.adjoint();
  }
  if (config.project_output) estimate = project_physical(estimate);
  report.estimate = DenseState::matrix(std::move(estimate));

  if (ground_truth) {
    const auto m = error_metrics(report.estimate, *ground_truth);
    report.frob_error = m.frob;
    report.trace_error = m.trace_dist;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Physical projection and metrics

std::vector<double> project_simplex(std::span<const double> v) {
  if (v.empty()) return {};
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    cumulative += sorted[j];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - t > 0.0) theta = t;
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - theta, 0.0);
  return out;
}

CMatrix project_physical(const CMatrix& rho) {
  if (rho.rows() != rho.cols()) throw DimensionError("project_physical needs a square matrix");
  const CMatrix h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
  const Eigen::VectorXd& values = eig.eigenvalues();
  const auto projected = project_simplex(std::span<const double>(values.data(), values.size()));
  const Eigen::Map<const Eigen::VectorXd> lam(projected.data(), values.size());
  const CMatrix& vecs = eig.eigenvectors();
  CMatrix out = vecs * lam.cast<cplx>().asDiagonal() * vecs.adjoint();
  return 0.5 * (out + out.adjoint());
}

DenseState project_physical(const DenseState& rho) {
  return DenseState::matrix(project_physical(rho.as_operator()));
}

ErrorMetrics error_metrics(const DenseState& rho_hat, const DenseState& rho_star,
                           std::optional<int> rank_star) {
  const CMatrix a = rho_hat.as_operator();
  const CMatrix b = rho_star.as_operator();
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("error_metrics on states of different dimension");
  const CMatrix delta = a - b;
  ErrorMetrics m;
  m.frob = delta.norm();
  m.trace_dist = trace_norm(delta);
  if (rank_star)
    m.rank_bound_holds = m.trace_dist <= 2.0 * std::sqrt(static_cast<double>(*rank_star)) * m.frob + 1e-10;
  return m;
}

}  // namespace tnqst
