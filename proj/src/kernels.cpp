#include "tnqst/kernels.hpp"

#include <cmath>
#include <string>

#include "tnqst/errors.hpp"

namespace tnqst::kernels {

std::size_t Boundary::frontier_size() const {
  std::size_t f = 1;
  for (int x : frontier) f *= static_cast<std::size_t>(x);
  return f;
}

namespace {

struct AbsorbPlan {
  std::size_t n_pre = 1;
  std::size_t n_mid = 1;
  std::size_t left, up, right, down;
  std::size_t phys;
  std::size_t old_f, new_f;
};

AbsorbPlan plan_absorb(const Boundary& in, int r, const SiteView& site) {
  const int q = static_cast<int>(in.frontier.size()) - 1;
  if (r < 0 || r >= q) throw RangeError("absorb row outside the frontier");
  if (in.frontier[r] != site.bonds[0])
    throw StructuralError("left bond " + std::to_string(site.bonds[0]) +
                          " does not match the neighbour's right bond " +
                          std::to_string(in.frontier[r]));
  if (in.frontier[q] != site.bonds[1])
    throw StructuralError("up bond " + std::to_string(site.bonds[1]) +
                          " does not match the neighbour's down bond " +
                          std::to_string(in.frontier[q]));
  AbsorbPlan plan;
  for (int i = 0; i < r; ++i) plan.n_pre *= static_cast<std::size_t>(in.frontier[i]);
  for (int i = r + 1; i < q; ++i) plan.n_mid *= static_cast<std::size_t>(in.frontier[i]);
  plan.left = static_cast<std::size_t>(site.bonds[0]);
  plan.up = static_cast<std::size_t>(site.bonds[1]);
  plan.right = static_cast<std::size_t>(site.bonds[2]);
  plan.down = static_cast<std::size_t>(site.bonds[3]);
  plan.phys = static_cast<std::size_t>(site.phys);
  plan.old_f = plan.n_pre * plan.left * plan.n_mid * plan.up;
  plan.new_f = plan.n_pre * plan.right * plan.n_mid * plan.down;
  return plan;
}

Boundary make_output(const Boundary& in, int r, const AbsorbPlan& plan) {
  Boundary out;
  out.phys_size = in.phys_size * plan.phys;
  out.frontier = in.frontier;
  out.frontier[r] = static_cast<int>(plan.right);
  out.frontier.back() = static_cast<int>(plan.down);
  out.values.assign(out.phys_size * plan.new_f, cplx{0.0, 0.0});
  return out;
}

// Contribution of one boundary row (fixed physical prefix `ph`).
inline void absorb_row(const Boundary& in, Boundary& out, const SiteView& site,
                       const AbsorbPlan& pl, std::size_t ph) {
  const cplx* b = in.values.data() + ph * pl.old_f;
  const std::size_t site_block = pl.left * pl.up * pl.right * pl.down;
  for (std::size_t pre = 0; pre < pl.n_pre; ++pre) {
    for (std::size_t mid = 0; mid < pl.n_mid; ++mid) {
      for (std::size_t v = 0; v < pl.phys; ++v) {
        const cplx* t = site.data + v * site_block;
        cplx* o = out.values.data() + (ph * pl.phys + v) * pl.new_f;
        for (std::size_t rt = 0; rt < pl.right; ++rt) {
          for (std::size_t dn = 0; dn < pl.down; ++dn) {
            cplx acc{0.0, 0.0};
            for (std::size_t l = 0; l < pl.left; ++l) {
              for (std::size_t u = 0; u < pl.up; ++u) {
                acc += b[((pre * pl.left + l) * pl.n_mid + mid) * pl.up + u] *
                       t[((l * pl.up + u) * pl.right + rt) * pl.down + dn];
              }
            }
            o[((pre * pl.right + rt) * pl.n_mid + mid) * pl.down + dn] = acc;
          }
        }
      }
    }
  }
}

void check_probs_args(const CMatrix& vectors, const CMatrix& rho, std::span<double> out) {
  if (rho.rows() != vectors.rows() || rho.cols() != vectors.rows())
    throw DimensionError("operator dimension does not match the POVM");
  if (out.size() != static_cast<std::size_t>(vectors.cols()))
    throw DimensionError("output length does not match the outcome count");
}

}  // namespace

namespace reference {

Boundary absorb_site(const Boundary& in, int r, const SiteView& site) {
  const AbsorbPlan plan = plan_absorb(in, r, site);
  Boundary out = make_output(in, r, plan);
  for (std::size_t ph = 0; ph < in.phys_size; ++ph) absorb_row(in, out, site, plan, ph);
  return out;
}

void probs_mixed(const CMatrix& vectors, double weight, const CMatrix& rho, std::span<double> out) {
  check_probs_args(vectors, rho, out);
  const Eigen::Index dim = vectors.rows();
  for (Eigen::Index k = 0; k < vectors.cols(); ++k) {
    cplx acc{0.0, 0.0};
    for (Eigen::Index i = 0; i < dim; ++i) {
      cplx row{0.0, 0.0};
      for (Eigen::Index j = 0; j < dim; ++j) row += rho(i, j) * vectors(j, k);
      acc += std::conj(vectors(i, k)) * row;
    }
    out[k] = weight * acc.real();
  }
}

void probs_pure(const CMatrix& vectors, double weight, const CVector& u, std::span<double> out) {
  if (u.size() != vectors.rows()) throw DimensionError("vector dimension does not match the POVM");
  if (out.size() != static_cast<std::size_t>(vectors.cols()))
    throw DimensionError("output length does not match the outcome count");
  for (Eigen::Index k = 0; k < vectors.cols(); ++k) {
    cplx amp{0.0, 0.0};
    for (Eigen::Index i = 0; i < u.size(); ++i) amp += std::conj(vectors(i, k)) * u(i);
    out[k] = weight * std::norm(amp);
  }
}

void adjoint_accumulate(const CMatrix& vectors, double weight, std::span<const double> r,
                        CMatrix& out) {
  if (r.size() != static_cast<std::size_t>(vectors.cols()))
    throw DimensionError("coefficient length does not match the outcome count");
  const Eigen::Index dim = vectors.rows();
  if (out.rows() != dim || out.cols() != dim) throw DimensionError("output is not D x D");
  for (Eigen::Index k = 0; k < vectors.cols(); ++k) {
    const double c = weight * r[k];
    for (Eigen::Index i = 0; i < dim; ++i)
      for (Eigen::Index j = 0; j < dim; ++j) out(i, j) += c * vectors(i, k) * std::conj(vectors(j, k));
  }
}

double frame_potential(const CMatrix& vectors, int s) {
  const Eigen::Index k = vectors.cols();
  double sum = 0.0;
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b)
      sum += std::pow(std::norm(vectors.col(a).dot(vectors.col(b))), s);
  return sum / (static_cast<double>(k) * static_cast<double>(k));
}

}  // namespace reference

namespace omp {

Boundary absorb_site(const Boundary& in, int r, const SiteView& site) {
  const AbsorbPlan plan = plan_absorb(in, r, site);
  Boundary out = make_output(in, r, plan);
  const auto rows = static_cast<std::ptrdiff_t>(in.phys_size);
#pragma omp parallel for schedule(static) if (rows * plan.old_f > 4096)
  for (std::ptrdiff_t ph = 0; ph < rows; ++ph)
    absorb_row(in, out, site, plan, static_cast<std::size_t>(ph));
  return out;
}

void probs_mixed(const CMatrix& vectors, double weight, const CMatrix& rho, std::span<double> out) {
  check_probs_args(vectors, rho, out);
  const Eigen::Index n = vectors.cols();
#pragma omp parallel for schedule(static)
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto v = vectors.col(k);
    out[k] = weight * v.dot(rho * v).real();
  }
}

void probs_pure(const CMatrix& vectors, double weight, const CVector& u, std::span<double> out) {
  if (u.size() != vectors.rows()) throw DimensionError("vector dimension does not match the POVM");
  if (out.size() != static_cast<std::size_t>(vectors.cols()))
    throw DimensionError("output length does not match the outcome count");
  const Eigen::Index n = vectors.cols();
#pragma omp parallel for schedule(static)
  for (Eigen::Index k = 0; k < n; ++k) out[k] = weight * std::norm(vectors.col(k).dot(u));
}

void adjoint_accumulate(const CMatrix& vectors, double weight, std::span<const double> r,
                        CMatrix& out) {
  if (r.size() != static_cast<std::size_t>(vectors.cols()))
    throw DimensionError("coefficient length does not match the outcome count");
  const Eigen::Index dim = vectors.rows();
  if (out.rows() != dim || out.cols() != dim) throw DimensionError("output is not D x D");
  // Column j of the result only depends on row j of conj(V); columns are
  // independent, so split them across threads.
  const Eigen::Index n = vectors.cols();
  Eigen::VectorXd coeff(n);
  for (Eigen::Index k = 0; k < n; ++k) coeff(k) = weight * r[k];
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < dim; ++j) {
    CVector w = (vectors.row(j).adjoint().array() * coeff.array()).matrix();
    out.col(j) += vectors * w;
  }
}

double frame_potential(const CMatrix& vectors, int s) {
  const Eigen::Index k = vectors.cols();
  double sum = 0.0;
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : sum)
  for (Eigen::Index a = 0; a < k; ++a) {
    const Eigen::VectorXd overlaps = (vectors.adjoint() * vectors.col(a)).cwiseAbs2();
    sum += overlaps.array().pow(s).sum();
  }
  return sum / (static_cast<double>(k) * static_cast<double>(k));
}

}  // namespace omp

std::vector<cplx> sweep_contract(int q, int p, std::span<const SiteView> sites, Exec exec) {
  if (sites.size() != static_cast<std::size_t>(q * p)) throw StructuralError("site count != q*p");
  Boundary boundary;
  boundary.values = {cplx{1.0, 0.0}};
  boundary.frontier.assign(static_cast<std::size_t>(q) + 1, 1);
  for (int c = 0; c < p; ++c) {
    if (c > 0 && boundary.frontier.back() != 1)
      throw StructuralError("bottom boundary bond must be 1");
    for (int r = 0; r < q; ++r) {
      const SiteView& site = sites[static_cast<std::size_t>(r * p + c)];
      boundary = exec == Exec::omp ? omp::absorb_site(boundary, r, site)
                                   : reference::absorb_site(boundary, r, site);
    }
  }
  if (boundary.frontier_size() != 1) throw StructuralError("right boundary bonds must be 1");
  return std::move(boundary.values);
}

}  // namespace tnqst::kernels
