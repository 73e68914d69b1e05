#include "oracles.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "tnqst/verify.hpp"

namespace oracle {


std::size_t flatten0(const tnqst::LatticeShape& shape, std::span<const int> digits) {
  std::size_t index = 0, weight = 1;
  for (int s = 0; s < shape.num_sites(); ++s) {
    index += static_cast<std::size_t>(digits[s]) * weight;
    weight *= static_cast<std::size_t>(shape.phys_dim());
  }
  return index;
}

CMatrix naive_contract(const tnqst::TensorNetworkState& state) {
  const auto& shape = state.shape();
  const int q = shape.rows(), p = shape.cols(), d = shape.phys_dim(), n = shape.num_sites();
  const bool pepo = state.kind() == tnqst::NetworkKind::Pepo;
  const auto dim = static_cast<Eigen::Index>(shape.hilbert_dim());
  CMatrix out = CMatrix::Zero(dim, pepo ? dim : 1);

  // Internal bonds: horizontal h[a][b] between (a,b),(a,b+1); vertical v[a][b].
  std::vector<int> sizes;
  std::vector<int> h_id(q * p, -1), v_id(q * p, -1);
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < p; ++b) {
      if (b + 1 < p) {
        h_id[a * p + b] = static_cast<int>(sizes.size());
        sizes.push_back(state.bonds().horizontal(a, b));
      }
      if (a + 1 < q) {
        v_id[a * p + b] = static_cast<int>(sizes.size());
        sizes.push_back(state.bonds().vertical(a, b));
      }
    }
  std::size_t configs = 1;
  for (int s : sizes) configs *= static_cast<std::size_t>(s);

  const int phys = pepo ? d * d : d;
  std::size_t phys_configs = 1;
  for (int s = 0; s < n; ++s) phys_configs *= static_cast<std::size_t>(phys);

  std::vector<int> bond_val(sizes.size()), v(n), row_digits(n), col_digits(n);
  for (std::size_t pc = 0; pc < phys_configs; ++pc) {
    std::size_t rest = pc;
    for (int s = 0; s < n; ++s) {
      v[s] = static_cast<int>(rest % phys);
      rest /= phys;
      row_digits[s] = pepo ? v[s] / d : v[s];
      col_digits[s] = pepo ? v[s] % d : 0;
    }
    cplx total = 0.0;
    for (std::size_t bc = 0; bc < configs; ++bc) {
      std::size_t r = bc;
      for (std::size_t i = 0; i < sizes.size(); ++i) {
        bond_val[i] = static_cast<int>(r % sizes[i]);
        r /= sizes[i];
      }
      cplx prod = 1.0;
      for (int a = 0; a < q && prod != 0.0; ++a)
        for (int b = 0; b < p; ++b) {
          const int l = b > 0 ? bond_val[h_id[a * p + b - 1]] : 0;
          const int u = a > 0 ? bond_val[v_id[(a - 1) * p + b]] : 0;
          const int rr = b + 1 < p ? bond_val[h_id[a * p + b]] : 0;
          const int dn = a + 1 < q ? bond_val[v_id[a * p + b]] : 0;
          prod *= state.site(a, b).at(v[a * p + b], l, u, rr, dn);
        }
      total += prod;
    }
    const auto i = static_cast<Eigen::Index>(flatten0(shape, row_digits));
    const auto j = static_cast<Eigen::Index>(pepo ? flatten0(shape, col_digits) : 0);
    out(i, j) += total;
  }
  return out;
}

std::vector<CMatrix> effects(const tnqst::MeasurementMap& map) {
  std::vector<CMatrix> out;
  for (const auto& block : map.blocks())
    for (Eigen::Index k = 0; k < block.vectors.cols(); ++k) {
      const CVector v = block.vectors.col(k);
      out.push_back(block.weight * v * v.adjoint());
    }
  return out;
}

std::vector<double> probabilities(const tnqst::MeasurementMap& map, const CMatrix& rho) {
  std::vector<double> p;
  for (const auto& a : effects(map)) p.push_back((a * rho).trace().real());
  return p;
}

double dense_loss(const tnqst::TensorNetworkState& state, const tnqst::MeasurementMap& map,
                  std::span<const double> p_hat, double lambda) {
  const CMatrix c = naive_contract(state);
  CMatrix rho;
  double penalty = 0.0;
  if (state.kind() == tnqst::NetworkKind::Peps) {
    const CVector u = c.col(0);
    rho = u * u.adjoint() / u.squaredNorm();
  } else {
    rho = 0.5 * (c + c.adjoint());
    const double t = rho.trace().real() - 1.0;
    penalty = lambda * t * t;
  }
  const auto p = probabilities(map, rho);
  double sum = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) sum += (p[k] - p_hat[k]) * (p[k] - p_hat[k]);
  return sum + penalty;
}

cplx fd_wirtinger(const std::function<double(const tnqst::TensorNetworkState&)>& f,
                  const tnqst::TensorNetworkState& state, std::size_t site, std::size_t index,
                  double h) {
  auto shifted = [&](cplx delta) {
    tnqst::TensorNetworkState s = state;
    s.sites()[site].data()[index] += delta;
    return f(s);
  };
  const double dre = (shifted({h, 0.0}) - shifted({-h, 0.0})) / (2.0 * h);
  const double dim = (shifted({0.0, h}) - shifted({0.0, -h})) / (2.0 * h);
  return {0.5 * dre, 0.5 * dim};
}

std::vector<double> simplex_bisection(std::span<const double> v) {
  double lo = *std::min_element(v.begin(), v.end()) - 1.0;
  double hi = *std::max_element(v.begin(), v.end());
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    double s = 0.0;
    for (double x : v) s += std::max(x - mid, 0.0);
    (s > 1.0 ? lo : hi) = mid;
  }
  const double tau = 0.5 * (lo + hi);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - tau, 0.0);
  return out;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double third_moment_via_operator(const tnqst::DesignEnsemble& design, const CMatrix& x,
                                 const CMatrix& rho) {
  return third_moment_via_operator(tnqst::moment_operator(design, 3), design.size(), x, rho);
}

double third_moment_via_operator(const CMatrix& m3, std::size_t k, const CMatrix& x, const CMatrix& rho) {
  const double d = static_cast<double>(x.rows());
  const double kk = static_cast<double>(k);
  // tr(A B) = sum_ij A_ij B_ji.
  const cplx tr = (m3.array() * kron(kron(x, x), rho).transpose().array()).sum();
  return d * d * d / (kk * kk) * tr.real();
}

double trace_norm(const CMatrix& x) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(x.adjoint() * x);
  double s = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i)
    s += std::sqrt(std::max(eig.eigenvalues()(i), 0.0));
  return s;
}

}  // namespace oracle
