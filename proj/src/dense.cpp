#include "tnqst/dense.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace tnqst {

DenseState DenseState::vector(CVector v) {
  DenseState s;
  s.form = Form::Vector;
  s.values = std::move(v);
  return s;
}

DenseState DenseState::matrix(CMatrix m) {
  DenseState s;
  s.form = Form::Matrix;
  s.values = std::move(m);
  return s;
}

CMatrix DenseState::as_operator() const {
  if (is_vector()) return values * values.adjoint();
  return values;
}

double frobenius_norm(const CMatrix& x) { return x.norm(); }
double frobenius_norm(const DenseState& x) { return x.values.norm(); }

bool is_hermitian(const CMatrix& x, double rel_tol) {
  if (x.rows() != x.cols()) return false;
  const double scale = std::max(x.norm(), 1.0);
  return (x - x.adjoint()).norm() <= rel_tol * scale;
}

double trace_norm(const CMatrix& x) {
  if (is_hermitian(x)) {
    const CMatrix h = 0.5 * (x + x.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(h, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().cwiseAbs().sum();
  }
  Eigen::JacobiSVD<CMatrix> svd(x);
  return svd.singularValues().sum();
}

double trace_norm(const DenseState& x) {
  if (x.is_vector()) return x.values.squaredNorm();
  return trace_norm(x.values);
}

int matrix_rank(const CMatrix& x, double rel_tol) {
  Eigen::JacobiSVD<CMatrix> svd(x);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * sv(0)) ++rank;
  return rank;
}

}  // namespace tnqst
