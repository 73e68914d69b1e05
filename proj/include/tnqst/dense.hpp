#pragma once

#include "tnqst/types.hpp"

namespace tnqst {

/// Dense amplitude vector (length d^n) or dense operator (d^n x d^n).
///
/// Hermiticity is never assumed; operations that need it symmetrize or check
/// explicitly.
struct DenseState {
  enum class Form { Vector, Matrix };

  Form form = Form::Matrix;
  CMatrix values;

  static DenseState vector(CVector v);
  static DenseState matrix(CMatrix m);

  bool is_vector() const { return form == Form::Vector; }
  std::size_t dim() const { return static_cast<std::size_t>(values.rows()); }

  /// u u^dagger for vectors, the stored matrix otherwise.
  CMatrix as_operator() const;
};

double frobenius_norm(const DenseState& x);
double frobenius_norm(const CMatrix& x);

/// Nuclear norm. Hermitian input (to 1e-12 relative) uses absolute
/// eigenvalues, anything else singular values.
double trace_norm(const CMatrix& x);
double trace_norm(const DenseState& x);

bool is_hermitian(const CMatrix& x, double rel_tol = 1e-12);

/// Numerical rank from the singular values, relative cutoff `rel_tol`.
int matrix_rank(const CMatrix& x, double rel_tol = 1e-10);

}  // namespace tnqst
