#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "tnqst/dense.hpp"
#include "tnqst/lattice.hpp"

namespace tnqst {

/// One core factor of a PEPS or PEPO.
///
/// Axis order is (i, [j], left, up, right, down); j exists only for PEPO.
/// Storage is row-major over that order, so the physical index is the slowest
/// axis. For PEPO the pair (i, j) is addressed as the combined index i*d + j.
class SiteTensor {
 public:
  SiteTensor(int a, int b, NetworkKind kind, int d, std::array<int, 4> bonds);
  SiteTensor(int a, int b, NetworkKind kind, int d, std::array<int, 4> bonds,
             std::vector<cplx> data);

  int row() const { return a_; }
  int col() const { return b_; }
  NetworkKind kind() const { return kind_; }
  int phys_dim() const { return d_; }
  /// Size of the (combined) physical index: d for PEPS, d^2 for PEPO.
  int phys_size() const { return kind_ == NetworkKind::Peps ? d_ : d_ * d_; }
  const std::array<int, 4>& bonds() const { return bonds_; }
  int bond_size() const { return bonds_[0] * bonds_[1] * bonds_[2] * bonds_[3]; }
  /// Per-axis sizes in storage order (5 axes for PEPS, 6 for PEPO).
  std::vector<int> dims() const;

  std::size_t size() const { return data_.size(); }
  std::vector<cplx>& data() { return data_; }
  const std::vector<cplx>& data() const { return data_; }

  /// Element at combined physical index `v` and bond indices (l, u, r, dn).
  cplx& at(int v, int l, int u, int r, int dn);
  cplx at(int v, int l, int u, int r, int dn) const;

  double frobenius_norm() const;
  std::optional<double> norm_cap() const { return norm_cap_; }
  void set_norm_cap(double cap) { norm_cap_ = cap; }

 private:
  int a_;
  int b_;
  NetworkKind kind_;
  int d_;
  std::array<int, 4> bonds_;
  std::vector<cplx> data_;
  std::optional<double> norm_cap_;
};

/// A q x p grid of site tensors. Construction validates that every site's
/// axis sizes agree with the bond matrix.
class TensorNetworkState {
 public:
  TensorNetworkState(LatticeShape shape, BondDims bonds, std::vector<SiteTensor> sites);

  /// All-zero tensors with the given bonds.
  static TensorNetworkState zeros(const LatticeShape& shape, const BondDims& bonds);

  const LatticeShape& shape() const { return shape_; }
  NetworkKind kind() const { return bonds_.kind(); }
  const BondDims& bonds() const { return bonds_; }

  const SiteTensor& site(int a, int b) const { return sites_[shape_.site_number(a, b)]; }
  SiteTensor& site(int a, int b) { return sites_[shape_.site_number(a, b)]; }
  const std::vector<SiteTensor>& sites() const { return sites_; }
  std::vector<SiteTensor>& sites() { return sites_; }

  std::size_t num_parameters() const;

 private:
  LatticeShape shape_;
  BondDims bonds_;
  std::vector<SiteTensor> sites_;
};

/// Dense output of the network: vector for PEPS, matrix for PEPO. Columns are
/// absorbed left to right into an exact boundary tensor.
DenseState contract(const TensorNetworkState& state);

/// Block-diagonal embedding of two networks of the same lattice and kind:
/// `x` occupies the leading block of every internal bond, `y` the trailing
/// block. contract(direct_sum(x, y)) == contract(x) + contract(y).
TensorNetworkState direct_sum(const TensorNetworkState& x, const TensorNetworkState& y);

/// Optional per-site Frobenius caps (row-major, one per site).
struct NormCaps {
  std::vector<double> caps;
};

/// I.i.d. standard complex Gaussian site tensors, each rescaled down to its
/// cap when it exceeds it. PEPS results are rescaled to a unit-norm vector.
/// PEPO results are rescaled so that Re tr(contract) = 1 when the trace is
/// not degenerate; use hermitize_trace_one for a ground-truth density matrix.
TensorNetworkState random_state(const LatticeShape& shape, const BondDims& bonds,
                                const std::optional<NormCaps>& caps, std::uint64_t seed);

/// Locally purified PEPO from a PEPS whose physical index carries
/// d * kraus values (system index major). Bonds of the result are squared and
/// the contracted operator is positive semidefinite.
TensorNetworkState purify(const TensorNetworkState& peps_with_ancilla, int d, int kraus);

struct HermitizedState {
  DenseState state;
  /// tr((C + C^dagger)/2) before normalization.
  double trace;
};

/// (C + C^dagger)/2 scaled to unit trace, C = contract(state). Throws
/// DegenerateTraceError when |trace| < 1e-10.
HermitizedState hermitize_trace_one(const TensorNetworkState& state);
HermitizedState hermitize_trace_one(const CMatrix& c);

inline constexpr double kDegenerateTrace = 1e-10;

/// Degrees-of-freedom surrogate: sum over sites of d (PEPS) or d^2 (PEPO)
/// times the product of the four incident bonds, times ln(1 + qp).
double dof(const LatticeShape& shape, const BondDims& bonds);

}  // namespace tnqst
