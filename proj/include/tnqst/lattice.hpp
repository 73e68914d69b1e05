#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "tnqst/types.hpp"

namespace tnqst {

/// Largest dense Hilbert dimension d^n accepted anywhere in the library.
inline constexpr std::uint64_t kMaxDenseDim = std::uint64_t{1} << 20;

/// A q x p lattice of d-level sites.
class LatticeShape {
 public:
  LatticeShape(int q, int p, int d);

  int rows() const { return q_; }
  int cols() const { return p_; }
  int phys_dim() const { return d_; }
  int num_sites() const { return q_ * p_; }
  /// d^n, the dense Hilbert-space dimension.
  std::size_t hilbert_dim() const { return dim_; }

  /// Row-major site number a*p + b (0-based), which is also the position of
  /// the site's digit in the flattened index.
  int site_number(int a, int b) const { return a * p_ + b; }

  friend bool operator==(const LatticeShape&, const LatticeShape&) = default;

 private:
  int q_;
  int p_;
  int d_;
  std::size_t dim_;
};

/// Maps per-site physical indices (1-based, row-major over the lattice) to
/// the 1-based linear index of the dense vector. Site (a, b) carries weight
/// d^{(a-1)p + b-1}, so site (1, 1) is the least significant digit.
std::size_t flatten_index(const LatticeShape& shape, std::span<const int> multi);

/// Inverse of flatten_index: 1-based digits for a 1-based linear index.
std::vector<int> unflatten_index(const LatticeShape& shape, std::size_t linear);

/// Bond dimensions stored as the p x (2q-1) matrix used in the literature for
/// PEPS (T) and PEPO (R).
///
/// Row b (0-based) describes lattice column b. Column 2a holds the horizontal
/// bond between sites (a, b) and (a, b+1); column 2a+1 holds the vertical bond
/// between sites (a, b) and (a+1, b). The last row has no horizontal bonds, so
/// its even columns are structural zeros. Boundary bonds are 1 and are not
/// stored.
class BondDims {
 public:
  BondDims(const LatticeShape& shape, NetworkKind kind, std::vector<int> entries);

  /// Every internal bond equal to `r`.
  static BondDims uniform(const LatticeShape& shape, NetworkKind kind, int r);

  int rows() const { return p_; }
  int cols() const { return 2 * q_ - 1; }
  int entry(int row, int col) const { return entries_[row * cols() + col]; }
  const std::vector<int>& entries() const { return entries_; }
  NetworkKind kind() const { return kind_; }
  int lattice_rows() const { return q_; }
  int lattice_cols() const { return p_; }

  /// Bond between (a, b) and (a, b+1); requires b < p-1.
  int horizontal(int a, int b) const { return entry(b, 2 * a); }
  /// Bond between (a, b) and (a+1, b); requires a < q-1.
  int vertical(int a, int b) const { return entry(b, 2 * a + 1); }

  /// The four bonds incident to site (a, b) in (left, up, right, down) order,
  /// with 1 on the lattice boundary.
  std::array<int, 4> site_bonds(int a, int b) const;

  /// Entrywise sum, as produced by the block-diagonal direct sum.
  BondDims operator+(const BondDims& other) const;

  friend bool operator==(const BondDims&, const BondDims&) = default;

 private:
  int q_;
  int p_;
  NetworkKind kind_;
  std::vector<int> entries_;
};

}  // namespace tnqst
