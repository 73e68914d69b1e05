#pragma once

// Data-parallel inner loops. Every kernel exists twice: a plain serial loop in
// `reference`, kept as the ground truth for tests, and an OpenMP version in
// `omp` that the library calls. Both must agree to rounding.

#include <array>
#include <span>
#include <vector>

#include "tnqst/types.hpp"

namespace tnqst::kernels {

enum class Exec { reference, omp };

/// Read-only view of one site tensor for the sweep: `phys` is the size of the
/// (combined) physical index, bonds are (left, up, right, down).
struct SiteView {
  const cplx* data;
  int phys;
  std::array<int, 4> bonds;
};

/// Boundary tensor of the column sweep. Index = phys * frontier_size + f with
/// the frontier ordered (h_0, ..., h_{q-1}, v): one horizontal bond per
/// lattice row plus the vertical bond below the last absorbed site.
struct Boundary {
  std::vector<cplx> values;
  std::size_t phys_size = 1;
  std::vector<int> frontier;

  std::size_t frontier_size() const;
};

// absorb_site: sums a site in lattice row r over its left bond (frontier
// slot r) and up bond (frontier slot q), replacing them by its right and down
// bonds. The site's physical index becomes the least significant digit.
// probs_mixed / probs_pure: weight * <v_k, rho v_k> and weight * |<v_k, u>|^2
// for every column v_k.
// adjoint_accumulate: out += sum_k r_k * weight * v_k v_k^dagger.
// frame_potential: (1/K^2) sum_{j,k} |<v_j, v_k>|^{2s}.
namespace reference {
Boundary absorb_site(const Boundary& in, int r, const SiteView& site);
void probs_mixed(const CMatrix& vectors, double weight, const CMatrix& rho, std::span<double> out);
void probs_pure(const CMatrix& vectors, double weight, const CVector& u, std::span<double> out);
void adjoint_accumulate(const CMatrix& vectors, double weight, std::span<const double> r,
                        CMatrix& out);
double frame_potential(const CMatrix& vectors, int s);
}  // namespace reference

namespace omp {
Boundary absorb_site(const Boundary& in, int r, const SiteView& site);
void probs_mixed(const CMatrix& vectors, double weight, const CMatrix& rho, std::span<double> out);
void probs_pure(const CMatrix& vectors, double weight, const CVector& u, std::span<double> out);
void adjoint_accumulate(const CMatrix& vectors, double weight, std::span<const double> r,
                        CMatrix& out);
double frame_potential(const CMatrix& vectors, int s);
}  // namespace omp

/// Exact contraction of a q x p grid of sites (row-major `sites`), absorbing
/// columns left to right and rows top to bottom within a column. The result
/// is indexed with the first absorbed site (0, 0) as the most significant
/// digit, i.e. in column-major site order.
std::vector<cplx> sweep_contract(int q, int p, std::span<const SiteView> sites,
                                 Exec exec = Exec::omp);

}  // namespace tnqst::kernels
