#include "tnqst/lattice.hpp"

#include <string>

#include "tnqst/errors.hpp"

namespace tnqst {

const char* to_string(NetworkKind kind) { return kind == NetworkKind::Peps ? "peps" : "pepo"; }

NetworkKind network_kind_from_string(const std::string& name) {
  if (name == "peps" || name == "PEPS") return NetworkKind::Peps;
  if (name == "pepo" || name == "PEPO") return NetworkKind::Pepo;
  throw RangeError("unknown network kind '" + name + "'");
}

LatticeShape::LatticeShape(int q, int p, int d) : q_(q), p_(p), d_(d), dim_(1) {
  if (q < 1 || p < 1) throw RangeError("lattice needs at least one row and one column");
  if (d < 2) throw RangeError("physical dimension must be at least 2");
  for (int s = 0; s < q * p; ++s) {
    dim_ *= static_cast<std::size_t>(d);
    if (dim_ > kMaxDenseDim)
      throw ScaleError("d^n exceeds the desk-scale limit 2^20 for a " + std::to_string(q) + "x" +
                       std::to_string(p) + " lattice with d=" + std::to_string(d));
  }
}

std::size_t flatten_index(const LatticeShape& shape, std::span<const int> multi) {
  if (multi.size() != static_cast<std::size_t>(shape.num_sites()))
    throw RangeError("expected one index per site");
  std::size_t linear = 0;
  std::size_t weight = 1;
  for (int s = 0; s < shape.num_sites(); ++s) {
    const int i = multi[s];
    if (i < 1 || i > shape.phys_dim())
      throw RangeError("site index " + std::to_string(i) + " outside [1, " +
                       std::to_string(shape.phys_dim()) + "]");
    linear += weight * static_cast<std::size_t>(i - 1);
    weight *= static_cast<std::size_t>(shape.phys_dim());
  }
  return linear + 1;
}

std::vector<int> unflatten_index(const LatticeShape& shape, std::size_t linear) {
  if (linear < 1 || linear > shape.hilbert_dim()) throw RangeError("linear index out of range");
  std::vector<int> multi(shape.num_sites());
  std::size_t rest = linear - 1;
  for (auto& digit : multi) {
    digit = static_cast<int>(rest % shape.phys_dim()) + 1;
    rest /= shape.phys_dim();
  }
  return multi;
}

BondDims::BondDims(const LatticeShape& shape, NetworkKind kind, std::vector<int> entries)
    : q_(shape.rows()), p_(shape.cols()), kind_(kind), entries_(std::move(entries)) {
  if (entries_.size() != static_cast<std::size_t>(rows() * cols()))
    throw StructuralError("bond matrix must be p x (2q-1) = " + std::to_string(rows()) + "x" +
                          std::to_string(cols()));
  for (int b = 0; b < p_; ++b) {
    for (int c = 0; c < cols(); ++c) {
      const bool horizontal_slot = c % 2 == 0;
      const bool structural_zero = horizontal_slot && b == p_ - 1;
      const int value = entry(b, c);
      if (structural_zero && value != 0)
        throw StructuralError("last row of the bond matrix has no horizontal bonds; entry (" +
                              std::to_string(b + 1) + "," + std::to_string(c + 1) +
                              ") must be 0");
      if (!structural_zero && value < 1)
        throw StructuralError("bond entry (" + std::to_string(b + 1) + "," +
                              std::to_string(c + 1) + ") must be >= 1");
    }
  }
}

BondDims BondDims::uniform(const LatticeShape& shape, NetworkKind kind, int r) {
  if (r < 1) throw RangeError("bond dimension must be >= 1");
  const int p = shape.cols();
  const int cols = 2 * shape.rows() - 1;
  std::vector<int> entries(static_cast<std::size_t>(p * cols), r);
  for (int c = 0; c < cols; c += 2) entries[(p - 1) * cols + c] = 0;
  return BondDims(shape, kind, std::move(entries));
}

std::array<int, 4> BondDims::site_bonds(int a, int b) const {
  return {
      b > 0 ? horizontal(a, b - 1) : 1,
      a > 0 ? vertical(a - 1, b) : 1,
      b < p_ - 1 ? horizontal(a, b) : 1,
      a < q_ - 1 ? vertical(a, b) : 1,
  };
}

BondDims BondDims::operator+(const BondDims& other) const {
  if (q_ != other.q_ || p_ != other.p_ || kind_ != other.kind_)
    throw StructuralError("bond matrices of different lattices or kinds");
  std::vector<int> sum(entries_.size());
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = entries_[i] + other.entries_[i];
  return BondDims(LatticeShape(q_, p_, 2), kind_, std::move(sum));
}

}  // namespace tnqst
