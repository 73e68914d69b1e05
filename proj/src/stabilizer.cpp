#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "tnqst/errors.hpp"
#include "tnqst/povm.hpp"

namespace tnqst {

namespace {

using Mask = std::uint32_t;  // membership bitmask over F_2^n, n <= 4

Mask span_mask(const std::vector<unsigned>& basis) {
  std::vector<unsigned> elems{0};
  for (unsigned g : basis) {
    const std::size_t m = elems.size();
    for (std::size_t i = 0; i < m; ++i) elems.push_back(elems[i] ^ g);
  }
  Mask mask = 0;
  for (unsigned e : elems) mask |= Mask{1} << e;
  return mask;
}

// Every linear subspace of F_2^n, each with one basis.
std::vector<std::vector<unsigned>> all_subspaces(int n) {
  const unsigned size = 1u << n;
  std::vector<std::vector<unsigned>> out;
  std::set<Mask> seen;
  std::vector<std::vector<unsigned>> frontier{{}};
  seen.insert(span_mask({}));
  out.push_back({});
  while (!frontier.empty()) {
    std::vector<std::vector<unsigned>> next;
    for (const auto& basis : frontier) {
      const Mask span = span_mask(basis);
      for (unsigned v = 1; v < size; ++v) {
        if (span & (Mask{1} << v)) continue;
        auto extended = basis;
        extended.push_back(v);
        if (seen.insert(span_mask(extended)).second) {
          out.push_back(extended);
          next.push_back(std::move(extended));
        }
      }
    }
    frontier = std::move(next);
  }
  return out;
}

}  // namespace

std::size_t stabilizer_count(int n_qubits) {
  std::size_t count = std::size_t{1} << n_qubits;
  for (int k = 1; k <= n_qubits; ++k) count *= (std::size_t{1} << k) + 1;
  return count;
}

// States |A|^{-1/2} sum_{x in A} i^{l(x)} (-1)^{q(x)} |x> over affine subspaces
// A = x0 + span(G), linear forms l and quadratic forms q in the coordinates of
// A. Phases are tracked exactly as powers of i and canonicalized so that the
// first nonzero amplitude is real positive; duplicates are dropped.
DesignEnsemble stabilizer_design(int n_qubits) {
  if (n_qubits < 1) throw RangeError("stabilizer_design needs at least one qubit");
  if (n_qubits > 4) throw ScaleError("stabilizer_design supports at most 4 qubits");
  const unsigned dim = 1u << n_qubits;
  constexpr std::uint8_t kAbsent = 255;

  std::set<std::vector<std::uint8_t>> seen;
  std::vector<std::vector<std::uint8_t>> states;

  for (const auto& basis : all_subspaces(n_qubits)) {
    const int k = static_cast<int>(basis.size());
    const unsigned points = 1u << k;
    std::vector<unsigned> offsets(points);  // span element for coordinate y
    for (unsigned y = 0; y < points; ++y) {
      unsigned x = 0;
      for (int t = 0; t < k; ++t)
        if (y >> t & 1u) x ^= basis[t];
      offsets[y] = x;
    }
    const int n_quad = k * (k + 1) / 2;
    Mask covered = 0;
    for (unsigned x0 = 0; x0 < dim; ++x0) {
      if (covered & (Mask{1} << x0)) continue;
      for (unsigned y = 0; y < points; ++y) covered |= Mask{1} << (x0 ^ offsets[y]);

      for (unsigned lin = 0; lin < points; ++lin) {
        for (unsigned quad = 0; quad < (1u << n_quad); ++quad) {
          std::vector<std::uint8_t> key(dim, kAbsent);
          for (unsigned y = 0; y < points; ++y) {
            unsigned l = 0;
            for (int t = 0; t < k; ++t) l ^= (lin >> t & 1u) & (y >> t & 1u);
            unsigned q = 0;
            int bit = 0;
            for (int a = 0; a < k; ++a)
              for (int b = a; b < k; ++b, ++bit)
                q ^= (quad >> bit & 1u) & (y >> a & 1u) & (y >> b & 1u);
            key[x0 ^ offsets[y]] = static_cast<std::uint8_t>((l + 2 * q) % 4);
          }
          std::uint8_t ref = 0;
          for (auto e : key)
            if (e != kAbsent) {
              ref = e;
              break;
            }
          for (auto& e : key)
            if (e != kAbsent) e = static_cast<std::uint8_t>((e + 4 - ref) % 4);
          if (seen.insert(key).second) states.push_back(std::move(key));
        }
      }
    }
  }

  if (states.size() != stabilizer_count(n_qubits))
    throw Error("stabilizer enumeration produced " + std::to_string(states.size()) +
                " states, expected " + std::to_string(stabilizer_count(n_qubits)));

  static const cplx kPhase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  DesignEnsemble design;
  design.vectors = CMatrix::Zero(dim, static_cast<Eigen::Index>(states.size()));
  for (std::size_t s = 0; s < states.size(); ++s) {
    int support = 0;
    for (auto e : states[s]) support += e != kAbsent;
    const double amp = 1.0 / std::sqrt(static_cast<double>(support));
    for (unsigned x = 0; x < dim; ++x)
      if (states[s][x] != kAbsent) design.vectors(x, static_cast<Eigen::Index>(s)) = amp * kPhase[states[s][x]];
  }
  design.declared_t = 3;
  return design;
}

}  // namespace tnqst
