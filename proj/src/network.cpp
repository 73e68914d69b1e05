#include "tnqst/network.hpp"

#include <cmath>
#include <string>

#include "contraction_detail.hpp"
#include "tnqst/errors.hpp"
#include "tnqst/rng.hpp"

namespace tnqst {

namespace {

std::size_t tensor_size(NetworkKind kind, int d, const std::array<int, 4>& bonds) {
  const std::size_t phys = kind == NetworkKind::Peps ? d : static_cast<std::size_t>(d) * d;
  return phys * bonds[0] * bonds[1] * bonds[2] * bonds[3];
}

// Largest dense PEPO accepted: D^2 entries.
constexpr std::size_t kMaxOperatorEntries = std::size_t{1} << 24;

}  // namespace

SiteTensor::SiteTensor(int a, int b, NetworkKind kind, int d, std::array<int, 4> bonds)
    : a_(a), b_(b), kind_(kind), d_(d), bonds_(bonds) {
  for (int x : bonds_)
    if (x < 1) throw StructuralError("bond sizes must be >= 1");
  data_.assign(tensor_size(kind, d, bonds), cplx{0.0, 0.0});
}

SiteTensor::SiteTensor(int a, int b, NetworkKind kind, int d, std::array<int, 4> bonds,
                       std::vector<cplx> data)
    : SiteTensor(a, b, kind, d, bonds) {
  if (data.size() != data_.size())
    throw StructuralError("site (" + std::to_string(a + 1) + "," + std::to_string(b + 1) +
                          ") data has " + std::to_string(data.size()) + " entries, expected " +
                          std::to_string(data_.size()));
  data_ = std::move(data);
}

std::vector<int> SiteTensor::dims() const {
  std::vector<int> out{d_};
  if (kind_ == NetworkKind::Pepo) out.push_back(d_);
  out.insert(out.end(), bonds_.begin(), bonds_.end());
  return out;
}

cplx& SiteTensor::at(int v, int l, int u, int r, int dn) {
  return data_[(((static_cast<std::size_t>(v) * bonds_[0] + l) * bonds_[1] + u) * bonds_[2] + r) *
                   bonds_[3] +
               dn];
}

cplx SiteTensor::at(int v, int l, int u, int r, int dn) const {
  return const_cast<SiteTensor*>(this)->at(v, l, u, r, dn);
}

double SiteTensor::frobenius_norm() const {
  double sum = 0.0;
  for (const cplx& x : data_) sum += std::norm(x);
  return std::sqrt(sum);
}

TensorNetworkState::TensorNetworkState(LatticeShape shape, BondDims bonds,
                                       std::vector<SiteTensor> sites)
    : shape_(shape), bonds_(std::move(bonds)), sites_(std::move(sites)) {
  if (bonds_.lattice_rows() != shape_.rows() || bonds_.lattice_cols() != shape_.cols())
    throw StructuralError("bond matrix does not belong to this lattice");
  if (sites_.size() != static_cast<std::size_t>(shape_.num_sites()))
    throw StructuralError("expected " + std::to_string(shape_.num_sites()) + " site tensors");
  for (int a = 0; a < shape_.rows(); ++a) {
    for (int b = 0; b < shape_.cols(); ++b) {
      const SiteTensor& s = site(a, b);
      const std::string where = "site (" + std::to_string(a + 1) + "," + std::to_string(b + 1) + ")";
      if (s.row() != a || s.col() != b) throw StructuralError(where + " stored out of order");
      if (s.kind() != kind()) throw StructuralError(where + " has the wrong network kind");
      if (s.phys_dim() != shape_.phys_dim())
        throw StructuralError(where + " has the wrong physical dimension");
      if (s.bonds() != bonds_.site_bonds(a, b))
        throw StructuralError(where + " bond sizes disagree with the bond matrix");
    }
  }
}

TensorNetworkState TensorNetworkState::zeros(const LatticeShape& shape, const BondDims& bonds) {
  std::vector<SiteTensor> sites;
  sites.reserve(shape.num_sites());
  for (int a = 0; a < shape.rows(); ++a)
    for (int b = 0; b < shape.cols(); ++b)
      sites.emplace_back(a, b, bonds.kind(), shape.phys_dim(), bonds.site_bonds(a, b));
  return TensorNetworkState(shape, bonds, std::move(sites));
}

std::size_t TensorNetworkState::num_parameters() const {
  std::size_t n = 0;
  for (const auto& s : sites_) n += s.size();
  return n;
}

namespace detail {

std::vector<int> absorption_order(const LatticeShape& shape) {
  std::vector<int> order;
  order.reserve(shape.num_sites());
  for (int c = 0; c < shape.cols(); ++c)
    for (int r = 0; r < shape.rows(); ++r) order.push_back(shape.site_number(r, c));
  return order;
}

std::vector<std::size_t> dense_offsets(const LatticeShape& shape, NetworkKind kind, int skip_site,
                                       std::size_t skip_range) {
  const std::size_t d = shape.phys_dim();
  const std::size_t dim = shape.hilbert_dim();
  std::vector<std::size_t> weight(shape.num_sites());
  std::size_t w = 1;
  for (auto& x : weight) {
    x = w;
    w *= d;
  }
  std::vector<std::size_t> offsets{0};
  for (int s : absorption_order(shape)) {
    const std::size_t range =
        s == skip_site ? skip_range : (kind == NetworkKind::Peps ? d : d * d);
    std::vector<std::size_t> next(offsets.size() * range);
    for (std::size_t o = 0; o < offsets.size(); ++o) {
      for (std::size_t v = 0; v < range; ++v) {
        std::size_t contribution = 0;
        if (s != skip_site) {
          if (kind == NetworkKind::Peps) {
            contribution = v * weight[s];
          } else {
            const std::size_t i = v / d;
            const std::size_t j = v % d;
            contribution = i * weight[s] * dim + j * weight[s];
          }
        }
        next[o * range + v] = offsets[o] + contribution;
      }
    }
    offsets = std::move(next);
  }
  return offsets;
}

std::vector<kernels::SiteView> site_views(const TensorNetworkState& state) {
  std::vector<kernels::SiteView> views;
  views.reserve(state.sites().size());
  for (const auto& s : state.sites()) views.push_back({s.data().data(), s.phys_size(), s.bonds()});
  return views;
}

}  // namespace detail

DenseState contract(const TensorNetworkState& state) {
  const LatticeShape& shape = state.shape();
  const std::size_t dim = shape.hilbert_dim();
  if (state.kind() == NetworkKind::Pepo && dim * dim > kMaxOperatorEntries)
    throw ScaleError("dense PEPO contraction limited to d^{2n} <= 2^24");
  const auto views = detail::site_views(state);
  const std::vector<cplx> swept = kernels::sweep_contract(shape.rows(), shape.cols(), views);
  const auto offsets = detail::dense_offsets(shape, state.kind());
  if (state.kind() == NetworkKind::Peps) {
    CVector u(static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < swept.size(); ++k) u(static_cast<Eigen::Index>(offsets[k])) = swept[k];
    return DenseState::vector(std::move(u));
  }
  CMatrix rho(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t k = 0; k < swept.size(); ++k)
    rho(static_cast<Eigen::Index>(offsets[k] / dim), static_cast<Eigen::Index>(offsets[k] % dim)) =
        swept[k];
  return DenseState::matrix(std::move(rho));
}

TensorNetworkState direct_sum(const TensorNetworkState& x, const TensorNetworkState& y) {
  if (!(x.shape() == y.shape())) throw StructuralError("direct_sum of different lattices");
  if (x.kind() != y.kind()) throw StructuralError("direct_sum of a PEPS and a PEPO");
  const BondDims bonds = x.bonds() + y.bonds();
  TensorNetworkState out = TensorNetworkState::zeros(x.shape(), bonds);
  for (int a = 0; a < x.shape().rows(); ++a) {
    for (int b = 0; b < x.shape().cols(); ++b) {
      const SiteTensor& xs = x.site(a, b);
      const SiteTensor& ys = y.site(a, b);
      SiteTensor& os = out.site(a, b);
      // y's block starts after x's block on internal axes; on boundary axes
      // both have size 1 and share index 0.
      std::array<int, 4> shift{};
      for (int axis = 0; axis < 4; ++axis)
        shift[axis] = os.bonds()[axis] == 1 ? 0 : xs.bonds()[axis];
      const auto& xb = xs.bonds();
      const auto& yb = ys.bonds();
      for (int v = 0; v < xs.phys_size(); ++v) {
        for (int l = 0; l < xb[0]; ++l)
          for (int u = 0; u < xb[1]; ++u)
            for (int r = 0; r < xb[2]; ++r)
              for (int dn = 0; dn < xb[3]; ++dn) os.at(v, l, u, r, dn) += xs.at(v, l, u, r, dn);
        for (int l = 0; l < yb[0]; ++l)
          for (int u = 0; u < yb[1]; ++u)
            for (int r = 0; r < yb[2]; ++r)
              for (int dn = 0; dn < yb[3]; ++dn)
                os.at(v, l + shift[0], u + shift[1], r + shift[2], dn + shift[3]) +=
                    ys.at(v, l, u, r, dn);
      }
    }
  }
  return out;
}

namespace {

void scale_sites(TensorNetworkState& state, cplx first_site_factor, double per_site_factor) {
  for (auto& s : state.sites())
    for (auto& x : s.data()) x *= per_site_factor;
  for (auto& x : state.sites().front().data()) x *= first_site_factor;
}

}  // namespace

TensorNetworkState random_state(const LatticeShape& shape, const BondDims& bonds,
                                const std::optional<NormCaps>& caps, std::uint64_t seed) {
  if (caps && caps->caps.size() != static_cast<std::size_t>(shape.num_sites()))
    throw RangeError("need one norm cap per site");
  if (caps)
    for (double c : caps->caps)
      if (!(c > 0.0)) throw RangeError("norm caps must be positive");

  TensorNetworkState state = TensorNetworkState::zeros(shape, bonds);
  std::mt19937_64 rng = make_stream(seed, {});
  for (std::size_t s = 0; s < state.sites().size(); ++s) {
    SiteTensor& site = state.sites()[s];
    for (auto& x : site.data()) x = complex_normal(rng);
    if (caps) {
      const double cap = caps->caps[s];
      site.set_norm_cap(cap);
      const double norm = site.frobenius_norm();
      if (norm > cap)
        for (auto& x : site.data()) x *= cap / norm;
    }
  }

  const double n = shape.num_sites();
  if (state.kind() == NetworkKind::Peps) {
    const double norm = contract(state).values.norm();
    if (norm > 0.0) scale_sites(state, 1.0, std::pow(norm, -1.0 / n));
  } else {
    const cplx tr = contract(state).values.trace();
    if (std::abs(tr) >= kDegenerateTrace)
      scale_sites(state, std::conj(tr) / std::abs(tr), std::pow(std::abs(tr), -1.0 / n));
  }
  return state;
}

TensorNetworkState purify(const TensorNetworkState& peps, int d, int kraus) {
  if (peps.kind() != NetworkKind::Peps) throw StructuralError("purify expects a PEPS");
  if (kraus < 1 || d * kraus != peps.shape().phys_dim())
    throw RangeError("PEPS physical dimension must equal d * kraus");
  const LatticeShape shape(peps.shape().rows(), peps.shape().cols(), d);
  std::vector<int> squared = peps.bonds().entries();
  for (int& x : squared) x *= x;
  const BondDims bonds(shape, NetworkKind::Pepo, std::move(squared));
  TensorNetworkState out = TensorNetworkState::zeros(shape, bonds);
  for (int a = 0; a < shape.rows(); ++a) {
    for (int b = 0; b < shape.cols(); ++b) {
      const SiteTensor& in = peps.site(a, b);
      SiteTensor& os = out.site(a, b);
      const auto& t = in.bonds();
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          for (int l = 0; l < t[0] * t[0]; ++l)
            for (int u = 0; u < t[1] * t[1]; ++u)
              for (int r = 0; r < t[2] * t[2]; ++r)
                for (int dn = 0; dn < t[3] * t[3]; ++dn) {
                  cplx acc{0.0, 0.0};
                  for (int k = 0; k < kraus; ++k)
                    acc += in.at(i * kraus + k, l / t[0], u / t[1], r / t[2], dn / t[3]) *
                           std::conj(in.at(j * kraus + k, l % t[0], u % t[1], r % t[2], dn % t[3]));
                  os.at(i * d + j, l, u, r, dn) = acc;
                }
    }
  }
  return out;
}

HermitizedState hermitize_trace_one(const CMatrix& c) {
  if (c.rows() != c.cols()) throw DimensionError("hermitize_trace_one needs a square matrix");
  CMatrix h = 0.5 * (c + c.adjoint());
  const double tr = h.trace().real();
  if (std::abs(tr) < kDegenerateTrace)
    throw DegenerateTraceError("trace " + std::to_string(tr) + " too small to normalize");
  h /= tr;
  return {DenseState::matrix(std::move(h)), tr};
}

HermitizedState hermitize_trace_one(const TensorNetworkState& state) {
  if (state.kind() != NetworkKind::Pepo) throw StructuralError("hermitize_trace_one expects a PEPO");
  return hermitize_trace_one(contract(state).values);
}

double dof(const LatticeShape& shape, const BondDims& bonds) {
  const double d = shape.phys_dim();
  const double phys = bonds.kind() == NetworkKind::Peps ? d : d * d;
  double total = 0.0;
  for (int a = 0; a < shape.rows(); ++a) {
    for (int b = 0; b < shape.cols(); ++b) {
      const auto t = bonds.site_bonds(a, b);
      total += phys * static_cast<double>(t[0]) * t[1] * t[2] * t[3];
    }
  }
  return total * std::log(1.0 + shape.num_sites());
}

}  // namespace tnqst
