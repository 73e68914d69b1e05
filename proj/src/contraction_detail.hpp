#pragma once

// Helpers shared by the dense contraction and the environment computation.

#include <vector>

#include "tnqst/kernels.hpp"
#include "tnqst/network.hpp"

namespace tnqst::detail {

/// Column-major absorption order used by kernels::sweep_contract.
std::vector<int> absorption_order(const LatticeShape& shape);

/// For every entry of a sweep result (column-major sites, first absorbed most
/// significant) the dense position it lands in: the linear vector index for
/// PEPS, I * D + J for PEPO. `skip_site` (if >= 0) contributes nothing and is
/// given digit range `skip_range`; used for environments.
std::vector<std::size_t> dense_offsets(const LatticeShape& shape, NetworkKind kind,
                                       int skip_site = -1, std::size_t skip_range = 1);

std::vector<kernels::SiteView> site_views(const TensorNetworkState& state);

}  // namespace tnqst::detail
