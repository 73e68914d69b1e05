#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "tnqst/network.hpp"
#include "tnqst/povm.hpp"
#include "tnqst/recovery.hpp"
#include "tnqst/sampling.hpp"
#include "tnqst/verify.hpp"

namespace tnqst {

using json = nlohmann::json;

// Tensor-network state file:
//   { "shape": {"q", "p", "d"}, "kind": "peps"|"pepo",
//     "bonds": [p*(2q-1) ints, row-major],
//     "sites": [ {"a", "b" (1-based), "dims": [...], "re": [...], "im": [...]} ] }
// Flat arrays follow the site's axis order (i, [j], left, up, right, down).
// Doubles are written in shortest round-trip form, so a load/save cycle is
// bit-exact.
json state_to_json(const TensorNetworkState& state);
TensorNetworkState state_from_json(const json& j);

// Ensemble cache: { "dim", "declared_t", "K", "vectors": {"re": [...], "im": [...]} }
// with vectors flattened column by column (vector k occupies [k*dim, (k+1)*dim)).
json ensemble_to_json(const DesignEnsemble& design);
DesignEnsemble ensemble_from_json(const json& j);

/// stabilizer_design(n) backed by a JSON cache file in `cache_dir` (created on
/// first use). An empty directory disables caching.
DesignEnsemble cached_stabilizer_design(int n_qubits, const std::string& cache_dir);

json report_to_json(const IdentityReport& report);
/// One CSV line: name,deviation,tolerance,pass.
std::string report_to_csv_line(const IdentityReport& report);

json recovery_report_to_json(const RecoveryReport& report);
/// restart,iter,loss,step
void write_trajectories_csv(std::ostream& out, const RecoveryReport& report);

/// Shot-record CSV, header "run_id,q,M,k,f_k", one row per outcome.
void write_shot_records_csv(std::ostream& out, const std::string& run_id,
                            const std::vector<ShotRecord>& records);
std::vector<ShotRecord> read_shot_records_csv(std::istream& in);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace tnqst
