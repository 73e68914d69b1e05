#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tnqst/io.hpp"

namespace tnqst {

/// Which measurement to build.
///   sic:        tetrahedral qubit SIC (dim 2 only)
///   stabilizer: all stabilizer states of log2(dim) qubits
///   haar:       `bases` Haar-random projective bases, basis q seeded by
///               derive_seed(seed, {q})
enum class EnsembleType { sic, stabilizer, haar };

struct EnsembleSpec {
  EnsembleType type = EnsembleType::stabilizer;
  int bases = 1;
  std::uint64_t seed = 0;
  std::string cache_dir;
};

EnsembleType ensemble_type_from_string(const std::string& name);
const char* to_string(EnsembleType type);

MeasurementMap build_measurement_map(const EnsembleSpec& spec, std::size_t dim);
json ensemble_spec_to_json(const EnsembleSpec& spec);
EnsembleSpec ensemble_spec_from_json(const json& j);

/// Parses "QxP" (e.g. "2x2").
LatticeShape parse_lattice(const std::string& text, int d);

struct GenSpec {
  LatticeShape shape{1, 1, 2};
  NetworkKind kind = NetworkKind::Peps;
  int bond = 1;
  /// PEPO only: > 0 builds a locally purified (PSD) PEPO with this Kraus
  /// dimension and bonds bond^2.
  int kraus = 0;
  std::uint64_t seed = 0;
};

/// Random state plus metadata (dof, norms, Hermiticity flags) in the state
/// file format.
json generate_state(const GenSpec& spec);

/// Dense ground truth of a state file: u u^dagger-ready unit vector for PEPS,
/// hermitized trace-one matrix for PEPO.
DenseState ground_truth(const TensorNetworkState& state);

struct SweepSpec {
  LatticeShape shape{1, 2, 2};
  NetworkKind kind = NetworkKind::Peps;
  int bond = 2;
  int kraus = 1;
  EnsembleSpec ensemble;
  std::vector<std::uint64_t> shots_grid{1000, 10000, 100000, 1000000};
  int reps = 20;
  int restarts = 4;
  int max_iters = 3000;
  std::uint64_t seed = 0;
};

struct SweepRow {
  int n = 0;
  int d = 0;
  std::string bonds;
  int bases = 0;
  std::uint64_t shots = 0;
  double median_error = 0.0;
  double dof = 0.0;
  /// median_error / theory shape, where the shape is sqrt(dof / M) for
  /// designs and sqrt(dof (ln Q + n ln d)^2 / (Q M)) for Haar bases.
  double theory_ratio = 0.0;
  int failures = 0;
  std::vector<double> errors;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  /// log-log slope of median error against M.
  double slope = 0.0;
  /// Least-squares c in median_error ~ c * shape.
  double fitted_c = 0.0;
};

/// Fixed ground truth from derive_seed(seed, {0}); cell (M, rep) samples with
/// derive_seed(seed, {1, M, rep}) and initializes restarts from
/// derive_seed(seed, {2, M, rep}). Cells run in parallel; rows are ordered by M.
SweepResult run_sweep(const SweepSpec& spec);
std::string sweep_to_csv(const SweepResult& result);

/// Exact-identity battery for the sic and stabilizer_design(1..max_qubits)
/// ensembles plus negative controls.
std::vector<IdentityReport> run_verify_suite(int max_qubits, std::uint64_t seed,
                                             const std::string& cache_dir);

}  // namespace tnqst
