#include "tnqst/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tnqst/errors.hpp"
#include "tnqst/rng.hpp"

namespace tnqst {

EnsembleType ensemble_type_from_string(const std::string& name) {
  if (name == "sic") return EnsembleType::sic;
  if (name == "stabilizer") return EnsembleType::stabilizer;
  if (name == "haar") return EnsembleType::haar;
  throw RangeError("unknown ensemble '" + name + "' (expected sic, stabilizer or haar)");
}

const char* to_string(EnsembleType type) {
  switch (type) {
    case EnsembleType::sic:
      return "sic";
    case EnsembleType::stabilizer:
      return "stabilizer";
    case EnsembleType::haar:
      return "haar";
  }
  return "unknown";
}

namespace {

int qubit_count(std::size_t dim) {
  int n = 0;
  while ((std::size_t{1} << n) < dim) ++n;
  if ((std::size_t{1} << n) != dim) throw DimensionError("stabilizer ensembles need dim = 2^n");
  return n;
}

}  // namespace

MeasurementMap build_measurement_map(const EnsembleSpec& spec, std::size_t dim) {
  switch (spec.type) {
    case EnsembleType::sic:
      if (dim != 2) throw DimensionError("the SIC ensemble exists here for dim 2 only");
      return MeasurementMap::from_design(sic_qubit());
    case EnsembleType::stabilizer:
      return MeasurementMap::from_design(cached_stabilizer_design(qubit_count(dim), spec.cache_dir));
    case EnsembleType::haar: {
      if (spec.bases < 1) throw RangeError("need at least one Haar basis");
      std::vector<ProjectiveBasis> bases;
      for (int q = 0; q < spec.bases; ++q) {
        auto rng = make_stream(spec.seed, {static_cast<std::uint64_t>(q)});
        bases.push_back(haar_basis(dim, rng));
      }
      return MeasurementMap::from_bases(bases);
    }
  }
  throw RangeError("unknown ensemble");
}

json ensemble_spec_to_json(const EnsembleSpec& spec) {
  return json{{"type", to_string(spec.type)}, {"bases", spec.bases}, {"seed", spec.seed}};
}

EnsembleSpec ensemble_spec_from_json(const json& j) {
  EnsembleSpec spec;
  try {
    spec.type = ensemble_type_from_string(j.at("type").get<std::string>());
    spec.bases = j.at("bases").get<int>();
    spec.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw StructuralError(std::string("bad ensemble spec: ") + e.what());
  }
  return spec;
}

LatticeShape parse_lattice(const std::string& text, int d) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw RangeError("lattice must look like QxP, got '" + text + "'");
  try {
    std::size_t used_q = 0, used_p = 0;
    const int q = std::stoi(text.substr(0, x), &used_q);
    const int p = std::stoi(text.substr(x + 1), &used_p);
    if (used_q != x || used_p != text.size() - x - 1) throw std::invalid_argument(text);
    return LatticeShape(q, p, d);
  } catch (const std::logic_error&) {
    throw RangeError("lattice must look like QxP, got '" + text + "'");
  }
}

namespace {

// Purified PEPOs are rescaled to unit trace site by site.
TensorNetworkState make_state(const GenSpec& spec) {
  const auto& shape = spec.shape;
  if (spec.kind == NetworkKind::Peps || spec.kraus <= 0) {
    const BondDims bonds = BondDims::uniform(shape, spec.kind, spec.bond);
    return random_state(shape, bonds, std::nullopt, spec.seed);
  }
  const LatticeShape wide(shape.rows(), shape.cols(), shape.phys_dim() * spec.kraus);
  const auto peps = random_state(wide, BondDims::uniform(wide, NetworkKind::Peps, spec.bond),
                                 std::nullopt, spec.seed);
  TensorNetworkState pepo = purify(peps, shape.phys_dim(), spec.kraus);
  const double tr = contract(pepo).values.trace().real();
  if (tr < kDegenerateTrace) throw DegenerateTraceError("purified PEPO has vanishing trace");
  const double scale = std::pow(tr, -1.0 / shape.num_sites());
  for (auto& s : pepo.sites())
    for (auto& x : s.data()) x *= scale;
  return pepo;
}

std::string bonds_label(const BondDims& bonds) {
  std::string out;
  for (std::size_t i = 0; i < bonds.entries().size(); ++i) {
    if (i) out += ';';
    out += std::to_string(bonds.entries()[i]);
  }
  return out;
}

}  // namespace

json generate_state(const GenSpec& spec) {
  const TensorNetworkState state = make_state(spec);
  json j = state_to_json(state);
  const DenseState c = contract(state);
  json meta;
  meta["seed"] = spec.seed;
  meta["dof"] = dof(state.shape(), state.bonds());
  meta["num_parameters"] = state.num_parameters();
  std::vector<double> norms;
  for (const auto& s : state.sites()) norms.push_back(s.frobenius_norm());
  meta["site_norms"] = norms;
  meta["frobenius_norm"] = frobenius_norm(c);
  if (state.kind() == NetworkKind::Pepo) {
    const double tr = c.values.trace().real();
    meta["kraus"] = spec.kraus;
    meta["trace"] = tr;
    meta["hermitian"] = is_hermitian(c.values, 1e-10);
    meta["trace_one"] = std::abs(tr - 1.0) <= 1e-10 && std::abs(c.values.trace().imag()) <= 1e-10;
  }
  j["metadata"] = std::move(meta);
  return j;
}

DenseState ground_truth(const TensorNetworkState& state) {
  if (state.kind() == NetworkKind::Peps) {
    CVector u = contract(state).values.col(0);
    const double norm = u.norm();
    if (norm == 0.0) throw DegenerateTraceError("PEPS contracts to the zero vector");
    return DenseState::vector(u / norm);
  }
  return hermitize_trace_one(state).state;
}

SweepResult run_sweep(const SweepSpec& spec) {
  if (spec.reps < 1 || spec.shots_grid.empty()) throw RangeError("sweep needs shots and repetitions");
  GenSpec gen{spec.shape, spec.kind, spec.bond, spec.kind == NetworkKind::Pepo ? spec.kraus : 0,
              derive_seed(spec.seed, {0})};
  const TensorNetworkState truth_state = make_state(gen);
  const DenseState truth = ground_truth(truth_state);
  const BondDims model_bonds = truth_state.bonds();
  const std::size_t dim = spec.shape.hilbert_dim();

  const MeasurementMap map = build_measurement_map(spec.ensemble, dim);
  const std::vector<double> p = apply_map(map, truth);
  const std::size_t per_block = map.total_outcomes() / map.num_blocks();
  std::shared_ptr<const GramOperator> gram;
  if (dim * dim <= 1024 && dim * dim < map.total_outcomes())
    gram = std::make_shared<const GramOperator>(map);

  const std::size_t n_m = spec.shots_grid.size();
  const std::size_t cells = n_m * static_cast<std::size_t>(spec.reps);
  std::vector<double> errors(cells, std::numeric_limits<double>::quiet_NaN());

#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t cell = 0; cell < cells; ++cell) {
    const std::uint64_t m = spec.shots_grid[cell / spec.reps];
    const auto rep = static_cast<std::uint64_t>(cell % spec.reps);
    try {
      const auto records = sample_blocks(p, per_block, m, derive_seed(spec.seed, {1, m, rep}));
      const auto p_hat = stack_empirical(records);
      RecoveryConfig config;
      config.shape = spec.shape;
      config.bonds = model_bonds;
      config.restarts = spec.restarts;
      config.max_iters = spec.max_iters;
      config.init_seed = derive_seed(spec.seed, {2, m, rep});
      config.parallel_restarts = false;
      const RecoveryReport report = fit(config, map, p_hat, truth, gram);
      if (report.trace_error) errors[cell] = *report.trace_error;
    } catch (const Error&) {
      // Counted as a failure for the row; the sweep continues.
    }
  }

  SweepResult result;
  const int n = spec.shape.num_sites();
  const double dof_value = dof(spec.shape, model_bonds);
  const int q = static_cast<int>(map.num_blocks());
  std::vector<double> xs, ys, shapes;
  for (std::size_t i = 0; i < n_m; ++i) {
    SweepRow row;
    row.n = n;
    row.d = spec.shape.phys_dim();
    row.bonds = bonds_label(model_bonds);
    row.bases = q;
    row.shots = spec.shots_grid[i];
    row.dof = dof_value;
    std::vector<double> ok;
    for (int r = 0; r < spec.reps; ++r) {
      const double e = errors[i * spec.reps + r];
      row.errors.push_back(e);
      if (std::isfinite(e)) ok.push_back(e);
    }
    row.failures = spec.reps - static_cast<int>(ok.size());
    const double m = static_cast<double>(row.shots);
    double shape = std::sqrt(dof_value / m);
    if (spec.ensemble.type == EnsembleType::haar) {
      const double log_term = std::log(static_cast<double>(q)) + n * std::log(static_cast<double>(row.d));
      shape = std::sqrt(dof_value * log_term * log_term / (q * m));
    }
    if (ok.empty()) {
      row.median_error = std::numeric_limits<double>::quiet_NaN();
      row.theory_ratio = std::numeric_limits<double>::quiet_NaN();
    } else {
      std::sort(ok.begin(), ok.end());
      const std::size_t h = ok.size() / 2;
      row.median_error = ok.size() % 2 ? ok[h] : 0.5 * (ok[h - 1] + ok[h]);
      row.theory_ratio = row.median_error / shape;
      xs.push_back(m);
      ys.push_back(row.median_error);
      shapes.push_back(shape);
    }
    result.rows.push_back(std::move(row));
  }
  result.slope = xs.size() >= 2 ? loglog_slope(xs, ys) : std::numeric_limits<double>::quiet_NaN();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    num += ys[i] * shapes[i];
    den += shapes[i] * shapes[i];
  }
  result.fitted_c = den > 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN();
  return result;
}

std::string sweep_to_csv(const SweepResult& result) {
  std::ostringstream out;
  out.precision(17);
  out << "n,d,bonds,Q,M,median_error,dof,theory_ratio,failures,slope,theory_slope,fitted_c\n";
  for (const auto& row : result.rows)
    out << row.n << ',' << row.d << ',' << row.bonds << ',' << row.bases << ',' << row.shots << ','
        << row.median_error << ',' << row.dof << ',' << row.theory_ratio << ',' << row.failures << ','
        << result.slope << ",-0.5," << result.fitted_c << '\n';
  return out.str();
}

std::vector<IdentityReport> run_verify_suite(int max_qubits, std::uint64_t seed,
                                             const std::string& cache_dir) {
  if (max_qubits < 1 || max_qubits > 4) throw RangeError("max qubits must be in [1, 4]");
  std::vector<IdentityReport> reports;
  std::uint64_t tag = 0;
  auto label = [](IdentityReport r, const std::string& ensemble) {
    r.name = ensemble + "/" + r.name;
    return r;
  };
  auto completeness = [](const DesignEnsemble& design, const std::string& ensemble) {
    IdentityReport r;
    r.name = ensemble + "/povm_completeness";
    r.tolerance = 1e-12;
    r.deviation = effects_sum_check(MeasurementMap::from_design(design));
    r.finish();
    return r;
  };

  const DesignEnsemble sic = sic_qubit();
  reports.push_back(completeness(sic, "sic"));
  reports.push_back(label(check_embedding_identity(sic, 100, derive_seed(seed, {tag++})), "sic"));
  for (int s = 1; s <= 2; ++s) reports.push_back(label(check_design_moments(sic, s), "sic"));
  IdentityReport sic3 = label(check_design_moments(sic, 3, 1e-3), "sic");
  sic3.name += "_negative_control";
  sic3.expect_violation = true;
  sic3.finish();
  reports.push_back(sic3);

  for (int n = 1; n <= max_qubits; ++n) {
    const DesignEnsemble design = cached_stabilizer_design(n, cache_dir);
    const std::string name = "stabilizer" + std::to_string(n);
    reports.push_back(completeness(design, name));
    reports.push_back(label(check_embedding_identity(design, 100, derive_seed(seed, {tag++})), name));
    for (int s = 1; s <= 3; ++s) reports.push_back(label(check_design_moments(design, s), name));
    reports.push_back(label(check_third_moment_identity(design, 50, derive_seed(seed, {tag++})), name));
  }

  auto rng = make_stream(seed, {tag++});
  IdentityReport frame = label(check_design_moments(random_frame(4, 60, rng), 2, 1e-3), "random_frame");
  frame.name += "_negative_control";
  frame.expect_violation = true;
  frame.finish();
  reports.push_back(frame);
  return reports;
}

}  // namespace tnqst
