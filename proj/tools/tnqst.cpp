// tnqst: generate tensor-network states, simulate measurements, recover and
// verify. Exit codes: 0 ok, 2 validation failure, 3 identity-check failure,
// 4 optimization failure.

#include <omp.h>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tnqst/errors.hpp"
#include "tnqst/experiments.hpp"
#include "tnqst/rng.hpp"

namespace {

using namespace tnqst;

constexpr int kExitValidation = 2;
constexpr int kExitIdentity = 3;
constexpr int kExitOptimization = 4;

struct Shared {
  std::uint64_t seed = 0;
  std::string out;
  int threads = 0;
  std::string format = "csv";
};

void emit(const Shared& shared, const std::string& text) {
  if (shared.out.empty() || shared.out == "-")
    std::cout << text;
  else
    write_text_file(shared.out, text);
}

NetworkKind parse_kind(const std::string& s) { return network_kind_from_string(s); }

struct GenArgs {
  std::string lattice = "1x2";
  int d = 2;
  int bond = 2;
  std::string kind = "peps";
  int kraus = -1;
};

int cmd_gen(const Shared& shared, const GenArgs& a) {
  GenSpec spec;
  spec.shape = parse_lattice(a.lattice, a.d);
  spec.kind = parse_kind(a.kind);
  spec.bond = a.bond;
  spec.kraus = a.kraus >= 0 ? a.kraus : (spec.kind == NetworkKind::Pepo ? 1 : 0);
  spec.seed = shared.seed;
  emit(shared, generate_state(spec).dump() + "\n");
  return 0;
}

struct MeasureArgs {
  std::string state;
  std::string ensemble = "stabilizer";
  int bases = 1;
  std::uint64_t shots = 1000;
  std::string run_id = "run0";
  std::string sidecar;
  std::string cache_dir;
};

std::string sidecar_path(const std::string& explicit_path, const std::string& csv_path) {
  if (!explicit_path.empty()) return explicit_path;
  if (csv_path.empty() || csv_path == "-") throw RangeError("--sidecar is required when writing to stdout");
  return csv_path + ".json";
}

int cmd_measure(const Shared& shared, const MeasureArgs& a) {
  const TensorNetworkState state = state_from_json(read_json_file(a.state));
  const DenseState rho = ground_truth(state);
  EnsembleSpec ens;
  ens.type = ensemble_type_from_string(a.ensemble);
  ens.bases = ens.type == EnsembleType::haar ? a.bases : 1;
  ens.seed = derive_seed(shared.seed, {0});
  ens.cache_dir = a.cache_dir;
  const MeasurementMap map = build_measurement_map(ens, state.shape().hilbert_dim());
  const std::vector<double> p = apply_map(map, rho);
  const std::uint64_t sampling_seed = derive_seed(shared.seed, {1});
  const std::size_t per_block = map.total_outcomes() / map.num_blocks();
  const auto records = sample_blocks(p, per_block, a.shots, sampling_seed);

  std::ostringstream csv;
  write_shot_records_csv(csv, a.run_id, records);
  json side;
  side["run_id"] = a.run_id;
  side["root_seed"] = shared.seed;
  side["sampling_seed"] = sampling_seed;
  side["ensemble"] = ensemble_spec_to_json(ens);
  side["shots"] = a.shots;
  side["state_path"] = a.state;
  side["shape"] = {{"q", state.shape().rows()}, {"p", state.shape().cols()}, {"d", state.shape().phys_dim()}};
  side["kind"] = to_string(state.kind());
  side["num_blocks"] = map.num_blocks();
  side["outcomes_per_block"] = per_block;
  side["probabilities"] = p;
  write_text_file(sidecar_path(a.sidecar, shared.out), side.dump() + "\n");
  emit(shared, csv.str());
  return 0;
}

struct RecoverArgs {
  std::string shots;
  std::string sidecar;
  std::string kind;
  int bond = 2;
  int restarts = 8;
  int max_iters = 3000;
  bool noiseless = false;
  std::string truth;
  bool project_physical = false;
  std::string trajectories;
  std::string cache_dir;
};

void assert_physical(const DenseState& rho) {
  const CMatrix m = rho.as_operator();
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(m);
  const double tr = m.trace().real();
  if (eig.eigenvalues().minCoeff() < -1e-12 || std::abs(tr - 1.0) > 1e-12 || !is_hermitian(m, 1e-12))
    throw Error("projected estimate is not PSD with unit trace");
}

int cmd_recover(const Shared& shared, const RecoverArgs& a) {
  if (a.shots.empty() && a.sidecar.empty()) throw RangeError("recover needs --shots or --sidecar");
  const json side = read_json_file(a.sidecar.empty() ? a.shots + ".json" : a.sidecar);
  const json& sj = side.at("shape");
  const LatticeShape shape(sj.at("q").get<int>(), sj.at("p").get<int>(), sj.at("d").get<int>());
  EnsembleSpec ens = ensemble_spec_from_json(side.at("ensemble"));
  ens.cache_dir = a.cache_dir;
  const MeasurementMap map = build_measurement_map(ens, shape.hilbert_dim());

  std::vector<double> p_hat;
  if (a.noiseless) {
    p_hat = side.at("probabilities").get<std::vector<double>>();
  } else {
    if (a.shots.empty()) throw RangeError("--shots is required unless --noiseless is set");
    std::ifstream in(a.shots);
    if (!in) throw Error("cannot open " + a.shots);
    const auto records = read_shot_records_csv(in);
    if (records.size() != map.num_blocks()) throw StructuralError("shot CSV block count does not match the ensemble");
    for (const auto& r : records)
      if (r.frequencies.size() != map.total_outcomes() / map.num_blocks())
        throw StructuralError("shot CSV outcome count does not match the ensemble");
    p_hat = stack_empirical(records);
  }

  RecoveryConfig config;
  config.shape = shape;
  const NetworkKind kind = parse_kind(a.kind.empty() ? side.value("kind", "peps") : a.kind);
  config.bonds = BondDims::uniform(shape, kind, a.bond);
  config.restarts = a.restarts;
  config.max_iters = a.max_iters;
  config.init_seed = derive_seed(shared.seed, {2});
  config.project_output = a.project_physical;

  std::optional<DenseState> truth;
  if (!a.truth.empty()) truth = ground_truth(state_from_json(read_json_file(a.truth)));

  try {
    const RecoveryReport report = fit(config, map, p_hat, truth);
    if (a.project_physical) assert_physical(report.estimate);
    if (!a.trajectories.empty()) {
      std::ostringstream t;
      write_trajectories_csv(t, report);
      write_text_file(a.trajectories, t.str());
    }
    json j = recovery_report_to_json(report);
    j["noiseless"] = a.noiseless;
    j["project_physical"] = a.project_physical;
    j["init_seed"] = config.init_seed;
    emit(shared, j.dump() + "\n");
  } catch (const OptimizationFailure& e) {
    json j;
    j["error"] = e.what();
    json traces = json::array();
    for (const auto& t : e.traces()) {
      json tj{{"seed", t.seed}, {"final_loss", t.final_loss}, {"iterations", t.iterations}};
      json traj = json::array();
      for (const auto& it : t.trajectory) traj.push_back({it.loss, it.step});
      tj["trajectory"] = std::move(traj);
      traces.push_back(std::move(tj));
    }
    j["restarts"] = std::move(traces);
    emit(shared, j.dump() + "\n");
    std::cerr << "optimization failed: " << e.what() << "\n";
    return kExitOptimization;
  }
  return 0;
}

struct VerifyArgs {
  int max_qubits = 2;
  std::string cache_dir;
};

int cmd_verify(const Shared& shared, const VerifyArgs& a) {
  const auto reports = run_verify_suite(a.max_qubits, shared.seed, a.cache_dir);
  bool all_pass = true;
  for (const auto& r : reports) all_pass = all_pass && r.pass;
  if (shared.format == "csv") {
    std::string text = "name,deviation,tolerance,pass\n";
    for (const auto& r : reports) text += report_to_csv_line(r) + "\n";
    emit(shared, text);
  } else {
    json j = json::array();
    for (const auto& r : reports) j.push_back(report_to_json(r));
    emit(shared, j.dump(2) + "\n");
  }
  return all_pass ? 0 : kExitIdentity;
}

struct SweepArgs {
  std::string lattice = "1x2";
  int d = 2;
  int bond = 2;
  std::string kind = "peps";
  int kraus = 1;
  std::string ensemble = "stabilizer";
  int bases = 1;
  std::vector<std::uint64_t> shots{1000, 10000, 100000, 1000000};
  int reps = 20;
  int restarts = 4;
  int max_iters = 3000;
  std::string cache_dir;
};

int cmd_sweep(const Shared& shared, const SweepArgs& a) {
  SweepSpec spec;
  spec.shape = parse_lattice(a.lattice, a.d);
  spec.kind = parse_kind(a.kind);
  spec.bond = a.bond;
  spec.kraus = a.kraus;
  spec.ensemble.type = ensemble_type_from_string(a.ensemble);
  spec.ensemble.bases = spec.ensemble.type == EnsembleType::haar ? a.bases : 1;
  spec.ensemble.seed = derive_seed(shared.seed, {3});
  spec.ensemble.cache_dir = a.cache_dir;
  spec.shots_grid = a.shots;
  spec.reps = a.reps;
  spec.restarts = a.restarts;
  spec.max_iters = a.max_iters;
  spec.seed = shared.seed;
  const SweepResult result = run_sweep(spec);
  if (shared.format == "json") {
    json rows = json::array();
    for (const auto& r : result.rows)
      rows.push_back({{"n", r.n}, {"d", r.d}, {"bonds", r.bonds}, {"Q", r.bases}, {"M", r.shots},
                      {"median_error", r.median_error}, {"dof", r.dof}, {"theory_ratio", r.theory_ratio},
                      {"failures", r.failures}, {"errors", r.errors}});
    json j{{"rows", rows}, {"slope", result.slope}, {"theory_slope", -0.5}, {"fitted_c", result.fitted_c}};
    emit(shared, j.dump(2) + "\n");
  } else {
    emit(shared, sweep_to_csv(result));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor-network quantum state tomography toolkit"};
  app.require_subcommand(1);
  Shared shared;
  app.add_option("--seed", shared.seed, "Root seed for every random stream")->capture_default_str();
  app.add_option("--out", shared.out, "Output path (stdout when omitted)");
  app.add_option("--threads", shared.threads, "OpenMP threads (0 keeps the runtime default)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--format", shared.format, "Report format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write a random PEPS/PEPO state file");
  gen_cmd->add_option("--lattice", gen.lattice, "QxP")->capture_default_str();
  gen_cmd->add_option("--d", gen.d, "Local dimension")->capture_default_str();
  gen_cmd->add_option("--bond", gen.bond, "Uniform bond dimension")->capture_default_str();
  gen_cmd->add_option("--kind", gen.kind)->check(CLI::IsMember({"peps", "pepo"}))->capture_default_str();
  gen_cmd->add_option("--kraus", gen.kraus,
                      "PEPO Kraus dimension; > 0 builds a PSD purified PEPO with bonds bond^2 "
                      "(default 1 for pepo), 0 a raw random PEPO");

  MeasureArgs measure;
  auto* measure_cmd = app.add_subcommand("measure", "Sample shot records from a state file");
  measure_cmd->add_option("--state", measure.state)->required();
  measure_cmd->add_option("--ensemble", measure.ensemble)
      ->check(CLI::IsMember({"sic", "stabilizer", "haar"}))
      ->capture_default_str();
  measure_cmd->add_option("--bases", measure.bases, "Number of Haar bases Q")->capture_default_str();
  measure_cmd->add_option("--shots", measure.shots, "Shots M per POVM")->capture_default_str();
  measure_cmd->add_option("--run-id", measure.run_id)->capture_default_str();
  measure_cmd->add_option("--sidecar", measure.sidecar, "Sidecar JSON path (default <out>.json)");
  measure_cmd->add_option("--cache-dir", measure.cache_dir, "Stabilizer ensemble cache directory");

  RecoverArgs recover;
  auto* recover_cmd = app.add_subcommand("recover", "Fit a tensor-network state to measurements");
  recover_cmd->add_option("--shots", recover.shots, "Shot-record CSV");
  recover_cmd->add_option("--sidecar", recover.sidecar, "Sidecar JSON (default <shots>.json)");
  recover_cmd->add_option("--kind", recover.kind, "Model kind (default: the measured state's kind)")
      ->check(CLI::IsMember({"peps", "pepo"}));
  recover_cmd->add_option("--bond", recover.bond, "Model bond dimension")->capture_default_str();
  recover_cmd->add_option("--restarts", recover.restarts)->capture_default_str();
  recover_cmd->add_option("--max-iters", recover.max_iters)->capture_default_str();
  recover_cmd->add_flag("--noiseless", recover.noiseless, "Fit the population probabilities");
  recover_cmd->add_option("--truth", recover.truth, "Ground-truth state file for error metrics");
  recover_cmd->add_flag("--project-physical", recover.project_physical,
                        "Project the estimate onto PSD trace-one matrices");
  recover_cmd->add_option("--trajectories", recover.trajectories, "Loss trajectory CSV path");
  recover_cmd->add_option("--cache-dir", recover.cache_dir, "Stabilizer ensemble cache directory");

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Run the exact-identity checks");
  verify_cmd->add_option("--max-qubits", verify.max_qubits)->check(CLI::Range(1, 4))->capture_default_str();
  verify_cmd->add_option("--cache-dir", verify.cache_dir, "Stabilizer ensemble cache directory");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Shot-noise scaling sweep");
  sweep_cmd->add_option("--lattice", sweep.lattice)->capture_default_str();
  sweep_cmd->add_option("--d", sweep.d)->capture_default_str();
  sweep_cmd->add_option("--bond", sweep.bond)->capture_default_str();
  sweep_cmd->add_option("--kind", sweep.kind)->check(CLI::IsMember({"peps", "pepo"}))->capture_default_str();
  sweep_cmd->add_option("--kraus", sweep.kraus)->capture_default_str();
  sweep_cmd->add_option("--ensemble", sweep.ensemble)
      ->check(CLI::IsMember({"sic", "stabilizer", "haar"}))
      ->capture_default_str();
  sweep_cmd->add_option("--bases", sweep.bases)->capture_default_str();
  sweep_cmd->add_option("--shots", sweep.shots, "M grid")->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--reps", sweep.reps)->capture_default_str();
  sweep_cmd->add_option("--restarts", sweep.restarts)->capture_default_str();
  sweep_cmd->add_option("--max-iters", sweep.max_iters)->capture_default_str();
  sweep_cmd->add_option("--cache-dir", sweep.cache_dir, "Stabilizer ensemble cache directory");

  for (auto* sub : {gen_cmd, measure_cmd, recover_cmd, verify_cmd, sweep_cmd}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }
  if (shared.threads > 0) omp_set_num_threads(shared.threads);

  try {
    if (gen_cmd->parsed()) return cmd_gen(shared, gen);
    if (measure_cmd->parsed()) return cmd_measure(shared, measure);
    if (recover_cmd->parsed()) return cmd_recover(shared, recover);
    if (verify_cmd->parsed()) return cmd_verify(shared, verify);
    if (sweep_cmd->parsed()) return cmd_sweep(shared, sweep);
  } catch (const tnqst::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed input: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}
