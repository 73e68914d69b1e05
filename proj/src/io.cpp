#include "tnqst/io.hpp"

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "tnqst/errors.hpp"

namespace tnqst {

namespace {

json split_complex(const std::vector<cplx>& values) {
  std::vector<double> re(values.size()), im(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    re[i] = values[i].real();
    im[i] = values[i].imag();
  }
  return json{{"re", re}, {"im", im}};
}

std::vector<cplx> join_complex(const json& re_j, const json& im_j) {
  const auto re = re_j.get<std::vector<double>>();
  const auto im = im_j.get<std::vector<double>>();
  if (re.size() != im.size()) throw StructuralError("re and im arrays differ in length");
  std::vector<cplx> out(re.size());
  for (std::size_t i = 0; i < re.size(); ++i) out[i] = {re[i], im[i]};
  return out;
}

template <typename T>
T require(const json& j, const char* key) {
  if (!j.contains(key)) throw StructuralError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw StructuralError(std::string("bad field '") + key + "': " + e.what());
  }
}

}  // namespace

json state_to_json(const TensorNetworkState& state) {
  const auto& shape = state.shape();
  json sites = json::array();
  for (const auto& s : state.sites()) {
    json site = split_complex(s.data());
    site["a"] = s.row() + 1;
    site["b"] = s.col() + 1;
    site["dims"] = s.dims();
    sites.push_back(std::move(site));
  }
  json j;
  j["shape"] = {{"q", shape.rows()}, {"p", shape.cols()}, {"d", shape.phys_dim()}};
  j["kind"] = to_string(state.kind());
  j["bonds"] = state.bonds().entries();
  j["sites"] = std::move(sites);
  return j;
}

TensorNetworkState state_from_json(const json& j) {
  if (!j.is_object()) throw StructuralError("state file must be a JSON object");
  if (!j.contains("shape")) throw StructuralError("missing field 'shape'");
  const json& sj = j.at("shape");
  const LatticeShape shape(require<int>(sj, "q"), require<int>(sj, "p"), require<int>(sj, "d"));
  const NetworkKind kind = network_kind_from_string(require<std::string>(j, "kind"));
  const BondDims bonds(shape, kind, require<std::vector<int>>(j, "bonds"));
  if (!j.contains("sites") || !j.at("sites").is_array())
    throw StructuralError("missing array 'sites'");
  const json& sites_j = j.at("sites");
  if (static_cast<int>(sites_j.size()) != shape.num_sites())
    throw StructuralError("site count does not match the lattice");
  std::vector<std::optional<SiteTensor>> slots(static_cast<std::size_t>(shape.num_sites()));
  for (const json& s : sites_j) {
    const int a = require<int>(s, "a") - 1;
    const int b = require<int>(s, "b") - 1;
    if (a < 0 || a >= shape.rows() || b < 0 || b >= shape.cols())
      throw StructuralError("site index out of range");
    const auto& slot = slots[shape.site_number(a, b)];
    if (slot) throw StructuralError("duplicate site");
    const auto expected = bonds.site_bonds(a, b);
    SiteTensor tensor(a, b, kind, shape.phys_dim(), expected, join_complex(s.at("re"), s.at("im")));
    if (require<std::vector<int>>(s, "dims") != tensor.dims())
      throw StructuralError("site dims do not match the bond matrix");
    slots[shape.site_number(a, b)] = std::move(tensor);
  }
  std::vector<SiteTensor> sites;
  for (auto& s : slots) sites.push_back(std::move(*s));
  return TensorNetworkState(shape, bonds, std::move(sites));
}

json ensemble_to_json(const DesignEnsemble& design) {
  std::vector<cplx> flat(design.vectors.data(), design.vectors.data() + design.vectors.size());
  json j;
  j["dim"] = design.dim();
  j["declared_t"] = design.declared_t;
  j["K"] = design.size();
  j["vectors"] = split_complex(flat);
  return j;
}

DesignEnsemble ensemble_from_json(const json& j) {
  const auto dim = require<std::size_t>(j, "dim");
  const auto k = require<std::size_t>(j, "K");
  if (!j.contains("vectors")) throw StructuralError("missing field 'vectors'");
  const auto flat = join_complex(j.at("vectors").at("re"), j.at("vectors").at("im"));
  if (flat.size() != dim * k) throw StructuralError("vector array has the wrong length");
  DesignEnsemble design;
  design.declared_t = require<int>(j, "declared_t");
  design.vectors = Eigen::Map<const CMatrix>(flat.data(), static_cast<Eigen::Index>(dim),
                                             static_cast<Eigen::Index>(k));
  return design;
}

DesignEnsemble cached_stabilizer_design(int n_qubits, const std::string& cache_dir) {
  if (cache_dir.empty()) return stabilizer_design(n_qubits);
  namespace fs = std::filesystem;
  const fs::path path = fs::path(cache_dir) / ("stabilizer_" + std::to_string(n_qubits) + ".json");
  if (fs::exists(path)) {
    DesignEnsemble cached = ensemble_from_json(read_json_file(path.string()));
    if (cached.size() == stabilizer_count(n_qubits) && cached.dim() == (std::size_t{1} << n_qubits))
      return cached;
  }
  DesignEnsemble design = stabilizer_design(n_qubits);
  fs::create_directories(cache_dir);
  write_text_file(path.string(), ensemble_to_json(design).dump());
  return design;
}

json report_to_json(const IdentityReport& report) {
  json j;
  j["name"] = report.name;
  j["deviation"] = report.deviation;
  j["tolerance"] = report.tolerance;
  j["pass"] = report.pass;
  j["expect_violation"] = report.expect_violation;
  j["metadata"] = report.metadata;
  return j;
}

std::string report_to_csv_line(const IdentityReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << report.name << ',' << report.deviation << ',' << report.tolerance << ','
      << (report.pass ? "pass" : "fail");
  return out.str();
}

json recovery_report_to_json(const RecoveryReport& report) {
  json j;
  j["best_loss"] = report.best_loss;
  j["best_restart"] = report.best_restart;
  j["trace_weight"] = report.trace_weight;
  json restarts = json::array();
  for (const auto& r : report.restarts) {
    json t;
    t["seed"] = r.seed;
    t["final_loss"] = r.final_loss;
    t["iterations"] = r.iterations;
    t["diverged"] = r.diverged;
    json traj = json::array();
    for (const auto& it : r.trajectory) traj.push_back({it.loss, it.step});
    t["trajectory"] = std::move(traj);
    restarts.push_back(std::move(t));
  }
  j["restarts"] = std::move(restarts);
  const CMatrix rho = report.estimate.as_operator();
  std::vector<cplx> flat(rho.data(), rho.data() + rho.size());
  j["estimate"] = split_complex(flat);
  j["estimate"]["dim"] = report.estimate.dim();
  j["estimate"]["order"] = "column-major";
  j["estimate_trace"] = rho.trace().real();
  j["frob_error"] = report.frob_error ? json(*report.frob_error) : json(nullptr);
  j["trace_error"] = report.trace_error ? json(*report.trace_error) : json(nullptr);
  if (report.final_state) j["final_state"] = state_to_json(*report.final_state);
  return j;
}

void write_trajectories_csv(std::ostream& out, const RecoveryReport& report) {
  out.precision(17);
  out << "restart,iter,loss,step\n";
  for (std::size_t r = 0; r < report.restarts.size(); ++r) {
    const auto& traj = report.restarts[r].trajectory;
    for (std::size_t i = 0; i < traj.size(); ++i)
      out << r << ',' << i << ',' << traj[i].loss << ',' << traj[i].step << '\n';
  }
}

void write_shot_records_csv(std::ostream& out, const std::string& run_id,
                            const std::vector<ShotRecord>& records) {
  out << "run_id,q,M,k,f_k\n";
  for (const auto& rec : records)
    for (std::size_t k = 0; k < rec.frequencies.size(); ++k)
      out << run_id << ',' << rec.ensemble_index << ',' << rec.shots << ',' << k << ','
          << rec.frequencies[k] << '\n';
}

std::vector<ShotRecord> read_shot_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "run_id,q,M,k,f_k")
    throw StructuralError("shot CSV must start with header run_id,q,M,k,f_k");
  std::vector<ShotRecord> records;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string run_id, q, m, k, f;
    if (!std::getline(fields, run_id, ',') || !std::getline(fields, q, ',') ||
        !std::getline(fields, m, ',') || !std::getline(fields, k, ',') || !std::getline(fields, f))
      throw StructuralError("malformed shot CSV row " + std::to_string(row));
    try {
      const std::size_t qi = std::stoull(q);
      const std::size_t ki = std::stoull(k);
      if (records.empty() || records.back().ensemble_index != qi) {
        if (qi != records.size()) throw StructuralError("blocks must appear in order");
        records.push_back(ShotRecord{qi, {}, std::stoull(m)});
      }
      auto& rec = records.back();
      if (ki != rec.frequencies.size()) throw StructuralError("outcomes must appear in order");
      if (std::stoull(m) != rec.shots) throw StructuralError("M differs within a block");
      rec.frequencies.push_back(std::stoull(f));
    } catch (const std::logic_error&) {
      throw StructuralError("non-numeric field in shot CSV row " + std::to_string(row));
    }
  }
  return records;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw StructuralError(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << contents;
  if (!out) throw Error("write failed: " + path);
}

}  // namespace tnqst
