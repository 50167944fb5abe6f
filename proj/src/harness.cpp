#include "excmeas/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace excmeas::harness {

using lattice::JordanDomainSpec;

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  auto e = s.find_last_not_of(" \t\r\n");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  }
  auto dot = s.find('.');
  if (dot == std::string::npos) return Rational(std::stoll(s), 1);
  std::string digits = s;
  digits.erase(dot, 1);
  long long den = 1;
  for (std::size_t i = dot; i < digits.size(); ++i) den *= 10;
  return Rational(std::stoll(digits), den);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

ExperimentConfig ExperimentConfig::from_string(const std::string& text) {
  ExperimentConfig cfg;
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("bad config line: " + line);
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  auto has = [&](const std::string& k) { return kv.count(k) != 0; };
  std::string shape = has("shape") ? kv["shape"] : "disk";
  cfg.domain_name = shape;
  if (shape == "disk") {
    cfg.domain = JordanDomainSpec::unit_disk();
  } else if (shape == "square") {
    cfg.domain = JordanDomainSpec::square();
  } else if (shape == "rectangle") {
    double hx = has("rect_half_x") ? std::stod(kv["rect_half_x"]) : 1.0;
    double hy = has("rect_half_y") ? std::stod(kv["rect_half_y"]) : 1.0;
    cfg.domain = JordanDomainSpec::rectangle(hx, hy).normalized();
  } else if (shape == "polygon") {
    if (!has("polygon")) throw ConfigError("polygon shape needs polygon = x,y; ...");
    std::vector<std::pair<Rational, Rational>> verts;
    for (auto& pair_str : split(kv["polygon"], ';')) {
      auto xy = split(pair_str, ',');
      if (xy.size() != 2) throw ConfigError("bad polygon vertex: " + pair_str);
      verts.emplace_back(parse_rational(xy[0]), parse_rational(xy[1]));
    }
    cfg.domain = JordanDomainSpec::polygon(std::move(verts));
  } else if (shape == "radial") {
    double amp = has("radial_amp") ? std::stod(kv["radial_amp"]) : 0.15;
    int k = has("radial_k") ? std::stoi(kv["radial_k"]) : 4;
    cfg.domain = JordanDomainSpec::radial_graph(amp, k);
  } else {
    throw ConfigError("unknown shape: " + shape);
  }

  if (has("N")) {
    cfg.n_values.clear();
    for (auto& t : split(kv["N"], ',')) cfg.n_values.push_back(std::stoi(t));
  }
  auto parse_arc = [&](const std::string& key, harmonic::AngleInterval& arc) {
    if (!has(key)) return;
    auto parts = split(kv[key], ',');
    if (parts.size() != 2) throw ConfigError(key + " needs two angles");
    arc.lo = std::stod(parts[0]);
    arc.hi = std::stod(parts[1]);
    if (!(arc.lo < arc.hi && arc.hi < arc.lo + kTwoPi))
      throw ConfigError(key + ": need lo < hi < lo + 2 pi");
  };
  parse_arc("arc1", cfg.arc1);
  parse_arc("arc2", cfg.arc2);
  if (has("seed")) {
    cfg.seed = std::stoull(kv["seed"]);
    cfg.seed_set = true;
  }
  if (has("samples")) cfg.samples = std::stoull(kv["samples"]);
  if (has("path_samples")) cfg.path_samples = std::stoull(kv["path_samples"]);
  if (has("threads")) cfg.threads = std::stoi(kv["threads"]);
  if (has("eps")) cfg.eps_excursion = std::stod(kv["eps"]);
  if (has("out")) cfg.out_dir = kv["out"];
  cfg.validate();
  return cfg;
}

void ExperimentConfig::validate() const {
  if (n_values.empty()) throw ConfigError("config: empty N list");
  for (std::size_t i = 1; i < n_values.size(); ++i)
    if (n_values[i] <= n_values[i - 1])
      throw ConfigError("config: N list must be strictly increasing");
  if (!seed_set) throw ConfigError("config: explicit seed required");
  auto geo = harmonic::sep_spr(arc1, arc2);
  if (!(geo.sep > 0.0)) throw ConfigError("config: arcs must have disjoint closures");
  double thr = arcs::admissibility_threshold(n_values.back());
  if (geo.sep < thr)
    throw ConfigError("config: arc separation " + std::to_string(geo.sep) +
                      " below admissibility threshold " + std::to_string(thr));
  if (!(eps_excursion > 0.0 && eps_excursion <= 0.1))
    throw ConfigError("config: eps must be in (0, 0.1]");
  if (threads < 1 || threads > 64) throw ConfigError("config: threads in [1, 64]");
}

bool RunReport::all_pass() const {
  for (auto& c : criteria)
    if (!c.pass) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Workspace.
// ---------------------------------------------------------------------------

Workspace::Workspace(ExperimentConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.domain.shape() == JordanDomainSpec::Shape::Disk)
    exact_map_ = std::make_shared<harmonic::IdentityMap>();
  else if (cfg_.domain.shape() == JordanDomainSpec::Shape::Square)
    exact_map_ = std::make_shared<harmonic::DiskToSquareMap>();
}

const lattice::LatticeDomain& Workspace::domain_at(int N) {
  auto it = domains_.find(N);
  if (it == domains_.end())
    it = domains_.emplace(N, lattice::discretize(cfg_.domain, N)).first;
  return it->second;
}

const lattice::UnionOfSquaresRegion& Workspace::uos_at(int N) {
  auto it = uos_.find(N);
  if (it == uos_.end())
    it = uos_.emplace(N, lattice::union_of_squares(domain_at(N))).first;
  return it->second;
}

const harmonic::GridMap& Workspace::map_at(int N) {
  auto it = maps_.find(N);
  if (it == maps_.end())
    it = maps_.emplace(N, std::make_shared<harmonic::GridMap>(uos_at(N))).first;
  return *it->second;
}

const walk::KilledWalkSolver& Workspace::solver_at(int N) {
  auto it = solvers_.find(N);
  if (it == solvers_.end())
    it = solvers_.emplace(N, std::make_shared<walk::KilledWalkSolver>(domain_at(N))).first;
  return *it->second;
}

const arcs::ArcPair& Workspace::arcs_at(int N) {
  auto it = arcs_.find(N);
  if (it == arcs_.end())
    it = arcs_.emplace(N, arcs::associate_arcs(domain_at(N), map_at(N), N,
                                               cfg_.arc1, cfg_.arc2))
             .first;
  return it->second;
}

// ---------------------------------------------------------------------------
// Shared helpers.
// ---------------------------------------------------------------------------

namespace {

std::vector<double> quarter_neighbor_weights(const lattice::LatticeDomain& A,
                                             const std::vector<PointI>& S) {
  std::vector<double> c(A.size(), 0.0);
  for (auto x : S)
    for (auto d : kNeighbors4) {
      int i = A.index_of(x + d);
      if (i >= 0) c[static_cast<std::size_t>(i)] += 0.25;
    }
  return c;
}

}  // namespace

double excursion_mass_fast(const walk::KilledWalkSolver& solver,
                           const std::vector<PointI>& gamma,
                           const std::vector<PointI>& upsilon) {
  const auto& A = solver.domain();
  auto cg = quarter_neighbor_weights(A, gamma);
  auto v = solver.solve(cg);
  auto cu = quarter_neighbor_weights(A, upsilon);
  double mass = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) mass += v[i] * cu[i];
  return mass;
}

std::vector<double> endpoint_law(const walk::KilledWalkSolver& solver,
                                 const std::vector<PointI>& gamma,
                                 const std::vector<PointI>& upsilon) {
  const auto& A = solver.domain();
  auto v = solver.solve(quarter_neighbor_weights(A, gamma));
  std::vector<double> law(upsilon.size(), 0.0);
  for (std::size_t j = 0; j < upsilon.size(); ++j)
    for (auto d : kNeighbors4) {
      int i = A.index_of(upsilon[j] + d);
      if (i >= 0) law[j] += 0.25 * v[static_cast<std::size_t>(i)];
    }
  return law;
}

double chi_square_p(const std::vector<double>& observed,
                    const std::vector<double>& expected_weights) {
  if (observed.size() != expected_weights.size() || observed.empty())
    throw std::invalid_argument("chi_square_p: size mismatch");
  double total_obs = 0.0, total_w = 0.0;
  for (double o : observed) total_obs += o;
  for (double w : expected_weights) total_w += w;
  if (!(total_obs > 0.0 && total_w > 0.0))
    throw std::invalid_argument("chi_square_p: empty data");
  // Pool adjacent bins until every expected count is at least 5.
  std::vector<double> obs, exp;
  double o_acc = 0.0, e_acc = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o_acc += observed[i];
    e_acc += expected_weights[i] / total_w * total_obs;
    if (e_acc >= 5.0) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (e_acc > 0.0) {
    if (exp.empty()) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
    } else {
      obs.back() += o_acc;
      exp.back() += e_acc;
    }
  }
  if (obs.size() < 2) return 1.0;
  double chi2 = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    double d = obs[i] - exp[i];
    chi2 += d * d / exp[i];
  }
  return chi_square_tail(chi2, static_cast<double>(obs.size() - 1));
}

void parallel_samples(std::size_t n, int threads,
                      const std::function<void(std::size_t)>& body) {
  threads = std::max(1, threads);
  if (threads == 1 || n < 64) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t]() {
      for (std::size_t i = static_cast<std::size_t>(t); i < n;
           i += static_cast<std::size_t>(threads))
        body(i);
    });
  for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// Reports.
// ---------------------------------------------------------------------------

std::string write_reports(const std::vector<RunReport>& reports,
                          const ExperimentConfig& cfg, double wall_seconds,
                          const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  nlohmann::json summary;
  summary["version"] = "1.0.0";
  summary["seed"] = cfg.seed;
  summary["domain"] = cfg.domain_name;
  summary["samples"] = cfg.samples;
  // Wall time is informational; the data files are byte-reproducible for a
  // fixed config and seed.
  summary["wall_seconds"] = wall_seconds;
  bool all = true;
  nlohmann::json arr = nlohmann::json::array();
  for (auto& rep : reports) {
    for (std::size_t i = 0; i < rep.csv_names.size(); ++i) {
      std::ofstream out(fs::path(out_dir) / rep.csv_names[i]);
      out << rep.csv_bodies[i];
    }
    for (auto& c : rep.criteria) {
      nlohmann::json j;
      j["id"] = c.id;
      j["claim"] = c.claim;
      j["pass"] = c.pass;
      j["value"] = c.value;
      j["threshold"] = c.threshold;
      if (!c.detail.empty()) j["detail"] = c.detail;
      arr.push_back(j);
      all = all && c.pass;
    }
  }
  summary["criteria"] = arr;
  summary["pass"] = all;
  std::string text = summary.dump(2);
  std::ofstream out(fs::path(out_dir) / "summary.json");
  out << text << "\n";
  return text;
}

void write_curves_binary(const std::string& path,
                         const std::vector<curves::Curve>& ensemble) {
  std::ofstream out(path, std::ios::binary);
  const char magic[8] = {'E', 'X', 'C', 'M', 'C', 'R', 'V', '1'};
  out.write(magic, 8);
  std::uint64_t n = ensemble.size();
  out.write(reinterpret_cast<const char*>(&n), 8);
  for (auto& c : ensemble) {
    std::uint64_t k = c.breakpoints();
    double dur = c.duration();
    out.write(reinterpret_cast<const char*>(&k), 8);
    out.write(reinterpret_cast<const char*>(&dur), 8);
    for (std::size_t i = 0; i < c.breakpoints(); ++i) {
      double row[3] = {c.times()[i], c.points()[i].real(), c.points()[i].imag()};
      out.write(reinterpret_cast<const char*>(row), 24);
    }
  }
}

std::vector<curves::Curve> read_curves_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (std::memcmp(magic, "EXCMCRV1", 8) != 0)
    throw std::runtime_error("bad curve file magic");
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), 8);
  std::vector<curves::Curve> out;
  out.reserve(n);
  for (std::uint64_t c = 0; c < n; ++c) {
    std::uint64_t k = 0;
    double dur = 0.0;
    in.read(reinterpret_cast<char*>(&k), 8);
    in.read(reinterpret_cast<char*>(&dur), 8);
    std::vector<double> t(k);
    std::vector<Cpx> p(k);
    for (std::uint64_t i = 0; i < k; ++i) {
      double row[3];
      in.read(reinterpret_cast<char*>(row), 24);
      t[i] = row[0];
      p[i] = Cpx(row[1], row[2]);
    }
    out.emplace_back(std::move(t), std::move(p));
  }
  return out;
}

}  // namespace excmeas::harness
