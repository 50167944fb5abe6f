#ifndef EXCMEAS_HARNESS_HPP
#define EXCMEAS_HARNESS_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "excmeas/arcs.hpp"
#include "excmeas/curves.hpp"
#include "excmeas/harmonic.hpp"
#include "excmeas/lattice.hpp"
#include "excmeas/measures.hpp"
#include "excmeas/walk.hpp"

namespace excmeas::harness {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  lattice::JordanDomainSpec domain = lattice::JordanDomainSpec::unit_disk();
  std::string domain_name = "disk";
  std::vector<int> n_values{8, 16, 32, 64};
  harmonic::AngleInterval arc1{0.0, kPi / 2};
  harmonic::AngleInterval arc2{kPi, 3 * kPi / 2};
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t samples = 100000;
  std::size_t path_samples = 3000;
  int threads = 2;
  double eps_excursion = 1e-2;
  std::string out_dir = "out";

  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig from_string(const std::string& text);
  void validate() const;
};

// One acceptance line: an identifier, the semantic claim it checks, the
// measured value and its threshold.
struct Criterion {
  std::string id;
  std::string claim;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct RunReport {
  std::vector<std::string> csv_names;
  std::vector<std::string> csv_bodies;
  std::vector<Criterion> criteria;
  bool all_pass() const;
};

// Shared per-config caches (domains, maps, kernel solvers).
class Workspace {
 public:
  explicit Workspace(ExperimentConfig cfg);
  const ExperimentConfig& config() const { return cfg_; }

  const lattice::LatticeDomain& domain_at(int N);
  const lattice::UnionOfSquaresRegion& uos_at(int N);
  const harmonic::GridMap& map_at(int N);
  const walk::KilledWalkSolver& solver_at(int N);
  const arcs::ArcPair& arcs_at(int N);
  // Exact map disk -> D for disk and square shapes; null otherwise.
  const harmonic::ConformalMap* exact_map() const { return exact_map_.get(); }

 private:
  ExperimentConfig cfg_;
  std::map<int, lattice::LatticeDomain> domains_;
  std::map<int, lattice::UnionOfSquaresRegion> uos_;
  std::map<int, std::shared_ptr<harmonic::GridMap>> maps_;
  std::map<int, std::shared_ptr<walk::KilledWalkSolver>> solvers_;
  std::map<int, arcs::ArcPair> arcs_;
  std::shared_ptr<harmonic::ConformalMap> exact_map_;
};

RunReport run_mass_convergence(Workspace& ws);
RunReport run_pointwise_epk(Workspace& ws);
RunReport run_interior_kernel_checks(Workspace& ws);
RunReport run_path_convergence(Workspace& ws);
RunReport run_cara(Workspace& ws);

// Excursion mass h_bd(Gamma, Upsilon) with one factorized solve.
double excursion_mass_fast(const walk::KilledWalkSolver& solver,
                           const std::vector<PointI>& gamma,
                           const std::vector<PointI>& upsilon);

// Endpoint law of (Gamma, Upsilon)-excursions restricted to Upsilon
// (unnormalized), one solve.
std::vector<double> endpoint_law(const walk::KilledWalkSolver& solver,
                                 const std::vector<PointI>& gamma,
                                 const std::vector<PointI>& upsilon);

// Chi-square p-value of observed counts against expected weights
// (bins with small expectation are pooled).
double chi_square_p(const std::vector<double>& observed,
                    const std::vector<double>& expected_weights);

// Deterministic parallel map over sample indices (shard by index).
void parallel_samples(std::size_t n, int threads,
                      const std::function<void(std::size_t)>& body);

// Serialize a report and write files under out_dir (CSV per experiment plus
// summary.json). Returns the summary JSON text.
std::string write_reports(const std::vector<RunReport>& reports,
                          const ExperimentConfig& cfg, double wall_seconds,
                          const std::string& out_dir);

// Columnar curve ensemble format (little-endian doubles).
void write_curves_binary(const std::string& path,
                         const std::vector<curves::Curve>& ensemble);
std::vector<curves::Curve> read_curves_binary(const std::string& path);

}  // namespace excmeas::harness

#endif
