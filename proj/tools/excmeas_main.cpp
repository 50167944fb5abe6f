#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "excmeas/harness.hpp"
#include "excmeas/walk.hpp"

namespace {

using namespace excmeas;

harness::ExperimentConfig load_config(const std::string& path,
                                      std::uint64_t* seed, std::size_t* samples,
                                      int* threads, std::string* out) {
  auto cfg = path.empty()
                 ? harness::ExperimentConfig::from_string("seed = 1")
                 : harness::ExperimentConfig::from_file(path);
  if (seed) { cfg.seed = *seed; cfg.seed_set = true; }
  if (samples && *samples) cfg.samples = *samples;
  if (threads && *threads) cfg.threads = *threads;
  if (out && !out->empty()) cfg.out_dir = *out;
  cfg.validate();
  return cfg;
}

void run_discretize(harness::Workspace& ws) {
  namespace fs = std::filesystem;
  const auto& cfg = ws.config();
  fs::create_directories(cfg.out_dir);
  for (int N : cfg.n_values) {
    const auto& A = ws.domain_at(N);
    std::ofstream grid(fs::path(cfg.out_dir) /
                       ("domain_" + cfg.domain_name + "_N" + std::to_string(N) + ".txt"));
    grid << lattice::to_text_grid(A);
    std::ofstream pts(fs::path(cfg.out_dir) /
                      ("domain_" + cfg.domain_name + "_N" + std::to_string(N) + ".json"));
    pts << lattice::to_json_points(A) << "\n";
    std::cout << "N=" << N << "  cells=" << A.size()
              << "  boundary=" << A.boundaries().outer.size() << "\n";
  }
}

void run_kernels(harness::Workspace& ws) {
  namespace fs = std::filesystem;
  const auto& cfg = ws.config();
  fs::create_directories(cfg.out_dir);
  // Potential kernel table.
  walk::PotentialKernelTable pk(16);
  {
    std::ofstream out(fs::path(cfg.out_dir) / "potential_kernel.csv");
    out << "x,y,a\n";
    for (int y = -16; y <= 16; ++y)
      for (int x = -16; x <= 16; ++x)
        if (x * x + y * y <= 256) {
          out.precision(12);
          out << x << ',' << y << ',' << pk.a({x, y}) << "\n";
        }
  }
  // Boundary kernels at the smallest configured scale.
  int N = cfg.n_values.front();
  const auto& A = ws.domain_at(N);
  auto ks = walk::compute_kernels(A, nullptr, static_cast<double>(N));
  const auto& bd = A.boundaries().outer;
  std::ofstream out(fs::path(cfg.out_dir) /
                    ("excursion_kernel_N" + std::to_string(N) + ".csv"));
  out << "x1,y1,x2,y2,h_bd\n";
  out.precision(12);
  for (std::size_t i = 0; i < bd.size(); ++i)
    for (std::size_t j = 0; j < bd.size(); ++j)
      out << bd[i].x << ',' << bd[i].y << ',' << bd[j].x << ',' << bd[j].y << ','
          << ks.hbd_at(static_cast<int>(i), static_cast<int>(j)) << "\n";
  std::cout << "kernel tables written to " << cfg.out_dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-walk and Brownian excursion-measure toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::size_t samples = 0;
  int threads = 0;
  app.add_option("--config", config_path, "key = value experiment config");
  app.add_option("--out", out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides config)");
  app.add_option("--samples", samples, "Monte Carlo sample budget");
  app.add_option("--threads", threads, "worker threads");

  auto* sub_disc = app.add_subcommand("discretize", "export lattice approximations");
  auto* sub_kern = app.add_subcommand("kernels", "export kernel tables");
  auto* sub_mass = app.add_subcommand("mass-conv", "arc mass convergence");
  auto* sub_epk = app.add_subcommand("epk-pointwise", "pointwise kernel identity");
  auto* sub_int = app.add_subcommand("interior-checks", "interior kernel checks");
  auto* sub_path = app.add_subcommand("path-conv", "path-level convergence");
  auto* sub_cara = app.add_subcommand("cara", "domain convergence report");
  auto* sub_all = app.add_subcommand("all", "run every experiment");

  CLI11_PARSE(app, argc, argv);
  seed_given = seed_opt->count() > 0;

  try {
    auto cfg = load_config(config_path, seed_given ? &seed : nullptr,
                           samples ? &samples : nullptr,
                           threads ? &threads : nullptr,
                           out_dir.empty() ? nullptr : &out_dir);
    harness::Workspace ws(cfg);
    auto t0 = std::chrono::steady_clock::now();
    std::vector<harness::RunReport> reports;

    if (sub_disc->parsed()) {
      run_discretize(ws);
      return 0;
    }
    if (sub_kern->parsed()) {
      run_kernels(ws);
      return 0;
    }
    if (sub_mass->parsed() || sub_all->parsed())
      reports.push_back(harness::run_mass_convergence(ws));
    if (sub_epk->parsed() || sub_all->parsed())
      reports.push_back(harness::run_pointwise_epk(ws));
    if (sub_int->parsed() || sub_all->parsed())
      reports.push_back(harness::run_interior_kernel_checks(ws));
    if (sub_cara->parsed() || sub_all->parsed())
      reports.push_back(harness::run_cara(ws));
    if (sub_path->parsed() || sub_all->parsed())
      reports.push_back(harness::run_path_convergence(ws));

    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string summary = harness::write_reports(reports, cfg, wall, cfg.out_dir);
    bool pass = true;
    for (auto& rep : reports)
      for (auto& c : rep.criteria) {
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.id << "  value="
                  << c.value << "  threshold=" << c.threshold << "\n";
        pass = pass && c.pass;
      }
    std::cout << "reports written to " << cfg.out_dir << "\n";
    return pass ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
