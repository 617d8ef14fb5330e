// Acceptance suite: every criterion prints one PASS/FAIL line; the process
// exits nonzero when any of them fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "misnc/experiment.hpp"
#include "misnc/instance.hpp"
#include "misnc/lp.hpp"
#include "misnc/mincost.hpp"
#include "misnc/offline.hpp"
#include "misnc/online.hpp"
#include "support/oracles.hpp"

using namespace misnc;

namespace {

int failures = 0;

void report(const std::string& name, bool passed, const std::string& detail = "") {
  if (passed) {
    std::printf("PASS  %s\n", name.c_str());
  } else {
    ++failures;
    std::printf("FAIL  %s%s%s\n", name.c_str(), detail.empty() ? "" : " — ", detail.c_str());
  }
  std::fflush(stdout);
}

template <typename Fn>
void guarded(const std::string& name, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    report(name, false, std::string("threw: ") + e.what());
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct SweepRun {
  double epsilon = 0.0;
  OfflineSolution solution;
  OfflineCertificates certificates;
  double wall_seconds = 0.0;
};

void criterion_butterfly_offline_optimum() {
  auto t0 = std::chrono::steady_clock::now();
  auto [net, requests] = build_extended_butterfly(150.0);
  double lambda_lp = concurrent_lp_optimum(net, requests);
  double elapsed = seconds_since(t0);
  bool ok = std::abs(lambda_lp - 1.0) <= 1e-6 && elapsed < 5.0;
  report("butterfly-offline-optimum", ok,
         "lambda_lp=" + std::to_string(lambda_lp) + " in " + std::to_string(elapsed) + "s");
}

std::vector<SweepRun> criterion_fptas_guarantee() {
  auto [net, requests] = build_extended_butterfly(150.0);
  const std::vector<double> epsilons = {0.4, 0.2, 0.1, 0.05, 0.01};
  std::vector<SweepRun> runs;

  auto sweep_start = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  for (double eps : epsilons) {
    SweepRun run;
    run.epsilon = eps;
    FptasParams params = params_from_epsilon(eps, net.link_count());
    FptasOptions options;
    options.record_trace = false;
    auto t0 = std::chrono::steady_clock::now();
    run.solution = run_fptas(net, requests, params, options);
    run.wall_seconds = seconds_since(t0);
    run.certificates = verify_offline_certificates(run.solution, net, requests, params);

    double lo = std::pow(1.0 - eps, 3.0);
    if (!(run.solution.lambda >= lo - 1e-9 && run.solution.lambda <= 1.0 + 1e-6)) {
      ok = false;
      detail = "eps=" + std::to_string(eps) + ": lambda=" + std::to_string(run.solution.lambda) +
               " outside [" + std::to_string(lo) + ", 1]";
    }
    for (int e = 0; e < net.link_count(); ++e)
      if (run.solution.link_load[static_cast<size_t>(e)] > net.link(e).capacity + 1e-6) {
        ok = false;
        detail = "eps=" + std::to_string(eps) + ": scaled load above capacity";
      }
    if (!run.certificates.scaling_bound.passed) {
      ok = false;
      detail = "eps=" + std::to_string(eps) + ": " + run.certificates.scaling_bound.detail;
    }
    runs.push_back(std::move(run));
  }
  for (size_t i = 1; i < runs.size(); ++i)
    if (runs[i].solution.lambda < runs[i - 1].solution.lambda - 0.02) {
      ok = false;
      detail = "lambda not nondecreasing as epsilon shrinks";
    }
  double sweep_seconds = seconds_since(sweep_start);
  if (sweep_seconds >= 120.0) {
    ok = false;
    detail = "sweep took " + std::to_string(sweep_seconds) + "s";
  }
  report("fptas-guarantee", ok, detail.empty() ? std::to_string(sweep_seconds) + "s" : detail);
  return runs;
}

void criterion_fptas_runtime_note(const std::vector<SweepRun>& runs) {
  double t04 = 0.0, t005 = 0.0, t01 = 0.0;
  for (const auto& run : runs) {
    if (run.epsilon == 0.4) t04 = run.wall_seconds;
    if (run.epsilon == 0.05) t005 = run.wall_seconds;
    if (run.epsilon == 0.1) t01 = run.wall_seconds;
  }
  bool ok = t01 > 0.0 && t005 / t01 > t04 / t01;
  report("fptas-runtime-trend", ok,
         "normalized t(0.05)=" + std::to_string(t005 / t01) + " vs t(0.4)=" + std::to_string(t04 / t01));
}

void criterion_online_phi1() {
  auto t0 = std::chrono::steady_clock::now();
  auto [net, requests] = build_extended_butterfly(1.5);
  auto trace = generate_online_trace(1, 100, 1.5);
  OnlineConfig cfg;
  cfg.phi = 1.0;
  OnlineRouter router(net, cfg);
  for (const auto& r : trace) router.process(r);
  auto m = router.metrics();
  double elapsed = seconds_since(t0);

  bool ok = m.acceptance_ratio == 1.0 && m.violation_ratio >= 1.05 && m.violation_ratio <= 1.35 &&
            m.bottleneck_link >= 0 && net.link(m.bottleneck_link).id == "e10" && elapsed < 30.0;
  report("online-phi1", ok,
         "acceptance=" + std::to_string(m.acceptance_ratio) +
             " violation=" + std::to_string(m.violation_ratio) + " bottleneck=" +
             (m.bottleneck_link >= 0 ? net.link(m.bottleneck_link).id : "none") + " in " +
             std::to_string(elapsed) + "s");
}

void criterion_online_phi4() {
  auto [net, requests] = build_extended_butterfly(1.5);
  auto trace = generate_online_trace(1, 100, 1.5);
  OnlineConfig cfg;
  cfg.phi = 4.0;
  OnlineRouter router(net, cfg);
  for (const auto& r : trace) router.process(r);
  auto m = router.metrics();
  bool ok = m.acceptance_ratio >= 0.70 && m.acceptance_ratio <= 0.90 && m.violation_ratio <= 1.05;
  report("online-phi4", ok,
         "acceptance=" + std::to_string(m.acceptance_ratio) +
             " violation=" + std::to_string(m.violation_ratio));
}

void criterion_online_certificates() {
  auto [net, requests] = build_extended_butterfly(1.5);
  auto trace = generate_online_trace(1, 100, 1.5);
  bool ok = true;
  std::string detail;
  for (double phi : {1.0, 2.0, 4.0, 8.0}) {
    for (auto variant : {KernelVariant::kExact, KernelVariant::kShifted}) {
      OnlineConfig cfg;
      cfg.phi = phi;
      cfg.variant = variant;
      OnlineRouter router(net, cfg);
      for (const auto& r : trace) router.process(r);
      auto certs = verify_online_certificates(router);
      for (const auto* check :
           {&certs.dual_feasibility, &certs.ratio_bound, &certs.price_bound,
            &certs.utilization_bound, &certs.monotonicity}) {
        if (!check->passed) {
          ok = false;
          detail = "phi=" + std::to_string(phi) + " " + to_string(variant) + ": " + check->name +
                   " " + check->detail;
        }
      }
    }
  }
  report("theorem34-certificates", ok, detail);
}

void criterion_mincost_oracle() {
  auto [net, requests] = build_extended_butterfly(150.0);
  PriceSystem unit = PriceSystem::uniform(net, 1.0);
  auto res = mincost_exact(net, requests[0], unit);
  auto lp_sol = lp::solve_lp(build_mincost_lp(net, requests[0], unit));

  bool ok = std::abs(res.cost - 13.0 / 3.0) <= 1e-7 &&
            lp_sol.status == lp::Status::kOptimal &&
            std::abs(res.cost - lp_sol.objective) <= 1e-7;
  std::string detail = "L=" + std::to_string(res.cost);

  std::mt19937_64 rng(1234);
  for (int round = 0; round < 50 && ok; ++round) {
    auto inst = testing::random_feasible_instance(rng, 8, 1);
    auto kernel = mincost_exact(inst.net, inst.request, inst.prices);
    std::vector<double> caps(static_cast<size_t>(inst.net.link_count()));
    for (int e = 0; e < inst.net.link_count(); ++e)
      caps[static_cast<size_t>(e)] = inst.net.link(e).capacity / inst.request.size;
    auto oracle = testing::min_cost_unit_flow(inst.net, inst.net.node_index(inst.request.source),
                                              inst.net.node_index(inst.request.receivers[0]), caps,
                                              inst.prices.values);
    if (!oracle || std::abs(kernel.cost - *oracle) > 1e-9 * std::max(1.0, std::abs(*oracle))) {
      ok = false;
      detail = "random instance " + std::to_string(round) + ": kernel " +
               std::to_string(kernel.cost) + " vs oracle " +
               std::to_string(oracle ? *oracle : -1.0);
    }
  }
  report("mincost-kernel-oracle", ok, detail);
}

void criterion_two_two() {
  std::mt19937_64 rng(5678);
  bool ok = true;
  std::string detail;
  for (int round = 0; round < 50 && ok; ++round) {
    auto inst = testing::random_feasible_instance(rng);
    auto exact = mincost_exact(inst.net, inst.request, inst.prices);
    auto approx = mincost_approx(inst.net, inst.request, inst.prices);

    if (approx.cost > 2.0 * exact.cost + 1e-9) {
      ok = false;
      detail = "cost factor exceeded on round " + std::to_string(round);
    }
    for (int e = 0; e < inst.net.link_count(); ++e)
      if (approx.flow.link_flow[static_cast<size_t>(e)] >
          2.0 * inst.net.link(e).capacity / inst.request.size + 1e-9) {
        ok = false;
        detail = "load factor exceeded on round " + std::to_string(round);
      }
    double w_max = 0.0;
    for (const auto& paths : *approx.flow.paths) {
      double w = static_cast<double>(paths.size());
      w_max = std::max(w_max, w);
      for (const auto& p : paths)
        if (p.value > 0.0 && p.value < 1.0 / (2.0 * w * w) - 1e-12) {
          ok = false;
          detail = "surviving path below threshold on round " + std::to_string(round);
        }
    }
    if (approx.granularity < 1.0 / (2.0 * w_max * w_max) - 1e-12) {
      ok = false;
      detail = "granularity below bound on round " + std::to_string(round);
    }
  }
  report("criteria-2-2", ok, detail);
}

void criterion_load_comparability() {
  InstanceDocument doc = butterfly_document(150.0, Mode::kOffline);
  SweepReport sweep = run_sweep(doc, {0.1}, {1.0}, 100);

  auto dir = std::filesystem::temp_directory_path() / "misnc-acceptance";
  std::filesystem::remove_all(dir);
  auto files = emit_report(sweep, dir, ReportFormat::kBoth);
  bool table_written = false;
  for (const auto& f : files)
    if (f.filename() == "link_loads.csv") table_written = std::filesystem::exists(f);

  bool ok = table_written && sweep.offline_bottleneck >= 0 &&
            sweep.offline_bottleneck == sweep.online_bottleneck &&
            sweep.link_ids[static_cast<size_t>(sweep.offline_bottleneck)] == "e10";
  std::string offline_b = sweep.offline_bottleneck >= 0
                              ? sweep.link_ids[static_cast<size_t>(sweep.offline_bottleneck)]
                              : "none";
  std::string online_b = sweep.online_bottleneck >= 0
                             ? sweep.link_ids[static_cast<size_t>(sweep.online_bottleneck)]
                             : "none";
  report("load-comparability", ok,
         "offline bottleneck=" + offline_b + " online bottleneck=" + online_b);
  std::filesystem::remove_all(dir);
}

}  // namespace

int main() {
  std::vector<SweepRun> runs;
  guarded("butterfly-offline-optimum", [] { criterion_butterfly_offline_optimum(); });
  guarded("fptas-guarantee", [&] { runs = criterion_fptas_guarantee(); });
  guarded("online-phi1", [] { criterion_online_phi1(); });
  guarded("online-phi4", [] { criterion_online_phi4(); });
  guarded("theorem34-certificates", [] { criterion_online_certificates(); });
  guarded("mincost-kernel-oracle", [] { criterion_mincost_oracle(); });
  guarded("criteria-2-2", [] { criterion_two_two(); });
  guarded("load-comparability", [] { criterion_load_comparability(); });
  guarded("fptas-runtime-trend", [&] { criterion_fptas_runtime_note(runs); });
  if (failures > 0) std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
