// Command line front end: instance generation, single runs, and sweeps.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "misnc/experiment.hpp"
#include "misnc/instance.hpp"

using namespace misnc;

namespace {

ReportFormat parse_format(const std::string& s) {
  if (s == "json") return ReportFormat::kJson;
  if (s == "csv") return ReportFormat::kCsv;
  if (s == "both") return ReportFormat::kBoth;
  throw Error("--format: expected json, csv, or both");
}

void apply_overrides(InstanceDocument& doc, const std::optional<double>& epsilon,
                     const std::optional<double>& omega, const std::optional<double>& phi,
                     const std::optional<std::string>& variant,
                     const std::optional<double>& sigma,
                     const std::optional<double>& lambda_thr,
                     const std::optional<std::uint64_t>& seed) {
  if (epsilon) {
    doc.params.epsilon = *epsilon;
    doc.params.omega.reset();
  }
  if (omega) {
    doc.params.omega = *omega;
    doc.params.epsilon.reset();
  }
  if (phi) doc.params.phi = *phi;
  if (variant) doc.params.variant = variant_from_string(*variant);
  if (sigma) doc.params.sigma = *sigma;
  if (lambda_thr) doc.params.lambda_threshold = *lambda_thr;
  if (seed) doc.params.seed = *seed;
}

int emit_and_summarize(const ExperimentReport& report, const std::optional<std::string>& out,
                       const std::string& format) {
  if (out) {
    auto files = emit_report(report, *out, parse_format(format));
    for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
  }
  if (report.offline) {
    const auto& run = *report.offline;
    std::printf("lambda=%.6f phases=%d epsilon=%.4f wall=%.3fs\n", run.solution.lambda,
                run.solution.phases, run.params.epsilon, run.wall_seconds);
    if (run.certificates.lambda_lp)
      std::printf("lambda_lp=%.6f\n", *run.certificates.lambda_lp);
    for (const auto* check : {&run.certificates.scaling_bound, &run.certificates.scaled_feasible,
                              &run.certificates.approx_guarantee, &run.certificates.weak_duality})
      std::printf("certificate %-18s %s%s%s\n", check->name.c_str(),
                  check->passed ? "PASS" : "FAIL", check->detail.empty() ? "" : " — ",
                  check->detail.c_str());
  }
  if (report.online) {
    const auto& run = *report.online;
    std::printf("acceptance=%.4f violation=%.4f accepted=%d/%d", run.metrics.acceptance_ratio,
                run.metrics.violation_ratio, run.metrics.accepted, run.metrics.total);
    if (run.metrics.bottleneck_link >= 0)
      std::printf(" bottleneck=%s",
                  report.instance.links[static_cast<size_t>(run.metrics.bottleneck_link)].id.c_str());
    std::printf(" wall=%.3fs\n", run.wall_seconds);
    for (const auto* check :
         {&run.certificates.dual_feasibility, &run.certificates.ratio_bound,
          &run.certificates.price_bound, &run.certificates.utilization_bound,
          &run.certificates.monotonicity})
      std::printf("certificate %-18s %s%s%s\n", check->name.c_str(),
                  check->passed ? "PASS" : "FAIL", check->detail.empty() ? "" : " — ",
                  check->detail.c_str());
  }
  for (const auto& run : report.mincost) {
    std::printf("%s: cost=%.9f granularity=%.9f criteria=(%d,%d)\n", run.request_id.c_str(),
                run.result.cost, run.result.granularity, run.result.criteria.cost_factor,
                run.result.criteria.load_factor);
    for (const auto& check : run.checks)
      if (!check.passed)
        std::printf("check %s FAIL — %s\n", check.name.c_str(), check.detail.c_str());
  }
  bool ok = report.certificates_passed();
  std::printf("certificates %s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coded-multicast throughput engines: offline approximation scheme, online "
               "primal-dual admission, and the min-cost kernel"};
  app.require_subcommand(1);

  std::string instance_path;
  std::optional<double> epsilon, omega, phi, sigma, lambda_thr;
  std::vector<double> epsilons, phis;
  std::optional<std::string> variant;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::string format = "both";
  double size = 150.0;
  std::string mode = "offline";
  int count = 100;
  int per_request = 100;
  double request_size = 1.5;

  auto add_common = [&](CLI::App* cmd, bool with_instance = true) {
    if (with_instance)
      cmd->add_option("instance", instance_path, "instance document (JSON)")->required();
    cmd->add_option("--out", out, "directory for report files");
    cmd->add_option("--format", format, "report format: json|csv|both")->capture_default_str();
  };

  CLI::App* offline = app.add_subcommand("offline", "run the offline approximation scheme");
  add_common(offline);
  offline->add_option("--epsilon", epsilon, "accuracy parameter in (0,1)");
  offline->add_option("--omega", omega, "target approximation gap (derives epsilon)");

  CLI::App* online = app.add_subcommand("online", "process the document's requests in order");
  add_common(online);
  online->add_option("--phi", phi, "price growth parameter (> 0)");
  online->add_option("--variant", variant, "kernel variant: exact|shifted");
  online->add_option("--sigma", sigma, "criteria factor for the shifted kernel");
  online->add_option("--lambda-thr", lambda_thr, "shifted-variant accept threshold");

  CLI::App* mincost = app.add_subcommand("mincost", "solve the min-cost kernel per request");
  add_common(mincost);
  mincost->add_option("--variant", variant, "kernel variant: exact|shifted");

  CLI::App* sweep = app.add_subcommand("sweep", "epsilon and phi sweeps plus the load comparison");
  add_common(sweep);
  sweep->add_option("--epsilon", epsilons, "epsilon values (repeatable)");
  sweep->add_option("--phi", phis, "phi values (repeatable)");
  sweep->add_option("--variant", variant, "kernel variant: exact|shifted");
  sweep->add_option("--sigma", sigma, "criteria factor for the shifted kernel");
  sweep->add_option("--lambda-thr", lambda_thr, "shifted-variant accept threshold");
  sweep->add_option("--seed", seed, "shuffle seed for the matched arrival sequence");
  sweep->add_option("--per-request", per_request, "arrivals per offline demand")
      ->capture_default_str();

  CLI::App* gen_butterfly = app.add_subcommand("gen-butterfly", "write the test instance");
  gen_butterfly->add_option("--size", size, "request size")->capture_default_str();
  gen_butterfly->add_option("--mode", mode, "offline|online|mincost")->capture_default_str();
  gen_butterfly->add_option("--out", out, "output file (stdout when omitted)");

  CLI::App* gen_trace = app.add_subcommand("gen-trace", "write a seeded online arrival sequence");
  gen_trace->add_option("--seed", seed, "shuffle seed");
  gen_trace->add_option("--count", count, "requests per session")->capture_default_str();
  gen_trace->add_option("--request-size", request_size, "size of each request")
      ->capture_default_str();
  gen_trace->add_option("--phi", phi, "phi recorded in the document");
  gen_trace->add_option("--variant", variant, "kernel variant recorded in the document");
  gen_trace->add_option("--out", out, "output file (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_butterfly->parsed()) {
      InstanceDocument doc = butterfly_document(size, mode_from_string(mode));
      if (out)
        save_instance(doc, *out);
      else
        std::cout << serialize_instance(doc);
      return 0;
    }
    if (gen_trace->parsed()) {
      InstanceDocument doc = butterfly_document(request_size, Mode::kOnline);
      doc.requests.clear();
      std::uint64_t used_seed = seed.value_or(1);
      for (const auto& r : generate_online_trace(used_seed, count, request_size))
        doc.requests.push_back(InstanceRequest{r.id, r.source, r.receivers, r.size});
      doc.params.seed = used_seed;
      if (phi) doc.params.phi = *phi;
      if (variant) doc.params.variant = variant_from_string(*variant);
      if (out)
        save_instance(doc, *out);
      else
        std::cout << serialize_instance(doc);
      return 0;
    }

    InstanceDocument doc = load_instance(instance_path);
    apply_overrides(doc, epsilon, omega, phi, variant, sigma, lambda_thr, seed);

    if (offline->parsed()) {
      doc.mode = Mode::kOffline;
      return emit_and_summarize(run_experiment(doc), out, format);
    }
    if (online->parsed()) {
      doc.mode = Mode::kOnline;
      return emit_and_summarize(run_experiment(doc), out, format);
    }
    if (mincost->parsed()) {
      doc.mode = Mode::kMincost;
      return emit_and_summarize(run_experiment(doc), out, format);
    }
    if (sweep->parsed()) {
      if (epsilons.empty()) epsilons = {0.4, 0.2, 0.1, 0.05};
      if (phis.empty()) phis = {1.0, 2.0, 4.0, 8.0};
      SweepReport report = run_sweep(doc, epsilons, phis, per_request);
      if (out) {
        auto files = emit_report(report, *out, parse_format(format));
        for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
      }
      std::printf("epsilon,lambda,normalized_time\n");
      for (const auto& row : report.offline_rows)
        std::printf("%g,%.6f,%.3f\n", row.epsilon, row.lambda, row.normalized_time);
      std::printf("phi,acceptance_ratio,violation_ratio\n");
      for (const auto& row : report.online_rows)
        std::printf("%g,%.4f,%.4f\n", row.phi, row.acceptance_ratio, row.violation_ratio);
      bool ok = report.certificates_passed();
      std::printf("certificates %s\n", ok ? "PASS" : "FAIL");
      return ok ? 0 : 1;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
