#include "misnc/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace misnc {

using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

FptasParams offline_params(const InstanceDocument& doc, int link_count) {
  if (doc.params.omega) return params_from_omega(*doc.params.omega, link_count);
  return params_from_epsilon(doc.params.epsilon.value_or(0.1), link_count);
}

OnlineConfig online_config(const InstanceDocument& doc) {
  OnlineConfig cfg;
  cfg.phi = doc.params.phi;
  cfg.variant = doc.params.variant;
  cfg.sigma = doc.params.sigma;
  cfg.lambda_threshold = doc.params.lambda_threshold;
  return cfg;
}

PriceSystem prices_from_params(const Network& net, const InstanceParams& params) {
  if (params.prices.empty()) return PriceSystem::uniform(net, 1.0);
  PriceSystem p = PriceSystem::zero(net);
  for (const auto& [id, value] : params.prices)
    p.values[static_cast<size_t>(net.link_index(id))] = value;
  p.validate(net);
  return p;
}

OfflineRunResult run_offline(const Network& net, const std::vector<MulticastRequest>& requests,
                             const FptasParams& params) {
  OfflineRunResult out;
  out.params = params;
  auto start = std::chrono::steady_clock::now();
  out.solution = run_fptas(net, requests, params);
  out.wall_seconds = seconds_since(start);
  out.certificates = verify_offline_certificates(out.solution, net, requests, params);
  out.utilization.resize(static_cast<size_t>(net.link_count()));
  for (int e = 0; e < net.link_count(); ++e)
    out.utilization[static_cast<size_t>(e)] =
        out.solution.link_load[static_cast<size_t>(e)] / net.link(e).capacity;
  return out;
}

OnlineRunResult run_online(const Network& net, const std::vector<MulticastRequest>& arrivals,
                           const OnlineConfig& cfg) {
  OnlineRunResult out;
  out.config = cfg;
  auto start = std::chrono::steady_clock::now();
  OnlineRouter router(net, cfg);
  for (const auto& r : arrivals) router.process(r);
  out.wall_seconds = seconds_since(start);
  out.metrics = router.metrics();
  out.certificates = verify_online_certificates(router);
  out.decisions.reserve(router.decisions().size());
  for (const auto& d : router.decisions()) {
    OnlineDecisionRow row;
    row.request_id = d.request_id;
    row.accepted = d.accepted;
    row.cost = d.cost;
    row.dual_weight = d.dual_weight;
    if (d.flow) {
      for (int e = 0; e < net.link_count(); ++e) {
        double add = d.flow->link_flow[static_cast<size_t>(e)] * d.size;
        if (add > 0.0) row.link_increments.emplace_back(net.link(e).id, add);
      }
    }
    out.decisions.push_back(std::move(row));
  }
  return out;
}

json certificate_json(const CertificateCheck& check) {
  json j = {{"name", check.name}, {"passed", check.passed}};
  if (!check.detail.empty()) j["detail"] = check.detail;
  return j;
}

json offline_certificates_json(const OfflineCertificates& certs) {
  json j = json::array({certificate_json(certs.scaling_bound),
                        certificate_json(certs.scaled_feasible),
                        certificate_json(certs.approx_guarantee),
                        certificate_json(certs.weak_duality)});
  return j;
}

json online_certificates_json(const OnlineCertificates& certs) {
  return json::array({certificate_json(certs.dual_feasibility),
                      certificate_json(certs.ratio_bound),
                      certificate_json(certs.price_bound),
                      certificate_json(certs.utilization_bound),
                      certificate_json(certs.monotonicity)});
}

json utilization_json(const InstanceDocument& doc, const std::vector<double>& utilization) {
  json j = json::object();
  for (size_t e = 0; e < utilization.size(); ++e) j[doc.links[e].id] = utilization[e];
  return j;
}

}  // namespace

bool ExperimentReport::certificates_passed() const {
  if (offline && !offline->certificates.all_passed()) return false;
  if (online && !online->certificates.all_passed()) return false;
  for (const auto& run : mincost)
    for (const auto& check : run.checks)
      if (!check.passed) return false;
  return true;
}

bool SweepReport::certificates_passed() const {
  for (const auto& row : offline_rows)
    if (!row.certificates_passed) return false;
  for (const auto& row : online_rows)
    if (!row.certificates_passed) return false;
  return true;
}

ExperimentReport run_experiment(const InstanceDocument& doc) {
  ExperimentReport report;
  report.instance = doc;
  auto start = std::chrono::steady_clock::now();

  Network net = doc.build_network();
  std::vector<MulticastRequest> requests = doc.build_requests(net);

  switch (doc.mode) {
    case Mode::kOffline:
      report.offline = run_offline(net, requests, offline_params(doc, net.link_count()));
      break;
    case Mode::kOnline:
      report.online = run_online(net, requests, online_config(doc));
      break;
    case Mode::kMincost: {
      PriceSystem prices = prices_from_params(net, doc.params);
      for (const auto& r : requests) {
        MincostRunResult run;
        run.request_id = r.id;
        auto t0 = std::chrono::steady_clock::now();
        run.result = doc.params.variant == KernelVariant::kShifted
                         ? mincost_approx(net, r, prices)
                         : mincost_exact(net, r, prices);
        run.wall_seconds = seconds_since(t0);
        run.checks = verify_unit_flow(net, r, run.result);
        report.mincost.push_back(std::move(run));
      }
      break;
    }
  }
  report.wall_seconds = seconds_since(start);
  return report;
}

SweepReport run_sweep(const InstanceDocument& doc, const std::vector<double>& epsilons,
                      const std::vector<double>& phis, int per_request) {
  if (doc.mode != Mode::kOffline)
    throw Error("run_sweep: the instance document must be in offline mode");

  SweepReport report;
  report.instance = doc;
  Network net = doc.build_network();
  std::vector<MulticastRequest> requests = doc.build_requests(net);
  for (const auto& l : doc.links) report.link_ids.push_back(l.id);

  for (double eps : epsilons) {
    OfflineRunResult run = run_offline(net, requests, params_from_epsilon(eps, net.link_count()));
    SweepReport::OfflineRow row;
    row.epsilon = eps;
    row.lambda = run.solution.lambda;
    row.wall_seconds = run.wall_seconds;
    row.phases = run.solution.phases;
    row.certificates_passed = run.certificates.all_passed();
    row.utilization = run.utilization;
    report.offline_rows.push_back(std::move(row));
  }
  double base_time = 0.0;
  for (const auto& row : report.offline_rows)
    if (row.epsilon == 0.1) base_time = row.wall_seconds;
  if (base_time <= 0.0 && !report.offline_rows.empty())
    base_time = report.offline_rows.front().wall_seconds;
  for (auto& row : report.offline_rows)
    row.normalized_time = base_time > 0.0 ? row.wall_seconds / base_time : 0.0;

  std::vector<MulticastRequest> arrivals =
      matched_online_trace(requests, doc.params.seed, per_request);
  for (double phi : phis) {
    OnlineConfig cfg = online_config(doc);
    cfg.phi = phi;
    OnlineRunResult run = run_online(net, arrivals, cfg);
    SweepReport::OnlineRow row;
    row.phi = phi;
    row.acceptance_ratio = run.metrics.acceptance_ratio;
    row.violation_ratio = run.metrics.violation_ratio;
    row.bottleneck_link = run.metrics.bottleneck_link;
    row.certificates_passed = run.certificates.all_passed();
    row.utilization = run.metrics.utilization;
    report.online_rows.push_back(std::move(row));
  }

  auto find_offline = [&](double eps) -> const SweepReport::OfflineRow* {
    for (const auto& row : report.offline_rows)
      if (row.epsilon == eps) return &row;
    return report.offline_rows.empty() ? nullptr : &report.offline_rows.front();
  };
  auto find_online = [&](double phi) -> const SweepReport::OnlineRow* {
    for (const auto& row : report.online_rows)
      if (row.phi == phi) return &row;
    return report.online_rows.empty() ? nullptr : &report.online_rows.front();
  };
  if (const auto* row = find_offline(0.1)) {
    report.offline_utilization = row->utilization;
    int best = -1;
    for (size_t e = 0; e < row->utilization.size(); ++e)
      if (best < 0 || row->utilization[e] > row->utilization[static_cast<size_t>(best)])
        best = static_cast<int>(e);
    report.offline_bottleneck = best;
  }
  if (const auto* row = find_online(1.0)) {
    report.online_utilization = row->utilization;
    report.online_bottleneck = row->bottleneck_link;
  }
  return report;
}

std::string report_to_json(const ExperimentReport& report) {
  json j;
  j["instance"] = json::parse(serialize_instance(report.instance));
  j["mode"] = to_string(report.instance.mode);
  j["seed"] = report.instance.params.seed;
  j["wall_seconds"] = report.wall_seconds;
  j["certificates_passed"] = report.certificates_passed();

  if (report.offline) {
    const auto& run = *report.offline;
    json o;
    o["epsilon"] = run.params.epsilon;
    o["delta"] = run.params.delta;
    if (run.params.omega) o["omega"] = *run.params.omega;
    o["lambda"] = run.solution.lambda;
    o["phases"] = run.solution.phases;
    o["scale"] = run.solution.scale;
    o["wall_seconds"] = run.wall_seconds;
    o["utilization"] = utilization_json(report.instance, run.utilization);
    o["certificates"] = offline_certificates_json(run.certificates);
    if (run.certificates.lambda_lp) o["lambda_lp"] = *run.certificates.lambda_lp;
    j["offline"] = std::move(o);
  }
  if (report.online) {
    const auto& run = *report.online;
    json o;
    o["phi"] = run.config.phi;
    o["variant"] = to_string(run.config.variant);
    o["sigma"] = run.config.sigma;
    o["lambda_thr"] = run.config.lambda_threshold;
    o["acceptance_ratio"] = run.metrics.acceptance_ratio;
    o["violation_ratio"] = run.metrics.violation_ratio;
    o["accepted"] = run.metrics.accepted;
    o["total"] = run.metrics.total;
    if (run.metrics.bottleneck_link >= 0)
      o["bottleneck_link"] = report.instance.links[static_cast<size_t>(run.metrics.bottleneck_link)].id;
    if (run.metrics.bound_b) o["price_bound"] = *run.metrics.bound_b;
    if (run.metrics.utilization_bound) o["utilization_bound"] = *run.metrics.utilization_bound;
    o["utilization"] = utilization_json(report.instance, run.metrics.utilization);
    o["wall_seconds"] = run.wall_seconds;
    o["certificates"] = online_certificates_json(run.certificates);
    json rows = json::array();
    for (const auto& d : run.decisions) {
      json row = {{"id", d.request_id}, {"accepted", d.accepted}, {"cost", d.cost},
                  {"z", d.dual_weight}};
      json inc = json::object();
      for (const auto& [link, add] : d.link_increments) inc[link] = add;
      row["link_increments"] = std::move(inc);
      rows.push_back(std::move(row));
    }
    o["decisions"] = std::move(rows);
    j["online"] = std::move(o);
  }
  if (!report.mincost.empty()) {
    json rows = json::array();
    for (const auto& run : report.mincost) {
      json row;
      row["id"] = run.request_id;
      row["cost"] = run.result.cost;
      row["granularity"] = run.result.granularity;
      row["criteria"] = {run.result.criteria.cost_factor, run.result.criteria.load_factor};
      json flows = json::object();
      for (size_t e = 0; e < report.instance.links.size(); ++e) {
        double f = run.result.flow.link_flow[e];
        if (f > kPositiveFlowTol) flows[report.instance.links[e].id] = f;
      }
      row["link_flow"] = std::move(flows);
      row["wall_seconds"] = run.wall_seconds;
      json checks = json::array();
      for (const auto& c : run.checks) {
        json cj = {{"name", c.name}, {"passed", c.passed}};
        if (!c.detail.empty()) cj["detail"] = c.detail;
        checks.push_back(std::move(cj));
      }
      row["checks"] = std::move(checks);
      rows.push_back(std::move(row));
    }
    j["mincost"] = std::move(rows);
  }
  return j.dump(2) + "\n";
}

std::string report_to_json(const SweepReport& report) {
  json j;
  j["instance"] = json::parse(serialize_instance(report.instance));
  j["certificates_passed"] = report.certificates_passed();

  json offline = json::array();
  for (const auto& row : report.offline_rows) {
    offline.push_back({{"epsilon", row.epsilon},
                       {"lambda", row.lambda},
                       {"wall_seconds", row.wall_seconds},
                       {"normalized_time", row.normalized_time},
                       {"phases", row.phases},
                       {"certificates_passed", row.certificates_passed}});
  }
  j["offline_sweep"] = std::move(offline);

  json online = json::array();
  for (const auto& row : report.online_rows) {
    json r = {{"phi", row.phi},
              {"acceptance_ratio", row.acceptance_ratio},
              {"violation_ratio", row.violation_ratio},
              {"certificates_passed", row.certificates_passed}};
    if (row.bottleneck_link >= 0)
      r["bottleneck_link"] = report.link_ids[static_cast<size_t>(row.bottleneck_link)];
    online.push_back(std::move(r));
  }
  j["online_sweep"] = std::move(online);

  if (!report.offline_utilization.empty() && !report.online_utilization.empty()) {
    json rows = json::array();
    for (size_t e = 0; e < report.link_ids.size(); ++e) {
      rows.push_back({{"link", report.link_ids[e]},
                      {"offline_utilization", report.offline_utilization[e]},
                      {"online_utilization", report.online_utilization[e]}});
    }
    json cmp;
    cmp["links"] = std::move(rows);
    if (report.offline_bottleneck >= 0)
      cmp["offline_bottleneck"] = report.link_ids[static_cast<size_t>(report.offline_bottleneck)];
    if (report.online_bottleneck >= 0)
      cmp["online_bottleneck"] = report.link_ids[static_cast<size_t>(report.online_bottleneck)];
    j["link_loads"] = std::move(cmp);
  }
  return j.dump(2) + "\n";
}

namespace {

std::string number(double v) { return json(v).dump(); }

void write_file(const std::filesystem::path& path, const std::string& content,
                std::vector<std::filesystem::path>& written) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write report file '" + path.string() + "'");
  out << content;
  written.push_back(path);
}

}  // namespace

std::vector<std::filesystem::path> emit_report(const ExperimentReport& report,
                                               const std::filesystem::path& dir,
                                               ReportFormat format) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;

  if (format != ReportFormat::kCsv) write_file(dir / "report.json", report_to_json(report), written);

  if (format != ReportFormat::kJson) {
    std::string util = "link,utilization\n";
    const std::vector<double>* utilization = nullptr;
    if (report.offline) utilization = &report.offline->utilization;
    if (report.online) utilization = &report.online->metrics.utilization;
    if (utilization) {
      for (size_t e = 0; e < report.instance.links.size(); ++e)
        util += report.instance.links[e].id + "," + number((*utilization)[e]) + "\n";
      write_file(dir / "link_loads.csv", util, written);
    }
    if (!report.mincost.empty()) {
      std::string table = "request,cost,granularity,eta,mu\n";
      for (const auto& run : report.mincost)
        table += run.request_id + "," + number(run.result.cost) + "," +
                 number(run.result.granularity) + "," + std::to_string(run.result.criteria.cost_factor) +
                 "," + std::to_string(run.result.criteria.load_factor) + "\n";
      write_file(dir / "mincost.csv", table, written);
    }
  }
  return written;
}

std::vector<std::filesystem::path> emit_report(const SweepReport& report,
                                               const std::filesystem::path& dir,
                                               ReportFormat format) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;

  if (format != ReportFormat::kCsv) write_file(dir / "report.json", report_to_json(report), written);

  if (format != ReportFormat::kJson) {
    std::string offline = "epsilon,lambda,normalized_time\n";
    for (const auto& row : report.offline_rows)
      offline += number(row.epsilon) + "," + number(row.lambda) + "," +
                 number(row.normalized_time) + "\n";
    write_file(dir / "offline_sweep.csv", offline, written);

    std::string online = "phi,acceptance_ratio,violation_ratio\n";
    for (const auto& row : report.online_rows)
      online += number(row.phi) + "," + number(row.acceptance_ratio) + "," +
                number(row.violation_ratio) + "\n";
    write_file(dir / "online_sweep.csv", online, written);

    if (!report.offline_utilization.empty() && !report.online_utilization.empty()) {
      std::string loads = "link,offline_utilization,online_utilization\n";
      for (size_t e = 0; e < report.link_ids.size(); ++e)
        loads += report.link_ids[e] + "," + number(report.offline_utilization[e]) + "," +
                 number(report.online_utilization[e]) + "\n";
      write_file(dir / "link_loads.csv", loads, written);
    }
  }
  return written;
}

}  // namespace misnc
