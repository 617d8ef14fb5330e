#include "misnc/offline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "misnc/lp.hpp"

namespace misnc {

namespace {
constexpr double kMinDelta = 1e-300;  // keep initial prices inside normal double range
}

FptasParams params_from_epsilon(double epsilon, int link_count) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error("epsilon must lie in (0, 1)");
  if (link_count < 1) throw Error("network has no links");
  double delta = std::pow((1.0 - epsilon) / static_cast<double>(link_count), 1.0 / epsilon);
  if (!(delta > kMinDelta))
    throw Error("epsilon too small: price initialization underflows double precision");
  return FptasParams{epsilon, delta, std::nullopt};
}

FptasParams params_from_omega(double omega, int link_count) {
  if (!(omega > 0.0)) throw Error("omega must be positive");
  double epsilon = 1.0 - std::pow(1.0 + omega, -1.0 / 3.0);
  FptasParams p = params_from_epsilon(epsilon, link_count);
  p.omega = omega;
  return p;
}

double dual_objective(const Network& net, const PriceSystem& prices) {
  prices.validate(net);
  double total = 0.0;
  for (int e = 0; e < net.link_count(); ++e) total += prices[e] * net.link(e).capacity;
  return total;
}

OfflineSolution run_fptas(const Network& net, const std::vector<MulticastRequest>& requests,
                          const FptasParams& params, const FptasOptions& options) {
  if (requests.empty()) throw Error("run_fptas: request list is empty");
  if (!(params.epsilon > 0.0 && params.epsilon < 1.0)) throw Error("epsilon must lie in (0, 1)");
  if (!(params.delta > 0.0 && params.delta < 1.0)) throw Error("delta must lie in (0, 1)");
  for (const auto& r : requests)
    if (!request_feasible(net, r)) throw InfeasibleRequestError(r.id);

  const int m = net.link_count();
  const double eps = params.epsilon;
  const double scale = std::log(1.0 / params.delta) / std::log1p(eps);
  const double cap_log = std::log(static_cast<double>(m) / (1.0 - eps)) / std::log1p(eps);

  OfflineSolution out;
  out.scale = scale;
  out.raw_load.assign(static_cast<size_t>(m), 0.0);
  out.account.kappa.assign(static_cast<size_t>(m), 0.0);

  // The output loads are the loads accumulated through phase rho - 1: that is
  // the flow backing lambda = (rho - 1) / scale, and the one the scaling
  // lemma bounds. The final overshoot phase stays visible in the trace.
  std::vector<double> settled_load(static_cast<size_t>(m), 0.0);

  PriceSystem prices{std::vector<double>(static_cast<size_t>(m), 0.0)};
  for (int e = 0; e < m; ++e) prices.values[static_cast<size_t>(e)] = params.delta / net.link(e).capacity;

  double dual = dual_objective(net, prices);  // m * delta at the start
  out.account.dual_incremental = dual;

  MincostSolver solver(net);
  int phases = 0;
  while (dual < 1.0) {
    double beta = out.account.beta_estimate;
    long phase_cap = static_cast<long>(std::ceil(2.0 * (beta / eps) * cap_log));
    if (phases >= phase_cap || phases >= options.max_phases)
      throw Error("run_fptas: phase cap reached at dual objective " + std::to_string(dual) +
                  " after " + std::to_string(phases) + " phases (beta estimate " +
                  std::to_string(beta) + ")");

    settled_load = out.raw_load;
    double alpha_phase = 0.0;
    for (const auto& r : requests) {
      MinCostResult res = solver.exact(r, prices);
      for (int e = 0; e < m; ++e) {
        double add = res.flow.link_flow[static_cast<size_t>(e)] * r.size;
        if (add == 0.0) continue;
        out.raw_load[static_cast<size_t>(e)] += add;
        double bump = prices.values[static_cast<size_t>(e)] * eps * add / net.link(e).capacity;
        prices.values[static_cast<size_t>(e)] += bump;
        out.account.dual_incremental += bump * net.link(e).capacity;
      }
      alpha_phase += r.size * res.cost;
      out.account.last_mincost[r.id] = res.cost;
      if (options.record_trace)
        out.trace.push_back(IterationRecord{r.id, std::move(res.flow), res.cost});
    }
    ++phases;

    dual = dual_objective(net, prices);
    out.dual_trace.push_back(dual);
    out.account.alpha_last_phase = alpha_phase;
    if (alpha_phase > 0.0)
      out.account.beta_estimate = std::max(out.account.beta_estimate, dual / alpha_phase);
  }

  out.phases = phases;
  out.lambda = (static_cast<double>(phases) - 1.0) / scale;
  out.raw_load = settled_load;
  out.link_load.assign(static_cast<size_t>(m), 0.0);
  for (int e = 0; e < m; ++e) {
    out.link_load[static_cast<size_t>(e)] = out.raw_load[static_cast<size_t>(e)] / scale;
    out.account.kappa[static_cast<size_t>(e)] = out.raw_load[static_cast<size_t>(e)] / net.link(e).capacity;
  }
  out.final_prices = prices.values;
  out.account.dual_recomputed = dual;
  if (out.lambda > 0.0) out.account.gamma = dual / out.lambda;
  return out;
}

double concurrent_lp_optimum(const Network& net, const std::vector<MulticastRequest>& requests) {
  const int m = net.link_count();
  const int n = net.node_count();

  lp::LinearProgram prog;
  int lambda_var = prog.add_variable("lambda", -1.0);  // maximize lambda

  // Per request: actual flows, then one virtual flow block per receiver.
  std::vector<int> actual_base(requests.size());
  std::vector<std::vector<int>> virt_base(requests.size());
  for (size_t ri = 0; ri < requests.size(); ++ri) {
    const auto& r = requests[ri];
    validate_request(net, r);
    actual_base[ri] = prog.variable_count();
    for (int e = 0; e < m; ++e)
      prog.add_variable("x[" + r.id + "|" + net.link(e).id + "]");
    virt_base[ri].resize(r.receivers.size());
    for (size_t i = 0; i < r.receivers.size(); ++i) {
      virt_base[ri][i] = prog.variable_count();
      for (int e = 0; e < m; ++e)
        prog.add_variable("g[" + r.id + "|" + r.receivers[i] + "|" + net.link(e).id + "]");
    }
  }

  for (size_t ri = 0; ri < requests.size(); ++ri) {
    const auto& r = requests[ri];
    int source = net.node_index(r.source);
    for (size_t i = 0; i < r.receivers.size(); ++i) {
      int sink = net.node_index(r.receivers[i]);
      int base = virt_base[ri][i];
      for (int v = 0; v < n; ++v) {
        std::vector<std::pair<int, double>> terms;
        for (int e : net.out_links(v)) terms.emplace_back(base + e, 1.0);
        for (int e : net.in_links(v)) terms.emplace_back(base + e, -1.0);
        if (v == source) terms.emplace_back(lambda_var, -r.size);
        if (v == sink) terms.emplace_back(lambda_var, r.size);
        prog.add_constraint(std::move(terms), lp::Relation::kEq, 0.0);
      }
      for (int e = 0; e < m; ++e)
        prog.add_constraint({{base + e, 1.0}, {actual_base[ri] + e, -1.0}}, lp::Relation::kLe, 0.0);
    }
  }
  for (int e = 0; e < m; ++e) {
    std::vector<std::pair<int, double>> terms;
    for (size_t ri = 0; ri < requests.size(); ++ri) terms.emplace_back(actual_base[ri] + e, 1.0);
    prog.add_constraint(std::move(terms), lp::Relation::kLe, net.link(e).capacity);
  }

  lp::Solution sol = lp::solve_lp(prog);
  if (sol.status != lp::Status::kOptimal)
    throw Error("concurrent_lp_optimum: LP solve failed");
  return sol.value(lambda_var);
}

OfflineCertificates verify_offline_certificates(const OfflineSolution& solution,
                                                const Network& net,
                                                const std::vector<MulticastRequest>& requests,
                                                const FptasParams& params) {
  OfflineCertificates certs;
  const int m = net.link_count();

  certs.scaling_bound = CertificateCheck{"scaling-bound", true, ""};
  for (int e = 0; e < m; ++e) {
    double kappa = solution.raw_load[static_cast<size_t>(e)] / net.link(e).capacity;
    if (!(kappa < solution.scale)) {
      certs.scaling_bound.passed = false;
      certs.scaling_bound.detail = "link " + net.link(e).id + ": raw load factor " +
                                   std::to_string(kappa) + " >= scale " +
                                   std::to_string(solution.scale);
      break;
    }
  }

  certs.scaled_feasible = CertificateCheck{"scaled-feasible", true, ""};
  for (int e = 0; e < m; ++e) {
    if (solution.link_load[static_cast<size_t>(e)] > net.link(e).capacity + 1e-6) {
      certs.scaled_feasible.passed = false;
      certs.scaled_feasible.detail = "link " + net.link(e).id + " overloaded after scaling";
      break;
    }
  }

  double lambda_lp = concurrent_lp_optimum(net, requests);
  certs.lambda_lp = lambda_lp;

  double eps = params.epsilon;
  double guarantee = std::pow(1.0 - eps, 3.0) * lambda_lp;
  certs.approx_guarantee =
      CertificateCheck{"approx-guarantee", solution.lambda >= guarantee - 1e-9,
                       solution.lambda < guarantee - 1e-9
                           ? "lambda " + std::to_string(solution.lambda) + " below " +
                                 std::to_string(guarantee)
                           : ""};

  bool duality = solution.lambda <= lambda_lp + 1e-6;
  std::string detail;
  if (!duality) detail = "lambda exceeds the LP optimum";
  if (duality && solution.lambda > 0.0 && !solution.dual_trace.empty()) {
    double final_dual = solution.dual_trace.back();
    if (final_dual / solution.lambda < 1.0 - 1e-9) {
      duality = false;
      detail = "final dual objective below lambda";
    }
  }
  certs.weak_duality = CertificateCheck{"weak-duality", duality, detail};
  return certs;
}

}  // namespace misnc
