#include "misnc/mincost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace misnc {

namespace {

// Objective magnitudes span many orders across a primal-dual run, so the LP
// is always solved under prices scaled by their maximum; the reported cost
// uses the caller's prices. Uniform scaling leaves the argmin set and the
// pivot sequence unchanged.
std::vector<double> normalized_costs(const Network& net, const PriceSystem& prices,
                                     int receiver_count) {
  const int m = net.link_count();
  double scale = 0.0;
  for (int e = 0; e < m; ++e) scale = std::max(scale, prices[e]);
  std::vector<double> costs(static_cast<size_t>(m) * static_cast<size_t>(receiver_count + 1), 0.0);
  if (scale > 0.0)
    for (int e = 0; e < m; ++e) costs[static_cast<size_t>(e)] = prices[e] / scale;
  return costs;
}

lp::LinearProgram build_lp_with_costs(const Network& net, const MulticastRequest& r,
                                      const std::vector<double>& fe_costs) {
  const int m = net.link_count();
  const int n = net.node_count();
  const int k = static_cast<int>(r.receivers.size());

  lp::LinearProgram prog;
  for (int e = 0; e < m; ++e)
    prog.add_variable("f[" + net.link(e).id + "]", fe_costs[static_cast<size_t>(e)]);
  for (int i = 0; i < k; ++i)
    for (int e = 0; e < m; ++e)
      prog.add_variable("f[" + r.receivers[static_cast<size_t>(i)] + "|" + net.link(e).id + "]");

  auto var = [m](int receiver, int link) { return m + receiver * m + link; };

  int source = net.node_index(r.source);
  for (int i = 0; i < k; ++i) {
    int sink = net.node_index(r.receivers[static_cast<size_t>(i)]);
    for (int v = 0; v < n; ++v) {
      std::vector<std::pair<int, double>> terms;
      for (int e : net.out_links(v)) terms.emplace_back(var(i, e), 1.0);
      for (int e : net.in_links(v)) terms.emplace_back(var(i, e), -1.0);
      double rhs = v == source ? 1.0 : (v == sink ? -1.0 : 0.0);
      prog.add_constraint(std::move(terms), lp::Relation::kEq, rhs);
    }
  }
  for (int i = 0; i < k; ++i)
    for (int e = 0; e < m; ++e)
      prog.add_constraint({{var(i, e), 1.0}, {e, -1.0}}, lp::Relation::kLe, 0.0);
  for (int e = 0; e < m; ++e)
    prog.add_constraint({{e, 1.0}}, lp::Relation::kLe, net.link(e).capacity / r.size);
  return prog;
}

MinCostResult extract_result(const Network& net, const MulticastRequest& r,
                             const PriceSystem& prices, const lp::Solution& sol) {
  const int m = net.link_count();
  const int k = static_cast<int>(r.receivers.size());

  MinCostResult res;
  res.flow.request_id = r.id;
  res.flow.source = r.source;
  res.flow.receivers = r.receivers;
  res.flow.link_flow.assign(static_cast<size_t>(m), 0.0);
  for (int e = 0; e < m; ++e) res.flow.link_flow[static_cast<size_t>(e)] = sol.value(e);
  res.flow.receiver_flow.assign(static_cast<size_t>(k), std::vector<double>(static_cast<size_t>(m), 0.0));
  for (int i = 0; i < k; ++i)
    for (int e = 0; e < m; ++e)
      res.flow.receiver_flow[static_cast<size_t>(i)][static_cast<size_t>(e)] = sol.value(m + i * m + e);

  res.cost = 0.0;
  for (int e = 0; e < m; ++e) res.cost += prices[e] * res.flow.link_flow[static_cast<size_t>(e)];
  res.granularity = granularity(res.flow);
  res.criteria = CriteriaTag{1, 1};
  return res;
}

// Among the min-cost solutions, move to the vertex with minimum total flow:
// cost-neutral cycles in the virtual flows and padding on zero-price links
// would otherwise defeat path peeling. A vertex of the optimal face is still
// a vertex of the polytope.
MinCostResult minimum_support_optimum(const Network& net, const MulticastRequest& r,
                                      const PriceSystem& prices, const MinCostResult& exact) {
  const int m = net.link_count();
  const int k = static_cast<int>(r.receivers.size());
  const int nvars = m * (k + 1);

  auto costs = normalized_costs(net, prices, k);
  double face_cost = 0.0;
  for (int e = 0; e < m; ++e)
    face_cost += costs[static_cast<size_t>(e)] * exact.flow.link_flow[static_cast<size_t>(e)];

  std::vector<double> ones(static_cast<size_t>(nvars), 1.0);
  lp::LinearProgram prog = build_lp_with_costs(net, r, ones);
  bool priced = false;
  for (int e = 0; e < m; ++e)
    if (costs[static_cast<size_t>(e)] > 0.0) priced = true;
  if (priced) {
    std::vector<std::pair<int, double>> face;
    for (int e = 0; e < m; ++e)
      if (costs[static_cast<size_t>(e)] != 0.0) face.emplace_back(e, costs[static_cast<size_t>(e)]);
    prog.add_constraint(std::move(face), lp::Relation::kLe, face_cost + 1e-9 * (1.0 + face_cost));
  }

  lp::Solution sol = lp::solve_lp(prog);
  if (sol.status != lp::Status::kOptimal)
    throw Error("min-cost cleanup stage failed to re-solve the optimal face");
  return extract_result(net, r, prices, sol);
}

MinCostResult finish_approx(const Network& net, const MulticastRequest& r,
                            const PriceSystem& prices, const MinCostResult& exact) {
  MinCostResult cleaned = minimum_support_optimum(net, r, prices, exact);
  auto& flow = cleaned.flow;
  std::vector<std::vector<PathFlow>> paths;
  paths.reserve(flow.receivers.size());
  for (const auto& receiver : flow.receivers)
    paths.push_back(decompose_paths(net, flow, receiver));
  flow.paths = std::move(paths);

  MinCostResult res;
  res.flow = shift_small_flows(net, flow);
  res.cost = 0.0;
  for (int e = 0; e < net.link_count(); ++e)
    res.cost += prices[e] * res.flow.link_flow[static_cast<size_t>(e)];
  res.granularity = granularity(res.flow);
  res.criteria = CriteriaTag{2, 2};
  return res;
}

}  // namespace

PriceSystem PriceSystem::zero(const Network& net) {
  return PriceSystem{std::vector<double>(static_cast<size_t>(net.link_count()), 0.0)};
}

PriceSystem PriceSystem::uniform(const Network& net, double value) {
  return PriceSystem{std::vector<double>(static_cast<size_t>(net.link_count()), value)};
}

void PriceSystem::validate(const Network& net) const {
  if (values.size() != static_cast<size_t>(net.link_count()))
    throw Error("price system size does not match link count");
  for (double p : values)
    if (!(p >= 0.0) || !std::isfinite(p)) throw Error("prices must be finite and nonnegative");
}

lp::LinearProgram build_mincost_lp(const Network& net, const MulticastRequest& r,
                                   const PriceSystem& prices) {
  prices.validate(net);
  validate_request(net, r);
  std::vector<double> costs(prices.values);
  costs.resize(static_cast<size_t>(net.link_count()) * (r.receivers.size() + 1), 0.0);
  return build_lp_with_costs(net, r, costs);
}

MinCostResult mincost_exact(const Network& net, const MulticastRequest& r,
                            const PriceSystem& prices) {
  prices.validate(net);
  validate_request(net, r);
  auto prog = build_lp_with_costs(net, r,
                                  normalized_costs(net, prices, static_cast<int>(r.receivers.size())));
  lp::Solution sol = lp::solve_lp(prog);
  if (sol.status == lp::Status::kInfeasible) throw InfeasibleRequestError(r.id);
  if (sol.status != lp::Status::kOptimal) throw Error("min-cost LP is unbounded");
  return extract_result(net, r, prices, sol);
}

MinCostResult mincost_approx(const Network& net, const MulticastRequest& r,
                             const PriceSystem& prices) {
  return finish_approx(net, r, prices, mincost_exact(net, r, prices));
}

std::vector<PathFlow> decompose_paths(const Network& net, const UnitExtremeFlow& flow,
                                      const std::string& receiver) {
  auto it = std::find(flow.receivers.begin(), flow.receivers.end(), receiver);
  if (it == flow.receivers.end())
    throw Error("decompose_paths: '" + receiver + "' is not a receiver of this flow");
  const auto& virt = flow.receiver_flow[static_cast<size_t>(it - flow.receivers.begin())];

  double top = 0.0;
  for (double g : virt) top = std::max(top, g);
  if (top <= kPositiveFlowTol)
    throw Error("decompose_paths: virtual flow for receiver '" + receiver + "' is zero");

  std::vector<double> residual = virt;
  const int source = net.node_index(flow.source);
  const int sink = net.node_index(receiver);
  const int m = net.link_count();

  int positive_links = 0;
  for (double g : residual)
    if (g > kPositiveFlowTol) ++positive_links;

  std::vector<PathFlow> paths;
  std::vector<char> on_path(static_cast<size_t>(net.node_count()), 0);
  for (int peel = 0; peel <= positive_links; ++peel) {
    std::fill(on_path.begin(), on_path.end(), 0);
    std::vector<int> links;
    int v = source;
    on_path[static_cast<size_t>(v)] = 1;
    while (v != sink) {
      int next_link = -1;
      for (int e : net.out_links(v)) {  // out_links are in link-id order
        if (residual[static_cast<size_t>(e)] > kPositiveFlowTol) {
          next_link = e;
          break;
        }
      }
      if (next_link < 0) {
        if (v == source && links.empty()) break;  // source exhausted
        throw Error("decompose_paths: virtual flow is not conserved at node '" +
                    net.nodes()[static_cast<size_t>(v)] + "'");
      }
      int w = net.link(next_link).head;
      if (on_path[static_cast<size_t>(w)])
        throw Error("decompose_paths: cycle in virtual flow for receiver '" + receiver + "'");
      on_path[static_cast<size_t>(w)] = 1;
      links.push_back(next_link);
      v = w;
    }
    if (links.empty()) break;

    double bottleneck = std::numeric_limits<double>::infinity();
    for (int e : links) bottleneck = std::min(bottleneck, residual[static_cast<size_t>(e)]);
    for (int e : links) residual[static_cast<size_t>(e)] -= bottleneck;
    paths.push_back(PathFlow{std::move(links), bottleneck});
  }

  for (int e = 0; e < m; ++e) {
    if (residual[static_cast<size_t>(e)] > 1e-7)
      throw Error("decompose_paths: cycle-only residual on link '" + net.link(e).id +
                  "' for receiver '" + receiver + "'");
  }
  double total = 0.0;
  for (const auto& p : paths) total += p.value;
  if (std::abs(total - 1.0) > 1e-7)
    throw Error("decompose_paths: path flows sum to " + std::to_string(total) +
                " instead of 1 for receiver '" + receiver + "'");
  return paths;
}

UnitExtremeFlow shift_small_flows(const Network& net, const UnitExtremeFlow& flow) {
  if (!flow.paths || flow.paths->size() != flow.receivers.size())
    throw Error("shift_small_flows: path decompositions are required for every receiver");

  const int m = net.link_count();
  UnitExtremeFlow out = flow;
  auto& all_paths = *out.paths;

  for (size_t i = 0; i < out.receivers.size(); ++i) {
    auto& paths = all_paths[i];
    if (paths.empty())
      throw Error("shift_small_flows: empty decomposition for receiver '" + out.receivers[i] + "'");
    const double w = static_cast<double>(paths.size());
    const double threshold = 1.0 / (2.0 * w * w);

    size_t largest = 0;
    for (size_t j = 1; j < paths.size(); ++j)
      if (paths[j].value > paths[largest].value) largest = j;

    for (size_t j = 0; j < paths.size(); ++j) {
      if (j == largest) continue;
      if (paths[j].value > 0.0 && paths[j].value < threshold) {
        paths[largest].value += paths[j].value;
        paths[j].value = 0.0;  // kept with zero value so w_i stays visible
      }
    }

    auto& virt = out.receiver_flow[i];
    std::fill(virt.begin(), virt.end(), 0.0);
    for (const auto& p : paths)
      for (int e : p.links) virt[static_cast<size_t>(e)] += p.value;
  }

  for (int e = 0; e < m; ++e) {
    double top = 0.0;
    for (const auto& virt : out.receiver_flow) top = std::max(top, virt[static_cast<size_t>(e)]);
    out.link_flow[static_cast<size_t>(e)] = top;
  }
  return out;
}

double granularity(const UnitExtremeFlow& flow) {
  double smallest = std::numeric_limits<double>::infinity();
  for (double f : flow.link_flow)
    if (f > kPositiveFlowTol) smallest = std::min(smallest, f);
  if (!std::isfinite(smallest)) throw Error("granularity: flow has no positive link load");
  return smallest;
}

std::vector<FlowCheck> verify_unit_flow(const Network& net, const MulticastRequest& r,
                                        const MinCostResult& result) {
  constexpr double kTol = 1e-9;
  const int m = net.link_count();
  const auto& flow = result.flow;
  std::vector<FlowCheck> checks;
  auto fail = [&](const std::string& name, const std::string& detail) {
    checks.push_back(FlowCheck{name, false, detail});
  };
  auto pass = [&](const std::string& name) { checks.push_back(FlowCheck{name, true, ""}); };

  bool conserved = true;
  int source = net.node_index(r.source);
  for (size_t i = 0; i < flow.receivers.size(); ++i) {
    int sink = net.node_index(flow.receivers[i]);
    for (int v = 0; v < net.node_count() && conserved; ++v) {
      double netflow = 0.0;
      for (int e : net.out_links(v)) netflow += flow.receiver_flow[i][static_cast<size_t>(e)];
      for (int e : net.in_links(v)) netflow -= flow.receiver_flow[i][static_cast<size_t>(e)];
      double want = v == source ? 1.0 : (v == sink ? -1.0 : 0.0);
      if (std::abs(netflow - want) > kTol) {
        conserved = false;
        fail("unit-conservation", "receiver " + flow.receivers[i] + " node " +
                                      net.nodes()[static_cast<size_t>(v)]);
      }
    }
  }
  if (conserved) pass("unit-conservation");

  bool coupled = true;
  for (size_t i = 0; i < flow.receivers.size() && coupled; ++i)
    for (int e = 0; e < m; ++e)
      if (flow.receiver_flow[i][static_cast<size_t>(e)] > flow.link_flow[static_cast<size_t>(e)] + kTol) {
        coupled = false;
        fail("coupling", "receiver " + flow.receivers[i] + " link " + net.link(e).id);
        break;
      }
  if (coupled) pass("coupling");

  bool capped = true;
  double mu = static_cast<double>(result.criteria.load_factor);
  for (int e = 0; e < m; ++e)
    if (flow.link_flow[static_cast<size_t>(e)] > mu * net.link(e).capacity / r.size + kTol) {
      capped = false;
      fail("capacity", "link " + net.link(e).id);
      break;
    }
  if (capped) pass("capacity");

  if (flow.paths) {
    bool ok = true;
    for (size_t i = 0; i < flow.receivers.size() && ok; ++i) {
      const auto& paths = (*flow.paths)[i];
      double total = 0.0;
      std::vector<double> agg(static_cast<size_t>(m), 0.0);
      for (const auto& p : paths) {
        total += p.value;
        for (int e : p.links) agg[static_cast<size_t>(e)] += p.value;
      }
      if (std::abs(total - 1.0) > kTol) {
        ok = false;
        fail("path-sum", "receiver " + flow.receivers[i]);
      }
      for (int e = 0; e < m && ok; ++e)
        if (std::abs(agg[static_cast<size_t>(e)] - flow.receiver_flow[i][static_cast<size_t>(e)]) > kTol) {
          ok = false;
          fail("path-aggregation", "receiver " + flow.receivers[i] + " link " + net.link(e).id);
        }
      if (result.criteria.cost_factor == 2) {
        double w = static_cast<double>(paths.size());
        double threshold = 1.0 / (2.0 * w * w);
        for (const auto& p : paths)
          if (p.value > 0.0 && p.value < threshold - 1e-12) {
            ok = false;
            fail("path-threshold", "receiver " + flow.receivers[i]);
            break;
          }
      }
    }
    if (ok) pass("paths");
  }
  return checks;
}

MincostSolver::MincostSolver(const Network& net) : net_(&net) {}

MinCostResult MincostSolver::run(const MulticastRequest& r, const PriceSystem& prices) {
  prices.validate(*net_);
  validate_request(*net_, r);
  Key key{r.source, r.receivers, r.size};
  auto costs = normalized_costs(*net_, prices, static_cast<int>(r.receivers.size()));

  auto it = cache_.find(key);
  if (it == cache_.end()) {
    Entry entry;
    entry.solver = std::make_unique<lp::SimplexSolver>(build_lp_with_costs(*net_, r, costs));
    it = cache_.emplace(std::move(key), std::move(entry)).first;
  }

  lp::Solution sol = it->second.solved_once ? it->second.solver->resolve(costs)
                                            : it->second.solver->solve();
  it->second.solved_once = true;
  if (sol.status == lp::Status::kInfeasible) throw InfeasibleRequestError(r.id);
  if (sol.status != lp::Status::kOptimal) throw Error("min-cost LP is unbounded");
  return extract_result(*net_, r, prices, sol);
}

MinCostResult MincostSolver::exact(const MulticastRequest& r, const PriceSystem& prices) {
  return run(r, prices);
}

MinCostResult MincostSolver::approx(const MulticastRequest& r, const PriceSystem& prices) {
  return finish_approx(*net_, r, prices, run(r, prices));
}

}  // namespace misnc
