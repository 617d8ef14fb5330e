#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "misnc/lp.hpp"
#include "misnc/network.hpp"

namespace misnc {

// Loads at or below this threshold count as zero when measuring granularity
// and when peeling paths.
inline constexpr double kPositiveFlowTol = 1e-9;

// Nonnegative dual price per link, aligned with Network link order.
struct PriceSystem {
  std::vector<double> values;

  static PriceSystem zero(const Network& net);
  static PriceSystem uniform(const Network& net, double value);
  void validate(const Network& net) const;
  double operator[](int e) const { return values[static_cast<size_t>(e)]; }
};

struct PathFlow {
  std::vector<int> links;  // link indices from source to receiver
  double value = 0.0;
};

// One unit-rate coded multicast flow: the physical per-link flow plus one
// virtual unit flow per receiver, optionally decomposed into paths.
struct UnitExtremeFlow {
  std::string request_id;
  std::string source;
  std::vector<std::string> receivers;              // sorted, matches request
  std::vector<double> link_flow;                   // f_e, size m
  std::vector<std::vector<double>> receiver_flow;  // [receiver][link]
  std::optional<std::vector<std::vector<PathFlow>>> paths;  // per receiver
};

// (cost factor, load factor) guarantee of the kernel that produced a flow:
// (1,1) for the exact solve, (2,2) after flow shifting.
struct CriteriaTag {
  int cost_factor = 1;
  int load_factor = 1;
};

struct MinCostResult {
  UnitExtremeFlow flow;
  double cost = 0.0;         // sum_e p_e f_e
  double granularity = 0.0;  // smallest positive link load
  CriteriaTag criteria;
};

// Arc-based LP for the min-cost unit coded multicast: variables f_e plus
// per-receiver flows f_{i,e}; per-receiver conservation equalities, coupling
// f_{i,e} <= f_e, and capacity f_e <= c_e / size; objective sum_e p_e f_e.
lp::LinearProgram build_mincost_lp(const Network& net, const MulticastRequest& r,
                                   const PriceSystem& prices);

MinCostResult mincost_exact(const Network& net, const MulticastRequest& r,
                            const PriceSystem& prices);
MinCostResult mincost_approx(const Network& net, const MulticastRequest& r,
                             const PriceSystem& prices);

// Greedy bottleneck peeling of one receiver's virtual flow, walking positive
// residual links in link-id order. Errors if positive residual mass remains
// once no source-to-receiver path is left (a cycle in the input flow).
std::vector<PathFlow> decompose_paths(const Network& net, const UnitExtremeFlow& flow,
                                      const std::string& receiver);

// Moves every path flow below 1 / (2 w_i^2) onto the receiver's largest path
// (w_i = path count before shifting), then rebuilds the per-link flows as the
// per-receiver maxima. Requires decomposed paths for every receiver.
UnitExtremeFlow shift_small_flows(const Network& net, const UnitExtremeFlow& flow);

// Smallest positive link load of the flow; errors when every load is zero.
double granularity(const UnitExtremeFlow& flow);

// Flow-validity diagnostics shared by reports and tests: conservation per
// receiver, coupling, capacity within load_factor, path bookkeeping.
struct FlowCheck {
  std::string name;
  bool passed = true;
  std::string detail;
};
std::vector<FlowCheck> verify_unit_flow(const Network& net, const MulticastRequest& r,
                                        const MinCostResult& result);

// Caches one warm simplex per distinct (source, receivers, size) so that
// primal-dual loops re-solve each request type against a new objective only.
class MincostSolver {
 public:
  explicit MincostSolver(const Network& net);

  MinCostResult exact(const MulticastRequest& r, const PriceSystem& prices);
  MinCostResult approx(const MulticastRequest& r, const PriceSystem& prices);

 private:
  struct Entry {
    std::unique_ptr<lp::SimplexSolver> solver;
    bool solved_once = false;
  };
  using Key = std::tuple<std::string, std::vector<std::string>, double>;

  MinCostResult run(const MulticastRequest& r, const PriceSystem& prices);

  const Network* net_;
  std::map<Key, Entry> cache_;
};

}  // namespace misnc
