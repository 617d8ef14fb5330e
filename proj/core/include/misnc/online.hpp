#pragma once

#include <optional>
#include <string>
#include <vector>

#include "misnc/mincost.hpp"
#include "misnc/network.hpp"
#include "misnc/offline.hpp"  // CertificateCheck

namespace misnc {

enum class KernelVariant { kExact, kShifted };

struct OnlineConfig {
  double phi = 1.0;
  KernelVariant variant = KernelVariant::kExact;
  double sigma = 2.0;             // shifted variant only
  double lambda_threshold = 1.0;  // shifted accept bound; the exact variant uses 1
};

struct OnlineDecision {
  std::string request_id;
  bool accepted = false;
  double size = 0.0;
  double cost = 0.0;         // kernel cost L at decision time
  double dual_weight = 0.0;  // z_r (accepted requests only)
  std::optional<UnitExtremeFlow> flow;
  double delta_primal = 0.0;
  double delta_dual = 0.0;
};

// Everything needed to recheck one request's inequalities after the fact.
struct RequestSnapshot {
  std::string request_id;
  double size = 0.0;
  bool accepted = false;
  double cost = 0.0;
  double dual_weight = 0.0;
  double granularity = 0.0;
  std::vector<double> link_flow;  // empty when rejected
  std::vector<double> prices_before;
  std::vector<double> prices_after;
};

struct OnlineMetrics {
  double acceptance_ratio = 0.0;  // 0 when no request was seen
  double violation_ratio = 0.0;   // max_e load / capacity
  int accepted = 0;
  int total = 0;
  int bottleneck_link = -1;  // arg-max of load / capacity, -1 when idle
  std::optional<double> bound_b;            // price bound B
  std::optional<double> utilization_bound;  // log(Bm/phi + 1), sigma-scaled if shifted
  std::vector<double> utilization;          // per link
  std::vector<double> delta_primal;
  std::vector<double> delta_dual;
};

// Sequential primal-dual admission: each arriving request is priced by the
// min-cost kernel, accepted iff the cost clears the threshold, and the link
// prices are bumped multiplicatively plus the phi/m term. Rejected requests
// leave the state untouched.
class OnlineRouter {
 public:
  OnlineRouter(const Network& net, OnlineConfig config);

  const OnlineDecision& process(const MulticastRequest& r);

  OnlineMetrics metrics() const;
  const Network& network() const { return *net_; }
  const OnlineConfig& config() const { return config_; }
  const PriceSystem& prices() const { return prices_; }
  const std::vector<double>& loads() const { return load_; }
  const std::vector<OnlineDecision>& decisions() const { return decisions_; }
  const std::vector<RequestSnapshot>& snapshots() const { return snapshots_; }
  double min_granularity() const { return min_granularity_; }

 private:
  const Network* net_;
  OnlineConfig config_;
  PriceSystem prices_;
  std::vector<double> load_;
  std::vector<OnlineDecision> decisions_;
  std::vector<RequestSnapshot> snapshots_;
  MincostSolver solver_;
  double min_granularity_;
  int accepted_ = 0;
};

struct OnlineCertificates {
  CertificateCheck dual_feasibility;   // z_r + d_r L >= d_r per accepted request
  CertificateCheck ratio_bound;        // per-request dual/primal increase bound
  CertificateCheck price_bound;        // final prices <= B
  CertificateCheck utilization_bound;  // per-link load bound
  CertificateCheck monotonicity;       // prices never decrease
  bool all_passed() const {
    return dual_feasibility.passed && ratio_bound.passed && price_bound.passed &&
           utilization_bound.passed && monotonicity.passed;
  }
};

// Recomputes every bound from the snapshots alone.
OnlineCertificates verify_online_certificates(const Network& net, const OnlineConfig& config,
                                              const std::vector<RequestSnapshot>& snapshots);
OnlineCertificates verify_online_certificates(const OnlineRouter& router);

}  // namespace misnc
