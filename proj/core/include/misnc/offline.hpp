#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "misnc/mincost.hpp"
#include "misnc/network.hpp"

namespace misnc {

struct FptasParams {
  double epsilon = 0.1;
  double delta = 0.0;
  std::optional<double> omega;
};

// delta = ((1 - epsilon) / m)^(1 / epsilon)
FptasParams params_from_epsilon(double epsilon, int link_count);
// epsilon = 1 - (1 + omega)^(-1/3), then delta as above
FptasParams params_from_omega(double omega, int link_count);

struct IterationRecord {
  std::string request_id;
  UnitExtremeFlow flow;
  double cost = 0.0;
};

// Per-run dual bookkeeping: the incrementally tracked dual objective against
// its from-scratch recomputation, the latest per-request min costs, and the
// per-phase ratio estimates that feed the phase cap.
struct DualAccount {
  double dual_incremental = 0.0;
  double dual_recomputed = 0.0;
  std::map<std::string, double> last_mincost;
  double alpha_last_phase = 0.0;   // sum_r d_r * mincost_r over the last phase
  double beta_estimate = 2.0;      // max(2, observed dual/alpha)
  double gamma = 0.0;              // final dual / lambda
  std::vector<double> kappa;       // per-link raw load / capacity
};

struct OfflineSolution {
  double lambda = 0.0;
  std::vector<double> link_load;  // scaled loads x_e
  std::vector<double> raw_load;   // pre-scaling loads
  int phases = 0;
  double scale = 0.0;  // log_{1+eps}(1/delta)
  std::vector<IterationRecord> trace;
  std::vector<double> dual_trace;  // dual objective after each phase
  std::vector<double> final_prices;
  DualAccount account;
};

struct FptasOptions {
  bool record_trace = true;
  long max_phases = 2'000'000;  // absolute guard on top of the derived cap
};

// Phase/iteration primal-dual scheme: prices start at delta / c_e, every
// iteration routes one request at its exact min-cost unit flow and applies the
// multiplicative price update, phases repeat until the dual objective reaches
// one, and loads plus the throughput multiplier are scaled by
// log_{1+eps}(1/delta) at the end.
OfflineSolution run_fptas(const Network& net, const std::vector<MulticastRequest>& requests,
                          const FptasParams& params, const FptasOptions& options = {});

double dual_objective(const Network& net, const PriceSystem& prices);

// Exact optimum of the concurrent-throughput LP in arc form; the reference
// value for the approximation-guarantee certificate.
double concurrent_lp_optimum(const Network& net, const std::vector<MulticastRequest>& requests);

struct CertificateCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct OfflineCertificates {
  CertificateCheck scaling_bound;    // every raw load / capacity stays below the scale factor
  CertificateCheck scaled_feasible;  // scaled loads respect capacities
  CertificateCheck approx_guarantee; // lambda >= (1-eps)^3 * lambda_lp
  CertificateCheck weak_duality;     // lambda <= lambda_lp and final dual / lambda >= 1
  std::optional<double> lambda_lp;
  bool all_passed() const {
    return scaling_bound.passed && scaled_feasible.passed && approx_guarantee.passed &&
           weak_duality.passed;
  }
};

OfflineCertificates verify_offline_certificates(const OfflineSolution& solution,
                                                const Network& net,
                                                const std::vector<MulticastRequest>& requests,
                                                const FptasParams& params);

}  // namespace misnc
