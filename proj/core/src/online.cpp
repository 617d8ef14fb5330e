#include "misnc/online.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace misnc {

OnlineRouter::OnlineRouter(const Network& net, OnlineConfig config)
    : net_(&net),
      config_(config),
      prices_(PriceSystem::zero(net)),
      load_(static_cast<size_t>(net.link_count()), 0.0),
      solver_(net),
      min_granularity_(std::numeric_limits<double>::infinity()) {
  if (!(config_.phi > 0.0)) throw Error("online config: phi must be positive");
  if (config_.variant == KernelVariant::kShifted) {
    if (!(config_.sigma >= 1.0)) throw Error("online config: sigma must be at least 1");
    if (!(config_.lambda_threshold > 0.0 && config_.lambda_threshold <= config_.sigma))
      throw Error("online config: accept threshold must lie in (0, sigma]");
  }
}

const OnlineDecision& OnlineRouter::process(const MulticastRequest& r) {
  validate_request(*net_, r);
  const int m = net_->link_count();
  const bool shifted = config_.variant == KernelVariant::kShifted;
  const double sigma = shifted ? config_.sigma : 1.0;
  const double threshold = shifted ? config_.lambda_threshold : 1.0;

  RequestSnapshot snap;
  snap.request_id = r.id;
  snap.size = r.size;
  snap.prices_before = prices_.values;

  OnlineDecision decision;
  decision.request_id = r.id;
  decision.size = r.size;

  std::optional<MinCostResult> result;
  try {
    result = shifted ? solver_.approx(r, prices_) : solver_.exact(r, prices_);
  } catch (const InfeasibleRequestError&) {
    // empty polytope: reject, nothing changes
  }

  if (result && result->cost <= threshold) {
    decision.accepted = true;
    decision.cost = result->cost;
    decision.dual_weight = r.size * (1.0 - result->cost / sigma);
    decision.delta_primal = r.size;

    double price_mass = 0.0;
    for (int e = 0; e < m; ++e) {
      double fe = result->flow.link_flow[static_cast<size_t>(e)];
      if (fe == 0.0) continue;
      double add = fe * r.size;
      load_[static_cast<size_t>(e)] += add;
      double ratio = add / (sigma * net_->link(e).capacity);
      double bump = prices_.values[static_cast<size_t>(e)] * ratio + (config_.phi / m) * ratio;
      prices_.values[static_cast<size_t>(e)] += bump;
      price_mass += bump * net_->link(e).capacity;
    }
    decision.delta_dual = decision.dual_weight + price_mass;
    min_granularity_ = std::min(min_granularity_, result->granularity);
    snap.granularity = result->granularity;
    snap.link_flow = result->flow.link_flow;
    decision.flow = std::move(result->flow);
    ++accepted_;
  } else {
    decision.accepted = false;
    decision.cost = result ? result->cost : std::numeric_limits<double>::infinity();
  }

  snap.accepted = decision.accepted;
  snap.cost = decision.cost;
  snap.dual_weight = decision.dual_weight;
  snap.prices_after = prices_.values;
  snapshots_.push_back(std::move(snap));
  decisions_.push_back(std::move(decision));
  return decisions_.back();
}

OnlineMetrics OnlineRouter::metrics() const {
  const int m = net_->link_count();
  OnlineMetrics out;
  out.accepted = accepted_;
  out.total = static_cast<int>(decisions_.size());
  out.acceptance_ratio = out.total > 0 ? static_cast<double>(accepted_) / out.total : 0.0;

  out.utilization.assign(static_cast<size_t>(m), 0.0);
  for (int e = 0; e < m; ++e) {
    double u = load_[static_cast<size_t>(e)] / net_->link(e).capacity;
    out.utilization[static_cast<size_t>(e)] = u;
    if (u > out.violation_ratio) {
      out.violation_ratio = u;
      out.bottleneck_link = e;
    }
  }

  if (accepted_ > 0) {
    const bool shifted = config_.variant == KernelVariant::kShifted;
    double b = shifted ? (2.0 * config_.lambda_threshold + config_.phi) / min_granularity_
                       : (1.0 + config_.phi) / min_granularity_;
    out.bound_b = b;
    double bound = std::log(b * m / config_.phi + 1.0);
    out.utilization_bound = shifted ? config_.sigma * bound : bound;
  }

  out.delta_primal.reserve(decisions_.size());
  out.delta_dual.reserve(decisions_.size());
  for (const auto& d : decisions_) {
    out.delta_primal.push_back(d.delta_primal);
    out.delta_dual.push_back(d.delta_dual);
  }
  return out;
}

OnlineCertificates verify_online_certificates(const Network& net, const OnlineConfig& config,
                                              const std::vector<RequestSnapshot>& snapshots) {
  constexpr double kTol = 1e-9;
  const int m = net.link_count();
  const bool shifted = config.variant == KernelVariant::kShifted;
  const double sigma = shifted ? config.sigma : 1.0;

  OnlineCertificates certs;
  certs.dual_feasibility = CertificateCheck{"dual-feasibility", true, ""};
  certs.ratio_bound = CertificateCheck{"ratio-bound", true, ""};
  certs.price_bound = CertificateCheck{"price-bound", true, ""};
  certs.utilization_bound = CertificateCheck{"utilization-bound", true, ""};
  certs.monotonicity = CertificateCheck{"price-monotonicity", true, ""};

  std::vector<double> load(static_cast<size_t>(m), 0.0);
  double min_granularity = std::numeric_limits<double>::infinity();
  const std::vector<double>* prev_after = nullptr;
  double ratio_limit = 1.0 + config.phi / sigma;

  for (const auto& snap : snapshots) {
    if (prev_after && certs.monotonicity.passed && *prev_after != snap.prices_before) {
      certs.monotonicity.passed = false;
      certs.monotonicity.detail = "snapshot chain broken at request " + snap.request_id;
    }
    if (certs.monotonicity.passed) {
      for (int e = 0; e < m; ++e) {
        if (snap.prices_after[static_cast<size_t>(e)] < snap.prices_before[static_cast<size_t>(e)] - 1e-15) {
          certs.monotonicity.passed = false;
          certs.monotonicity.detail =
              "price decreased on link " + net.link(e).id + " at request " + snap.request_id;
          break;
        }
      }
    }
    prev_after = &snap.prices_after;
    if (!snap.accepted) continue;

    double cost_now = 0.0;
    for (int e = 0; e < m; ++e)
      cost_now += snap.prices_before[static_cast<size_t>(e)] * snap.link_flow[static_cast<size_t>(e)];
    if (certs.dual_feasibility.passed &&
        snap.dual_weight + snap.size * cost_now < snap.size - kTol) {
      certs.dual_feasibility.passed = false;
      certs.dual_feasibility.detail = "request " + snap.request_id;
    }

    double price_mass = 0.0;
    for (int e = 0; e < m; ++e)
      price_mass += net.link(e).capacity * (snap.prices_after[static_cast<size_t>(e)] -
                                            snap.prices_before[static_cast<size_t>(e)]);
    double ratio = (snap.dual_weight + price_mass) / snap.size;
    if (certs.ratio_bound.passed && ratio > ratio_limit + kTol) {
      certs.ratio_bound.passed = false;
      certs.ratio_bound.detail = "request " + snap.request_id + ": dual/primal increase " +
                                 std::to_string(ratio) + " > " + std::to_string(ratio_limit);
    }

    for (int e = 0; e < m; ++e)
      load[static_cast<size_t>(e)] += snap.link_flow[static_cast<size_t>(e)] * snap.size;
    min_granularity = std::min(min_granularity, snap.granularity);
  }

  if (std::isfinite(min_granularity) && !snapshots.empty()) {
    double b = shifted ? (2.0 * config.lambda_threshold + config.phi) / min_granularity
                       : (1.0 + config.phi) / min_granularity;
    const auto& final_prices = snapshots.back().prices_after;
    for (int e = 0; e < m; ++e) {
      if (final_prices[static_cast<size_t>(e)] > b + kTol) {
        certs.price_bound.passed = false;
        certs.price_bound.detail = "link " + net.link(e).id;
        break;
      }
    }
    double bound = std::log(b * m / config.phi + 1.0);
    if (shifted) bound *= config.sigma;
    for (int e = 0; e < m; ++e) {
      if (load[static_cast<size_t>(e)] / net.link(e).capacity > bound + kTol) {
        certs.utilization_bound.passed = false;
        certs.utilization_bound.detail = "link " + net.link(e).id;
        break;
      }
    }
  }
  return certs;
}

OnlineCertificates verify_online_certificates(const OnlineRouter& router) {
  return verify_online_certificates(router.network(), router.config(), router.snapshots());
}

}  // namespace misnc
