#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "misnc/errors.hpp"

namespace misnc {

// Comparison slack used when testing flow values against capacities or the
// unit-rate feasibility threshold.
inline constexpr double kFeasibilityTol = 1e-9;

struct LinkSpec {
  std::string id;
  std::string from;
  std::string to;
  double capacity = 0.0;
};

struct Link {
  std::string id;
  int tail = -1;
  int head = -1;
  double capacity = 0.0;
};

// Directed capacitated graph. Immutable once built; links are kept sorted by
// id so the internal ordering does not depend on input order. Parallel links
// are allowed as long as their ids differ.
class Network {
 public:
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int link_count() const { return static_cast<int>(links_.size()); }

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const Link& link(int e) const { return links_[static_cast<size_t>(e)]; }

  bool has_node(const std::string& id) const { return node_index_.count(id) > 0; }
  int node_index(const std::string& id) const;
  int link_index(const std::string& id) const;

  const std::vector<int>& out_links(int node) const { return out_[static_cast<size_t>(node)]; }
  const std::vector<int>& in_links(int node) const { return in_[static_cast<size_t>(node)]; }

  std::vector<double> capacities() const;

  friend Network build_network(const std::vector<std::string>& nodes,
                               const std::vector<LinkSpec>& links);

 private:
  std::vector<std::string> nodes_;
  std::vector<Link> links_;
  std::unordered_map<std::string, int> node_index_;
  std::unordered_map<std::string, int> link_index_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
};

// One coded multicast session: all receivers are served at rate `size` from
// `source`. Receivers are stored sorted and deduplicated.
struct MulticastRequest {
  std::string id;
  std::string source;
  std::vector<std::string> receivers;
  double size = 0.0;
};

Network build_network(const std::vector<std::string>& nodes,
                      const std::vector<LinkSpec>& links);

MulticastRequest make_request(std::string id, std::string source,
                              std::vector<std::string> receivers, double size,
                              const Network& net);

void validate_request(const Network& net, const MulticastRequest& r);

// Exact maximum s-t flow value under the supplied per-link capacities
// (augmenting paths over the link list; `caps` is aligned with link order).
double max_flow(const Network& net, int source, int sink, std::span<const double> caps);
double max_flow(const Network& net, const std::string& source, const std::string& sink,
                std::span<const double> caps);

// True iff every receiver can be reached with a unit flow under capacities
// c_e / size, i.e. per-receiver max flow >= 1.
bool request_feasible(const Network& net, const MulticastRequest& r);

}  // namespace misnc
