#include "misnc/network.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>

namespace misnc {

int Network::node_index(const std::string& id) const {
  auto it = node_index_.find(id);
  if (it == node_index_.end()) throw Error("unknown node '" + id + "'");
  return it->second;
}

int Network::link_index(const std::string& id) const {
  auto it = link_index_.find(id);
  if (it == link_index_.end()) throw Error("unknown link '" + id + "'");
  return it->second;
}

std::vector<double> Network::capacities() const {
  std::vector<double> caps(links_.size());
  for (size_t e = 0; e < links_.size(); ++e) caps[e] = links_[e].capacity;
  return caps;
}

Network build_network(const std::vector<std::string>& nodes,
                      const std::vector<LinkSpec>& links) {
  Network net;
  for (const auto& id : nodes) {
    if (net.node_index_.count(id)) continue;  // repeated declarations are harmless
    net.node_index_.emplace(id, static_cast<int>(net.nodes_.size()));
    net.nodes_.push_back(id);
  }

  std::vector<LinkSpec> ordered = links;
  std::sort(ordered.begin(), ordered.end(),
            [](const LinkSpec& a, const LinkSpec& b) { return a.id < b.id; });

  net.out_.resize(net.nodes_.size());
  net.in_.resize(net.nodes_.size());
  for (const auto& spec : ordered) {
    if (net.link_index_.count(spec.id)) throw Error("duplicate link id '" + spec.id + "'");
    auto tail = net.node_index_.find(spec.from);
    auto head = net.node_index_.find(spec.to);
    if (tail == net.node_index_.end())
      throw Error("link '" + spec.id + "': unknown endpoint node '" + spec.from + "'");
    if (head == net.node_index_.end())
      throw Error("link '" + spec.id + "': unknown endpoint node '" + spec.to + "'");
    if (!(spec.capacity > 0.0))
      throw Error("link '" + spec.id + "': capacity must be positive");
    int e = static_cast<int>(net.links_.size());
    net.link_index_.emplace(spec.id, e);
    net.links_.push_back(Link{spec.id, tail->second, head->second, spec.capacity});
    net.out_[static_cast<size_t>(tail->second)].push_back(e);
    net.in_[static_cast<size_t>(head->second)].push_back(e);
  }
  return net;
}

MulticastRequest make_request(std::string id, std::string source,
                              std::vector<std::string> receivers, double size,
                              const Network& net) {
  std::sort(receivers.begin(), receivers.end());
  receivers.erase(std::unique(receivers.begin(), receivers.end()), receivers.end());
  MulticastRequest r{std::move(id), std::move(source), std::move(receivers), size};
  validate_request(net, r);
  return r;
}

void validate_request(const Network& net, const MulticastRequest& r) {
  if (r.receivers.empty()) throw Error("request '" + r.id + "': no receivers");
  if (!(r.size > 0.0)) throw Error("request '" + r.id + "': size must be positive");
  if (!net.has_node(r.source))
    throw Error("request '" + r.id + "': unknown source node '" + r.source + "'");
  for (const auto& t : r.receivers) {
    if (!net.has_node(t))
      throw Error("request '" + r.id + "': unknown receiver node '" + t + "'");
    if (t == r.source)
      throw Error("request '" + r.id + "': source cannot be a receiver");
  }
}

double max_flow(const Network& net, int source, int sink, std::span<const double> caps) {
  if (caps.size() != static_cast<size_t>(net.link_count()))
    throw Error("max_flow: capacity vector size mismatch");
  if (source == sink) throw Error("max_flow: source equals sink");

  const size_t m = caps.size();
  std::vector<double> flow(m, 0.0);
  double total = 0.0;
  constexpr double kResidualTol = 1e-12;

  // Edmonds-Karp: shortest augmenting paths over forward and reverse residuals.
  while (true) {
    std::vector<int> via_link(static_cast<size_t>(net.node_count()), -1);
    std::vector<signed char> via_dir(static_cast<size_t>(net.node_count()), 0);
    std::vector<char> seen(static_cast<size_t>(net.node_count()), 0);
    std::deque<int> queue;
    queue.push_back(source);
    seen[static_cast<size_t>(source)] = 1;
    while (!queue.empty() && !seen[static_cast<size_t>(sink)]) {
      int v = queue.front();
      queue.pop_front();
      for (int e : net.out_links(v)) {
        int w = net.link(e).head;
        if (!seen[static_cast<size_t>(w)] && caps[static_cast<size_t>(e)] - flow[static_cast<size_t>(e)] > kResidualTol) {
          seen[static_cast<size_t>(w)] = 1;
          via_link[static_cast<size_t>(w)] = e;
          via_dir[static_cast<size_t>(w)] = 1;
          queue.push_back(w);
        }
      }
      for (int e : net.in_links(v)) {
        int w = net.link(e).tail;
        if (!seen[static_cast<size_t>(w)] && flow[static_cast<size_t>(e)] > kResidualTol) {
          seen[static_cast<size_t>(w)] = 1;
          via_link[static_cast<size_t>(w)] = e;
          via_dir[static_cast<size_t>(w)] = -1;
          queue.push_back(w);
        }
      }
    }
    if (!seen[static_cast<size_t>(sink)]) break;

    double push = std::numeric_limits<double>::infinity();
    for (int v = sink; v != source;) {
      int e = via_link[static_cast<size_t>(v)];
      if (via_dir[static_cast<size_t>(v)] > 0) {
        push = std::min(push, caps[static_cast<size_t>(e)] - flow[static_cast<size_t>(e)]);
        v = net.link(e).tail;
      } else {
        push = std::min(push, flow[static_cast<size_t>(e)]);
        v = net.link(e).head;
      }
    }
    for (int v = sink; v != source;) {
      int e = via_link[static_cast<size_t>(v)];
      if (via_dir[static_cast<size_t>(v)] > 0) {
        flow[static_cast<size_t>(e)] += push;
        v = net.link(e).tail;
      } else {
        flow[static_cast<size_t>(e)] -= push;
        v = net.link(e).head;
      }
    }
    total += push;
  }
  return total;
}

double max_flow(const Network& net, const std::string& source, const std::string& sink,
                std::span<const double> caps) {
  return max_flow(net, net.node_index(source), net.node_index(sink), caps);
}

bool request_feasible(const Network& net, const MulticastRequest& r) {
  validate_request(net, r);
  std::vector<double> caps(static_cast<size_t>(net.link_count()));
  for (int e = 0; e < net.link_count(); ++e)
    caps[static_cast<size_t>(e)] = net.link(e).capacity / r.size;
  int source = net.node_index(r.source);
  for (const auto& t : r.receivers) {
    if (max_flow(net, source, net.node_index(t), caps) < 1.0 - kFeasibilityTol) return false;
  }
  return true;
}

}  // namespace misnc
