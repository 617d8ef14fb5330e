#include "misnc/instance.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

namespace misnc {

using nlohmann::json;

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::kOffline: return "offline";
    case Mode::kOnline: return "online";
    case Mode::kMincost: return "mincost";
  }
  throw Error("unknown mode");
}

Mode mode_from_string(const std::string& s) {
  if (s == "offline") return Mode::kOffline;
  if (s == "online") return Mode::kOnline;
  if (s == "mincost") return Mode::kMincost;
  throw Error("mode: expected offline, online, or mincost, got '" + s + "'");
}

std::string to_string(KernelVariant variant) {
  return variant == KernelVariant::kExact ? "exact" : "shifted";
}

KernelVariant variant_from_string(const std::string& s) {
  if (s == "exact") return KernelVariant::kExact;
  if (s == "shifted") return KernelVariant::kShifted;
  throw Error("variant: expected exact or shifted, got '" + s + "'");
}

namespace {

void expect_keys(const json& obj, const std::string& path,
                 std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed)
      if (it.key() == key) known = true;
    if (!known) throw Error(path + ": unknown field '" + it.key() + "'");
  }
}

double get_number(const json& obj, const std::string& path, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw Error(path + "." + key + ": expected a number");
  return v.get<double>();
}

std::string get_string(const json& obj, const std::string& path, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_string()) throw Error(path + "." + key + ": expected a string");
  return v.get<std::string>();
}

}  // namespace

Network InstanceDocument::build_network() const {
  std::vector<LinkSpec> specs;
  specs.reserve(links.size());
  for (const auto& l : links) specs.push_back(LinkSpec{l.id, l.from, l.to, l.capacity});
  return misnc::build_network(nodes, specs);
}

std::vector<MulticastRequest> InstanceDocument::build_requests(const Network& net) const {
  std::vector<MulticastRequest> out;
  out.reserve(requests.size());
  for (const auto& r : requests)
    out.push_back(make_request(r.id, r.source, r.receivers, r.size, net));
  return out;
}

InstanceDocument parse_instance(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("instance parse error: ") + e.what());
  }
  if (!doc.is_object()) throw Error("instance: top level must be an object");
  expect_keys(doc, "instance", {"network", "requests", "mode", "params"});

  InstanceDocument out;
  if (!doc.contains("network")) throw Error("instance: missing 'network'");
  const json& net = doc.at("network");
  expect_keys(net, "network", {"nodes", "links"});
  if (!net.contains("nodes") || !net.at("nodes").is_array())
    throw Error("network.nodes: expected an array");
  for (const auto& n : net.at("nodes")) {
    if (!n.is_string()) throw Error("network.nodes: expected strings");
    out.nodes.push_back(n.get<std::string>());
  }
  if (net.contains("links")) {
    if (!net.at("links").is_array()) throw Error("network.links: expected an array");
    int idx = 0;
    for (const auto& l : net.at("links")) {
      std::string path = "network.links[" + std::to_string(idx++) + "]";
      expect_keys(l, path, {"id", "from", "to", "capacity", "weight"});
      InstanceLink link;
      link.id = get_string(l, path, "id");
      link.from = get_string(l, path, "from");
      link.to = get_string(l, path, "to");
      link.capacity = get_number(l, path, "capacity");
      if (l.contains("weight")) link.weight = get_number(l, path, "weight");
      out.links.push_back(std::move(link));
    }
  }

  if (doc.contains("requests")) {
    if (!doc.at("requests").is_array()) throw Error("requests: expected an array");
    int idx = 0;
    for (const auto& r : doc.at("requests")) {
      std::string path = "requests[" + std::to_string(idx++) + "]";
      expect_keys(r, path, {"id", "source", "receivers", "size"});
      InstanceRequest req;
      req.id = get_string(r, path, "id");
      req.source = get_string(r, path, "source");
      if (!r.contains("receivers") || !r.at("receivers").is_array())
        throw Error(path + ".receivers: expected an array");
      for (const auto& t : r.at("receivers")) {
        if (!t.is_string()) throw Error(path + ".receivers: expected strings");
        req.receivers.push_back(t.get<std::string>());
      }
      req.size = get_number(r, path, "size");
      out.requests.push_back(std::move(req));
    }
  }

  if (doc.contains("mode")) out.mode = mode_from_string(get_string(doc, "instance", "mode"));

  if (doc.contains("params")) {
    const json& p = doc.at("params");
    expect_keys(p, "params",
                {"epsilon", "omega", "phi", "variant", "sigma", "lambda_thr", "seed", "prices"});
    if (p.contains("epsilon")) out.params.epsilon = get_number(p, "params", "epsilon");
    if (p.contains("omega")) out.params.omega = get_number(p, "params", "omega");
    if (p.contains("phi")) out.params.phi = get_number(p, "params", "phi");
    if (p.contains("variant"))
      out.params.variant = variant_from_string(get_string(p, "params", "variant"));
    if (p.contains("sigma")) out.params.sigma = get_number(p, "params", "sigma");
    if (p.contains("lambda_thr")) out.params.lambda_threshold = get_number(p, "params", "lambda_thr");
    if (p.contains("seed")) {
      if (!p.at("seed").is_number_unsigned()) throw Error("params.seed: expected an unsigned integer");
      out.params.seed = p.at("seed").get<std::uint64_t>();
    }
    if (p.contains("prices")) {
      if (!p.at("prices").is_object()) throw Error("params.prices: expected an object");
      for (auto it = p.at("prices").begin(); it != p.at("prices").end(); ++it) {
        if (!it.value().is_number()) throw Error("params.prices." + it.key() + ": expected a number");
        out.params.prices[it.key()] = it.value().get<double>();
      }
    }
  }
  return out;
}

InstanceDocument load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open instance file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

std::string serialize_instance(const InstanceDocument& doc) {
  json links = json::array();
  for (const auto& l : doc.links)
    links.push_back({{"id", l.id}, {"from", l.from}, {"to", l.to}, {"capacity", l.capacity},
                     {"weight", l.weight}});
  json requests = json::array();
  for (const auto& r : doc.requests)
    requests.push_back(
        {{"id", r.id}, {"source", r.source}, {"receivers", r.receivers}, {"size", r.size}});

  json params = {{"phi", doc.params.phi},
                 {"variant", to_string(doc.params.variant)},
                 {"sigma", doc.params.sigma},
                 {"lambda_thr", doc.params.lambda_threshold},
                 {"seed", doc.params.seed}};
  if (doc.params.epsilon) params["epsilon"] = *doc.params.epsilon;
  if (doc.params.omega) params["omega"] = *doc.params.omega;
  if (!doc.params.prices.empty()) params["prices"] = doc.params.prices;

  json out = {{"network", {{"nodes", doc.nodes}, {"links", links}}},
              {"requests", requests},
              {"mode", to_string(doc.mode)},
              {"params", params}};
  return out.dump(2) + "\n";
}

void save_instance(const InstanceDocument& doc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write instance file '" + path.string() + "'");
  out << serialize_instance(doc);
}

namespace {

const std::vector<std::array<const char*, 3>>& butterfly_links() {
  static const std::vector<std::array<const char*, 3>> links = {
      {"e1", "1", "3"},  {"e2", "1", "4"},  {"e3", "3", "8"},   {"e4", "3", "7"},
      {"e5", "4", "7"},  {"e6", "4", "10"}, {"e7", "2", "5"},   {"e8", "2", "6"},
      {"e9", "5", "12"}, {"e10", "7", "9"}, {"e11", "5", "7"},  {"e12", "6", "7"},
      {"e13", "6", "10"}, {"e14", "9", "8"}, {"e15", "9", "10"}, {"e16", "9", "12"}};
  return links;
}

// Unbiased bounded draw; hand-rolled so traces are reproducible across
// standard library implementations.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t n) {
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                        std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

}  // namespace

std::pair<Network, std::vector<MulticastRequest>> build_extended_butterfly(double request_size) {
  std::vector<std::string> nodes;
  for (int v = 1; v <= 12; ++v) nodes.push_back(std::to_string(v));
  std::vector<LinkSpec> specs;
  for (const auto& [id, from, to] : butterfly_links())
    specs.push_back(LinkSpec{id, from, to, 100.0});
  Network net = misnc::build_network(nodes, specs);
  std::vector<MulticastRequest> requests = {
      make_request("r1", "1", {"8", "10"}, request_size, net),
      make_request("r2", "2", {"10", "12"}, request_size, net)};
  return {std::move(net), std::move(requests)};
}

InstanceDocument butterfly_document(double request_size, Mode mode) {
  InstanceDocument doc;
  for (int v = 1; v <= 12; ++v) doc.nodes.push_back(std::to_string(v));
  for (const auto& [id, from, to] : butterfly_links())
    doc.links.push_back(InstanceLink{id, from, to, 100.0, 1.0});
  doc.requests.push_back(InstanceRequest{"r1", "1", {"8", "10"}, request_size});
  doc.requests.push_back(InstanceRequest{"r2", "2", {"10", "12"}, request_size});
  doc.mode = mode;
  return doc;
}

std::vector<MulticastRequest> generate_online_trace(std::uint64_t seed, int per_session,
                                                    double request_size) {
  auto [net, sessions] = build_extended_butterfly(request_size);
  std::vector<MulticastRequest> trace;
  trace.reserve(static_cast<size_t>(per_session) * sessions.size());
  for (const auto& session : sessions) {
    for (int k = 1; k <= per_session; ++k) {
      MulticastRequest r = session;
      char suffix[16];
      std::snprintf(suffix, sizeof suffix, "-%03d", k);
      r.id = session.id + suffix;
      trace.push_back(std::move(r));
    }
  }
  std::mt19937_64 rng(seed);
  for (size_t i = trace.size(); i > 1; --i)
    std::swap(trace[i - 1], trace[draw_below(rng, i)]);
  return trace;
}

std::vector<MulticastRequest> matched_online_trace(const std::vector<MulticastRequest>& offline,
                                                   std::uint64_t seed, int per_request) {
  if (per_request < 1) throw Error("matched_online_trace: per_request must be positive");
  std::vector<MulticastRequest> trace;
  trace.reserve(offline.size() * static_cast<size_t>(per_request));
  for (const auto& session : offline) {
    for (int k = 1; k <= per_request; ++k) {
      MulticastRequest r = session;
      char suffix[16];
      std::snprintf(suffix, sizeof suffix, "-%03d", k);
      r.id = session.id + suffix;
      r.size = session.size / per_request;
      trace.push_back(std::move(r));
    }
  }
  std::mt19937_64 rng(seed);
  for (size_t i = trace.size(); i > 1; --i)
    std::swap(trace[i - 1], trace[draw_below(rng, i)]);
  return trace;
}

}  // namespace misnc
