#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "misnc/network.hpp"
#include "misnc/online.hpp"

namespace misnc {

enum class Mode { kOffline, kOnline, kMincost };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& s);
std::string to_string(KernelVariant variant);
KernelVariant variant_from_string(const std::string& s);

// Link weights are accepted and round-tripped for completeness; the engines
// price links through duals only and never read them.
struct InstanceLink {
  std::string id;
  std::string from;
  std::string to;
  double capacity = 0.0;
  double weight = 1.0;
};

struct InstanceRequest {
  std::string id;
  std::string source;
  std::vector<std::string> receivers;
  double size = 0.0;
};

struct InstanceParams {
  std::optional<double> epsilon;
  std::optional<double> omega;
  double phi = 1.0;
  KernelVariant variant = KernelVariant::kExact;
  double sigma = 2.0;
  double lambda_threshold = 1.0;
  std::uint64_t seed = 1;
  std::map<std::string, double> prices;  // mincost mode; empty means unit prices
};

struct InstanceDocument {
  std::vector<std::string> nodes;
  std::vector<InstanceLink> links;
  std::vector<InstanceRequest> requests;
  Mode mode = Mode::kOffline;
  InstanceParams params;

  Network build_network() const;
  std::vector<MulticastRequest> build_requests(const Network& net) const;
};

// Strict parser: unknown fields anywhere in the document are rejected and
// field errors carry their JSON path.
InstanceDocument parse_instance(const std::string& json_text);
InstanceDocument load_instance(const std::filesystem::path& path);
std::string serialize_instance(const InstanceDocument& doc);
void save_instance(const InstanceDocument& doc, const std::filesystem::path& path);

// 12-node / 16-link two-session test network: session one multicasts from
// node 1 to {8, 10}, session two from node 2 to {10, 12}; all capacities 100
// and both sessions share the 7->9 link (e10). At request size 150 the exact
// concurrent throughput multiplier is 1 with e10 the unique saturated link.
std::pair<Network, std::vector<MulticastRequest>> build_extended_butterfly(double request_size);
InstanceDocument butterfly_document(double request_size, Mode mode);

// Seeded arrival sequence over the two butterfly sessions: `per_session`
// requests of each type, all of the given size, in a reproducible shuffle.
std::vector<MulticastRequest> generate_online_trace(std::uint64_t seed, int per_session = 100,
                                                    double request_size = 1.5);

// Matched-demand arrival sequence for arbitrary offline requests: each demand
// of size d becomes `per_request` arrivals of size d / per_request.
std::vector<MulticastRequest> matched_online_trace(const std::vector<MulticastRequest>& offline,
                                                   std::uint64_t seed, int per_request = 100);

}  // namespace misnc
