#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "misnc/mincost.hpp"

namespace misnc::testing {

namespace {

// Gaussian elimination with partial pivoting; returns false when singular.
bool solve_square(std::vector<std::vector<double>> a, std::vector<double> b,
                  std::vector<double>& x) {
  const size_t n = a.size();
  for (size_t col = 0; col < n; ++col) {
    size_t pivot = col;
    for (size_t row = col + 1; row < n; ++row)
      if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
    if (std::abs(a[pivot][col]) < 1e-10) return false;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (size_t row = col + 1; row < n; ++row) {
      double f = a[row][col] / a[col][col];
      if (f == 0.0) continue;
      for (size_t j = col; j < n; ++j) a[row][j] -= f * a[col][j];
      b[row] -= f * b[col];
    }
  }
  x.assign(n, 0.0);
  for (size_t row = n; row-- > 0;) {
    double v = b[row];
    for (size_t j = row + 1; j < n; ++j) v -= a[row][j] * x[j];
    x[row] = v / a[row][row];
  }
  return true;
}

bool feasible_point(const lp::LinearProgram& prog, const std::vector<double>& x, double tol) {
  for (double v : x)
    if (v < -tol) return false;
  for (const auto& c : prog.constraints()) {
    double lhs = 0.0;
    for (const auto& [var, coeff] : c.terms) lhs += coeff * x[static_cast<size_t>(var)];
    switch (c.rel) {
      case lp::Relation::kLe:
        if (lhs > c.rhs + tol) return false;
        break;
      case lp::Relation::kGe:
        if (lhs < c.rhs - tol) return false;
        break;
      case lp::Relation::kEq:
        if (std::abs(lhs - c.rhs) > tol) return false;
        break;
    }
  }
  return true;
}

}  // namespace

std::optional<double> enumerate_vertex_optimum(const lp::LinearProgram& prog) {
  const int n = prog.variable_count();
  const int rows = prog.constraint_count();
  const int planes = rows + n;  // constraints as equalities, then x_j = 0

  std::vector<int> pick(static_cast<size_t>(n), 0);
  std::optional<double> best;

  // All n-subsets of hyperplanes, lexicographic.
  std::vector<int> idx(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
  if (n > planes) return std::nullopt;

  while (true) {
    std::vector<std::vector<double>> a(static_cast<size_t>(n),
                                       std::vector<double>(static_cast<size_t>(n), 0.0));
    std::vector<double> b(static_cast<size_t>(n), 0.0);
    for (int row = 0; row < n; ++row) {
      int plane = idx[static_cast<size_t>(row)];
      if (plane < rows) {
        const auto& c = prog.constraints()[static_cast<size_t>(plane)];
        for (const auto& [var, coeff] : c.terms) a[static_cast<size_t>(row)][static_cast<size_t>(var)] += coeff;
        b[static_cast<size_t>(row)] = c.rhs;
      } else {
        a[static_cast<size_t>(row)][static_cast<size_t>(plane - rows)] = 1.0;
        b[static_cast<size_t>(row)] = 0.0;
      }
    }
    std::vector<double> x;
    if (solve_square(std::move(a), std::move(b), x) && feasible_point(prog, x, 1e-7)) {
      double obj = 0.0;
      for (int j = 0; j < n; ++j) obj += prog.cost(j) * x[static_cast<size_t>(j)];
      if (!best || obj < *best) best = obj;
    }

    int k = n - 1;
    while (k >= 0 && idx[static_cast<size_t>(k)] == planes - n + k) --k;
    if (k < 0) break;
    ++idx[static_cast<size_t>(k)];
    for (int j = k + 1; j < n; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
  }
  return best;
}

std::optional<double> min_cost_unit_flow(const Network& net, int source, int sink,
                                         std::span<const double> caps,
                                         std::span<const double> costs) {
  const int m = net.link_count();
  const int n = net.node_count();
  std::vector<double> flow(static_cast<size_t>(m), 0.0);
  double shipped = 0.0;
  constexpr double kTol = 1e-12;

  while (shipped < 1.0 - kTol) {
    // Bellman-Ford over the residual graph.
    std::vector<double> dist(static_cast<size_t>(n), std::numeric_limits<double>::infinity());
    std::vector<int> via_link(static_cast<size_t>(n), -1);
    std::vector<signed char> via_dir(static_cast<size_t>(n), 0);
    dist[static_cast<size_t>(source)] = 0.0;
    for (int round = 0; round < n; ++round) {
      bool changed = false;
      for (int e = 0; e < m; ++e) {
        int u = net.link(e).tail, v = net.link(e).head;
        if (caps[static_cast<size_t>(e)] - flow[static_cast<size_t>(e)] > kTol &&
            dist[static_cast<size_t>(u)] + costs[static_cast<size_t>(e)] < dist[static_cast<size_t>(v)] - 1e-15) {
          dist[static_cast<size_t>(v)] = dist[static_cast<size_t>(u)] + costs[static_cast<size_t>(e)];
          via_link[static_cast<size_t>(v)] = e;
          via_dir[static_cast<size_t>(v)] = 1;
          changed = true;
        }
        if (flow[static_cast<size_t>(e)] > kTol &&
            dist[static_cast<size_t>(v)] - costs[static_cast<size_t>(e)] < dist[static_cast<size_t>(u)] - 1e-15) {
          dist[static_cast<size_t>(u)] = dist[static_cast<size_t>(v)] - costs[static_cast<size_t>(e)];
          via_link[static_cast<size_t>(u)] = e;
          via_dir[static_cast<size_t>(u)] = -1;
          changed = true;
        }
      }
      if (!changed) break;
    }
    if (!std::isfinite(dist[static_cast<size_t>(sink)])) return std::nullopt;

    double push = 1.0 - shipped;
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
    shipped += push;
  }

  double total = 0.0;
  for (int e = 0; e < m; ++e) total += costs[static_cast<size_t>(e)] * flow[static_cast<size_t>(e)];
  return total;
}

int active_constraint_rank(const lp::LinearProgram& prog, const std::vector<double>& values,
                           double tol) {
  const int n = prog.variable_count();
  std::vector<std::vector<double>> rows;
  for (const auto& c : prog.constraints()) {
    double lhs = 0.0;
    for (const auto& [var, coeff] : c.terms) lhs += coeff * values[static_cast<size_t>(var)];
    bool tight = c.rel == lp::Relation::kEq || std::abs(lhs - c.rhs) <= tol;
    if (!tight) continue;
    std::vector<double> row(static_cast<size_t>(n), 0.0);
    for (const auto& [var, coeff] : c.terms) row[static_cast<size_t>(var)] += coeff;
    rows.push_back(std::move(row));
  }
  for (int j = 0; j < n; ++j) {
    if (std::abs(values[static_cast<size_t>(j)]) <= tol) {
      std::vector<double> row(static_cast<size_t>(n), 0.0);
      row[static_cast<size_t>(j)] = 1.0;
      rows.push_back(std::move(row));
    }
  }

  int rank = 0;
  size_t lead = 0;
  for (int col = 0; col < n && lead < rows.size(); ++col) {
    size_t pivot = lead;
    for (size_t r = lead; r < rows.size(); ++r)
      if (std::abs(rows[r][static_cast<size_t>(col)]) > std::abs(rows[pivot][static_cast<size_t>(col)])) pivot = r;
    if (std::abs(rows[pivot][static_cast<size_t>(col)]) < 1e-9) continue;
    std::swap(rows[pivot], rows[lead]);
    for (size_t r = 0; r < rows.size(); ++r) {
      if (r == lead) continue;
      double f = rows[r][static_cast<size_t>(col)] / rows[lead][static_cast<size_t>(col)];
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) rows[r][static_cast<size_t>(j)] -= f * rows[lead][static_cast<size_t>(j)];
    }
    ++lead;
    ++rank;
  }
  return rank;
}

double uniform_real(std::mt19937_64& rng, double lo, double hi) {
  double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
  return lo + u * (hi - lo);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  auto span = static_cast<std::uint64_t>(hi - lo + 1);
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                        std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return lo + static_cast<int>(x % span);
}

namespace {

struct RandomGraph {
  Network net;
  std::string source;
  std::vector<std::string> receivers;
};

RandomGraph random_graph(std::mt19937_64& rng, int max_nodes, int max_receivers) {
  int n = uniform_int(rng, 3, max_nodes);
  std::vector<std::string> nodes;
  for (int v = 0; v < n; ++v) nodes.push_back("n" + std::to_string(v));

  std::vector<LinkSpec> links;
  int next_id = 0;
  auto add = [&](int u, int v) {
    links.push_back(LinkSpec{"e" + std::to_string(next_id++), nodes[static_cast<size_t>(u)],
                             nodes[static_cast<size_t>(v)], uniform_real(rng, 1.0, 100.0)});
  };
  for (int v = 0; v + 1 < n; ++v) add(v, v + 1);  // backbone keeps everything reachable
  int extras = uniform_int(rng, n, 2 * n);
  for (int k = 0; k < extras; ++k) {
    int u = uniform_int(rng, 0, n - 1);
    int v = uniform_int(rng, 0, n - 1);
    if (u == v) continue;
    add(u, v);  // parallels permitted
  }

  RandomGraph out{build_network(nodes, links), nodes[0], {}};
  int receivers = uniform_int(rng, 1, std::min(max_receivers, n - 1));
  std::vector<int> pool;
  for (int v = 1; v < n; ++v) pool.push_back(v);
  for (int k = 0; k < receivers; ++k) {
    int pick = uniform_int(rng, 0, static_cast<int>(pool.size()) - 1);
    out.receivers.push_back(nodes[static_cast<size_t>(pool[static_cast<size_t>(pick)])]);
    pool.erase(pool.begin() + pick);
  }
  return out;
}

double bottleneck_rate(const RandomGraph& g) {
  std::vector<double> caps = g.net.capacities();
  double rate = std::numeric_limits<double>::infinity();
  for (const auto& t : g.receivers)
    rate = std::min(rate, max_flow(g.net, g.source, t, caps));
  return rate;
}

PriceSystem random_prices(std::mt19937_64& rng, const Network& net) {
  PriceSystem p = PriceSystem::zero(net);
  for (auto& v : p.values) v = uniform_real(rng, 0.1, 10.0);
  return p;
}

}  // namespace

RandomInstance random_feasible_instance(std::mt19937_64& rng, int max_nodes, int max_receivers) {
  while (true) {
    RandomGraph g = random_graph(rng, max_nodes, max_receivers);
    double rate = bottleneck_rate(g);
    if (!(rate > 1e-6)) continue;
    double size = rate * uniform_real(rng, 0.3, 0.9);
    MulticastRequest r = make_request("q", g.source, g.receivers, size, g.net);
    PriceSystem p = random_prices(rng, g.net);
    return RandomInstance{std::move(g.net), std::move(r), std::move(p)};
  }
}

RandomInstance random_infeasible_instance(std::mt19937_64& rng, int max_nodes) {
  while (true) {
    RandomGraph g = random_graph(rng, max_nodes, 3);
    double rate = bottleneck_rate(g);
    if (!(rate > 1e-6)) continue;
    double size = rate * uniform_real(rng, 1.1, 2.0);
    MulticastRequest r = make_request("q", g.source, g.receivers, size, g.net);
    PriceSystem p = random_prices(rng, g.net);
    return RandomInstance{std::move(g.net), std::move(r), std::move(p)};
  }
}

}  // namespace misnc::testing
