// SPDX-License-Identifier: Apache-2.0
#include "mnnas/synth.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <utility>

#include "mnnas/rng.hpp"

namespace mnnas {

namespace {

using EdgeKey = std::pair<NodeId, NodeId>;

EdgeKey canon(NodeId a, NodeId b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

std::vector<Edge> to_edges(const std::set<EdgeKey>& s) {
  std::vector<Edge> out;
  out.reserve(s.size());
  for (const auto& [u, v] : s) out.push_back({u, v});
  return out;
}

void check_prob(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

Graph generate_ba(int64_t n, int64_t m, Rng& rng) {
  if (m < 1 || n <= m)
    throw std::invalid_argument("ba: requires 1 <= m < n");
  std::vector<Edge> edges;
  edges.reserve(static_cast<size_t>((n - m) * m));
  // Attachment proportional to degree via the repeated-endpoints list.
  std::vector<NodeId> repeated;
  repeated.reserve(2 * edges.capacity());
  for (NodeId v = static_cast<NodeId>(m); v < n; ++v) {
    std::set<NodeId> targets;
    if (v == m) {
      for (NodeId t = 0; t < m; ++t) targets.insert(t);
    } else {
      while (static_cast<int64_t>(targets.size()) < m)
        targets.insert(repeated[rng.uniform_index(repeated.size())]);
    }
    for (NodeId t : targets) {
      edges.push_back({t, v});
      repeated.push_back(t);
      repeated.push_back(v);
    }
  }
  return Graph::structure_only(n, std::move(edges));
}

Graph generate_er(int64_t n, double p, Rng& rng) {
  if (n < 2) throw std::invalid_argument("er: requires n >= 2");
  check_prob(p, "er: edge probability");
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (rng.bernoulli(p)) edges.push_back({u, v});
  return Graph::structure_only(n, std::move(edges));
}

namespace {

// A valid pairing of the leftover stubs still exists iff some pair of
// distinct leftover endpoints is not already an edge.
bool pairing_suitable(const std::set<EdgeKey>& edges,
                      const std::map<NodeId, int64_t>& potential) {
  if (potential.empty()) return true;
  std::vector<NodeId> nodes;
  nodes.reserve(potential.size());
  for (const auto& [node, cnt] : potential) nodes.push_back(node);
  for (size_t i = 0; i < nodes.size(); ++i)
    for (size_t j = i + 1; j < nodes.size(); ++j)
      if (!edges.count(canon(nodes[i], nodes[j]))) return true;
  return false;
}

}  // namespace

Graph generate_rr(int64_t n, int64_t d, Rng& rng) {
  if (d < 1 || d >= n) throw std::invalid_argument("rr: requires 1 <= d < n");
  if ((n * d) % 2 != 0) throw std::invalid_argument("rr: n*d must be even");
  // Pairing model: shuffle stubs, keep valid pairs, re-shuffle the leftovers;
  // restart from scratch when no valid pairing can complete.
  while (true) {
    std::set<EdgeKey> edges;
    std::vector<NodeId> stubs;
    stubs.reserve(static_cast<size_t>(n * d));
    for (NodeId v = 0; v < n; ++v)
      for (int64_t i = 0; i < d; ++i) stubs.push_back(v);
    bool stuck = false;
    while (!stubs.empty()) {
      rng.shuffle(stubs);
      std::map<NodeId, int64_t> potential;
      for (size_t i = 0; i + 1 < stubs.size(); i += 2) {
        const EdgeKey e = canon(stubs[i], stubs[i + 1]);
        if (e.first != e.second && !edges.count(e)) {
          edges.insert(e);
        } else {
          ++potential[stubs[i]];
          ++potential[stubs[i + 1]];
        }
      }
      if (!pairing_suitable(edges, potential)) {
        stuck = true;
        break;
      }
      stubs.clear();
      for (const auto& [node, cnt] : potential)
        for (int64_t i = 0; i < cnt; ++i) stubs.push_back(node);
    }
    if (!stuck) return Graph::structure_only(n, to_edges(edges));
  }
}

Graph generate_nw(int64_t n, int64_t k, double p, Rng& rng) {
  if (k < 2 || k >= n) throw std::invalid_argument("nw: requires 2 <= k < n");
  check_prob(p, "nw: shortcut probability");
  const int64_t halfk = k / 2;
  std::set<EdgeKey> edge_set;
  std::vector<EdgeKey> ring;
  for (NodeId i = 0; i < n; ++i) {
    for (int64_t j = 1; j <= halfk; ++j) {
      const EdgeKey e = canon(i, static_cast<NodeId>((i + j) % n));
      if (edge_set.insert(e).second) ring.push_back(e);
    }
  }
  std::vector<int64_t> degree(static_cast<size_t>(n), 0);
  for (const auto& [u, v] : edge_set) {
    ++degree[static_cast<size_t>(u)];
    ++degree[static_cast<size_t>(v)];
  }
  // One shortcut chance per ring edge, never duplicating or self-looping.
  for (const auto& [u, v] : ring) {
    (void)v;
    if (!rng.bernoulli(p)) continue;
    if (degree[static_cast<size_t>(u)] >= n - 1) continue;  // u saturated
    NodeId w = u;
    while (w == u || edge_set.count(canon(u, w)))
      w = static_cast<NodeId>(rng.uniform_index(static_cast<uint64_t>(n)));
    edge_set.insert(canon(u, w));
    ++degree[static_cast<size_t>(u)];
    ++degree[static_cast<size_t>(w)];
  }
  return Graph::structure_only(n, to_edges(edge_set));
}

Graph generate_sbm(const std::vector<int64_t>& block_sizes, double p_in, double p_out,
                   Rng& rng) {
  if (block_sizes.empty()) throw std::invalid_argument("sbm: needs at least one block");
  for (int64_t s : block_sizes)
    if (s < 1) throw std::invalid_argument("sbm: every block needs at least one node");
  check_prob(p_in, "sbm: p_in");
  check_prob(p_out, "sbm: p_out");
  std::vector<int> labels;
  for (size_t b = 0; b < block_sizes.size(); ++b)
    labels.insert(labels.end(), static_cast<size_t>(block_sizes[b]), static_cast<int>(b));
  const int64_t n = static_cast<int64_t>(labels.size());
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) {
      const double p =
          labels[static_cast<size_t>(u)] == labels[static_cast<size_t>(v)] ? p_in : p_out;
      if (rng.bernoulli(p)) edges.push_back({u, v});
    }
  return Graph(n, std::move(edges), {}, 0, std::nullopt, std::move(labels));
}

namespace {

struct Shape {
  int64_t n = 0;
  std::vector<Edge> edges;
};

Shape make_tree(Rng& rng) {
  Shape s;
  s.n = 10 + static_cast<int64_t>(rng.uniform_index(11));
  for (NodeId v = 1; v < s.n; ++v)
    s.edges.push_back({static_cast<NodeId>(rng.uniform_index(static_cast<uint64_t>(v))), v});
  return s;
}

Shape make_ladder(Rng& rng) {
  Shape s;
  const int64_t rungs = 5 + static_cast<int64_t>(rng.uniform_index(6));
  s.n = 2 * rungs;
  for (NodeId i = 0; i < rungs; ++i) {
    if (i + 1 < rungs) {
      s.edges.push_back({i, static_cast<NodeId>(i + 1)});
      s.edges.push_back({static_cast<NodeId>(rungs + i), static_cast<NodeId>(rungs + i + 1)});
    }
    s.edges.push_back({i, static_cast<NodeId>(rungs + i)});
  }
  return s;
}

Shape make_wheel(Rng& rng) {
  Shape s;
  s.n = 10 + static_cast<int64_t>(rng.uniform_index(11));
  const int64_t rim = s.n - 1;  // node 0 is the hub
  for (NodeId i = 1; i <= rim; ++i) {
    s.edges.push_back({0, i});
    s.edges.push_back({i, static_cast<NodeId>(i == rim ? 1 : i + 1)});
  }
  return s;
}

Shape make_cycle() { return {5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}}}; }

// Square 0-1-2-3 with a roof apex 4 over the 0-1 wall.
Shape make_house() {
  return {5, {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 4}, {1, 4}}};
}

// House with a pendant hanging off the roof apex.
Shape make_crane() {
  Shape s = make_house();
  s.n = 6;
  s.edges.push_back({4, 5});
  return s;
}

Shape make_base(int idx, Rng& rng) {
  switch (idx) {
    case 0: return make_tree(rng);
    case 1: return make_ladder(rng);
    default: return make_wheel(rng);
  }
}

Shape make_motif(int idx) {
  switch (idx) {
    case 0: return make_cycle();
    case 1: return make_house();
    default: return make_crane();
  }
}

}  // namespace

MotifSample sample_motif_pair(double bias, bool test_split, Rng& rng) {
  MotifSample s;
  s.motif = static_cast<int>(rng.uniform_index(3));
  if (test_split) {
    s.base = static_cast<int>(rng.uniform_index(3));
  } else if (rng.bernoulli(bias)) {
    s.base = s.motif;  // the spurious correlation
  } else {
    const int other = static_cast<int>(rng.uniform_index(2));
    s.base = (s.motif + 1 + other) % 3;
  }
  return s;
}

std::vector<Graph> generate_spurious_motif(double bias, int64_t count, uint64_t seed,
                                           bool test_split) {
  if (!(bias >= 1.0 / 3.0 && bias <= 1.0))
    throw std::invalid_argument("spurious_motif: bias must lie in [1/3, 1]");
  if (count < 0) throw std::invalid_argument("spurious_motif: count must be >= 0");
  Rng rng(seed);
  std::vector<Graph> out;
  out.reserve(static_cast<size_t>(count));
  for (int64_t i = 0; i < count; ++i) {
    const auto [base_idx, motif_idx] = sample_motif_pair(bias, test_split, rng);
    const Shape base = make_base(base_idx, rng);
    const Shape motif = make_motif(motif_idx);
    std::vector<Edge> edges = base.edges;
    for (const auto& e : motif.edges)
      edges.push_back({static_cast<NodeId>(e.u + base.n), static_cast<NodeId>(e.v + base.n)});
    const NodeId bridge_base = static_cast<NodeId>(rng.uniform_index(static_cast<uint64_t>(base.n)));
    const NodeId bridge_motif =
        static_cast<NodeId>(base.n + static_cast<int64_t>(rng.uniform_index(static_cast<uint64_t>(motif.n))));
    edges.push_back({bridge_base, bridge_motif});
    Graph g(base.n + motif.n, std::move(edges), {}, 0, motif_idx);
    out.push_back(attach_degree_features(g));
  }
  return out;
}

Graph attach_degree_features(const Graph& g) {
  const auto degs = g.degrees();
  const int64_t n = g.num_nodes();
  std::vector<double> feats(static_cast<size_t>(n * kDegreeFeatureDim), 0.0);
  for (int64_t i = 0; i < n; ++i) {
    feats[static_cast<size_t>(i * kDegreeFeatureDim)] = 1.0;
    const int64_t capped = std::min<int64_t>(degs[static_cast<size_t>(i)], 10);
    feats[static_cast<size_t>(i * kDegreeFeatureDim + 1 + capped)] = 1.0;
  }
  return Graph(n, g.edges(), std::move(feats), kDegreeFeatureDim, g.label(),
               g.node_labels());
}

void GeneratorSpec::validate() const {
  if (train_count < 0 || test_count < 0)
    throw std::invalid_argument("generator spec: counts must be >= 0");
  if (family == "ba") {
    if (m < 1 || n <= m) throw std::invalid_argument("ba: requires 1 <= m < n");
  } else if (family == "er") {
    if (n < 2) throw std::invalid_argument("er: requires n >= 2");
    check_prob(p, "er: edge probability");
  } else if (family == "rr") {
    if (d < 1 || d >= n) throw std::invalid_argument("rr: requires 1 <= d < n");
    if ((n * d) % 2 != 0) throw std::invalid_argument("rr: n*d must be even");
  } else if (family == "nw") {
    if (k < 2 || k >= n) throw std::invalid_argument("nw: requires 2 <= k < n");
    check_prob(p, "nw: shortcut probability");
  } else if (family == "sbm") {
    if (block_sizes.empty()) throw std::invalid_argument("sbm: needs at least one block");
    for (int64_t s : block_sizes)
      if (s < 1) throw std::invalid_argument("sbm: every block needs at least one node");
    check_prob(p_in, "sbm: p_in");
    check_prob(p_out, "sbm: p_out");
  } else if (family == "spurious_motif") {
    if (!(bias >= 1.0 / 3.0 && bias <= 1.0))
      throw std::invalid_argument("spurious_motif: bias must lie in [1/3, 1]");
  } else {
    throw std::invalid_argument("generator spec: unknown family: " + family);
  }
}

namespace {

Graph generate_one(const GeneratorSpec& spec, Rng& rng) {
  if (spec.family == "ba") return attach_degree_features(generate_ba(spec.n, spec.m, rng));
  if (spec.family == "er") return attach_degree_features(generate_er(spec.n, spec.p, rng));
  if (spec.family == "rr") return attach_degree_features(generate_rr(spec.n, spec.d, rng));
  if (spec.family == "nw")
    return attach_degree_features(generate_nw(spec.n, spec.k, spec.p, rng));
  if (spec.family == "sbm")
    return attach_degree_features(generate_sbm(spec.block_sizes, spec.p_in, spec.p_out, rng));
  throw std::invalid_argument("generator spec: " + spec.family +
                              " does not generate single graphs");
}

}  // namespace

Graph generate(const GeneratorSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  return generate_one(spec, rng);
}

DatasetBundle generate_dataset(const GeneratorSpec& spec) {
  spec.validate();
  DatasetBundle bundle;
  if (spec.family == "spurious_motif") {
    Rng train_seed = substream(spec.seed, "train");
    Rng test_seed = substream(spec.seed, "test");
    bundle.train = generate_spurious_motif(spec.bias, spec.train_count,
                                           train_seed.next_u64(), /*test_split=*/false);
    bundle.test = generate_spurious_motif(spec.bias, spec.test_count,
                                          test_seed.next_u64(), /*test_split=*/true);
    return bundle;
  }
  for (int64_t i = 0; i < spec.train_count; ++i) {
    Rng rng = substream(spec.seed, "train/" + std::to_string(i));
    bundle.train.push_back(generate_one(spec, rng));
  }
  for (int64_t i = 0; i < spec.test_count; ++i) {
    Rng rng = substream(spec.seed, "test/" + std::to_string(i));
    bundle.test.push_back(generate_one(spec, rng));
  }
  return bundle;
}

bool is_connected(const Graph& g) {
  const int64_t n = g.num_nodes();
  if (n == 0) return true;
  std::vector<std::vector<NodeId>> adj(static_cast<size_t>(n));
  for (const auto& e : g.edges()) {
    adj[static_cast<size_t>(e.u)].push_back(e.v);
    adj[static_cast<size_t>(e.v)].push_back(e.u);
  }
  std::vector<char> seen(static_cast<size_t>(n), 0);
  std::queue<NodeId> q;
  q.push(0);
  seen[0] = 1;
  int64_t visited = 1;
  while (!q.empty()) {
    const NodeId u = q.front();
    q.pop();
    for (NodeId v : adj[static_cast<size_t>(u)])
      if (!seen[static_cast<size_t>(v)]) {
        seen[static_cast<size_t>(v)] = 1;
        ++visited;
        q.push(v);
      }
  }
  return visited == n;
}

}  // namespace mnnas
