#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

namespace squarefall {

/// Rooted hypergraph with a mark set. Vertices are primes for the witness
/// graphs and real coordinates for the limit object.
template <class V>
struct MarkedHypergraph {
  V root{};
  std::vector<std::vector<V>> edges;  // each ascending, size >= 2
  std::set<V> marks;                  // subset of the support
  std::map<V, unsigned> levels;       // vertex -> level it entered at (builder output)

  std::set<V> support() const {
    std::set<V> s{root};
    for (const auto& e : edges) s.insert(e.begin(), e.end());
    return s;
  }
  bool empty() const { return edges.empty(); }
};

/// The unique tree of a tree-like hypergraph: parents, depths, and for every
/// vertex the indices of the hyperedges hanging below it.
template <class V>
struct HyperTree {
  std::map<V, V> parent;
  std::map<V, unsigned> depth;
  std::map<V, std::vector<std::size_t>> child_edges;
  std::vector<V> order;  // breadth-first from the root
};

/// Breadth-first decomposition: when a vertex q is reached, every unused
/// hyperedge through q must meet the already reached vertices in q alone,
/// and its other vertices become children of q. Tree-like iff this never
/// fails and every hyperedge gets used.
template <class V>
std::optional<HyperTree<V>> tree_of(const MarkedHypergraph<V>& g) {
  std::map<V, std::vector<std::size_t>> incident;
  for (std::size_t i = 0; i < g.edges.size(); ++i)
    for (const V& v : g.edges[i]) incident[v].push_back(i);

  HyperTree<V> t;
  std::vector<bool> used(g.edges.size(), false);
  t.depth[g.root] = 0;
  std::deque<V> queue{g.root};
  while (!queue.empty()) {
    const V q = queue.front();
    queue.pop_front();
    t.order.push_back(q);
    auto& kids = t.child_edges[q];
    const auto it = incident.find(q);
    if (it == incident.end()) continue;
    for (std::size_t i : it->second) {
      if (used[i]) continue;
      used[i] = true;
      for (const V& v : g.edges[i]) {
        if (v == q) continue;
        if (t.depth.count(v)) return std::nullopt;
        t.depth[v] = t.depth[q] + 1;
        t.parent[v] = q;
        queue.push_back(v);
      }
      kids.push_back(i);
    }
  }
  if (std::find(used.begin(), used.end(), false) != used.end()) return std::nullopt;
  return t;
}

template <class V>
bool is_tree_like(const MarkedHypergraph<V>& g) {
  return tree_of(g).has_value();
}

/// chi(q) holds when q is marked (a singleton hyperedge below q) or some
/// hyperedge below q has chi at every other vertex. For a leaf this is just
/// q in U. False when g is not tree-like.
template <class V>
bool chi(const MarkedHypergraph<V>& g, const V& q) {
  const auto t = tree_of(g);
  if (!t) return false;
  if (!t->depth.count(q)) throw std::invalid_argument("chi: vertex not in the support");
  std::map<V, bool> value;
  // Children come after parents in breadth-first order, so walk it backwards.
  for (auto it = t->order.rbegin(); it != t->order.rend(); ++it) {
    const V& v = *it;
    bool ok = g.marks.count(v) > 0;
    for (std::size_t i : t->child_edges.at(v)) {
      if (ok) break;
      ok = std::all_of(g.edges[i].begin(), g.edges[i].end(),
                       [&](const V& w) { return w == v || value.at(w); });
    }
    value[v] = ok;
  }
  return value.at(q);
}

template <class V>
bool chi(const MarkedHypergraph<V>& g) {
  return chi(g, g.root);
}

}  // namespace squarefall
