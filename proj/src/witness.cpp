#include "squarefall/witness.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "squarefall/gf2.hpp"

namespace squarefall::witness {

void ChiParams::validate() const {
  if (m > kMaxLevels)
    throw std::invalid_argument("witness: m = " + std::to_string(m) + " above the cap of " +
                                std::to_string(kMaxLevels));
  if (k == Count(0)) throw std::invalid_argument("witness: k must be at least 1");
  if (!(M > 1.0)) throw std::invalid_argument("witness: M must exceed 1");
}

namespace {

bool usable_edge(const ExponentClass& c, const Count& k) {
  return c.tag == process::ClassTag::Large && c.primes.size() >= 2 && k.admits(c.primes.size());
}

bool is_singleton(const ExponentClass& c) {
  return c.tag == process::ClassTag::Large && c.primes.size() == 1;
}

// Tries to attach class c at level L; returns true when it was added.
bool try_attach(Graph& g, const ExponentClass& c, unsigned L) {
  const u64* hit = nullptr;
  for (const u64& q : c.primes) {
    if (!g.levels.count(q)) continue;
    if (hit) return false;
    hit = &q;
  }
  if (!hit || g.levels.at(*hit) != L - 1) return false;
  for (u64 q : c.primes)
    if (q != *hit) g.levels[q] = L;
  g.edges.push_back(c.primes);
  return true;
}

}  // namespace

Graph build_G(const std::vector<ExponentClass>& stream, u64 p, const ChiParams& params,
              std::size_t J) {
  params.validate();
  if (J > stream.size()) throw std::invalid_argument("build_G: J exceeds the stream length");
  Graph g;
  g.root = p;
  g.levels[p] = 0;
  for (unsigned L = 1; L <= params.m; ++L) {
    bool grew = false;
    for (std::size_t j = 1; j <= J; ++j) {
      const ExponentClass& c = stream[j - 1];
      if (usable_edge(c, params.k) && try_attach(g, c, L)) grew = true;
    }
    if (!grew) break;  // an empty T_L leaves every later level empty too
  }
  for (std::size_t j = 1; j <= J; ++j)
    if (is_singleton(stream[j - 1]) && g.levels.count(stream[j - 1].primes[0]))
      g.marks.insert(stream[j - 1].primes[0]);
  return g;
}

bool chi_event(const std::vector<ExponentClass>& stream, u64 p, const ChiParams& params,
               std::size_t J) {
  return chi(build_G(stream, p, params, J));
}

WitnessIndex::WitnessIndex(const std::vector<ExponentClass>& stream, const ChiParams& params)
    : stream_(stream), params_(params) {
  params_.validate();
  for (std::size_t j = 1; j <= stream.size(); ++j) {
    const ExponentClass& c = stream[j - 1];
    if (usable_edge(c, params_.k))
      for (u64 q : c.primes) incident_[q].push_back(j);
    if (is_singleton(c)) first_singleton_.emplace(c.primes[0], j);
  }
}

Graph WitnessIndex::build_G(u64 p, std::size_t J) const {
  if (J > stream_.size()) throw std::invalid_argument("build_G: J exceeds the stream length");
  Graph g;
  g.root = p;
  g.levels[p] = 0;
  std::vector<u64> frontier{p};
  std::vector<std::size_t> candidates;
  for (unsigned L = 1; L <= params_.m && !frontier.empty(); ++L) {
    candidates.clear();
    for (u64 q : frontier) {
      const auto it = incident_.find(q);
      if (it == incident_.end()) continue;
      for (std::size_t j : it->second) {
        if (j > J) break;
        candidates.push_back(j);
      }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    std::vector<u64> next;
    for (std::size_t j : candidates) {
      const ExponentClass& c = stream_[j - 1];
      if (!try_attach(g, c, L)) continue;
      for (u64 q : c.primes)
        if (g.levels.at(q) == L) next.push_back(q);
    }
    frontier = std::move(next);
  }
  for (const auto& [v, level] : g.levels) {
    const auto it = first_singleton_.find(v);
    if (it != first_singleton_.end() && it->second <= J) g.marks.insert(v);
  }
  return g;
}

std::size_t class_rank_deficiency(const std::vector<ExponentClass>& stream) {
  gf2::Eliminator elim;
  for (std::size_t j = 0; j < stream.size(); ++j)
    if (stream[j].tag != process::ClassTag::Delta)
      elim.insert(gf2::ExponentVector{stream[j].primes}, j + 1);
  return elim.rank_deficiency();
}

WitnessCounts count_pseudosmooths(const std::vector<ExponentClass>& stream,
                                  const ChiParams& params) {
  const WitnessIndex index(stream, params);
  WitnessCounts out;
  for (std::size_t j = 1; j <= stream.size(); ++j) {
    const ExponentClass& c = stream[j - 1];
    if (c.tag == process::ClassTag::Delta) continue;
    ++out.considered;
    if (c.tag == process::ClassTag::Smooth) {
      ++out.Z;
      ++out.smooth;
      continue;
    }
    bool all = true;
    for (u64 p : c.primes) {
      const Graph g = index.build_G(p, j - 1);
      ++out.chi_evaluations;
      if (!is_tree_like(g)) ++out.not_tree_like;
      if (!chi(g)) {
        all = false;
        break;
      }
    }
    if (all) ++out.Z;
  }
  out.rank_deficiency = class_rank_deficiency(stream);
  return out;
}

std::size_t count_singleton_hits(const std::vector<ExponentClass>& stream,
                                 const ChiParams& params, std::size_t j1, std::size_t j2) {
  if (j1 < 1 || j1 > j2 || j2 > stream.size())
    throw std::invalid_argument("count_singleton_hits: need 1 <= j1 <= j2 <= stream length");
  const WitnessIndex index(stream, params);
  std::size_t Y = 0;
  for (std::size_t j = j1; j <= j2; ++j)
    if (is_singleton(stream[j - 1]) && index.chi_event(stream[j - 1].primes[0], j - 1)) ++Y;
  return Y;
}

}  // namespace squarefall::witness
