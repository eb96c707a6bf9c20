#pragma once

#include <cstddef>
#include <unordered_map>
#include <vector>

#include "squarefall/common.hpp"
#include "squarefall/hypergraph.hpp"
#include "squarefall/process.hpp"

namespace squarefall::witness {

using arith::u64;
using process::ExponentClass;

inline constexpr unsigned kMaxLevels = 16;

struct ChiParams {
  unsigned m = 2;
  Count k = Count::infinite();
  double M = 10.0;

  void validate() const;
};

using Graph = MarkedHypergraph<u64>;

/// G_{m,p} and U_{m,p} from the first J classes of the stream (1-based
/// positions 1..J), swept level by level in stream order. Levels record the
/// T_r(p) sets.
Graph build_G(const std::vector<ExponentClass>& stream, u64 p, const ChiParams& params,
              std::size_t J);

/// chi_{m,p} on the prefix of length J (false when G_{m,p} is not tree-like).
bool chi_event(const std::vector<ExponentClass>& stream, u64 p, const ChiParams& params,
               std::size_t J);

/// The same construction from per-prime incidence lists, so that only
/// classes touching the current frontier are visited. Agrees with build_G.
class WitnessIndex {
 public:
  WitnessIndex(const std::vector<ExponentClass>& stream, const ChiParams& params);

  Graph build_G(u64 p, std::size_t J) const;
  bool chi_event(u64 p, std::size_t J) const { return chi(build_G(p, J)); }

 private:
  const std::vector<ExponentClass>& stream_;
  ChiParams params_;
  std::unordered_map<u64, std::vector<std::size_t>> incident_;  // 1-based positions
  std::unordered_map<u64, std::size_t> first_singleton_;
};

struct WitnessCounts {
  std::size_t Z = 0;
  std::size_t smooth = 0;           // Z hits with empty class
  std::size_t considered = 0;       // non-Delta classes
  std::size_t rank_deficiency = 0;  // of the non-Delta class vectors
  std::size_t not_tree_like = 0;    // G_{m,p} evaluations that failed the shape test
  std::size_t chi_evaluations = 0;
};

/// Z: positions j whose class is not Delta and has chi_{m,p} on the prefix
/// j - 1 for every p in it (so empty classes always count). Also reports the
/// GF(2) rank deficiency of the same classes.
WitnessCounts count_pseudosmooths(const std::vector<ExponentClass>& stream,
                                  const ChiParams& params);

/// Y: positions j in [j1, j2] with [X_j] = {p} and chi_{m,p} on the prefix
/// j - 1.
std::size_t count_singleton_hits(const std::vector<ExponentClass>& stream,
                                 const ChiParams& params, std::size_t j1, std::size_t j2);

/// GF(2) rank deficiency of the non-Delta classes.
std::size_t class_rank_deficiency(const std::vector<ExponentClass>& stream);

}  // namespace squarefall::witness
