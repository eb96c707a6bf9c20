#pragma once

#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "squarefall/arith.hpp"

namespace squarefall::gf2 {

using arith::u64;

/// The primes dividing an integer to an odd power, ascending.
struct ExponentVector {
  std::vector<u64> odd_primes;

  static ExponentVector from(const arith::Factorization& f);
  /// Sorts and cancels repeated entries in pairs.
  static ExponentVector from_primes(std::vector<u64> primes);
  bool empty() const { return odd_primes.empty(); }
  bool operator==(const ExponentVector&) const = default;
};

/// Symmetric difference of two ascending sequences.
std::vector<u64> symmetric_difference(const std::vector<u64>& a,
                                      const std::vector<u64>& b);

struct Independent {};
struct Dependent {
  std::vector<u64> ids;  // ascending; always contains the id just inserted
};
using InsertResult = std::variant<Independent, Dependent>;

/// Incremental row reduction over GF(2) with provenance. Each stored row is
/// keyed by its largest prime; inserting a vector reduces it against the
/// stored rows until it either acquires a new leading prime or vanishes, in
/// which case the provenance of the zero combination is the dependency.
///
/// Primes below `dense_bound` live in a packed bitset indexed by prime rank;
/// larger primes live in a sorted overflow list.
class Eliminator {
 public:
  explicit Eliminator(u64 dense_bound = 1 << 12);

  InsertResult insert(const ExponentVector& v, u64 id);

  std::size_t inserted() const { return inserted_; }
  std::size_t rank() const { return pivots_.size(); }
  std::size_t rank_deficiency() const { return inserted_ - pivots_.size(); }

  /// Checks every stored row against the XOR of its provenance; for tests.
  bool rows_consistent() const;

 private:
  struct Row {
    std::vector<std::uint64_t> dense;  // bit i = i-th prime below dense_bound
    std::vector<u64> sparse;           // primes >= dense_bound, ascending
    std::vector<u64> provenance;       // ascending ids
  };

  Row make_row(const ExponentVector& v) const;
  u64 leading_prime(const Row& r) const;
  void xor_into(Row& target, const Row& source) const;
  ExponentVector row_vector(const Row& r) const;

  u64 dense_bound_;
  std::vector<u64> dense_primes_;
  std::vector<std::int32_t> dense_column_;  // value -> column, -1 if not prime
  std::unordered_map<u64, Row> pivots_;
  std::unordered_map<u64, ExponentVector> originals_;
  std::unordered_set<u64> ids_;
  std::size_t inserted_ = 0;
};

}  // namespace squarefall::gf2
