#include "squarefall/gf2.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace squarefall::gf2 {

ExponentVector ExponentVector::from(const arith::Factorization& f) {
  ExponentVector v;
  for (const auto& pp : f.factors)
    if (pp.exponent % 2 == 1) v.odd_primes.push_back(pp.prime);
  return v;
}

ExponentVector ExponentVector::from_primes(std::vector<u64> primes) {
  std::sort(primes.begin(), primes.end());
  ExponentVector v;
  for (std::size_t i = 0; i < primes.size();) {
    std::size_t j = i;
    while (j < primes.size() && primes[j] == primes[i]) ++j;
    if ((j - i) % 2 == 1) v.odd_primes.push_back(primes[i]);
    i = j;
  }
  return v;
}

std::vector<u64> symmetric_difference(const std::vector<u64>& a,
                                      const std::vector<u64>& b) {
  std::vector<u64> out;
  out.reserve(a.size() + b.size());
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                std::back_inserter(out));
  return out;
}

Eliminator::Eliminator(u64 dense_bound) : dense_bound_(std::max<u64>(dense_bound, 2)) {
  dense_column_.assign(dense_bound_, -1);
  std::vector<bool> composite(dense_bound_, false);
  for (u64 n = 2; n < dense_bound_; ++n) {
    if (composite[n]) continue;
    dense_column_[n] = static_cast<std::int32_t>(dense_primes_.size());
    dense_primes_.push_back(n);
    for (u64 m = n * n; m < dense_bound_; m += n) composite[m] = true;
  }
}

Eliminator::Row Eliminator::make_row(const ExponentVector& v) const {
  Row r;
  r.dense.assign((dense_primes_.size() + 63) / 64, 0);
  for (u64 p : v.odd_primes) {
    if (p < dense_bound_) {
      const std::int32_t col = dense_column_[p];
      if (col < 0)
        throw std::invalid_argument("gf2: " + std::to_string(p) + " is not prime");
      r.dense[col / 64] ^= std::uint64_t{1} << (col % 64);
    } else {
      r.sparse.push_back(p);
    }
  }
  return r;
}

u64 Eliminator::leading_prime(const Row& r) const {
  if (!r.sparse.empty()) return r.sparse.back();
  for (std::size_t w = r.dense.size(); w-- > 0;) {
    if (r.dense[w] != 0) {
      const int bit = 63 - std::countl_zero(r.dense[w]);
      return dense_primes_[w * 64 + bit];
    }
  }
  return 0;
}

void Eliminator::xor_into(Row& target, const Row& source) const {
  for (std::size_t w = 0; w < target.dense.size(); ++w) target.dense[w] ^= source.dense[w];
  if (!source.sparse.empty()) target.sparse = symmetric_difference(target.sparse, source.sparse);
  target.provenance = symmetric_difference(target.provenance, source.provenance);
}

ExponentVector Eliminator::row_vector(const Row& r) const {
  ExponentVector v;
  for (std::size_t w = 0; w < r.dense.size(); ++w) {
    std::uint64_t bits = r.dense[w];
    while (bits) {
      const int bit = std::countr_zero(bits);
      v.odd_primes.push_back(dense_primes_[w * 64 + bit]);
      bits &= bits - 1;
    }
  }
  v.odd_primes.insert(v.odd_primes.end(), r.sparse.begin(), r.sparse.end());
  return v;
}

InsertResult Eliminator::insert(const ExponentVector& v, u64 id) {
  if (!ids_.insert(id).second)
    throw std::invalid_argument("gf2: duplicate id " + std::to_string(id));
  ++inserted_;
  originals_.emplace(id, v);

  Row row = make_row(v);
  row.provenance = {id};
  for (;;) {
    const u64 lead = leading_prime(row);
    if (lead == 0) return Dependent{std::move(row.provenance)};
    const auto it = pivots_.find(lead);
    if (it == pivots_.end()) {
      pivots_.emplace(lead, std::move(row));
      return Independent{};
    }
    xor_into(row, it->second);
  }
}

bool Eliminator::rows_consistent() const {
  for (const auto& [lead, row] : pivots_) {
    std::vector<u64> acc;
    for (u64 id : row.provenance) acc = symmetric_difference(acc, originals_.at(id).odd_primes);
    const ExponentVector v = row_vector(row);
    if (v.odd_primes != acc) return false;
    if (v.odd_primes.empty() || v.odd_primes.back() != lead) return false;
  }
  return true;
}

}  // namespace squarefall::gf2
