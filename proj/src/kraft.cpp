#include "omegaforge/kraft.hpp"

#include <algorithm>
#include <string>

#include "omegaforge/errors.hpp"

namespace omegaforge {

KraftAllocator::KraftAllocator() { free_.push_back(Bits()); }

Bits KraftAllocator::allocate(unsigned length) {
  if (length == 0)
    throw domain_error("weight request must have positive length");
  Dyadic weight = Dyadic::pow2_neg(length);
  if (used_ + weight > Dyadic(1))
    throw kraft_budget_error(
        count_, length,
        "weight budget exceeded at request " + std::to_string(count_) +
            " (length " + std::to_string(length) + "): running sum " +
            used_.to_string() + " + 2^-" + std::to_string(length) + " > 1");

  // Leftmost fitting block. Blocks are sorted by left endpoint and their
  // lengths strictly decrease left to right, so the first block short enough
  // to fit is also the tightest fit.
  auto it = std::find_if(free_.begin(), free_.end(), [&](const Bits& b) {
    return b.size() <= length;
  });
  if (it == free_.end())
    throw invariant_violation("free pool cannot serve a funded request");

  Bits block = *it;
  free_.erase(it);
  Bits assigned = block + Bits::zeros(length - block.size());
  // Return the right-hand siblings along the zero path to the pool.
  for (std::size_t j = block.size(); j < length; ++j) {
    Bits leftover = assigned.prefix(j).with_bit(1);
    free_.insert(std::upper_bound(free_.begin(), free_.end(), leftover),
                 leftover);
  }

  used_ += weight;
  log_.push_back({count_, length, assigned});
  ++count_;
  check_shape();
  return assigned;
}

void KraftAllocator::check_shape() const {
  for (std::size_t i = 0; i + 1 < free_.size(); ++i) {
    if (free_[i].size() <= free_[i + 1].size())
      throw invariant_violation("free pool lengths not strictly decreasing");
    if (free_[i].is_prefix_of(free_[i + 1]) ||
        free_[i + 1].is_prefix_of(free_[i]))
      throw invariant_violation("free pool not prefix-free");
  }
}

std::vector<Bits> kraft_chaitin(const std::vector<unsigned>& lengths) {
  KraftAllocator alloc;
  std::vector<Bits> out;
  out.reserve(lengths.size());
  for (unsigned c : lengths) out.push_back(alloc.allocate(c));
  return out;
}

}  // namespace omegaforge
