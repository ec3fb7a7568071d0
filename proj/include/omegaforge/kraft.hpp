#pragma once

#include <cstddef>
#include <vector>

#include "omegaforge/bits.hpp"
#include "omegaforge/dyadic.hpp"
#include "omegaforge/prefix_free.hpp"

namespace omegaforge {

// Online weight-to-string allocator: each request for a length c consumes
// weight 2^-c and yields a string of length c, keeping the assigned set
// prefix-free. Strategy is fixed: always carve the requested string out of
// the leftmost free interval that fits, extending with zeros and returning
// the right-hand remainders to the free pool. A request that would push the
// running weight sum above 1 raises kraft_budget_error with its index.
//
// The free pool stays prefix-free with pairwise distinct lengths, longest
// block leftmost; under that shape leftmost-fit coincides with best-fit,
// which is why no serviceable request can ever be stranded.
class KraftAllocator {
public:
  struct Record {
    std::size_t index;   // request number, starting at 0
    unsigned length;     // requested length
    Bits assigned;
  };

  KraftAllocator();

  // Serves one request; throws kraft_budget_error or domain_error (length 0).
  Bits allocate(unsigned length);

  const Dyadic& allocated_weight() const { return used_; }
  std::size_t request_count() const { return count_; }
  const std::vector<Record>& log() const { return log_; }
  const std::vector<Bits>& free_blocks() const { return free_; }

private:
  void check_shape() const;  // internal invariant (cheap, always on)

  std::vector<Bits> free_;  // sorted lexicographically
  Dyadic used_;
  std::size_t count_ = 0;
  std::vector<Record> log_;
};

// Batch form: one string per requested length, in request order.
std::vector<Bits> kraft_chaitin(const std::vector<unsigned>& lengths);

}  // namespace omegaforge
