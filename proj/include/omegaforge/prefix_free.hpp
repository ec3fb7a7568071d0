#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <vector>

#include "omegaforge/bits.hpp"
#include "omegaforge/dyadic.hpp"
#include "omegaforge/errors.hpp"

namespace omegaforge {

struct PrefixViolation {
  Bits shorter;  // the member that is a proper prefix
  Bits longer;   // of this member
};

// Returns a witness pair if some member is a proper prefix of another.
// Duplicates are collapsed first (set semantics).
inline std::optional<PrefixViolation> check_prefix_free(std::vector<Bits> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  // After lexicographic sort a prefix immediately precedes its extensions,
  // but non-adjacent pairs can also conflict (e.g. {0, 00, 01}); comparing
  // each member with its successor is still sufficient because if a ⪯ c with
  // b between them, then a ⪯ b as well.
  for (std::size_t i = 0; i + 1 < members.size(); ++i)
    if (members[i].is_proper_prefix_of(members[i + 1]))
      return PrefixViolation{members[i], members[i + 1]};
  return std::nullopt;
}

// Sum of 2^-|σ| over the (deduplicated) members; rejects inputs that are not
// prefix-free, naming a witness pair.
inline Dyadic measure_of(const std::vector<Bits>& members) {
  if (auto v = check_prefix_free(members))
    throw domain_error("not prefix-free: \"" + v->shorter.display() +
                       "\" is a proper prefix of \"" + v->longer.display() + "\"");
  std::set<Bits> uniq(members.begin(), members.end());
  Dyadic total;
  for (const Bits& b : uniq) total += Dyadic::pow2_neg(static_cast<unsigned>(b.size()));
  return total;
}

// A validated prefix-free set of strings. Immutable after construction.
class PrefixFreeSet {
public:
  PrefixFreeSet() = default;
  explicit PrefixFreeSet(std::vector<Bits> members) {
    if (auto v = check_prefix_free(members))
      throw domain_error("not prefix-free: \"" + v->shorter.display() +
                         "\" is a proper prefix of \"" + v->longer.display() + "\"");
    std::set<Bits> uniq(members.begin(), members.end());
    members_.assign(uniq.begin(), uniq.end());
  }

  const std::vector<Bits>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool contains_prefix_of(const Bits& b) const {
    for (const Bits& m : members_)
      if (m.is_prefix_of(b)) return true;
    return false;
  }
  Dyadic measure() const { return measure_of(members_); }

private:
  std::vector<Bits> members_;
};

// Minimal elements of an arbitrary string set: members with no proper prefix
// in the set. They are prefix-free and generate the same cylinder cover.
inline std::vector<Bits> minimal_elements(const std::set<Bits>& members) {
  std::vector<Bits> out;
  for (const Bits& b : members) {
    bool covered = false;
    for (std::size_t n = 0; n < b.size() && !covered; ++n)
      covered = members.count(b.prefix(n)) != 0;
    if (!covered) out.push_back(b);
  }
  return out;
}

// Measure of the union of cylinders spanned by an arbitrary string set.
inline Dyadic cover_measure(const std::set<Bits>& members) {
  return measure_of(minimal_elements(members));
}

}  // namespace omegaforge
