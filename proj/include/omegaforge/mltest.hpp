#pragma once

#include <optional>
#include <vector>

#include "omegaforge/prefix_free.hpp"
#include "omegaforge/rational.hpp"
#include "omegaforge/stagewise.hpp"

namespace omegaforge {

// Half-open interval [lo, hi); empty when hi <= lo.
struct RatInterval {
  Rational lo;
  Rational hi;
};

// Exact measure of the union (sort + sweep). Cross-checkable against
// inclusion-exclusion for small inputs.
Rational interval_union_measure(std::vector<RatInterval> intervals);

// One test component: the n-th effectively-open set, as the union of the
// sliding windows [start, start + delta) recorded per stage.
struct MLTestComponent {
  unsigned n = 0;
  Rational epsilon;
  Rational delta;                     // 2^{-n-1} * eps / (1 + eps)
  std::vector<Rational> start_points; // window starts, one per stage 0..horizon
  std::vector<Bits> heavy_prefix;     // initial segment of the enumeration with light tail
  unsigned d = 0;                     // its size; d * epsilon <= 1
};

struct MLTest {
  std::vector<MLTestComponent> components;
};

// Builds one component per margin epsilon_n (n = 1..margins.size()):
//  - the enumeration order of S (by entry stage, then lexicographic) yields
//    the minimal initial segment D_n whose tail weighs < 2^{-n-1};
//  - requires epsilon_n < 2^{-|rho|} for every rho in D_n, and the component
//    count bound d_n * epsilon_n <= 1;
//  - start points are the measures of V at stages 0..horizon.
// V must enumerate a subset of S's limit at every stage, and S's limit must
// be prefix-free. Violations throw domain_error.
MLTest ml_test_build(const StagewiseSet& s, const StagewiseSet& v,
                     const std::vector<Rational>& margins, unsigned horizon);

struct MLReportRow {
  unsigned n = 0;
  Rational measure; // exact union measure of the component
  Rational bound;   // 2^{-n}
  Rational slack;   // bound - measure (negative on violation)
  bool ok = false;
};

struct MLReport {
  std::vector<MLReportRow> rows;
  bool all_ok = true;
  std::optional<unsigned> first_violation; // the n named on failure
};

// Exact verification of the measure bound of every component, truncating
// the recorded windows at `horizon` stages when given.
MLReport ml_test_verify(const MLTest& t, std::optional<unsigned> horizon = std::nullopt);

}  // namespace omegaforge
