#include "omegaforge/mltest.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <utility>

namespace omegaforge {

Rational interval_union_measure(std::vector<RatInterval> intervals) {
  intervals.erase(std::remove_if(intervals.begin(), intervals.end(),
                                 [](const RatInterval& i) { return !(i.lo < i.hi); }),
                  intervals.end());
  std::sort(intervals.begin(), intervals.end(), [](const RatInterval& a, const RatInterval& b) {
    return a.lo == b.lo ? a.hi < b.hi : a.lo < b.lo;
  });
  Rational total;
  std::size_t i = 0;
  while (i < intervals.size()) {
    Rational lo = intervals[i].lo, hi = intervals[i].hi;
    ++i;
    while (i < intervals.size() && !(intervals[i].lo > hi)) {
      hi = std::max(hi, intervals[i].hi);
      ++i;
    }
    total += hi - lo;
  }
  return total;
}

namespace {

Rational weight_of(const Bits& b) {
  return Rational(Dyadic::pow2_neg(static_cast<unsigned>(b.size())));
}

}  // namespace

MLTest ml_test_build(const StagewiseSet& s, const StagewiseSet& v,
                     const std::vector<Rational>& margins, unsigned horizon) {
  std::optional<std::set<Bits>> limit_opt = s.known_limit();
  std::optional<unsigned> stab_opt = s.stabilization_stage();
  if (!limit_opt || !stab_opt)
    throw domain_error("anchor set must declare a known limit and a stabilization stage");
  const std::set<Bits>& limit = *limit_opt;
  if (auto viol = check_prefix_free(std::vector<Bits>(limit.begin(), limit.end())))
    throw domain_error("anchor limit is not prefix-free: \"" + viol->shorter.display() +
                       "\" is a proper prefix of \"" + viol->longer.display() + "\"");

  // Enumeration order: first stage of appearance, lexicographic within one.
  std::vector<std::pair<unsigned, Bits>> order;
  for (const Bits& m : limit) {
    unsigned first = *stab_opt;
    for (unsigned u = 0; u < *stab_opt; ++u) {
      if (s.at(u).count(m)) {
        first = u;
        break;
      }
    }
    order.emplace_back(first, m);
  }
  std::sort(order.begin(), order.end());

  Rational total;
  for (const Bits& m : limit) total += weight_of(m);

  for (unsigned u = 0; u <= horizon; ++u)
    for (const Bits& b : v.at(u))
      if (!limit.count(b))
        throw domain_error("enumeration produces \"" + b.display() +
                           "\" outside the anchor limit at stage " + std::to_string(u));

  std::vector<Rational> starts;
  starts.reserve(horizon + 1);
  for (unsigned u = 0; u <= horizon; ++u) {
    Rational mu;
    for (const Bits& b : v.at(u)) mu += weight_of(b);
    starts.push_back(std::move(mu));
  }

  MLTest t;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    unsigned n = static_cast<unsigned>(i + 1);
    const Rational& eps = margins[i];
    if (!(eps > Rational(0)))
      throw domain_error("margin for component " + std::to_string(n) + " must be positive");

    Rational half_bound = Rational(Dyadic::pow2_neg(n + 1));
    std::size_t d = 0;
    Rational acc;
    while (!(total - acc < half_bound) && d < order.size()) {
      acc += weight_of(order[d].second);
      ++d;
    }

    MLTestComponent comp;
    comp.n = n;
    comp.epsilon = eps;
    comp.delta = half_bound * eps / (Rational(1) + eps);
    comp.start_points = starts;
    comp.d = static_cast<unsigned>(d);
    for (std::size_t k = 0; k < d; ++k) {
      const Bits& rho = order[k].second;
      if (!(eps < weight_of(rho)))
        throw domain_error("margin " + eps.to_string() + " for component " + std::to_string(n) +
                           " is not below the weight of \"" + rho.display() + "\"");
      comp.heavy_prefix.push_back(rho);
    }
    if (Rational(static_cast<long>(d)) * eps > Rational(1))
      throw domain_error("component " + std::to_string(n) + " violates the count bound: " +
                         std::to_string(d) + " * " + eps.to_string() + " exceeds 1");
    t.components.push_back(std::move(comp));
  }
  return t;
}

MLReport ml_test_verify(const MLTest& t, std::optional<unsigned> horizon) {
  MLReport report;
  for (const MLTestComponent& c : t.components) {
    std::size_t count = c.start_points.size();
    if (horizon) count = std::min<std::size_t>(count, static_cast<std::size_t>(*horizon) + 1);
    std::vector<RatInterval> windows;
    windows.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
      windows.push_back({c.start_points[i], c.start_points[i] + c.delta});

    MLReportRow row;
    row.n = c.n;
    row.measure = interval_union_measure(std::move(windows));
    row.bound = Rational(Dyadic::pow2_neg(c.n));
    row.slack = row.bound - row.measure;
    row.ok = !(row.measure > row.bound);
    if (!row.ok) {
      report.all_ok = false;
      if (!report.first_violation) report.first_violation = c.n;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace omegaforge
