#pragma once

#include <string>
#include <vector>

#include "omegaforge/class_tags.hpp"
#include "omegaforge/dyadic.hpp"
#include "omegaforge/machines.hpp"

namespace omegaforge {

// Certified bracket of a class measure at a (depth, stage, horizon)
// truncation. lower = measure of cylinders decided wholly inside the class,
// upper = 1 - measure of cylinders decided wholly outside. A side is
// certified when every decision contributing to it is certified (vacuously
// true when nothing contributes).
struct MeasureBound {
  Dyadic lower;
  Dyadic upper;
  unsigned depth = 0;
  unsigned stage = 0;
  unsigned n_max = 0;
  bool lower_certified = true;
  bool upper_certified = true;
};

// How each tag is decided, for documentation and honesty: which machine kind
// it applies to, what the uncertified heuristics are, and what certifies.
struct TagPolicy {
  ClassTag tag;
  const char* applies_to;
  const char* in_heuristic;
  const char* out_heuristic;
  const char* certification;
};

const std::vector<TagPolicy>& tag_policies();
const TagPolicy& tag_policy(ClassTag tag);

// Enumerate all depth-L cylinders, decide each via the machine's certifier
// (falling back to the documented heuristic), and aggregate. `jobs` splits
// the enumeration across threads; exact dyadic arithmetic keeps the result
// identical regardless. Throws domain_error for a tag that does not apply
// to the machine kind.
MeasureBound class_bounds(const StagedOracleMachine& m, ClassTag tag, unsigned depth,
                          unsigned stage, unsigned n_max, unsigned jobs = 1);
MeasureBound class_bounds(const MonotoneMachine& m, ClassTag tag, unsigned depth, unsigned stage,
                          unsigned n_max, unsigned jobs = 1);
MeasureBound class_bounds(const InfSDMachine& m, ClassTag tag, unsigned depth, unsigned stage,
                          unsigned n_max, unsigned jobs = 1);

struct ScheduleRow {
  unsigned depth = 0;
  unsigned stage = 0;
  unsigned n_max = 0;
};

// Rows evaluated in order; the schedule must be non-decreasing in every
// coordinate (domain_error otherwise).
std::vector<MeasureBound> trace(const StagedOracleMachine& m, ClassTag tag,
                                const std::vector<ScheduleRow>& schedule, unsigned jobs = 1);
std::vector<MeasureBound> trace(const MonotoneMachine& m, ClassTag tag,
                                const std::vector<ScheduleRow>& schedule, unsigned jobs = 1);
std::vector<MeasureBound> trace(const InfSDMachine& m, ClassTag tag,
                                const std::vector<ScheduleRow>& schedule, unsigned jobs = 1);

// CSV: depth,stage,n_max,lower_num,lower_exp,upper_num,upper_exp,
// lower_certified,upper_certified — LF line endings, flags as 0/1,
// bounds as numerator and exponent of the dyadic (value = num / 2^exp).
std::string trace_csv(const std::vector<MeasureBound>& rows);

// Totality component (TOT) and eventually-all-ones component (COF-output)
// of the same machine, with the interval for their intersection combined by
// the Frechet bounds [max(0, lo1 + lo2 - 1), min(up1, up2)].
struct Decomposition {
  MeasureBound pi2;
  MeasureBound sigma2;
  Dyadic intersection_lower;
  Dyadic intersection_upper;
  bool intersection_lower_certified = false;
  bool intersection_upper_certified = false;
};

Decomposition cof_total_decomposition(const StagedOracleMachine& m, unsigned depth, unsigned stage,
                                      unsigned n_max, unsigned jobs = 1);

}  // namespace omegaforge
