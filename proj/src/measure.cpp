#include "omegaforge/measure.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace omegaforge {

const char* class_tag_name(ClassTag tag) {
  switch (tag) {
    case ClassTag::TOT: return "TOT";
    case ClassTag::INF_domain: return "INF-domain";
    case ClassTag::FIN_output: return "FIN-output";
    case ClassTag::INF_output: return "INF-output";
    case ClassTag::COF_domain: return "COF-domain";
    case ClassTag::COM_domain: return "COM-domain";
    case ClassTag::DOM_infsd: return "DOM-infsd";
    case ClassTag::FIN_infsd: return "FIN-infsd";
    case ClassTag::INF_infsd: return "INF-infsd";
    case ClassTag::COF_output: return "COF-output";
  }
  return "?";
}

std::optional<ClassTag> class_tag_parse(const std::string& name) {
  static const ClassTag all[] = {
      ClassTag::TOT,        ClassTag::INF_domain, ClassTag::FIN_output, ClassTag::INF_output,
      ClassTag::COF_domain, ClassTag::COM_domain, ClassTag::DOM_infsd,  ClassTag::FIN_infsd,
      ClassTag::INF_infsd,  ClassTag::COF_output,
  };
  for (ClassTag t : all)
    if (name == class_tag_name(t)) return t;
  return std::nullopt;
}

const std::vector<TagPolicy>& tag_policies() {
  static const std::vector<TagPolicy> policies = {
      {ClassTag::TOT, "oracle",
       "every argument up to min(depth, n_max) converged on the cylinder prefix",
       "none (non-convergence at a finite stage refutes nothing)",
       "stabilized defining set: total exactly off its cylinders; guarded roots are empty runs"},
      {ClassTag::INF_domain, "oracle", "none", "none",
       "totality data (non-total runs have finite domains) or marker bookkeeping (at most one "
       "hole per own column, foreign columns fill up)"},
      {ClassTag::FIN_output, "monotone", "output at the cylinder is shorter than the depth",
       "output at the cylinder reached the depth",
       "delegates to the underlying totality certificate (finite output = non-total)"},
      {ClassTag::INF_output, "monotone", "output at the cylinder reached the depth",
       "output at the cylinder is shorter than the depth",
       "delegates to the underlying totality certificate (infinite output = total)"},
      {ClassTag::COF_domain, "oracle", "none", "none",
       "stabilized totality data, or an unbounded marker root at / incompatible with the "
       "cylinder"},
      {ClassTag::COM_domain, "oracle", "none", "none",
       "empty, full or finite domains are computable; marker holes are decodable exactly when "
       "finitely many"},
      {ClassTag::DOM_infsd, "infsd", "some prefix of the cylinder is alive at the horizon",
       "none", "stabilized section set: the limit domain is its cylinder cover"},
      {ClassTag::FIN_infsd, "infsd",
       "some prefix is alive with its output settled across the last horizon step", "none",
       "stabilized section set whose survivors keep the empty output"},
      {ClassTag::INF_infsd, "infsd",
       "some prefix is alive with its output still growing at the horizon", "none",
       "constructed outputs never grow: certified out"},
      {ClassTag::COF_output, "oracle",
       "no value defined up to the horizon differs from 1 (vacuous or consistent)",
       "none (finitely many exceptions are always allowed)",
       "value scripts: all-ones regions, vacuous finite graphs, or self-indexing values"},
  };
  return policies;
}

const TagPolicy& tag_policy(ClassTag tag) {
  for (const TagPolicy& p : tag_policies())
    if (p.tag == tag) return p;
  throw domain_error("unknown class tag");
}

// ---------------------------------------------------------------------------

namespace {

constexpr unsigned kMaxEnumDepth = 24;

void require_applies(ClassTag tag, const char* kind) {
  if (std::string(tag_policy(tag).applies_to) != kind)
    throw domain_error(std::string(class_tag_name(tag)) + " does not apply to " + kind +
                       " machines");
}

MeasureBound aggregate(unsigned depth, unsigned stage, unsigned n_max, unsigned jobs,
                       const std::function<ClassDecision(const Bits&)>& decide) {
  if (depth > kMaxEnumDepth)
    throw domain_error("depth " + std::to_string(depth) + " too large to enumerate (max " +
                       std::to_string(kMaxEnumDepth) + ")");
  std::uint64_t total = std::uint64_t(1) << depth;
  jobs = std::clamp<unsigned>(jobs, 1, 256);
  if (jobs > total) jobs = static_cast<unsigned>(total);

  struct Partial {
    std::uint64_t in = 0;
    std::uint64_t out = 0;
    bool lower_cert = true;
    bool upper_cert = true;
  };
  std::vector<Partial> parts(jobs);
  auto work = [&](unsigned w) {
    std::uint64_t chunk = total / jobs, extra = total % jobs;
    std::uint64_t begin = w * chunk + std::min<std::uint64_t>(w, extra);
    std::uint64_t end = begin + chunk + (w < extra ? 1 : 0);
    Partial& p = parts[w];
    for (std::uint64_t i = begin; i < end; ++i) {
      ClassDecision d = decide(Bits::of_length(depth, i));
      if (d.status == ClassDecision::Status::in) {
        ++p.in;
        p.lower_cert = p.lower_cert && d.certified;
      } else if (d.status == ClassDecision::Status::out) {
        ++p.out;
        p.upper_cert = p.upper_cert && d.certified;
      }
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < jobs; ++w) threads.emplace_back(work, w);
    for (std::thread& t : threads) t.join();
  }

  Partial sum;
  for (const Partial& p : parts) {
    sum.in += p.in;
    sum.out += p.out;
    sum.lower_cert = sum.lower_cert && p.lower_cert;
    sum.upper_cert = sum.upper_cert && p.upper_cert;
  }
  MeasureBound b;
  b.lower = Dyadic(BigInt(sum.in), depth);
  b.upper = Dyadic(BigInt(total - sum.out), depth);
  b.depth = depth;
  b.stage = stage;
  b.n_max = n_max;
  b.lower_certified = sum.lower_cert;
  b.upper_certified = sum.upper_cert;
  return b;
}

template <typename Machine, typename Heuristic>
MeasureBound bounds_with(const Machine& m, ClassTag tag, unsigned depth, unsigned stage,
                         unsigned n_max, unsigned jobs, Heuristic heuristic) {
  const ClassCertifier* cert = m.certifier();
  bool use_cert = cert && cert->handles(tag);
  return aggregate(depth, stage, n_max, jobs, [&](const Bits& cyl) {
    if (use_cert) {
      ClassDecision d = cert->decide(cyl, tag, stage, n_max);
      if (d.status != ClassDecision::Status::unknown) return d;
    }
    return heuristic(cyl);
  });
}

}  // namespace

MeasureBound class_bounds(const StagedOracleMachine& m, ClassTag tag, unsigned depth,
                          unsigned stage, unsigned n_max, unsigned jobs) {
  require_applies(tag, "oracle");
  return bounds_with(m, tag, depth, stage, n_max, jobs, [&](const Bits& cyl) {
    switch (tag) {
      case ClassTag::TOT: {
        unsigned bound = std::min(depth, n_max);
        for (unsigned n = 0; n <= bound; ++n)
          if (!run_oracle(m, cyl, n, stage)) return ClassDecision::none();
        return ClassDecision::in_heuristic();
      }
      case ClassTag::COF_output: {
        for (unsigned n = 0; n <= n_max; ++n) {
          std::optional<unsigned> v = m.eval(cyl, n, stage);
          if (v && *v != 1) return ClassDecision::none();
        }
        return ClassDecision::in_heuristic();
      }
      default:
        return ClassDecision::none();
    }
  });
}

MeasureBound class_bounds(const MonotoneMachine& m, ClassTag tag, unsigned depth, unsigned stage,
                          unsigned n_max, unsigned jobs) {
  require_applies(tag, "monotone");
  return bounds_with(m, tag, depth, stage, n_max, jobs, [&](const Bits& cyl) {
    bool full = monotone_output(m, cyl, stage).size() == cyl.size();
    if (tag == ClassTag::INF_output)
      return full ? ClassDecision::in_heuristic() : ClassDecision::out_heuristic();
    return full ? ClassDecision::out_heuristic() : ClassDecision::in_heuristic();
  });
}

MeasureBound class_bounds(const InfSDMachine& m, ClassTag tag, unsigned depth, unsigned stage,
                          unsigned n_max, unsigned jobs) {
  require_applies(tag, "infsd");
  return bounds_with(m, tag, depth, stage, n_max, jobs, [&](const Bits& cyl) {
    for (std::size_t k = 0; k <= cyl.size(); ++k) {
      InftyResult r = infty_eval(m, cyl.prefix(k), n_max);
      if (!r.alive()) continue;
      switch (tag) {
        case ClassTag::DOM_infsd:
          return ClassDecision::in_heuristic();
        case ClassTag::FIN_infsd: {
          bool settled = n_max == 0 ? r.output.empty()
                                    : r.output == infty_eval(m, cyl.prefix(k), n_max - 1).output;
          if (settled) return ClassDecision::in_heuristic();
          break;
        }
        case ClassTag::INF_infsd: {
          if (n_max == 0) break;
          if (r.output != infty_eval(m, cyl.prefix(k), n_max - 1).output)
            return ClassDecision::in_heuristic();
          break;
        }
        default:
          break;
      }
    }
    return ClassDecision::none();
  });
}

// ---------------------------------------------------------------------------

namespace {

void validate_schedule(const std::vector<ScheduleRow>& schedule) {
  for (std::size_t i = 0; i + 1 < schedule.size(); ++i) {
    const ScheduleRow& a = schedule[i];
    const ScheduleRow& b = schedule[i + 1];
    if (b.depth < a.depth || b.stage < a.stage || b.n_max < a.n_max)
      throw domain_error("schedule must be non-decreasing in every coordinate (row " +
                         std::to_string(i + 1) + " shrinks)");
  }
}

template <typename Machine>
std::vector<MeasureBound> trace_impl(const Machine& m, ClassTag tag,
                                     const std::vector<ScheduleRow>& schedule, unsigned jobs) {
  validate_schedule(schedule);
  std::vector<MeasureBound> rows;
  rows.reserve(schedule.size());
  for (const ScheduleRow& r : schedule)
    rows.push_back(class_bounds(m, tag, r.depth, r.stage, r.n_max, jobs));
  return rows;
}

}  // namespace

std::vector<MeasureBound> trace(const StagedOracleMachine& m, ClassTag tag,
                                const std::vector<ScheduleRow>& schedule, unsigned jobs) {
  return trace_impl(m, tag, schedule, jobs);
}
std::vector<MeasureBound> trace(const MonotoneMachine& m, ClassTag tag,
                                const std::vector<ScheduleRow>& schedule, unsigned jobs) {
  return trace_impl(m, tag, schedule, jobs);
}
std::vector<MeasureBound> trace(const InfSDMachine& m, ClassTag tag,
                                const std::vector<ScheduleRow>& schedule, unsigned jobs) {
  return trace_impl(m, tag, schedule, jobs);
}

std::string trace_csv(const std::vector<MeasureBound>& rows) {
  std::string out =
      "depth,stage,n_max,lower_num,lower_exp,upper_num,upper_exp,"
      "lower_certified,upper_certified\n";
  for (const MeasureBound& r : rows) {
    out += std::to_string(r.depth) + ',' + std::to_string(r.stage) + ',' +
           std::to_string(r.n_max) + ',' + r.lower.num().str() + ',' +
           std::to_string(r.lower.exp()) + ',' + r.upper.num().str() + ',' +
           std::to_string(r.upper.exp()) + ',' + (r.lower_certified ? "1" : "0") + ',' +
           (r.upper_certified ? "1" : "0") + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------

Decomposition cof_total_decomposition(const StagedOracleMachine& m, unsigned depth,
                                      unsigned stage, unsigned n_max, unsigned jobs) {
  Decomposition d;
  d.pi2 = class_bounds(m, ClassTag::TOT, depth, stage, n_max, jobs);
  d.sigma2 = class_bounds(m, ClassTag::COF_output, depth, stage, n_max, jobs);

  Dyadic raw = d.pi2.lower + d.sigma2.lower - Dyadic(1);
  if (raw > Dyadic(0)) {
    d.intersection_lower = raw;
    d.intersection_lower_certified = d.pi2.lower_certified && d.sigma2.lower_certified;
  } else {
    d.intersection_lower = Dyadic(0);
    d.intersection_lower_certified = true;  // the trivial bound needs no evidence
  }

  if (d.pi2.upper < d.sigma2.upper) {
    d.intersection_upper = d.pi2.upper;
    d.intersection_upper_certified = d.pi2.upper_certified;
  } else if (d.sigma2.upper < d.pi2.upper) {
    d.intersection_upper = d.sigma2.upper;
    d.intersection_upper_certified = d.sigma2.upper_certified;
  } else {
    d.intersection_upper = d.pi2.upper;
    d.intersection_upper_certified = d.pi2.upper_certified || d.sigma2.upper_certified;
  }
  return d;
}

}  // namespace omegaforge
