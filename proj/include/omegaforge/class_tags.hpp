#pragma once

#include <optional>
#include <string>

#include "omegaforge/bits.hpp"

namespace omegaforge {

// Outcome classes of oracles X, classified per machine model:
//   TOT         M(X) total                         (oracle machines)
//   INF-domain  dom M(X) infinite                  (oracle machines)
//   COF-domain  dom M(X) cofinite                  (oracle machines)
//   COM-domain  dom M(X) computable                (oracle machines)
//   COF-output  all but finitely many defined values equal 1 (oracle machines)
//   INF-output  output on X is infinite            (monotone machines)
//   FIN-output  output on X is finite              (monotone machines)
//   DOM-infsd   some prefix of X is in the limit domain     (infinitary machines)
//   FIN-infsd   converges on a prefix with finite output    (infinitary machines)
//   INF-infsd   output grows without bound                  (infinitary machines)
enum class ClassTag {
  TOT,
  INF_domain,
  FIN_output,
  INF_output,
  COF_domain,
  COM_domain,
  DOM_infsd,
  FIN_infsd,
  INF_infsd,
  COF_output,
};

const char* class_tag_name(ClassTag tag);
std::optional<ClassTag> class_tag_parse(const std::string& name);

// Verdict about one depth-L cylinder [tau]: wholly inside the class, wholly
// outside it, or undecided at this truncation. `certified` marks decisions
// backed by permanent construction data (stable limits, declared behavior);
// heuristic decisions carry certified = false.
struct ClassDecision {
  enum class Status { in, out, unknown };
  Status status = Status::unknown;
  bool certified = false;

  static ClassDecision in_certified() { return {Status::in, true}; }
  static ClassDecision out_certified() { return {Status::out, true}; }
  static ClassDecision in_heuristic() { return {Status::in, false}; }
  static ClassDecision out_heuristic() { return {Status::out, false}; }
  static ClassDecision none() { return {Status::unknown, false}; }
};

// Installed by construction builders on the machines they produce. Decides
// cylinder membership from construction metadata; `stage` gates how much of
// the stagewise data may be treated as settled, `n_max` is the evaluation
// horizon for stage-free (infinitary) machines.
class ClassCertifier {
public:
  virtual ~ClassCertifier() = default;
  virtual bool handles(ClassTag tag) const = 0;
  virtual ClassDecision decide(const Bits& cylinder, ClassTag tag, unsigned stage,
                               unsigned n_max) const = 0;
};

}  // namespace omegaforge
