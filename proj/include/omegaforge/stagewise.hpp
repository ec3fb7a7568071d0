#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "omegaforge/bits.hpp"
#include "omegaforge/errors.hpp"

namespace omegaforge {

// ---------------------------------------------------------------------------
// Stage-indexed approximations to sets of naturals (oracle side) and to sets
// of strings. Everything here is a closed immutable value: at(stage) is a
// pure function of the stage, so approximations can be shared freely between
// machines and replayed deterministically.
// ---------------------------------------------------------------------------

// Approximation to a set of naturals. Two scripted kinds plus a built-in
// stand-in for a genuinely hard enumeration (a step-bounded halting set of a
// tiny register machine) whose limit the rest of the code must not assume.
class OracleApprox {
public:
  enum class Kind { ce_monotone, known_limit_toy };

  class Impl {
  public:
    virtual ~Impl() = default;
    virtual std::set<unsigned> at(unsigned stage) const = 0;
    virtual Kind kind() const = 0;
    virtual std::optional<std::set<unsigned>> known_limit() const { return std::nullopt; }
    virtual std::optional<unsigned> stabilization_stage() const { return std::nullopt; }
  };

  explicit OracleApprox(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  std::set<unsigned> at(unsigned stage) const { return impl_->at(stage); }
  Kind kind() const { return impl_->kind(); }
  std::optional<std::set<unsigned>> known_limit() const { return impl_->known_limit(); }
  std::optional<unsigned> stabilization_stage() const { return impl_->stabilization_stage(); }

private:
  std::shared_ptr<const Impl> impl_;
};

// Entry events (element, stage); elements stay once entered. For a
// known-limit toy the limit is the full event-element set and the declared
// stabilization stage is the last entry stage.
OracleApprox scripted_oracle(OracleApprox::Kind kind,
                             const std::vector<std::pair<unsigned, unsigned>>& entries);

// ce-monotone oracle with no known limit: element e enters at stage s when
// the e-th program of a fixed micro-interpreter halts within s steps (and
// e < s). Deterministic, monotone, and honestly undecidable at any horizon.
OracleApprox halting_standin_oracle();

// Exposed for tests/documentation of the stand-in: does program e halt
// within the given number of steps?
bool standin_program_halts(unsigned e, unsigned steps);

// ---------------------------------------------------------------------------

// Stage-indexed finite sets of strings.
class StagewiseSet {
public:
  enum class Semantics { sigma1_monotone, canonical_sigma2, toy_known_limit };

  class Impl {
  public:
    virtual ~Impl() = default;
    virtual std::set<Bits> at(unsigned stage) const = 0;
    virtual Semantics semantics() const = 0;
    // Presence never retracts (true for enumeration-style sets).
    virtual bool monotone_presence() const { return false; }
    virtual std::optional<std::set<Bits>> known_limit() const { return std::nullopt; }
    // at(s) equals the limit for every s >= this stage.
    virtual std::optional<unsigned> stabilization_stage() const { return std::nullopt; }
  };

  explicit StagewiseSet(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  std::set<Bits> at(unsigned stage) const { return impl_->at(stage); }
  Semantics semantics() const { return impl_->semantics(); }
  bool monotone_presence() const { return impl_->monotone_presence(); }
  std::optional<std::set<Bits>> known_limit() const { return impl_->known_limit(); }
  std::optional<unsigned> stabilization_stage() const { return impl_->stabilization_stage(); }

  bool has_member_prefix_of(const Bits& b, unsigned stage) const {
    std::set<Bits> s = at(stage);
    for (std::size_t n = 0; n <= b.size(); ++n)
      if (s.count(b.prefix(n))) return true;
    return false;
  }

private:
  std::shared_ptr<const Impl> impl_;
};

// Scripted stagewise set driven by toggle events: membership of the string
// flips at each listed stage (absent initially). sigma1-monotone scripts may
// toggle each string at most once; a toy-known-limit script must declare the
// limit, which is validated against the post-final-toggle states.
StagewiseSet scripted_set(StagewiseSet::Semantics semantics,
                          const std::vector<std::pair<Bits, unsigned>>& toggles,
                          std::optional<std::set<Bits>> declared_limit = std::nullopt);

// Stagewise set from timed insertions: each string is present from its given
// stage on. Used to expose allocator output as an approximation; optionally
// a string present from stage 0 regardless (kept out of `inserted` itself).
StagewiseSet enumerated_set(std::vector<std::pair<Bits, unsigned>> inserted,
                            std::optional<Bits> always_present,
                            unsigned complete_stage);

// ---------------------------------------------------------------------------

// Enumeration operator with oracle access, given by finitely many axioms.
// An axiom fires at stage s with oracle E when s >= stage, requires_in ⊆ E
// and requires_out ∩ E = ∅; all tested elements lie below `use` (the length
// of the queried oracle segment).
struct CeAxiom {
  Bits element;
  unsigned stage = 0;
  unsigned use = 0;
  std::set<unsigned> requires_in;
  std::set<unsigned> requires_out;
};

class CeOperator {
public:
  explicit CeOperator(std::vector<CeAxiom> axioms);

  // Elements enumerated with the given oracle by the given stage, together
  // with the uses of their satisfied axioms.
  std::map<Bits, std::vector<unsigned>> satisfied(const std::set<unsigned>& oracle,
                                                  unsigned stage) const;
  std::set<Bits> enumerate(const std::set<unsigned>& oracle, unsigned stage) const;
  const std::vector<CeAxiom>& axioms() const { return axioms_; }

private:
  std::vector<CeAxiom> axioms_;
};

// Delayed-enumeration combination of an operator and an oracle approximation:
// at stage s the result holds exactly the elements some axiom enumerates with
// oracle E(s), *except* those whose queried oracle segment changed between
// stages s-1 and s; such an element reappears at the next stage at which the
// operator still enumerates it and the segment kept still. Elements admitted
// at stages where the oracle's entries are final below the use are final.
StagewiseSet hat_trick(const CeOperator& w, const OracleApprox& e);

// Stages <= horizon at which some element n enters E with the part of E
// below n already equal to the known limit below n. Requires a known-limit
// oracle (rejects ce-monotone approximations without one).
std::vector<unsigned> true_stages(const OracleApprox& e, unsigned horizon);

// All strings of length <= max_len extending some member of V.at(stage)
// (members included). Precondition: max_len covers the longest member.
std::set<Bits> upward_closure_at(const StagewiseSet& v, unsigned stage, unsigned max_len);

}  // namespace omegaforge
