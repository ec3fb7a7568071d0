#pragma once

#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "omegaforge/bits.hpp"
#include "omegaforge/class_tags.hpp"
#include "omegaforge/errors.hpp"

namespace omegaforge {

// ---------------------------------------------------------------------------
// The three machine models. Machines are closed immutable values; eval is a
// pure, deterministic function of its arguments, so machines can be shared
// and evaluated concurrently.
//
// Oracle machines follow the identity-use convention: eval receives the
// whole available oracle prefix tau and may require |tau| >= n to answer;
// definedness on a prefix implies definedness (same value) on every
// extension, never the other way around.
// ---------------------------------------------------------------------------

enum class UsePolicy { identity, recorded };

class StagedOracleMachine {
public:
  class Impl {
  public:
    virtual ~Impl() = default;
    // Stage-monotone: once defined, defined with the same value ever after.
    virtual std::optional<unsigned> eval(const Bits& tau, unsigned n, unsigned stage) const = 0;
    virtual UsePolicy use_policy() const { return UsePolicy::identity; }
    virtual const ClassCertifier* certifier() const { return nullptr; }
  };

  explicit StagedOracleMachine(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  std::optional<unsigned> eval(const Bits& tau, unsigned n, unsigned stage) const {
    return impl_->eval(tau, n, stage);
  }
  UsePolicy use_policy() const { return impl_->use_policy(); }
  const ClassCertifier* certifier() const { return impl_->certifier(); }

private:
  std::shared_ptr<const Impl> impl_;
};

class MonotoneMachine {
public:
  class Impl {
  public:
    virtual ~Impl() = default;
    virtual std::optional<Bits> eval(const Bits& sigma, unsigned stage) const = 0;
    virtual const ClassCertifier* certifier() const { return nullptr; }
  };

  explicit MonotoneMachine(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  std::optional<Bits> eval(const Bits& sigma, unsigned stage) const {
    return impl_->eval(sigma, stage);
  }
  const ClassCertifier* certifier() const { return impl_->certifier(); }

private:
  std::shared_ptr<const Impl> impl_;
};

// Stage-free model: eval(sigma, n) is total and decidable. Contract:
//  (a) defined at (sigma, m) and n < m  =>  defined at (sigma, n) with
//      output(sigma, n) a prefix of output(sigma, m);
//  (b) defined at (sigma, n)  =>  defined at (sigma*tau, n), equal output;
//  (c) definedness answers in bounded time for every (sigma, n).
class InfSDMachine {
public:
  class Impl {
  public:
    virtual ~Impl() = default;
    virtual std::optional<Bits> eval(const Bits& sigma, unsigned n) const = 0;
    virtual const ClassCertifier* certifier() const { return nullptr; }
  };

  explicit InfSDMachine(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  std::optional<Bits> eval(const Bits& sigma, unsigned n) const { return impl_->eval(sigma, n); }
  const ClassCertifier* certifier() const { return impl_->certifier(); }

private:
  std::shared_ptr<const Impl> impl_;
};

// ---------------------------------------------------------------------------
// Toy machines for tests and composition corpora.
// ---------------------------------------------------------------------------

// Everywhere-undefined machine. Its certifier knows the whole (empty) graph
// from `complete_stage` on: nothing is total / infinite-domain / cofinite;
// every domain is (trivially) computable; outputs are vacuously all-ones.
StagedOracleMachine empty_oracle_machine(unsigned complete_stage = 0);

struct OracleTableEntry {
  Bits sigma;       // minimal oracle prefix the value is attached to
  unsigned n = 0;
  unsigned value = 0;
  unsigned stage = 0;  // first stage at which the value is present
};

// Finite-table machine: eval(tau, n, s) is defined iff some entry has
// sigma <= tau (prefix), matching n, and stage <= s. Entries must not
// conflict (same lookup, different value). complete_stage >= all entry
// stages; from there the certifier reads the table as the full graph.
StagedOracleMachine table_oracle_machine(std::vector<OracleTableEntry> entries,
                                         unsigned complete_stage);

// Total-with-value `value` exactly on oracles extending a member of
// `region`, from stage `from_stage` on; undefined elsewhere. The region is
// construction data, so classifications are certified at every stage.
StagedOracleMachine region_total_machine(const std::vector<Bits>& region, unsigned value = 0,
                                         unsigned from_stage = 0);

// Bounded evaluation of M(X, n): nullopt = pending (never contradicts later
// definedness). Passes the whole available prefix to the machine.
std::optional<unsigned> run_oracle(const StagedOracleMachine& m, const Bits& x, unsigned n,
                                   unsigned stage);

// ---------------------------------------------------------------------------

struct MonotoneTableEntry {
  Bits sigma;
  Bits output;
  unsigned stage = 0;
};

MonotoneMachine monotone_table_machine(std::vector<MonotoneTableEntry> entries);

// Prefix-order supremum of the defined values on prefixes of X at `stage`;
// empty string when nothing is defined. Throws invariant_violation naming
// the offending input pair if two defined values violate monotonicity.
Bits monotone_output(const MonotoneMachine& n, const Bits& x, unsigned stage);

// ---------------------------------------------------------------------------

struct InftyResult {
  // Least n <= n_max where eval was undefined; convergence is refuted.
  std::optional<unsigned> refuted_at;
  // Output at n_max when not refuted (convergence not refuted up to n_max).
  Bits output;

  bool alive() const { return !refuted_at.has_value(); }
};

// Scans n = 0..n_max. Detects violations of contract clause (a) (a defined
// point after an undefined one) and of the output chain, throwing
// invariant_violation.
InftyResult infty_eval(const InfSDMachine& m, const Bits& sigma, unsigned n_max);

// Minimal strings (length <= max_len) alive at n_max whose proper prefixes
// are all refuted. Prefix-free by construction; the induced open set shrinks
// (or stays) as n_max grows.
std::set<Bits> mstar_front(const InfSDMachine& m, unsigned max_len, unsigned n_max);

// ---------------------------------------------------------------------------

// Grid sizes for the splice precondition scan (and the verify suite).
struct CheckHorizons {
  unsigned depth = 6;
  unsigned n_max = 8;
  unsigned stage = 32;
};

class splice_conflict : public domain_error {
public:
  splice_conflict(const Bits& sigma, unsigned n, unsigned stage);
};

// Machine M with M(rho*tau, n) = V(tau, n); M(sigma, n) = N(sigma, n) for
// sigma incompatible with rho; undefined on proper prefixes of rho.
// Precondition (checked on the horizons grid): N is undefined on every
// oracle prefix compatible with rho.
StagedOracleMachine splice(const StagedOracleMachine& v, const StagedOracleMachine& n,
                           const Bits& rho, const CheckHorizons& horizons = {});

// Prefix-free program coding 0^e 1.
Bits universal_code(unsigned e);

// Machine U with U(code(e)*X, n) = family[e](X, n); undefined on oracle
// prefixes with no coded program yet (all-zero prefixes) or with e outside
// the family.
StagedOracleMachine universal_from_family(std::vector<StagedOracleMachine> family);

// ---------------------------------------------------------------------------
// Invariant suite (used by tests and the verify command). Each check returns
// nothing and throws invariant_violation with a witness on failure.
// ---------------------------------------------------------------------------

void check_oracle_machine_invariants(const StagedOracleMachine& m, const CheckHorizons& h);
void check_monotone_machine_invariants(const MonotoneMachine& m, unsigned depth, unsigned stage);
void check_infsd_machine_invariants(const InfSDMachine& m, unsigned depth, unsigned n_max);

}  // namespace omegaforge
