#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "omegaforge/bits.hpp"
#include "omegaforge/dyadic.hpp"
#include "omegaforge/kraft.hpp"
#include "omegaforge/machines.hpp"
#include "omegaforge/stagewise.hpp"

namespace omegaforge {

// ---------------------------------------------------------------------------
// Machine builders. Each turns stagewise data into a machine value, attaching
// a certifier wherever permanent construction data supports one.
// ---------------------------------------------------------------------------

// Totality region carved by a stage-indexed set V: the machine defines, at
// each stage u >= 1, value 0 at (sigma, |sigma|) for every sigma of length
// < u whose restriction has no prefix in V.at(u). Consequently M(X) is total
// exactly when every prefix of X escapes V at arbitrarily late stages; for a
// stabilizing V with limit U this is "no prefix of X lies in U".
// When V declares a known limit and a stabilization stage, the machine
// carries a certifier for TOT / INF-domain (= TOT here), COF-domain (= TOT),
// COM-domain (everything; finite or full domains are computable) and
// COF-output (complement of TOT: a total run emits infinitely many zeros).
StagedOracleMachine tot_machine_from_sigma2(const StagewiseSet& v);

// N(sigma, s) = 0^{|sigma|} iff M(sigma, i, s) is defined for every
// i < |sigma|. Requires identity use. Certifies INF-output / FIN-output by
// delegating to M's totality certificates (output is infinite iff M total).
MonotoneMachine monotone_from_tot(const StagedOracleMachine& m);

// Wrapper: undefined on every oracle prefix compatible with rho (prefix or
// extension), delegating to the inner machine elsewhere. The certifier maps
// the [rho] cylinder per tag (empty runs: not total, finite domain,
// computable, vacuously all-ones) and delegates incompatible cylinders.
StagedOracleMachine rho_guard(const StagedOracleMachine& inner, const Bits& rho);

// ---------------------------------------------------------------------------

// A stage-indexed dyadic target. Value at stage s is script[min(s, len-1)]
// (the last value repeats forever). c is the 2^{-c} reserve exponent.
struct PrescribedTarget {
  enum class Direction { ascending, descending };
  Direction direction = Direction::ascending;
  std::vector<Dyadic> script;
  unsigned c = 1;

  Dyadic at(unsigned stage) const;
  unsigned last_stage() const;  // stage from which the value is constant
  void validate_basic() const;  // nonempty, in (0,1), monotone per direction
};

struct BuildLog {
  std::vector<KraftAllocator::Record> allocations;
  Bits rho;                                          // reserved string, if any
  std::vector<std::pair<Bits, unsigned>> set_stages; // produced set w/ entry stages
  unsigned stabilization = 0;
};

struct PrescribedOracleMachine {
  StagedOracleMachine machine;
  Bits rho;
  BuildLog log;
};

struct PrescribedInfSDMachine {
  InfSDMachine machine;
  Bits rho;
  BuildLog log;
};

// Descending target; requires target + 2^{-c} < 1 at every stage. Reserves
// rho = first allocation (length c), allocates the complement increments
// 1 - target - 2^{-c}, and builds the totality machine over the allocation
// with rho permanently present, guarded so every rho-compatible prefix is
// undefined. Measure of the total region converges to the target from above.
PrescribedOracleMachine prescribed_tot_machine(const PrescribedTarget& target);

// splice(V, inner, rho) where inner realizes beta_s = alpha_s - 2^{-c} *
// gamma_s as a prescribed totality machine. c may be supplied; otherwise the
// least c in [1, 32] making beta descending, inside (0,1), with
// beta_s + 2^{-c} < 1 at every stage (the inner build's own reserve bound),
// is chosen. gamma is a descending script for the truncated total-region
// measure of V.
StagedOracleMachine prescribed_universal_tot(const PrescribedTarget& alpha,
                                             const StagedOracleMachine& v,
                                             const std::vector<Dyadic>& gamma_script,
                                             std::optional<unsigned> c = std::nullopt,
                                             BuildLog* log_out = nullptr);

// ---------------------------------------------------------------------------
// Movable-marker machinery.
// ---------------------------------------------------------------------------

// Bijection between pairs (sigma, j) and naturals, graded by |sigma| + j so
// codes grow with both coordinates (every jump target at stage s exceeds s).
// Codes need arbitrary precision: weight w contributes 2^{w+1} - 1 pairs.
class ColumnPairing {
public:
  static BigInt pair(const Bits& sigma, unsigned j);
  static std::pair<Bits, unsigned> unpair(const BigInt& code);
};

// Stage-indexed cell counters (t, sigma) -> count, monotone in stage.
// Unbounded growth must propagate upward: if cell (t, sigma) is unbounded,
// sigma <= tau and t <= k, then (k, tau) is unbounded too.
class MonotoneStageFamily {
public:
  class Impl {
  public:
    virtual ~Impl() = default;
    virtual unsigned count(unsigned t, const Bits& sigma, unsigned stage) const = 0;
    virtual bool unbounded(unsigned t, const Bits& sigma) const = 0;
    // Minimal strings sigma with (|sigma|, sigma) unbounded; the upward
    // closure of this prefix-free set is the cofiniteness region.
    virtual std::vector<Bits> unbounded_roots() const = 0;
  };

  explicit MonotoneStageFamily(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  unsigned count(unsigned t, const Bits& sigma, unsigned stage) const {
    return impl_->count(t, sigma, stage);
  }
  bool unbounded(unsigned t, const Bits& sigma) const { return impl_->unbounded(t, sigma); }
  std::vector<Bits> unbounded_roots() const { return impl_->unbounded_roots(); }

private:
  std::shared_ptr<const Impl> impl_;
};

struct FamilyCellScript {
  unsigned t = 0;
  Bits sigma;
  std::vector<unsigned> growth_stages;      // stages at which the count ticks up
  std::optional<unsigned> grow_forever_from; // unbounded growth from this stage on
};

// Scripted family. Validates the upward-propagation contract on the scripted
// cells (a cell declared unbounded must not sit below a scripted bounded cell).
MonotoneStageFamily scripted_family(std::vector<FamilyCellScript> cells);

// Family whose cell (t, sigma) grows forever (from the matching entry stage)
// iff sigma extends a member with entry stage, of length <= t; used to make
// the upward closure of an allocated set the cofiniteness region.
MonotoneStageFamily closure_family(const std::vector<std::pair<Bits, unsigned>>& members);

// The movable-marker machine. Each column {pair(sigma, j) : j} owns one
// marker starting at pair(sigma, 0), jumping to pair(sigma, u) at every
// stage u at which cell (|sigma|, sigma) grows or |sigma| enters E. At stage
// u >= 1 every column point n < u except the current marker becomes defined
// with value n; points in columns whose owner is incompatible with the
// oracle prefix are defined (value n) under the same n < stage gate; owners
// extending the prefix stay pending. Settled markers decode (via unpair) the
// stage of the last event that moved them.
class MarkerMachine {
public:
  struct State;

  MarkerMachine(MonotoneStageFamily family, OracleApprox oracle);

  StagedOracleMachine machine() const;
  BigInt marker_position(const Bits& sigma, unsigned stage) const;
  // (stage, new position) for every jump up to the horizon.
  std::vector<std::pair<unsigned, BigInt>> move_log(const Bits& sigma, unsigned horizon) const;

private:
  std::shared_ptr<State> state_;
};

StagedOracleMachine cof_machine_from_sigma3(const MonotoneStageFamily& f, const OracleApprox& e);

// Ascending target; requires target + 2^{-c} < 1 at every stage. Reserves
// rho, allocates the target increments into S, and drives the marker
// construction with the closure family of S, guarded on rho. The cofinite
// region converges to [S] (measure = target) from below.
PrescribedOracleMachine prescribed_cof_machine(const PrescribedTarget& target);

// Ascending target; requires 2^{-c} <= target at every stage (equality
// allowed: S empty). Allocates target - 2^{-c}; the computable-domain region
// is [rho] (empty runs) plus [S] (cofinite runs), measure = target.
PrescribedOracleMachine prescribed_com_machine(const PrescribedTarget& target);

// ---------------------------------------------------------------------------

// M(sigma, n) defined (output empty) iff every section t in [|sigma|, n] has
// a prefix of sigma inside V.at(t); vacuously defined when n < |sigma|.
// Satisfies the infinitary contract by construction. With a known limit and
// stabilization the certifier handles DOM-infsd (cylinder covered by the
// limit), FIN-infsd (= DOM; outputs stay empty) and INF-infsd (empty).
InfSDMachine infsd_from_sigma2(const StagewiseSet& v);

InfSDMachine infsd_rho_guard(const InfSDMachine& inner, const Bits& rho);

// Ascending target; requires target + 2^{-c} < 1 at every stage. Reserves
// rho, allocates the target increments (first increment = first value), and
// builds the section machine over the allocation with rho-compatible strings
// suppressed. The limit-domain measure equals the target.
PrescribedInfSDMachine prescribed_domain_infsd(const PrescribedTarget& target);

}  // namespace omegaforge
