#include "omegaforge/constructions.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "omegaforge/prefix_free.hpp"

namespace omegaforge {

namespace {

bool is_oracle_tag(ClassTag tag) {
  switch (tag) {
    case ClassTag::TOT:
    case ClassTag::INF_domain:
    case ClassTag::COF_domain:
    case ClassTag::COM_domain:
    case ClassTag::COF_output:
      return true;
    default:
      return false;
  }
}

bool is_infsd_tag(ClassTag tag) {
  return tag == ClassTag::DOM_infsd || tag == ClassTag::FIN_infsd ||
         tag == ClassTag::INF_infsd;
}

// A machine undefined on the whole cylinder: nothing converges, so the run
// is not total / infinite / cofinite, the (empty) domain is computable, and
// "all but finitely many outputs are 1" holds vacuously.
ClassDecision empty_run_decision(ClassTag tag) {
  switch (tag) {
    case ClassTag::TOT:
    case ClassTag::INF_domain:
    case ClassTag::COF_domain:
      return ClassDecision::out_certified();
    case ClassTag::COM_domain:
      return ClassDecision::in_certified();
    case ClassTag::COF_output:
      return ClassDecision::in_certified();
    default:
      return ClassDecision::none();
  }
}

ClassDecision swap_in_out(ClassDecision d) {
  if (d.status == ClassDecision::Status::in) d.status = ClassDecision::Status::out;
  else if (d.status == ClassDecision::Status::out) d.status = ClassDecision::Status::in;
  return d;
}

// Cylinder-cover queries against a fixed limit set of strings, reduced to its
// minimal (hence prefix-free) elements once.
class limit_cover {
public:
  explicit limit_cover(const std::set<Bits>& members) : minimal_(minimal_elements(members)) {}

  bool any_compatible(const Bits& tau) const {
    for (const Bits& m : minimal_)
      if (m.compatible_with(tau)) return true;
    return false;
  }
  bool any_prefix_of(const Bits& tau) const {
    for (const Bits& m : minimal_)
      if (m.is_prefix_of(tau)) return true;
    return false;
  }
  // [tau] contained in the union of member cylinders: compare exact measures
  // of the disjoint intersections against the cylinder's own weight.
  bool covers(const Bits& tau) const {
    Dyadic total;
    for (const Bits& m : minimal_)
      if (m.compatible_with(tau))
        total += Dyadic::pow2_neg(static_cast<unsigned>(std::max(m.size(), tau.size())));
    return total == Dyadic::pow2_neg(static_cast<unsigned>(tau.size()));
  }

private:
  std::vector<Bits> minimal_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Totality machine from a stage-indexed set.
// ---------------------------------------------------------------------------

namespace {

class tot_certifier : public ClassCertifier {
public:
  tot_certifier(const std::set<Bits>& limit, unsigned stabilization)
      : cover_(limit), stab_(stabilization) {}

  bool handles(ClassTag tag) const override { return is_oracle_tag(tag); }

  ClassDecision decide(const Bits& tau, ClassTag tag, unsigned stage, unsigned) const override {
    if (stage < stab_) return ClassDecision::none();
    // Total exactly on oracles no prefix of which lies in the limit set:
    // whole cylinders inside/outside reduce to compatibility/cover queries.
    bool all_total = !cover_.any_compatible(tau);
    bool none_total = cover_.covers(tau);
    switch (tag) {
      case ClassTag::TOT:
      case ClassTag::INF_domain:  // non-total runs here have finite domains
      case ClassTag::COF_domain:
        if (all_total) return ClassDecision::in_certified();
        if (none_total) return ClassDecision::out_certified();
        return ClassDecision::none();
      case ClassTag::COM_domain:  // full or finite, either way computable
        return ClassDecision::in_certified();
      case ClassTag::COF_output:  // total runs emit infinitely many zeros
        if (all_total) return ClassDecision::out_certified();
        if (none_total) return ClassDecision::in_certified();
        return ClassDecision::none();
      default:
        return ClassDecision::none();
    }
  }

private:
  limit_cover cover_;
  unsigned stab_;
};

class tot_machine_impl : public StagedOracleMachine::Impl {
public:
  explicit tot_machine_impl(StagewiseSet v) : v_(std::move(v)) {
    std::optional<std::set<Bits>> limit = v_.known_limit();
    std::optional<unsigned> stab = v_.stabilization_stage();
    if (limit && stab) cert_ = std::make_shared<tot_certifier>(*limit, *stab);
  }

  std::optional<unsigned> eval(const Bits& tau, unsigned n, unsigned stage) const override {
    if (n > tau.size()) return std::nullopt;
    Bits sigma = tau.prefix(n);
    for (unsigned u = n + 1; u <= stage; ++u)
      if (!v_.has_member_prefix_of(sigma, u)) return 0;
    return std::nullopt;
  }
  const ClassCertifier* certifier() const override { return cert_.get(); }

private:
  StagewiseSet v_;
  std::shared_ptr<const ClassCertifier> cert_;
};

}  // namespace

StagedOracleMachine tot_machine_from_sigma2(const StagewiseSet& v) {
  return StagedOracleMachine(std::make_shared<tot_machine_impl>(v));
}

// ---------------------------------------------------------------------------
// Length-reporting monotone machine from a totality machine.
// ---------------------------------------------------------------------------

namespace {

class totality_delegate_certifier : public ClassCertifier {
public:
  explicit totality_delegate_certifier(StagedOracleMachine m) : m_(std::move(m)) {}

  bool handles(ClassTag tag) const override {
    if (tag != ClassTag::INF_output && tag != ClassTag::FIN_output) return false;
    return m_.certifier() && m_.certifier()->handles(ClassTag::TOT);
  }

  ClassDecision decide(const Bits& tau, ClassTag tag, unsigned stage,
                       unsigned n_max) const override {
    ClassDecision d = m_.certifier()->decide(tau, ClassTag::TOT, stage, n_max);
    return tag == ClassTag::INF_output ? d : swap_in_out(d);
  }

private:
  StagedOracleMachine m_;
};

class monotone_from_tot_impl : public MonotoneMachine::Impl {
public:
  explicit monotone_from_tot_impl(StagedOracleMachine m)
      : m_(std::move(m)), cert_(std::make_shared<totality_delegate_certifier>(m_)) {}

  std::optional<Bits> eval(const Bits& sigma, unsigned stage) const override {
    for (unsigned i = 0; i < sigma.size(); ++i)
      if (!m_.eval(sigma, i, stage)) return std::nullopt;
    return Bits::zeros(sigma.size());
  }
  const ClassCertifier* certifier() const override { return cert_.get(); }

private:
  StagedOracleMachine m_;
  std::shared_ptr<const ClassCertifier> cert_;
};

}  // namespace

MonotoneMachine monotone_from_tot(const StagedOracleMachine& m) {
  if (m.use_policy() != UsePolicy::identity)
    throw domain_error("identity-use oracle machine required");
  return MonotoneMachine(std::make_shared<monotone_from_tot_impl>(m));
}

// ---------------------------------------------------------------------------
// rho guard.
// ---------------------------------------------------------------------------

namespace {

class rho_guard_certifier : public ClassCertifier {
public:
  rho_guard_certifier(StagedOracleMachine inner, Bits rho)
      : inner_(std::move(inner)), rho_(std::move(rho)) {}

  bool handles(ClassTag tag) const override { return is_oracle_tag(tag); }

  ClassDecision decide(const Bits& tau, ClassTag tag, unsigned stage,
                       unsigned n_max) const override {
    if (rho_.is_prefix_of(tau)) return empty_run_decision(tag);
    if (tau.is_proper_prefix_of(rho_)) return ClassDecision::none();
    if (inner_.certifier() && inner_.certifier()->handles(tag))
      return inner_.certifier()->decide(tau, tag, stage, n_max);
    return ClassDecision::none();
  }

private:
  StagedOracleMachine inner_;
  Bits rho_;
};

class rho_guard_impl : public StagedOracleMachine::Impl {
public:
  rho_guard_impl(StagedOracleMachine inner, Bits rho)
      : inner_(std::move(inner)),
        rho_(std::move(rho)),
        cert_(std::make_shared<rho_guard_certifier>(inner_, rho_)) {}

  std::optional<unsigned> eval(const Bits& tau, unsigned n, unsigned stage) const override {
    if (tau.compatible_with(rho_)) return std::nullopt;
    return inner_.eval(tau, n, stage);
  }
  UsePolicy use_policy() const override { return inner_.use_policy(); }
  const ClassCertifier* certifier() const override { return cert_.get(); }

private:
  StagedOracleMachine inner_;
  Bits rho_;
  std::shared_ptr<const ClassCertifier> cert_;
};

}  // namespace

StagedOracleMachine rho_guard(const StagedOracleMachine& inner, const Bits& rho) {
  return StagedOracleMachine(std::make_shared<rho_guard_impl>(inner, rho));
}

// ---------------------------------------------------------------------------
// Prescribed targets and the allocation driver.
// ---------------------------------------------------------------------------

Dyadic PrescribedTarget::at(unsigned stage) const {
  if (script.empty()) throw domain_error("empty prescription script");
  return script[std::min<std::size_t>(stage, script.size() - 1)];
}

unsigned PrescribedTarget::last_stage() const {
  if (script.empty()) throw domain_error("empty prescription script");
  return static_cast<unsigned>(script.size() - 1);
}

void PrescribedTarget::validate_basic() const {
  if (script.empty()) throw domain_error("empty prescription script");
  for (const Dyadic& d : script)
    if (!(d > Dyadic(0)) || !(d < Dyadic(1)))
      throw domain_error("prescribed value " + d.to_string() + " outside (0, 1)");
  for (std::size_t i = 0; i + 1 < script.size(); ++i) {
    if (direction == Direction::ascending && script[i] > script[i + 1])
      throw domain_error("script is not ascending");
    if (direction == Direction::descending && script[i] < script[i + 1])
      throw domain_error("script is not descending");
  }
}

namespace {

void require_direction(const PrescribedTarget& t, PrescribedTarget::Direction d) {
  t.validate_basic();
  if (t.direction != d)
    throw domain_error(d == PrescribedTarget::Direction::ascending
                           ? "ascending script required"
                           : "descending script required");
}

// Transient script values may touch the budget exactly (their increment is
// then zero); the limit value must leave strictly positive headroom.
void require_reserve_headroom(const PrescribedTarget& t) {
  Dyadic reserve = Dyadic::pow2_neg(t.c);
  for (const Dyadic& a : t.script)
    if (a + reserve > Dyadic(1))
      throw domain_error("target " + a.to_string() + " plus the 2^-" + std::to_string(t.c) +
                         " reserve reaches 1");
  const Dyadic& limit = t.script.back();
  if (!(limit + reserve < Dyadic(1)))
    throw domain_error("target " + limit.to_string() + " plus the 2^-" + std::to_string(t.c) +
                       " reserve reaches 1");
}

// Reserve one length-c string, then turn each stage's dyadic increment into
// binary-expansion length requests against one shared budget.
BuildLog run_allocation(unsigned c, const std::vector<Dyadic>& increments) {
  KraftAllocator alloc;
  BuildLog log;
  log.rho = alloc.allocate(c);
  for (unsigned s = 0; s < increments.size(); ++s)
    for (unsigned len : increments[s].power_lengths())
      log.set_stages.emplace_back(alloc.allocate(len), s);
  log.allocations = alloc.log();
  log.stabilization = 0;
  for (const auto& [b, s] : log.set_stages) log.stabilization = std::max(log.stabilization, s);
  return log;
}

}  // namespace

PrescribedOracleMachine prescribed_tot_machine(const PrescribedTarget& target) {
  require_direction(target, PrescribedTarget::Direction::descending);
  require_reserve_headroom(target);
  std::vector<Dyadic> inc;
  inc.push_back(Dyadic(1) - target.script[0] - Dyadic::pow2_neg(target.c));
  for (unsigned s = 1; s <= target.last_stage(); ++s)
    inc.push_back(target.at(s - 1) - target.at(s));
  BuildLog log = run_allocation(target.c, inc);
  StagewiseSet v = enumerated_set(log.set_stages, log.rho, log.stabilization);
  StagedOracleMachine m = rho_guard(tot_machine_from_sigma2(v), log.rho);
  return {std::move(m), log.rho, std::move(log)};
}

StagedOracleMachine prescribed_universal_tot(const PrescribedTarget& alpha,
                                             const StagedOracleMachine& v,
                                             const std::vector<Dyadic>& gamma_script,
                                             std::optional<unsigned> c,
                                             BuildLog* log_out) {
  require_direction(alpha, PrescribedTarget::Direction::descending);
  if (gamma_script.empty()) throw domain_error("empty truncation script");
  for (const Dyadic& g : gamma_script)
    if (g.is_negative() || g > Dyadic(1))
      throw domain_error("truncation value " + g.to_string() + " outside [0, 1]");
  for (std::size_t i = 0; i + 1 < gamma_script.size(); ++i)
    if (gamma_script[i] < gamma_script[i + 1])
      throw domain_error("truncation script is not descending");

  std::size_t stages = std::max(alpha.script.size(), gamma_script.size());
  auto gamma_at = [&](std::size_t s) {
    return gamma_script[std::min(s, gamma_script.size() - 1)];
  };
  auto admissible = [&](unsigned cc) -> std::optional<std::vector<Dyadic>> {
    Dyadic reserve = Dyadic::pow2_neg(cc);
    std::vector<Dyadic> beta;
    for (std::size_t s = 0; s < stages; ++s) {
      Dyadic b = alpha.at(static_cast<unsigned>(s)) - reserve * gamma_at(s);
      if (!(b > Dyadic(0)) || !(b + reserve < Dyadic(1))) return std::nullopt;
      if (!beta.empty() && beta.back() < b) return std::nullopt;
      beta.push_back(b);
    }
    return beta;
  };

  unsigned chosen = 0;
  std::vector<Dyadic> beta;
  if (c) {
    std::optional<std::vector<Dyadic>> b = admissible(*c);
    if (!b) throw domain_error("supplied reserve exponent is not admissible");
    chosen = *c;
    beta = std::move(*b);
  } else {
    for (unsigned cc = 1; cc <= 32 && chosen == 0; ++cc) {
      if (std::optional<std::vector<Dyadic>> b = admissible(cc)) {
        chosen = cc;
        beta = std::move(*b);
      }
    }
    if (chosen == 0) throw domain_error("no admissible reserve exponent within the scan bound");
  }

  PrescribedTarget inner_target;
  inner_target.direction = PrescribedTarget::Direction::descending;
  inner_target.script = std::move(beta);
  inner_target.c = chosen;
  PrescribedOracleMachine inner = prescribed_tot_machine(inner_target);
  if (log_out) *log_out = inner.log;
  return splice(v, inner.machine, inner.rho);
}

// ---------------------------------------------------------------------------
// Column pairing.
// ---------------------------------------------------------------------------

namespace {

BigInt pairing_base(unsigned w) { return (BigInt(1) << (w + 1)) - 2 - w; }

}  // namespace

BigInt ColumnPairing::pair(const Bits& sigma, unsigned j) {
  unsigned w = static_cast<unsigned>(sigma.size()) + j;
  BigInt value = 0;
  for (std::size_t i = 0; i < sigma.size(); ++i) value = (value << 1) | sigma.bit(i);
  return pairing_base(w) + ((BigInt(1) << sigma.size()) - 1) + value;
}

std::pair<Bits, unsigned> ColumnPairing::unpair(const BigInt& code) {
  if (code < 0) throw domain_error("pairing codes are non-negative");
  unsigned w = 0;
  while (pairing_base(w + 1) <= code) ++w;
  BigInt rest = code - pairing_base(w);
  // Within weight w the length-l strings occupy [2^l - 1, 2^{l+1} - 1).
  unsigned l = boost::multiprecision::msb(BigInt(rest + 1));
  BigInt value = rest - ((BigInt(1) << l) - 1);
  std::string s(l, '0');
  for (unsigned i = 0; i < l; ++i)
    if (boost::multiprecision::bit_test(value, l - 1 - i)) s[i] = '1';
  return {*Bits::parse(s), w - l};
}

// ---------------------------------------------------------------------------
// Stage families.
// ---------------------------------------------------------------------------

namespace {

class closure_family_impl : public MonotoneStageFamily::Impl {
public:
  explicit closure_family_impl(std::vector<std::pair<Bits, unsigned>> members)
      : members_(std::move(members)) {}

  unsigned count(unsigned t, const Bits& sigma, unsigned stage) const override {
    std::optional<unsigned> first;
    for (const auto& [m, e] : members_)
      if (m.size() <= t && m.is_prefix_of(sigma))
        first = std::min(first.value_or(std::max(e, 1u)), std::max(e, 1u));
    if (!first || stage < *first) return 0;
    return stage - *first + 1;
  }

  bool unbounded(unsigned t, const Bits& sigma) const override {
    for (const auto& [m, e] : members_)
      if (m.size() <= t && m.is_prefix_of(sigma)) return true;
    return false;
  }

  std::vector<Bits> unbounded_roots() const override {
    std::set<Bits> all;
    for (const auto& [m, e] : members_) all.insert(m);
    return minimal_elements(all);
  }

private:
  std::vector<std::pair<Bits, unsigned>> members_;
};

class scripted_family_impl : public MonotoneStageFamily::Impl {
public:
  explicit scripted_family_impl(std::vector<FamilyCellScript> cells) : cells_(std::move(cells)) {
    for (const FamilyCellScript& u : cells_) {
      if (!u.grow_forever_from) continue;
      for (const FamilyCellScript& b : cells_) {
        if (b.grow_forever_from) continue;
        if (u.sigma.is_prefix_of(b.sigma) && u.t <= b.t)
          throw domain_error("cell (" + std::to_string(u.t) + ", \"" + u.sigma.display() +
                             "\") grows forever below the bounded cell (" + std::to_string(b.t) +
                             ", \"" + b.sigma.display() + "\")");
      }
    }
  }

  unsigned count(unsigned t, const Bits& sigma, unsigned stage) const override {
    unsigned best = 0;
    for (const FamilyCellScript& c : cells_)
      if (c.sigma.is_prefix_of(sigma) && c.t <= t)
        best = std::max(best, cell_count(c, stage));
    return best;
  }

  bool unbounded(unsigned t, const Bits& sigma) const override {
    for (const FamilyCellScript& c : cells_)
      if (c.grow_forever_from && c.sigma.is_prefix_of(sigma) && c.t <= t) return true;
    return false;
  }

  std::vector<Bits> unbounded_roots() const override {
    std::set<Bits> candidates;
    for (const FamilyCellScript& c : cells_) {
      if (!c.grow_forever_from) continue;
      if (c.sigma.size() >= c.t) {
        candidates.insert(c.sigma);
        continue;
      }
      unsigned pad = c.t - static_cast<unsigned>(c.sigma.size());
      for (std::uint64_t i = 0; i < (std::uint64_t(1) << pad); ++i)
        candidates.insert(c.sigma + Bits::of_length(pad, i));
    }
    return minimal_elements(candidates);
  }

private:
  static unsigned cell_count(const FamilyCellScript& c, unsigned stage) {
    unsigned n = 0;
    for (unsigned g : c.growth_stages)
      if (g <= stage) ++n;
    if (c.grow_forever_from && stage >= *c.grow_forever_from)
      n += stage - *c.grow_forever_from + 1;
    return n;
  }

  std::vector<FamilyCellScript> cells_;
};

}  // namespace

MonotoneStageFamily scripted_family(std::vector<FamilyCellScript> cells) {
  return MonotoneStageFamily(std::make_shared<scripted_family_impl>(std::move(cells)));
}

MonotoneStageFamily closure_family(const std::vector<std::pair<Bits, unsigned>>& members) {
  return MonotoneStageFamily(std::make_shared<closure_family_impl>(members));
}

// ---------------------------------------------------------------------------
// Movable markers.
// ---------------------------------------------------------------------------

struct MarkerMachine::State {
  MonotoneStageFamily family;
  OracleApprox oracle;

  State(MonotoneStageFamily f, OracleApprox e) : family(std::move(f)), oracle(std::move(e)) {}

  // Jump trigger at stage u >= 1: the column's cell grew, or the column
  // length entered the oracle at exactly that stage.
  bool event_at(const Bits& sigma, unsigned u) const {
    unsigned t = static_cast<unsigned>(sigma.size());
    if (family.count(t, sigma, u) > family.count(t, sigma, u - 1)) return true;
    return oracle.at(u).count(t) != 0 && oracle.at(u - 1).count(t) == 0;
  }

  BigInt marker(const Bits& sigma, unsigned stage) const {
    unsigned last = 0;
    for (unsigned u = 1; u <= stage; ++u)
      if (event_at(sigma, u)) last = u;
    return ColumnPairing::pair(sigma, last);
  }
};

namespace {

class cof_certifier : public ClassCertifier {
public:
  explicit cof_certifier(std::vector<Bits> roots) : roots_(std::move(roots)) {
    for (const Bits& r : roots_)
      if (r.empty()) everything_unbounded_ = true;
  }

  bool handles(ClassTag tag) const override { return is_oracle_tag(tag); }

  ClassDecision decide(const Bits& tau, ClassTag tag, unsigned, unsigned) const override {
    bool below = false;       // some root is a prefix of tau
    bool compatible = false;  // some root is compatible with tau
    for (const Bits& r : roots_) {
      if (r.is_prefix_of(tau)) below = true;
      if (r.compatible_with(tau)) compatible = true;
    }
    switch (tag) {
      case ClassTag::TOT:
        // Unbounded cells propagate upward, so a run is total exactly when
        // the empty column already moves forever; one bit decides all runs.
        return everything_unbounded_ ? ClassDecision::in_certified()
                                     : ClassDecision::out_certified();
      case ClassTag::INF_domain:
        // At most one hole per own column; foreign columns fill up entirely.
        return ClassDecision::in_certified();
      case ClassTag::COF_domain:
      case ClassTag::COM_domain:
        // Holes sit exactly in the bounded own columns: finitely many iff
        // some unbounded root is passed, and then their positions are read
        // off the construction data.
        if (below) return ClassDecision::in_certified();
        if (!compatible) return ClassDecision::out_certified();
        return ClassDecision::none();
      case ClassTag::COF_output:
        // Defined values equal their own index, so infinitely many differ
        // from 1 on every run.
        return ClassDecision::out_certified();
      default:
        return ClassDecision::none();
    }
  }

private:
  std::vector<Bits> roots_;
  bool everything_unbounded_ = false;
};

class marker_machine_impl : public StagedOracleMachine::Impl {
public:
  explicit marker_machine_impl(std::shared_ptr<MarkerMachine::State> state)
      : state_(std::move(state)),
        cert_(std::make_shared<cof_certifier>(state_->family.unbounded_roots())) {}

  std::optional<unsigned> eval(const Bits& tau, unsigned n, unsigned stage) const override {
    auto [sigma, j] = ColumnPairing::unpair(BigInt(n));
    (void)j;
    if (sigma.is_prefix_of(tau)) {
      BigInt self(n);
      unsigned last = 0;
      for (unsigned u = 1; u <= stage; ++u) {
        if (state_->event_at(sigma, u)) last = u;
        if (u > n && ColumnPairing::pair(sigma, last) != self) return n;
      }
      return std::nullopt;
    }
    if (tau.is_proper_prefix_of(sigma)) return std::nullopt;  // owner still possible
    return n < stage ? std::optional<unsigned>(n) : std::nullopt;
  }
  const ClassCertifier* certifier() const override { return cert_.get(); }

private:
  std::shared_ptr<MarkerMachine::State> state_;
  std::shared_ptr<const ClassCertifier> cert_;
};

}  // namespace

MarkerMachine::MarkerMachine(MonotoneStageFamily family, OracleApprox oracle)
    : state_(std::make_shared<State>(std::move(family), std::move(oracle))) {}

StagedOracleMachine MarkerMachine::machine() const {
  return StagedOracleMachine(std::make_shared<marker_machine_impl>(state_));
}

BigInt MarkerMachine::marker_position(const Bits& sigma, unsigned stage) const {
  return state_->marker(sigma, stage);
}

std::vector<std::pair<unsigned, BigInt>> MarkerMachine::move_log(const Bits& sigma,
                                                                 unsigned horizon) const {
  std::vector<std::pair<unsigned, BigInt>> out;
  for (unsigned u = 1; u <= horizon; ++u)
    if (state_->event_at(sigma, u)) out.emplace_back(u, ColumnPairing::pair(sigma, u));
  return out;
}

StagedOracleMachine cof_machine_from_sigma3(const MonotoneStageFamily& f,
                                            const OracleApprox& e) {
  return MarkerMachine(f, e).machine();
}

// ---------------------------------------------------------------------------
// Prescribed cofinite / computable-domain machines.
// ---------------------------------------------------------------------------

namespace {

std::vector<Dyadic> ascending_increments(const PrescribedTarget& target, Dyadic reserve) {
  std::vector<Dyadic> inc;
  inc.push_back(target.script[0] - reserve);
  for (unsigned s = 1; s <= target.last_stage(); ++s)
    inc.push_back(target.at(s) - target.at(s - 1));
  return inc;
}

PrescribedOracleMachine marker_prescription(const PrescribedTarget& target, Dyadic reserve) {
  BuildLog log = run_allocation(target.c, ascending_increments(target, reserve));
  MonotoneStageFamily f = closure_family(log.set_stages);
  OracleApprox e = scripted_oracle(OracleApprox::Kind::ce_monotone, {});
  StagedOracleMachine m = rho_guard(cof_machine_from_sigma3(f, e), log.rho);
  return {std::move(m), log.rho, std::move(log)};
}

}  // namespace

PrescribedOracleMachine prescribed_cof_machine(const PrescribedTarget& target) {
  require_direction(target, PrescribedTarget::Direction::ascending);
  require_reserve_headroom(target);
  return marker_prescription(target, Dyadic(0));
}

PrescribedOracleMachine prescribed_com_machine(const PrescribedTarget& target) {
  require_direction(target, PrescribedTarget::Direction::ascending);
  Dyadic reserve = Dyadic::pow2_neg(target.c);
  for (const Dyadic& a : target.script)
    if (a < reserve)
      throw domain_error("target " + a.to_string() + " below the 2^-" +
                         std::to_string(target.c) + " reserve");
  return marker_prescription(target, reserve);
}

// ---------------------------------------------------------------------------
// Infinitary self-delimiting machines.
// ---------------------------------------------------------------------------

namespace {

class infsd_certifier : public ClassCertifier {
public:
  infsd_certifier(const std::set<Bits>& limit, unsigned stabilization)
      : cover_(limit), stab_(stabilization) {}

  bool handles(ClassTag tag) const override { return is_infsd_tag(tag); }

  ClassDecision decide(const Bits& tau, ClassTag tag, unsigned, unsigned n_max) const override {
    if (n_max < stab_) return ClassDecision::none();
    switch (tag) {
      case ClassTag::DOM_infsd:
      case ClassTag::FIN_infsd:  // surviving runs keep the empty output
        if (cover_.covers(tau)) return ClassDecision::in_certified();
        if (!cover_.any_compatible(tau)) return ClassDecision::out_certified();
        return ClassDecision::none();
      case ClassTag::INF_infsd:
        return ClassDecision::out_certified();
      default:
        return ClassDecision::none();
    }
  }

private:
  limit_cover cover_;
  unsigned stab_;
};

class infsd_from_sigma2_impl : public InfSDMachine::Impl {
public:
  explicit infsd_from_sigma2_impl(StagewiseSet v) : v_(std::move(v)) {
    std::optional<std::set<Bits>> limit = v_.known_limit();
    std::optional<unsigned> stab = v_.stabilization_stage();
    if (limit && stab) cert_ = std::make_shared<infsd_certifier>(*limit, *stab);
  }

  std::optional<Bits> eval(const Bits& sigma, unsigned n) const override {
    for (unsigned t = static_cast<unsigned>(sigma.size()); t <= n; ++t)
      if (!v_.has_member_prefix_of(sigma, t)) return std::nullopt;
    return Bits();
  }
  const ClassCertifier* certifier() const override { return cert_.get(); }

private:
  StagewiseSet v_;
  std::shared_ptr<const ClassCertifier> cert_;
};

class infsd_guard_certifier : public ClassCertifier {
public:
  infsd_guard_certifier(InfSDMachine inner, Bits rho)
      : inner_(std::move(inner)), rho_(std::move(rho)) {}

  bool handles(ClassTag tag) const override { return is_infsd_tag(tag); }

  ClassDecision decide(const Bits& tau, ClassTag tag, unsigned stage,
                       unsigned n_max) const override {
    if (rho_.is_prefix_of(tau)) return ClassDecision::out_certified();  // no prefix survives
    if (tau.is_proper_prefix_of(rho_)) return ClassDecision::none();
    if (inner_.certifier() && inner_.certifier()->handles(tag))
      return inner_.certifier()->decide(tau, tag, stage, n_max);
    return ClassDecision::none();
  }

private:
  InfSDMachine inner_;
  Bits rho_;
};

class infsd_guard_impl : public InfSDMachine::Impl {
public:
  infsd_guard_impl(InfSDMachine inner, Bits rho)
      : inner_(std::move(inner)),
        rho_(std::move(rho)),
        cert_(std::make_shared<infsd_guard_certifier>(inner_, rho_)) {}

  std::optional<Bits> eval(const Bits& sigma, unsigned n) const override {
    if (sigma.compatible_with(rho_)) return std::nullopt;
    return inner_.eval(sigma, n);
  }
  const ClassCertifier* certifier() const override { return cert_.get(); }

private:
  InfSDMachine inner_;
  Bits rho_;
  std::shared_ptr<const ClassCertifier> cert_;
};

}  // namespace

InfSDMachine infsd_from_sigma2(const StagewiseSet& v) {
  return InfSDMachine(std::make_shared<infsd_from_sigma2_impl>(v));
}

InfSDMachine infsd_rho_guard(const InfSDMachine& inner, const Bits& rho) {
  return InfSDMachine(std::make_shared<infsd_guard_impl>(inner, rho));
}

PrescribedInfSDMachine prescribed_domain_infsd(const PrescribedTarget& target) {
  require_direction(target, PrescribedTarget::Direction::ascending);
  require_reserve_headroom(target);
  BuildLog log = run_allocation(target.c, ascending_increments(target, Dyadic(0)));
  StagewiseSet v = enumerated_set(log.set_stages, std::nullopt, log.stabilization);
  InfSDMachine m = infsd_rho_guard(infsd_from_sigma2(v), log.rho);
  return {std::move(m), log.rho, std::move(log)};
}

}  // namespace omegaforge
