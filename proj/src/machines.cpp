#include "omegaforge/machines.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <utility>

namespace omegaforge {

namespace {

std::string point(const Bits& sigma, unsigned n, unsigned stage) {
  return "(\"" + sigma.display() + "\", " + std::to_string(n) + ", stage " +
         std::to_string(stage) + ")";
}

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

// Shared by the empty machine, finite tables, and out-of-family program
// codes: the run computes a finite partial function on every oracle, so
// nothing is total / infinite / cofinite, every domain is computable, and
// "all but finitely many outputs are 1" holds vacuously.
ClassDecision finite_graph_decision(ClassTag tag) {
  switch (tag) {
    case ClassTag::TOT:
    case ClassTag::INF_domain:
    case ClassTag::COF_domain:
      return ClassDecision::out_certified();
    case ClassTag::COM_domain:
    case ClassTag::COF_output:
      return ClassDecision::in_certified();
    default:
      return ClassDecision::none();
  }
}

class finite_graph_certifier : public ClassCertifier {
public:
  explicit finite_graph_certifier(unsigned complete_stage) : complete_(complete_stage) {}

  bool handles(ClassTag tag) const override { return is_oracle_tag(tag); }

  ClassDecision decide(const Bits&, ClassTag tag, unsigned stage, unsigned) const override {
    if (stage < complete_) return ClassDecision::none();
    return finite_graph_decision(tag);
  }

private:
  unsigned complete_;
};

class empty_machine_impl : public StagedOracleMachine::Impl {
public:
  explicit empty_machine_impl(unsigned complete_stage)
      : certifier_(std::make_shared<finite_graph_certifier>(complete_stage)) {}

  std::optional<unsigned> eval(const Bits&, unsigned, unsigned) const override {
    return std::nullopt;
  }
  const ClassCertifier* certifier() const override { return certifier_.get(); }

private:
  std::shared_ptr<const ClassCertifier> certifier_;
};

class table_machine_impl : public StagedOracleMachine::Impl {
public:
  table_machine_impl(std::vector<OracleTableEntry> entries, unsigned complete_stage)
      : entries_(std::move(entries)),
        certifier_(std::make_shared<finite_graph_certifier>(complete_stage)) {
    for (const OracleTableEntry& e : entries_) {
      if (e.stage > complete_stage)
        throw domain_error("table entry at stage " + std::to_string(e.stage) +
                           " beyond the declared completion stage " +
                           std::to_string(complete_stage));
      for (const OracleTableEntry& f : entries_) {
        if (e.sigma.compatible_with(f.sigma) && e.n == f.n && e.value != f.value)
          throw domain_error("conflicting table values at (\"" + e.sigma.display() + "\", " +
                             std::to_string(e.n) + ")");
      }
    }
  }

  std::optional<unsigned> eval(const Bits& tau, unsigned n, unsigned stage) const override {
    for (const OracleTableEntry& e : entries_)
      if (e.n == n && e.stage <= stage && e.sigma.is_prefix_of(tau)) return e.value;
    return std::nullopt;
  }
  const ClassCertifier* certifier() const override { return certifier_.get(); }

private:
  std::vector<OracleTableEntry> entries_;
  std::shared_ptr<const ClassCertifier> certifier_;
};

class region_certifier : public ClassCertifier {
public:
  region_certifier(std::vector<Bits> region, unsigned value)
      : region_(std::move(region)), value_(value) {}

  bool handles(ClassTag tag) const override { return is_oracle_tag(tag); }

  ClassDecision decide(const Bits& cyl, ClassTag tag, unsigned, unsigned) const override {
    bool inside = false;
    bool compatible = false;
    for (const Bits& r : region_) {
      if (r.is_prefix_of(cyl)) inside = true;
      if (r.compatible_with(cyl)) compatible = true;
    }
    switch (tag) {
      case ClassTag::TOT:
      case ClassTag::INF_domain:
      case ClassTag::COF_domain:
        if (inside) return ClassDecision::in_certified();
        if (!compatible) return ClassDecision::out_certified();
        return ClassDecision::none();
      case ClassTag::COM_domain:
        return ClassDecision::in_certified();
      case ClassTag::COF_output:
        if (value_ == 1) return ClassDecision::in_certified();
        if (inside) return ClassDecision::out_certified();
        if (!compatible) return ClassDecision::in_certified();
        return ClassDecision::none();
      default:
        return ClassDecision::none();
    }
  }

private:
  std::vector<Bits> region_;
  unsigned value_;
};

class region_machine_impl : public StagedOracleMachine::Impl {
public:
  region_machine_impl(std::vector<Bits> region, unsigned value, unsigned from_stage)
      : region_(std::move(region)),
        value_(value),
        from_(from_stage),
        certifier_(std::make_shared<region_certifier>(region_, value_)) {}

  std::optional<unsigned> eval(const Bits& tau, unsigned n, unsigned stage) const override {
    if (stage < from_ || n > tau.size()) return std::nullopt;
    for (const Bits& r : region_)
      if (r.is_prefix_of(tau)) return value_;
    return std::nullopt;
  }
  const ClassCertifier* certifier() const override { return certifier_.get(); }

private:
  std::vector<Bits> region_;
  unsigned value_;
  unsigned from_;
  std::shared_ptr<const ClassCertifier> certifier_;
};

}  // namespace

StagedOracleMachine empty_oracle_machine(unsigned complete_stage) {
  return StagedOracleMachine(std::make_shared<empty_machine_impl>(complete_stage));
}

StagedOracleMachine table_oracle_machine(std::vector<OracleTableEntry> entries,
                                         unsigned complete_stage) {
  return StagedOracleMachine(std::make_shared<table_machine_impl>(std::move(entries),
                                                                  complete_stage));
}

StagedOracleMachine region_total_machine(const std::vector<Bits>& region, unsigned value,
                                         unsigned from_stage) {
  return StagedOracleMachine(std::make_shared<region_machine_impl>(region, value, from_stage));
}

std::optional<unsigned> run_oracle(const StagedOracleMachine& m, const Bits& x, unsigned n,
                                   unsigned stage) {
  // By prefix-consistency the whole available prefix decides: definedness on
  // any shorter prefix carries over to x with the same value.
  return m.eval(x, n, stage);
}

// ---------------------------------------------------------------------------

namespace {

class monotone_table_certifier : public ClassCertifier {
public:
  explicit monotone_table_certifier(unsigned complete_stage) : complete_(complete_stage) {}

  bool handles(ClassTag tag) const override {
    return tag == ClassTag::FIN_output || tag == ClassTag::INF_output;
  }

  // A finite table yields a finite supremum on every stream.
  ClassDecision decide(const Bits&, ClassTag tag, unsigned stage, unsigned) const override {
    if (stage < complete_) return ClassDecision::none();
    if (tag == ClassTag::FIN_output) return ClassDecision::in_certified();
    if (tag == ClassTag::INF_output) return ClassDecision::out_certified();
    return ClassDecision::none();
  }

private:
  unsigned complete_;
};

class monotone_table_impl : public MonotoneMachine::Impl {
public:
  explicit monotone_table_impl(std::vector<MonotoneTableEntry> entries) {
    unsigned complete = 0;
    for (const MonotoneTableEntry& e : entries) {
      complete = std::max(complete, e.stage);
      auto it = table_.find(e.sigma);
      if (it == table_.end()) {
        table_.emplace(e.sigma, std::make_pair(e.output, e.stage));
      } else if (it->second.first != e.output) {
        throw domain_error("conflicting outputs for input \"" + e.sigma.display() + "\"");
      } else {
        it->second.second = std::min(it->second.second, e.stage);
      }
    }
    certifier_ = std::make_shared<monotone_table_certifier>(complete);
  }

  std::optional<Bits> eval(const Bits& sigma, unsigned stage) const override {
    auto it = table_.find(sigma);
    if (it == table_.end() || it->second.second > stage) return std::nullopt;
    return it->second.first;
  }
  const ClassCertifier* certifier() const override { return certifier_.get(); }

private:
  std::map<Bits, std::pair<Bits, unsigned>> table_;
  std::shared_ptr<const ClassCertifier> certifier_;
};

}  // namespace

MonotoneMachine monotone_table_machine(std::vector<MonotoneTableEntry> entries) {
  return MonotoneMachine(std::make_shared<monotone_table_impl>(std::move(entries)));
}

Bits monotone_output(const MonotoneMachine& n, const Bits& x, unsigned stage) {
  Bits sup;
  Bits sup_input;
  bool have = false;
  for (std::size_t k = 0; k <= x.size(); ++k) {
    Bits sigma = x.prefix(k);
    std::optional<Bits> o = n.eval(sigma, stage);
    if (!o) continue;
    if (have && !sup.is_prefix_of(*o))
      throw invariant_violation("monotonicity violated between inputs \"" + sup_input.display() +
                                "\" and \"" + sigma.display() + "\"");
    sup = *o;
    sup_input = sigma;
    have = true;
  }
  return sup;
}

// ---------------------------------------------------------------------------

InftyResult infty_eval(const InfSDMachine& m, const Bits& sigma, unsigned n_max) {
  InftyResult r;
  Bits last;
  bool have = false;
  for (unsigned n = 0; n <= n_max; ++n) {
    std::optional<Bits> o = m.eval(sigma, n);
    if (!o) {
      if (!r.refuted_at) r.refuted_at = n;
      continue;
    }
    if (r.refuted_at)
      throw invariant_violation("defined at " + point(sigma, n, 0) +
                                " after being undefined at bound " +
                                std::to_string(*r.refuted_at));
    if (have && !last.is_prefix_of(*o))
      throw invariant_violation("output chain broken at (\"" + sigma.display() + "\", " +
                                std::to_string(n) + ")");
    last = *o;
    have = true;
  }
  if (!r.refuted_at) r.output = last;
  return r;
}

std::set<Bits> mstar_front(const InfSDMachine& m, unsigned max_len, unsigned n_max) {
  std::map<Bits, bool> alive;
  for (const Bits& s : all_strings_up_to(max_len))
    alive[s] = infty_eval(m, s, n_max).alive();
  std::set<Bits> front;
  for (const auto& [s, ok] : alive) {
    if (!ok) continue;
    bool minimal = true;
    for (std::size_t k = 0; k < s.size() && minimal; ++k)
      if (alive.at(s.prefix(k))) minimal = false;
    if (minimal) front.insert(s);
  }
  return front;
}

// ---------------------------------------------------------------------------

splice_conflict::splice_conflict(const Bits& sigma, unsigned n, unsigned stage)
    : domain_error("outer machine defined at " + point(sigma, n, stage) +
                   ", which is compatible with the reserved root") {}

namespace {

class splice_certifier : public ClassCertifier {
public:
  splice_certifier(const ClassCertifier* v, const ClassCertifier* n, Bits rho)
      : v_(v), n_(n), rho_(std::move(rho)) {}

  bool handles(ClassTag tag) const override {
    return is_oracle_tag(tag) && v_->handles(tag) && n_->handles(tag);
  }

  ClassDecision decide(const Bits& cyl, ClassTag tag, unsigned stage,
                       unsigned n_max) const override {
    if (rho_.is_prefix_of(cyl))
      return v_->decide(cyl.suffix_from(rho_.size()), tag, stage, n_max);
    if (cyl.is_proper_prefix_of(rho_)) return ClassDecision::none();
    return n_->decide(cyl, tag, stage, n_max);
  }

private:
  const ClassCertifier* v_;
  const ClassCertifier* n_;
  Bits rho_;
};

class splice_impl : public StagedOracleMachine::Impl {
public:
  splice_impl(StagedOracleMachine v, StagedOracleMachine n, Bits rho)
      : v_(std::move(v)), n_(std::move(n)), rho_(std::move(rho)) {
    if (v_.certifier() && n_.certifier())
      certifier_ = std::make_shared<splice_certifier>(v_.certifier(), n_.certifier(), rho_);
  }

  std::optional<unsigned> eval(const Bits& tau, unsigned n, unsigned stage) const override {
    if (rho_.is_prefix_of(tau)) return v_.eval(tau.suffix_from(rho_.size()), n, stage);
    if (tau.is_proper_prefix_of(rho_)) return std::nullopt;
    return n_.eval(tau, n, stage);
  }
  // Behind rho the oracle input is shifted, so the true use of an answer is
  // |rho| past the inner machine's; claiming identity would be false.
  UsePolicy use_policy() const override { return UsePolicy::recorded; }
  const ClassCertifier* certifier() const override { return certifier_.get(); }

private:
  StagedOracleMachine v_;
  StagedOracleMachine n_;
  Bits rho_;
  std::shared_ptr<const ClassCertifier> certifier_;
};

}  // namespace

StagedOracleMachine splice(const StagedOracleMachine& v, const StagedOracleMachine& n,
                           const Bits& rho, const CheckHorizons& horizons) {
  for (const Bits& sigma : all_strings_up_to(horizons.depth)) {
    if (!sigma.compatible_with(rho)) continue;
    for (unsigned k = 0; k <= horizons.n_max; ++k)
      if (n.eval(sigma, k, horizons.stage)) throw splice_conflict(sigma, k, horizons.stage);
  }
  return StagedOracleMachine(std::make_shared<splice_impl>(v, n, rho));
}

Bits universal_code(unsigned e) { return Bits::zeros(e) + Bits::ones(1); }

namespace {

class universal_certifier : public ClassCertifier {
public:
  explicit universal_certifier(const std::vector<StagedOracleMachine>* family)
      : family_(family) {}

  bool handles(ClassTag tag) const override {
    if (!is_oracle_tag(tag)) return false;
    for (const StagedOracleMachine& m : *family_)
      if (!m.certifier() || !m.certifier()->handles(tag)) return false;
    return true;
  }

  ClassDecision decide(const Bits& cyl, ClassTag tag, unsigned stage,
                       unsigned n_max) const override {
    std::size_t e = 0;
    while (e < cyl.size() && cyl.bit(e) == 0) ++e;
    if (e == cyl.size()) {
      // All-zero prefix: program codes still to come. Decidable only when
      // every remaining code falls outside the family.
      if (family_->size() <= cyl.size()) return finite_graph_decision(tag);
      return ClassDecision::none();
    }
    if (e >= family_->size()) return finite_graph_decision(tag);
    return (*family_)[e].certifier()->decide(cyl.suffix_from(e + 1), tag, stage, n_max);
  }

private:
  const std::vector<StagedOracleMachine>* family_;
};

class universal_impl : public StagedOracleMachine::Impl {
public:
  explicit universal_impl(std::vector<StagedOracleMachine> family)
      : family_(std::move(family)) {
    if (family_.empty())
      certifier_ = std::make_shared<finite_graph_certifier>(0);
    else
      certifier_ = std::make_shared<universal_certifier>(&family_);
  }

  std::optional<unsigned> eval(const Bits& tau, unsigned n, unsigned stage) const override {
    std::size_t e = 0;
    while (e < tau.size() && tau.bit(e) == 0) ++e;
    if (e == tau.size() || e >= family_.size()) return std::nullopt;
    return family_[e].eval(tau.suffix_from(e + 1), n, stage);
  }
  UsePolicy use_policy() const override { return UsePolicy::recorded; }
  const ClassCertifier* certifier() const override { return certifier_.get(); }

private:
  std::vector<StagedOracleMachine> family_;
  std::shared_ptr<const ClassCertifier> certifier_;
};

}  // namespace

StagedOracleMachine universal_from_family(std::vector<StagedOracleMachine> family) {
  return StagedOracleMachine(std::make_shared<universal_impl>(std::move(family)));
}

// ---------------------------------------------------------------------------

void check_oracle_machine_invariants(const StagedOracleMachine& m, const CheckHorizons& h) {
  std::vector<Bits> grid = all_strings_up_to(h.depth);
  for (const Bits& sigma : grid) {
    for (unsigned n = 0; n <= h.n_max; ++n) {
      std::optional<unsigned> first;
      for (unsigned s = 0; s <= h.stage; ++s) {
        std::optional<unsigned> v = m.eval(sigma, n, s);
        if (first && !v)
          throw invariant_violation("value retracted at " + point(sigma, n, s));
        if (first && v && *v != *first)
          throw invariant_violation("value changed at " + point(sigma, n, s));
        if (!first && v) first = v;
      }
    }
  }
  for (const Bits& sigma : grid) {
    if (sigma.empty()) continue;
    Bits parent = sigma.prefix(sigma.size() - 1);
    for (unsigned n = 0; n <= h.n_max; ++n) {
      for (unsigned s = 0; s <= h.stage; ++s) {
        std::optional<unsigned> pv = m.eval(parent, n, s);
        if (!pv) continue;
        std::optional<unsigned> cv = m.eval(sigma, n, s);
        if (!cv || *cv != *pv)
          throw invariant_violation("prefix consistency broken between \"" + parent.display() +
                                    "\" and \"" + sigma.display() + "\" at n=" +
                                    std::to_string(n) + ", stage " + std::to_string(s));
      }
    }
  }
}

void check_monotone_machine_invariants(const MonotoneMachine& m, unsigned depth, unsigned stage) {
  for (const Bits& sigma : all_strings_up_to(depth)) {
    std::optional<Bits> first;
    for (unsigned s = 0; s <= stage; ++s) {
      std::optional<Bits> o = m.eval(sigma, s);
      if (first && !o)
        throw invariant_violation("output retracted at (\"" + sigma.display() + "\", stage " +
                                  std::to_string(s) + ")");
      if (first && o && *o != *first)
        throw invariant_violation("output changed at (\"" + sigma.display() + "\", stage " +
                                  std::to_string(s) + ")");
      if (!first && o) first = o;
    }
  }
  // monotone_output throws on violations along each maximal chain; every
  // comparable input pair within the depth lies on one of these chains.
  for (std::uint64_t i = 0; i < (std::uint64_t(1) << depth); ++i)
    for (unsigned s = 0; s <= stage; ++s)
      (void)monotone_output(m, Bits::of_length(depth, i), s);
}

void check_infsd_machine_invariants(const InfSDMachine& m, unsigned depth, unsigned n_max) {
  std::vector<Bits> grid = all_strings_up_to(depth);
  for (const Bits& sigma : grid) (void)infty_eval(m, sigma, n_max);  // (a) + output chain
  for (const Bits& sigma : grid) {
    if (sigma.size() == depth) continue;
    for (unsigned n = 0; n <= n_max; ++n) {
      std::optional<Bits> o = m.eval(sigma, n);
      if (!o) continue;
      for (int b = 0; b < 2; ++b) {
        std::optional<Bits> oc = m.eval(sigma.with_bit(b), n);
        if (!oc || *oc != *o)
          throw invariant_violation("extension \"" + sigma.with_bit(b).display() +
                                    "\" disagrees with \"" + sigma.display() + "\" at n=" +
                                    std::to_string(n));
      }
    }
  }
}

}  // namespace omegaforge
