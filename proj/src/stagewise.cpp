#include "omegaforge/stagewise.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace omegaforge {

namespace {

class scripted_oracle_impl : public OracleApprox::Impl {
public:
  scripted_oracle_impl(OracleApprox::Kind kind,
                       std::vector<std::pair<unsigned, unsigned>> entries)
      : kind_(kind), entries_(std::move(entries)) {}

  std::set<unsigned> at(unsigned stage) const override {
    std::set<unsigned> out;
    for (const auto& [e, s] : entries_)
      if (s <= stage) out.insert(e);
    return out;
  }

  OracleApprox::Kind kind() const override { return kind_; }

  std::optional<std::set<unsigned>> known_limit() const override {
    if (kind_ != OracleApprox::Kind::known_limit_toy) return std::nullopt;
    std::set<unsigned> out;
    for (const auto& [e, s] : entries_) out.insert(e);
    return out;
  }

  std::optional<unsigned> stabilization_stage() const override {
    if (kind_ != OracleApprox::Kind::known_limit_toy) return std::nullopt;
    unsigned last = 0;
    for (const auto& [e, s] : entries_) last = std::max(last, s);
    return last;
  }

private:
  OracleApprox::Kind kind_;
  std::vector<std::pair<unsigned, unsigned>> entries_;
};

// Tiny two-counter register machine, one program per natural number. The
// base-8 digits of e, least significant first, are the instruction stream:
//   0 halt            1 a += 1          2 b += 1
//   3 if a == 0 jump to operand else a -= 1     4 same on b
//   5 jump to operand                           6, 7 halt
// A jump's operand is the next digit (0 when past the end); pc past the end
// halts. Jumps can go backwards, so some programs genuinely diverge.
std::vector<unsigned> standin_digits(unsigned e) {
  std::vector<unsigned> d;
  while (e != 0) {
    d.push_back(e % 8);
    e /= 8;
  }
  return d;
}

}  // namespace

bool standin_program_halts(unsigned e, unsigned steps) {
  const std::vector<unsigned> d = standin_digits(e);
  unsigned long long a = 0, b = 0;
  std::size_t pc = 0;
  for (unsigned t = 0; t < steps; ++t) {
    if (pc >= d.size()) return true;
    unsigned op = d[pc];
    auto operand = [&](std::size_t at) -> std::size_t {
      return at < d.size() ? d[at] : 0u;
    };
    switch (op) {
      case 1: ++a; ++pc; break;
      case 2: ++b; ++pc; break;
      case 3:
        if (a == 0) pc = operand(pc + 1);
        else { --a; pc += 2; }
        break;
      case 4:
        if (b == 0) pc = operand(pc + 1);
        else { --b; pc += 2; }
        break;
      case 5: pc = operand(pc + 1); break;
      default: return true;  // 0, 6, 7 halt
    }
  }
  return false;
}

OracleApprox scripted_oracle(OracleApprox::Kind kind,
                             const std::vector<std::pair<unsigned, unsigned>>& entries) {
  return OracleApprox(std::make_shared<scripted_oracle_impl>(kind, entries));
}

namespace {

class halting_standin_impl : public OracleApprox::Impl {
public:
  std::set<unsigned> at(unsigned stage) const override {
    std::set<unsigned> out;
    for (unsigned e = 0; e < stage; ++e)
      if (standin_program_halts(e, stage)) out.insert(e);
    return out;
  }
  OracleApprox::Kind kind() const override { return OracleApprox::Kind::ce_monotone; }
};

}  // namespace

OracleApprox halting_standin_oracle() {
  return OracleApprox(std::make_shared<halting_standin_impl>());
}

// ---------------------------------------------------------------------------

namespace {

class scripted_set_impl : public StagewiseSet::Impl {
public:
  scripted_set_impl(StagewiseSet::Semantics semantics,
                    std::vector<std::pair<Bits, unsigned>> toggles,
                    std::optional<std::set<Bits>> declared_limit)
      : semantics_(semantics), toggles_(std::move(toggles)), limit_(std::move(declared_limit)) {
    unsigned last = 0;
    for (const auto& [b, s] : toggles_) last = std::max(last, s);
    last_toggle_ = last;

    if (semantics_ == StagewiseSet::Semantics::sigma1_monotone) {
      std::set<Bits> seen;
      for (const auto& [b, s] : toggles_) {
        if (!seen.insert(b).second)
          throw domain_error("monotone script toggles \"" + b.display() + "\" more than once");
      }
      if (limit_.has_value())
        throw domain_error("monotone scripts derive their limit; do not declare one");
    } else if (semantics_ == StagewiseSet::Semantics::toy_known_limit) {
      if (!limit_.has_value())
        throw domain_error("known-limit script must declare its limit");
      std::set<Bits> settled = membership_at(last_toggle_);
      if (settled != *limit_)
        throw domain_error("declared limit disagrees with the final toggle states");
    } else {
      if (limit_.has_value())
        throw domain_error("plain stagewise scripts carry no declared limit");
    }
  }

  std::set<Bits> at(unsigned stage) const override { return membership_at(stage); }
  StagewiseSet::Semantics semantics() const override { return semantics_; }
  bool monotone_presence() const override {
    return semantics_ == StagewiseSet::Semantics::sigma1_monotone;
  }
  std::optional<std::set<Bits>> known_limit() const override {
    if (semantics_ == StagewiseSet::Semantics::sigma1_monotone) return membership_at(last_toggle_);
    return limit_;
  }
  std::optional<unsigned> stabilization_stage() const override {
    if (semantics_ == StagewiseSet::Semantics::canonical_sigma2) return std::nullopt;
    return last_toggle_;
  }

private:
  std::set<Bits> membership_at(unsigned stage) const {
    std::map<Bits, unsigned> flips;
    for (const auto& [b, s] : toggles_)
      if (s <= stage) ++flips[b];
    std::set<Bits> out;
    for (const auto& [b, k] : flips)
      if (k % 2 == 1) out.insert(b);
    return out;
  }

  StagewiseSet::Semantics semantics_;
  std::vector<std::pair<Bits, unsigned>> toggles_;
  std::optional<std::set<Bits>> limit_;
  unsigned last_toggle_ = 0;
};

class enumerated_set_impl : public StagewiseSet::Impl {
public:
  enumerated_set_impl(std::vector<std::pair<Bits, unsigned>> inserted,
                      std::optional<Bits> always_present, unsigned complete_stage)
      : inserted_(std::move(inserted)),
        always_(std::move(always_present)),
        complete_(complete_stage) {
    for (const auto& [b, s] : inserted_) complete_ = std::max(complete_, s);
  }

  std::set<Bits> at(unsigned stage) const override {
    std::set<Bits> out;
    if (always_) out.insert(*always_);
    for (const auto& [b, s] : inserted_)
      if (s <= stage) out.insert(b);
    return out;
  }
  StagewiseSet::Semantics semantics() const override {
    return StagewiseSet::Semantics::toy_known_limit;
  }
  bool monotone_presence() const override { return true; }
  std::optional<std::set<Bits>> known_limit() const override { return at(complete_); }
  std::optional<unsigned> stabilization_stage() const override { return complete_; }

private:
  std::vector<std::pair<Bits, unsigned>> inserted_;
  std::optional<Bits> always_;
  unsigned complete_;
};

}  // namespace

StagewiseSet scripted_set(StagewiseSet::Semantics semantics,
                          const std::vector<std::pair<Bits, unsigned>>& toggles,
                          std::optional<std::set<Bits>> declared_limit) {
  return StagewiseSet(
      std::make_shared<scripted_set_impl>(semantics, toggles, std::move(declared_limit)));
}

StagewiseSet enumerated_set(std::vector<std::pair<Bits, unsigned>> inserted,
                            std::optional<Bits> always_present, unsigned complete_stage) {
  return StagewiseSet(std::make_shared<enumerated_set_impl>(std::move(inserted),
                                                            std::move(always_present),
                                                            complete_stage));
}

// ---------------------------------------------------------------------------

CeOperator::CeOperator(std::vector<CeAxiom> axioms) : axioms_(std::move(axioms)) {
  for (const CeAxiom& a : axioms_) {
    for (unsigned e : a.requires_in)
      if (e >= a.use)
        throw domain_error("axiom for \"" + a.element.display() +
                           "\" queries element " + std::to_string(e) +
                           " at or beyond its use " + std::to_string(a.use));
    for (unsigned e : a.requires_out)
      if (e >= a.use)
        throw domain_error("axiom for \"" + a.element.display() +
                           "\" queries element " + std::to_string(e) +
                           " at or beyond its use " + std::to_string(a.use));
  }
}

std::map<Bits, std::vector<unsigned>> CeOperator::satisfied(const std::set<unsigned>& oracle,
                                                            unsigned stage) const {
  std::map<Bits, std::vector<unsigned>> out;
  for (const CeAxiom& a : axioms_) {
    if (a.stage > stage) continue;
    bool ok = true;
    for (unsigned e : a.requires_in)
      if (!oracle.count(e)) { ok = false; break; }
    if (ok)
      for (unsigned e : a.requires_out)
        if (oracle.count(e)) { ok = false; break; }
    if (ok) out[a.element].push_back(a.use);
  }
  return out;
}

std::set<Bits> CeOperator::enumerate(const std::set<unsigned>& oracle, unsigned stage) const {
  std::set<Bits> out;
  for (const auto& [b, uses] : satisfied(oracle, stage)) out.insert(b);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::set<unsigned> below(const std::set<unsigned>& s, unsigned bound) {
  std::set<unsigned> out;
  for (unsigned e : s) {
    if (e >= bound) break;
    out.insert(e);
  }
  return out;
}

class hat_trick_impl : public StagewiseSet::Impl {
public:
  hat_trick_impl(CeOperator w, OracleApprox e) : w_(std::move(w)), e_(std::move(e)) {
    for (const CeAxiom& a : w_.axioms()) max_axiom_stage_ = std::max(max_axiom_stage_, a.stage);
  }

  std::set<Bits> at(unsigned stage) const override {
    std::set<unsigned> now = e_.at(stage);
    std::set<unsigned> prev = stage == 0 ? std::set<unsigned>{} : e_.at(stage - 1);
    std::set<Bits> out;
    for (const CeAxiom& a : w_.axioms()) {
      if (a.stage > stage) continue;
      if (!axiom_fires(a, now)) continue;
      if (below(now, a.use) == below(prev, a.use)) out.insert(a.element);
    }
    return out;
  }

  StagewiseSet::Semantics semantics() const override {
    return StagewiseSet::Semantics::canonical_sigma2;
  }
  bool monotone_presence() const override { return false; }

  std::optional<std::set<Bits>> known_limit() const override {
    auto lim = e_.known_limit();
    if (!lim) return std::nullopt;
    return w_.enumerate(*lim, max_axiom_stage_);
  }

  std::optional<unsigned> stabilization_stage() const override {
    auto stab = e_.stabilization_stage();
    if (!stab) return std::nullopt;
    // One step past oracle stabilization the previous-stage segment agrees
    // too, so every limit-satisfied axiom fires undisturbed from there on;
    // axioms introduced later still need their own stage to pass.
    return std::max(*stab + 1, max_axiom_stage_);
  }

private:
  static bool axiom_fires(const CeAxiom& a, const std::set<unsigned>& oracle) {
    for (unsigned e : a.requires_in)
      if (!oracle.count(e)) return false;
    for (unsigned e : a.requires_out)
      if (oracle.count(e)) return false;
    return true;
  }

  CeOperator w_;
  OracleApprox e_;
  unsigned max_axiom_stage_ = 0;
};

}  // namespace

StagewiseSet hat_trick(const CeOperator& w, const OracleApprox& e) {
  return StagewiseSet(std::make_shared<hat_trick_impl>(w, e));
}

std::vector<unsigned> true_stages(const OracleApprox& e, unsigned horizon) {
  auto limit = e.known_limit();
  if (!limit)
    throw domain_error("true stages need an approximation with a known limit");
  std::vector<unsigned> out;
  for (unsigned s = 0; s <= horizon; ++s) {
    std::set<unsigned> now = e.at(s);
    std::set<unsigned> prev = s == 0 ? std::set<unsigned>{} : e.at(s - 1);
    bool is_true = false;
    for (unsigned n : now) {
      if (prev.count(n)) continue;  // not entering at s
      if (below(now, n) == below(*limit, n)) { is_true = true; break; }
    }
    if (is_true) out.push_back(s);
  }
  return out;
}

std::set<Bits> upward_closure_at(const StagewiseSet& v, unsigned stage, unsigned max_len) {
  std::set<Bits> members = v.at(stage);
  std::set<Bits> out;
  for (const Bits& m : members) {
    if (m.size() > max_len)
      throw domain_error("closure depth " + std::to_string(max_len) +
                         " does not cover member \"" + m.display() + "\"");
    out.insert(m);
  }
  for (const Bits& b : all_strings_up_to(max_len)) {
    for (const Bits& m : members)
      if (m.is_prefix_of(b)) { out.insert(b); break; }
  }
  return out;
}

}  // namespace omegaforge
