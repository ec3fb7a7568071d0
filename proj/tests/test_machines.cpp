#include "omegaforge/machines.hpp"

#include <doctest.h>

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "omegaforge/errors.hpp"
#include "omegaforge/prefix_free.hpp"

using namespace omegaforge;

namespace {

Bits bits(const char* s) { return *Bits::parse(s); }

ClassDecision decide(const StagedOracleMachine& m, const char* cyl, ClassTag tag, unsigned stage,
                     unsigned n_max = 8) {
  REQUIRE(m.certifier() != nullptr);
  return m.certifier()->decide(bits(cyl), tag, stage, n_max);
}

bool in_certified(ClassDecision d) {
  return d.status == ClassDecision::Status::in && d.certified;
}
bool out_certified(ClassDecision d) {
  return d.status == ClassDecision::Status::out && d.certified;
}
bool undecided(ClassDecision d) { return d.status == ClassDecision::Status::unknown; }

}  // namespace

TEST_CASE("the empty machine never converges and knows it") {
  StagedOracleMachine m = empty_oracle_machine();
  CHECK_FALSE(m.eval(bits("0101"), 2, 50).has_value());
  CHECK_FALSE(m.eval(Bits(), 0, 0).has_value());
  CHECK(m.use_policy() == UsePolicy::identity);
  CHECK(out_certified(decide(m, "", ClassTag::TOT, 0)));
  CHECK(out_certified(decide(m, "01", ClassTag::INF_domain, 0)));
  CHECK(out_certified(decide(m, "1", ClassTag::COF_domain, 0)));
  CHECK(in_certified(decide(m, "", ClassTag::COM_domain, 0)));
  CHECK(in_certified(decide(m, "0", ClassTag::COF_output, 0)));
}

TEST_CASE("table machines answer by minimal prefix, gated by stage") {
  std::vector<OracleTableEntry> entries = {
      {bits("01"), 0, 7, 2},
      {bits(""), 1, 3, 0},
  };
  StagedOracleMachine m = table_oracle_machine(entries, 5);
  CHECK(m.eval(bits("011"), 0, 2) == 7u);
  CHECK_FALSE(m.eval(bits("011"), 0, 1).has_value());  // entry not posted yet
  CHECK_FALSE(m.eval(bits("00"), 0, 9).has_value());   // wrong prefix
  CHECK(m.eval(bits("11"), 1, 0) == 3u);               // empty-prefix entry reaches everything
  CHECK_FALSE(m.eval(bits("01"), 2, 9).has_value());   // no entry for n=2
  // certifier waits for the declared completion stage
  CHECK(undecided(decide(m, "0", ClassTag::TOT, 4)));
  CHECK(out_certified(decide(m, "0", ClassTag::TOT, 5)));
  CHECK(in_certified(decide(m, "0", ClassTag::COF_output, 7)));
}

TEST_CASE("table machines reject conflicting and late entries") {
  std::vector<OracleTableEntry> conflict = {
      {bits("0"), 1, 2, 0},
      {bits("01"), 1, 3, 0},  // compatible prefix, same n, different value
  };
  CHECK_THROWS_WITH_AS(table_oracle_machine(conflict, 9),
                       "conflicting table values at (\"0\", 1)", domain_error);
  std::vector<OracleTableEntry> late = {{bits("0"), 0, 0, 7}};
  CHECK_THROWS_AS(table_oracle_machine(late, 5), domain_error);
  // same value on overlapping prefixes is allowed
  std::vector<OracleTableEntry> dup = {{bits("0"), 1, 2, 0}, {bits("01"), 1, 2, 0}};
  CHECK_NOTHROW(table_oracle_machine(dup, 9));
}

TEST_CASE("region machines are total exactly past their region") {
  StagedOracleMachine m = region_total_machine({bits("0")}, 4, 3);
  CHECK(m.eval(bits("01"), 1, 3) == 4u);
  CHECK(m.eval(bits("01"), 2, 3) == 4u);
  CHECK_FALSE(m.eval(bits("01"), 3, 3).has_value());  // n beyond the prefix
  CHECK_FALSE(m.eval(bits("01"), 1, 2).has_value());  // before from_stage
  CHECK_FALSE(m.eval(bits("1"), 0, 9).has_value());
  CHECK_FALSE(m.eval(Bits(), 0, 9).has_value());

  CHECK(in_certified(decide(m, "00", ClassTag::TOT, 0)));
  CHECK(out_certified(decide(m, "1", ClassTag::TOT, 0)));
  CHECK(undecided(decide(m, "", ClassTag::TOT, 0)));
  CHECK(in_certified(decide(m, "11", ClassTag::COM_domain, 0)));
  CHECK(out_certified(decide(m, "0", ClassTag::COF_output, 0)));  // constant 4 is never 1
  CHECK(in_certified(decide(m, "1", ClassTag::COF_output, 0)));   // empty run, vacuous

  StagedOracleMachine ones = region_total_machine({bits("0")}, 1);
  CHECK(in_certified(decide(ones, "0", ClassTag::COF_output, 0)));
  CHECK(in_certified(decide(ones, "1", ClassTag::COF_output, 0)));
}

TEST_CASE("run_oracle hands the machine the whole available prefix") {
  StagedOracleMachine m = table_oracle_machine({{bits("01"), 0, 9, 0}}, 0);
  CHECK(run_oracle(m, bits("0110"), 0, 1) == 9u);
  CHECK_FALSE(run_oracle(m, bits("00"), 0, 1).has_value());
}

TEST_CASE("monotone tables merge duplicates and reject contradictions") {
  MonotoneMachine n = monotone_table_machine({
      {bits("0"), bits("1"), 4},
      {bits("0"), bits("1"), 2},  // same output: keep the earlier stage
      {bits("01"), bits("11"), 3},
  });
  CHECK(n.eval(bits("0"), 2) == bits("1"));
  CHECK_FALSE(n.eval(bits("0"), 1).has_value());
  CHECK_FALSE(n.eval(bits("1"), 9).has_value());
  CHECK_THROWS_WITH_AS(monotone_table_machine({{bits("0"), bits("1"), 0},
                                               {bits("0"), bits("0"), 0}}),
                       "conflicting outputs for input \"0\"", domain_error);
  // a finite table certifies finite output once complete
  REQUIRE(n.certifier() != nullptr);
  CHECK(n.certifier()->decide(bits("0"), ClassTag::FIN_output, 4, 0).status ==
        ClassDecision::Status::in);
  CHECK(n.certifier()->decide(bits("0"), ClassTag::FIN_output, 3, 0).status ==
        ClassDecision::Status::unknown);
  CHECK(n.certifier()->decide(bits("0"), ClassTag::INF_output, 4, 0).status ==
        ClassDecision::Status::out);
}

TEST_CASE("monotone_output takes the supremum along the input prefixes") {
  MonotoneMachine n = monotone_table_machine({
      {bits("0"), bits("1"), 0},
      {bits("00"), bits("10"), 0},
  });
  CHECK(monotone_output(n, bits("000"), 0) == bits("10"));
  CHECK(monotone_output(n, bits("1"), 0) == Bits());
  CHECK(monotone_output(n, Bits(), 0) == Bits());

  MonotoneMachine bad = monotone_table_machine({
      {bits("0"), bits("1"), 0},
      {bits("00"), bits("0"), 0},  // not an extension of the prefix's output
  });
  CHECK_THROWS_WITH_AS(monotone_output(bad, bits("00"), 0),
                       "monotonicity violated between inputs \"0\" and \"00\"",
                       invariant_violation);
}

TEST_CASE("splice reroutes behind the reserved root") {
  StagedOracleMachine v = region_total_machine({Bits()}, 0);  // total everywhere
  StagedOracleMachine n = region_total_machine({bits("0")}, 0);
  StagedOracleMachine m = splice(v, n, bits("1"));
  // behind rho = 1 the inner machine sees the shifted suffix
  CHECK(m.eval(bits("10"), 1, 0) == 0u);
  CHECK(m.eval(bits("1"), 0, 0) == 0u);
  // off rho the outer machine answers
  CHECK(m.eval(bits("01"), 1, 0) == 0u);
  CHECK_FALSE(m.eval(Bits(), 0, 5).has_value());  // proper prefix of rho stays pending
  CHECK(m.use_policy() == UsePolicy::recorded);

  CHECK(in_certified(decide(m, "1", ClassTag::TOT, 0)));
  CHECK(in_certified(decide(m, "10", ClassTag::TOT, 0)));   // suffix "0" is inside v's region
  CHECK(in_certified(decide(m, "00", ClassTag::TOT, 0)));   // n's region
  CHECK(undecided(decide(m, "", ClassTag::TOT, 0)));
}

TEST_CASE("splice refuses an outer machine alive on the root") {
  StagedOracleMachine v = region_total_machine({Bits()}, 0);
  StagedOracleMachine everywhere = region_total_machine({Bits()}, 0);
  CHECK_THROWS_AS(splice(v, everywhere, bits("1")), splice_conflict);
  try {
    splice(v, everywhere, bits("1"));
  } catch (const splice_conflict& e) {
    CHECK(std::string(e.what()).find("compatible with the reserved root") != std::string::npos);
  }
}

TEST_CASE("program codes are the unary prefix code") {
  CHECK(universal_code(0) == bits("1"));
  CHECK(universal_code(2) == bits("001"));
  std::vector<Bits> codes;
  for (unsigned e = 0; e < 6; ++e) codes.push_back(universal_code(e));
  CHECK_FALSE(check_prefix_free(codes).has_value());
}

TEST_CASE("the universal machine dispatches on the coded index") {
  StagedOracleMachine m0 = region_total_machine({Bits()}, 7);
  StagedOracleMachine m1 = region_total_machine({bits("0")}, 9);
  StagedOracleMachine u = universal_from_family({m0, m1});
  CHECK(u.eval(bits("1"), 0, 0) == 7u);     // code(0) then the empty suffix
  CHECK(u.eval(bits("010"), 1, 0) == 9u);   // code(1) then "0"
  CHECK_FALSE(u.eval(bits("01"), 0, 0).has_value());   // m1 needs its region
  CHECK_FALSE(u.eval(bits("00"), 0, 0).has_value());   // all zeros: no code yet
  CHECK_FALSE(u.eval(bits("0001"), 0, 0).has_value()); // e = 3 outside the family
  CHECK(u.use_policy() == UsePolicy::recorded);

  CHECK(in_certified(decide(u, "1", ClassTag::TOT, 0)));
  CHECK(in_certified(decide(u, "010", ClassTag::TOT, 0)));
  CHECK(out_certified(decide(u, "011", ClassTag::TOT, 0)));
  CHECK(out_certified(decide(u, "0001", ClassTag::TOT, 0)));  // out of family: finite graph
  CHECK(undecided(decide(u, "0", ClassTag::TOT, 0)));         // codes still possible
  CHECK(out_certified(decide(u, "00", ClassTag::TOT, 0)));    // no remaining code is in family
}

TEST_CASE("an empty family behaves like the empty machine") {
  StagedOracleMachine u = universal_from_family({});
  CHECK_FALSE(u.eval(bits("1"), 0, 9).has_value());
  CHECK(out_certified(decide(u, "", ClassTag::TOT, 0)));
  CHECK(in_certified(decide(u, "1", ClassTag::COM_domain, 0)));
}

TEST_CASE("the oracle invariant suite accepts the toy machines") {
  CheckHorizons h{3, 3, 6};
  CHECK_NOTHROW(check_oracle_machine_invariants(empty_oracle_machine(), h));
  CHECK_NOTHROW(check_oracle_machine_invariants(region_total_machine({bits("0")}, 2, 1), h));
  CHECK_NOTHROW(
      check_oracle_machine_invariants(table_oracle_machine({{bits("01"), 0, 1, 2}}, 4), h));
  StagedOracleMachine spliced = splice(region_total_machine({Bits()}, 0),
                                       region_total_machine({bits("0")}, 0), bits("1"));
  CHECK_NOTHROW(check_oracle_machine_invariants(spliced, h));
}

namespace {

// deliberately broken: defined at stage 1 only, so the value is retracted
class flicker_impl : public StagedOracleMachine::Impl {
public:
  std::optional<unsigned> eval(const Bits&, unsigned, unsigned stage) const override {
    if (stage == 1) return 0;
    return std::nullopt;
  }
};

// deliberately broken: converges on the parent but not on one child
class forgetful_impl : public StagedOracleMachine::Impl {
public:
  std::optional<unsigned> eval(const Bits& tau, unsigned, unsigned) const override {
    if (tau == *Bits::parse("1")) return std::nullopt;
    return 0;
  }
};

}  // namespace

TEST_CASE("the invariant suite catches stage and prefix violations") {
  CheckHorizons h{2, 2, 4};
  StagedOracleMachine flicker(std::make_shared<flicker_impl>());
  CHECK_THROWS_AS(check_oracle_machine_invariants(flicker, h), invariant_violation);
  StagedOracleMachine forgetful(std::make_shared<forgetful_impl>());
  CHECK_THROWS_WITH_AS(check_oracle_machine_invariants(forgetful, h),
                       "prefix consistency broken between \"\xce\xb5\" and \"1\" at n=0, stage 0",
                       invariant_violation);
}

TEST_CASE("the monotone invariant suite sweeps chains and stages") {
  MonotoneMachine good = monotone_table_machine({
      {bits("0"), bits("1"), 1},
      {bits("00"), bits("10"), 2},
  });
  CHECK_NOTHROW(check_monotone_machine_invariants(good, 3, 4));
  MonotoneMachine bad = monotone_table_machine({
      {bits("0"), bits("1"), 0},
      {bits("01"), bits("00"), 0},
  });
  CHECK_THROWS_AS(check_monotone_machine_invariants(bad, 3, 2), invariant_violation);
}
