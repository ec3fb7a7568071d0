#include "omegaforge/constructions.hpp"

#include <doctest.h>

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "omegaforge/errors.hpp"
#include "omegaforge/prefix_free.hpp"

using namespace omegaforge;

namespace {

using Dir = PrescribedTarget::Direction;
using Sem = StagewiseSet::Semantics;

Bits bits(const char* s) { return *Bits::parse(s); }

ClassDecision odecide(const StagedOracleMachine& m, const char* cyl, ClassTag tag,
                      unsigned stage, unsigned n_max = 8) {
  REQUIRE(m.certifier() != nullptr);
  return m.certifier()->decide(bits(cyl), tag, stage, n_max);
}

ClassDecision idecide(const InfSDMachine& m, const char* cyl, ClassTag tag, unsigned n_max) {
  REQUIRE(m.certifier() != nullptr);
  return m.certifier()->decide(bits(cyl), tag, 0, n_max);
}

bool in_certified(ClassDecision d) {
  return d.status == ClassDecision::Status::in && d.certified;
}
bool out_certified(ClassDecision d) {
  return d.status == ClassDecision::Status::out && d.certified;
}
bool undecided(ClassDecision d) { return d.status == ClassDecision::Status::unknown; }

// membership of "1" is stable from stage 0 on
StagewiseSet stable_one() {
  return scripted_set(Sem::sigma1_monotone, {{bits("1"), 0}});
}

std::vector<std::pair<Bits, unsigned>> set_of(const BuildLog& log) { return log.set_stages; }

}  // namespace

TEST_CASE("the totality machine converges where the set stays away") {
  StagedOracleMachine m = tot_machine_from_sigma2(stable_one());
  CHECK(m.eval(bits("0"), 1, 2) == 0u);
  CHECK_FALSE(m.eval(bits("0"), 1, 1).has_value());   // needs a stage past n
  CHECK_FALSE(m.eval(bits("1"), 1, 99).has_value());  // prefix sits in the set forever
  CHECK(m.eval(bits("1"), 0, 1) == 0u);               // the empty restriction always escapes
  CHECK_FALSE(m.eval(bits("0"), 2, 9).has_value());   // n beyond the available prefix

  CHECK(in_certified(odecide(m, "0", ClassTag::TOT, 0)));
  CHECK(in_certified(odecide(m, "0", ClassTag::INF_domain, 0)));
  CHECK(in_certified(odecide(m, "0", ClassTag::COF_domain, 0)));
  CHECK(out_certified(odecide(m, "1", ClassTag::TOT, 0)));
  CHECK(undecided(odecide(m, "", ClassTag::TOT, 0)));
  CHECK(in_certified(odecide(m, "1", ClassTag::COM_domain, 0)));
  CHECK(out_certified(odecide(m, "0", ClassTag::COF_output, 0)));  // total runs emit zeros
  CHECK(in_certified(odecide(m, "1", ClassTag::COF_output, 0)));
}

TEST_CASE("a wobbling set yields convergence at the exit stage and no certifier") {
  StagewiseSet v = scripted_set(Sem::canonical_sigma2, {{bits("0"), 1}, {bits("0"), 3}});
  StagedOracleMachine m = tot_machine_from_sigma2(v);
  CHECK(m.certifier() == nullptr);
  CHECK_FALSE(m.eval(bits("01"), 1, 2).has_value());  // "0" is present at stage 2
  CHECK(m.eval(bits("01"), 1, 3) == 0u);              // and gone at stage 3
}

TEST_CASE("totality certificates wait for the declared stabilization stage") {
  StagewiseSet v = scripted_set(Sem::toy_known_limit, {{bits("1"), 4}},
                                std::set<Bits>{bits("1")});
  StagedOracleMachine m = tot_machine_from_sigma2(v);
  CHECK(undecided(odecide(m, "0", ClassTag::TOT, 3)));
  CHECK(in_certified(odecide(m, "0", ClassTag::TOT, 4)));
  CHECK(out_certified(odecide(m, "1", ClassTag::TOT, 4)));
}

TEST_CASE("the monotone companion emits zeros exactly on certified-total prefixes") {
  StagedOracleMachine m = tot_machine_from_sigma2(stable_one());
  MonotoneMachine n = monotone_from_tot(m);
  CHECK(n.eval(Bits(), 0) == Bits());
  CHECK(n.eval(bits("00"), 2) == bits("00"));
  CHECK_FALSE(n.eval(bits("00"), 1).has_value());  // the n = 1 run needs stage 2
  CHECK_FALSE(n.eval(bits("11"), 99).has_value());

  REQUIRE(n.certifier() != nullptr);
  CHECK(n.certifier()->handles(ClassTag::INF_output));
  CHECK(n.certifier()->handles(ClassTag::FIN_output));
  CHECK(in_certified(n.certifier()->decide(bits("0"), ClassTag::INF_output, 0, 0)));
  CHECK(out_certified(n.certifier()->decide(bits("1"), ClassTag::INF_output, 0, 0)));
  CHECK(in_certified(n.certifier()->decide(bits("1"), ClassTag::FIN_output, 0, 0)));
  CHECK(undecided(n.certifier()->decide(Bits(), ClassTag::FIN_output, 0, 0)));

  StagedOracleMachine recorded = splice(region_total_machine({Bits()}, 0),
                                        region_total_machine({bits("0")}, 0), bits("1"));
  CHECK_THROWS_WITH_AS(monotone_from_tot(recorded), "identity-use oracle machine required",
                       domain_error);
}

TEST_CASE("the root guard silences every compatible prefix") {
  StagedOracleMachine guarded = rho_guard(region_total_machine({bits("0")}, 5), bits("01"));
  CHECK_FALSE(guarded.eval(bits("01"), 1, 9).has_value());
  CHECK_FALSE(guarded.eval(bits("0"), 0, 9).has_value());   // proper prefix of the root
  CHECK_FALSE(guarded.eval(bits("011"), 0, 9).has_value());
  CHECK(guarded.eval(bits("00"), 0, 0) == 5u);

  CHECK(out_certified(odecide(guarded, "011", ClassTag::TOT, 0)));
  CHECK(out_certified(odecide(guarded, "01", ClassTag::INF_domain, 0)));
  CHECK(out_certified(odecide(guarded, "01", ClassTag::COF_domain, 0)));
  CHECK(in_certified(odecide(guarded, "01", ClassTag::COM_domain, 0)));
  CHECK(in_certified(odecide(guarded, "01", ClassTag::COF_output, 0)));
  CHECK(undecided(odecide(guarded, "0", ClassTag::TOT, 0)));
  CHECK(in_certified(odecide(guarded, "00", ClassTag::TOT, 0)));
  CHECK(out_certified(odecide(guarded, "1", ClassTag::TOT, 0)));
}

TEST_CASE("prescription scripts are validated before any allocation") {
  CHECK_THROWS_WITH_AS(prescribed_tot_machine({Dir::descending, {}, 1}),
                       "empty prescription script", domain_error);
  CHECK_THROWS_WITH_AS(prescribed_tot_machine({Dir::descending, {Dyadic(0, 0)}, 1}),
                       "prescribed value 0 outside (0, 1)", domain_error);
  CHECK_THROWS_WITH_AS(prescribed_tot_machine({Dir::descending, {Dyadic(1, 0)}, 1}),
                       "prescribed value 1 outside (0, 1)", domain_error);
  CHECK_THROWS_WITH_AS(
      prescribed_tot_machine({Dir::descending, {Dyadic(1, 2), Dyadic(1, 1)}, 2}),
      "script is not descending", domain_error);
  CHECK_THROWS_WITH_AS(
      prescribed_cof_machine({Dir::ascending, {Dyadic(1, 1), Dyadic(1, 2)}, 2}),
      "script is not ascending", domain_error);
  CHECK_THROWS_WITH_AS(prescribed_tot_machine({Dir::ascending, {Dyadic(1, 2)}, 2}),
                       "descending script required", domain_error);
  CHECK_THROWS_WITH_AS(prescribed_cof_machine({Dir::descending, {Dyadic(1, 2)}, 2}),
                       "ascending script required", domain_error);
  CHECK_THROWS_WITH_AS(prescribed_tot_machine({Dir::descending, {Dyadic(3, 2)}, 2}),
                       "target 3/4 plus the 2^-2 reserve reaches 1", domain_error);
  CHECK_THROWS_WITH_AS(prescribed_com_machine({Dir::ascending, {Dyadic(1, 3)}, 2}),
                       "target 1/8 below the 2^-2 reserve", domain_error);
}

TEST_CASE("prescribed totality: the reserve comes first, then the complement") {
  using P = std::vector<std::pair<Bits, unsigned>>;
  auto p = prescribed_tot_machine({Dir::descending, {Dyadic(1, 2)}, 1});
  CHECK(p.rho == bits("0"));
  CHECK(p.log.rho == bits("0"));
  CHECK(set_of(p.log) == P{{bits("10"), 0}});
  CHECK(p.log.allocations.size() == 2);
  CHECK(p.log.allocations[0].assigned == bits("0"));
  CHECK(p.log.allocations[1].assigned == bits("10"));
  CHECK(p.log.stabilization == 0);

  CHECK(set_of(prescribed_tot_machine({Dir::descending, {Dyadic(1, 1)}, 2}).log) ==
        P{{bits("01"), 0}});
  CHECK(set_of(prescribed_tot_machine({Dir::descending, {Dyadic(3, 3)}, 2}).log) ==
        P{{bits("01"), 0}, {bits("100"), 0}});
  CHECK(set_of(prescribed_tot_machine({Dir::descending, {Dyadic(5, 3)}, 2}).log) ==
        P{{bits("010"), 0}});
  auto big = prescribed_tot_machine({Dir::descending, {Dyadic(3, 2)}, 3});
  CHECK(big.rho == bits("000"));
  CHECK(set_of(big.log) == P{{bits("001"), 0}});

  // the total region of the half target is exactly the 1-cylinder
  auto half = prescribed_tot_machine({Dir::descending, {Dyadic(1, 1)}, 2});
  CHECK(half.machine.eval(bits("1"), 0, 1) == 0u);
  CHECK_FALSE(half.machine.eval(bits("00"), 0, 9).has_value());
  CHECK(in_certified(odecide(half.machine, "1", ClassTag::TOT, 0)));
  CHECK(out_certified(odecide(half.machine, "00", ClassTag::TOT, 0)));
  CHECK(out_certified(odecide(half.machine, "01", ClassTag::TOT, 0)));
  CHECK(in_certified(odecide(half.machine, "00", ClassTag::COM_domain, 0)));
}

TEST_CASE("a descending schedule allocates the complement increment by increment") {
  auto p = prescribed_tot_machine(
      {Dir::descending, {Dyadic(3, 2), Dyadic(5, 3), Dyadic(9, 4)}, 2});
  CHECK(p.rho == bits("00"));
  std::vector<std::pair<Bits, unsigned>> expected{{bits("010"), 1}, {bits("0110"), 2}};
  CHECK(set_of(p.log) == expected);
  CHECK(p.log.stabilization == 2);

  CHECK(undecided(odecide(p.machine, "11", ClassTag::TOT, 1)));  // not yet stabilized
  CHECK(in_certified(odecide(p.machine, "11", ClassTag::TOT, 2)));
  CHECK(in_certified(odecide(p.machine, "0111", ClassTag::TOT, 2)));
  CHECK(out_certified(odecide(p.machine, "0110", ClassTag::TOT, 2)));
  CHECK(out_certified(odecide(p.machine, "010", ClassTag::TOT, 2)));
  CHECK(undecided(odecide(p.machine, "011", ClassTag::TOT, 2)));  // genuinely mixed cylinder
}

TEST_CASE("the spliced prescription hits the target through the reserved window") {
  PrescribedTarget alpha{Dir::descending, {Dyadic(3, 2)}, 2};
  StagedOracleMachine v = region_total_machine({Bits()}, 0);
  BuildLog log;
  StagedOracleMachine m = prescribed_universal_tot(alpha, v, {Dyadic(1, 0)}, 2, &log);
  CHECK(log.rho == bits("00"));  // inner reserve for beta = 1/2
  CHECK(in_certified(odecide(m, "00", ClassTag::TOT, 0)));   // the window runs v, total
  CHECK(in_certified(odecide(m, "0010", ClassTag::TOT, 0)));
  CHECK(in_certified(odecide(m, "1", ClassTag::TOT, 0)));
  CHECK(out_certified(odecide(m, "01", ClassTag::TOT, 0)));
  CHECK(m.eval(bits("0011"), 2, 1) == 0u);                   // shifted run inside the window
  CHECK_FALSE(m.eval(bits("01"), 2, 9).has_value());
}

TEST_CASE("the reserve exponent scan picks the least admissible value") {
  PrescribedTarget alpha{Dir::descending, {Dyadic(3, 2)}, 2};  // c member is ignored here
  StagedOracleMachine v = region_total_machine({Bits()}, 0);
  BuildLog log;
  prescribed_universal_tot(alpha, v, {Dyadic(1, 0)}, std::nullopt, &log);
  CHECK(log.rho == bits("0"));  // c = 1 already works: beta = 1/4
}

TEST_CASE("a partial window machine scales its contribution") {
  PrescribedTarget alpha{Dir::descending, {Dyadic(5, 3)}, 2};
  StagedOracleMachine v = region_total_machine({bits("0")}, 0);
  BuildLog log;
  StagedOracleMachine m = prescribed_universal_tot(alpha, v, {Dyadic(1, 1)}, 2, &log);
  CHECK(log.rho == bits("00"));
  CHECK(in_certified(odecide(m, "000", ClassTag::TOT, 0)));
  CHECK(out_certified(odecide(m, "001", ClassTag::TOT, 0)));
  CHECK(in_certified(odecide(m, "1", ClassTag::TOT, 0)));
  CHECK(out_certified(odecide(m, "01", ClassTag::TOT, 0)));
}

TEST_CASE("an empty window reduces the splice to the plain prescription") {
  PrescribedTarget alpha{Dir::descending, {Dyadic(1, 1)}, 2};
  BuildLog log;
  StagedOracleMachine m =
      prescribed_universal_tot(alpha, empty_oracle_machine(), {Dyadic(0, 0)}, 2, &log);
  CHECK(log.rho == bits("00"));
  CHECK(out_certified(odecide(m, "00", ClassTag::TOT, 0)));
  CHECK(in_certified(odecide(m, "1", ClassTag::TOT, 0)));
  CHECK(out_certified(odecide(m, "01", ClassTag::TOT, 0)));
}

TEST_CASE("truncation scripts and inadmissible reserves are rejected") {
  PrescribedTarget alpha{Dir::descending, {Dyadic(1, 1)}, 2};
  StagedOracleMachine v = empty_oracle_machine();
  CHECK_THROWS_WITH_AS(prescribed_universal_tot(alpha, v, {}, 2),
                       "empty truncation script", domain_error);
  CHECK_THROWS_WITH_AS(prescribed_universal_tot(alpha, v, {Dyadic(5, 2)}, 2),
                       "truncation value 5/4 outside [0, 1]", domain_error);
  CHECK_THROWS_WITH_AS(prescribed_universal_tot(alpha, v, {Dyadic(1, 1), Dyadic(1, 0)}, 2),
                       "truncation script is not descending", domain_error);
  // a strictly shrinking truncation makes every candidate beta ascend
  CHECK_THROWS_WITH_AS(prescribed_universal_tot(alpha, v, {Dyadic(1, 0), Dyadic(1, 1)}, 3),
                       "supplied reserve exponent is not admissible", domain_error);
  CHECK_THROWS_WITH_AS(prescribed_universal_tot(alpha, v, {Dyadic(1, 0), Dyadic(1, 1)}),
                       "no admissible reserve exponent within the scan bound", domain_error);
}

TEST_CASE("column pairing walks the weight blocks in length order") {
  CHECK(ColumnPairing::pair(Bits(), 0) == 0);
  CHECK(ColumnPairing::pair(Bits(), 1) == 1);
  CHECK(ColumnPairing::pair(bits("0"), 0) == 2);
  CHECK(ColumnPairing::pair(bits("1"), 0) == 3);
  CHECK(ColumnPairing::pair(Bits(), 2) == 4);
  CHECK(ColumnPairing::pair(bits("0"), 1) == 5);
  CHECK(ColumnPairing::pair(bits("1"), 1) == 6);
  CHECK(ColumnPairing::pair(bits("00"), 0) == 7);
  CHECK(ColumnPairing::pair(bits("01"), 0) == 8);
  CHECK(ColumnPairing::pair(bits("10"), 0) == 9);
  CHECK(ColumnPairing::pair(bits("11"), 0) == 10);
  CHECK(ColumnPairing::pair(Bits(), 3) == 11);
  for (unsigned code = 0; code <= 200; ++code) {
    auto [sigma, j] = ColumnPairing::unpair(BigInt(code));
    CHECK(ColumnPairing::pair(sigma, j) == code);
  }
  CHECK_THROWS_WITH_AS(ColumnPairing::unpair(BigInt(-1)), "pairing codes are non-negative",
                       domain_error);
}

TEST_CASE("closure families tick from the entry stage and close upward") {
  MonotoneStageFamily f = closure_family({{bits("01"), 2}, {bits("1"), 0}});
  CHECK(f.count(2, bits("01"), 1) == 0);
  CHECK(f.count(2, bits("01"), 2) == 1);
  CHECK(f.count(2, bits("01"), 5) == 4);
  CHECK(f.count(1, bits("01"), 9) == 0);  // the member is too long for this section
  CHECK(f.count(3, bits("011"), 5) == 4);
  CHECK(f.count(1, bits("1"), 1) == 1);   // stage-0 entries tick from stage 1
  CHECK(f.count(1, bits("1"), 4) == 4);
  CHECK(f.count(0, Bits(), 9) == 0);
  CHECK(f.unbounded(2, bits("01")));
  CHECK_FALSE(f.unbounded(1, bits("01")));
  CHECK_FALSE(f.unbounded(3, bits("00")));
  std::vector<Bits> roots = f.unbounded_roots();
  CHECK(std::set<Bits>(roots.begin(), roots.end()) == std::set<Bits>{bits("01"), bits("1")});
}

TEST_CASE("scripted families honor their scripts and the propagation contract") {
  MonotoneStageFamily f = scripted_family({{2, bits("01"), {3, 5}, std::nullopt}});
  CHECK(f.count(2, bits("01"), 2) == 0);
  CHECK(f.count(2, bits("01"), 3) == 1);
  CHECK(f.count(2, bits("01"), 5) == 2);
  CHECK(f.count(2, bits("01"), 50) == 2);
  CHECK(f.count(3, bits("011"), 4) == 1);  // cells apply upward
  CHECK(f.count(1, bits("01"), 50) == 0);
  CHECK_FALSE(f.unbounded(2, bits("01")));
  CHECK(f.unbounded_roots().empty());

  MonotoneStageFamily g = scripted_family({{1, bits("0"), {}, 5}});
  CHECK(g.count(1, bits("0"), 4) == 0);
  CHECK(g.count(1, bits("0"), 5) == 1);
  CHECK(g.count(1, bits("0"), 8) == 4);
  CHECK(g.unbounded(1, bits("0")));
  CHECK(g.unbounded(2, bits("01")));
  CHECK_FALSE(g.unbounded(0, bits("0")));
  CHECK(g.unbounded_roots() == std::vector<Bits>{bits("0")});

  // an unbounded cell shorter than its section pads out to the section length
  MonotoneStageFamily padded = scripted_family({{2, bits("0"), {}, 1}});
  std::vector<Bits> roots = padded.unbounded_roots();
  CHECK(std::set<Bits>(roots.begin(), roots.end()) == std::set<Bits>{bits("00"), bits("01")});

  CHECK_THROWS_WITH_AS(
      scripted_family({{1, bits("0"), {}, 5}, {2, bits("01"), {3}, std::nullopt}}),
      "cell (1, \"0\") grows forever below the bounded cell (2, \"01\")", domain_error);
}

namespace {

MarkerMachine quiet_markers() {
  return MarkerMachine(scripted_family({}), scripted_oracle(OracleApprox::Kind::known_limit_toy, {}));
}

}  // namespace

TEST_CASE("an eventless construction leaves each marker on its start point") {
  MarkerMachine mm = quiet_markers();
  CHECK(mm.marker_position(bits("0"), 0) == 2);
  CHECK(mm.marker_position(bits("0"), 50) == 2);
  CHECK(mm.move_log(bits("0"), 50).empty());
  StagedOracleMachine m = mm.machine();
  // the marker point is a permanent hole; its column neighbours fill in
  CHECK_FALSE(m.eval(bits("0"), 2, 99).has_value());
  CHECK(m.eval(bits("0"), 5, 6) == 5u);
  CHECK_FALSE(m.eval(bits("0"), 5, 5).has_value());  // points appear once the stage passes them
  CHECK(m.eval(Bits(), 1, 2) == 1u);
  CHECK_FALSE(m.eval(Bits(), 0, 99).has_value());    // the empty column's own marker
  // foreign incompatible columns fill under the same gate
  CHECK(m.eval(bits("1"), 2, 3) == 2u);
  CHECK_FALSE(m.eval(bits("1"), 2, 2).has_value());
  // columns owned by proper extensions stay pending
  CHECK_FALSE(m.eval(Bits(), 2, 99).has_value());
  CHECK_FALSE(m.eval(bits("0"), 7, 99).has_value());
}

TEST_CASE("a family growing everywhere moves every marker every stage") {
  MarkerMachine mm(closure_family({{Bits(), 1}}),
                   scripted_oracle(OracleApprox::Kind::known_limit_toy, {}));
  CHECK(mm.marker_position(Bits(), 0) == 0);
  CHECK(mm.marker_position(Bits(), 1) == 1);
  CHECK(mm.marker_position(Bits(), 4) == 26);
  std::vector<std::pair<unsigned, BigInt>> expected{
      {1, BigInt(1)}, {2, BigInt(4)}, {3, BigInt(11)}, {4, BigInt(26)}};
  CHECK(mm.move_log(Bits(), 4) == expected);
  BigInt prev = mm.marker_position(bits("01"), 0);
  for (unsigned s = 1; s <= 12; ++s) {
    BigInt cur = mm.marker_position(bits("01"), s);
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("an oracle entry moves exactly the columns of its length, once") {
  MarkerMachine mm(scripted_family({}),
                   scripted_oracle(OracleApprox::Kind::known_limit_toy, {{1, 7}}));
  CHECK(mm.marker_position(bits("0"), 6) == 2);
  CHECK(mm.marker_position(bits("0"), 7) == 503);   // pair("0", 7)
  CHECK(mm.marker_position(bits("0"), 99) == 503);
  CHECK(ColumnPairing::unpair(mm.marker_position(bits("0"), 99)).second == 7);
  std::vector<std::pair<unsigned, BigInt>> expected{{7, BigInt(503)}};
  CHECK(mm.move_log(bits("0"), 99) == expected);
  CHECK(mm.marker_position(bits("00"), 99) == 7);   // length 2: untouched
  CHECK(mm.marker_position(Bits(), 99) == 0);
  // the vacated start point of the moved column becomes defined
  StagedOracleMachine m = mm.machine();
  CHECK_FALSE(m.eval(bits("0"), 2, 6).has_value());
  CHECK(m.eval(bits("0"), 2, 8) == 2u);
}

TEST_CASE("the only hole in an own column is the current marker") {
  MarkerMachine mm = quiet_markers();
  StagedOracleMachine m = mm.machine();
  for (unsigned stage = 1; stage <= 12; ++stage) {
    for (unsigned n = 0; n < stage; ++n) {
      auto [sigma, j] = ColumnPairing::unpair(BigInt(n));
      if (!sigma.is_prefix_of(bits("0"))) continue;
      bool hole = !m.eval(bits("0"), n, stage).has_value();
      CHECK(hole == (BigInt(n) == mm.marker_position(sigma, stage)));
    }
  }
}

TEST_CASE("the cofiniteness machine certifies from the unbounded roots") {
  StagedOracleMachine m = cof_machine_from_sigma3(
      closure_family({{bits("1"), 0}}),
      scripted_oracle(OracleApprox::Kind::known_limit_toy, {}));
  CHECK(out_certified(odecide(m, "1", ClassTag::TOT, 0)));
  CHECK(in_certified(odecide(m, "1", ClassTag::INF_domain, 0)));
  CHECK(in_certified(odecide(m, "0", ClassTag::INF_domain, 0)));
  CHECK(in_certified(odecide(m, "1", ClassTag::COF_domain, 0)));
  CHECK(out_certified(odecide(m, "0", ClassTag::COF_domain, 0)));
  CHECK(undecided(odecide(m, "", ClassTag::COF_domain, 0)));
  CHECK(in_certified(odecide(m, "11", ClassTag::COM_domain, 0)));
  CHECK(out_certified(odecide(m, "00", ClassTag::COM_domain, 0)));
  CHECK(out_certified(odecide(m, "1", ClassTag::COF_output, 0)));

  StagedOracleMachine all = cof_machine_from_sigma3(
      closure_family({{Bits(), 1}}),
      scripted_oracle(OracleApprox::Kind::known_limit_toy, {}));
  CHECK(in_certified(odecide(all, "0", ClassTag::TOT, 0)));
}

TEST_CASE("prescribed cofiniteness allocates the target itself") {
  using P = std::vector<std::pair<Bits, unsigned>>;
  CHECK(set_of(prescribed_cof_machine({Dir::ascending, {Dyadic(1, 2)}, 2}).log) ==
        P{{bits("01"), 0}});
  CHECK(set_of(prescribed_cof_machine({Dir::ascending, {Dyadic(3, 3)}, 2}).log) ==
        P{{bits("01"), 0}, {bits("100"), 0}});
  CHECK(set_of(prescribed_cof_machine({Dir::ascending, {Dyadic(1, 1)}, 2}).log) ==
        P{{bits("1"), 0}});
  auto p = prescribed_cof_machine({Dir::ascending, {Dyadic(5, 3)}, 2});
  CHECK(set_of(p.log) == P{{bits("1"), 0}, {bits("010"), 0}});
  CHECK(p.rho == bits("00"));

  CHECK(in_certified(odecide(p.machine, "1", ClassTag::COF_domain, 0)));
  CHECK(in_certified(odecide(p.machine, "010", ClassTag::COF_domain, 0)));
  CHECK(out_certified(odecide(p.machine, "011", ClassTag::COF_domain, 0)));
  CHECK(out_certified(odecide(p.machine, "00", ClassTag::COF_domain, 0)));  // reserved window
  CHECK(in_certified(odecide(p.machine, "00", ClassTag::COM_domain, 0)));
}

TEST_CASE("prescribed computable domains count the reserve toward the target") {
  using P = std::vector<std::pair<Bits, unsigned>>;
  auto quarter = prescribed_com_machine({Dir::ascending, {Dyadic(1, 2)}, 2});
  CHECK(quarter.rho == bits("00"));
  CHECK(set_of(quarter.log).empty());  // the reserve alone meets the target
  CHECK(set_of(prescribed_com_machine({Dir::ascending, {Dyadic(3, 3)}, 2}).log) ==
        P{{bits("010"), 0}});
  CHECK(set_of(prescribed_com_machine({Dir::ascending, {Dyadic(1, 1)}, 2}).log) ==
        P{{bits("01"), 0}});
  auto p = prescribed_com_machine({Dir::ascending, {Dyadic(5, 3)}, 2});
  CHECK(set_of(p.log) == P{{bits("01"), 0}, {bits("100"), 0}});

  CHECK(in_certified(odecide(p.machine, "00", ClassTag::COM_domain, 0)));  // empty runs
  CHECK(in_certified(odecide(p.machine, "01", ClassTag::COM_domain, 0)));  // cofinite runs
  CHECK(in_certified(odecide(p.machine, "100", ClassTag::COM_domain, 0)));
  CHECK(out_certified(odecide(p.machine, "101", ClassTag::COM_domain, 0)));
  CHECK(out_certified(odecide(p.machine, "11", ClassTag::COM_domain, 0)));
}

TEST_CASE("the infinitary machine survives exactly inside the set") {
  InfSDMachine m = infsd_from_sigma2(stable_one());
  InftyResult eps = infty_eval(m, Bits(), 8);
  CHECK(eps.refuted_at == 0u);
  InftyResult zero = infty_eval(m, bits("0"), 8);
  CHECK(zero.refuted_at == 1u);  // the n = 0 section is vacuous for length-1 inputs
  InftyResult one = infty_eval(m, bits("1"), 8);
  CHECK(one.alive());
  CHECK(one.output == Bits());
  CHECK(mstar_front(m, 3, 8) == std::set<Bits>{bits("1")});

  CHECK(in_certified(idecide(m, "1", ClassTag::DOM_infsd, 8)));
  CHECK(in_certified(idecide(m, "1", ClassTag::FIN_infsd, 8)));
  CHECK(out_certified(idecide(m, "0", ClassTag::DOM_infsd, 8)));
  CHECK(undecided(idecide(m, "", ClassTag::DOM_infsd, 8)));
  CHECK(out_certified(idecide(m, "1", ClassTag::INF_infsd, 8)));
}

TEST_CASE("a retracted member refutes its survivors at the exit section") {
  StagewiseSet v = scripted_set(
      Sem::toy_known_limit, {{bits("01"), 0}, {bits("1"), 0}, {bits("01"), 6}},
      std::set<Bits>{bits("1")});
  InfSDMachine m = infsd_from_sigma2(v);
  CHECK(infty_eval(m, bits("01"), 5).alive());
  CHECK(infty_eval(m, bits("01"), 8).refuted_at == 6u);
  CHECK(idecide(m, "01", ClassTag::DOM_infsd, 5).status == ClassDecision::Status::unknown);
  CHECK(out_certified(idecide(m, "01", ClassTag::DOM_infsd, 6)));

  StagewiseSet stable = scripted_set(Sem::toy_known_limit, {{bits("01"), 0}, {bits("1"), 0}},
                                     std::set<Bits>{bits("01"), bits("1")});
  CHECK(mstar_front(infsd_from_sigma2(stable), 3, 8) ==
        std::set<Bits>{bits("01"), bits("1")});

  StagewiseSet everything =
      scripted_set(Sem::toy_known_limit, {{Bits(), 0}}, std::set<Bits>{Bits()});
  CHECK(mstar_front(infsd_from_sigma2(everything), 3, 8) == std::set<Bits>{Bits()});

  StagewiseSet nothing = scripted_set(Sem::toy_known_limit, {}, std::set<Bits>{});
  CHECK(mstar_front(infsd_from_sigma2(nothing), 3, 8).empty());
}

TEST_CASE("the infinitary root guard empties the reserved window") {
  InfSDMachine m = infsd_rho_guard(infsd_from_sigma2(stable_one()), bits("11"));
  CHECK(infty_eval(m, bits("1"), 8).refuted_at == 0u);   // compatible with the root
  CHECK(infty_eval(m, bits("11"), 8).refuted_at == 0u);
  CHECK(infty_eval(m, bits("10"), 8).alive());
  CHECK(mstar_front(m, 3, 8) == std::set<Bits>{bits("10")});
  CHECK(out_certified(idecide(m, "11", ClassTag::DOM_infsd, 8)));
  CHECK(out_certified(idecide(m, "110", ClassTag::FIN_infsd, 8)));
  CHECK(out_certified(idecide(m, "11", ClassTag::INF_infsd, 8)));
  CHECK(undecided(idecide(m, "1", ClassTag::DOM_infsd, 8)));
  CHECK(in_certified(idecide(m, "10", ClassTag::DOM_infsd, 8)));
}

TEST_CASE("prescribed limit domains allocate the ascending target") {
  using P = std::vector<std::pair<Bits, unsigned>>;
  auto p = prescribed_domain_infsd({Dir::ascending, {Dyadic(1, 2)}, 1});
  CHECK(p.rho == bits("0"));
  CHECK(set_of(p.log) == P{{bits("10"), 0}});
  CHECK(set_of(prescribed_domain_infsd({Dir::ascending, {Dyadic(1, 1)}, 2}).log) ==
        P{{bits("1"), 0}});
  CHECK(set_of(prescribed_domain_infsd({Dir::ascending, {Dyadic(3, 3)}, 2}).log) ==
        P{{bits("01"), 0}, {bits("100"), 0}});
  CHECK(set_of(prescribed_domain_infsd({Dir::ascending, {Dyadic(5, 3)}, 2}).log) ==
        P{{bits("1"), 0}, {bits("010"), 0}});

  auto half = prescribed_domain_infsd({Dir::ascending, {Dyadic(1, 1)}, 2});
  CHECK(infty_eval(half.machine, bits("1"), 8).alive());
  CHECK(infty_eval(half.machine, bits("00"), 8).refuted_at == 0u);
  CHECK(in_certified(idecide(half.machine, "1", ClassTag::DOM_infsd, 8)));
  CHECK(out_certified(idecide(half.machine, "00", ClassTag::DOM_infsd, 8)));
  CHECK(out_certified(idecide(half.machine, "01", ClassTag::DOM_infsd, 8)));
}

TEST_CASE("constructed machines pass the invariant suites") {
  CheckHorizons h{3, 3, 8};
  CHECK_NOTHROW(check_oracle_machine_invariants(tot_machine_from_sigma2(stable_one()), h));
  CHECK_NOTHROW(check_oracle_machine_invariants(
      prescribed_tot_machine({Dir::descending, {Dyadic(1, 1)}, 2}).machine, h));
  CHECK_NOTHROW(check_oracle_machine_invariants(
      prescribed_cof_machine({Dir::ascending, {Dyadic(1, 1)}, 2}).machine, h));
  CHECK_NOTHROW(check_oracle_machine_invariants(
      prescribed_com_machine({Dir::ascending, {Dyadic(3, 3)}, 2}).machine, h));
  CHECK_NOTHROW(check_oracle_machine_invariants(quiet_markers().machine(), h));
  PrescribedTarget alpha{Dir::descending, {Dyadic(3, 2)}, 2};
  CHECK_NOTHROW(check_oracle_machine_invariants(
      prescribed_universal_tot(alpha, region_total_machine({Bits()}, 0), {Dyadic(1, 0)}, 2), h));
  CHECK_NOTHROW(check_monotone_machine_invariants(
      monotone_from_tot(tot_machine_from_sigma2(stable_one())), 3, 4));
  CHECK_NOTHROW(check_infsd_machine_invariants(infsd_from_sigma2(stable_one()), 3, 6));
  CHECK_NOTHROW(check_infsd_machine_invariants(
      prescribed_domain_infsd({Dir::ascending, {Dyadic(3, 3)}, 2}).machine, 3, 6));
}
