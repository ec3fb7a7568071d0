#include "omegaforge/scripts.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace omegaforge {

namespace {

[[noreturn]] void fail_schema(const std::string& msg) { throw schema_error(msg); }

void check_keys(const ordered_json& j, const char* what,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail_schema(std::string(what) + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) fail_schema("unknown key \"" + it.key() + "\" in " + what);
  }
}

const ordered_json& get_field(const ordered_json& j, const char* key, const char* what) {
  auto it = j.find(key);
  if (it == j.end()) fail_schema(std::string(what) + " requires \"" + key + "\"");
  return *it;
}

unsigned as_uint(const ordered_json& j, const std::string& what) {
  if (!j.is_number_unsigned()) fail_schema(what + " must be a non-negative integer");
  std::uint64_t v = j.get<std::uint64_t>();
  if (v > std::numeric_limits<unsigned>::max()) fail_schema(what + " is too large");
  return static_cast<unsigned>(v);
}

std::string as_string(const ordered_json& j, const std::string& what) {
  if (!j.is_string()) fail_schema(what + " must be a string");
  return j.get<std::string>();
}

Bits as_bits(const ordered_json& j, const std::string& what) {
  std::optional<Bits> b = Bits::parse(as_string(j, what));
  if (!b) fail_schema(what + " must be a binary string");
  return *b;
}

const ordered_json& as_array(const ordered_json& j, const std::string& what) {
  if (!j.is_array()) fail_schema(what + " must be an array");
  return j;
}

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

}  // namespace

Dyadic parse_dyadic(const std::string& text) {
  std::size_t slash = text.find('/');
  std::string num = text.substr(0, slash == std::string::npos ? text.size() : slash);
  std::string unsigned_num = !num.empty() && num[0] == '-' ? num.substr(1) : num;
  if (!all_digits(unsigned_num)) fail_schema("\"" + text + "\" is not a dyadic rational");
  BigInt n(num);
  if (slash == std::string::npos) return Dyadic(n, 0);
  std::string den = text.substr(slash + 1);
  if (!all_digits(den)) fail_schema("\"" + text + "\" is not a dyadic rational");
  BigInt d(den);
  if (d <= 0 || (d & (d - 1)) != 0)
    fail_schema("denominator of \"" + text + "\" is not a power of two");
  return Dyadic(n, boost::multiprecision::msb(d));
}

Rational parse_rational(const std::string& text) {
  std::size_t slash = text.find('/');
  std::string num = text.substr(0, slash == std::string::npos ? text.size() : slash);
  std::string unsigned_num = !num.empty() && num[0] == '-' ? num.substr(1) : num;
  if (!all_digits(unsigned_num)) fail_schema("\"" + text + "\" is not a rational");
  BigInt n(num);
  if (slash == std::string::npos) return Rational(n, 1);
  std::string den = text.substr(slash + 1);
  if (!all_digits(den)) fail_schema("\"" + text + "\" is not a rational");
  BigInt d(den);
  if (d == 0) fail_schema("\"" + text + "\" has a zero denominator");
  return Rational(n, d);
}

// ---------------------------------------------------------------------------

OracleApprox load_oracle(const ordered_json& j) {
  check_keys(j, "oracle description", {"kind", "events", "limit"});
  std::string kind = as_string(get_field(j, "kind", "oracle description"), "\"kind\"");

  if (kind == "halting-standin") {
    if (j.contains("events") || j.contains("limit"))
      fail_schema("halting-standin takes neither events nor a limit");
    return halting_standin_oracle();
  }
  if (kind != "ce-monotone" && kind != "known-limit-toy")
    fail_schema("unknown oracle kind \"" + kind + "\"");
  if (kind == "ce-monotone" && j.contains("limit"))
    fail_schema("a declared limit requires the known-limit-toy kind");

  std::vector<std::pair<unsigned, unsigned>> events;
  if (j.contains("events")) {
    for (const ordered_json& e : as_array(j.at("events"), "\"events\"")) {
      if (!e.is_array() || e.size() != 2)
        fail_schema("oracle events must be [element, stage] pairs");
      events.emplace_back(as_uint(e.at(0), "event element"), as_uint(e.at(1), "event stage"));
    }
  }
  OracleApprox result = scripted_oracle(kind == "ce-monotone"
                                            ? OracleApprox::Kind::ce_monotone
                                            : OracleApprox::Kind::known_limit_toy,
                                        events);
  if (j.contains("limit")) {
    std::set<unsigned> declared;
    for (const ordered_json& x : as_array(j.at("limit"), "\"limit\""))
      declared.insert(as_uint(x, "limit element"));
    if (result.known_limit() != declared)
      throw domain_error("declared oracle limit disagrees with the events");
  }
  return result;
}

ordered_json save_oracle(const OracleApprox& e, unsigned horizon) {
  ordered_json j;
  j["kind"] =
      e.kind() == OracleApprox::Kind::ce_monotone ? "ce-monotone" : "known-limit-toy";
  ordered_json events = ordered_json::array();
  std::set<unsigned> prev;
  for (unsigned s = 0; s <= horizon; ++s) {
    std::set<unsigned> cur = e.at(s);
    for (unsigned x : cur)
      if (!prev.count(x)) events.push_back(ordered_json::array({x, s}));
    prev = std::move(cur);
  }
  j["events"] = std::move(events);
  if (std::optional<std::set<unsigned>> lim = e.known_limit()) {
    ordered_json limit = ordered_json::array();
    for (unsigned x : *lim) limit.push_back(x);
    j["limit"] = std::move(limit);
  }
  return j;
}

// ---------------------------------------------------------------------------

namespace {

StagewiseSet::Semantics parse_set_kind(const std::string& kind) {
  if (kind == "sigma1-monotone") return StagewiseSet::Semantics::sigma1_monotone;
  if (kind == "canonical-sigma2") return StagewiseSet::Semantics::canonical_sigma2;
  if (kind == "toy-known-limit") return StagewiseSet::Semantics::toy_known_limit;
  fail_schema("unknown set kind \"" + kind + "\"");
}

const char* set_kind_name(StagewiseSet::Semantics s) {
  switch (s) {
    case StagewiseSet::Semantics::sigma1_monotone: return "sigma1-monotone";
    case StagewiseSet::Semantics::canonical_sigma2: return "canonical-sigma2";
    case StagewiseSet::Semantics::toy_known_limit: return "toy-known-limit";
  }
  return "?";
}

}  // namespace

StagewiseSet load_set(const ordered_json& j) {
  check_keys(j, "set description", {"kind", "events", "limit"});
  StagewiseSet::Semantics sem =
      parse_set_kind(as_string(get_field(j, "kind", "set description"), "\"kind\""));

  std::vector<std::pair<Bits, unsigned>> toggles;
  if (j.contains("events")) {
    for (const ordered_json& e : as_array(j.at("events"), "\"events\"")) {
      if (!e.is_array() || e.size() != 2)
        fail_schema("set events must be [string, stage] pairs");
      toggles.emplace_back(as_bits(e.at(0), "event string"), as_uint(e.at(1), "event stage"));
    }
  }

  std::optional<std::set<Bits>> declared;
  if (j.contains("limit")) {
    if (sem != StagewiseSet::Semantics::toy_known_limit)
      fail_schema("a declared limit requires the toy-known-limit kind");
    std::set<Bits> lim;
    for (const ordered_json& x : as_array(j.at("limit"), "\"limit\""))
      lim.insert(as_bits(x, "limit string"));
    declared = std::move(lim);
  } else if (sem == StagewiseSet::Semantics::toy_known_limit) {
    fail_schema("toy-known-limit sets must declare their limit");
  }
  return scripted_set(sem, toggles, std::move(declared));
}

ordered_json save_set(const StagewiseSet& v, unsigned horizon) {
  ordered_json j;
  j["kind"] = set_kind_name(v.semantics());
  ordered_json events = ordered_json::array();
  std::set<Bits> prev;
  for (unsigned s = 0; s <= horizon; ++s) {
    std::set<Bits> cur = v.at(s);
    for (const Bits& b : cur)
      if (!prev.count(b)) events.push_back(ordered_json::array({b.display(), s}));
    for (const Bits& b : prev)
      if (!cur.count(b)) events.push_back(ordered_json::array({b.display(), s}));
    prev = std::move(cur);
  }
  j["events"] = std::move(events);
  if (std::optional<std::set<Bits>> lim = v.known_limit()) {
    ordered_json limit = ordered_json::array();
    for (const Bits& b : *lim) limit.push_back(b.display());
    j["limit"] = std::move(limit);
  }
  return j;
}

// ---------------------------------------------------------------------------

MonotoneStageFamily load_family(const ordered_json& j) {
  check_keys(j, "family description", {"cells", "closure"});
  if (j.contains("cells") == j.contains("closure"))
    fail_schema("family description needs exactly one of \"cells\" or \"closure\"");

  if (j.contains("closure")) {
    std::vector<std::pair<Bits, unsigned>> members;
    for (const ordered_json& e : as_array(j.at("closure"), "\"closure\"")) {
      if (!e.is_array() || e.size() != 2)
        fail_schema("closure members must be [string, stage] pairs");
      members.emplace_back(as_bits(e.at(0), "member string"), as_uint(e.at(1), "member stage"));
    }
    return closure_family(members);
  }

  std::vector<FamilyCellScript> cells;
  for (const ordered_json& c : as_array(j.at("cells"), "\"cells\"")) {
    check_keys(c, "family cell", {"t", "sigma", "growth_stages", "grow_forever_from"});
    FamilyCellScript cell;
    cell.t = as_uint(get_field(c, "t", "family cell"), "\"t\"");
    cell.sigma = as_bits(get_field(c, "sigma", "family cell"), "\"sigma\"");
    if (c.contains("growth_stages"))
      for (const ordered_json& g : as_array(c.at("growth_stages"), "\"growth_stages\""))
        cell.growth_stages.push_back(as_uint(g, "growth stage"));
    if (c.contains("grow_forever_from"))
      cell.grow_forever_from = as_uint(c.at("grow_forever_from"), "\"grow_forever_from\"");
    cells.push_back(std::move(cell));
  }
  return scripted_family(std::move(cells));
}

// ---------------------------------------------------------------------------

PrescribedTarget load_target(const ordered_json& j) {
  check_keys(j, "target description", {"direction", "values", "c"});
  PrescribedTarget t;
  std::string dir = as_string(get_field(j, "direction", "target description"), "\"direction\"");
  if (dir == "ascending") t.direction = PrescribedTarget::Direction::ascending;
  else if (dir == "descending") t.direction = PrescribedTarget::Direction::descending;
  else fail_schema("unknown direction \"" + dir + "\"");
  for (const ordered_json& v : as_array(get_field(j, "values", "target description"), "\"values\""))
    t.script.push_back(parse_dyadic(as_string(v, "target value")));
  if (j.contains("c")) t.c = as_uint(j.at("c"), "\"c\"");
  t.validate_basic();
  return t;
}

ordered_json save_target(const PrescribedTarget& t) {
  ordered_json j;
  j["direction"] =
      t.direction == PrescribedTarget::Direction::ascending ? "ascending" : "descending";
  ordered_json values = ordered_json::array();
  for (const Dyadic& d : t.script) values.push_back(d.to_string());
  j["values"] = std::move(values);
  j["c"] = t.c;
  return j;
}

// ---------------------------------------------------------------------------

ordered_json build_log_json(const BuildLog& log) {
  ordered_json j;
  j["rho"] = log.rho.display();
  ordered_json allocs = ordered_json::array();
  for (const KraftAllocator::Record& r : log.allocations) {
    ordered_json a;
    a["index"] = r.index;
    a["length"] = r.length;
    a["assigned"] = r.assigned.display();
    allocs.push_back(std::move(a));
  }
  j["allocations"] = std::move(allocs);
  ordered_json set = ordered_json::array();
  for (const auto& [b, s] : log.set_stages) set.push_back(ordered_json::array({b.display(), s}));
  j["set"] = std::move(set);
  j["stabilization"] = log.stabilization;
  return j;
}

ordered_json measure_bound_json(const MeasureBound& b) {
  ordered_json j;
  j["depth"] = b.depth;
  j["stage"] = b.stage;
  j["n_max"] = b.n_max;
  j["lower"] = b.lower.to_string();
  j["upper"] = b.upper.to_string();
  j["lower_certified"] = b.lower_certified;
  j["upper_certified"] = b.upper_certified;
  return j;
}

std::string dump_json(const ordered_json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------

namespace {

AnyMachine wrap(StagedOracleMachine m) {
  AnyMachine a;
  a.kind = AnyMachine::Kind::oracle;
  a.oracle = std::move(m);
  return a;
}
AnyMachine wrap(MonotoneMachine m) {
  AnyMachine a;
  a.kind = AnyMachine::Kind::monotone;
  a.monotone = std::move(m);
  return a;
}
AnyMachine wrap(InfSDMachine m) {
  AnyMachine a;
  a.kind = AnyMachine::Kind::infsd;
  a.infsd = std::move(m);
  return a;
}

ordered_json tag_only(const char* name) {
  ordered_json j;
  j["construction"] = name;
  return j;
}

ordered_json with_build(const char* name, const BuildLog& log) {
  ordered_json j = tag_only(name);
  j.update(build_log_json(log));
  return j;
}

StagedOracleMachine oracle_part(const BuiltMachine& b, const char* what) {
  if (b.machine.kind != AnyMachine::Kind::oracle || !b.machine.oracle)
    fail_schema(std::string(what) + " must describe an oracle machine");
  return *b.machine.oracle;
}

}  // namespace

BuiltMachine build_machine(const ordered_json& j) {
  if (!j.is_object()) fail_schema("machine description must be an object");
  std::string name =
      as_string(get_field(j, "construction", "machine description"), "\"construction\"");

  if (name == "empty") {
    check_keys(j, "empty machine", {"construction", "complete_stage"});
    unsigned complete = j.contains("complete_stage")
                            ? as_uint(j.at("complete_stage"), "\"complete_stage\"")
                            : 0;
    return {wrap(empty_oracle_machine(complete)), tag_only("empty")};
  }

  if (name == "table") {
    check_keys(j, "table machine", {"construction", "entries", "complete_stage"});
    std::vector<OracleTableEntry> entries;
    unsigned max_stage = 0;
    for (const ordered_json& e :
         as_array(get_field(j, "entries", "table machine"), "\"entries\"")) {
      check_keys(e, "table entry", {"sigma", "n", "value", "stage"});
      OracleTableEntry entry;
      entry.sigma = as_bits(get_field(e, "sigma", "table entry"), "\"sigma\"");
      entry.n = as_uint(get_field(e, "n", "table entry"), "\"n\"");
      entry.value = as_uint(get_field(e, "value", "table entry"), "\"value\"");
      if (e.contains("stage")) entry.stage = as_uint(e.at("stage"), "\"stage\"");
      max_stage = std::max(max_stage, entry.stage);
      entries.push_back(std::move(entry));
    }
    unsigned complete = j.contains("complete_stage")
                            ? as_uint(j.at("complete_stage"), "\"complete_stage\"")
                            : max_stage;
    return {wrap(table_oracle_machine(std::move(entries), complete)), tag_only("table")};
  }

  if (name == "region-total") {
    check_keys(j, "region-total machine", {"construction", "region", "value", "from_stage"});
    std::vector<Bits> region;
    for (const ordered_json& r :
         as_array(get_field(j, "region", "region-total machine"), "\"region\""))
      region.push_back(as_bits(r, "region member"));
    unsigned value = j.contains("value") ? as_uint(j.at("value"), "\"value\"") : 0;
    unsigned from = j.contains("from_stage") ? as_uint(j.at("from_stage"), "\"from_stage\"") : 0;
    return {wrap(region_total_machine(region, value, from)), tag_only("region-total")};
  }

  if (name == "tot-from-sigma2") {
    check_keys(j, "tot-from-sigma2 machine", {"construction", "set"});
    StagewiseSet v = load_set(get_field(j, "set", "tot-from-sigma2 machine"));
    return {wrap(tot_machine_from_sigma2(v)), tag_only("tot-from-sigma2")};
  }

  if (name == "monotone-from-tot") {
    check_keys(j, "monotone-from-tot machine", {"construction", "machine"});
    BuiltMachine inner = build_machine(get_field(j, "machine", "monotone-from-tot machine"));
    return {wrap(monotone_from_tot(oracle_part(inner, "\"machine\""))),
            tag_only("monotone-from-tot")};
  }

  if (name == "monotone-table") {
    check_keys(j, "monotone-table machine", {"construction", "entries"});
    std::vector<MonotoneTableEntry> entries;
    for (const ordered_json& e :
         as_array(get_field(j, "entries", "monotone-table machine"), "\"entries\"")) {
      check_keys(e, "monotone-table entry", {"sigma", "output", "stage"});
      MonotoneTableEntry entry;
      entry.sigma = as_bits(get_field(e, "sigma", "monotone-table entry"), "\"sigma\"");
      entry.output = as_bits(get_field(e, "output", "monotone-table entry"), "\"output\"");
      if (e.contains("stage")) entry.stage = as_uint(e.at("stage"), "\"stage\"");
      entries.push_back(std::move(entry));
    }
    return {wrap(monotone_table_machine(std::move(entries))), tag_only("monotone-table")};
  }

  if (name == "prescribed-tot") {
    check_keys(j, "prescribed-tot machine", {"construction", "target"});
    PrescribedOracleMachine p =
        prescribed_tot_machine(load_target(get_field(j, "target", "prescribed-tot machine")));
    return {wrap(std::move(p.machine)), with_build("prescribed-tot", p.log)};
  }

  if (name == "prescribed-cof") {
    check_keys(j, "prescribed-cof machine", {"construction", "target"});
    PrescribedOracleMachine p =
        prescribed_cof_machine(load_target(get_field(j, "target", "prescribed-cof machine")));
    return {wrap(std::move(p.machine)), with_build("prescribed-cof", p.log)};
  }

  if (name == "prescribed-com") {
    check_keys(j, "prescribed-com machine", {"construction", "target"});
    PrescribedOracleMachine p =
        prescribed_com_machine(load_target(get_field(j, "target", "prescribed-com machine")));
    return {wrap(std::move(p.machine)), with_build("prescribed-com", p.log)};
  }

  if (name == "prescribed-domain-infsd") {
    check_keys(j, "prescribed-domain-infsd machine", {"construction", "target"});
    PrescribedInfSDMachine p = prescribed_domain_infsd(
        load_target(get_field(j, "target", "prescribed-domain-infsd machine")));
    return {wrap(std::move(p.machine)), with_build("prescribed-domain-infsd", p.log)};
  }

  if (name == "prescribed-universal-tot") {
    check_keys(j, "prescribed-universal-tot machine",
               {"construction", "alpha", "inner", "gamma", "c"});
    PrescribedTarget alpha = load_target(get_field(j, "alpha", "prescribed-universal-tot"));
    BuiltMachine inner = build_machine(get_field(j, "inner", "prescribed-universal-tot"));
    std::vector<Dyadic> gamma;
    for (const ordered_json& g :
         as_array(get_field(j, "gamma", "prescribed-universal-tot"), "\"gamma\""))
      gamma.push_back(parse_dyadic(as_string(g, "gamma value")));
    std::optional<unsigned> c;
    if (j.contains("c")) c = as_uint(j.at("c"), "\"c\"");
    BuildLog log;
    StagedOracleMachine m =
        prescribed_universal_tot(alpha, oracle_part(inner, "\"inner\""), gamma, c, &log);
    return {wrap(std::move(m)), with_build("prescribed-universal-tot", log)};
  }

  if (name == "splice") {
    check_keys(j, "splice machine", {"construction", "inside", "outside", "rho"});
    BuiltMachine inside = build_machine(get_field(j, "inside", "splice machine"));
    BuiltMachine outside = build_machine(get_field(j, "outside", "splice machine"));
    Bits rho = as_bits(get_field(j, "rho", "splice machine"), "\"rho\"");
    StagedOracleMachine m =
        splice(oracle_part(inside, "\"inside\""), oracle_part(outside, "\"outside\""), rho);
    ordered_json log = tag_only("splice");
    log["rho"] = rho.display();
    return {wrap(std::move(m)), std::move(log)};
  }

  if (name == "universal-family") {
    check_keys(j, "universal-family machine", {"construction", "family"});
    std::vector<StagedOracleMachine> family;
    for (const ordered_json& f :
         as_array(get_field(j, "family", "universal-family machine"), "\"family\""))
      family.push_back(oracle_part(build_machine(f), "family member"));
    ordered_json log = tag_only("universal-family");
    log["size"] = family.size();
    return {wrap(universal_from_family(std::move(family))), std::move(log)};
  }

  if (name == "cof-from-sigma3") {
    check_keys(j, "cof-from-sigma3 machine", {"construction", "family", "oracle"});
    MonotoneStageFamily f = load_family(get_field(j, "family", "cof-from-sigma3 machine"));
    OracleApprox e = load_oracle(get_field(j, "oracle", "cof-from-sigma3 machine"));
    return {wrap(cof_machine_from_sigma3(f, e)), tag_only("cof-from-sigma3")};
  }

  if (name == "infsd-from-sigma2") {
    check_keys(j, "infsd-from-sigma2 machine", {"construction", "set"});
    StagewiseSet v = load_set(get_field(j, "set", "infsd-from-sigma2 machine"));
    return {wrap(infsd_from_sigma2(v)), tag_only("infsd-from-sigma2")};
  }

  fail_schema("unknown construction \"" + name + "\"");
}

}  // namespace omegaforge
