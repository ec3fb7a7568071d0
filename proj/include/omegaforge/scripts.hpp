#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "omegaforge/constructions.hpp"
#include "omegaforge/machines.hpp"
#include "omegaforge/measure.hpp"
#include "omegaforge/rational.hpp"
#include "omegaforge/stagewise.hpp"

namespace omegaforge {

using ordered_json = nlohmann::ordered_json;

// All loaders reject unknown keys (schema_error) and validate value-level
// constraints (domain_error). Dyadics and rationals travel as "p/q" strings;
// binary strings as '0'/'1' text with the empty string spelled as in
// Bits::display().

Dyadic parse_dyadic(const std::string& text);
Rational parse_rational(const std::string& text);

// --- numeric-set oracles ------------------------------------------------
// {"kind": "ce-monotone" | "known-limit-toy" | "halting-standin",
//  "events": [[element, stage], ...],      (absent for halting-standin)
//  "limit": [element, ...]}                (known-limit-toy only, optional)
OracleApprox load_oracle(const ordered_json& j);
ordered_json save_oracle(const OracleApprox& e, unsigned horizon);

// --- stagewise string sets ------------------------------------------------
// {"kind": "sigma1-monotone" | "canonical-sigma2" | "toy-known-limit",
//  "events": [["010", stage], ...],
//  "limit": ["00", ...]}                   (toy-known-limit only)
StagewiseSet load_set(const ordered_json& j);
ordered_json save_set(const StagewiseSet& v, unsigned horizon);

// --- monotone counting families -------------------------------------------
// {"cells": [{"t": 2, "sigma": "01", "growth_stages": [...],
//             "grow_forever_from": 5}, ...]}
// or {"closure": [["01", stage], ...]} for the upward-closed form.
MonotoneStageFamily load_family(const ordered_json& j);

// --- prescribed measure targets --------------------------------------------
// {"direction": "ascending" | "descending", "values": ["1/2", ...], "c": 2}
PrescribedTarget load_target(const ordered_json& j);
ordered_json save_target(const PrescribedTarget& t);

// --- machine descriptions ---------------------------------------------------
// Tagged by "construction"; see the README for each schema. The builder
// returns the machine together with an ordered build log suitable for
// byte-stable output.

struct AnyMachine {
  enum class Kind { oracle, monotone, infsd };
  Kind kind = Kind::oracle;
  // exactly the member matching `kind` is engaged
  std::optional<StagedOracleMachine> oracle;
  std::optional<MonotoneMachine> monotone;
  std::optional<InfSDMachine> infsd;
};

struct BuiltMachine {
  AnyMachine machine;
  ordered_json log; // construction record (allocations, reserved root, stages)
};

BuiltMachine build_machine(const ordered_json& description);

// Serialization helpers shared by the command-line tool.
ordered_json build_log_json(const BuildLog& log);
ordered_json measure_bound_json(const MeasureBound& b);
std::string dump_json(const ordered_json& j); // dump(2) + trailing newline

}  // namespace omegaforge
