#include <doctest.h>

#include <map>
#include <random>
#include <sstream>

#include "stagesim/constructions.hpp"
#include "stagesim/errors.hpp"
#include "stagesim/machine.hpp"
#include "stagesim/measure.hpp"

using namespace stagesim;

namespace {

CanonicalApproximation approx_from_stages(
    std::vector<std::vector<const char*>> stage_sets) {
  CanonicalApproximation ca;
  ca.stages.resize(stage_sets.size());
  for (std::size_t s = 0; s < stage_sets.size(); ++s) {
    for (const char* str : stage_sets[s]) ca.stages[s].insert(BitString(str));
  }
  if (!ca.stages.empty()) ca.limit_set = ca.stages.back();
  return ca;
}

CanonicalApproximation empty_approx(int horizon) {
  CanonicalApproximation ca;
  ca.stages.resize(static_cast<std::size_t>(horizon) + 1);
  return ca;
}

// Independent reimplementation of the block rules, straight over strings:
// at stage s+1 the value at every string of length 2^{s+1}-1 extends the
// parent value by zeros (under a stage-set prefix) or by the string's own
// last bits.
std::map<std::string, std::string> brute_force_padding(
    const CanonicalApproximation& q, int stages) {
  std::map<std::string, std::string> table;
  table[""] = "";
  std::vector<std::string> parents = {""};
  for (int s = 0; s < stages; ++s) {
    std::size_t len = (std::size_t{1} << (s + 1)) - 1;
    std::vector<std::string> next;
    for (const BitString& x : all_strings_of_length(len)) {
      std::string parent = x.str().substr(0, (len - 1) / 2);
      bool padded = false;
      for (const BitString& member : q.at(s).members()) {
        if (member.is_prefix_of(x)) padded = true;
      }
      std::string value;
      if (padded) {
        value = table[parent] + std::string(len - parent.size(), '0');
      } else {
        value = table[parent] + x.str().substr(parent.size());
      }
      table[x.str()] = value;
      next.push_back(x.str());
    }
    parents = std::move(next);
  }
  return table;
}

CanonicalApproximation random_approx(std::mt19937& rng, int horizon) {
  CanonicalApproximation ca;
  ca.stages.resize(static_cast<std::size_t>(horizon) + 1);
  std::uniform_int_distribution<int> coin(0, 3);
  for (int s = 1; s <= horizon; ++s) {
    std::vector<BitString> chosen;
    for (int len = 0; len < s && len <= 3; ++len) {
      for (const BitString& x : all_strings_of_length(
               static_cast<std::size_t>(len))) {
        if (coin(rng) == 0) chosen.push_back(x);
      }
    }
    ca.stages[static_cast<std::size_t>(s)] = minimal_strings(chosen);
  }
  ca.limit_set = ca.stages.back();
  return ca;
}

}  // namespace

TEST_CASE("padding machine over an empty approximation copies its input") {
  MonotoneMachine m =
      build_padding_machine(empty_approx(4), 3, "copy");
  for (int s = 0; s < 3; ++s) {
    std::size_t len = (std::size_t{1} << (s + 1)) - 1;
    for (const BitString& x : all_strings_of_length(len)) {
      REQUIRE(m.value(x).has_value());
      CHECK(*m.value(x) == x);
    }
  }
}

TEST_CASE("padding machine under a full cover pads everything to zeros") {
  // The root sits in every stage set (including the degenerate stage 0).
  CanonicalApproximation ca =
      approx_from_stages({{""}, {""}, {""}, {""}});
  MonotoneMachine m = build_padding_machine(ca, 3, "zeros");
  for (int s = 0; s < 3; ++s) {
    std::size_t len = (std::size_t{1} << (s + 1)) - 1;
    for (const BitString& x : all_strings_of_length(len)) {
      CHECK(*m.value(x) == BitString::zeros(len));
    }
  }
}

TEST_CASE("padding machine pins the worked single-cover example") {
  // The string 1 is covered from stage 2 onward; oracles extending 1 end
  // in zeros after a copied core of length 2^2 - 1.
  CanonicalApproximation ca =
      approx_from_stages({{}, {}, {"1"}, {"1"}});
  MonotoneMachine m = build_padding_machine(ca, 4, "cover1");
  for (const BitString& x : all_strings_of_length(15)) {
    if (!x.bit(0)) continue;
    BitString value = *m.value(x);
    // First block stages copy; from the covered stage on, zeros.
    CHECK(value.prefix(3) == x.prefix(3));
    CHECK(value.suffix_from(3) == BitString::zeros(12));
  }
}

TEST_CASE("padded outputs keep a core of length 2^{s0-1}-1") {
  // With the cover present from the first consulted stage set on, the
  // first padded block is the machine-stage-2 block, so the copied core
  // is the length-1 parent.
  CanonicalApproximation ca =
      approx_from_stages({{}, {"1"}, {"1"}, {"1"}});
  MonotoneMachine m = build_padding_machine(ca, 4, "core1");
  for (const BitString& x : all_strings_of_length(15)) {
    if (!x.bit(0)) continue;
    CHECK(*m.value(x) == x.prefix(1).concat(BitString::zeros(14)));
  }
}

TEST_CASE("padding machine agrees with the brute-force rules on random mocks") {
  std::mt19937 rng(20240202);
  for (int round = 0; round < 6; ++round) {
    CanonicalApproximation ca = random_approx(rng, 4);
    MonotoneMachine m = build_padding_machine(ca, 4, "rnd");
    auto oracle = brute_force_padding(ca, 4);
    CHECK(m.table().size() == oracle.size());
    for (const auto& [input, expected] : oracle) {
      auto got = m.value(BitString(input));
      REQUIRE(got.has_value());
      CHECK(got->str() == expected);
    }
  }
}

TEST_CASE("totality machine definedness follows the stage sets") {
  SUBCASE("empty approximation: everything defined with zeros") {
    MonotoneMachine m = build_totality_machine(empty_approx(6), 6, "tot");
    for (int len = 0; len <= 5; ++len) {
      for (const BitString& x :
           all_strings_of_length(static_cast<std::size_t>(len))) {
        REQUIRE(m.value(x).has_value());
        CHECK(*m.value(x) == BitString::zeros(x.length()));
        CHECK(m.entry(x)->stage == len + 1);
      }
    }
  }
  SUBCASE("permanently covered strings stay undefined") {
    CanonicalApproximation ca = approx_from_stages(
        {{}, {}, {"0"}, {"0"}, {"0"}, {"0"}});
    MonotoneMachine m = build_totality_machine(ca, 6, "tot0");
    CHECK(!m.value(BitString("00")).has_value());
    CHECK(!m.value(BitString("0110")).has_value());
    CHECK(m.value(BitString("10")).has_value());
    // Length-1 strings were defined at stage 2 before the cover appeared.
    CHECK(m.value(BitString("0")).has_value());
  }
  SUBCASE("flickering cover defines strings when absent") {
    CanonicalApproximation ca = approx_from_stages(
        {{}, {}, {"0"}, {}, {"0"}, {}});
    MonotoneMachine m = build_totality_machine(ca, 6, "flick");
    // Length-2 strings under 0 are blocked at stage 3 but defined at 4.
    CHECK(m.value(BitString("00")).has_value());
    CHECK(m.entry(BitString("00"))->stage == 4);
    CHECK(*m.value(BitString("00")) == BitString::zeros(2));
  }
}

TEST_CASE("cone restriction maps the cone to the empty string") {
  MonotoneMachine copy = build_padding_machine(empty_approx(3), 3, "c");
  MonotoneMachine restricted = cone_restrict(copy, BitString("0"), "cr");
  CHECK(*restricted.value(BitString("0")) == BitString());
  CHECK(*restricted.value(BitString("0101011")) == BitString());
  CHECK(*restricted.value(BitString("1")) == BitString("1"));
  CHECK(*restricted.value(BitString("1010101")) == BitString("1010101"));
  CHECK(restricted.check_monotonicity().empty());

  SUBCASE("restricting the empty machine changes nothing observable") {
    MonotoneMachine empty = MonotoneMachine::everywhere_empty("e");
    MonotoneMachine r = cone_restrict(empty, BitString("01"), "er");
    CHECK(*r.value(BitString("0")) == BitString());
    CHECK(*r.value(BitString("1")) == BitString());
    CHECK(*r.value(BitString("0110")) == BitString());
  }
  SUBCASE("the empty reserved string maps everything to empty") {
    MonotoneMachine r = cone_restrict(copy, BitString(), "all");
    CHECK(r.table().empty());
    CHECK(*r.value(BitString("1101101")) == BitString());
  }
}

TEST_CASE("machine definitions enforce monotonicity") {
  MonotoneMachine m("mono");
  m.define(BitString("0"), BitString("1"), 1, {Rule::Copy, {}});
  CHECK_THROWS_AS(m.define(BitString("01"), BitString("00"), 2,
                           Provenance{Rule::Copy, {}}),
                  MonotonicityBreakError);
  CHECK_THROWS_AS(m.define(BitString("0"), BitString("1"), 3,
                           Provenance{Rule::Copy, {}}),
                  MonotonicityBreakError);
  // Extension direction: defining a prefix whose value disagrees.
  m.define(BitString("10"), BitString("111"), 1, {Rule::Copy, {}});
  CHECK_THROWS_AS(m.define(BitString("1"), BitString("0"), 2,
                           Provenance{Rule::Copy, {}}),
                  MonotonicityBreakError);
  m.define(BitString("1"), BitString("11"), 2, {Rule::Copy, {}});
}

TEST_CASE("splice places the inner machine inside the cone") {
  MonotoneMachine inner = build_totality_machine(empty_approx(5), 5, "in");
  MonotoneMachine outer = MonotoneMachine::everywhere_empty("out");
  outer.extend_horizon(5);
  MonotoneMachine sp = splice(2, inner, outer, "sp");
  CHECK(*sp.value(BitString("0010")) == BitString::zeros(2));
  CHECK(*sp.value(BitString("1")) == BitString());  // outer cone
  CHECK(sp.check_monotonicity().empty());
  for (int s = 1; s <= 5; ++s) {
    CHECK(stage_measure(sp, ClassSpec::total(), s) == Dyadic::pow2_neg(2));
    CHECK(stage_measure(sp, ClassSpec::ends_in_zeros(), s) ==
          Dyadic::pow2_neg(2));
  }
  CHECK(stage_measure(sp, ClassSpec::total(), 0) == Dyadic());
}

TEST_CASE("splice rejects an outer machine alive on the cone") {
  MonotoneMachine inner = build_totality_machine(empty_approx(3), 3, "in");
  MonotoneMachine outer = build_padding_machine(empty_approx(3), 3, "out");
  CHECK_THROWS_AS(splice(2, inner, outer, "bad"), ConeNotEmptyError);
}

TEST_CASE("splice measure additivity is exact for both classes") {
  // Outer realizes a padded share avoiding the cone 00; inner is a plain
  // totality machine.
  TargetedMachine outer = make_machine_cor34(
      BitString("00"),
      {Dyadic::from_parts(1, 3), Dyadic::from_parts(1, 2), Dyadic::from_parts(1, 2)},
      "outer");
  MonotoneMachine inner = build_totality_machine(empty_approx(4), 4, "inner");
  MonotoneMachine sp = splice(2, inner, outer.machine, "sp");
  for (const ClassSpec& cls : {ClassSpec::total(), ClassSpec::ends_in_zeros()}) {
    SpliceReport report =
        verify_splice_identity(sp, inner, outer.machine, 2, cls);
    CHECK(report.ok());
  }
  // Fault injection: corrupting one spliced entry localizes the stage.
  MonotoneMachine tampered = sp;
  REQUIRE(tampered.force_rule(BitString("0000"), Rule::Copy));
  SpliceReport broken = verify_splice_identity(tampered, inner, outer.machine,
                                               2, ClassSpec::ends_in_zeros());
  REQUIRE(!broken.ok());
  CHECK(broken.violations.front().stage ==
        tampered.entry(BitString("0000"))->stage);
}

TEST_CASE("universal machine tracks each listed machine inside its cone") {
  MonotoneMachine m0 = build_padding_machine(empty_approx(3), 3, "m0");
  MonotoneMachine m1 = build_totality_machine(empty_approx(4), 4, "m1");
  MonotoneMachine u = build_universal({&m0, &m1}, "u");
  for (const auto& [input, entry] : m0.table()) {
    const MachineEntry* ue = u.entry(BitString("1").concat(input));
    REQUIRE(ue != nullptr);
    CHECK(ue->output == entry.output);
    CHECK(ue->stage == entry.stage);
  }
  for (const auto& [input, entry] : m1.table()) {
    const MachineEntry* ue = u.entry(BitString("01").concat(input));
    REQUIRE(ue != nullptr);
    CHECK(ue->output == entry.output);
    CHECK(ue->stage == entry.stage);
  }
  // Strings in no coded cone map to the empty string.
  CHECK(*u.value(BitString("00")) == BitString());
  // Measure additivity over the coded cones.
  for (int s = 0; s <= 3; ++s) {
    Dyadic expected = stage_measure(m0, ClassSpec::total(), s).scaled_down(1) +
                      stage_measure(m1, ClassSpec::total(), s).scaled_down(2);
    CHECK(stage_measure(u, ClassSpec::total(), s) == expected);
  }
  SUBCASE("the empty list yields the everywhere-empty machine") {
    MonotoneMachine e = build_universal({}, "e");
    CHECK(e.table().empty());
    CHECK(*e.value(BitString("0101")) == BitString());
  }
}

TEST_CASE("cor34 realizes its aligned padded-share trace exactly") {
  std::vector<Dyadic> targets = {Dyadic::from_parts(1, 2),
                                 Dyadic::from_parts(3, 3),
                                 Dyadic::from_parts(3, 3)};
  TargetedMachine tm = make_machine_cor34(BitString("0"), targets, "c34");
  for (int s = 0; s <= tm.machine.horizon(); ++s) {
    CHECK(stage_measure(tm.machine, ClassSpec::ends_in_zeros(), s) ==
          tm.aligned_targets[static_cast<std::size_t>(s)]);
  }
  CHECK(tm.aligned_targets.back() == targets.back());
  // The cone share never counts as alive.
  for (int s = 1; s <= tm.machine.horizon(); ++s) {
    CHECK(stage_measure(tm.machine, ClassSpec::total(), s) ==
          Dyadic(1) - Dyadic::pow2_neg(1));
  }
}

TEST_CASE("cor34 under a zero target never pads") {
  TargetedMachine tm =
      make_machine_cor34(BitString("0"), {Dyadic(), Dyadic()}, "z");
  for (int s = 0; s <= tm.machine.horizon(); ++s) {
    CHECK(stage_measure(tm.machine, ClassSpec::ends_in_zeros(), s) == Dyadic());
  }
}

TEST_CASE("cor34 propagates capacity errors") {
  CHECK_THROWS_AS(
      make_machine_cor34(BitString("0"), {Dyadic::from_parts(1, 1)}, "bad"),
      CapacityExceededError);
}

TEST_CASE("cor36 realizes the requested alive share after maturity") {
  // Requested TOTAL 3/8 with rho = 0: the allocation solves 1/2 - 3/8.
  TargetedMachine tm = make_machine_cor36(
      BitString("0"),
      {Dyadic::from_parts(3, 3), Dyadic::from_parts(3, 3),
       Dyadic::from_parts(3, 3), Dyadic::from_parts(3, 3)},
      "c36");
  for (int s = 0; s <= tm.machine.horizon(); ++s) {
    CHECK(stage_measure(tm.machine, ClassSpec::total(), s) ==
          tm.aligned_targets[static_cast<std::size_t>(s)]);
  }
  CHECK(tm.aligned_targets.back() == Dyadic::from_parts(3, 3));

  SUBCASE("the empty allocation leaves the full share outside the cone") {
    TargetedMachine free = make_machine_cor36(
        BitString("0"),
        {Dyadic::from_parts(1, 1), Dyadic::from_parts(1, 1)}, "f");
    CHECK(stage_measure(free.machine, ClassSpec::total(),
                        free.machine.horizon()) == Dyadic::from_parts(1, 1));
  }
  SUBCASE("requests outside the window are rejected") {
    CHECK_THROWS_AS(
        make_machine_cor36(BitString("0"), {Dyadic::from_parts(3, 2)}, "bad"),
        TargetOutOfRangeError);
    CHECK_THROWS_AS(make_machine_cor36(BitString("0"), {Dyadic()}, "bad2"),
                    TargetOutOfRangeError);
  }
}

TEST_CASE("machine tables round-trip through CSV") {
  CanonicalApproximation ca = approx_from_stages({{}, {}, {"1"}, {"1"}});
  MonotoneMachine m = cone_restrict(
      build_padding_machine(ca, 3, "m"), BitString("00"), "m");
  std::ostringstream out;
  m.write_csv(out);
  std::istringstream in(out.str());
  MonotoneMachine loaded = MonotoneMachine::load_csv(in, "m");
  CHECK(loaded.table().size() == m.table().size());
  for (const auto& [input, e] : m.table()) {
    const MachineEntry* le = loaded.entry(input);
    REQUIRE(le != nullptr);
    CHECK(le->output == e.output);
    CHECK(le->stage == e.stage);
    CHECK(le->provenance == e.provenance);
  }
  CHECK(loaded.empty_cones() == m.empty_cones());
  std::ostringstream again;
  loaded.write_csv(again);
  CHECK(again.str() == out.str());
}

TEST_CASE("the loader rejects tables violating monotonicity") {
  std::string csv =
      "stage,input,output,rule\n"
      "1,0,1,copy\n"
      "2,01,00,copy\n";
  std::istringstream in(csv);
  CHECK_THROWS_AS(MonotoneMachine::load_csv(in, "bad"), MonotonicityBreakError);
}

TEST_CASE("spliced provenance chains round-trip") {
  MonotoneMachine m0 = build_totality_machine(empty_approx(3), 3, "m0");
  MonotoneMachine u = build_universal({&m0}, "u");
  MonotoneMachine outer = MonotoneMachine::everywhere_empty("o");
  outer.extend_horizon(3);
  MonotoneMachine sp = splice(1, u, outer, "sp");
  std::ostringstream out;
  sp.write_csv(out);
  std::istringstream in(out.str());
  MonotoneMachine loaded = MonotoneMachine::load_csv(in, "sp");
  const MachineEntry* e = loaded.entry(BitString("011"));  // 0 * 1 * lambda
  REQUIRE(e != nullptr);
  REQUIRE(e->provenance.chain.size() == 2);
  CHECK(e->provenance.chain[0].prefix == BitString("0"));
  CHECK(e->provenance.chain[1].prefix == BitString("1"));
  CHECK(e->provenance.region() == BitString("01"));
  for (int s = 0; s <= 3; ++s) {
    CHECK(stage_measure(loaded, ClassSpec::total(), s) ==
          stage_measure(sp, ClassSpec::total(), s));
  }
}
