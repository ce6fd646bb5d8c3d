#include <doctest.h>

#include <random>

#include "stagesim/approximation.hpp"
#include "stagesim/errors.hpp"

using namespace stagesim;

namespace {

MockHaltingSet halting(std::vector<std::pair<int, int>> events, int horizon) {
  MockHaltingSet h;
  for (auto [s, n] : events) h.events.push_back({s, n});
  h.horizon = horizon;
  return h;
}

Axiom axiom(const char* str, int stage, std::set<int> in = {},
            std::set<int> out = {}) {
  Axiom a;
  a.string = BitString(str);
  a.appearance_stage = stage;
  a.condition.required_in = std::move(in);
  a.condition.required_out = std::move(out);
  return a;
}

bool contains(const std::vector<BitString>& v, const char* s) {
  for (const BitString& b : v) {
    if (b.str() == s) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("hat enumeration of an empty operator is empty") {
  MockCEOperator op;
  MockHaltingSet h = halting({{1, 0}}, 5);
  for (int s = 0; s <= 5; ++s) CHECK(hat_enumeration(op, h, s).empty());
}

TEST_CASE("hat enumeration follows a negative oracle condition") {
  // 3 enters at stage 5; an axiom requiring 3 out is enumerable until then.
  MockCEOperator op{{axiom("1", 1, {}, {3})}};
  MockHaltingSet h = halting({{5, 3}}, 8);
  for (int s = 1; s <= 4; ++s) CHECK(contains(hat_enumeration(op, h, s), "1"));
  for (int s = 5; s <= 8; ++s) CHECK(!contains(hat_enumeration(op, h, s), "1"));
}

TEST_CASE("hat enumeration withholds when the use is freshly disturbed") {
  // Use of the axiom is 1 + 7 = 8 > 2, and 2 enters exactly at stage 5.
  MockCEOperator op{{axiom("0", 5, {2}, {7})}};
  MockHaltingSet h = halting({{5, 2}}, 8);
  CHECK(hat_enumeration(op, h, 5).empty());
  CHECK(contains(hat_enumeration(op, h, 6), "0"));
}

TEST_CASE("true stages are the enumerations never falsified from below") {
  CHECK(true_stages(halting({{1, 3}, {2, 1}, {3, 2}}, 4)) ==
        std::set<int>{2, 3});
  CHECK(true_stages(halting({{1, 0}}, 2)) == std::set<int>{1});
  CHECK(true_stages(halting({{1, 1}, {2, 2}, {3, 3}}, 4)) ==
        std::set<int>{1, 2, 3});
}

TEST_CASE("build_canonical on an empty operator") {
  CanonicalApproximation ca =
      build_canonical(MockCEOperator{}, halting({{1, 0}}, 4));
  for (int s = 0; s <= 4; ++s) CHECK(ca.at(s).is_empty());
  CHECK(ca.limit_set.is_empty());
}

TEST_CASE("build_canonical delays strings until the stage passes their length") {
  MockCEOperator op{{axiom("01", 2)}};
  CanonicalApproximation ca = build_canonical(op, halting({{1, 0}}, 6));
  CHECK(ca.at(1).is_empty());
  CHECK(ca.at(2).is_empty());  // |01| = 2 is not < 2
  for (int s = 3; s <= 6; ++s) CHECK(ca.at(s).contains(BitString("01")));
  CHECK(ca.limit_set.contains(BitString("01")));
  CHECK(check_canonical_laws(ca).empty());
}

TEST_CASE("build_canonical shows flicker for a falsified condition") {
  // The axiom requires 3 out of the oracle; 3 enters at stage 4.
  MockCEOperator op{{axiom("1", 1, {}, {3})}};
  CanonicalApproximation ca = build_canonical(op, halting({{4, 3}}, 7));
  CHECK(ca.at(2).contains(BitString("1")));
  CHECK(ca.at(3).contains(BitString("1")));
  for (int s = 4; s <= 7; ++s) CHECK(!ca.at(s).contains(BitString("1")));
  CHECK(ca.limit_set.is_empty());
}

TEST_CASE("build_canonical rejects a limit with compatible members") {
  MockCEOperator op{{axiom("0", 1), axiom("01", 1)}};
  CHECK_THROWS_AS(build_canonical(op, halting({{1, 0}}, 5)),
                  NotPrefixFreeLimitError);
}

TEST_CASE("stage sets are prefix-free even when the raw enumeration is not") {
  MockCEOperator op{{axiom("0", 1), axiom("01", 1, {}, {5})}};
  CanonicalApproximation ca = build_canonical(op, halting({{4, 5}}, 7));
  // While both are enumerated, only the minimal string 0 is kept.
  CHECK(ca.at(3).contains(BitString("0")));
  CHECK(!ca.at(3).contains(BitString("01")));
  CHECK(ca.limit_set.members() == std::vector<BitString>{BitString("0")});
}

TEST_CASE("canonical laws hold over random mock worlds") {
  std::mt19937 rng(77);
  std::uniform_int_distribution<int> bit(0, 1);
  for (int round = 0; round < 60; ++round) {
    // Random enumeration: a permutation of a few numbers over odd stages.
    std::vector<int> numbers = {0, 1, 2, 3, 4, 5};
    std::shuffle(numbers.begin(), numbers.end(), rng);
    numbers.resize(4);
    MockHaltingSet h;
    int stage = 1;
    for (int n : numbers) {
      h.events.push_back({stage, n});
      stage += std::uniform_int_distribution<int>(1, 2)(rng);
    }
    h.horizon = stage + 8;

    // A prefix-free pool of candidate strings.
    std::vector<BitString> pool;
    for (const BitString& x : all_strings_of_length(3)) pool.push_back(x);
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(3);

    MockCEOperator op;
    std::set<int> final_set;
    for (int n : numbers) final_set.insert(n);
    for (const BitString& s : pool) {
      Axiom a;
      a.string = s;
      a.appearance_stage = std::uniform_int_distribution<int>(1, 4)(rng);
      // Condition consistent with the final oracle, touching <= 2 numbers.
      for (int n = 0; n < 6; ++n) {
        if (bit(rng) == 0) continue;
        if (final_set.count(n)) {
          a.condition.required_in.insert(n);
        } else {
          a.condition.required_out.insert(n);
        }
        if (a.condition.use() >= 5) break;
      }
      op.axioms.push_back(a);
    }
    // One junk axiom that is falsified at the end.
    Axiom junk;
    junk.string = BitString("1111");
    junk.appearance_stage = 1;
    junk.condition.required_out.insert(numbers.back());
    op.axioms.push_back(junk);

    CanonicalApproximation ca = build_canonical(op, h);
    auto violations = check_canonical_laws(ca);
    if (!violations.empty()) FAIL_CHECK(violations.front());
  }
}
