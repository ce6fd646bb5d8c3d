#include <doctest.h>

#include <random>

#include "stagesim/bitstring.hpp"
#include "stagesim/cylinder.hpp"
#include "stagesim/dyadic.hpp"
#include "stagesim/errors.hpp"

using namespace stagesim;

namespace {

Dyadic dy(long num, unsigned long k) { return Dyadic::from_parts(num, k); }

Dyadic random_dyadic(std::mt19937& rng) {
  std::uniform_int_distribution<long> num(-4096, 4096);
  std::uniform_int_distribution<unsigned long> k(0, 12);
  return Dyadic::from_parts(num(rng), k(rng));
}

}  // namespace

TEST_CASE("dyadic addition matches the worked examples") {
  CHECK(dy(1, 1) + dy(1, 2) == dy(3, 2));        // 1/2 + 1/4 = 3/4
  CHECK(dy(5, 3) + Dyadic() == dy(5, 3));        // x + 0 = x
  CHECK(dy(3, 3) + dy(5, 3) == Dyadic(1));       // 3/8 + 5/8 = 1
}

TEST_CASE("dyadic scaling matches the worked examples") {
  CHECK(Dyadic(1).scaled_down(2) == dy(1, 2));
  CHECK(dy(3, 2).scaled_down(0) == dy(3, 2));
  CHECK(dy(5, 3).scaled_down(3) == dy(5, 6));  // 5/8 * 1/8 = 5/64
}

TEST_CASE("canonical form keeps numerators odd or zero") {
  Dyadic d = Dyadic::from_parts(8, 5);  // 8/32 = 1/4
  CHECK(d.numerator() == 1);
  CHECK(d.log_denominator() == 2);
  Dyadic z = Dyadic::from_parts(0, 9);
  CHECK(z.is_zero());
  CHECK(z.log_denominator() == 0);
}

TEST_CASE("addition and subtraction are exact bit for bit") {
  std::mt19937 rng(20240901);
  for (int i = 0; i < 2000; ++i) {
    Dyadic a = random_dyadic(rng);
    Dyadic b = random_dyadic(rng);
    CHECK((a + b) - b == a);
    CHECK((a - b) + b == a);
    CHECK(a + b == b + a);
  }
}

TEST_CASE("comparison is a total order consistent with values") {
  CHECK(dy(1, 2) < dy(1, 1));
  CHECK(dy(-1, 1) < Dyadic());
  CHECK(dy(3, 2) <= dy(3, 2));
  CHECK(dy(7, 3) > dy(3, 2));  // 7/8 > 3/4
}

TEST_CASE("dyadic text form round-trips") {
  std::mt19937 rng(7);
  for (int i = 0; i < 500; ++i) {
    Dyadic a = random_dyadic(rng);
    auto parsed = Dyadic::parse(a.to_string());
    REQUIRE(parsed.has_value());
    CHECK(*parsed == a);
  }
  CHECK(Dyadic::parse("3/2^2") == dy(3, 2));
  CHECK(Dyadic::parse("5") == Dyadic(5));
  CHECK(!Dyadic::parse("3/4").has_value());
  CHECK(!Dyadic::parse("x/2^2").has_value());
  CHECK(Dyadic(1).to_string() == "1/2^0");
}

TEST_CASE("compatibility matches the prefix relation") {
  CHECK(compatible(BitString("0"), BitString("01")));
  CHECK(!compatible(BitString("01"), BitString("00")));
  CHECK(compatible(BitString("10"), BitString("10")));
  CHECK(compatible(BitString(), BitString("1101")));  // empty string
}

TEST_CASE("compatibility is reflexive and symmetric; same length means equal") {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> len(0, 10);
  std::uniform_int_distribution<int> bit(0, 1);
  auto random_string = [&]() {
    std::string s;
    int n = len(rng);
    for (int i = 0; i < n; ++i) s.push_back(bit(rng) ? '1' : '0');
    return BitString(s);
  };
  for (int i = 0; i < 1000; ++i) {
    BitString a = random_string();
    BitString b = random_string();
    CHECK(compatible(a, a));
    CHECK(compatible(a, b) == compatible(b, a));
    if (a.length() == b.length()) {
      CHECK(compatible(a, b) == (a == b));
    }
  }
}

TEST_CASE("cylinder measures") {
  CHECK(Cylinder{BitString()}.measure() == Dyadic(1));
  CHECK(Cylinder{BitString("01")}.measure() == dy(1, 2 * 1));
  CHECK(cylinder_measure(Cylinder{BitString::zeros(3)}) == dy(1, 3));
}

TEST_CASE("bit strings reject non-binary characters") {
  CHECK_THROWS_AS(BitString("012"), InvalidArgumentError);
}
