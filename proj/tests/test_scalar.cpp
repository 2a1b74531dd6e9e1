#include <boost/multiprecision/cpp_bin_float.hpp>

#include <catch2/catch_amalgamated.hpp>

#include "truchet/rng.hpp"
#include "truchet/scalar.hpp"

using truchet::BigInt;
using truchet::floor_quotient;
using truchet::GReduction;
using truchet::reduce_mod_G;
using truchet::Scalar;
using truchet::SplitMix64;

namespace {

Scalar rat(long long p, long long q) { return Scalar(BigInt(p), BigInt(q)); }

Scalar random_rational(SplitMix64& rng, long long den_cap = 10000) {
  long long q = 1 + static_cast<long long>(rng.below(den_cap));
  long long p = static_cast<long long>(rng.below(2 * q + 1)) - q;
  return Scalar(BigInt(p), BigInt(q));
}

Scalar random_quadratic(SplitMix64& rng, long long d) {
  long long c = 1 + static_cast<long long>(rng.below(50));
  long long a = static_cast<long long>(rng.below(201)) - 100;
  long long b = static_cast<long long>(rng.below(201)) - 100;
  return Scalar::surd(a, b, c, d);
}

}  // namespace

TEST_CASE("rational normalization") {
  Scalar s = rat(6, -4);
  CHECK(s.num() == -3);
  CHECK(s.den() == 2);
  CHECK(rat(0, 7) == Scalar(0));
  CHECK_THROWS_AS(Scalar(BigInt(1), BigInt(0)), truchet::scalar_error);
}

TEST_CASE("surd normalization and demotion") {
  Scalar s = Scalar::surd(2, 4, 6, 2);
  CHECK(s.surd_a() == 1);
  CHECK(s.surd_b() == 2);
  CHECK(s.surd_c() == 3);
  CHECK(s.radicand() == 2);

  Scalar demoted = Scalar::surd(3, 1, 2, 2) - Scalar::surd(1, 1, 2, 2);
  CHECK(demoted.is_rational());
  CHECK(demoted == Scalar(1));

  CHECK_THROWS_AS(Scalar::surd(0, 1, 1, 4), truchet::scalar_error);   // square
  CHECK_THROWS_AS(Scalar::surd(0, 1, 1, 12), truchet::scalar_error);  // not square-free
  CHECK_THROWS_AS(Scalar::root(2) + Scalar::root(3), truchet::scalar_error);
}

TEST_CASE("exact surd comparisons") {
  // sqrt(2) against rationals around it
  CHECK(Scalar::root(2) > rat(14142, 10000));
  CHECK(Scalar::root(2) < rat(14143, 10000));
  // (2 - sqrt(2))/2 is a root of 2x^2 - 4x + 1
  Scalar fp = Scalar::surd(2, -1, 2, 2);
  CHECK(Scalar(2) * fp * fp - Scalar(4) * fp + Scalar(1) == Scalar(0));
}

TEST_CASE("comparison agrees with high-precision floating evaluation") {
  using F = boost::multiprecision::cpp_bin_float_100;
  SplitMix64 rng(7);
  for (int i = 0; i < 300; ++i) {
    Scalar x = random_quadratic(rng, 2);
    F fx = F(x.surd_a().convert_to<F>() + x.surd_b().convert_to<F>() * sqrt(F(2))) /
           x.surd_c().convert_to<F>();
    int fs = fx == 0 ? 0 : (fx < 0 ? -1 : 1);
    CHECK(x.sign() == fs);
  }
}

TEST_CASE("total order: trichotomy and transitivity on random triples") {
  SplitMix64 rng(11);
  for (int i = 0; i < 500; ++i) {
    Scalar a = (i % 2) ? random_rational(rng) : random_quadratic(rng, 2);
    Scalar b = (i % 3) ? random_rational(rng) : random_quadratic(rng, 2);
    Scalar c = random_quadratic(rng, 2);
    int lt = a < b, gt = a > b, eq = a == b;
    CHECK(lt + gt + eq == 1);
    if (a <= b && b <= c) CHECK(a <= c);
    if (a >= b && b >= c) CHECK(a >= c);
  }
}

TEST_CASE("floor and mod1 for rationals and surds") {
  CHECK(rat(7, 2).floor() == 3);
  CHECK(rat(-7, 2).floor() == -4);
  CHECK(Scalar::root(2).floor() == 1);
  CHECK((-Scalar::root(2)).floor() == -2);
  CHECK(Scalar::surd(0, 5, 1, 2).floor() == 7);  // 5*sqrt(2) = 7.07...
  Scalar m = Scalar::surd(0, 5, 1, 2).mod1();
  CHECK(m >= Scalar(0));
  CHECK(m < Scalar(1));
  CHECK(Scalar(m + Scalar(7)) == Scalar::surd(0, 5, 1, 2));
}

TEST_CASE("reduce_mod_G examples") {
  GReduction r = reduce_mod_G(rat(3, 10));
  CHECK(r.reduced == rat(3, 10));
  CHECK(r.orientation == 1);
  CHECK(r.integer_part == 0);

  r = reduce_mod_G(rat(3, 4));
  CHECK(r.reduced == rat(1, 4));
  CHECK(r.orientation == -1);
  CHECK(r.integer_part == 1);

  // ambiguous: G-equivalent to 1/2 chooses positive orientation
  r = reduce_mod_G(rat(1, 2));
  CHECK(r.reduced == rat(1, 2));
  CHECK(r.orientation == 1);
  CHECK(r.integer_part == 0);
  r = reduce_mod_G(rat(-1, 2));
  CHECK(r.reduced == rat(1, 2));
  CHECK(r.orientation == 1);
  CHECK(r.integer_part == -1);
}

TEST_CASE("reduce_mod_G reconstruction on a million random rationals") {
  SplitMix64 rng(3);
  const Scalar zero(0), half = rat(1, 2);
  long long bad = 0;
  for (int i = 0; i < 1000000; ++i) {
    Scalar t = random_rational(rng);
    GReduction r = reduce_mod_G(t);
    if (r.reduced < zero || r.reduced > half) ++bad;
    if (Scalar(r.integer_part) + Scalar(r.orientation) * r.reduced != t) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("to_double survives catastrophic surd cancellation") {
  // (3 - 2 sqrt2)^40 is ~ 4e-31 while its integer parts are ~ 1e30
  Scalar tiny(1);
  Scalar base = Scalar::surd(3, -2, 1, 2);
  for (int i = 0; i < 40; ++i) tiny *= base;
  double v = tiny.to_double();
  CHECK(v > 0);
  CHECK(v == Catch::Approx(std::pow(3 - 2 * std::sqrt(2.0), 40)).epsilon(1e-9));
}

TEST_CASE("floor_quotient") {
  CHECK(floor_quotient(rat(1, 2), rat(3, 5)) == 0);
  CHECK(floor_quotient(rat(7, 10), rat(3, 5)) == 1);
  CHECK(floor_quotient(Scalar(0), rat(9, 7)) == 0);
  CHECK(floor_quotient(Scalar::root(2), Scalar::surd(-1, 1, 1, 2)) == 3);  // sqrt2/(sqrt2-1)=2+sqrt2
  CHECK_THROWS_AS(floor_quotient(Scalar(1), Scalar(0)), truchet::scalar_error);
  CHECK_THROWS_AS(floor_quotient(Scalar(1), Scalar(-1)), truchet::scalar_error);
}

TEST_CASE("text round trip is bit-exact") {
  SplitMix64 rng(13);
  for (int i = 0; i < 200; ++i) {
    Scalar x = (i % 2) ? random_rational(rng) : random_quadratic(rng, 2);
    Scalar back = Scalar::parse(x.str());
    CHECK(back == x);
    CHECK(back.str() == x.str());
  }
  CHECK(Scalar::parse("0.3") == rat(3, 10));
  CHECK(Scalar::parse("(2-1*sqrt(2))/2") == Scalar::surd(2, -1, 2, 2));
  CHECK(Scalar::parse("-5/15") == rat(-1, 3));
  CHECK_THROWS_AS(Scalar::parse("sqrt(2)"), truchet::scalar_error);
  CHECK_THROWS_AS(Scalar::parse(""), truchet::scalar_error);
}

TEST_CASE("to_double on huge ratios") {
  BigInt big = BigInt(1) << 400;
  CHECK(Scalar(big, big * 3).to_double() == Catch::Approx(1.0 / 3.0));
  CHECK(Scalar(big * 2, big).to_double() == Catch::Approx(2.0));
}
