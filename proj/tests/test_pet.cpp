#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "truchet/pet.hpp"
#include "truchet/rng.hpp"

using truchet::BigInt;
using truchet::Scalar;
using truchet::SplitMix64;
namespace pet = truchet::pet;
using pet::Direction;
using pet::LiftState;

namespace {

Scalar rat(long long p, long long q) { return Scalar(BigInt(p), BigInt(q)); }
const Scalar kFixedPoint = Scalar::surd(2, -1, 2, 2);

LiftState random_state(SplitMix64& rng) {
  return {rng.unit_scalar(), rng.unit_scalar(), pet::kDirections[rng.below(4)]};
}

}  // namespace

TEST_CASE("sector classification") {
  CHECK(pet::sector(rat(1, 10), rat(2, 10)) == +1);
  CHECK(pet::sector(rat(1, 10), rat(7, 10)) == -1);
  CHECK(pet::sector(rat(6, 10), rat(6, 10)) == +1);
  CHECK(pet::sector(rat(1, 2), rat(1, 4)) == -1);  // x on the half line: upper half
}

TEST_CASE("lift step examples") {
  Scalar alpha = rat(3, 10), beta = rat(2, 10);
  LiftState a{rat(1, 10), rat(2, 10), {1, 0}};
  LiftState ra = pet::psi_lift_step(a, alpha, beta);
  CHECK(ra == LiftState{rat(1, 10), rat(4, 10), {0, 1}});

  LiftState b{rat(1, 10), rat(7, 10), {1, 0}};
  LiftState rb = pet::psi_lift_step(b, alpha, beta);
  CHECK(rb == LiftState{rat(1, 10), rat(5, 10), {0, -1}});

  // alpha = beta = 0: point fixed, direction still permutes
  LiftState c{rat(1, 3), rat(1, 5), {0, 1}};
  LiftState rc = pet::psi_lift_step(c, Scalar(0), Scalar(0));
  CHECK(rc.x == c.x);
  CHECK(rc.y == c.y);
  CHECK(rc.v != c.v);
}

TEST_CASE("exactly one coordinate changes per step") {
  SplitMix64 rng(41);
  Scalar alpha = rat(2, 7), beta = rat(1, 5);
  for (int i = 0; i < 500; ++i) {
    LiftState st = random_state(rng);
    LiftState nx = pet::psi_lift_step(st, alpha, beta);
    bool xc = nx.x != st.x, yc = nx.y != st.y;
    CHECK(xc != yc);
    if (xc) {
      Scalar d = (nx.x - st.x).mod1();
      CHECK((d == alpha || d == Scalar(1) - alpha));
    } else {
      Scalar d = (nx.y - st.y).mod1();
      CHECK((d == beta || d == Scalar(1) - beta));
    }
  }
}

TEST_CASE("lift step is invertible") {
  SplitMix64 rng(43);
  for (int i = 0; i < 10000; ++i) {
    LiftState st = random_state(rng);
    LiftState fwd = pet::psi_lift_step(st, kFixedPoint, rat(1, 5));
    CHECK(pet::psi_lift_inverse(fwd, kFixedPoint, rat(1, 5)) == st);
  }
}

TEST_CASE("quotient step commutes with the double cover projection") {
  SplitMix64 rng(47);
  Scalar alpha = rat(2, 7), beta = rat(3, 11);
  for (int i = 0; i < 1000; ++i) {
    LiftState st = random_state(rng);
    auto lhs = pet::project_to_quotient(pet::psi_lift_step(st, alpha, beta));
    auto rhs = pet::psi_quotient_step(pet::project_to_quotient(st), alpha, beta);
    CHECK(lhs == rhs);
  }
  // projection . lift = quotient . projection at the worked point
  LiftState z{rat(1, 10), rat(2, 10), {1, 0}};
  CHECK(pet::project_to_quotient(pet::psi_lift_step(z, alpha, beta)) ==
        pet::psi_quotient_step(pet::project_to_quotient(z), alpha, beta));
}

TEST_CASE("the eight affine pieces tile the torus measure-exactly") {
  // For each sector s and direction v, the piece A~_s x {v} is two half-size
  // squares; its translated image must tile each target torus copy exactly.
  struct Rect {
    Scalar x0, x1, y0, y1;
    Scalar area() const { return (x1 - x0) * (y1 - y0); }
  };
  auto split_mod1 = [](Scalar x0, Scalar y0, Scalar w, Scalar h) {
    std::vector<Rect> parts;
    x0 = x0.mod1();
    y0 = y0.mod1();
    std::vector<std::pair<Scalar, Scalar>> xs, ys;
    if (x0 + w <= Scalar(1)) {
      xs.push_back({x0, x0 + w});
    } else {
      xs.push_back({x0, Scalar(1)});
      xs.push_back({Scalar(0), x0 + w - Scalar(1)});
    }
    if (y0 + h <= Scalar(1)) {
      ys.push_back({y0, y0 + h});
    } else {
      ys.push_back({y0, Scalar(1)});
      ys.push_back({Scalar(0), y0 + h - Scalar(1)});
    }
    for (auto& xr : xs)
      for (auto& yr : ys) parts.push_back({xr.first, xr.second, yr.first, yr.second});
    return parts;
  };

  for (auto [alpha, beta] : std::vector<std::pair<Scalar, Scalar>>{
           {rat(2, 7), rat(3, 11)}, {kFixedPoint, kFixedPoint}}) {
    for (Direction w : pet::kDirections) {
      std::vector<Rect> images;
      for (int s : {+1, -1}) {
        Direction v{s * w.b, s * w.a};  // the source direction mapping to w under sector s
        Scalar dx = Scalar(v.b * s) * alpha, dy = Scalar(v.a * s) * beta;
        Scalar h = rat(1, 2);
        // A~_s: two half-size squares
        std::vector<std::pair<Scalar, Scalar>> corners =
            s == +1 ? std::vector<std::pair<Scalar, Scalar>>{{Scalar(0), Scalar(0)}, {h, h}}
                    : std::vector<std::pair<Scalar, Scalar>>{{Scalar(0), h}, {h, Scalar(0)}};
        for (auto& c : corners) {
          auto parts = split_mod1(c.first + dx, c.second + dy, h, h);
          images.insert(images.end(), parts.begin(), parts.end());
        }
      }
      Scalar total(0);
      for (const Rect& r : images) total += r.area();
      CHECK(total == Scalar(1));
      for (size_t i = 0; i < images.size(); ++i)
        for (size_t j = i + 1; j < images.size(); ++j) {
          const Rect &p = images[i], &q = images[j];
          bool overlap = std::max(p.x0, q.x0) < std::min(p.x1, q.x1) &&
                         std::max(p.y0, q.y0) < std::min(p.y1, q.y1);
          CHECK_FALSE(overlap);
        }
    }
  }
}

TEST_CASE("first return to Z: immediate returns and odd times") {
  Scalar alpha = rat(1, 5), beta = rat(1, 7);
  SplitMix64 rng(53);
  bool saw_gt1 = false;
  for (int i = 0; i < 500; ++i) {
    LiftState z{alpha + rng.unit_scalar() * (Scalar(1) - Scalar(2) * alpha),
                beta + rng.unit_scalar() * (Scalar(1) - Scalar(2) * beta),
                pet::kDirections[rng.below(4)]};
    auto ret = pet::first_return_to_Z(z, alpha, beta);
    CHECK(ret.time % 2 == 1);
    if (ret.time > 1) saw_gt1 = true;
    if (pet::in_Z(pet::psi_lift_step(z, alpha, beta), alpha, beta)) CHECK(ret.time == 1);
  }
  CHECK(saw_gt1);
}

TEST_CASE("a return time 5 occurs at the fixed-point pair") {
  SplitMix64 rng(59);
  bool saw5 = false;
  for (int i = 0; i < 2000 && !saw5; ++i) {
    Scalar w = Scalar(1) - Scalar(2) * kFixedPoint;
    LiftState z{kFixedPoint + rng.unit_scalar() * w, kFixedPoint + rng.unit_scalar() * w,
                pet::kDirections[rng.below(4)]};
    saw5 = pet::first_return_to_Z(z, kFixedPoint, kFixedPoint).time == 5;
  }
  CHECK(saw5);
}

TEST_CASE("conjugacy dilation examples") {
  CHECK(pet::psi_dilation(rat(2, 10), rat(2, 10)) == Scalar(0));
  CHECK(pet::psi_dilation(rat(5, 10), rat(2, 10)) == rat(1, 2));
  CHECK(pet::psi_dilation(rat(3, 10), rat(3, 10)) == rat(1, 2));
  CHECK(pet::psi_dilation(rat(5, 10), rat(3, 10)) == Scalar(0));
  // v unchanged by phi
  LiftState z{rat(1, 4), rat(1, 4), {0, -1}};
  CHECK(pet::conjugacy_phi(z, rat(1, 5), rat(1, 5)).v == Direction{0, -1});
  CHECK_THROWS_AS(pet::conjugacy_phi(LiftState{rat(1, 10), rat(1, 4), {1, 0}}, rat(1, 5), rat(1, 5)),
                  truchet::scalar_error);
}

TEST_CASE("renormalization identity on five parameter pairs") {
  std::vector<std::pair<Scalar, Scalar>> pairs = {
      {kFixedPoint, kFixedPoint},
      {rat(1, 5), rat(1, 7)},
      {rat(3, 10), rat(2, 5)},
      {kFixedPoint, rat(1, 3)},
      {Scalar::surd(-1, 1, 1, 2), Scalar::surd(-1, 1, 1, 2)},  // sqrt(2)-1, also f-fixed
  };
  std::uint64_t seed = 2026;
  for (auto& [a, b] : pairs) {
    auto rep = pet::verify_renormalization(a, b, 100, seed++);
    CHECK(rep.samples == 100);
    CHECK(rep.mismatches.empty());
  }
}

TEST_CASE("f_step of the parameters matches the conjugated map's parameters") {
  // by definition: the conjugated dynamics runs at (f(alpha), f(beta))
  Scalar alpha = rat(1, 5), beta = rat(1, 7);
  CHECK(truchet::params::f_value(alpha) == rat(1, 3));
  CHECK(truchet::params::f_value(beta) == rat(1, 5));
}

TEST_CASE("detect_period at degenerate and fixed-point parameters") {
  // alpha = beta = 0: directions cycle, point fixed; period divides 4
  SplitMix64 rng(61);
  for (int i = 0; i < 50; ++i) {
    LiftState st = random_state(rng);
    auto rep = pet::detect_period(st, Scalar(0), Scalar(0), 8);
    REQUIRE(rep.status == pet::PeriodReport::Status::periodic);
    CHECK(4 % *rep.period == 0);
  }

  // at the fixed-point pair both period-4 cells and open orbits appear
  bool saw4 = false, sawopen = false;
  for (int i = 0; i < 400 && !(saw4 && sawopen); ++i) {
    LiftState st = random_state(rng);
    auto rep = pet::detect_period(st, kFixedPoint, kFixedPoint, 10000);
    if (rep.status == pet::PeriodReport::Status::periodic && *rep.period == 4) saw4 = true;
    if (rep.status != pet::PeriodReport::Status::periodic) sawopen = true;
  }
  CHECK(saw4);
  CHECK(sawopen);
}

TEST_CASE("monte carlo census: determinism and monotonicity") {
  Scalar alpha = rat(1, 4), beta = rat(1, 3);
  auto r1 = pet::periodic_measure_mc(alpha, beta, 2000, 4, 99, 2);
  auto r2 = pet::periodic_measure_mc(alpha, beta, 2000, 4, 99, 1);
  CHECK(r1.periodic_count == r2.periodic_count);  // worker-count independent
  CHECK(r1.period4_count == r2.period4_count);

  auto r8 = pet::periodic_measure_mc(alpha, beta, 2000, 8, 99, 2);
  auto r40 = pet::periodic_measure_mc(alpha, beta, 2000, 40, 99, 2);
  CHECK(r1.periodic_count <= r8.periodic_count);
  CHECK(r8.periodic_count <= r40.periodic_count);

  // fraction_period4 tends to 0 as parameters tend to 0 (formula limit 4ab)
  auto rsmall = pet::periodic_measure_mc(rat(1, 1000), rat(1, 1000), 2000, 4, 99, 2);
  CHECK(rsmall.fraction_period4 <= 0.01);
}
