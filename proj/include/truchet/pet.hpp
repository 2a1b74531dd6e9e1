#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "truchet/params.hpp"
#include "truchet/rng.hpp"
#include "truchet/scalar.hpp"

namespace truchet::pet {

class cap_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One of the four inward edge normals (1,0), (-1,0), (0,1), (0,-1).
struct Direction {
  int a, b;
  friend bool operator==(Direction p, Direction q) { return p.a == q.a && p.b == q.b; }
  friend bool operator!=(Direction p, Direction q) { return !(p == q); }
};

inline constexpr std::array<Direction, 4> kDirections{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};

/// Point of the unit-square torus plus a direction: the state space of the
/// lifted rectangle exchange.
struct LiftState {
  Scalar x, y;
  Direction v;
  friend bool operator==(const LiftState& p, const LiftState& q) {
    return p.v == q.v && p.x == q.x && p.y == q.y;
  }
  friend bool operator!=(const LiftState& p, const LiftState& q) { return !(p == q); }
};

inline const Scalar& half() { return params::half(); }

/// Sector of the lifted partition: +1 when x and y lie in the same half of
/// the circle (the lift of A_1 through the index-two cover), -1 otherwise.
inline int sector(const Scalar& x, const Scalar& y) {
  return ((x < half()) == (y < half())) ? +1 : -1;
}

inline LiftState psi_lift_step(const LiftState& st, const Scalar& alpha, const Scalar& beta) {
  int s = sector(st.x, st.y);
  const auto [a, b] = st.v;
  return {(st.x + Scalar(b * s) * alpha).mod1(), (st.y + Scalar(a * s) * beta).mod1(),
          Direction{b * s, a * s}};
}

inline LiftState psi_lift_inverse(const LiftState& st, const Scalar& alpha, const Scalar& beta) {
  const auto [a1, b1] = st.v;
  for (int s : {+1, -1}) {
    Direction v{s * b1, s * a1};
    LiftState cand{(st.x - Scalar(v.b * s) * alpha).mod1(), (st.y - Scalar(v.a * s) * beta).mod1(), v};
    if (sector(cand.x, cand.y) == s) return cand;
  }
  throw scalar_error("psi_lift_inverse: no preimage sector matched");
}

/// State on the quotient torus Y = R^2 / Lambda; the fundamental domain used
/// is A_1 u A_{-1} = [0,1/2) x [0,1).
struct QuotientState {
  Scalar x, y;
  Direction v;
  friend bool operator==(const QuotientState& p, const QuotientState& q) {
    return p.v == q.v && p.x == q.x && p.y == q.y;
  }
};

inline QuotientState reduce_mod_lambda(Scalar x, Scalar y, Direction v) {
  x = x.mod1();
  y = y.mod1();
  if (x >= half()) {
    x -= half();
    y = (y + half()).mod1();
  }
  return {x, y, v};
}

inline QuotientState project_to_quotient(const LiftState& st) {
  return reduce_mod_lambda(st.x, st.y, st.v);
}

inline QuotientState psi_quotient_step(const QuotientState& st, const Scalar& alpha,
                                       const Scalar& beta) {
  int s = (st.y < half()) ? +1 : -1;  // A_1 vs A_{-1} directly
  const auto [a, b] = st.v;
  return reduce_mod_lambda(st.x + Scalar(b * s) * alpha, st.y + Scalar(a * s) * beta,
                           Direction{b * s, a * s});
}

/// Return rectangle Z = [alpha, 1-alpha) x [beta, 1-beta).
inline bool in_Z(const LiftState& st, const Scalar& alpha, const Scalar& beta) {
  return st.x >= alpha && st.x < Scalar(1) - alpha && st.y >= beta && st.y < Scalar(1) - beta;
}

struct ReturnResult {
  LiftState state;
  long long time;
};

inline ReturnResult first_return_to_Z(const LiftState& st, const Scalar& alpha, const Scalar& beta,
                                      long long step_cap = 1 << 20) {
  if (!in_Z(st, alpha, beta)) throw scalar_error("first_return_to_Z: state outside Z x N");
  LiftState cur = st;
  for (long long t = 1; t <= step_cap; ++t) {
    cur = psi_lift_step(cur, alpha, beta);
    if (in_Z(cur, alpha, beta)) return {cur, t};
  }
  throw cap_error("first_return_to_Z: open within bound");
}

/// The dilation carrying [t, 1-t) onto R/Z; orientation matches the group
/// element moving t/(1-2t) into the fundamental domain.
inline Scalar psi_dilation(const Scalar& x, const Scalar& t) {
  Scalar stretch = Scalar(1) - Scalar(2) * t;
  GReduction red = reduce_mod_G(t / stretch);
  if (red.orientation > 0) return ((x - half()) / stretch + half()).mod1();
  return ((half() - x) / stretch).mod1();
}

/// Affine conjugacy phi(x, y, v) = (psi_alpha(x), psi_beta(y), v) on Z x N.
inline LiftState conjugacy_phi(const LiftState& st, const Scalar& alpha, const Scalar& beta) {
  if (!in_Z(st, alpha, beta)) throw scalar_error("conjugacy_phi: state outside Z x N");
  return {psi_dilation(st.x, alpha), psi_dilation(st.y, beta), st.v};
}

struct RenormReport {
  long long samples = 0;
  long long boundary_redraws = 0;
  std::vector<LiftState> mismatches;
  std::uint64_t seed = 0;
};

namespace detail {

inline bool on_piece_boundary(const Scalar& c) {
  return c == Scalar(0) || c == half();
}

inline bool orbit_touches_boundary(LiftState st, const Scalar& alpha, const Scalar& beta,
                                   long long steps) {
  for (long long i = 0; i <= steps; ++i) {
    if (on_piece_boundary(st.x) || on_piece_boundary(st.y)) return true;
    st = psi_lift_step(st, alpha, beta);
  }
  return false;
}

}  // namespace detail

/// Samples states of Z x N and checks phi . return map == lifted map at the
/// renormalized parameters . phi, exactly. Samples whose orbit or image
/// touches the discontinuity set are re-drawn and counted.
inline RenormReport verify_renormalization(const Scalar& alpha, const Scalar& beta,
                                           long long sample_count, std::uint64_t seed) {
  RenormReport report;
  report.seed = seed;
  Scalar fa = params::f_value(alpha), fb = params::f_value(beta);
  SplitMix64 root(seed);
  std::uint64_t draw = 0;
  Scalar wx = Scalar(1) - Scalar(2) * alpha, wy = Scalar(1) - Scalar(2) * beta;
  while (report.samples < sample_count) {
    SplitMix64 rng = root.split(draw++);
    LiftState z{alpha + rng.unit_scalar() * wx, beta + rng.unit_scalar() * wy,
                kDirections[rng.below(4)]};
    ReturnResult ret = first_return_to_Z(z, alpha, beta);
    LiftState lhs = conjugacy_phi(ret.state, alpha, beta);
    LiftState rhs = psi_lift_step(conjugacy_phi(z, alpha, beta), fa, fb);
    if (lhs != rhs) {
      bool boundary = detail::orbit_touches_boundary(z, alpha, beta, ret.time) ||
                      detail::on_piece_boundary(lhs.x) || detail::on_piece_boundary(lhs.y) ||
                      detail::on_piece_boundary(rhs.x) || detail::on_piece_boundary(rhs.y);
      if (boundary) {
        ++report.boundary_redraws;
        continue;
      }
      report.mismatches.push_back(z);
    }
    ++report.samples;
  }
  return report;
}

struct PeriodReport {
  enum class Status { periodic, open_within_bound, boundary_hit };
  Status status = Status::open_within_bound;
  std::optional<long long> period;
  long long steps_used = 0;
  bool touched_boundary = false;
};

/// Minimal exact period within max_steps. States are compared exactly; a
/// piecewise isometry returns exactly or not at all.
inline PeriodReport detect_period(const LiftState& st, const Scalar& alpha, const Scalar& beta,
                                  long long max_steps) {
  PeriodReport rep;
  LiftState cur = st;
  for (long long n = 1; n <= max_steps; ++n) {
    rep.touched_boundary = rep.touched_boundary || detail::on_piece_boundary(cur.x) ||
                           detail::on_piece_boundary(cur.y);
    cur = psi_lift_step(cur, alpha, beta);
    rep.steps_used = n;
    if (cur == st) {
      rep.status = PeriodReport::Status::periodic;
      rep.period = n;
      return rep;
    }
  }
  rep.status = rep.touched_boundary ? PeriodReport::Status::boundary_hit
                                    : PeriodReport::Status::open_within_bound;
  return rep;
}

struct McReport {
  long long samples = 0;
  long long max_period = 0;
  long long periodic_count = 0;
  long long period4_count = 0;
  double fraction_periodic = 0, fraction_period4 = 0;
  double stderr_periodic = 0, stderr_period4 = 0;
  std::uint64_t seed = 0;
};

/// Monte Carlo orbit census over uniform i.i.d. samples of the lifted torus
/// times N. Sample i derives its generator from (seed, i), so the result is
/// independent of the worker partition.
inline McReport periodic_measure_mc(const Scalar& alpha, const Scalar& beta, long long samples,
                                    long long max_period, std::uint64_t seed, int workers = 0) {
  if (samples < 1) throw scalar_error("periodic_measure_mc: samples must be >= 1");
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  SplitMix64 root(seed);

  std::vector<long long> periodic(workers, 0), p4(workers, 0);
  auto run_chunk = [&](int w) {
    long long lo = samples * w / workers, hi = samples * (w + 1) / workers;
    for (long long i = lo; i < hi; ++i) {
      SplitMix64 rng = root.split(static_cast<std::uint64_t>(i));
      LiftState st{rng.unit_scalar(), rng.unit_scalar(), kDirections[rng.below(4)]};
      PeriodReport rep = detect_period(st, alpha, beta, max_period);
      if (rep.status == PeriodReport::Status::periodic) {
        ++periodic[w];
        if (*rep.period == 4) ++p4[w];
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(run_chunk, w);
  run_chunk(0);
  for (auto& th : pool) th.join();

  McReport rep;
  rep.samples = samples;
  rep.max_period = max_period;
  rep.seed = seed;
  for (int w = 0; w < workers; ++w) {
    rep.periodic_count += periodic[w];
    rep.period4_count += p4[w];
  }
  auto frac = [&](long long c) { return static_cast<double>(c) / static_cast<double>(samples); };
  auto se = [&](double p) { return std::sqrt(p * (1 - p) / static_cast<double>(samples)); };
  rep.fraction_periodic = frac(rep.periodic_count);
  rep.fraction_period4 = frac(rep.period4_count);
  rep.stderr_periodic = se(rep.fraction_periodic);
  rep.stderr_period4 = se(rep.fraction_period4);
  return rep;
}

}  // namespace truchet::pet
