#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "truchet/params.hpp"
#include "truchet/scalar.hpp"
#include "truchet/tiling.hpp"

namespace truchet::symb {

using tiling::nuc_error;
using tiling::SeqWindow;
using tiling::window_error;

class collapse_error : public window_error {
 public:
  using window_error::window_error;
};

/// Coding of the rotation by alpha: entry n is +1 iff x + n*alpha mod 1 lies
/// in [0, 1/2).
inline SeqWindow code_rotation(const Scalar& alpha, const Scalar& x) {
  return SeqWindow::rotation(alpha, x);
}

inline bool zero_collapsible(const SeqWindow& s) { return s.kept(0); }

/// Collapsing map: remove every "-+" subword and re-index from the surviving
/// zeroth entry. Produces an explicit window covering [lo, hi].
inline SeqWindow collapse(const SeqWindow& s, long long lo, long long hi) {
  if (!zero_collapsible(s)) throw collapse_error("collapse: sequence is not zero-collapsible");
  std::vector<long long> kept = tiling::kappa_values(s, lo, hi);  // kappa(0) = 0 here
  std::vector<int> vals;
  vals.reserve(kept.size());
  for (long long k : kept) vals.push_back(s.at(k));
  return SeqWindow::explicit_window(std::move(vals), lo);
}

/// Forward and backward first-return times of the shift to the collapsible
/// set: r_+ = min{n > 0 : sigma^n(omega) collapsible}, r_- likewise backward.
inline std::pair<long long, long long> return_times(const SeqWindow& s) {
  if (!zero_collapsible(s)) throw collapse_error("return_times: sequence is not collapsible");
  long long rp = s.next_kept(1, +1);
  long long rm = -s.next_kept(-1, -1);
  return {rp, rm};
}

struct Direction {
  int a, b;
  friend bool operator==(Direction p, Direction q) { return p.a == q.a && p.b == q.b; }
  friend bool operator!=(Direction p, Direction q) { return !(p == q); }
};

inline constexpr std::array<Direction, 4> kDirections{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};

/// State of the skew system Phi on Omega x Omega x N.
struct SymbolicState {
  SeqWindow omega, eta;
  Direction v;
};

/// Phi(omega, eta, (a,b)) = (sigma^{sb} omega, sigma^{sa} eta, (sb, sa)) with
/// s = omega_0 * eta_0.
inline SymbolicState phi_step(const SymbolicState& st) {
  int s = st.omega.at(0) * st.eta.at(0);
  return {st.omega.shifted(s * st.v.b), st.eta.shifted(s * st.v.a),
          Direction{s * st.v.b, s * st.v.a}};
}

inline SymbolicState phi_step_back(const SymbolicState& st) {
  // the forward step shifted omega by the first and eta by the second
  // component of the resulting direction
  SeqWindow om = st.omega.shifted(-st.v.a);
  SeqWindow et = st.eta.shifted(-st.v.b);
  int s = om.at(0) * et.at(0);
  return {std::move(om), std::move(et), Direction{s * st.v.b, s * st.v.a}};
}

inline bool in_R1(const SymbolicState& st) {
  return zero_collapsible(st.omega) && zero_collapsible(st.eta);
}

/// Renormalization rho(omega, eta, v) = (c(omega), c(eta), v) on R_1. The
/// output windows cover [lo, hi].
inline SymbolicState rho(const SymbolicState& st, long long lo, long long hi) {
  if (!zero_collapsible(st.omega)) throw collapse_error("rho: omega is not collapsible at 0");
  if (!zero_collapsible(st.eta)) throw collapse_error("rho: eta is not collapsible at 0");
  return {collapse(st.omega, lo, hi), collapse(st.eta, lo, hi), st.v};
}

/// Dilation psi_alpha on [alpha, 1-alpha), duplicated here to keep the
/// symbolic module self-contained.
inline Scalar psi_dilation(const Scalar& x, const Scalar& alpha) {
  Scalar stretch = Scalar(1) - Scalar(2) * alpha;
  GReduction red = reduce_mod_G(alpha / stretch);
  static const Scalar h(BigInt(1), BigInt(2));
  if (red.orientation > 0) return ((x - h) / stretch + h).mod1();
  return ((h - x) / stretch).mod1();
}

/// Rotation-route rho: for rotation-coded states, collapsing is parameter
/// renormalization: c(sigma-code(alpha, x)) = code(f(alpha), psi_alpha(x)).
inline SymbolicState rho_rotation(const SymbolicState& st) {
  if (!st.omega.is_rotation() || !st.eta.is_rotation())
    throw collapse_error("rho_rotation: both coordinates must be rotation-coded");
  if (!in_R1(st)) throw collapse_error("rho_rotation: state not in R_1");
  auto renorm = [](const SeqWindow& s) {
    Scalar alpha = s.alpha();
    Scalar x = (s.base() + Scalar(s.offset()) * alpha).mod1();
    return SeqWindow::rotation(params::f_value(alpha), psi_dilation(x, alpha));
  };
  return {renorm(st.omega), renorm(st.eta), st.v};
}

struct R1Return {
  SymbolicState state;
  long long time;
};

/// First return of Phi to R_1; checks the return-time law
/// R_1 = 2 r_{+-}(coordinate picked by w) - 1 along the way.
inline R1Return first_return_R1(const SymbolicState& st, long long cap = 1 << 20) {
  if (!in_R1(st)) throw collapse_error("first_return_R1: state not in R_1");
  int s = st.omega.at(0) * st.eta.at(0);
  Direction w{s * st.v.b, s * st.v.a};
  long long expected;
  if (w == Direction{1, 0})
    expected = 2 * return_times(st.omega).first - 1;
  else if (w == Direction{-1, 0})
    expected = 2 * return_times(st.omega).second - 1;
  else if (w == Direction{0, 1})
    expected = 2 * return_times(st.eta).first - 1;
  else
    expected = 2 * return_times(st.eta).second - 1;

  SymbolicState cur = phi_step(st);
  long long time = 1;
  while (!in_R1(cur)) {
    if (++time > cap) throw nuc_error("first_return_R1: cap exceeded");
    cur = phi_step(cur);
  }
  if (time != expected)
    throw std::logic_error("first_return_R1: return time disagrees with the r+- formula");
  return {cur, time};
}

/// Step classes 1..6 from the direction/sign-pair chart: w = (sb, sa) picks
/// horizontal/vertical and which adjacent sign pair is read.
enum class StepClass : int {
  minus_plus_horizontal = 1,
  plus_minus_horizontal = 2,
  matching_horizontal = 3,
  minus_plus_vertical = 4,
  plus_minus_vertical = 5,
  matching_vertical = 6,
};

inline StepClass step_class(const SymbolicState& st) {
  int s = st.omega.at(0) * st.eta.at(0);
  Direction w{s * st.v.b, s * st.v.a};
  int first, second;
  bool horizontal = w.b == 0;
  if (w == Direction{1, 0}) {
    first = st.omega.at(0);
    second = st.omega.at(1);
  } else if (w == Direction{-1, 0}) {
    first = st.omega.at(-1);
    second = st.omega.at(0);
  } else if (w == Direction{0, 1}) {
    first = st.eta.at(0);
    second = st.eta.at(1);
  } else {
    first = st.eta.at(-1);
    second = st.eta.at(0);
  }
  int base = horizontal ? 0 : 3;
  if (first == -1 && second == +1) return static_cast<StepClass>(base + 1);
  if (first == +1 && second == -1) return static_cast<StepClass>(base + 2);
  return static_cast<StepClass>(base + 3);
}

struct StabilityReport {
  enum class Status { stable_periodic, periodic_not_stable, open_within_bound };
  Status status = Status::open_within_bound;
  std::optional<long long> period;
};

/// Stable-periodicity classification via the tiling curve through the origin
/// square: the orbit is stably periodic iff that curve is closed, and then
/// the period is the curve length. A periodic Phi-orbit with a non-closed
/// curve requires a shift-periodic coordinate, certifiable only for explicit
/// periodic backends.
inline StabilityReport stable_classification(const SymbolicState& st, long long period_cap) {
  tiling::Tiling t{st.omega, st.eta};
  auto trace = tiling::trace_curve(t, {0, 0}, {st.v.a, st.v.b}, period_cap);
  if (trace.kind == tiling::CurveTrace::Kind::closed)
    return {StabilityReport::Status::stable_periodic, trace.length};

  if (st.omega.is_periodic() || st.eta.is_periodic()) {
    tiling::CurveState cur{{0, 0}, {st.v.a, st.v.b}};
    for (long long k = 1; k <= period_cap; ++k) {
      cur = tiling::curve_follow(t, cur);
      if (cur.v != tiling::CurveDir{st.v.a, st.v.b}) continue;
      bool om_ok = st.omega.is_periodic() ? cur.site.m % st.omega.period() == 0 : cur.site.m == 0;
      bool et_ok = st.eta.is_periodic() ? cur.site.n % st.eta.period() == 0 : cur.site.n == 0;
      if (om_ok && et_ok) return {StabilityReport::Status::periodic_not_stable, k};
    }
  }
  return {StabilityReport::Status::open_within_bound, std::nullopt};
}

}  // namespace truchet::symb
