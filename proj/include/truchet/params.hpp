#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "truchet/scalar.hpp"

namespace truchet::params {

/// The parameter map f(t) = t/(1-2t) reduced mod G acts on [0, 1/2).
/// Branches are labelled by the alphabet A = {(n, r) : n >= 0, (n, r) != (0, -1)};
/// f restricted to the interval I_{n,r} is a bijection onto [0, 1/2] and
/// f(t) = r*(t/(1-2t) - n) there.
struct Branch {
  BigInt n;
  int r;

  Branch(BigInt n_, int r_) : n(std::move(n_)), r(r_) {
    if (n < 0 || (n == 0 && r == -1) || (r != 1 && r != -1))
      throw scalar_error("Branch: not in the branch alphabet");
  }
  friend bool operator==(const Branch& a, const Branch& b) { return a.n == b.n && a.r == b.r; }
};

struct Itinerary {
  std::vector<Branch> branches;
  bool boundary = false;        // orbit reached 1/2; coding truncated here
  bool tail_zero = false;       // eventually-(0,1): all-zero tail, codes the orbit of 0

  /// Comma-separated "(n,r)" pairs.
  std::string str() const {
    std::string s;
    for (size_t i = 0; i < branches.size(); ++i) {
      if (i) s += ",";
      s += "(" + branches[i].n.str() + "," + std::to_string(branches[i].r) + ")";
    }
    return s;
  }
};

struct ParamPair {
  Scalar alpha, beta;
  std::optional<Itinerary> alpha_itinerary, beta_itinerary;
};

inline const Scalar& half() {
  static const Scalar h(BigInt(1), BigInt(2));
  return h;
}

/// One application of f. Requires t in [0, 1/2); the branch reports which
/// I_{n,r} contained t, with ties at interval endpoints resolved toward r = +1.
inline std::pair<Scalar, Branch> f_step(const Scalar& t) {
  if (t.sign() < 0 || t >= half()) throw scalar_error("f_step: boundary reached");
  Scalar u = t / (Scalar(1) - Scalar(2) * t);
  GReduction red = reduce_mod_G(u);
  return {red.reduced, Branch(red.integer_part, red.orientation)};
}

inline Scalar f_value(const Scalar& t) { return f_step(t).first; }

/// Inverse branch g_{n,r}(x) = (r x + n) / (1 + 2 (r x + n)), the inverse of
/// f restricted to I_{n,r}.
inline Scalar branch_inverse(const Branch& b, const Scalar& x) {
  Scalar u = Scalar(b.r) * x + Scalar(b.n);
  return u / (Scalar(1) + Scalar(2) * u);
}

/// Branch coding of the f-orbit of t, depth entries unless the orbit hits 1/2
/// first (then the itinerary is truncated and flagged).
inline Itinerary itinerary_of(const Scalar& t, long long depth) {
  if (depth < 1) throw scalar_error("itinerary_of: depth must be >= 1");
  if (t.sign() < 0 || t >= half()) throw scalar_error("itinerary_of: t outside [0,1/2)");
  Itinerary it;
  Scalar v = t;
  for (long long k = 0; k < depth; ++k) {
    if (v == half()) {
      it.boundary = true;
      break;
    }
    auto [next, b] = f_step(v);
    it.branches.push_back(b);
    v = next;
  }
  return it;
}

struct Enclosure {
  Scalar lo, hi;   // exact rational endpoints, closed interval
  Scalar midpoint() const { return (lo + hi) / Scalar(2); }
  Scalar width() const { return hi - lo; }
};

/// Nested-interval reconstruction: the image of [0,1/2] under the composition
/// of the branch inverses. The coded parameter lies in the returned interval;
/// with the eventually-(0,1) flag the itinerary codes an exact point.
inline Enclosure param_from_itinerary(const Itinerary& it) {
  if (it.branches.empty()) throw scalar_error("param_from_itinerary: empty itinerary");
  Scalar lo(0), hi = it.tail_zero ? Scalar(0) : half();
  for (auto b = it.branches.rbegin(); b != it.branches.rend(); ++b) {
    Scalar p = branch_inverse(*b, lo), q = branch_inverse(*b, hi);
    if (p <= q) {
      lo = p;
      hi = q;
    } else {
      lo = q;
      hi = p;
    }
  }
  return {lo, hi};
}

/// Number of f-applications until the reduced fraction p/q reaches {0, 1/2}.
/// The denominator of f(p/q) is q-2p, so this terminates within q/2 steps.
inline long long rational_termination(const BigInt& p, const BigInt& q) {
  Scalar v(p, q);
  if (v.sign() < 0 || v >= half()) throw scalar_error("rational_termination: p/q outside [0,1/2)");
  long long steps = 0;
  while (v != Scalar(0) && v != half()) {
    v = f_value(v);
    ++steps;
  }
  return steps;
}

/// Parameter boxes of the special block itineraries: if (alpha, beta) has a
/// k-upward itinerary then alpha in [1/(3+2k), 3/(8+6k)] and
/// beta in [1/3, (3+2k)/(8+6k)]; the k-rightward box swaps coordinates.
struct Box {
  Scalar alpha_lo, alpha_hi, beta_lo, beta_hi;
};

inline Box upward_box(const BigInt& k) {
  return {Scalar(BigInt(1), 3 + 2 * k), Scalar(BigInt(3), 8 + 6 * k), Scalar(BigInt(1), BigInt(3)),
          Scalar(3 + 2 * k, 8 + 6 * k)};
}

inline Box rightward_box(const BigInt& k) {
  Box b = upward_box(k);
  return {b.beta_lo, b.beta_hi, b.alpha_lo, b.alpha_hi};
}

struct BlockQuad {
  BigInt m;
  int r;
  BigInt n;
  int s;
};

/// Quads of the k-upward block: (0,1,1,1), then k-1 copies of (0,1,0,1),
/// then (1,1,0,1). The rightward block swaps the roles of (m,r) and (n,s).
inline std::vector<BlockQuad> block_quads(const BigInt& k, bool upward) {
  if (k < 1) throw scalar_error("block_quads: k must be >= 1");
  std::vector<BlockQuad> quads;
  long long kk = k.convert_to<long long>();
  for (long long i = 0; i <= kk; ++i) {
    BigInt m = 0, n = 0;
    if (i == 0) (upward ? n : m) = 1;
    if (i == kk) (upward ? m : n) = 1;
    quads.push_back({m, 1, n, 1});
  }
  return quads;
}

struct UnderstandablePair {
  Itinerary alpha, beta;
  std::vector<long long> marks;  // a_0 = 0, a_{j+1} = a_j + k_j + 1
};

/// The understandable itinerary for a k-schedule: block j is k_j-upward for
/// even j and k_j-rightward for odd j, concatenated at the shift marks a_j.
/// The coded pair is irrational (no eventually-(0,1) tail).
inline UnderstandablePair understandable_itinerary(const std::vector<BigInt>& k_schedule) {
  if (k_schedule.empty()) throw scalar_error("understandable_itinerary: empty schedule");
  UnderstandablePair out;
  out.marks.push_back(0);
  for (size_t j = 0; j < k_schedule.size(); ++j) {
    for (const BlockQuad& q : block_quads(k_schedule[j], j % 2 == 0)) {
      out.alpha.branches.emplace_back(q.m, q.r);
      out.beta.branches.emplace_back(q.n, q.s);
    }
    out.marks.push_back(out.marks.back() + k_schedule[j].convert_to<long long>() + 1);
  }
  return out;
}

/// Density of the f-invariant measure m(A) = int_A 1/x + 1/(1-x) dx.
inline Scalar invariant_density(const Scalar& x) {
  if (x.sign() <= 0 || x >= Scalar(1)) throw scalar_error("invariant_density: x outside (0,1)");
  return Scalar(1) / x + Scalar(1) / (Scalar(1) - x);
}

/// log of n/d for arbitrarily large positive operands.
inline double log_ratio(const BigInt& n, const BigInt& d) {
  if (n <= 0 || d <= 0) throw scalar_error("log_ratio: operands must be positive");
  long bn = static_cast<long>(boost::multiprecision::msb(n));
  long bd = static_cast<long>(boost::multiprecision::msb(d));
  // n = n' * 2^(bn-64) with n' in [2^63, 2^65): take top bits, exact shift count
  auto top = [](const BigInt& v, long bits) {
    long shift = bits - 127;
    BigInt t = shift > 0 ? BigInt(v >> shift) : BigInt(v << (-shift));
    return t.convert_to<double>();
  };
  constexpr double ln2 = 0.6931471805599453;
  return std::log(top(n, bn)) - std::log(top(d, bd)) + ln2 * static_cast<double>(bn - bd);
}

/// m-measure of [a, b] inside (0,1) via the antiderivative log(x/(1-x)),
/// returned as the exact cross ratio b(1-a) / (a(1-b)); the measure is its log.
inline Scalar measure_cross_ratio(const Scalar& a, const Scalar& b) {
  return (b * (Scalar(1) - a)) / (a * (Scalar(1) - b));
}

struct PushforwardDefect {
  Scalar ratio;       // exact: cross ratio of [a,b] divided by the branch-image product
  double defect;      // |log ratio|
  double tail_bound;  // analytic bound for the truncated telescoping tails
};

/// Compares m([a,b]) with the sum of m(g_{n,r}([a,b])) over branches with
/// n <= cutoff. The two branch families telescope to log(b/a) and
/// log((1-a)/(1-b)), so the defect is exactly the truncated tail.
inline PushforwardDefect pushforward_defect(const Scalar& a, const Scalar& b, long long cutoff) {
  if (a.sign() <= 0 || b < a || b >= half()) throw scalar_error("pushforward_defect: need 0 < a <= b < 1/2");
  if (a == b) return {Scalar(1), 0.0, 0.0};
  Scalar total = measure_cross_ratio(a, b);
  Scalar prod(1);
  for (long long n = 0; n <= cutoff; ++n) {
    Scalar ga = branch_inverse(Branch(BigInt(n), 1), a), gb = branch_inverse(Branch(BigInt(n), 1), b);
    prod *= measure_cross_ratio(ga, gb);
    if (n >= 1) {
      Scalar ha = branch_inverse(Branch(BigInt(n), -1), a), hb = branch_inverse(Branch(BigInt(n), -1), b);
      prod *= measure_cross_ratio(hb, ha);  // g_{n,-1} is decreasing
    }
  }
  Scalar ratio = total / prod;  // positive: cross ratios of points in (0,1)
  double defect = std::abs(log_ratio(ratio.num(), ratio.den()));
  // tails: log((b+N+1)/(a+N+1)) + log((N+1-a)/(N+1-b)) <= (b-a)/(a+N+1) + (b-a)/(N+1-b)
  double w = (b - a).to_double();
  double N1 = static_cast<double>(cutoff) + 1.0;
  double tail = w / (a.to_double() + N1) + w / (N1 - b.to_double());
  return {ratio, defect, tail};
}

/// Upper bound 2 log((1-e)/(1-3e)) log((1-e)/e) for the (m x m)-measure of the
/// plug P_e; evaluated in extended precision, for reporting only.
inline double plug_measure(const Scalar& eps) {
  static const Scalar quarter(BigInt(1), BigInt(4));
  if (eps.sign() <= 0 || eps >= quarter) throw scalar_error("plug_measure: eps outside (0,1/4)");
  using F = boost::multiprecision::cpp_bin_float_50;
  F e(eps.num().convert_to<F>() / eps.den().convert_to<F>());
  F v = 2 * log((1 - e) / (1 - 3 * e)) * log((1 - e) / e);
  return v.convert_to<double>();
}

}  // namespace truchet::params
