#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "truchet/params.hpp"
#include "truchet/scalar.hpp"

namespace truchet::cocycle {

template <int N>
struct IMat {
  std::array<BigInt, N * N> e{};

  static IMat identity() {
    IMat m;
    for (int i = 0; i < N; ++i) m.at(i, i) = 1;
    return m;
  }
  BigInt& at(int r, int c) { return e[static_cast<size_t>(r * N + c)]; }
  const BigInt& at(int r, int c) const { return e[static_cast<size_t>(r * N + c)]; }

  friend IMat operator*(const IMat& a, const IMat& b) {
    IMat m;
    for (int i = 0; i < N; ++i)
      for (int k = 0; k < N; ++k) {
        const BigInt& aik = a.at(i, k);
        if (aik == 0) continue;
        for (int j = 0; j < N; ++j) m.at(i, j) += aik * b.at(k, j);
      }
    return m;
  }
  friend bool operator==(const IMat& a, const IMat& b) { return a.e == b.e; }

  IMat transposed() const {
    IMat m;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) m.at(j, i) = at(i, j);
    return m;
  }

  /// Exact determinant (fraction-free Gaussian elimination).
  BigInt det() const {
    std::array<Scalar, N * N> w;
    for (int i = 0; i < N * N; ++i) w[static_cast<size_t>(i)] = Scalar(e[static_cast<size_t>(i)]);
    auto wat = [&](int r, int c) -> Scalar& { return w[static_cast<size_t>(r * N + c)]; };
    Scalar det(1);
    for (int col = 0; col < N; ++col) {
      int pivot = -1;
      for (int r = col; r < N; ++r)
        if (wat(r, col) != Scalar(0)) {
          pivot = r;
          break;
        }
      if (pivot < 0) return 0;
      if (pivot != col) {
        for (int c = 0; c < N; ++c) std::swap(wat(pivot, c), wat(col, c));
        det = -det;
      }
      det *= wat(col, col);
      for (int r = col + 1; r < N; ++r) {
        Scalar factor = wat(r, col) / wat(col, col);
        for (int c = col; c < N; ++c) wat(r, c) -= factor * wat(col, c);
      }
    }
    return det.num();  // exact integer for integer input
  }
};

using Mat4 = IMat<4>;
using Mat6 = IMat<6>;

template <int N>
using Vec = std::array<Scalar, N>;
using Vec4 = Vec<4>;
using Vec6 = Vec<6>;

template <int N>
inline Vec<N> mat_vec(const IMat<N>& m, const Vec<N>& v) {
  Vec<N> out;
  for (int i = 0; i < N; ++i) {
    Scalar acc(0);
    for (int j = 0; j < N; ++j) acc += Scalar(m.at(i, j)) * v[static_cast<size_t>(j)];
    out[static_cast<size_t>(i)] = acc;
  }
  return out;
}

template <int N>
inline Scalar dot(const Vec<N>& a, const Vec<N>& b) {
  Scalar acc(0);
  for (int i = 0; i < N; ++i) acc += a[static_cast<size_t>(i)] * b[static_cast<size_t>(i)];
  return acc;
}

template <int N>
inline Vec<N> ones() {
  Vec<N> v;
  v.fill(Scalar(1));
  return v;
}

/// The branch quadruple of a parameter pair: f(alpha) = r(alpha/(1-2a) - m),
/// f(beta) = s(beta/(1-2b) - n).
struct BranchQuad {
  BigInt m;
  int r;
  BigInt n;
  int s;
  friend bool operator==(const BranchQuad& a, const BranchQuad& b) {
    return a.m == b.m && a.r == b.r && a.n == b.n && a.s == b.s;
  }
};

inline BranchQuad branch_quad(const Scalar& alpha, const Scalar& beta) {
  if (alpha.sign() <= 0 || alpha >= params::half() || beta.sign() <= 0 || beta >= params::half())
    throw scalar_error("branch_quad: parameters must lie in (0, 1/2)");
  params::Branch ba = params::f_step(alpha).second;
  params::Branch bb = params::f_step(beta).second;
  return {ba.n, ba.r, bb.n, bb.r};
}

/// 4x4 return-time cocycle factor; determinant rs.
inline Mat4 n_matrix(const BranchQuad& q) {
  Mat4 N;
  BigInt m2 = 2 * q.m, n2 = 2 * q.n;
  N.at(0, 0) = m2 + q.r;
  N.at(0, 1) = 1;
  N.at(0, 3) = m2 + q.r;
  N.at(1, 0) = m2;
  N.at(1, 1) = 1;
  N.at(1, 3) = m2;
  N.at(2, 1) = n2 + q.s;
  N.at(2, 2) = n2 + q.s;
  N.at(2, 3) = 1;
  N.at(3, 1) = n2;
  N.at(3, 2) = n2;
  N.at(3, 3) = 1;
  return N;
}

/// 6x6 step-class cocycle factor; nonnegative entries, determinant rs.
inline Mat6 m_matrix(const BranchQuad& q) {
  Mat6 M;
  BigInt m = q.m, n = q.n;
  BigInt rp = (q.r + 1) / 2, rm = (q.r - 1) / 2;  // (r+1)/2, (r-1)/2
  BigInt sp = (q.s + 1) / 2, sm = (q.s - 1) / 2;
  M.at(0, 0) = m + rp;
  M.at(0, 1) = m + rm;
  M.at(0, 2) = 2;
  M.at(0, 5) = 2 * m + 1 + q.r;
  M.at(1, 0) = m + rm;
  M.at(1, 1) = m + rp;
  M.at(1, 5) = 2 * m - 1 + q.r;
  M.at(2, 0) = m;
  M.at(2, 1) = m;
  M.at(2, 2) = 1;
  M.at(2, 5) = 2 * m;
  M.at(3, 2) = 2 * n + 1 + q.s;
  M.at(3, 3) = n + sp;
  M.at(3, 4) = n + sm;
  M.at(3, 5) = 2;
  M.at(4, 2) = 2 * n - 1 + q.s;
  M.at(4, 3) = n + sm;
  M.at(4, 4) = n + sp;
  M.at(5, 2) = 2 * n;
  M.at(5, 3) = n;
  M.at(5, 4) = n;
  M.at(5, 5) = 1;
  return M;
}

/// Step-class census matrix for a return time 4k+1: row j counts the classes
/// seen along the return orbit of a state whose collapse has class j.
inline Mat6 k_matrix(const BigInt& k) {
  Mat6 K;
  auto row = [&](int j, BigInt a, BigInt b, BigInt c, BigInt d, BigInt e, BigInt f) {
    K.at(j, 0) = a;
    K.at(j, 1) = b;
    K.at(j, 2) = c;
    K.at(j, 3) = d;
    K.at(j, 4) = e;
    K.at(j, 5) = f;
  };
  row(0, k, k - 1, 2, 0, 0, 2 * k);
  row(1, k, k + 1, 0, 0, 0, 2 * k);
  row(2, k, k, 1, 0, 0, 2 * k);
  row(3, 0, 0, 2 * k, k, k - 1, 2);
  row(4, 0, 0, 2 * k, k, k + 1, 0);
  row(5, 0, 0, 2 * k, k, k, 1);
  return K;
}

/// pi(a,b,c,d,e,f) = (a+b, c, d+e, f) and its section s with pi . s = id.
inline Vec4 pi_project(const Vec6& v) {
  return {v[0] + v[1], v[2], v[3] + v[4], v[5]};
}

inline Vec6 s_section(const Vec4& v) {
  Scalar h(BigInt(1), BigInt(2));
  return {v[0] * h, v[0] * h, v[1], v[2] * h, v[2] * h, v[3]};
}

struct MeasureVectors {
  Vec6 m6;  // nu(S_i)
  Vec6 q6;  // nu(O_1 n S_i)
  Vec4 n4;  // pi(q6)
};

inline MeasureVectors measure_vectors(const Scalar& alpha, const Scalar& beta) {
  Scalar h(BigInt(1), BigInt(2));
  Scalar oneMinus2a = Scalar(1) - Scalar(2) * alpha, oneMinus2b = Scalar(1) - Scalar(2) * beta;
  MeasureVectors v;
  v.m6 = {alpha * h, alpha * h, oneMinus2a * h, beta * h, beta * h, oneMinus2b * h};
  v.q6 = {alpha * oneMinus2b * h, alpha * oneMinus2b * h, oneMinus2a * h,
          beta * oneMinus2a * h, beta * oneMinus2a * h, oneMinus2b * h};
  v.n4 = pi_project(v.q6);
  return v;
}

inline Vec4 n_vector(const Scalar& alpha, const Scalar& beta) {
  return measure_vectors(alpha, beta).n4;
}

/// One step of the renormalization orbit of (alpha_k, beta_k) with the
/// accumulated cocycle data and the measure nu(O_{k+1}) = d_k n_k . N_k 1.
struct CocycleState {
  long long k = 0;
  Scalar alpha_k, beta_k;
  Mat4 N_k;
  Scalar d_k;
  Scalar nu_O_kplus1;
};

struct Accumulation {
  std::vector<CocycleState> states;
  std::optional<long long> boundary_at;  // orbit reached 1/2 before the requested depth
};

inline Accumulation accumulate(const Scalar& alpha, const Scalar& beta, long long depth) {
  if (alpha.sign() <= 0 || alpha >= params::half() || beta.sign() <= 0 || beta >= params::half())
    throw scalar_error("accumulate: parameters must lie in (0, 1/2)");
  Accumulation acc;
  Scalar a = alpha, b = beta, d(1);
  Mat4 N = Mat4::identity();
  for (long long k = 0; k <= depth; ++k) {
    Vec4 nk = n_vector(a, b);
    Scalar nu = d * dot<4>(nk, mat_vec<4>(N, ones<4>()));
    acc.states.push_back({k, a, b, N, d, nu});
    if (k == depth) break;
    if (a == params::half() || b == params::half()) {
      acc.boundary_at = k;
      break;
    }
    auto [next_a, bra] = params::f_step(a);
    auto [next_b, brb] = params::f_step(b);
    d *= (Scalar(1) - Scalar(2) * a) * (Scalar(1) - Scalar(2) * b);
    N = n_matrix({bra.n, bra.r, brb.n, brb.r}) * N;
    a = next_a;
    b = next_b;
  }
  return acc;
}

struct NsLimit {
  Scalar last_value;             // nu(O_{depth+1}); an upper bound for nu(NS)
  std::vector<Scalar> values;    // the monotone sequence nu(O_1), nu(O_2), ...
  bool converged = false;
  bool certified_zero = false;   // geometric-ratio certificate applies
  double ratio_lo = 0, ratio_hi = 0;  // Collatz-Wielandt bracket of d * lambda over a cycle
  std::optional<long long> boundary_at;
};

/// Collatz-Wielandt bracket for the spectral radius of a primitive
/// nonnegative matrix, via exact power iteration.
inline std::pair<Scalar, Scalar> spectral_bracket(const Mat4& m, int iterations) {
  Vec4 v = ones<4>();
  for (int it = 0; it < iterations; ++it) v = mat_vec<4>(m, v);
  Vec4 w = mat_vec<4>(m, v);
  Scalar lo = w[0] / v[0], hi = lo;
  for (int i = 1; i < 4; ++i) {
    Scalar r = w[static_cast<size_t>(i)] / v[static_cast<size_t>(i)];
    if (r < lo) lo = r;
    if (r > hi) hi = r;
  }
  return {lo, hi};
}

inline NsLimit ns_limit(const Scalar& alpha, const Scalar& beta, long long depth,
                        const Scalar& tol) {
  Accumulation acc = accumulate(alpha, beta, depth);
  NsLimit out;
  out.boundary_at = acc.boundary_at;
  for (const CocycleState& st : acc.states) out.values.push_back(st.nu_O_kplus1);
  out.last_value = out.values.back();
  if (out.values.size() >= 2 &&
      (out.values[out.values.size() - 2] - out.values.back()).abs() < tol)
    out.converged = true;

  // certificate for an eventually periodic parameter orbit: if the cycle's
  // contraction d_cycle * lambda_max(N_cycle) < 1, the limit is zero
  const auto& sts = acc.states;
  for (size_t i = 0; i + 1 < sts.size() && !out.certified_zero; ++i) {
    for (size_t j = i + 1; j < sts.size(); ++j) {
      if (sts[j].alpha_k == sts[i].alpha_k && sts[j].beta_k == sts[i].beta_k) {
        Scalar d_cycle = sts[j].d_k / sts[i].d_k;
        Mat4 n_cycle = Mat4::identity();
        {
          Scalar a = sts[i].alpha_k, b = sts[i].beta_k;
          for (size_t t = i; t < j; ++t) {
            auto [next_a, bra] = params::f_step(a);
            auto [next_b, brb] = params::f_step(b);
            n_cycle = n_matrix({bra.n, bra.r, brb.n, brb.r}) * n_cycle;
            a = next_a;
            b = next_b;
          }
        }
        auto [lo, hi] = spectral_bracket(n_cycle, 48);
        out.ratio_lo = (d_cycle * lo).to_double();
        out.ratio_hi = (d_cycle * hi).to_double();
        if (d_cycle * hi < Scalar(1)) {
          out.certified_zero = true;
          out.converged = true;
        }
        break;
      }
    }
    break;  // only test cycles starting at the first repeated point
  }
  return out;
}

struct ScalingCheck {
  bool holds = false;
  Scalar margin;      // minimal entrywise slack rhs - lhs
  Vec4 lhs, rhs;
};

/// Entrywise verification of d * N^T n_{f(g),f(d)} <= (1 - 4/3 f(g) f(d)) n_{g,d}.
/// Chained along an orbit this gives
///   nu(O_{k+1}) <= g(f^k(alpha), f^k(beta)) nu(O_k),
/// i.e. the contraction factor at step k is evaluated at the k-th orbit
/// point (one application ahead of the measure it multiplies). Statements
/// indexing the factor at f^{k+1} instead do not match the derivation; this
/// implementation and its tests pin the form above.
inline ScalingCheck scaling_check(const Scalar& gamma, const Scalar& delta) {
  Scalar fg = params::f_value(gamma), fd = params::f_value(delta);
  BranchQuad q{params::f_step(gamma).second.n, params::f_step(gamma).second.r,
               params::f_step(delta).second.n, params::f_step(delta).second.r};
  Scalar d = (Scalar(1) - Scalar(2) * gamma) * (Scalar(1) - Scalar(2) * delta);
  Vec4 nfd = n_vector(fg, fd);
  Vec4 lhs = mat_vec<4>(n_matrix(q).transposed(), nfd);
  for (Scalar& x : lhs) x *= d;
  Scalar g = Scalar(1) - Scalar(BigInt(4), BigInt(3)) * fg * fd;
  Vec4 rhs = n_vector(gamma, delta);
  for (Scalar& x : rhs) x *= g;
  ScalingCheck out;
  out.lhs = lhs;
  out.rhs = rhs;
  out.holds = true;
  out.margin = rhs[0] - lhs[0];
  for (int i = 0; i < 4; ++i) {
    Scalar slack = rhs[static_cast<size_t>(i)] - lhs[static_cast<size_t>(i)];
    if (slack.sign() < 0) out.holds = false;
    if (slack < out.margin) out.margin = slack;
  }
  return out;
}

/// Closed forms of the decay-control comparison at the block seam. With
/// (alpha, beta) the k-upward preimage of (gamma, delta):
///   v = n_{alpha,beta} / D(alpha,beta,k+1)
///   w = N(alpha,beta,k+1)^T n_{gamma,delta}
/// Both are bilinear in (gamma, delta).
inline Vec4 decay_v(const BigInt& k, const Scalar& g, const Scalar& d) {
  Scalar one(1), two(2), h(BigInt(1), BigInt(2));
  Scalar kk{k, BigInt(1)};
  return {
      (one + g) * (one + two * d * kk),
      h * (one + two * (one + g) * kk) * (Scalar(3) + d * (two + Scalar(6) * kk)),
      (one + two * (one + g) * kk) * (one + d * (one + two * kk)),
      h * (one + two * (one + g) * (one + kk)) * (one + two * d * kk),
  };
}

inline Vec4 decay_w(const BigInt& k, const Scalar& g, const Scalar& d) {
  Scalar one(1), two(2), h(BigInt(1), BigInt(2));
  Scalar kk{k, BigInt(1)};
  return {
      one + g - Scalar(6) * g * d,
      h * (Scalar(3) * (one + two * (one + g) * kk) -
           two * d * (Scalar(8) * g - one) * (one + Scalar(3) * kk)),
      one + two * (one + g) * kk +
          d * (one - Scalar(6) * g + two * kk - Scalar(16) * g * kk),
      h * (one + two * (one + g) * (one + kk) -
           two * d * (Scalar(8) * g * (kk + one) - kk)),
  };
}

/// The accumulated k-upward block matrix N(alpha, beta, k+1).
inline Mat4 decay_matrix(const BigInt& k) {
  Mat4 N;
  N.at(0, 0) = 3;
  N.at(0, 1) = 1 + 9 * k;
  N.at(0, 2) = 6 * k;
  N.at(0, 3) = 3 * (1 + k);
  N.at(1, 0) = 2;
  N.at(1, 1) = 1 + 6 * k;
  N.at(1, 2) = 4 * k;
  N.at(1, 3) = 2 * (1 + k);
  N.at(2, 1) = 3 * (1 + k);
  N.at(2, 2) = 3 + 2 * k;
  N.at(2, 3) = 1 + k;
  N.at(3, 1) = 2;
  N.at(3, 2) = 2;
  N.at(3, 3) = 1;
  return N;
}

struct DecayCheck {
  bool holds = false;
  Scalar min_margin;  // min over corners and entries of w - (1-eps) v
};

/// Verifies w > (1 - eps) v entrywise over the whole (gamma, delta) box of a
/// k'-rightward successor block. Both sides are bilinear in (gamma, delta),
/// so the minimum over the box is attained at a corner: the four-corner exact
/// check is a complete verification. `swapped` evaluates the
/// rightward-to-upward variant (coordinates of the vectors exchanged).
inline DecayCheck decay_inequality_check(const BigInt& k, const BigInt& k_prime,
                                         const Scalar& eps, bool swapped = false) {
  if (k < 1 || k_prime < 1) throw scalar_error("decay_inequality_check: blocks need k >= 1");
  if (eps.sign() <= 0 || eps >= Scalar(1))
    throw scalar_error("decay_inequality_check: eps outside (0,1)");
  params::Box box = params::rightward_box(k_prime);  // gamma in [1/3, ...], delta small
  Scalar one_minus_eps = Scalar(1) - eps;
  DecayCheck out;
  out.holds = true;
  bool first = true;
  for (const Scalar& g : {box.alpha_lo, box.alpha_hi}) {
    for (const Scalar& d : {box.beta_lo, box.beta_hi}) {
      Vec4 v = decay_v(k, g, d), w = decay_w(k, g, d);
      if (swapped) {
        std::swap(v[0], v[2]);
        std::swap(v[1], v[3]);
        std::swap(w[0], w[2]);
        std::swap(w[1], w[3]);
      }
      for (int i = 0; i < 4; ++i) {
        Scalar margin = w[static_cast<size_t>(i)] - one_minus_eps * v[static_cast<size_t>(i)];
        if (first || margin < out.min_margin) out.min_margin = margin;
        first = false;
        if (margin.sign() <= 0) out.holds = false;
      }
    }
  }
  return out;
}

}  // namespace truchet::cocycle
