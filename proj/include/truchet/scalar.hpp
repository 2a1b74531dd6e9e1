#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace truchet {

using BigInt = boost::multiprecision::cpp_int;

class scalar_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline BigInt floor_div(const BigInt& n, const BigInt& d) {
  BigInt q = n / d;
  if ((n % d) != 0 && ((n < 0) != (d < 0))) --q;
  return q;
}

/// Convert n/d (d > 0) to the nearest double, valid for arbitrarily large
/// operands. Values beyond double range saturate to +-inf / 0.
inline double ratio_to_double(BigInt n, BigInt d) {
  if (n == 0) return 0.0;
  bool neg = n < 0;
  if (neg) n = -n;
  long bn = static_cast<long>(boost::multiprecision::msb(n));
  long bd = static_cast<long>(boost::multiprecision::msb(d));
  long diff = bn - bd;  // result magnitude ~ 2^diff
  if (diff > 1100) return neg ? -HUGE_VAL : HUGE_VAL;
  if (diff < -1100) return neg ? -0.0 : 0.0;
  long shift = 80 - diff;
  BigInt q;
  if (shift >= 0)
    q = (n << shift) / d;
  else
    q = n / (d << (-shift));
  double r = std::ldexp(q.convert_to<double>(), static_cast<int>(-shift));
  return neg ? -r : r;
}

/// Exact number: rational p/q or quadratic surd (a + b*sqrt(d))/c over a
/// square-free radicand d > 1. Stored normalized: c > 0, gcd(a,b,c) = 1,
/// and b == 0 exactly when the value is rational (then d == 0).
/// Comparisons are exact (no floating point). Mixing two distinct
/// radicands in one expression is a checked error.
class Scalar {
 public:
  Scalar() : a_(0), b_(0), c_(1), d_(0) {}
  Scalar(long long v) : a_(v), b_(0), c_(1), d_(0) {}  // NOLINT(runtime/explicit)
  Scalar(BigInt v) : a_(std::move(v)), b_(0), c_(1), d_(0) {}

  Scalar(BigInt num, BigInt den) : a_(std::move(num)), b_(0), c_(std::move(den)), d_(0) {
    if (c_ == 0) throw scalar_error("Scalar: zero denominator");
    normalize();
  }

  static Scalar surd(BigInt a, BigInt b, BigInt c, long long d) {
    if (c == 0) throw scalar_error("Scalar: zero denominator");
    if (b != 0) check_radicand(d);
    Scalar s;
    s.a_ = std::move(a);
    s.b_ = std::move(b);
    s.c_ = std::move(c);
    s.d_ = (s.b_ == 0) ? 0 : d;
    s.normalize();
    return s;
  }

  /// sqrt(d) itself.
  static Scalar root(long long d) { return surd(0, 1, 1, d); }

  bool is_rational() const { return b_ == 0; }
  bool is_zero() const { return a_ == 0 && b_ == 0; }
  long long radicand() const { return d_; }

  /// Rational accessors; throw on surds.
  const BigInt& num() const {
    require_rational();
    return a_;
  }
  const BigInt& den() const {
    require_rational();
    return c_;
  }

  const BigInt& surd_a() const { return a_; }
  const BigInt& surd_b() const { return b_; }
  const BigInt& surd_c() const { return c_; }

  friend Scalar operator-(const Scalar& x) {
    Scalar r = x;
    r.a_ = -r.a_;
    r.b_ = -r.b_;
    return r;
  }

  friend Scalar operator+(const Scalar& x, const Scalar& y) {
    long long d = joint_radicand(x, y);
    Scalar r;
    r.a_ = x.a_ * y.c_ + y.a_ * x.c_;
    r.b_ = x.b_ * y.c_ + y.b_ * x.c_;
    r.c_ = x.c_ * y.c_;
    r.d_ = (r.b_ == 0) ? 0 : d;
    r.normalize();
    return r;
  }
  friend Scalar operator-(const Scalar& x, const Scalar& y) { return x + (-y); }

  friend Scalar operator*(const Scalar& x, const Scalar& y) {
    long long d = joint_radicand(x, y);
    Scalar r;
    r.a_ = x.a_ * y.a_ + x.b_ * y.b_ * d;
    r.b_ = x.a_ * y.b_ + x.b_ * y.a_;
    r.c_ = x.c_ * y.c_;
    r.d_ = (r.b_ == 0) ? 0 : d;
    r.normalize();
    return r;
  }

  friend Scalar operator/(const Scalar& x, const Scalar& y) {
    if (y.is_zero()) throw scalar_error("Scalar: division by zero");
    long long d = joint_radicand(x, y);
    // 1/y = c*(a - b*sqrt(d)) / (a^2 - b^2 d)
    BigInt norm = y.a_ * y.a_ - y.b_ * y.b_ * d;
    Scalar inv;
    inv.a_ = y.c_ * y.a_;
    inv.b_ = -(y.c_ * y.b_);
    inv.c_ = std::move(norm);
    inv.d_ = (inv.b_ == 0) ? 0 : d;
    inv.normalize();
    return x * inv;
  }

  Scalar& operator+=(const Scalar& y) { return *this = *this + y; }
  Scalar& operator-=(const Scalar& y) { return *this = *this - y; }
  Scalar& operator*=(const Scalar& y) { return *this = *this * y; }
  Scalar& operator/=(const Scalar& y) { return *this = *this / y; }

  /// Sign of the exact value, decided by integer arithmetic only.
  int sign() const {
    int sa = sgn(a_), sb = sgn(b_);
    if (sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    // a and b*sqrt(d) have opposite signs: compare a^2 against b^2 d.
    int cmp = sgn(a_ * a_ - b_ * b_ * d_);
    return cmp == 0 ? 0 : (cmp > 0 ? sa : sb);
  }

  friend bool operator==(const Scalar& x, const Scalar& y) { return (x - y).sign() == 0; }
  friend bool operator!=(const Scalar& x, const Scalar& y) { return !(x == y); }
  friend bool operator<(const Scalar& x, const Scalar& y) { return (x - y).sign() < 0; }
  friend bool operator>(const Scalar& x, const Scalar& y) { return (x - y).sign() > 0; }
  friend bool operator<=(const Scalar& x, const Scalar& y) { return (x - y).sign() <= 0; }
  friend bool operator>=(const Scalar& x, const Scalar& y) { return (x - y).sign() >= 0; }

  /// Greatest integer <= value, exact also for surds.
  BigInt floor() const {
    if (is_rational()) return floor_div(a_, c_);
    BigInt n(static_cast<long long>(std::floor(to_double())));
    while (Scalar(n + 1) <= *this) ++n;
    while (Scalar(n) > *this) --n;
    return n;
  }

  Scalar mod1() const { return *this - Scalar(floor()); }

  Scalar abs() const { return sign() < 0 ? -*this : *this; }

  double to_double() const {
    double ra = ratio_to_double(a_, c_);
    if (b_ == 0) return ra;
    double rb = ratio_to_double(b_, c_) * std::sqrt(static_cast<double>(d_));
    double naive = ra + rb;
    if (std::abs(naive) > 1e-9 * (std::abs(ra) + std::abs(rb))) return naive;
    // the two parts cancel almost exactly; redo in extended precision
    using F = boost::multiprecision::cpp_bin_float_100;
    F v = (F(a_) + F(b_) * sqrt(F(d_))) / F(c_);
    return v.convert_to<double>();
  }

  /// Canonical text form: "p", "p/q" or "(a+b*sqrt(d))/c"; round-trips
  /// bit-exactly through parse().
  std::string str() const {
    if (is_rational()) {
      std::string s = a_.str();
      if (c_ != 1) s += "/" + c_.str();
      return s;
    }
    std::string s = "(" + a_.str();
    s += (b_ < 0) ? "-" : "+";
    s += BigInt(boost::multiprecision::abs(b_)).str();
    s += "*sqrt(" + std::to_string(d_) + "))/" + c_.str();
    return s;
  }

  /// Accepts "p", "p/q", decimals like "0.3", and "(a+b*sqrt(d))/c".
  static Scalar parse(std::string_view text);

  friend std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.str(); }

 private:
  BigInt a_, b_, c_;
  long long d_;

  static int sgn(const BigInt& v) { return v == 0 ? 0 : (v < 0 ? -1 : 1); }

  void require_rational() const {
    if (!is_rational()) throw scalar_error("Scalar: rational access on quadratic value");
  }

  static void check_radicand(long long d) {
    if (d <= 1) throw scalar_error("Scalar: radicand must exceed 1");
    for (long long p = 2; p * p <= d; ++p)
      if (d % (p * p) == 0) throw scalar_error("Scalar: radicand must be square-free");
  }

  static long long joint_radicand(const Scalar& x, const Scalar& y) {
    if (x.d_ == 0) return y.d_;
    if (y.d_ == 0 || y.d_ == x.d_) return x.d_;
    throw scalar_error("Scalar: mixed radicands sqrt(" + std::to_string(x.d_) + ") and sqrt(" +
                       std::to_string(y.d_) + ")");
  }

  void normalize() {
    using boost::multiprecision::gcd;
    if (c_ < 0) {
      a_ = -a_;
      b_ = -b_;
      c_ = -c_;
    }
    BigInt g = gcd(gcd(boost::multiprecision::abs(a_), boost::multiprecision::abs(b_)), c_);
    if (g > 1) {
      a_ /= g;
      b_ /= g;
      c_ /= g;
    }
    if (b_ == 0) d_ = 0;
  }
};

inline Scalar Scalar::parse(std::string_view text) {
  auto fail = [&]() {
    throw scalar_error("Scalar: cannot parse \"" + std::string(text) + "\"");
  };
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) fail();

  auto parse_int = [&](std::string_view v) -> BigInt {
    if (v.empty()) fail();
    bool neg = v[0] == '-';
    size_t i = (v[0] == '-' || v[0] == '+') ? 1 : 0;
    if (i == v.size()) fail();
    for (size_t k = i; k < v.size(); ++k)
      if (!std::isdigit(static_cast<unsigned char>(v[k]))) fail();
    BigInt r(std::string(v.substr(i)));
    return neg ? BigInt(-r) : r;
  };

  if (s[0] == '(') {
    // (a+b*sqrt(d))/c
    size_t close = s.find(')');
    size_t mul = s.find("*sqrt(");
    if (mul == std::string::npos || close == std::string::npos || mul > close) fail();
    // the sign separating a from b: last '+'/'-' before "*sqrt(", not at 0
    size_t sep = std::string::npos;
    for (size_t k = mul; k-- > 1;) {
      if (s[k] == '+' || s[k] == '-') {
        sep = k;
        break;
      }
    }
    if (sep == std::string::npos) fail();
    BigInt a = parse_int(std::string_view(s).substr(1, sep - 1));
    BigInt b = parse_int(std::string_view(s).substr(sep, mul - sep));
    size_t dclose = s.find(')', mul + 6);
    if (dclose == std::string::npos) fail();
    BigInt d = parse_int(std::string_view(s).substr(mul + 6, dclose - (mul + 6)));
    size_t after = dclose + 1;
    if (after >= s.size() || s[after] != ')') fail();
    ++after;
    if (after >= s.size() || s[after] != '/') fail();
    BigInt c = parse_int(std::string_view(s).substr(after + 1));
    if (d < 2 || d > BigInt(std::numeric_limits<long long>::max())) fail();
    return Scalar::surd(a, b, c, d.convert_to<long long>());
  }
  size_t slash = s.find('/');
  if (slash != std::string::npos) {
    BigInt p = parse_int(std::string_view(s).substr(0, slash));
    BigInt q = parse_int(std::string_view(s).substr(slash + 1));
    return Scalar(p, q);
  }
  size_t dot = s.find('.');
  if (dot != std::string::npos) {
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    size_t frac_len = s.size() - dot - 1;
    if (frac_len == 0) fail();
    BigInt p = parse_int(digits);
    BigInt q = 1;
    for (size_t i = 0; i < frac_len; ++i) q *= 10;
    return Scalar(p, q);
  }
  return Scalar(parse_int(s), 1);
}

/// Reduction of t modulo the group G of integer-preserving isometries of R.
/// The fundamental domain is [0, 1/2]: t = n + orientation * reduced with
/// reduced in [0, 1/2]. Ambiguous values (t equivalent to 0 or 1/2) take
/// orientation +1.
struct GReduction {
  Scalar reduced;
  int orientation;
  BigInt integer_part;
};

inline GReduction reduce_mod_G(const Scalar& t) {
  BigInt n = t.floor();
  Scalar fr = t - Scalar(n);
  static const Scalar half(BigInt(1), BigInt(2));
  if (fr <= half) return {fr, +1, n};
  return {Scalar(1) - fr, -1, n + 1};
}

/// Greatest integer <= x/y; exact for rational and quadratic scalars.
inline BigInt floor_quotient(const Scalar& x, const Scalar& y) {
  if (y.sign() <= 0) throw scalar_error("floor_quotient: divisor must be positive");
  return (x / y).floor();
}

}  // namespace truchet
