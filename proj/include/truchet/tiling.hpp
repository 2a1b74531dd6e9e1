#pragma once

#include <algorithm>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "truchet/scalar.hpp"

namespace truchet::tiling {

class window_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Finite window cannot certify unbounded collapsibility: a maximal
/// alternating run touched the window edge.
class nuc_error : public window_error {
 public:
  using window_error::window_error;
};

/// A finitely-inspected bi-infinite +-1 sequence. Backends:
///  - rotation-coded: entry m is +1 iff base + m*alpha mod 1 lies in [0,1/2);
///    windows extend on demand (exact arithmetic, cached).
///  - explicit: a stored window [lo, hi]; reads outside it are an error,
///    never silently fabricated. Optionally periodic (pattern repeats), which
///    certifies shift-periodicity.
class SeqWindow {
 public:
  static SeqWindow rotation(Scalar alpha, Scalar base) {
    SeqWindow w;
    w.impl_ = std::make_shared<Impl>();
    w.impl_->rotation.emplace(std::move(alpha), std::move(base));
    return w;
  }

  static SeqWindow explicit_window(std::vector<int> values, long long lo) {
    for (int v : values)
      if (v != 1 && v != -1) throw window_error("SeqWindow: entries must be +-1");
    SeqWindow w;
    w.impl_ = std::make_shared<Impl>();
    w.impl_->values = std::move(values);
    w.impl_->lo = lo;
    return w;
  }

  static SeqWindow periodic(std::vector<int> pattern) {
    if (pattern.empty()) throw window_error("SeqWindow: empty period");
    SeqWindow w = explicit_window(std::move(pattern), 0);
    w.impl_->periodic = true;
    return w;
  }

  bool is_rotation() const { return impl_->rotation.has_value(); }
  bool is_periodic() const { return impl_->periodic; }
  long long period() const { return static_cast<long long>(impl_->values.size()); }
  const Scalar& alpha() const { return impl_->rotation->alpha; }
  const Scalar& base() const { return impl_->rotation->base; }
  long long offset() const { return offset_; }

  /// Explicit range (outer indices) currently readable; rotation windows are
  /// unbounded.
  bool bounded() const { return !is_rotation() && !impl_->periodic; }
  long long lo() const { return impl_->lo - offset_; }
  long long hi() const { return impl_->lo + static_cast<long long>(impl_->values.size()) - 1 - offset_; }

  int at(long long i) const {
    long long g = i + offset_;
    if (impl_->rotation) return impl_->rotation->entry(g);
    if (impl_->periodic) {
      long long p = static_cast<long long>(impl_->values.size());
      long long r = g % p;
      if (r < 0) r += p;
      return impl_->values[static_cast<size_t>(r)];
    }
    long long idx = g - impl_->lo;
    if (idx < 0 || idx >= static_cast<long long>(impl_->values.size()))
      throw window_error("SeqWindow: index " + std::to_string(i) + " outside explicit window");
    return impl_->values[static_cast<size_t>(idx)];
  }

  /// Kept index: entry i is not part of a "-+" subword.
  bool kept(long long i) const {
    return !(at(i) == -1 && at(i + 1) == +1) && !(at(i - 1) == -1 && at(i) == +1);
  }

  SeqWindow shifted(long long n) const {
    SeqWindow w = *this;
    w.offset_ += n;
    return w;
  }

  /// Smallest kept index >= from (direction +1) or largest <= from (-1).
  /// Throws nuc_error when an alternating run reaches the readable edge.
  long long next_kept(long long from, int direction, long long scan_cap = 1 << 22) const {
    long long i = from;
    for (long long n = 0; n <= scan_cap; ++n, i += direction) {
      if (bounded() && (i - 1 < lo() || i + 1 > hi()))
        throw nuc_error("SeqWindow: kept-index scan hit the window edge (possibly not unbounded-collapsible)");
      if (kept(i)) return i;
    }
    throw nuc_error("SeqWindow: kept-index scan exceeded cap (possibly not unbounded-collapsible)");
  }

  /// Materialize entries [lo, hi] as an explicit window (for backend
  /// cross-validation).
  SeqWindow materialize(long long mlo, long long mhi) const {
    std::vector<int> vals;
    vals.reserve(static_cast<size_t>(mhi - mlo + 1));
    for (long long i = mlo; i <= mhi; ++i) vals.push_back(at(i));
    return explicit_window(std::move(vals), mlo);
  }

  friend bool windows_equal(const SeqWindow& a, const SeqWindow& b, long long lo, long long hi) {
    for (long long i = lo; i <= hi; ++i)
      if (a.at(i) != b.at(i)) return false;
    return true;
  }

 private:
  struct RotationBackend {
    Scalar alpha, base;
    mutable std::mutex mu;
    mutable std::vector<int8_t> cache;  // entries for indices [cache_lo, cache_lo + size)
    mutable long long cache_lo = 0;

    RotationBackend(Scalar a, Scalar b) : alpha(std::move(a)), base(std::move(b)) {}

    int compute(long long m) const {
      static const Scalar h(BigInt(1), BigInt(2));
      Scalar v = (base + Scalar(m) * alpha).mod1();
      return v < h ? +1 : -1;
    }

    int entry(long long m) const {
      std::lock_guard<std::mutex> lock(mu);
      if (cache.empty()) {
        cache_lo = m;
        cache.push_back(static_cast<int8_t>(compute(m)));
      }
      while (m < cache_lo) {
        cache.insert(cache.begin(), static_cast<int8_t>(compute(cache_lo - 1)));
        --cache_lo;
      }
      while (m >= cache_lo + static_cast<long long>(cache.size()))
        cache.push_back(static_cast<int8_t>(compute(cache_lo + static_cast<long long>(cache.size()))));
      return cache[static_cast<size_t>(m - cache_lo)];
    }
  };

  struct Impl {
    std::optional<RotationBackend> rotation;
    std::vector<int> values;
    long long lo = 0;
    bool periodic = false;
  };

  std::shared_ptr<Impl> impl_;
  long long offset_ = 0;
};

/// Sorted kept indices within [lo, hi]. The window must cover one neighbor on
/// each side.
inline std::vector<long long> kept_set(const SeqWindow& s, long long lo, long long hi) {
  std::vector<long long> out;
  for (long long i = lo; i <= hi; ++i)
    if (s.kept(i)) out.push_back(i);
  return out;
}

struct TileSite {
  long long m, n;
  friend bool operator==(TileSite a, TileSite b) { return a.m == b.m && a.n == b.n; }
};

struct CurveDir {
  int a, b;
  friend bool operator==(CurveDir p, CurveDir q) { return p.a == q.a && p.b == q.b; }
  friend bool operator!=(CurveDir p, CurveDir q) { return !(p == q); }
};

struct CurveState {
  TileSite site;
  CurveDir v;
  friend bool operator==(const CurveState& p, const CurveState& q) {
    return p.site == q.site && p.v == q.v;
  }
};

/// Corner-percolation induced Truchet tiling tau(m, n) = omega_m * eta_n.
struct Tiling {
  SeqWindow omega, eta;

  int tau(long long m, long long n) const { return omega.at(m) * eta.at(n); }
  bool site_kept(TileSite s) const { return omega.kept(s.m) && eta.kept(s.n); }
};

inline int tau_at(const Tiling& t, long long m, long long n) { return t.tau(m, n); }

/// Curve-following map: advance the inward normal along the arc of the tile
/// at (m,n) into the adjacent square.
inline CurveState curve_follow(const Tiling& t, const CurveState& st) {
  int s = t.tau(st.site.m, st.site.n);
  return {{st.site.m + s * st.v.b, st.site.n + s * st.v.a}, {s * st.v.b, s * st.v.a}};
}

/// Inverse of curve_follow (step backwards along the curve).
inline CurveState curve_follow_back(const Tiling& t, const CurveState& st) {
  long long m = st.site.m - st.v.a, n = st.site.n - st.v.b;
  int s = t.tau(m, n);
  return {{m, n}, {s * st.v.b, s * st.v.a}};
}

struct CurveTrace {
  enum class Kind { closed, open_truncated };
  Kind kind = Kind::open_truncated;
  std::vector<CurveState> sites;
  long long length = 0;  // period when closed, steps taken otherwise
};

inline CurveTrace trace_curve(const Tiling& t, TileSite site, CurveDir v, long long max_steps,
                              bool record_sites = true) {
  CurveTrace trace;
  CurveState start{site, v}, cur = start;
  for (long long k = 0; k < max_steps; ++k) {
    if (record_sites) trace.sites.push_back(cur);
    cur = curve_follow(t, cur);
    if (cur == start) {
      trace.kind = CurveTrace::Kind::closed;
      trace.length = k + 1;
      return trace;
    }
  }
  trace.kind = CurveTrace::Kind::open_truncated;
  trace.length = max_steps;
  return trace;
}

/// kappa(i) for i in [ilo, ihi]: the increasing enumeration of the kept set,
/// normalized so kappa(0) is the smallest nonnegative kept index.
inline std::vector<long long> kappa_values(const SeqWindow& s, long long ilo, long long ihi) {
  long long origin = s.next_kept(0, +1);
  std::vector<long long> fwd{origin};
  while (static_cast<long long>(fwd.size()) - 1 < std::max<long long>(ihi, 0))
    fwd.push_back(s.next_kept(fwd.back() + 1, +1));
  std::vector<long long> bwd;
  while (static_cast<long long>(bwd.size()) < -ilo)
    bwd.push_back(s.next_kept((bwd.empty() ? origin : bwd.back()) - 1, -1));
  std::vector<long long> out;
  for (long long i = ilo; i <= ihi; ++i)
    out.push_back(i >= 0 ? fwd[static_cast<size_t>(i)] : bwd[static_cast<size_t>(-i - 1)]);
  return out;
}

/// Renormalized tiling: entry (i, j) is tau(kappa1(i), kappa2(j)). Output
/// windows are explicit; requesting a window the kept sets cannot cover
/// raises the assumption-violation error from the kept-index scan.
inline Tiling renormalize_tiling(const Tiling& t, long long mlo, long long mhi, long long nlo,
                                 long long nhi) {
  auto collapse_axis = [](const SeqWindow& s, long long olo, long long ohi) {
    std::vector<long long> kap = kappa_values(s, olo, ohi);
    std::vector<int> vals;
    for (long long k : kap) vals.push_back(s.at(k));
    return SeqWindow::explicit_window(std::move(vals), olo);
  };
  return {collapse_axis(t.omega, mlo, mhi), collapse_axis(t.eta, nlo, nhi)};
}

struct KeptReturn {
  CurveState state;
  long long return_time;  // R
  long long excision;     // E, with R = 2E - 1
};

/// First return of the curve-following map to the kept squares. Also
/// computes the excision count E(m,n,w) independently and checks R = 2E - 1.
inline KeptReturn return_to_kept(const Tiling& t, TileSite site, CurveDir v,
                                 long long cap = 1 << 22) {
  if (!t.site_kept(site)) throw window_error("return_to_kept: site not in the kept set");
  CurveState cur{site, v};
  CurveState first = curve_follow(t, cur);
  CurveDir w = first.v;
  long long excision = 0;
  for (long long j = 1;; ++j) {
    if (j > cap) throw nuc_error("return_to_kept: excision scan exceeded cap");
    if (t.site_kept({site.m + j * w.a, site.n + j * w.b})) {
      excision = j;
      break;
    }
  }
  cur = first;
  long long r = 1;
  while (!t.site_kept(cur.site)) {
    if (r > cap) throw nuc_error("return_to_kept: curve scan exceeded cap");
    cur = curve_follow(t, cur);
    ++r;
  }
  if (r != 2 * excision - 1)
    throw std::logic_error("return_to_kept: return-time law R = 2E - 1 violated");
  return {cur, r, excision};
}

struct SiteClass {
  enum class Kind { loop4, horizontal_box, vertical_box };
  Kind kind;
  long long length_param = 0;  // box length l; 0 for loop4
  TileSite lo{0, 0}, hi{0, 0};  // bounding box of the central curve / loop
};

/// Classification of a state at a non-kept site: 4-loop, or tangent to the
/// central curve of a horizontal or vertical box (mutually exclusive).
/// The 4-loop test is the closed-form local pattern; a 4-step iteration
/// cross-check is asserted.
inline SiteClass classify_site(const Tiling& t, TileSite site, CurveDir v,
                               long long cap = 1 << 22) {
  if (t.site_kept(site)) throw window_error("classify_site: site is kept");

  // closed form: the quarter-turn block spanned by the first two moves
  int s1 = t.tau(site.m, site.n);
  TileSite p2{site.m + s1 * v.b, site.n + s1 * v.a};
  int s2 = t.tau(p2.m, p2.n);
  CurveDir v2{s1 * v.b, s1 * v.a};
  TileSite p3{p2.m + s2 * v2.b, p2.n + s2 * v2.a};
  long long mA = std::min({site.m, p2.m, p3.m}), mB = std::max({site.m, p2.m, p3.m});
  long long nA = std::min({site.n, p2.n, p3.n}), nB = std::max({site.n, p2.n, p3.n});
  bool loop4 = mB == mA + 1 && nB == nA + 1 && t.omega.at(mA) == -t.omega.at(mB) &&
               t.eta.at(nA) == -t.eta.at(nB);
  // cross-check against plain iteration
  CurveState st{site, v};
  CurveState it = curve_follow(t, curve_follow(t, curve_follow(t, curve_follow(t, st))));
  if (loop4 != (it == st)) throw std::logic_error("classify_site: 4-loop pattern check mismatch");
  if (loop4) return {SiteClass::Kind::loop4, 0, {mA, nA}, {mB, nB}};

  // otherwise follow the central curve to the kept set in both directions;
  // the box axis is read off the moves crossing its two kept ends
  long long mlo = site.m, mhi = site.m, nlo = site.n, nhi = site.n;
  auto sweep = [&](CurveState cur, bool forward) {
    long long steps = 0;
    CurveState last_inside = cur;
    while (!t.site_kept(cur.site)) {
      if (++steps > cap) throw nuc_error("classify_site: scan exceeded cap");
      mlo = std::min(mlo, cur.site.m);
      mhi = std::max(mhi, cur.site.m);
      nlo = std::min(nlo, cur.site.n);
      nhi = std::max(nhi, cur.site.n);
      last_inside = cur;
      cur = forward ? curve_follow(t, cur) : curve_follow_back(t, cur);
    }
    // forward: the arrival move at the kept square left the box;
    // backward: the last in-box state carries the move that entered it
    return std::make_pair(steps, forward ? cur.v : last_inside.v);
  };
  auto [fwd_steps, exit_dir] = sweep(st, true);
  auto [bwd_steps, entry_dir] = sweep(st, false);
  long long total = fwd_steps + bwd_steps;  // = R = 1 + 4l for the containing box
  if (total % 4 != 1) throw std::logic_error("classify_site: central-curve span not 1 + 4l");
  long long ell = total / 4;
  bool horizontal = exit_dir.b == 0;
  if (horizontal != (entry_dir.b == 0))
    throw std::logic_error("classify_site: entry/exit axes disagree");
  return {horizontal ? SiteClass::Kind::horizontal_box : SiteClass::Kind::vertical_box, ell,
          {mlo, nlo}, {mhi, nhi}};
}

struct SvgStyle {
  int tile_px = 20;       // even, so arc radii are integers
  bool draw_grid = true;
  std::string arc_color = "#1a1a1a";
  std::string grid_color = "#d8d8d8";
};

/// Deterministic SVG 1.1 rendering: one unit square per site, two quarter
/// arcs per Truchet tile, row-major element order, byte-stable output.
inline std::string render_svg(const Tiling& t, long long mlo, long long mhi, long long nlo,
                              long long nhi, const SvgStyle& style = {}) {
  const long long T = style.tile_px, r = T / 2;
  const long long w = (mhi - mlo + 1) * T, h = (nhi - nlo + 1) * T;
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         std::to_string(w) + "\" height=\"" + std::to_string(h) + "\" viewBox=\"0 0 " +
         std::to_string(w) + " " + std::to_string(h) + "\">\n";
  auto arc = [&](long long x0, long long y0, long long x1, long long y1, int sweep) {
    out += "<path d=\"M " + std::to_string(x0) + " " + std::to_string(y0) + " A " +
           std::to_string(r) + " " + std::to_string(r) + " 0 0 " + std::to_string(sweep) + " " +
           std::to_string(x1) + " " + std::to_string(y1) + "\" fill=\"none\" stroke=\"" +
           style.arc_color + "\" stroke-width=\"2\"/>\n";
  };
  for (long long n = nhi; n >= nlo; --n) {
    for (long long m = mlo; m <= mhi; ++m) {
      long long px = (m - mlo) * T, py = (nhi - n) * T;
      if (style.draw_grid)
        out += "<rect x=\"" + std::to_string(px) + "\" y=\"" + std::to_string(py) + "\" width=\"" +
               std::to_string(T) + "\" height=\"" + std::to_string(T) + "\" fill=\"none\" stroke=\"" +
               style.grid_color + "\" stroke-width=\"1\"/>\n";
      if (t.tau(m, n) == 1) {
        arc(px, py + r, px + r, py, 0);          // left -> top, centered at the NW corner
        arc(px + r, py + T, px + T, py + r, 1);  // bottom -> right, centered at the SE corner
      } else {
        arc(px, py + r, px + r, py + T, 1);      // left -> bottom, centered at the SW corner
        arc(px + r, py, px + T, py + r, 0);      // top -> right, centered at the NE corner
      }
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace truchet::tiling
