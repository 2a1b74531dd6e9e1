// Command-line front end: Truchet tiling rendering, orbit dumps, measure
// tables, Monte Carlo censuses, property verification, and the
// small-periodic-measure construction. Standard output is machine-parseable
// (CSV or JSON); progress goes to standard error.

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "truchet/cocycle.hpp"
#include "truchet/construct.hpp"
#include "truchet/io.hpp"
#include "truchet/params.hpp"
#include "truchet/pet.hpp"
#include "truchet/rng.hpp"
#include "truchet/symbolic.hpp"
#include "truchet/tiling.hpp"
#include "truchet/version.hpp"

using truchet::BigInt;
using truchet::Scalar;
using truchet::SplitMix64;
namespace cc = truchet::cocycle;
namespace io = truchet::io;
namespace params = truchet::params;
namespace pet = truchet::pet;
namespace symb = truchet::symb;
namespace tiling = truchet::tiling;
using io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPropertyFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitResourceCap = 3;

Scalar rat(long long p, long long q) { return Scalar(BigInt(p), BigInt(q)); }
const Scalar kFixedPoint = Scalar::surd(2, -1, 2, 2);

struct Output {
  std::string path;  // empty = stdout

  void write(const std::string& text) const {
    if (path.empty())
      std::cout << text;
    else
      io::write_text_file(path, text);
  }
};

/// Effective configuration: CLI flags take precedence over the config file,
/// which takes precedence over built-in defaults.
struct Config {
  json file;  // loaded --config contents, possibly null

  template <typename T>
  void fill(const CLI::Option* opt, const char* key, T& var) const {
    if (opt != nullptr && opt->count() > 0) return;
    if (!file.is_object() || !file.contains(key)) return;
    var = file.at(key).get<T>();
  }

  void fill_scalar(const CLI::Option* opt, const char* key, std::string& var) const {
    fill<std::string>(opt, key, var);
  }
};

json report_header(const std::string& command, const json& effective) {
  json j;
  j["tool"] = std::string(truchet::kToolName) + " " + truchet::kToolVersion;
  j["schema_version"] = 1;
  j["command"] = command;
  j["config"] = effective;
  j["config_hash"] = io::hex64(io::fnv1a(effective.dump()));
  return j;
}

std::string csv_header_comments(const json& header) {
  std::string out;
  for (const auto& [key, value] : header.items())
    out += "# " + key + "=" + (value.is_string() ? value.get<std::string>() : value.dump()) + "\n";
  return out;
}

struct WindowSpec {
  long long mlo, mhi, nlo, nhi;
};

WindowSpec parse_window(const std::string& spec) {
  auto x = spec.find('x');
  if (x == std::string::npos) throw CLI::ValidationError("--window", "expected WxH");
  long long w = std::stoll(spec.substr(0, x)), h = std::stoll(spec.substr(x + 1));
  if (w < 1 || h < 1) throw CLI::ValidationError("--window", "dimensions must be positive");
  return {-(w / 2), w - 1 - w / 2, -(h / 2), h - 1 - h / 2};
}

tiling::Tiling build_tiling(const std::string& sequences_path, const std::string& alpha,
                            const std::string& beta, const std::string& x, const std::string& y) {
  if (!sequences_path.empty()) return io::tiling_from_window_json(io::read_json_file(sequences_path));
  return {tiling::SeqWindow::rotation(Scalar::parse(alpha), Scalar::parse(x)),
          tiling::SeqWindow::rotation(Scalar::parse(beta), Scalar::parse(y))};
}

// ---------------------------------------------------------------------------
// verify: the bundled property suite
// ---------------------------------------------------------------------------

struct PropertyResult {
  std::string name;
  bool pass = true;
  long long checks = 0;
  json failures = json::array();

  void fail(json detail) {
    pass = false;
    if (failures.size() < 10) failures.push_back(std::move(detail));
  }
};

PropertyResult verify_renorm_property(long long samples, std::uint64_t seed) {
  PropertyResult res{"renormalization-identity"};
  std::vector<std::pair<Scalar, Scalar>> pairs = {
      {kFixedPoint, kFixedPoint},
      {rat(1, 5), rat(1, 7)},
      {rat(3, 10), rat(2, 5)},
      {kFixedPoint, rat(1, 3)},
      {Scalar::surd(-1, 1, 1, 2), Scalar::surd(-1, 1, 1, 2)},
  };
  for (size_t i = 0; i < pairs.size(); ++i) {
    auto rep = pet::verify_renormalization(pairs[i].first, pairs[i].second, samples, seed + i);
    res.checks += rep.samples;
    for (const pet::LiftState& z : rep.mismatches)
      res.fail({{"alpha", pairs[i].first.str()},
                {"beta", pairs[i].second.str()},
                {"x", z.x.str()},
                {"y", z.y.str()},
                {"v", {z.v.a, z.v.b}}});
  }
  return res;
}

PropertyResult verify_return_time_property(long long sites, std::uint64_t seed, bool inject_fault) {
  PropertyResult res{"tiling-return-time"};
  SplitMix64 rng(seed);
  const tiling::CurveDir dirs[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  long long windows = std::max<long long>(20, sites / 500);
  while (res.checks < sites) {
    std::vector<int> om, et;
    for (int i = 0; i < 161; ++i) om.push_back(rng.below(2) ? 1 : -1);
    for (int i = 0; i < 161; ++i) et.push_back(rng.below(2) ? 1 : -1);
    tiling::Tiling t{tiling::SeqWindow::explicit_window(std::move(om), -80),
                     tiling::SeqWindow::explicit_window(std::move(et), -80)};
    for (int i = 0; i < sites / windows + 1 && res.checks < sites; ++i) {
      tiling::TileSite s{static_cast<long long>(rng.below(61)) - 30,
                         static_cast<long long>(rng.below(61)) - 30};
      if (!t.site_kept(s)) continue;
      tiling::CurveDir v = dirs[rng.below(4)];
      try {
        tiling::CurveState first = tiling::curve_follow(t, {s, v});
        tiling::CurveDir w = first.v;
        long long excision = 0;
        for (long long j = 1; j <= 200; ++j)
          if (t.site_kept({s.m + j * w.a, s.n + j * w.b})) {
            excision = j;
            break;
          }
        if (excision == 0) continue;
        // brute-force curve following, with the optional injected fault
        // flipping the sign of the curve step
        tiling::CurveState cur{s, v};
        long long r = 0;
        do {
          int sgn = t.tau(cur.site.m, cur.site.n) * (inject_fault ? -1 : 1);
          cur = {{cur.site.m + sgn * cur.v.b, cur.site.n + sgn * cur.v.a},
                 {sgn * cur.v.b, sgn * cur.v.a}};
          ++r;
        } while (!t.site_kept(cur.site) && r < 400);
        ++res.checks;
        if (r != 2 * excision - 1)
          res.fail({{"site", {s.m, s.n}}, {"v", {v.a, v.b}}, {"R", r}, {"E", excision}});
      } catch (const tiling::window_error&) {
      }
    }
  }
  return res;
}

PropertyResult verify_collapse_property(long long count, std::uint64_t seed) {
  PropertyResult res{"collapse-conjugacy"};
  SplitMix64 rng(seed);
  while (res.checks < count) {
    std::vector<int> vals;
    for (int i = 0; i < 241; ++i) vals.push_back(rng.below(2) ? 1 : -1);
    tiling::SeqWindow w = tiling::SeqWindow::explicit_window(std::move(vals), -120);
    try {
      if (!symb::zero_collapsible(w)) continue;
      long long rp = symb::return_times(w).first;
      tiling::SeqWindow lhs = symb::collapse(w.shifted(rp), -8, 8);
      tiling::SeqWindow rhs = symb::collapse(w, -9, 9).shifted(1);
      ++res.checks;
      if (!windows_equal(lhs, rhs, -8, 8)) res.fail({{"r_plus", rp}});
    } catch (const tiling::window_error&) {
    }
  }
  return res;
}

PropertyResult verify_rotation_collapse_property(long long count, std::uint64_t seed) {
  PropertyResult res{"rotation-collapse"};
  SplitMix64 rng(seed);
  while (res.checks < count) {
    Scalar alpha = rat(50 + static_cast<long long>(rng.below(400)), 1000) + rat(1, 99991);
    Scalar x = alpha + rng.grid_scalar(99991) * (Scalar(1) - Scalar(2) * alpha);
    tiling::SeqWindow direct = symb::collapse(symb::code_rotation(alpha, x), -10, 10);
    tiling::SeqWindow renorm =
        symb::code_rotation(params::f_value(alpha), symb::psi_dilation(x, alpha));
    ++res.checks;
    if (!windows_equal(direct, renorm, -10, 10))
      res.fail({{"alpha", alpha.str()}, {"x", x.str()}});
  }
  return res;
}

PropertyResult verify_scaling_property(long long grid) {
  PropertyResult res{"scaling-inequality"};
  // grid x grid rational points of (0.025, 0.475)^2
  Scalar lo = rat(1, 40), span = rat(9, 20);
  for (long long i = 0; i < grid; ++i) {
    Scalar g = lo + Scalar(2 * i + 1) * span / Scalar(2 * grid);
    for (long long j = 0; j < grid; ++j) {
      Scalar d = lo + Scalar(2 * j + 1) * span / Scalar(2 * grid);
      auto chk = cc::scaling_check(g, d);
      ++res.checks;
      if (!chk.holds) res.fail({{"gamma", g.str()}, {"delta", d.str()}});
    }
  }
  return res;
}

// ---------------------------------------------------------------------------

int run(int argc, char** argv) {
  CLI::App app{"rectangle exchange maps, corner-percolation Truchet tilings, and their renormalization"};
  app.set_version_flag("--version", std::string(truchet::kToolName) + " " + truchet::kToolVersion);
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags take precedence)");

  // each command has one native output format; --format documents and checks it
  std::vector<std::shared_ptr<std::string>> format_holders;
  auto add_format = [&format_holders](CLI::App* sub, const char* native) {
    format_holders.push_back(std::make_shared<std::string>(native));
    sub->add_option("--format", *format_holders.back(),
                    std::string("output format (") + native + ")")
        ->check(CLI::IsMember({std::string(native)}));
  };

  // ---- tile ----
  auto* tile = app.add_subcommand("tile", "Truchet tiling output");
  tile->require_subcommand(1);
  std::string t_alpha = "(2-1*sqrt(2))/2", t_beta = "(2-1*sqrt(2))/2";
  std::string t_x = "(0+1*sqrt(2))/4", t_y = "(2+1*sqrt(2))/4";
  std::string t_window = "30x15", t_sequences, t_out;
  long long t_renormalize = 0;
  long long t_tile_px = 20;
  bool t_no_grid = false;
  for (CLI::App* sub : {tile->add_subcommand("render", "write an SVG tiling"),
                        tile->add_subcommand("dump", "write a JSON window dump")}) {
    sub->add_option("--alpha", t_alpha, "first rotation parameter (scalar text)");
    sub->add_option("--beta", t_beta, "second rotation parameter");
    sub->add_option("--x", t_x, "first coding base point");
    sub->add_option("--y", t_y, "second coding base point");
    sub->add_option("--window", t_window, "window WxH centered at the origin");
    sub->add_option("--sequences", t_sequences, "explicit window JSON instead of rotation coding");
    sub->add_option("--renormalize", t_renormalize, "number of renormalization steps");
    sub->add_option("--tile-px", t_tile_px, "tile size in pixels (render)");
    sub->add_flag("--no-grid", t_no_grid, "omit the square grid (render)");
    sub->add_option("--out", t_out, "output path (default stdout)");
  }
  add_format(tile->get_subcommand("render"), "svg");
  add_format(tile->get_subcommand("dump"), "json");

  // ---- orbit ----
  auto* orbit = app.add_subcommand("orbit", "CSV dump of a lifted orbit");
  std::string o_alpha = "1/5", o_beta = "1/7", o_x = "0", o_y = "0", o_out;
  long long o_steps = 100;
  int o_vx = 1, o_vy = 0;
  orbit->add_option("--alpha", o_alpha);
  orbit->add_option("--beta", o_beta);
  orbit->add_option("--x", o_x);
  orbit->add_option("--y", o_y);
  orbit->add_option("--vx", o_vx);
  orbit->add_option("--vy", o_vy);
  orbit->add_option("--max-steps,--steps", o_steps);
  orbit->add_option("--out", o_out);
  add_format(orbit, "csv");

  // ---- measure ----
  auto* measure = app.add_subcommand("measure", "return-time cocycle table and limit summary");
  std::string m_alpha = "(2-1*sqrt(2))/2", m_beta = "(2-1*sqrt(2))/2", m_itinerary, m_out,
              m_summary;
  long long m_depth = 30;
  std::string m_tol = "1/1000000";
  auto* m_alpha_opt = measure->add_option("--alpha", m_alpha);
  auto* m_beta_opt = measure->add_option("--beta", m_beta);
  measure->add_option("--itinerary", m_itinerary, "pair itinerary JSON file");
  auto* m_depth_opt = measure->add_option("--depth", m_depth);
  measure->add_option("--tol", m_tol, "convergence tolerance (scalar text)");
  measure->add_option("--out", m_out);
  measure->add_option("--summary", m_summary, "write the JSON summary to this path");
  add_format(measure, "csv");

  // ---- mc-periodic ----
  auto* mc = app.add_subcommand("mc-periodic", "Monte Carlo periodic-orbit census");
  std::string mc_alpha = "(2-1*sqrt(2))/2", mc_beta = "(2-1*sqrt(2))/2", mc_out, mc_itinerary;
  long long mc_samples = 100000, mc_max_period = 4;
  std::uint64_t mc_seed = 1;
  int mc_workers = 0;
  mc->add_option("--alpha", mc_alpha);
  mc->add_option("--beta", mc_beta);
  mc->add_option("--itinerary", mc_itinerary, "pair itinerary JSON file");
  auto* mc_samples_opt = mc->add_option("--samples", mc_samples);
  mc->add_option("--max-steps,--max-period", mc_max_period);
  auto* mc_seed_opt = mc->add_option("--seed", mc_seed);
  mc->add_option("--workers", mc_workers, "0 = logical cores");
  mc->add_option("--out", mc_out);
  add_format(mc, "json");

  // ---- verify ----
  auto* verify = app.add_subcommand("verify", "machine-readable pass/fail property suite");
  std::vector<std::string> v_properties;
  long long v_samples = 100, v_grid = 20;
  std::uint64_t v_seed = 7;
  std::string v_fault, v_out;
  verify->add_option("--property", v_properties,
                     "subset of: renormalization, return-time, collapse, rotation-collapse, scaling");
  verify->add_option("--samples", v_samples, "samples per property");
  verify->add_option("--grid", v_grid, "scaling grid size");
  verify->add_option("--seed", v_seed);
  verify->add_option("--inject-fault", v_fault, "mutation smoke test: 'curve-sign'");
  verify->add_option("--out", v_out);
  add_format(verify, "json");

  // ---- construct-small-measure ----
  auto* construct = app.add_subcommand("construct-small-measure",
                                       "itinerary with certified slow measure decay");
  std::string c_eta = "1/2", c_out, c_certificate;
  long long c_stages = 4, c_k_cap = 1 << 20;
  auto* c_eta_opt = construct->add_option("--eta", c_eta, "decay budget in (0,1)");
  construct->add_option("--stages", c_stages, "number of certified stages");
  construct->add_option("--k-cap", c_k_cap, "block-length search cap");
  construct->add_option("--out", c_out, "itinerary JSON path (default stdout)");
  construct->add_option("--certificate", c_certificate, "certificate JSON path");
  add_format(construct, "json");

  // ---- sweep ----
  auto* sweep = app.add_subcommand("sweep", "parameter-grid CSV of measure values");
  long long s_grid = 20, s_depth = 8, s_mc_samples = 0, s_max_period = 4;
  std::uint64_t s_seed = 1;
  int s_workers = 0;
  std::string s_out;
  auto* s_grid_opt = sweep->add_option("--grid", s_grid, "grid size per axis");
  auto* s_depth_opt = sweep->add_option("--depth", s_depth);
  sweep->add_option("--mc-samples", s_mc_samples, "optional Monte Carlo column (0 = off)");
  sweep->add_option("--max-period", s_max_period);
  sweep->add_option("--seed", s_seed);
  sweep->add_option("--workers", s_workers);
  sweep->add_option("--out", s_out);
  add_format(sweep, "csv");

  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
    sub->fallthrough();
    for (CLI::App* nested : sub->get_subcommands([](const CLI::App*) { return true; }))
      nested->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  Config cfg;
  if (!config_path.empty()) cfg.file = io::read_json_file(config_path);

  if (tile->parsed()) {
    cfg.fill_scalar(nullptr, "alpha", t_alpha);
    cfg.fill_scalar(nullptr, "beta", t_beta);
    WindowSpec w = parse_window(t_window);
    tiling::Tiling t = build_tiling(t_sequences, t_alpha, t_beta, t_x, t_y);
    // chained renormalizations consume kept-index range; give the inner
    // passes geometric margin
    for (long long i = 0; i < t_renormalize; ++i) {
      long long remaining = t_renormalize - 1 - i;
      long long hm = std::max(std::llabs(w.mlo), std::llabs(w.mhi)) + 2;
      long long hn = std::max(std::llabs(w.nlo), std::llabs(w.nhi)) + 2;
      for (long long r = 0; r < remaining; ++r) {
        hm = 4 * hm + 4;
        hn = 4 * hn + 4;
      }
      t = tiling::renormalize_tiling(t, -hm, hm, -hn, hn);
    }
    if (tile->get_subcommand("render")->parsed()) {
      tiling::SvgStyle style;
      style.tile_px = static_cast<int>(t_tile_px);
      style.draw_grid = !t_no_grid;
      Output{t_out}.write(tiling::render_svg(t, w.mlo, w.mhi, w.nlo, w.nhi, style));
    } else {
      Output{t_out}.write(io::window_dump(t, w.mlo, w.mhi, w.nlo, w.nhi).dump(2) + "\n");
    }
    return kExitOk;
  }

  if (orbit->parsed()) {
    Scalar alpha = Scalar::parse(o_alpha), beta = Scalar::parse(o_beta);
    pet::LiftState st{Scalar::parse(o_x), Scalar::parse(o_y), {o_vx, o_vy}};
    json effective = {{"alpha", o_alpha}, {"beta", o_beta}, {"x", o_x}, {"y", o_y},
                      {"vx", o_vx},       {"vy", o_vy},     {"steps", o_steps}};
    std::string out = csv_header_comments(report_header("orbit", effective));
    out += "step,x,y,vx,vy\n";
    for (long long k = 0; k <= o_steps; ++k) {
      out += std::to_string(k) + "," + st.x.str() + "," + st.y.str() + "," +
             std::to_string(st.v.a) + "," + std::to_string(st.v.b) + "\n";
      st = pet::psi_lift_step(st, alpha, beta);
    }
    Output{o_out}.write(out);
    return kExitOk;
  }

  if (measure->parsed()) {
    cfg.fill_scalar(m_alpha_opt, "alpha", m_alpha);
    cfg.fill_scalar(m_beta_opt, "beta", m_beta);
    cfg.fill(m_depth_opt, "depth", m_depth);
    Scalar alpha, beta;
    json caveats;
    if (!m_itinerary.empty()) {
      json j = io::read_json_file(m_itinerary);
      auto ea = params::param_from_itinerary(io::itinerary_from_json(j.at("alpha")));
      auto eb = params::param_from_itinerary(io::itinerary_from_json(j.at("beta")));
      alpha = ea.midpoint();
      beta = eb.midpoint();
      caveats = {{"alpha_enclosure_width", ea.width().str()},
                 {"beta_enclosure_width", eb.width().str()}};
    } else {
      alpha = Scalar::parse(m_alpha);
      beta = Scalar::parse(m_beta);
    }
    auto lim = cc::ns_limit(alpha, beta, m_depth, Scalar::parse(m_tol));
    auto acc = cc::accumulate(alpha, beta, m_depth);
    json effective = {{"alpha", alpha.str()}, {"beta", beta.str()}, {"depth", m_depth},
                      {"tol", m_tol}};
    if (!caveats.is_null()) effective["itinerary_caveats"] = caveats;
    json header = report_header("measure", effective);
    json summary = {{"last_value", lim.last_value.str()},
                    {"last_value_dec", io::decimal15(lim.last_value)},
                    {"converged", lim.converged},
                    {"certified_zero", lim.certified_zero},
                    {"ratio_lo", lim.ratio_lo},
                    {"ratio_hi", lim.ratio_hi}};
    if (acc.boundary_at) summary["boundary_at"] = *acc.boundary_at;
    header["summary"] = summary;
    std::string out = csv_header_comments(header);
    out += "k,alpha_k,beta_k,d_k,nu_O_kplus1,alpha_k_dec,beta_k_dec,d_k_dec,nu_O_kplus1_dec\n";
    for (const auto& st : acc.states) {
      out += std::to_string(st.k) + "," + st.alpha_k.str() + "," + st.beta_k.str() + "," +
             st.d_k.str() + "," + st.nu_O_kplus1.str() + "," + io::decimal15(st.alpha_k) + "," +
             io::decimal15(st.beta_k) + "," + io::decimal15(st.d_k) + "," +
             io::decimal15(st.nu_O_kplus1) + "\n";
    }
    Output{m_out}.write(out);
    if (!m_summary.empty()) Output{m_summary}.write(header.dump(2) + "\n");
    return kExitOk;
  }

  if (mc->parsed()) {
    cfg.fill(mc_samples_opt, "samples", mc_samples);
    cfg.fill(mc_seed_opt, "seed", mc_seed);
    Scalar alpha, beta;
    json caveats;
    if (!mc_itinerary.empty()) {
      json j = io::read_json_file(mc_itinerary);
      auto ea = params::param_from_itinerary(io::itinerary_from_json(j.at("alpha")));
      auto eb = params::param_from_itinerary(io::itinerary_from_json(j.at("beta")));
      alpha = ea.midpoint();
      beta = eb.midpoint();
      caveats = {{"alpha_enclosure_width", ea.width().str()},
                 {"beta_enclosure_width", eb.width().str()}};
    } else {
      alpha = Scalar::parse(mc_alpha);
      beta = Scalar::parse(mc_beta);
    }
    auto rep = pet::periodic_measure_mc(alpha, beta, mc_samples, mc_max_period, mc_seed,
                                        mc_workers);
    json effective = {{"alpha", alpha.str()}, {"beta", beta.str()},  {"samples", mc_samples},
                      {"max_period", mc_max_period}, {"seed", mc_seed}, {"rng", truchet::kRngName}};
    if (!caveats.is_null()) effective["itinerary_caveats"] = caveats;
    json out = report_header("mc-periodic", effective);
    out["fraction_periodic"] = rep.fraction_periodic;
    out["fraction_period4"] = rep.fraction_period4;
    out["stderr_periodic"] = rep.stderr_periodic;
    out["stderr_period4"] = rep.stderr_period4;
    out["periodic_count"] = rep.periodic_count;
    out["period4_count"] = rep.period4_count;
    out["expected_period4"] = (Scalar(4) * alpha * beta).to_double();
    Output{mc_out}.write(out.dump(2) + "\n");
    return kExitOk;
  }

  if (verify->parsed()) {
    bool inject = v_fault == "curve-sign";
    if (!v_fault.empty() && !inject) throw CLI::ValidationError("--inject-fault", "unknown fault");
    std::vector<std::string> props = v_properties;
    if (props.empty())
      props = {"renormalization", "return-time", "collapse", "rotation-collapse", "scaling"};
    json effective = {{"properties", props}, {"samples", v_samples}, {"grid", v_grid},
                      {"seed", v_seed},      {"inject_fault", v_fault}};
    json out = report_header("verify", effective);
    json results = json::array();
    bool all_pass = true;
    for (const std::string& p : props) {
      std::cerr << "verify: " << p << "...\n";
      PropertyResult res;
      if (p == "renormalization")
        res = verify_renorm_property(v_samples, v_seed);
      else if (p == "return-time")
        res = verify_return_time_property(std::max<long long>(v_samples, 100) * 10, v_seed, inject);
      else if (p == "collapse")
        res = verify_collapse_property(std::max<long long>(v_samples, 100) * 10, v_seed);
      else if (p == "rotation-collapse")
        res = verify_rotation_collapse_property(std::max<long long>(v_samples, 100) * 10, v_seed);
      else if (p == "scaling")
        res = verify_scaling_property(v_grid);
      else
        throw CLI::ValidationError("--property", "unknown property " + p);
      all_pass = all_pass && res.pass;
      results.push_back({{"name", res.name},
                         {"pass", res.pass},
                         {"checks", res.checks},
                         {"failures", res.failures}});
    }
    out["properties"] = results;
    out["all_pass"] = all_pass;
    Output{v_out}.write(out.dump(2) + "\n");
    return all_pass ? kExitOk : kExitPropertyFailure;
  }

  if (construct->parsed()) {
    cfg.fill_scalar(c_eta_opt, "eta", c_eta);
    Scalar eta = Scalar::parse(c_eta);
    auto built = params::construct_small_measure(eta, c_stages, c_k_cap);
    const auto& sched = built.schedule;
    json effective = {{"eta", c_eta}, {"stages", c_stages}, {"k_cap", c_k_cap}};
    json itinerary;
    itinerary["alpha"] = io::itinerary_to_json(built.itinerary.alpha);
    itinerary["beta"] = io::itinerary_to_json(built.itinerary.beta);
    json k_schedule = json::array();
    for (const BigInt& k : sched.k_schedule) k_schedule.push_back(k.str());
    itinerary["k_schedule"] = k_schedule;
    itinerary["marks"] = sched.marks;

    json cert = report_header("construct-small-measure", effective);
    json stages = json::array();
    for (const auto& st : sched.stages)
      stages.push_back({{"j", st.j},
                        {"eps", st.eps.str()},
                        {"k", st.k.str()},
                        {"swapped", st.swapped},
                        {"margin", st.margin.str()},
                        {"inequality", st.inequality}});
    cert["stages"] = stages;
    cert["verified_product"] = sched.verified_product.str();
    cert["verified_product_dec"] = io::decimal15(sched.verified_product);
    cert["ns_lower_bound"] = sched.ns_lower_bound.str();
    cert["ns_lower_bound_dec"] = io::decimal15(sched.ns_lower_bound);
    cert["alpha_enclosure"] = {built.alpha_enclosure.lo.str(), built.alpha_enclosure.hi.str()};
    cert["beta_enclosure"] = {built.beta_enclosure.lo.str(), built.beta_enclosure.hi.str()};
    cert["note"] =
        "stages beyond the emitted prefix follow the same minimal-k search; "
        "each is a finite exact check";

    if (!c_out.empty()) {
      Output{c_out}.write(itinerary.dump(2) + "\n");
    }
    if (!c_certificate.empty()) {
      Output{c_certificate}.write(cert.dump(2) + "\n");
    }
    if (c_out.empty() && c_certificate.empty()) {
      json both = {{"itinerary", itinerary}, {"certificate", cert}};
      Output{}.write(both.dump(2) + "\n");
    }
    return kExitOk;
  }

  if (sweep->parsed()) {
    cfg.fill(s_grid_opt, "grid", s_grid);
    cfg.fill(s_depth_opt, "depth", s_depth);
    json effective = {{"grid", s_grid},           {"depth", s_depth},
                      {"mc_samples", s_mc_samples}, {"max_period", s_max_period},
                      {"seed", s_seed},           {"rng", truchet::kRngName}};
    long long cells = s_grid * s_grid;
    std::vector<std::string> rows(static_cast<size_t>(cells));
    int workers = s_workers > 0 ? s_workers : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    std::atomic<long long> next{0};
    auto work = [&]() {
      for (;;) {
        long long cell = next.fetch_add(1);
        if (cell >= cells) return;
        long long i = cell / s_grid, j = cell % s_grid;
        Scalar a = Scalar(2 * i + 1) / Scalar(4 * s_grid);
        Scalar b = Scalar(2 * j + 1) / Scalar(4 * s_grid);
        auto acc = cc::accumulate(a, b, s_depth);
        std::string row = a.str() + "," + b.str() + "," +
                          acc.states.back().nu_O_kplus1.str() + "," +
                          io::decimal15(acc.states.back().nu_O_kplus1);
        if (s_mc_samples > 0) {
          auto rep = pet::periodic_measure_mc(a, b, s_mc_samples, s_max_period,
                                              s_seed + static_cast<std::uint64_t>(cell), 1);
          row += "," + std::to_string(rep.fraction_periodic) + "," +
                 std::to_string(rep.fraction_period4);
        }
        rows[static_cast<size_t>(cell)] = row;
        if (cell % s_grid == 0) std::cerr << "sweep: row " << i << "/" << s_grid << "\n";
      }
    };
    std::vector<std::thread> pool;
    for (int w_i = 1; w_i < workers; ++w_i) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    std::string out = csv_header_comments(report_header("sweep", effective));
    out += "alpha,beta,nu_O_depthplus1,nu_O_depthplus1_dec";
    if (s_mc_samples > 0) out += ",mc_fraction_periodic,mc_fraction_period4";
    out += "\n";
    for (const std::string& r : rows) out += r + "\n";
    Output{s_out}.write(out);
    return kExitOk;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const truchet::pet::cap_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResourceCap;
  } catch (const truchet::params::search_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResourceCap;
  } catch (const truchet::tiling::nuc_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResourceCap;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
