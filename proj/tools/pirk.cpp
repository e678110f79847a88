#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <vector>

#include "pirk/nlwave_bench.hpp"
#include "pirk/ode_bench.hpp"
#include "pirk/report.hpp"
#include "pirk/stability.hpp"
#include "pirk/wave_bench.hpp"

using namespace pirk;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitRunFailure = 3;

SchemeId require_scheme(const std::string& name) {
  auto id = SchemeId::parse(name);
  if (!id) throw ConfigError("unknown scheme: " + name);
  return *id;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

std::vector<double> parse_range(const std::string& spec) {
  // "a:b:step" inclusive
  double a, b, step;
  char c1, c2;
  std::istringstream is(spec);
  if (!(is >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' ||
      step <= 0 || b < a)
    throw CLI::ValidationError("--c1-range", "expected a:b:step, got " + spec);
  std::vector<double> vals;
  for (double v = a; v <= b + 0.5 * step; v += step) vals.push_back(v);
  return vals;
}

void summary_line(const std::string& text) { std::cout << text << "\n"; }

struct CommonOpts {
  std::string scheme = "pirk2a";
  std::string out;
  int stride = 1;
  double t_end = -1.0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--scheme", o.scheme, "time integration scheme id");
  cmd->add_option("--out", o.out, "CSV output path");
  cmd->add_option("--stride", o.stride, "record every n-th sample")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--t-end", o.t_end, "final time");
}

int run_ode(const CommonOpts& o, double sigma, double phi_over_pi, double dt) {
  const auto scheme = require_scheme(o.scheme);
  const double t_end = o.t_end > 0 ? o.t_end : 1000.0;
  auto rep = run_ode_experiment(scheme, sigma, phi_over_pi * M_PI, dt, t_end,
                                o.stride);
  if (!o.out.empty()) {
    auto f = open_out(o.out);
    CsvWriter csv(f, {"t", "u", "v", "u_exact", "v_exact", "l2norm"});
    for (const auto& s : rep.samples)
      csv.row(std::vector<double>{s.t, s.u_num, s.v_num, s.u_ana, s.v_ana,
                                  s.l2});
  }
  const int stages = make_stepper(scheme)->stages();
  std::ostringstream msg;
  msg << "scheme=" << scheme.name() << " dt=" << format_double(dt)
      << " stages=" << stages
      << " cost=" << format_double(stages / dt)
      << " verdict=" << (rep.stable ? "stable" : "unstable")
      << " l2norm=" << format_double(rep.l2_at_verdict);
  summary_line(msg.str());
  return rep.failed ? kExitRunFailure : 0;
}

int run_wave(const CommonOpts& o, const WaveConfig& cfg) {
  auto rep = run_wave_experiment(cfg);
  if (!o.out.empty()) {
    auto f = open_out(o.out);
    CsvWriter csv(f, {"t", "l2norm"});
    for (const auto& s : rep.samples)
      csv.row(std::vector<double>{s.t, s.l2});
  }
  const int stages = make_stepper(cfg.scheme)->stages();
  std::ostringstream msg;
  msg << "scheme=" << cfg.scheme.name() << " dt=" << format_double(rep.dt)
      << " stages=" << stages
      << " cost=" << format_double(stages / rep.dt)
      << " verdict=" << (rep.stable ? "stable" : "unstable")
      << " l2norm=" << format_double(rep.l2_at_verdict);
  summary_line(msg.str());
  return rep.failed ? kExitRunFailure : 0;
}

int run_nlwave(const CommonOpts& o, NlWaveConfig cfg, double cfl,
               const std::vector<double>& cfl_list) {
  cfg.scheme = require_scheme(o.scheme);
  if (o.t_end > 0) cfg.t_end = o.t_end;
  if (!cfl_list.empty()) {
    if (!o.out.empty()) {
      auto f = open_out(o.out);
      CsvWriter csv(f, {"cfl", "error_h", "stable"});
      for (double c : cfl_list) {
        auto rep = run_nlwave_experiment(cfg, c);
        csv.row(std::vector<double>{c, rep.error_h,
                                    rep.stable ? 1.0 : 0.0});
      }
    }
    auto m = max_stable_cfl(cfg, cfl_list);
    summary_line("scheme=" + cfg.scheme.name() + " max_stable_cfl=" +
                 (m ? format_double(*m) : std::string("none")));
    return 0;
  }
  auto rep = run_nlwave_experiment(cfg, cfl);
  if (!o.out.empty()) {
    auto f = open_out(o.out);
    CsvWriter csv(f, {"t", "H", "T", "P", "V", "a_cosx", "a_cos3x", "a_sinx",
                      "rel_dH"});
    for (const auto& s : rep.samples)
      csv.row(std::vector<double>{s.t, s.ham.total, s.ham.kinetic,
                                  s.ham.gradient, s.ham.potential, s.a_cosx,
                                  s.a_cos3x, s.a_sinx, s.rel_dh});
  }
  const int stages = make_stepper(cfg.scheme)->stages();
  std::ostringstream msg;
  msg << "scheme=" << cfg.scheme.name() << " dt=" << format_double(rep.dt)
      << " stages=" << stages
      << " cost=" << format_double(stages / rep.dt)
      << " verdict=" << (rep.stable ? "stable" : "unstable")
      << " error_h=" << format_double(rep.error_h);
  summary_line(msg.str());
  return rep.failed ? kExitRunFailure : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partially implicit Runge-Kutta experiment runner"};
  app.require_subcommand(1);

  // ode
  auto* ode = app.add_subcommand("ode", "damped oscillator test problem");
  CommonOpts ode_o;
  add_common(ode, ode_o);
  double sigma = 0.0, phi_over_pi = 0.5, ode_dt = 0.1;
  ode->add_option("--sigma", sigma, "damping (<= 0)");
  ode->add_option("--phi-over-pi", phi_over_pi, "phase / pi, in (0, 0.5]");
  ode->add_option("--dt", ode_dt, "time step")->required();

  // wave
  auto* wave = app.add_subcommand("wave", "linear scalar wave equation");
  CommonOpts wave_o;
  add_common(wave, wave_o);
  WaveConfig wcfg;
  std::string coords = "spherical";
  std::vector<int> mode_nlm;
  double wave_cfl = 0.5;
  wave->add_option("--coords", coords)
      ->check(CLI::IsMember({"spherical", "cartesian"}));
  wave->add_option("--dims", wcfg.dims)->check(CLI::Range(1, 3));
  wave->add_option("--nr", wcfg.nr);
  wave->add_option("--ntheta", wcfg.ntheta);
  wave->add_option("--nphi", wcfg.nphi);
  wave->add_option("--space-order", wcfg.space_order);
  wave->add_option("--cfl", wave_cfl, "dt = cfl * dt_max")->required();
  wave->add_option("--mode", mode_nlm, "n,l,m")->delimiter(',')->expected(3);
  wave->add_option("--abort-threshold", wcfg.abort_threshold);

  // nlwave
  auto* nl = app.add_subcommand("nlwave", "nonlinear wave equation");
  CommonOpts nl_o;
  add_common(nl, nl_o);
  NlWaveConfig ncfg;
  double nl_cfl = 0.5;
  std::string cfl_list_spec;
  nl->add_option("--points", ncfg.n_points);
  nl->add_option("--amplitude", ncfg.amplitude);
  auto* nl_cfl_opt = nl->add_option("--cfl", nl_cfl);
  auto* nl_list_opt =
      nl->add_option("--cfl-list", cfl_list_spec, "comma-separated scan grid");
  nl_cfl_opt->excludes(nl_list_opt);

  // stability-scan
  auto* scan = app.add_subcommand(
      "stability-scan", "empirical stability region over coefficients x CFL");
  CommonOpts scan_o;
  add_common(scan, scan_o);
  int scan_order = 1;
  std::string c1_spec = "0.5:2.0:0.05", c2_spec, scan_cfl_spec = "0.5";
  int scan_nr = 100, scan_ntheta = 32, scan_dims = 2;
  scan->add_option("--order", scan_order, "scheme family order (1..3)")
      ->check(CLI::Range(1, 3));
  scan->add_option("--c1-range", c1_spec, "a:b:step");
  scan->add_option("--c2-range", c2_spec, "a:b:step");
  scan->add_option("--cfl-list", scan_cfl_spec);
  scan->add_option("--nr", scan_nr);
  scan->add_option("--ntheta", scan_ntheta);
  scan->add_option("--dims", scan_dims)->check(CLI::Range(1, 3));

  // convergence
  auto* conv = app.add_subcommand("convergence",
                                  "temporal convergence of the wave solver");
  CommonOpts conv_o;
  add_common(conv, conv_o);
  int conv_nr = 50, conv_order = 4, conv_dims = 1;
  double conv_cfl = 0.8;
  std::vector<int> conv_factors = {2, 4, 8};
  conv->add_option("--nr", conv_nr);
  conv->add_option("--space-order", conv_order);
  conv->add_option("--dims", conv_dims)->check(CLI::Range(1, 3));
  conv->add_option("--cfl", conv_cfl);
  conv->add_option("--factors", conv_factors)->delimiter(',');

  // verify-pirk4
  auto* ver = app.add_subcommand(
      "verify-pirk4", "check |det(M)| <= 1 for the fourth-order scheme");
  std::string ver_out;
  double s_min = -27.0;
  std::vector<double> ver_coeffs;
  ver->add_option("--s-min", s_min, "left end of the tested interval");
  ver->add_option("--coeffs", ver_coeffs, "five tableau coefficients")
      ->delimiter(',')
      ->expected(5);
  ver->add_option("--out", ver_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*ode) return run_ode(ode_o, sigma, phi_over_pi, ode_dt);

    if (*wave) {
      wcfg.coords =
          coords == "cartesian" ? Coords::Cartesian : Coords::Spherical;
      wcfg.scheme = require_scheme(wave_o.scheme);
      wcfg.cfl = wave_cfl;
      if (wave_o.t_end > 0) wcfg.t_end = wave_o.t_end;
      if (!mode_nlm.empty()) {
        wcfg.mode_n = mode_nlm[0];
        wcfg.mode_l = mode_nlm[1];
        wcfg.mode_m = mode_nlm[2];
      }
      return run_wave(wave_o, wcfg);
    }

    if (*nl) {
      std::vector<double> cfl_list;
      if (!cfl_list_spec.empty()) {
        std::istringstream is(cfl_list_spec);
        std::string tok;
        while (std::getline(is, tok, ',')) cfl_list.push_back(std::stod(tok));
      }
      return run_nlwave(nl_o, ncfg, nl_cfl, cfl_list);
    }

    if (*scan) {
      const auto c1_vals = parse_range(c1_spec);
      std::vector<double> c2_vals = {0.0};
      if (!c2_spec.empty()) c2_vals = parse_range(c2_spec);
      std::vector<double> cfls;
      {
        std::istringstream is(scan_cfl_spec);
        std::string tok;
        while (std::getline(is, tok, ',')) cfls.push_back(std::stod(tok));
      }
      std::vector<std::vector<double>> c_grid;
      for (double c1 : c1_vals)
        for (double c2 : c2_vals) {
          if (scan_order == 1)
            c_grid.push_back({c1});
          else
            c_grid.push_back({c1, c2});
        }
      const int order = scan_order;
      const int dims = scan_dims, nr = scan_nr, ntheta = scan_ntheta;
      StabilityProbe probe = [&](std::span<const double> C,
                                 double cfl) -> double {
        WaveConfig cfg;
        cfg.dims = dims;
        cfg.nr = nr;
        cfg.ntheta = dims >= 2 ? ntheta : 1;
        cfg.cfl = cfl;
        if (scan_o.t_end > 0) cfg.t_end = scan_o.t_end;
        switch (order) {
          case 1: cfg.scheme = SchemeId::pirk1_custom(C[0]); break;
          case 2: cfg.scheme = SchemeId::pirk2_custom(C[0], C[1]); break;
          default: cfg.scheme = SchemeId::pirk3_custom(C[0], C[1]); break;
        }
        auto rep = run_wave_experiment(cfg);
        return rep.failed ? std::numeric_limits<double>::infinity()
                          : rep.l2_at_verdict;
      };
      auto table = scan_stability_region(probe, c_grid, cfls);
      if (!scan_o.out.empty()) {
        auto f = open_out(scan_o.out);
        std::vector<std::string> header = {"c1"};
        if (scan_order > 1) header.push_back("c2");
        header.insert(header.end(), {"cfl", "l2norm", "stable"});
        CsvWriter csv(f, header);
        for (const auto& e : table.entries) {
          std::vector<double> row(e.C.begin(), e.C.end());
          row.insert(row.end(), {e.cfl, e.norm, e.stable ? 1.0 : 0.0});
          csv.row(row);
        }
        auto fb = open_out(scan_o.out + ".boundary");
        CsvWriter bcsv(fb, {"cfl", "c_min", "c_max", "any_stable"});
        for (const auto& b : table.boundary)
          bcsv.row(std::vector<double>{b.cfl, b.c_min, b.c_max,
                                       b.any_stable ? 1.0 : 0.0});
      }
      int stable_count = 0;
      for (const auto& e : table.entries) stable_count += e.stable;
      summary_line("scan entries=" + std::to_string(table.entries.size()) +
                   " stable=" + std::to_string(stable_count));
      return 0;
    }

    if (*conv) {
      auto st = convergence_study(require_scheme(conv_o.scheme), conv_dims,
                                  Coords::Spherical, conv_nr, conv_factors,
                                  conv_order, conv_cfl);
      if (!conv_o.out.empty()) {
        auto f = open_out(conv_o.out);
        CsvWriter csv(f, {"factor", "dt", "error"});
        for (const auto& p : st.points)
          csv.row(std::vector<double>{static_cast<double>(p.factor), p.dt,
                                      p.error});
      }
      summary_line("scheme=" + conv_o.scheme +
                   " slope=" + format_double(st.slope));
      return 0;
    }

    if (*ver) {
      std::array<double, 5> C = pirk4_default_coefficients();
      if (!ver_coeffs.empty())
        std::copy_n(ver_coeffs.begin(), 5, C.begin());
      auto patterns = omega_patterns_3x3();
      auto res = verify_pirk4_interval(C, s_min, patterns);
      if (!ver_out.empty()) {
        auto f = open_out(ver_out);
        CsvWriter csv(f, {"s_min", "max_abs_det", "ok", "s_fail", "w1_fail",
                          "w2_fail"});
        csv.row(std::vector<double>{s_min, res.max_abs_det,
                                    res.ok ? 1.0 : 0.0, res.s_fail,
                                    res.w1_fail, res.w2_fail});
      }
      std::ostringstream msg;
      if (res.ok) {
        msg << "pass [" << format_double(s_min) << ",0] max|det|="
            << format_double(res.max_abs_det);
      } else {
        // bisect the feasible left end for the summary
        double lo = s_min, hi = 0.0;
        for (int it = 0; it < 40; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (verify_pirk4_interval(C, mid, patterns, 512).ok)
            hi = mid;
          else
            lo = mid;
        }
        msg << "fail [" << format_double(s_min) << ",0] max|det|="
            << format_double(res.max_abs_det) << " at s="
            << format_double(res.s_fail) << " (pass ["
            << format_double(hi) << ",0])";
      }
      summary_line(msg.str());
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitRunFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRunFailure;
  }
  return 0;
}
