#include "multifrac/cli/app.hpp"

#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <string>

#include "CLI11.hpp"
#include "multifrac/cli/config.hpp"
#include "multifrac/cli/emit.hpp"
#include "multifrac/conjugacy.hpp"
#include "multifrac/distribution.hpp"
#include "multifrac/multifractal.hpp"
#include "multifrac/parallel.hpp"

namespace multifrac::cli {
namespace {

using nlohmann::json;

struct Invocation {
  std::string command;
  std::string config_path;
  std::string out_dir;
  int threads = 0;
  int depth_override = 0;
};

struct Scene {
  SceneConfig config;
  std::shared_ptr<const Ifs> ifs;
  std::shared_ptr<const Ifs> ifs_g;
  unsigned threads = 1;
  std::string out_dir;

  std::string path(const std::string& name) const { return (std::filesystem::path(out_dir) / name).string(); }
};

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ';';
  }
  return s;
}

std::string normalization_note(double shift) {
  return "psi normalized to zero pressure, P(psi)=" + format_number(shift) + " subtracted";
}

Metadata metadata(const Scene& scene, double shift, std::vector<std::string> extra = {}) {
  return {scene.config.hash(), normalization_note(shift), std::move(extra)};
}

void emit_curves(const Scene& scene, const PressureCurve& curve, const SpectrumCurve& spectrum, double shift) {
  CsvTable pressure{{"beta", "t", "t_err", "alpha", "alpha_crosscheck"}, {}};
  for (std::size_t i = 0; i < curve.beta.size(); ++i) {
    pressure.add({curve.beta[i], curve.t[i], curve.t_error[i], curve.alpha[i], curve.alpha_crosscheck[i]});
  }
  write_file(scene.path("pressure.csv"),
             render_csv(pressure, metadata(scene, shift,
                                           {"min_second_difference: " + format_number(curve.min_second_difference()),
                                            "max_alpha_increase: " + format_number(curve.max_alpha_increase())})));

  CsvTable table{{"beta", "t", "alpha", "f", "err"}, {}};
  std::vector<std::string> extra{"f clamped at 0 for reporting; raw values of clamped rows follow",
                                 "spectrum endpoints are asymptotic, not attained"};
  for (std::size_t i = 0; i < spectrum.samples.size(); ++i) {
    const SpectrumSample& s = spectrum.samples[i];
    table.add({s.beta, curve.t[i], s.alpha, s.f, s.error});
    if (s.f_raw < 0.0) extra.push_back("clamped beta=" + format_number(s.beta) + " f_raw=" + format_number(s.f_raw));
  }
  write_file(scene.path("spectrum.csv"), render_csv(table, metadata(scene, shift, std::move(extra))));
}

MarkovMeasure scene_measure(const Scene& scene, double* shift) {
  PressureOptions options = pressure_options(scene.config);
  options.approximation_depth = scene.config.depths.measure;
  const Potential psi = build_psi(scene.config, scene.ifs, scene.ifs_g);
  MarkovMeasure mu = MarkovMeasure::from_potential(psi, options);
  *shift = mu.pressure_shift();
  return mu;
}

int cmd_validate(const Scene& scene, std::ostream& out, std::ostream& err) {
  bool passed = true;
  std::string reason;
  const ValidationReport report = validate_ifs(scene.config.ifs);
  out << "ifs: " << report.summary() << '\n';
  if (!report.passed) {
    passed = false;
    reason = "ifs: " + report.summary();
  }
  if (scene.config.ifs_g) {
    const ValidationReport g = validate_ifs(*scene.config.ifs_g);
    out << "ifs_g: " << g.summary() << '\n';
    if (!g.passed) {
      passed = false;
      if (reason.empty()) reason = "ifs_g: " + g.summary();
    } else if (report.passed) {
      try {
        ConjugacyPair::create(Ifs::make_shared(scene.config.ifs), Ifs::make_shared(*scene.config.ifs_g),
                              pressure_options(scene.config));
        out << "conjugacy: ok\n";
      } catch (const ValidationError& e) {
        out << "conjugacy: " << e.what() << '\n';
        passed = false;
        if (reason.empty()) reason = std::string("conjugacy: ") + e.what();
      }
    }
  }
  if (report.passed) {
    const auto ifs = Ifs::make_shared(scene.config.ifs);
    std::shared_ptr<const Ifs> ifs_g;
    if (scene.config.ifs_g && validate_ifs(*scene.config.ifs_g).passed) ifs_g = Ifs::make_shared(*scene.config.ifs_g);
    try {
      build_psi(scene.config, ifs, ifs_g);
      out << "potential: ok\n";
    } catch (const Error& e) {
      out << "potential: " << e.what() << '\n';
      passed = false;
      if (reason.empty()) reason = std::string("potential: ") + e.what();
    }
  }
  out << "status: " << (passed ? "pass" : "fail") << '\n';
  if (!passed) {
    err << "multifrac: error kind=validation reason=" << one_line(reason) << '\n';
    return 2;
  }
  return 0;
}

int cmd_spectrum(const Scene& scene) {
  const Potential psi = build_psi(scene.config, scene.ifs, scene.ifs_g);
  const MultifractalProblem problem =
      MultifractalProblem::create(Potential::geometric(scene.ifs), psi, pressure_options(scene.config));
  const PressureCurve curve = pressure_curve(problem, scene.config.beta_grid.values(), scene.threads);
  const SpectrumCurve spectrum = legendre_spectrum(curve);
  const SpectrumRange range = spectrum_range(problem, scene.config.range.cycle_length, scene.config.range.beta_max);
  const SpectrumClass cls = classify_spectrum(range, spectrum.apex_f);
  emit_curves(scene, curve, spectrum, problem.psi_shift());

  json r;
  r["alpha_minus"] = range.alpha_minus;
  r["alpha_plus"] = range.alpha_plus;
  r["cycle"] = {{"length", range.cycle_length}, {"alpha_minus", range.cycle_minus}, {"alpha_plus", range.cycle_plus}};
  r["asymptotic"] = {{"beta_max", range.beta_max},
                     {"alpha_minus", range.asymptotic_minus},
                     {"alpha_plus", range.asymptotic_plus}};
  r["disagreement"] = range.disagreement;
  r["disagreement_flag"] = range.disagreement_flag;
  r["degenerate"] = cls.degenerate;
  r["apex_consistent"] = cls.apex_consistent;
  r["apex"] = {{"alpha", spectrum.apex_alpha}, {"f", spectrum.apex_f}};
  r["max_direct_gap"] = spectrum.max_direct_gap;
  r["endpoints"] = "asymptotic";
  r["approximation_depth"] = problem.depth();
  r["exact_tables"] = problem.exact();
  r["tool_version"] = kToolVersion;
  r["config_hash"] = "fnv1a64:" + scene.config.hash();
  r["normalization"] = normalization_note(problem.psi_shift());
  write_file(scene.path("range.json"), render_json(r));
  return 0;
}

int cmd_staircase(const Scene& scene) {
  double shift = 0.0;
  const MarkovMeasure mu = scene_measure(scene, &shift);
  const auto samples = staircase(mu, *scene.ifs, scene.config.depths.staircase);
  CsvTable table{{"x", "F", "err"}, {}};
  for (const auto& s : samples) table.add({s.x, s.F, s.error});
  write_file(scene.path("staircase.csv"),
             render_csv(table, metadata(scene, shift,
                                        {"depth: " + std::to_string(scene.config.depths.staircase),
                                         std::string("measure: ") + (mu.approximate() ? "approximate" : "exact")})));
  return 0;
}

int cmd_hoelder(const Scene& scene) {
  double shift = 0.0;
  const MarkovMeasure mu = scene_measure(scene, &shift);
  std::vector<double> points = scene.config.points;
  if (points.empty()) points.push_back(scene.ifs->attractor_bounds().lo);
  std::vector<HoelderEstimate> estimates(points.size());
  parallel_for(points.size(), scene.threads,
               [&](std::size_t i) { estimates[i] = pointwise_hoelder(mu, *scene.ifs, points[i], scene.config.radius); });

  CsvTable summary{{"x", "liminf", "limsup", "uncertainty", "samples", "truncated"}, {}};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const HoelderEstimate& h = estimates[i];
    CsvTable table{{"logr", "logmass_lo", "logmass_hi"}, {}};
    for (std::size_t k = 0; k < h.log_r.size(); ++k) table.add({h.log_r[k], h.log_mass_lower[k], h.log_mass_upper[k]});
    write_file(scene.path("hoelder_" + std::to_string(i) + ".csv"),
               render_csv(table, metadata(scene, shift, {"x: " + format_number(h.x),
                                                         "window: " + std::to_string(h.window)})));
    summary.add({h.x, h.liminf_est, h.limsup_est, h.uncertainty, static_cast<double>(h.slopes.size()),
                 h.truncated ? 1.0 : 0.0});
  }
  write_file(scene.path("hoelder_summary.csv"), render_csv(summary, metadata(scene, shift)));
  return 0;
}

int cmd_coarse(const Scene& scene) {
  double shift = 0.0;
  const MarkovMeasure mu = scene_measure(scene, &shift);
  const int n = scene.config.depths.coarse;
  const auto samples = coarse_spectrum(mu, *scene.ifs, n, scene.config.q_grid);
  CsvTable table{{"q", "T", "alpha", "f"}, {}};
  for (const auto& s : samples) table.add({s.q, s.T, s.alpha, s.f});
  write_file(scene.path("coarse.csv"), render_csv(table, metadata(scene, shift, {"depth: " + std::to_string(n)})));

  const Potential psi = build_psi(scene.config, scene.ifs, scene.ifs_g);
  const MultifractalProblem problem =
      MultifractalProblem::create(Potential::geometric(scene.ifs), psi, pressure_options(scene.config));
  std::vector<double> t(samples.size());
  parallel_for(samples.size(), scene.threads, [&](std::size_t i) { t[i] = solve_t(problem, samples[i].q).t; });
  json rows = json::array();
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double dev = std::fabs(samples[i].T - t[i]);
    worst = std::max(worst, dev);
    rows.push_back({{"q", samples[i].q}, {"T", samples[i].T}, {"t", t[i]}, {"deviation", dev}});
  }
  json c;
  c["depth"] = n;
  c["max_deviation"] = worst;
  c["rows"] = rows;
  c["tool_version"] = kToolVersion;
  c["config_hash"] = "fnv1a64:" + scene.config.hash();
  c["normalization"] = normalization_note(problem.psi_shift());
  write_file(scene.path("comparison.json"), render_json(c));
  return 0;
}

int cmd_conjugacy(const Scene& scene) {
  if (!scene.ifs_g) throw ValidationError("conjugacy needs 'ifs_g' in the config");
  PressureOptions options = pressure_options(scene.config);
  const ConjugacyPair pair = ConjugacyPair::create(scene.ifs, scene.ifs_g, options);
  const int n = scene.config.depths.staircase;
  const Interval hull = pair.f().hull();
  const int count = scene.config.conjugacy_samples;
  CsvTable table{{"x", "theta", "err"}, {}};
  int gaps = 0;
  for (int k = 0; k < count; ++k) {
    const double x = k + 1 == count ? hull.hi : hull.lo + (hull.hi - hull.lo) * k / (count - 1);
    try {
      const ThetaValue th = theta(pair, x, n);
      table.add({x, th.value, th.error});
    } catch (const GapPointError&) {
      ++gaps;
    }
  }
  const ConjugacySpectrum spec = conjugacy_spectrum(pair, scene.config.beta_grid.values(), scene.threads);
  const double shift = conjugacy_problem(pair).psi_shift();
  write_file(scene.path("theta.csv"),
             render_csv(table, metadata(scene, shift, {"depth: " + std::to_string(n),
                                                       "gap_points_skipped: " + std::to_string(gaps)})));
  emit_curves(scene, spec.curve, spec.spectrum, shift);
  return 0;
}

unsigned resolve_threads(int flag) {
  if (flag > 0) return static_cast<unsigned>(flag);
  if (const char* env = std::getenv("MULTIFRAC_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 1024) throw ValidationError("MULTIFRAC_THREADS must be an integer in [1, 1024]");
    return static_cast<unsigned>(v);
  }
  return 1;
}

int dispatch(const Invocation& inv, std::ostream& out, std::ostream& err) {
  Scene scene;
  scene.config = load_config(inv.config_path);
  if (inv.depth_override != 0) apply_depth_override(scene.config, inv.depth_override);
  scene.threads = resolve_threads(inv.threads);
  if (inv.command == "validate") return cmd_validate(scene, out, err);

  scene.ifs = Ifs::make_shared(scene.config.ifs);
  if (scene.config.ifs_g) scene.ifs_g = Ifs::make_shared(*scene.config.ifs_g);
  scene.out_dir = inv.out_dir.empty() ? scene.config.output_dir : inv.out_dir;
  std::error_code ec;
  std::filesystem::create_directories(scene.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + scene.out_dir + ": " + ec.message());

  if (inv.command == "spectrum") return cmd_spectrum(scene);
  if (inv.command == "staircase") return cmd_staircase(scene);
  if (inv.command == "hoelder") return cmd_hoelder(scene);
  if (inv.command == "coarse") return cmd_coarse(scene);
  return cmd_conjugacy(scene);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multifractal spectra, staircases and conjugacies of conformal interval IFS", "multifrac"};
  Invocation inv;
  app.set_version_flag("--version", kToolVersion);
  app.add_option("--config", inv.config_path, "JSON scene config")->required();
  app.add_option("--out", inv.out_dir, "Output directory (overrides output.dir)");
  app.add_option("--threads", inv.threads, "Worker threads (default: MULTIFRAC_THREADS or 1)")
      ->check(CLI::Range(1, 1024));
  app.add_option("--depth-override", inv.depth_override, "Use this depth for every configured depth")
      ->check(CLI::Range(1, 60));
  app.require_subcommand(1, 1);
  const char* commands[][2] = {{"validate", "Check the IFS specs and potential"},
                               {"spectrum", "pressure.csv, spectrum.csv and range.json"},
                               {"staircase", "staircase.csv"},
                               {"hoelder", "hoelder_<i>.csv per point and hoelder_summary.csv"},
                               {"coarse", "coarse.csv and comparison.json"},
                               {"conjugacy", "theta.csv, pressure.csv and spectrum.csv"}};
  for (const auto& c : commands) {
    app.add_subcommand(c[0], c[1])->fallthrough()->callback([&inv, name = std::string(c[0])] { inv.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "multifrac: error kind=usage reason=" << one_line(e.what()) << '\n';
    return 2;
  }

  auto fail = [&](const char* kind, const std::exception& e, int code) {
    err << "multifrac: error kind=" << kind << " reason=" << one_line(e.what()) << '\n';
    return code;
  };
  try {
    return dispatch(inv, out, err);
  } catch (const IoError& e) {
    return fail("io", e, 1);
  } catch (const BudgetError& e) {
    return fail("budget", e, 2);
  } catch (const GapPointError& e) {
    return fail("gap", e, 2);
  } catch (const ValidationError& e) {
    return fail("validation", e, 2);
  } catch (const NumericalError& e) {
    return fail("numerical", e, 3);
  } catch (const std::exception& e) {
    return fail("numerical", e, 3);
  }
}

}  // namespace multifrac::cli
