#include "mcurv/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>

#include "mcurv/errors.hpp"
#include "mcurv/geometry.hpp"
#include "mcurv/manifolds.hpp"
#include "mcurv/verify.hpp"
#include "mcurv/version.hpp"

namespace mcurv {

namespace {

class Timer {
 public:
  explicit Timer(nlohmann::json& sink) : sink_(sink) {}
  template <class F>
  auto time(const std::string& stage, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    auto finish = [&] {
      sink_[stage] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      finish();
    } else {
      auto r = f();
      finish();
      return r;
    }
  }

 private:
  nlohmann::json& sink_;
};

nlohmann::json header(const std::string& command, const ScenarioConfig& c) {
  return {{"schema", "mcurv.run_report"},
          {"schema_version", kRunReportSchemaVersion},
          {"tool_version", kVersion},
          {"command", command},
          {"input_digest", config_digest(c)},
          {"scenario", serialize_config(c)},
          {"timings", nlohmann::json::object()}};
}

std::filesystem::path out_path(const RunOptions& opt, const std::string& name) {
  std::filesystem::create_directories(opt.out_dir);
  return std::filesystem::path(opt.out_dir) / name;
}

void write_json(const std::filesystem::path& p, const nlohmann::json& j) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  out << j.dump(2) << "\n";
}

const ZonalFlow& require_flow(const Scenario& s, const std::string& command) {
  if (!s.flow) {
    if (s.config.flow.present)
      throw PreconditionError(command + " needs a flow, but the corrupted chart has no Killing field");
    throw ConfigError(command + " needs a flow (flow.* keys)", 0, "flow.profile.family");
  }
  return *s.flow;
}

void write_profile_csv(const Scenario& s, const RunOptions& opt, nlohmann::json& files) {
  const ZonalFlow& z = *s.flow;
  const int axis = z.chart->profile_axis();
  if (axis < 0) return;
  const auto [lo, hi] = z.chart->trimmed_bounds(axis, s.config.quadrature.collar);
  const auto path = out_path(opt, "profile.csv");
  std::ofstream out(path);
  out.precision(17);
  out << z.chart->axis(axis).name << ",f,f_squared,norm_X_squared,F,sgn_Z\n";
  const ScalarField h = norm_squared(z.X);
  constexpr int n = 400;
  for (int i = 0; i <= n; ++i) {
    Point x{};
    x[axis] = lo + (hi - lo) * i / n;
    double F = 0.0;
    try {
      F = F_jet(z, x).v;
    } catch (const DomainError&) {
    }
    const double f = z.f(x);
    out << x[axis] << "," << f << "," << f * f << "," << h(x) << "," << F << "," << sgn_Z(z, x) << "\n";
  }
  files["profile_csv"] = path.string();
}

void write_integrand_csv(const Scenario& s, const VectorField& Y, const McReport& rep,
                         const QuadratureRule& rule, const RunOptions& opt, nlohmann::json& files) {
  const ZonalFlow& z = *s.flow;
  const auto path = out_path(opt, "integrand.csv");
  const VectorField Z = z.Z();
  if (rep.mc_commuting) {
    dump_integrand_csv(*s.chart, rule, [&](const Node& n) { return commuting_integrand(z, Y, n); },
                       path.string());
    files["integrand_formula"] = "commuting";
  } else {
    dump_integrand_csv(*s.chart, rule, [&](const Node& n) { return direct_integrand(Z, Y, n); },
                       path.string());
    files["integrand_formula"] = "direct";
  }
  files["integrand_csv"] = path.string();
}

SearchOptions search_options(const ScenarioConfig& c) {
  SearchOptions o;
  o.budget = c.perturbation.budget;
  o.seed = c.perturbation.seed;
  o.resolution = c.resolution();
  o.collar = c.quadrature.collar;
  o.min_margin = c.perturbation.min_margin;
  o.t_half_width = c.perturbation.bump.t_half_width;
  o.initial = c.perturbation.bump;
  return o;
}

int verdict_exit(McVerdict v) { return v == McVerdict::Indeterminate ? kExitIndeterminate : kExitOk; }

}  // namespace

Profile build_profile(const ProfileSpec& p) {
  Profile f;
  if (p.family == "bump")
    f = bump_profile(p.lo, p.hi, p.peak, p.amplitude);
  else if (p.family == "raised_cosine")
    f = raised_cosine_profile(p.center, p.width, p.amplitude);
  else if (p.family == "cos2_polynomial")
    f = cos2_polynomial_profile(p.coefficients);
  else if (p.family == "table")
    f = table_profile(p.xs, p.fs, p.degree);
  else if (p.family == "constant")
    f = constant_profile(p.value);
  else
    throw ConfigError("unknown profile family '" + p.family + "'", 0, "flow.profile.family");
  if (p.mirror_about) f = mirrored(f, *p.mirror_about);
  return f;
}

ChartPtr build_chart(const ScenarioConfig& c) {
  const auto& m = c.manifold;
  ChartPtr chart;
  if (m.kind == "ellipsoid2d")
    chart = make_ellipsoid_2d(m.a, m.profile_resolution);
  else if (m.kind == "ellipsoid3d")
    chart = make_ellipsoid_3d(m.a);
  else if (m.kind == "sphere2")
    chart = make_sphere2();
  else
    chart = make_flat_torus(m.dim);
  if (m.corruption == "negate_g22") chart = chart->with_negated_g22();
  return chart;
}

Scenario build_scenario(const ScenarioConfig& c) {
  Scenario s;
  s.config = c;
  s.chart = build_chart(c);
  if (c.flow.present && c.manifold.corruption == "none") {
    const Direction dir{c.flow.p, c.flow.q, c.flow.pq_kind == "integer"};
    s.flow = make_zonal_flow(s.chart, build_profile(c.flow.profile), dir);
  }
  return s;
}

VectorField build_perturbation(const Scenario& s) {
  const auto& p = s.config.perturbation;
  const ZonalFlow& z = require_flow(s, "perturbation");
  if (p.mode == "zero") return VectorField::zero(s.chart);
  if (p.mode == "flow") return z.Z();
  if (p.mode != "explicit")
    throw ConfigError("perturbation.mode = " + p.mode + " does not define a fixed Y", 0, "perturbation.mode");
  std::array<int, kMaxDim> c{};
  if (s.chart->dim() == 3) {
    if (!z.direction.integer)
      throw CapabilityError("explicit bumps need an integer direction (p, q); q/p is irrational");
    const auto [pp, qq] = z.direction.reduced();
    c = {static_cast<int>(-qq), static_cast<int>(pp), 0};
  } else {
    c = {0, 1, 0};
  }
  return rotational_bump(s.chart, c, p.bump, p.weighting == "density").Y;
}

ScenarioConfig apply_overrides(ScenarioConfig c, const RunOptions& opt) {
  if (!(opt.resolution_scale > 0.0) || !std::isfinite(opt.resolution_scale))
    throw ConfigError("--resolution-scale must be positive", 0, "--resolution-scale");
  if (opt.resolution_scale != 1.0) {
    if (c.quadrature.resolution.empty()) {
      const auto def = c.resolution();
      c.quadrature.resolution.assign(def.begin(), def.begin() + c.dim());
    }
    for (int& r : c.quadrature.resolution)
      r = std::max(2, static_cast<int>(std::lround(r * opt.resolution_scale)));
  }
  if (opt.seed) c.perturbation.seed = *opt.seed;
  return c;
}

RunReport cmd_verify(const ScenarioConfig& c, const RunOptions& opt) {
  RunReport run;
  run.document = header("verify", c);
  Timer timer(run.document["timings"]);
  const Scenario s = timer.time("build", [&] { return build_scenario(c); });
  VerifyOptions vo;
  vo.collar = c.quadrature.collar;
  vo.seed = opt.seed.value_or(0);
  const VerifyReport rep =
      timer.time("verify", [&] { return verify_chart(s.chart, vo, s.flow ? &*s.flow : nullptr); });
  run.document["result"] = rep.to_json();
  if (c.flow.present && !s.flow)
    run.document["notes"].push_back("flow checks skipped: the corrupted chart has no Killing field");
  run.exit_code = rep.all_pass() ? kExitOk : kExitInvariant;
  return run;
}

RunReport cmd_classify(const ScenarioConfig& c, const RunOptions& opt) {
  RunReport run;
  run.document = header("classify", c);
  Timer timer(run.document["timings"]);
  const Scenario s = timer.time("build", [&] { return build_scenario(c); });
  const ZonalFlow& z = require_flow(s, "classify");
  const ClassificationReport rep = timer.time("classify", [&] { return classify(z); });
  run.document["result"] = rep.to_json();
  if (!opt.out_dir.empty() && c.output.profile_csv) {
    nlohmann::json files;
    write_profile_csv(s, opt, files);
    run.document["files"] = files;
  }
  return run;
}

RunReport cmd_mc(const ScenarioConfig& c, const RunOptions& opt) {
  RunReport run;
  run.document = header("mc", c);
  Timer timer(run.document["timings"]);
  const Scenario s = timer.time("build", [&] { return build_scenario(c); });
  const ZonalFlow& z = require_flow(s, "mc");
  if (c.perturbation.mode == "none" || c.perturbation.mode == "search")
    throw ConfigError("mc needs perturbation.mode = zero, flow or explicit (search belongs to certify)", 0,
                      "perturbation.mode");
  const VectorField Y = build_perturbation(s);
  const QuadratureRule rule = QuadratureRule::for_chart(*s.chart, c.resolution(), c.quadrature.collar);
  const McReport rep = timer.time("mc", [&] { return evaluate_mc(z.Z(), Y, &z, rule); });
  run.document["result"] = rep.to_json();
  if (!opt.out_dir.empty()) {
    nlohmann::json files = nlohmann::json::object();
    if (c.output.integrand_csv) timer.time("integrand_csv", [&] { write_integrand_csv(s, Y, rep, rule, opt, files); });
    if (c.output.profile_csv) write_profile_csv(s, opt, files);
    run.document["files"] = files;
  }
  run.exit_code = verdict_exit(rep.verdict);
  return run;
}

RunReport cmd_certify(const ScenarioConfig& c_in, const RunOptions& opt) {
  nlohmann::json stored;
  ScenarioConfig c = c_in;
  if (!opt.from_certificate.empty()) {
    std::ifstream in(opt.from_certificate);
    if (!in) throw Error("cannot open certificate '" + opt.from_certificate + "'");
    try {
      stored = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("certificate '" + opt.from_certificate + "' is not valid JSON: " + e.what(), 0,
                        "--from-certificate");
    }
    if (stored.value("schema", "") != "mcurv.certificate")
      throw ConfigError("'" + opt.from_certificate + "' is not an mcurv certificate", 0, "--from-certificate");
    c = parse_config(stored.at("scenario").at("config").get<std::string>());
  }

  RunReport run;
  run.document = header("certify", c);
  Timer timer(run.document["timings"]);
  const Scenario s = timer.time("build", [&] { return build_scenario(c); });
  const ZonalFlow& z = require_flow(s, "certify");
  SearchOptions so = search_options(c);

  Certificate cert;
  if (!stored.is_null()) {
    const BumpProfile bump = bump_from_json(stored.at("bump"));
    cert = timer.time("replay", [&] { return certify_bump(z, bump, so); });
  } else if (c.perturbation.mode == "search") {
    cert = timer.time("search", [&] { return certify_positive(z, so); });
  } else if (c.perturbation.mode == "explicit") {
    cert = timer.time("certify", [&] { return certify_bump(z, c.perturbation.bump, so); });
  } else {
    throw ConfigError("certify needs perturbation.mode = search or explicit", 0, "perturbation.mode");
  }
  cert.scenario = {{"config", serialize_config(c)}, {"digest", config_digest(c)}};
  const nlohmann::json cj = cert.to_json();
  run.document["result"] = cj;
  run.exit_code = cert.verdict == "positive" ? kExitOk : kExitIndeterminate;

  if (!stored.is_null()) {
    const auto& old = stored.at("mc_report");
    const double tol = std::max(old.at("richardson_error").get<double>(), 1e-12);
    const double d_direct = std::abs(cert.report.mc_direct - old.at("mc_direct").get<double>());
    const bool same_verdict = stored.value("verdict", "") == cert.verdict;
    const bool reproduced = d_direct <= tol && same_verdict;
    run.document["replay"] = {{"certificate", opt.from_certificate},
                              {"stored_digest", stored.at("scenario").value("digest", "")},
                              {"mc_direct_difference", d_direct},
                              {"tolerance", tol},
                              {"same_verdict", same_verdict},
                              {"reproduced", reproduced}};
    if (!reproduced) run.exit_code = kExitInvariant;
  }

  if (!opt.out_dir.empty()) {
    nlohmann::json files = nlohmann::json::object();
    const auto path = out_path(opt, "certificate.json");
    write_json(path, cj);
    files["certificate"] = path.string();
    const PerturbationField pf = build_commuting_bump(z, cert.bump, so.collar, cert.classification.u_plus);
    const QuadratureRule rule = QuadratureRule::for_chart(*s.chart, so.resolution, so.collar);
    if (c.output.integrand_csv) write_integrand_csv(s, pf.Y, cert.report, rule, opt, files);
    if (c.output.profile_csv) write_profile_csv(s, opt, files);
    run.document["files"] = files;
  }
  return run;
}

RunReport run_command(const std::string& command, const std::optional<ScenarioConfig>& c_in,
                      const RunOptions& opt) {
  RunReport run;
  auto fail = [&](int code, const std::string& kind, const std::string& message) {
    run.document = {{"schema", "mcurv.run_report"},
                    {"schema_version", kRunReportSchemaVersion},
                    {"tool_version", kVersion},
                    {"command", command},
                    {"error", {{"kind", kind}, {"message", message}}}};
    if (c_in) {
      run.document["input_digest"] = config_digest(*c_in);
      run.document["scenario"] = serialize_config(*c_in);
    }
    run.exit_code = code;
  };
  try {
    if (!c_in && (command != "certify" || opt.from_certificate.empty()))
      throw ConfigError("--config is required for '" + command + "'", 0, "--config");
    const ScenarioConfig c = c_in ? apply_overrides(*c_in, opt) : ScenarioConfig{};
    if (command == "verify")
      run = cmd_verify(c, opt);
    else if (command == "classify")
      run = cmd_classify(c, opt);
    else if (command == "mc")
      run = cmd_mc(c, opt);
    else if (command == "certify")
      run = cmd_certify(c, opt);
    else
      throw ConfigError("unknown command '" + command + "'", 0, command);
    run.document["exit_code"] = run.exit_code;
  } catch (const ConfigError& e) {
    fail(kExitConfig, "config", e.what());
  } catch (const PreconditionError& e) {
    fail(kExitPrecondition, "precondition", e.what());
    run.document["error"]["residual"] = e.residual();
  } catch (const CapabilityError& e) {
    fail(kExitPrecondition, "capability", e.what());
  } catch (const ConstructionError& e) {
    fail(kExitPrecondition, "construction", e.what());
  } catch (const std::exception& e) {
    fail(kExitRuntime, "runtime", e.what());
  }
  if (!opt.out_dir.empty()) {
    try {
      write_json(out_path(opt, "report.json"), run.document);
    } catch (const std::exception& e) {
      run.document["error"] = {{"kind", "runtime"}, {"message", e.what()}};
      run.exit_code = kExitRuntime;
    }
  }
  return run;
}

}  // namespace mcurv
