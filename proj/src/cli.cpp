#include "hitchin/cli.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "hitchin/canonicity.hpp"
#include "hitchin/errors.hpp"
#include "hitchin/sov.hpp"

namespace hitchin {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); }

double tolerance(const std::optional<double>& flag, const json& cfg, const char* key, double dflt) {
  double v = dflt;
  if (flag) {
    v = *flag;
  } else if (cfg.contains("tolerances")) {
    const json& t = cfg["tolerances"];
    if (!t.is_object()) bad("\"tolerances\" must be an object");
    if (t.contains(key)) {
      if (!t[key].is_number()) bad(std::string("tolerances.") + key + " must be a number");
      v = t[key].get<double>();
    }
  }
  if (!(v > 0.0) || !std::isfinite(v)) bad(std::string(key) + " tolerance must be positive");
  return v;
}

const json& section(const json& cfg, const char* key) {
  if (!cfg.contains(key)) bad(std::string("config: missing \"") + key + "\"");
  return cfg[key];
}

// family/rank/genus: top level first, then whichever Hamiltonian object carries them.
json identity(const json& cfg) {
  json id = json::object();
  for (const char* key : {"family", "rank", "genus"}) {
    if (cfg.contains(key)) {
      id[key] = cfg[key];
      continue;
    }
    for (const char* holder : {"hamiltonian", "newton_seed"})
      if (cfg.contains(holder) && cfg[holder].is_object() && cfg[holder].contains(key)) {
        id[key] = cfg[holder][key];
        break;
      }
    if (!id.contains(key) && std::string(key) == "genus" && cfg.contains("curve")) {
      id[key] = curve_from_json(cfg["curve"]).genus();
    }
    if (!id.contains(key)) bad(std::string("config: cannot determine \"") + key + "\"");
  }
  if (!id["genus"].is_number_integer()) bad("\"genus\" must be an integer");
  return id;
}

struct Problem {
  RootSystem roots;
  int genus = 0;
  json id;
};

Problem problem(const json& cfg) {
  Problem p;
  p.id = identity(cfg);
  p.roots = roots_from_json(p.id);
  p.genus = p.id["genus"].get<int>();
  hamiltonian_count(p.roots, p.genus);
  return p;
}

HyperellipticCurve curve_for(const json& cfg, const Problem& p) {
  HyperellipticCurve curve = curve_from_json(section(cfg, "curve"));
  if (curve.genus() != p.genus) bad("curve genus " + std::to_string(curve.genus()) + " != config genus");
  return curve;
}

HamiltonianVector hamiltonian_for(const json& cfg, const char* key, const Problem& p) {
  HamiltonianVector h = hamiltonian_from_json(section(cfg, key), p.id);
  if (!(h.roots() == p.roots) || h.genus() != p.genus) bad(std::string(key) + " disagrees with family/rank/genus");
  return h;
}

SpectralDivisor divisor_for(const json& cfg, const Problem& p) {
  SpectralDivisor d = divisor_from_json(section(cfg, "divisor"));
  const int n = hamiltonian_count(p.roots, p.genus);
  if (static_cast<int>(d.size()) != n)
    bad("divisor has " + std::to_string(d.size()) + " points, expected N = " + std::to_string(n));
  return d;
}

cplx basepoint_for(const RunConfig& cfg, const SpectralCurveModel& model) {
  if (cfg.basepoint) return *cfg.basepoint;
  if (cfg.config.contains("basepoint")) return complex_from_json(cfg.config["basepoint"], "basepoint");
  return default_angle_basepoint(model);
}

}  // namespace

double RunConfig::residual_tol() const { return tolerance(tol_residual, config, "residual", 1e-8); }
double RunConfig::quad_tol() const { return tolerance(tol_quad, config, "quad", 1e-9); }
double RunConfig::fd() const { return tolerance(fd_step, config, "fd_step", 1e-5); }

cplx parse_complex_flag(const std::string& s) {
  const auto comma = s.find(',');
  try {
    size_t used = 0;
    const std::string re = s.substr(0, comma);
    const double a = std::stod(re, &used);
    if (used != re.size()) throw std::invalid_argument(s);
    if (comma == std::string::npos) return {a, 0.0};
    const std::string im = s.substr(comma + 1);
    const double b = std::stod(im, &used);
    if (used != im.size()) throw std::invalid_argument(s);
    return {a, b};
  } catch (const std::logic_error&) {
    bad("expected re,im but got \"" + s + "\"");
  }
}

json cmd_build(const RunConfig& cfg) {
  const Problem p = problem(cfg.config);
  json blocks = json::array();
  for (const BlockShape& s : block_shapes(p.roots, p.genus))
    blocks.push_back(json{{"degree", s.invariant.degree},
                          {"pfaffian", s.invariant.pfaffian},
                          {"lambda_power", s.lambda_power},
                          {"h0_count", s.h0_count},
                          {"h1_count", s.h1_count},
                          {"offset", s.offset}});
  json out{{"family", std::string(1, family_letter(p.roots.family))},
           {"rank", p.roots.rank},
           {"genus", p.genus},
           {"dim_g", lie_algebra_dimension(p.roots)},
           {"N", hamiltonian_count(p.roots, p.genus)},
           {"N_rep", standard_rep_dimension(p.roots)},
           {"blocks", std::move(blocks)},
           {"polynomial", render_spectral_polynomial(p.roots, p.genus)}};
  if (cfg.config.contains("curve") && cfg.config.contains("hamiltonian")) {
    const SpectralCurveModel model(p.roots, curve_for(cfg.config, p), hamiltonian_for(cfg.config, "hamiltonian", p));
    out["hamiltonian"] = hamiltonian_to_json(model.h());
    out["degenerate"] = model.degenerate();
  }
  return out;
}

json cmd_solve(const RunConfig& cfg) {
  const Problem p = problem(cfg.config);
  const HyperellipticCurve curve = curve_for(cfg.config, p);
  const SpectralDivisor divisor = divisor_for(cfg.config, p);
  SolverOptions opts;
  opts.tol_residual = cfg.residual_tol();

  const bool so4 = p.roots == RootSystem{Family::D, 2} && p.genus == 2;
  std::string method = cfg.config.value("method", so4 ? "radicals" : "newton");
  if (method == "radicals") {
    if (!so4) bad("the radical solver covers D2 with genus 2 only");
    return solution_to_json(solve_so4_radicals(curve, divisor, opts));
  }
  if (method != "newton") bad("unknown method \"" + method + "\"");
  if (!cfg.config.contains("newton_seed"))
    bad("solve: " + std::string(1, family_letter(p.roots.family)) + std::to_string(p.roots.rank) +
        " needs a Newton seed.\nusage: add \"newton_seed\": {\"H\": [[re, im], ...]} (or \"blocks\") to the config");
  return solution_to_json(solve_newton(p.roots, curve, divisor, hamiltonian_for(cfg.config, "newton_seed", p), opts));
}

json cmd_angles(const RunConfig& cfg, std::vector<TraceRow>* trace) {
  const Problem p = problem(cfg.config);
  const SpectralCurveModel model(p.roots, curve_for(cfg.config, p), hamiltonian_for(cfg.config, "hamiltonian", p));
  const SpectralDivisor divisor = divisor_for(cfg.config, p);
  AngleOptions opts;
  opts.tol_quad = cfg.quad_tol();
  return angles_to_json(angle_coordinates(model, divisor, basepoint_for(cfg, model), opts, trace));
}

VerifyOutcome cmd_verify(const RunConfig& cfg) {
  const Problem p = problem(cfg.config);
  const HyperellipticCurve curve = curve_for(cfg.config, p);
  const HamiltonianVector h = hamiltonian_for(cfg.config, "hamiltonian", p);
  const SpectralCurveModel model(p.roots, curve, h);
  const SpectralDivisor divisor = divisor_for(cfg.config, p);
  const double tol_res = cfg.residual_tol();
  const VerifyThresholds th;

  VerifyOutcome v;
  json& r = v.report;
  const ResidualReport res = residuals(model, divisor);
  r["residual"] = res.scaled_max;
  r["scale"] = res.scale;
  r["thresholds"] = json{{"residual", tol_res},
                         {"defect", th.defect},
                         {"conjugacy", th.conjugacy * res.scale},
                         {"ratio", json::array({th.ratio_lo, th.ratio_hi})}};
  if (!(res.scaled_max <= tol_res)) {
    r["checks"] = json{{"residual", false}};
    r["pass"] = false;
    return v;
  }

  const double fd = cfg.fd();
  CanonicityOptions opts;
  opts.angle.tol_quad = cfg.quad_tol();
  opts.solver.tol_residual = tol_res;
  opts.fd_step = fd;
  opts.halving_steps = {10.0 * fd, 5.0 * fd, 2.5 * fd};
  const cplx x0 = basepoint_for(cfg, model);
  const CanonicalMap map(p.roots, curve, divisor, x0, model.h(), opts);

  const SymplecticReport sym = symplectic_defect(map, fd);
  const Eigen::MatrixXd conj = conjugacy_residual(map, fd);

  json per_entry = json::array();
  for (int i = 0; i < conj.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < conj.cols(); ++j) row.push_back(conj(i, j));
    per_entry.push_back(std::move(row));
  }
  r["basepoint"] = to_json(x0);
  r["defect"] = sym.defect;
  r["fd_step"] = fd;
  r["conjugacy_max"] = conj.maxCoeff();
  r["per_entry"] = std::move(per_entry);
  r["halving"] = json{{"steps", sym.halving_steps}, {"defects", sym.halving_defects}, {"ratios", sym.halving_ratios}};

  bool ratios_ok = !sym.halving_ratios.empty();
  for (const double q : sym.halving_ratios) ratios_ok = ratios_ok && q >= th.ratio_lo && q <= th.ratio_hi;
  const bool defect_ok = sym.defect <= th.defect;
  const bool conj_ok = conj.maxCoeff() <= th.conjugacy * res.scale;
  r["checks"] = json{{"residual", true}, {"defect", defect_ok}, {"conjugacy", conj_ok}, {"halving", ratios_ok}};
  v.pass = defect_ok && conj_ok && ratios_ok;
  r["pass"] = v.pass;
  return v;
}

json cmd_sample(const RunConfig& cfg) {
  const json& c = cfg.config;
  json id{{"family", c.value("family", std::string("D"))}, {"rank", c.value("rank", 2)}, {"genus", c.value("genus", 2)}};
  const RootSystem roots = roots_from_json(id);
  const int genus = id["genus"].get<int>();
  std::uint64_t seed = 0;
  if (cfg.seed) {
    seed = *cfg.seed;
  } else if (c.contains("seed")) {
    if (!c["seed"].is_number_unsigned()) bad("\"seed\" must be a nonnegative integer");
    seed = c["seed"].get<std::uint64_t>();
  }
  SampleOptions so;
  if (c.contains("max_condition")) {
    if (!c["max_condition"].is_number() || !(c["max_condition"].get<double>() > 1.0))
      bad("\"max_condition\" must be a number > 1");
    so.max_condition = c["max_condition"].get<double>();
  }
  const SampledInstance inst = sample_instance(roots, genus, seed, so);
  json out = id;
  out["seed"] = seed;
  if (c.contains("max_condition")) out["max_condition"] = so.max_condition;
  out["curve"] = curve_to_json(inst.curve);
  out["hamiltonian"] = hamiltonian_to_json(inst.h);
  out["divisor"] = divisor_to_json(inst.divisor);
  return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Separation of variables for Hitchin systems on hyperelliptic curves", "hitchin-sov"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::string config_path, basepoint;
  std::uint64_t seed = 0;
  double tol_residual = 0, tol_quad = 0, fd_step = 0;
  auto* o_config = app.add_option("--config", config_path, "JSON input");
  auto* o_seed = app.add_option("--seed", seed, "RNG seed (sample)");
  auto* o_out = app.add_option("--out", cfg.out.emplace(), "output path (default: stdout)");
  auto* o_trace = app.add_option("--trace", cfg.trace.emplace(), "CSV node traces (angles)");
  auto* o_res = app.add_option("--tol-residual", tol_residual, "residual tolerance, relative to scale");
  auto* o_quad = app.add_option("--tol-quad", tol_quad, "quadrature tolerance per path");
  auto* o_fd = app.add_option("--fd-step", fd_step, "finite-difference step");
  auto* o_base = app.add_option("--basepoint", basepoint, "basepoint x0 as re,im");

  for (const char* name : {"build", "solve", "angles", "verify", "sample"}) app.add_subcommand(name);
  app.get_subcommand("build")->description("spectral model summary");
  app.get_subcommand("solve")->description("recover H from a divisor");
  app.get_subcommand("angles")->description("angle coordinates of a divisor");
  app.get_subcommand("verify")->description("canonicity report");
  app.get_subcommand("sample")->description("seeded random instance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kExitValidation;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  if (!*o_out) cfg.out.reset();
  if (!*o_trace) cfg.trace.reset();
  if (*o_seed) cfg.seed = seed;
  if (*o_res) cfg.tol_residual = tol_residual;
  if (*o_quad) cfg.tol_quad = tol_quad;
  if (*o_fd) cfg.fd_step = fd_step;

  int code = kExitOk;
  std::string text;
  try {
    if (*o_base) cfg.basepoint = parse_complex_flag(basepoint);
    if (*o_config) cfg.config = read_json_file(config_path);
    if (!cfg.config.is_object()) bad("config must be a JSON object");
    if (cfg.command != "sample" && !*o_config) bad(cfg.command + " needs --config <path>");
    if (cfg.trace && cfg.command != "angles") bad("--trace only applies to angles");
    // Validate tolerances up front, whichever command uses them.
    cfg.residual_tol();
    cfg.quad_tol();
    cfg.fd();

    json result;
    if (cfg.command == "build") {
      result = cmd_build(cfg);
    } else if (cfg.command == "solve") {
      result = cmd_solve(cfg);
    } else if (cfg.command == "angles") {
      std::vector<TraceRow> rows;
      result = cmd_angles(cfg, cfg.trace ? &rows : nullptr);
      if (cfg.trace) {
        std::ofstream csv(*cfg.trace, std::ios::binary);
        if (!csv) bad("cannot write " + *cfg.trace);
        const Problem p = problem(cfg.config);
        write_trace_csv(csv, rows, hamiltonian_count(p.roots, p.genus));
      }
    } else if (cfg.command == "verify") {
      VerifyOutcome v = cmd_verify(cfg);
      result = std::move(v.report);
      if (!v.pass) {
        code = kExitNumeric;
        err << "error: verification failed";
        for (auto& [k, ok] : result["checks"].items())
          if (!ok.get<bool>()) err << " [" << k << "]";
        err << '\n';
      }
    } else {
      result = cmd_sample(cfg);
    }
    text = result.dump(2) + "\n";
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_validation_error(e.code()) ? kExitValidation : kExitNumeric;
  } catch (const json::exception& e) {
    err << "error: InvalidArgument: " << e.what() << '\n';
    return kExitValidation;
  }

  if (cfg.out) {
    std::ofstream f(*cfg.out, std::ios::binary);
    if (!f) {
      err << "error: cannot write " << *cfg.out << '\n';
      return kExitValidation;
    }
    f << text;
  } else {
    out << text;
  }
  return code;
}

}  // namespace hitchin
