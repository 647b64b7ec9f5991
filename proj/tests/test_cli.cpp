#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hitchin/cli.hpp"
#include "hitchin/errors.hpp"
#include "hitchin/sov.hpp"

using namespace hitchin;

namespace {

const std::string kFix = HITCHIN_FIXTURES;

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "hitchin-sov");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const std::string& name) { return kFix + "/" + name; }

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "hitchin_test_cli";
  std::filesystem::create_directories(dir);
  return dir / name;
}

double max_diff(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("complex flag parsing") {
  CHECK(parse_complex_flag("1.5,-2") == cplx(1.5, -2.0));
  CHECK(parse_complex_flag("3") == cplx(3.0, 0.0));
  CHECK_THROWS_AS(parse_complex_flag("1,2,3"), Error);
  CHECK_THROWS_AS(parse_complex_flag("abc"), Error);
}

TEST_CASE("build") {
  const Run r = run({"build", "--config", fixture("build_d2.json")});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["polynomial"] == "λ^4 + (H4 + x H5 + x^2 H6) λ^2 + (H1 + x H2 + x^2 H3)^2");
  CHECK(j["N"] == 6);
  CHECK(j["dim_g"] == 6);
}

TEST_CASE("malformed JSON is a validation error with a position") {
  const Run r = run({"build", "--config", fixture("malformed.json")});
  CHECK(r.code == kExitValidation);
  CHECK(r.err.find("line 4") != std::string::npos);
  CHECK(r.err.find("column") != std::string::npos);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == kExitValidation);
  CHECK(run({"frobnicate"}).code == kExitValidation);
  CHECK(run({"build", "--config", fixture("does_not_exist.json")}).code == kExitValidation);
  CHECK(run({"sample", "--fd-step", "-1"}).code == kExitValidation);
}

TEST_CASE("solve recovers the fixture's H") {
  const json fx = read_json_file(fixture("roundtrip_d2_seed42.json"));
  const HamiltonianVector truth = hamiltonian_from_json(fx["hamiltonian"], fx);

  const Run r = run({"solve", "--config", fixture("roundtrip_d2_seed42.json")});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["method"] == "radicals");
  // the fixture's H is among the candidates
  double best = 1e300;
  Eigen::VectorXcd got;
  for (const auto& c : j["candidates"]) {
    CHECK(c["residual"].get<double>() <= 1e-8);
    const Eigen::VectorXcd v = hamiltonian_from_json(c, fx).flat();
    if (max_diff(v, truth.flat()) < best) {
      best = max_diff(v, truth.flat());
      got = v;
    }
  }
  CHECK(best <= 1e-8);

  // cross-check with Newton from a nearby seed
  const auto curve = curve_from_json(fx["curve"]);
  const auto divisor = divisor_from_json(fx["divisor"]);
  Eigen::VectorXcd seed = truth.flat();
  seed.array() += cplx(1e-3, -5e-4);
  const SolutionSet n = solve_newton(RootSystem{Family::D, 2}, curve, divisor,
                                     HamiltonianVector::from_flat(RootSystem{Family::D, 2}, 2, seed));
  CHECK(max_diff(n.best().h.flat(), got) <= 1e-8);
}

TEST_CASE("solve failures") {
  const Run deg = run({"solve", "--config", fixture("degenerate_all_lambda_zero.json")});
  CHECK(deg.code == kExitNumeric);
  CHECK(deg.err.find("DegenerateDivisor") != std::string::npos);

  const Run d3 = run({"solve", "--config", fixture("d3_without_seed.json")});
  CHECK(d3.code == kExitValidation);
  CHECK(d3.err.find("usage") != std::string::npos);
}

TEST_CASE("angles: zero-length paths, determinism and traces") {
  const Run z = run({"angles", "--config", fixture("zero_length_paths.json")});
  REQUIRE(z.code == 0);
  for (const auto& v : json::parse(z.out)["phi"]) {
    CHECK(v[0] == 0.0);
    CHECK(v[1] == 0.0);
  }

  const auto csv = scratch("trace.csv");
  const Run a = run({"angles", "--config", fixture("roundtrip_d2_seed42.json"), "--trace", csv.string()});
  const Run b = run({"angles", "--config", fixture("roundtrip_d2_seed42.json")});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);

  std::ifstream in(csv);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line.rfind("path,t,", 0) == 0);
  int last_path = -1, rows = 0;
  double last_t = 0.0;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string f0, f1;
    std::getline(ss, f0, ',');
    std::getline(ss, f1, ',');
    const int p = std::stoi(f0);
    const double t = std::stod(f1);
    CHECK(t >= 0.0);
    CHECK(t <= 1.0);
    if (p == last_path) CHECK(t >= last_t);
    last_path = p;
    last_t = t;
    ++rows;
  }
  CHECK(rows > 0);
  CHECK(last_path == 5);
}

TEST_CASE("verify") {
  const Run ok = run({"verify", "--config", fixture("verify_d2_seed42.json")});
  CHECK(ok.code == 0);
  const json j = json::parse(ok.out);
  CHECK(j["pass"] == true);
  CHECK(j["defect"].get<double>() <= 1e-3);
  for (const auto& q : j["halving"]["ratios"]) {
    CHECK(q.get<double>() >= 2.0);
    CHECK(q.get<double>() <= 8.0);
  }

  const Run bad = run({"verify", "--config", fixture("verify_corrupted_h.json")});
  CHECK(bad.code == kExitNumeric);
  const json jb = json::parse(bad.out);
  CHECK(jb["checks"]["residual"] == false);
  CHECK(jb["pass"] == false);
}

TEST_CASE("sample is reproducible and feeds solve") {
  const Run a = run({"sample", "--seed", "7"});
  const Run b = run({"sample", "--seed", "7"});
  const Run c = run({"sample", "--seed", "8"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);

  const auto path = scratch("sample7.json");
  REQUIRE(run({"sample", "--seed", "7", "--out", path.string()}).code == 0);
  const Run s = run({"solve", "--config", path.string()});
  CHECK(s.code == 0);
}
