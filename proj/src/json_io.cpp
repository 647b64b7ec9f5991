#include "hitchin/json_io.hpp"

#include <fstream>
#include <sstream>

#include "hitchin/errors.hpp"

namespace hitchin {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); }

const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) bad(where + " must be an object");
  auto it = j.find(key);
  if (it == j.end()) bad(where + ": missing \"" + key + "\"");
  return *it;
}

std::vector<cplx> complex_list(const json& j, const std::string& field) {
  if (!j.is_array()) bad(field + " must be an array of [re, im] pairs");
  std::vector<cplx> out;
  out.reserve(j.size());
  for (size_t i = 0; i < j.size(); ++i) out.push_back(complex_from_json(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

json complex_list_json(const std::vector<cplx>& v) {
  json a = json::array();
  for (cplx z : v) a.push_back(to_json(z));
  return a;
}

int int_field(const json& j, const char* key, const std::string& where) {
  const json& v = need(j, key, where);
  if (!v.is_number_integer()) bad(where + ": \"" + key + "\" must be an integer");
  return v.get<int>();
}

}  // namespace

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    bad(field + " must be a [re, im] pair of numbers");
  return {j[0].get<double>(), j[1].get<double>()};
}

json curve_to_json(const HyperellipticCurve& curve) {
  const auto c = curve.p().coeffs();
  return json{{"p", complex_list_json({c.begin(), c.end()})}, {"genus", curve.genus()}};
}

HyperellipticCurve curve_from_json(const json& j) {
  HyperellipticCurve curve(ComplexPoly(complex_list(need(j, "p", "curve"), "curve.p")));
  if (j.contains("genus") && int_field(j, "genus", "curve") != curve.genus())
    throw Error(ErrorCode::InvalidCurve, "curve.genus does not match deg P = 2g + 1");
  return curve;
}

json point_to_json(const CurvePoint& pt) { return json{{"x", to_json(pt.x)}, {"y", to_json(pt.y)}}; }

CurvePoint point_from_json(const json& j, const std::string& field) {
  return {complex_from_json(need(j, "x", field), field + ".x"), complex_from_json(need(j, "y", field), field + ".y")};
}

RootSystem roots_from_json(const json& j) {
  const json& f = need(j, "family", "root system");
  if (!f.is_string()) bad("\"family\" must be a string");
  return RootSystem::make(parse_family(f.get<std::string>()), int_field(j, "rank", "root system"));
}

json hamiltonian_to_json(const HamiltonianVector& h) {
  json blocks = json::array();
  for (const HamiltonianBlock& b : h.blocks()) {
    json o{{"degree", b.invariant.degree}, {"h0", complex_list_json(b.h0)}, {"h1", complex_list_json(b.h1)}};
    if (b.invariant.pfaffian) o["pfaffian"] = true;
    blocks.push_back(std::move(o));
  }
  const Eigen::VectorXcd flat = h.flat();
  return json{{"family", std::string(1, family_letter(h.roots().family))},
              {"rank", h.roots().rank},
              {"genus", h.genus()},
              {"blocks", std::move(blocks)},
              {"H", complex_list_json({flat.data(), flat.data() + flat.size()})}};
}

HamiltonianVector hamiltonian_from_json(const json& j, const json& fallback) {
  if (!j.is_object()) bad("hamiltonian must be an object");
  auto pick = [&](const char* key) -> const json& {
    if (j.contains(key)) return j[key];
    if (fallback.is_object() && fallback.contains(key)) return fallback[key];
    bad(std::string("hamiltonian: missing \"") + key + "\"");
  };
  json ident{{"family", pick("family")}, {"rank", pick("rank")}, {"genus", pick("genus")}};
  const RootSystem roots = roots_from_json(ident);
  const int genus = int_field(ident, "genus", "hamiltonian");
  hamiltonian_count(roots, genus);  // validates genus

  if (j.contains("blocks")) {
    const json& bl = j["blocks"];
    if (!bl.is_array()) bad("hamiltonian.blocks must be an array");
    std::vector<HamiltonianBlock> blocks;
    for (size_t i = 0; i < bl.size(); ++i) {
      const std::string where = "hamiltonian.blocks[" + std::to_string(i) + "]";
      HamiltonianBlock b;
      b.invariant.degree = int_field(bl[i], "degree", where);
      if (bl[i].contains("pfaffian")) {
        if (!bl[i]["pfaffian"].is_boolean()) bad(where + ".pfaffian must be a boolean");
        b.invariant.pfaffian = bl[i]["pfaffian"].get<bool>();
      }
      b.h0 = complex_list(need(bl[i], "h0", where), where + ".h0");
      if (bl[i].contains("h1")) b.h1 = complex_list(bl[i]["h1"], where + ".h1");
      blocks.push_back(std::move(b));
    }
    HamiltonianVector h(roots, genus, std::move(blocks));
    // A redundant flat vector must agree with the blocks.
    if (j.contains("H")) {
      const auto flat = complex_list(j["H"], "hamiltonian.H");
      const Eigen::VectorXcd f = h.flat();
      if (static_cast<int>(flat.size()) != f.size())
        throw Error(ErrorCode::ShapeMismatch, "hamiltonian.H length disagrees with blocks");
      for (int k = 0; k < f.size(); ++k)
        if (flat[static_cast<size_t>(k)] != f(k))
          throw Error(ErrorCode::ShapeMismatch, "hamiltonian.H disagrees with blocks at H" + std::to_string(k + 1));
    }
    return h;
  }
  if (j.contains("H")) {
    const auto flat = complex_list(j["H"], "hamiltonian.H");
    const int n = hamiltonian_count(roots, genus);
    if (static_cast<int>(flat.size()) != n)
      throw Error(ErrorCode::ShapeMismatch,
                  "hamiltonian.H has " + std::to_string(flat.size()) + " entries, expected " + std::to_string(n));
    return HamiltonianVector::from_flat(roots, genus, Eigen::Map<const Eigen::VectorXcd>(flat.data(), n));
  }
  bad("hamiltonian needs \"blocks\" or \"H\"");
}

json divisor_to_json(const SpectralDivisor& divisor) {
  json pts = json::array();
  for (const SpectralPoint& p : divisor.points)
    pts.push_back(json{{"lambda", to_json(p.lambda)}, {"x", to_json(p.at.x)}, {"y", to_json(p.at.y)}});
  return json{{"points", std::move(pts)}};
}

SpectralDivisor divisor_from_json(const json& j) {
  const json& pts = need(j, "points", "divisor");
  if (!pts.is_array()) bad("divisor.points must be an array");
  SpectralDivisor d;
  for (size_t i = 0; i < pts.size(); ++i) {
    const std::string where = "divisor.points[" + std::to_string(i) + "]";
    const CurvePoint at = point_from_json(pts[i], where);
    d.points.push_back({complex_from_json(need(pts[i], "lambda", where), where + ".lambda"), at});
  }
  return d;
}

json solution_to_json(const SolutionSet& s) {
  json c = json::array();
  for (const Candidate& k : s.candidates) {
    json o = hamiltonian_to_json(k.h);
    o["residual"] = k.residual;
    c.push_back(std::move(o));
  }
  return json{{"method", s.method}, {"candidates", std::move(c)}};
}

json angles_to_json(const AngleVector& a) {
  return json{{"basepoint", to_json(a.basepoint)},
              {"phi", complex_list_json({a.phi.data(), a.phi.data() + a.phi.size()})}};
}

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.what() already carries "at line L, column C".
    bad(source + ": " + e.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

}  // namespace hitchin
