#include "curvstab/io.hpp"

#include "curvstab/errors.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace curvstab {
namespace {

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) throw ConfigError(where + ": unknown key '" + item.key() + "'");
}

template <class T>
T required(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(where + ": bad value for '" + key + "': " + e.what());
  }
}

std::vector<Term> parse_terms(const Json& j, int n, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": 'terms' must be an array");
  std::vector<Term> terms;
  for (std::size_t t = 0; t < j.size(); ++t) {
    const std::string at = where + ".terms[" + std::to_string(t) + "]";
    reject_unknown(j[t], {"coeff", "exponents"}, at);
    Term term;
    term.coeff = required<double>(j[t], "coeff", at);
    const auto e = required<std::vector<int>>(j[t], "exponents", at);
    if (static_cast<int>(e.size()) != n + 1) {
      throw ConfigError(at + ": expected " + std::to_string(n + 1) + " exponents");
    }
    for (int a = 0; a <= n; ++a) {
      if (e[a] < 0) throw ConfigError(at + ": negative exponent");
      term.exponents[a] = e[a];
    }
    if (!std::isfinite(term.coeff)) throw ConfigError(at + ": coefficient is not finite");
    terms.push_back(term);
  }
  return terms;
}

int parse_dim(const Json& j, const std::string& where) {
  const int n = required<int>(j, "n", where);
  if (n < 3 || n > kMaxDim) {
    throw ConfigError(where + ": n = " + std::to_string(n) + " unsupported (3 <= n <= " +
                      std::to_string(kMaxDim) + ")");
  }
  return n;
}

Json terms_to_json(const std::vector<Term>& terms, int n) {
  Json arr = Json::array();
  for (const auto& t : terms) {
    Json e = Json::array();
    for (int a = 0; a <= n; ++a) e.push_back(t.exponents[a]);
    arr.push_back({{"coeff", t.coeff}, {"exponents", e}});
  }
  return arr;
}

Json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

SurfaceSpec parse_surface(const Json& j) {
  const std::string where = "surface";
  reject_unknown(j, {"n", "terms", "normalize_volume"}, where);
  const int n = parse_dim(j, where);
  SurfaceSpec spec;
  spec.field = RadialField(n, Polynomial(n + 1, parse_terms(j.contains("terms") ? j["terms"] : Json::array(), n, where)));
  if (j.contains("normalize_volume")) spec.normalize_volume = required<bool>(j, "normalize_volume", where);
  return spec;
}

Json surface_to_json(const RadialField& field, bool normalize_volume) {
  std::vector<Term> terms = field.poly.terms();
  if (field.const_shift != 0.0) terms.push_back({field.const_shift, Exponents{}});
  return {{"n", field.n}, {"terms", terms_to_json(terms, field.n)}, {"normalize_volume", normalize_volume}};
}

SweepConfig parse_sweep_config(const Json& j) {
  const std::string where = "sweep config";
  reject_unknown(j, {"n", "p", "families", "resolution", "seed"}, where);
  SweepConfig cfg;
  cfg.n = parse_dim(j, where);
  cfg.p = required<std::vector<double>>(j, "p", where);
  if (cfg.p.empty()) throw ConfigError(where + ": 'p' is empty");
  for (double p : cfg.p)
    if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError(where + ": every p must lie in (1, inf)");
  if (j.contains("resolution")) {
    cfg.resolution = required<std::vector<int>>(j, "resolution", where);
    for (int r : cfg.resolution)
      if (r < 4) throw ConfigError(where + ": resolution entries must be >= 4");
    if (cfg.resolution.size() != 1 && static_cast<int>(cfg.resolution.size()) != cfg.n) {
      throw ConfigError(where + ": resolution needs 1 or n entries");
    }
  }
  if (j.contains("seed")) cfg.seed = required<std::uint64_t>(j, "seed", where);
  if (!j.contains("families") || !j["families"].is_array() || j["families"].empty()) {
    throw ConfigError(where + ": 'families' must be a non-empty array");
  }
  for (std::size_t f = 0; f < j["families"].size(); ++f) {
    const Json& fj = j["families"][f];
    const std::string at = where + ".families[" + std::to_string(f) + "]";
    reject_unknown(fj, {"name", "terms", "eps"}, at);
    SweepFamily fam;
    fam.name = required<std::string>(fj, "name", at);
    if (!fj.contains("terms")) throw ConfigError(at + ": missing key 'terms'");
    fam.terms = parse_terms(fj["terms"], cfg.n, at);
    fam.eps = required<std::vector<double>>(fj, "eps", at);
    if (fam.eps.empty()) throw ConfigError(at + ": 'eps' is empty");
    for (double e : fam.eps)
      if (!std::isfinite(e)) throw ConfigError(at + ": eps must be finite");
    cfg.families.push_back(std::move(fam));
  }
  return cfg;
}

Json sweep_config_to_json(const SweepConfig& config) {
  Json fams = Json::array();
  for (const auto& f : config.families)
    fams.push_back({{"name", f.name}, {"terms", terms_to_json(f.terms, config.n)}, {"eps", f.eps}});
  Json j = {{"n", config.n}, {"p", config.p}, {"families", fams}};
  if (!config.resolution.empty()) j["resolution"] = config.resolution;
  j["seed"] = config.seed;
  return j;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

Json vec_to_json(const Vec& v) {
  Json arr = Json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(number(v[i]));
  return arr;
}

Json to_json(const ZeroReport& r) {
  Json zeros = Json::array();
  for (const auto& z : r.zeros) zeros.push_back(vec_to_json(z));
  Json others = Json::array();
  for (const auto& z : r.other_minima) others.push_back(vec_to_json(z));
  Json saddles = Json::array();
  for (const auto& z : r.saddles) saddles.push_back(vec_to_json(z));
  return {{"lemma", "zeros_" + to_string(r.which)},
          {"n", r.n},
          {"lambda", r.lambda},
          {"pass", r.pass},
          {"witness_min", number(r.witness_min)},
          {"witness_argmin", vec_to_json(r.witness_argmin)},
          {"samples", r.grid_points},
          {"step", r.step},
          {"candidates", r.candidates},
          {"zeros", zeros},
          {"other_minima", others},
          {"saddles", saddles},
          {"unresolved", r.unresolved},
          {"max_zero_distance", r.max_zero_distance}};
}

Json to_json(const BoundsReport& r) {
  Json shells = Json::array();
  for (const auto& s : r.shells)
    shells.push_back({{"radius", s.radius},
                      {"samples", s.samples},
                      {"p_over_r_min", number(s.p_over_r_min)},
                      {"p_over_r_max", number(s.p_over_r_max)},
                      {"p_over_r_residual", s.p_over_r_residual},
                      {"q_residual", s.q_residual},
                      {"q_over_p_min", number(s.q_over_p_min)}});
  return {{"lemma", "quotient_bounds"},
          {"n", r.n},
          {"lambda", r.lambda},
          {"pass", r.pass},
          {"witness_min", number(r.q_over_p.min)},
          {"witness_argmin", vec_to_json(r.q_over_p.argmin)},
          {"samples", r.samples},
          {"q_over_p", {{"min", number(r.q_over_p.min)}, {"max", number(r.q_over_p.max)}}},
          {"p_over_r",
           {{"min", number(r.p_over_r.min)},
            {"max", number(r.p_over_r.max)},
            {"argmin", vec_to_json(r.p_over_r.argmin)}}},
          {"excluded", r.excluded},
          {"skipped", r.skipped},
          {"expansion_tolerance", r.expansion_tolerance},
          {"shells", shells}};
}

Json to_json(const DeficitReport& r) {
  return {{"n", r.n},
          {"p", r.p},
          {"ric0_lp", number(r.ric0_lp)},
          {"weyl_lp", number(r.weyl_lp)},
          {"r_minus_avg_lp", number(r.r_minus_avg_lp)},
          {"r_avg", number(r.r_avg)},
          {"a_inf_norm", number(r.a_inf_norm)},
          {"volume", number(r.volume)},
          {"diameter_estimate", number(r.diameter_estimate)},
          {"diameter_is_estimate", true},
          {"convexity_ok", r.convexity_ok},
          {"min_generalized_eigenvalue", number(r.min_eigenvalue)}};
}

Json to_json(const IdentityResidual& r, double slope) {
  std::string grid;
  for (std::size_t i = 0; i < r.grid.size(); ++i) grid += (i ? "x" : "") + std::to_string(r.grid[i]);
  return {{"name", r.name},
          {"grid", grid},
          {"value", number(r.pointwise_max)},
          {"lp_value", number(r.lp_value)},
          {"slope", number(slope)},
          {"field", r.field}};
}

Json to_json(const CenterSolve& s) {
  return {{"c0", vec_to_json(s.c0)},
          {"c0_norm", s.c0.norm()},
          {"phi_residual", s.phi_residual},
          {"newton_iters", s.iterations},
          {"fallback_steps", s.fallback_steps},
          {"trace", s.trace}};
}

}  // namespace curvstab
