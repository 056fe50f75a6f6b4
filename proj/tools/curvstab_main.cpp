#include "curvstab/errors.hpp"
#include "curvstab/io.hpp"
#include "curvstab/suites.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace curvstab;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kConfigError = 2, kNumericError = 3 };

struct Options {
  std::string input;
  std::string output;
  std::optional<int> n;
  std::vector<double> p;
  std::vector<int> resolution;
  std::optional<double> lambda;
  std::vector<double> eps;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<double> tolerance;
  int count = 200;
};

const char* verdict(bool pass) { return pass ? "PASS" : "FAIL"; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void validate_paths(const Options& o, bool needs_input) {
  namespace fs = std::filesystem;
  if (needs_input && o.input.empty()) throw ConfigError("--input is required for this command");
  if (!o.input.empty() && !fs::is_regular_file(o.input)) throw ConfigError("input '" + o.input + "' is not a readable file");
  if (!o.output.empty()) {
    const fs::path out(o.output);
    if (fs::is_directory(out)) throw ConfigError("output '" + o.output + "' is a directory");
    const fs::path parent = out.parent_path();
    if (!parent.empty() && !fs::is_directory(parent))
      throw ConfigError("output directory '" + parent.string() + "' does not exist");
  }
}

void configure_threads(const Options& o) {
  int threads = 0;
  if (o.threads) {
    threads = *o.threads;
  } else if (const char* env = std::getenv("CURVSTAB_THREADS")) {
    try {
      threads = std::stoi(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("CURVSTAB_THREADS='") + env + "' is not an integer");
    }
  }
  if (o.threads || std::getenv("CURVSTAB_THREADS")) {
    if (threads < 1) throw ConfigError("thread count must be >= 1");
    set_thread_count(threads);
  }
}

int dimension(const Options& o, int fallback) {
  const int n = o.n.value_or(fallback);
  if (n < 3 || n > kMaxDim) throw ConfigError("--n must lie in [3, " + std::to_string(kMaxDim) + "]");
  return n;
}

std::vector<double> exponents_p(const Options& o, std::vector<double> fallback) {
  std::vector<double> p = o.p.empty() ? std::move(fallback) : o.p;
  for (double v : p)
    if (!(v > 1.0) || !std::isfinite(v)) throw ConfigError("every --p must lie in (1, inf)");
  return p;
}

std::vector<int> grid_resolution(const Options& o, int n) {
  if (o.resolution.empty()) return default_resolution(n);
  if (o.resolution.size() != 1 && static_cast<int>(o.resolution.size()) != n)
    throw ConfigError("--resolution needs 1 or n entries");
  return expand_resolution(n, o.resolution);
}

void write_json(const Options& o, const Json& j) {
  if (o.output.empty()) return;
  std::ofstream out(o.output);
  if (!out) throw ConfigError("cannot write '" + o.output + "'");
  out << j.dump(2) << '\n';
}

Json residual_list(const std::vector<IdentityResidual>& rs) {
  Json arr = Json::array();
  for (const auto& r : rs) arr.push_back(to_json(r));
  return arr;
}

int verify_identities(const Options& o) {
  validate_paths(o, false);
  const int n = dimension(o, 3);
  const IdentitySuite s =
      run_identity_suite(n, grid_resolution(o, n), o.tolerance.value_or(1e-6), o.seed.value_or(1));

  Json gates = Json::array();
  for (const auto& g : s.gates)
    gates.push_back({{"h", g.h}, {"err_h", g.err_h}, {"err_half", g.err_half}, {"ratio", g.ratio},
                     {"exact", g.exact}, {"pass", g.pass}});
  Json lin = Json::array();
  for (std::size_t k = 0; k < s.linearization.names.size(); ++k)
    lin.push_back({{"name", s.linearization.names[k]},
                   {"eps", s.linearization.eps},
                   {"values", s.linearization.values[k]},
                   {"slope", s.linearization.slopes[k]},
                   {"ratios", s.linearization.ratios[k]}});
  const auto& pc = s.pipeline;
  Json j = {{"command", "verify-identities"},
            {"n", n},
            {"resolution", s.resolution},
            {"pass", s.pass},
            {"commutation", s.commutation},
            {"bianchi", residual_list(s.bianchi)},
            {"bianchi_max", s.bianchi_max},
            {"fd_gates", gates},
            {"bochner", s.bochner},
            {"pipeline",
             {{"fields", pc.fields}, {"nodes", pc.nodes}, {"ricci_gap", pc.ricci_gap},
              {"norm_identity", pc.norm_identity}, {"weyl_trace", pc.weyl_trace},
              {"weyl_norm", pc.weyl_norm}, {"pass", pc.pass}}},
            {"linearization", lin}};
  write_json(o, j);

  std::cout << verdict(s.commutation < 1e-9) << " commutation " << fmt(s.commutation) << '\n'
            << verdict(s.bianchi_pass) << " bianchi max " << fmt(s.bianchi_max) << " over "
            << s.bianchi.size() / 2 << " fields (tol " << fmt(s.tolerance) << ")\n"
            << verdict(s.gate_pass) << " fd order gate";
  for (const auto& g : s.gates) std::cout << ' ' << fmt(g.ratio);
  std::cout << '\n'
            << verdict(s.bochner_pass) << " bochner max " << fmt(s.bochner_max) << '\n'
            << verdict(pc.pass) << " curvature pipeline ricci " << fmt(pc.ricci_gap) << " norm "
            << fmt(pc.norm_identity) << " weyl trace " << fmt(pc.weyl_trace) << '\n'
            << verdict(s.linearization_pass) << " linearization slopes";
  for (double sl : s.linearization.slopes) std::cout << ' ' << fmt(sl);
  std::cout << '\n';
  return s.pass ? kOk : kCheckFailed;
}

int verify_poly(const Options& o) {
  validate_paths(o, false);
  const int n = dimension(o, 3);
  const double lambda = o.lambda.value_or(3.0);
  const PolyStudy s = run_poly_study(n, lambda, 0.05, 1000000, o.seed.value_or(1));

  Json zeros = Json::array();
  for (const auto& z : s.zeros) zeros.push_back(to_json(z));
  Json j = {{"command", "verify-poly"},
            {"n", n},
            {"lambda", lambda},
            {"pass", s.pass},
            {"zero_reports", zeros},
            {"bounds", to_json(s.bounds)},
            {"p_discrepancy", {{"samples", s.discrepancy_samples}, {"max", s.p_discrepancy}}}};
  write_json(o, j);

  for (const auto& z : s.zeros)
    std::cout << verdict(z.pass && z.zeros.size() == 2) << " zeros of " << to_string(z.which) << ": "
              << z.zeros.size() << " clusters, " << z.saddles.size() << " saddles, max distance "
              << fmt(z.max_zero_distance) << '\n';
  std::cout << verdict(s.bounds.pass) << " quotient bounds min q/p " << fmt(s.bounds.q_over_p.min)
            << " min p/r " << fmt(s.bounds.p_over_r.min) << '\n'
            << verdict(s.p_discrepancy < kPDiscrepancyTolerance) << " closed form p vs contraction "
            << fmt(s.p_discrepancy) << '\n';
  return s.pass ? kOk : kCheckFailed;
}

SurfaceSpec load_surface(const Options& o) {
  SurfaceSpec spec = parse_surface(read_json_file(o.input));
  if (o.n && *o.n != spec.field.n) throw ConfigError("--n disagrees with the surface file");
  return spec;
}

int deficit(const Options& o) {
  validate_paths(o, true);
  SurfaceSpec spec = load_surface(o);
  const int n = spec.field.n;
  const QuadratureGrid grid = build_grid(n, grid_resolution(o, n));
  const RadialField field = spec.normalize_volume ? normalize_volume(spec.field, grid) : spec.field;
  const DeficitNodes nodes = deficit_nodes(field, grid);

  bool pass = true;
  Json reports = Json::array();
  for (double p : exponents_p(o, {2.0})) {
    const DeficitReport d = summarize_deficits(nodes, grid, p);
    reports.push_back(to_json(d));
    std::cout << "p " << p << " ric0 " << fmt(d.ric0_lp) << " weyl " << fmt(d.weyl_lp) << " R-avg "
              << fmt(d.r_minus_avg_lp) << " avg R " << fmt(d.r_avg) << " convex " << d.convexity_ok << '\n';
    if (o.tolerance) {
      const bool ok = d.ric0_lp < *o.tolerance && d.weyl_lp < *o.tolerance && d.r_minus_avg_lp < *o.tolerance;
      std::cout << verdict(ok) << " deficits below " << fmt(*o.tolerance) << '\n';
      pass = pass && ok;
    }
  }
  write_json(o, {{"command", "deficit"}, {"pass", pass}, {"surface", surface_to_json(field, false)},
                 {"reports", reports}});
  return pass ? kOk : kCheckFailed;
}

int recenter(const Options& o) {
  validate_paths(o, true);
  SurfaceSpec spec = load_surface(o);
  const int n = spec.field.n;
  const QuadratureGrid grid = build_grid(n, grid_resolution(o, n));
  const RadialField field = spec.normalize_volume ? normalize_volume(spec.field, grid) : spec.field;
  const CenterSolve c = solve_center(field, grid);
  const ClosenessNodes cn = closeness_nodes(log_radius(field), c.c0, grid);
  const double vf = first_moment(cn.f_c0_values, grid).norm();
  const double tol = o.tolerance.value_or(kPhiTolerance);

  Json closeness = Json::array();
  for (double p : exponents_p(o, {2.0})) {
    const Closeness cl = summarize_closeness(cn, grid, p);
    closeness.push_back({{"p", p}, {"f_c0_w2p", cl.f_c0_w2p}, {"psi_minus_id_w2p", cl.psi_minus_id_w2p},
                         {"pullback_w1p", cl.pullback_w1p}});
  }
  const bool pass = c.phi_residual < tol;
  write_json(o, {{"command", "recenter"}, {"pass", pass}, {"center", to_json(c)}, {"vf_residual", vf},
                 {"closeness", closeness}});
  std::cout << verdict(pass) << " |Phi(c0)| " << fmt(c.phi_residual) << " after " << c.iterations
            << " steps, |c0| " << fmt(c.c0.norm()) << ", |v_f(c0)| " << fmt(vf) << '\n';
  return pass ? kOk : kCheckFailed;
}

int sweep(const Options& o) {
  validate_paths(o, false);
  SweepConfig cfg;
  if (!o.input.empty()) {
    cfg = parse_sweep_config(read_json_file(o.input));
    if (o.n && *o.n != cfg.n) throw ConfigError("--n disagrees with the sweep config");
  } else {
    cfg = default_sweep_config(dimension(o, 3));
  }
  if (!o.p.empty()) cfg.p = exponents_p(o, {});
  if (!o.eps.empty())
    for (auto& f : cfg.families) f.eps = o.eps;
  if (!o.resolution.empty()) cfg.resolution = grid_resolution(o, cfg.n);
  if (o.seed) cfg.seed = *o.seed;

  const auto records = run_sweep(cfg);
  std::ostringstream csv;
  write_csv(csv, records);
  std::ostream& log = o.output.empty() ? std::cerr : std::cout;
  if (o.output.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(o.output, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + o.output + "'");
    out << csv.str();
  }

  bool solved = true;
  for (const auto& r : records) solved = solved && r.status != "solver_error";
  for (const auto& f : summarize_sweep(records))
    log << verdict(f.all_ok && f.finite) << ' ' << f.name << ": " << f.rows << " rows, ratio_main "
        << fmt(f.ratio_min) << ".." << fmt(f.ratio_max) << ", max |Phi| " << fmt(f.phi_max) << ", weyl K "
        << fmt(f.weyl_k) << '\n';
  return solved ? kOk : kCheckFailed;
}

int obata_check(const Options& o) {
  validate_paths(o, false);
  const int n = dimension(o, 3);
  const ObataStudy s =
      run_obata_study(n, o.count, exponents_p(o, {1.5, 2.0, 3.0}), grid_resolution(o, n), o.seed.value_or(1));
  write_json(o, {{"command", "obata-check"},
                 {"n", n},
                 {"fields", s.fields},
                 {"pass", s.pass},
                 {"p", s.p},
                 {"resolution", s.resolution},
                 {"doubled", s.doubled},
                 {"linear_lhs", s.linear_lhs},
                 {"linear_rhs", s.linear_rhs},
                 {"max_ratio", s.max_ratio},
                 {"max_ratio_doubled", s.max_ratio_doubled},
                 {"change", s.change}});
  std::cout << verdict(s.linear_lhs < kObataLinearTolerance && s.linear_rhs < kObataLinearTolerance)
            << " linear fields lhs " << fmt(s.linear_lhs) << " rhs " << fmt(s.linear_rhs) << '\n';
  for (std::size_t k = 0; k < s.p.size(); ++k)
    std::cout << verdict(s.finite && s.change[k] < kObataGridChange) << " p " << s.p[k] << " max ratio "
              << fmt(s.max_ratio[k]) << " doubled " << fmt(s.max_ratio_doubled[k]) << '\n';
  return s.pass ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curvature stability checks for radial graphs over the sphere"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--input", o.input, "surface or sweep config (JSON)");
    sub->add_option("--output", o.output, "machine-readable output (JSON, or CSV for sweep)");
    sub->add_option("--n", o.n, "sphere dimension");
    sub->add_option("--p", o.p, "Lebesgue exponents");
    sub->add_option("--resolution", o.resolution, "quadrature nodes per angle (1 or n entries)");
    sub->add_option("--lambda", o.lambda, "box half width for the lemma polynomials");
    sub->add_option("--eps", o.eps, "amplitudes, replacing every sweep family's list");
    sub->add_option("--seed", o.seed, "sampling seed");
    sub->add_option("--threads", o.threads, "OpenMP threads (default: CURVSTAB_THREADS)");
    sub->add_option("--tolerance", o.tolerance, "pass threshold for the command's main check");
  };
  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  };
  const Command commands[] = {
      {"verify-identities", "commutation, Bianchi, Bochner, curvature algebra and linearization checks",
       verify_identities},
      {"verify-poly", "zero sets and quotient bounds of the lemma polynomials", verify_poly},
      {"deficit", "curvature deficits of a surface", deficit},
      {"recenter", "solve for the optimal centre and report closeness norms", recenter},
      {"sweep", "deficit and stability ratios over amplitude families (CSV)", sweep},
      {"obata-check", "Obata ratio on random fields under grid doubling", obata_check},
  };
  const Command* chosen = nullptr;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    common(sub);
    if (std::string(c.name) == "obata-check") sub->add_option("--count", o.count, "number of random fields");
    sub->callback([&chosen, &c] { chosen = &c; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    configure_threads(o);
    return chosen->run(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericError;
  }
}
