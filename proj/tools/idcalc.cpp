// idcalc: command-line front end for the exponent calculus.
//
// Exit codes: 0 all requested checks pass, 1 a check failed,
// 2 invalid input (parse, validation, domain), 3 numerical failure.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "idcalc/idcalc.hpp"
#include "idcalc/spec_io.hpp"
#include "idcalc/verify.hpp"

using namespace idcalc;

namespace {

enum Exit : int { kPass = 0, kFail = 1, kInvalid = 2, kNumerical = 3 };

struct Options {
  std::string measure;
  double beta = 1.0;
  std::vector<double> grid;
  std::string out;
  std::string csv;
  std::uint64_t seed = 1;
  std::size_t mc_n = 100000;
  double mc_step = 1e-3;
  double mc_eps = 1e-3;
  double mc_smax = 20.0;
  bool no_gaussian_correction = false;
  std::string identity;
  bool all = false;
  std::string map = "jbeta";
  std::string kernel = "jbeta";
  double area_u = 1.0;
};

McOptions mc_options(const Options& o) {
  McOptions mc;
  mc.path.step = o.mc_step;
  mc.path.small_jump_cutoff = o.mc_eps;
  mc.path.gaussian_correction = !o.no_gaussian_correction;
  mc.path.validate();
  mc.n = o.mc_n;
  mc.s_max = o.mc_smax;
  mc.seed = o.seed;
  return mc;
}

IdMeasure require_measure(const Options& o) {
  if (o.measure.empty()) throw ValidationError("--measure is required");
  return load_measure(o.measure);
}

std::vector<Vec> grid_for(const Options& o, int dim) {
  if (o.grid.empty()) return identity_grid(dim);
  if (dim != 1) throw ValidationError("--grid is only supported for one-dimensional measures");
  return grid_from_values(o.grid);
}

std::string fmt(const Complex& z) {
  std::ostringstream os;
  os << std::setprecision(12) << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return os.str();
}

std::string fmt_at(const std::vector<double>& at) {
  std::ostringstream os;
  os << std::setprecision(6) << "(";
  for (std::size_t i = 0; i < at.size(); ++i) os << (i ? ", " : "") << at[i];
  os << ")";
  return os.str();
}

void summarize(const VerificationReport& r) {
  std::cout << (r.pass ? "PASS " : "FAIL ") << r.identity << " beta=" << r.beta;
  if (!r.label.empty()) std::cout << " [" << r.label << "]";
  std::cout << " max|diff|=" << std::setprecision(3) << std::scientific << r.grid_max_abs
            << std::defaultfloat << std::setprecision(6) << "\n";
  for (const auto& c : r.checks) {
    std::cout << "  " << (c.inconclusive ? "INCONCLUSIVE" : (c.pass ? "ok  " : "FAIL")) << " " << c.name
              << ": " << std::setprecision(3) << std::scientific << c.max_abs << " (tol " << c.tolerance
              << ")" << std::defaultfloat << std::setprecision(6) << "\n";
  }
  for (const auto& n : r.notes) std::cout << "  note: " << n << "\n";
}

void write_json(const std::string& path, const json& j) {
  if (path.empty()) return;
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot write '" + path + "'");
  f << j.dump(2) << "\n";
}

json bundle(const std::vector<VerificationReport>& reports) {
  json arr = json::array();
  bool pass = true;
  for (const auto& r : reports) {
    arr.push_back(to_json(r));
    pass = pass && r.pass;
  }
  return {{"pass", pass}, {"reports", arr}};
}

int finish(const std::vector<VerificationReport>& reports, const Options& o) {
  bool pass = true;
  for (const auto& r : reports) {
    summarize(r);
    pass = pass && r.pass;
  }
  if (reports.size() == 1)
    write_json(o.out, to_json(reports.front()));
  else
    write_json(o.out, bundle(reports));
  return pass ? kPass : kFail;
}

/// Prints Phi at the grid; the report checks Hermitian symmetry Phi(-y) = conj Phi(y).
int cmd_exponent(const Options& o) {
  const auto mu = require_measure(o);
  VerificationReport rep;
  rep.identity = "exponent";
  rep.tolerance = 1e-12;
  rep.pass = true;
  for (const auto& y : grid_for(o, mu.dim())) {
    const Complex phi = mu(y);
    const Complex mirror = std::conj(mu(Vec(-y)));
    rep.points.push_back({coords(y), phi, mirror, std::abs(phi - mirror), {}});
    rep.grid_max_abs = std::max(rep.grid_max_abs, rep.points.back().abs_diff);
    std::cout << "Phi" << fmt_at(coords(y)) << " = " << fmt(phi) << "\n";
  }
  rep.add_check({"Phi(-y) = conj Phi(y)", rep.grid_max_abs, rep.tolerance, rep.grid_max_abs < rep.tolerance});
  const auto lm = mu.log_moment_known();
  rep.notes.push_back(std::string("log-moment: ") + (lm ? (*lm ? "finite" : "not known finite") : "unknown"));
  return finish({rep}, o);
}

/// Applies one map and tabulates the original and mapped exponents.
int cmd_map(const Options& o) {
  const auto mu = require_measure(o);
  const Beta beta(o.beta);
  IdMeasure out = mu;
  if (o.map == "jbeta")
    out = j_beta(mu, beta);
  else if (o.map == "jbeta-inverse")
    out = j_beta_inverse(mu, beta);
  else if (o.map == "i")
    out = i_map(mu);
  else if (o.map == "i-of-jbeta")
    out = i_of_j_beta(mu, beta);
  else if (o.map == "cor1a")
    out = corollary1a_kernel(mu, beta);
  else
    throw ValidationError("unknown map '" + o.map + "' (jbeta, jbeta-inverse, i, i-of-jbeta, cor1a)");

  VerificationReport rep;
  rep.identity = "map:" + o.map;
  rep.beta = o.beta;
  rep.pass = true;
  for (const auto& y : grid_for(o, mu.dim())) {
    const Complex before = mu(y);
    const Complex after = out(y);
    rep.points.push_back({coords(y), before, after, std::abs(before - after), {}});
    std::cout << fmt_at(coords(y)) << "  Phi = " << fmt(before) << "  mapped = " << fmt(after) << "\n";
  }
  if (out.has_triplet()) {
    const auto& t = out.triplet();
    std::ostringstream os;
    os << "mapped triplet: shift " << t.shift.transpose() << ", cov trace " << t.cov.trace() << ", "
       << t.spectral.rays().size() << " ray(s)";
    rep.notes.push_back(os.str());
  }
  return finish({rep}, o);
}

/// rho = J^{2 beta}(nu^{1/2}) and the check mu = J^beta(rho) * rho.
int cmd_factor(const Options& o) {
  const auto nu = require_measure(o);
  const Beta beta(o.beta);
  const auto rho = factor_rho(nu, beta);
  for (const auto& y : grid_for(o, nu.dim()))
    std::cout << "Phi_rho" << fmt_at(coords(y)) << " = " << fmt(rho(y)) << "\n";
  return finish({verify_prop1(nu, beta)}, o);
}

std::vector<VerificationReport> verify_all(const McOptions& mc) {
  std::vector<VerificationReport> out;
  auto tag = [&mc](VerificationReport r, const std::string& fam) {
    r.seed = fam;
    if (r.identity == "prop2" || r.identity == "cor3") r.notes.push_back("rng seed " + std::to_string(mc.seed));
    return r;
  };
  for (const auto& fam : seed_family_names()) {
    const auto nu = seed_family(fam);
    for (double b : {0.5, 1.0, 2.0}) {
      for (const auto& id : identity_names()) {
        if (id == "cor3" || id == "levyarea") continue;
        auto r = verify_identity(id, nu, Beta(b), mc);
        out.push_back(tag(std::move(r), fam));
      }
    }
  }
  for (const std::string fam : {"gamma", "poisson"}) {
    auto r = verify_corollary3(seed_family(fam), mc);
    out.push_back(tag(std::move(r), fam));
  }
  for (double u : {0.5, 1.0, 2.0}) out.push_back(verify_levy_area(AreaParams(u)));
  return out;
}

int cmd_verify(const Options& o) {
  const auto mc = mc_options(o);
  if (o.all) return finish(verify_all(mc), o);
  if (o.identity.empty()) throw ValidationError("verify needs --identity or --all");
  if (o.identity == "levyarea") return finish({verify_levy_area(AreaParams(o.area_u))}, o);
  auto rep = verify_identity(o.identity, require_measure(o), Beta(o.beta), mc);
  rep.seed = o.measure;
  if (o.identity == "prop2" || o.identity == "cor3") rep.notes.push_back("rng seed " + std::to_string(o.seed));
  return finish({rep}, o);
}

/// Samples a kernel integral, writes the samples as CSV and checks the ecf
/// against the matching quadrature exponent.
int cmd_simulate(const Options& o) {
  const auto nu = require_measure(o);
  if (!nu.has_triplet()) throw DomainError("simulation needs a measure with a triplet");
  const auto mc = mc_options(o);
  const Beta beta(o.beta);
  KernelIntegralSpec spec;
  IdMeasure target = nu;
  if (o.kernel == "jbeta") {
    spec = kernels::j_beta(beta);
    target = j_beta(nu, beta);
  } else if (o.kernel == "i") {
    spec = kernels::i_map(mc.s_max);
    target = i_map(nu);
  } else if (o.kernel == "i-of-jbeta") {
    spec = kernels::i_of_j_beta(beta, mc.s_max);
    target = i_of_j_beta(nu, beta);
  } else if (o.kernel == "cor1a") {
    spec = kernels::corollary1a(beta);
    target = corollary1a_kernel(nu, beta);
  } else {
    throw ValidationError("unknown kernel '" + o.kernel + "' (jbeta, i, i-of-jbeta, cor1a)");
  }
  auto rep = verify_sampler("simulate:" + o.kernel, nu, spec, target, o.beta, mc);
  rep.seed = o.measure;
  rep.notes.push_back("rng seed " + std::to_string(o.seed));
  if (!o.csv.empty()) {
    const auto samples = sample_integral(nu.triplet(), spec, mc.path, mc.n, mc.seed);
    std::ofstream f(o.csv);
    if (!f) throw ValidationError("cannot write '" + o.csv + "'");
    write_samples_csv(f, samples);
  }
  return finish({rep}, o);
}

/// Plot-ready table of the area example: t, Phi_nu, log(tu/sinh tu), I(nu), discrepancy.
int cmd_levy_area(const Options& o) {
  const AreaParams p(o.area_u);
  if (!o.csv.empty()) {
    std::ofstream f(o.csv);
    if (!f) throw ValidationError("cannot write '" + o.csv + "'");
    const auto inu = i_map(area_nu(p));
    f << "t,phi_nu,log_sinh_factor,i_map,discrepancy\n" << std::setprecision(17);
    const std::vector<double> ts = o.grid.empty() ? area_grid() : o.grid;
    for (double t : ts) {
      const double lhs = inu(scalar_vec(t)).real();
      const double rhs = sinh_factor_exponent(p, t).real();
      f << t << "," << nu_exponent(p, t).real() << "," << rhs << "," << lhs << "," << std::abs(lhs - rhs)
        << "\n";
    }
  }
  return finish({verify_levy_area(p)}, o);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Infinitely divisible exponents: J^beta and I maps, factorizations, Monte Carlo checks"};
  app.require_subcommand(1);
  Options o;

  auto common = [&o](CLI::App* sub, bool needs_measure) {
    auto* m = sub->add_option("--measure", o.measure, "measure spec (JSON)");
    if (needs_measure) m->required();
    sub->add_option("--beta", o.beta, "beta > 0");
    sub->add_option("--grid", o.grid, "evaluation points (1-d)")->delimiter(',');
    sub->add_option("--out", o.out, "JSON report path");
  };
  auto mc_flags = [&o](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Monte Carlo seed");
    sub->add_option("--mc.n", o.mc_n, "sample paths");
    sub->add_option("--mc.step", o.mc_step, "mesh step");
    sub->add_option("--mc.eps", o.mc_eps, "small-jump cutoff");
    sub->add_option("--mc.smax", o.mc_smax, "truncation of infinite horizons");
    sub->add_flag("--mc.no-gaussian-correction", o.no_gaussian_correction,
                  "drop the Gaussian stand-in for jumps below the cutoff");
  };

  auto* exponent = app.add_subcommand("exponent", "evaluate Phi on a grid");
  common(exponent, true);
  auto* map = app.add_subcommand("map", "apply a map and tabulate the result");
  common(map, true);
  map->add_option("--map", o.map, "jbeta | jbeta-inverse | i | i-of-jbeta | cor1a");
  auto* factor = app.add_subcommand("factor", "factor mu = J^beta(rho) * rho");
  common(factor, true);
  auto* verify = app.add_subcommand("verify", "run a named identity or the full matrix");
  common(verify, false);
  mc_flags(verify);
  verify->add_option("--identity", o.identity, "identity name")
      ->check(CLI::IsMember(identity_names()));
  verify->add_flag("--all", o.all, "families x beta in {0.5, 1, 2}, with Monte Carlo");
  verify->add_option("--u", o.area_u, "area time for levyarea");
  auto* simulate = app.add_subcommand("simulate", "sample a kernel integral and test its ecf");
  common(simulate, true);
  mc_flags(simulate);
  simulate->add_option("--kernel", o.kernel, "jbeta | i | i-of-jbeta | cor1a");
  simulate->add_option("--csv", o.csv, "sample dump");
  auto* area = app.add_subcommand("levy-area", "area example table and checks");
  area->add_option("--u", o.area_u, "area time u > 0");
  area->add_option("--grid", o.grid, "t values")->delimiter(',');
  area->add_option("--csv", o.csv, "table output");
  area->add_option("--out", o.out, "JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kInvalid;
  }

  try {
    if (*exponent) return cmd_exponent(o);
    if (*map) return cmd_map(o);
    if (*factor) return cmd_factor(o);
    if (*verify) return cmd_verify(o);
    if (*simulate) return cmd_simulate(o);
    if (*area) return cmd_levy_area(o);
  } catch (const QuadratureError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}
