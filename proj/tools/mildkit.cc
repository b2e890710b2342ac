// mildkit: derivative calculus and mildness certification from the command line.
//
// Exit codes: 0 all checks pass, 1 a verification failed, 2 usage or
// precondition error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "mildkit/faa_di_bruno.h"
#include "mildkit/lemmas.h"
#include "mildkit/parametrize.h"
#include "mildkit/report_json.h"

using namespace mildkit;
using nlohmann::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string alpha = "1";
  int n_max = 15;
  std::size_t grid_points = 512;
  int precision_bits = kDefaultPrecisionBits;
  std::vector<std::string> epsilons;
  std::string output;
  std::string format = "json";
  bool deterministic = false;
};

struct Outcome {
  json params;
  json result;
  std::string csv;
  bool pass = true;
};

std::vector<Rational> parse_rational_list(const std::vector<std::string>& items) {
  std::vector<Rational> out;
  for (const std::string& item : items) {
    std::stringstream ss(item);
    std::string piece;
    while (std::getline(ss, piece, ',')) {
      if (!piece.empty()) out.push_back(parse_rational(piece));
    }
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    if (piece.empty()) continue;
    std::size_t used = 0;
    int v = std::stoi(piece, &used);
    if (used != piece.size() || v < 0) throw std::invalid_argument("bad multi-index entry '" + piece + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty multi-index");
  return out;
}

json rationals_json(const std::vector<Rational>& v) {
  json out = json::array();
  for (const Rational& q : v) out.push_back(to_string(q));
  return out;
}

// "6", "e", "3/2*e", "3/2*e^(1/2)"
Constant parse_constant(const std::string& text) {
  static const std::regex form(R"(^\s*(?:([-+]?\d+(?:/\d+)?)\s*\*?\s*)?(e(?:\^\(?([-+]?\d+(?:/\d+)?)\)?)?)?\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, form) || (!m[1].matched && !m[2].matched)) {
    throw std::invalid_argument("cannot parse constant '" + text + "' (use p/q, e, p/q*e^(r/s))");
  }
  Rational q = m[1].matched ? parse_rational(m[1].str()) : Rational(1);
  Rational r = m[2].matched ? (m[3].matched ? parse_rational(m[3].str()) : Rational(1)) : Rational(0);
  return Constant::exact(q, r);
}

MildCert parse_cert(const std::string& text, CertKind kind) {
  std::optional<Constant> A, B;
  std::optional<Rational> C;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("certificate entries must be KEY=VALUE");
    std::string key = item.substr(0, eq), value = item.substr(eq + 1);
    if (key == "A") A = parse_constant(value);
    else if (key == "B") B = parse_constant(value);
    else if (key == "C") C = parse_rational(value);
    else throw std::invalid_argument("unknown certificate key '" + key + "'");
  }
  if (!A || !B || !C) throw std::invalid_argument("certificate needs A=..,B=..,C=..");
  return make_cert(*A, *B, *C, kind);
}

GridSpec grid_from(const RunConfig& cfg) {
  GridSpec g;
  g.points = cfg.grid_points;
  return g;
}

// Function catalogue shared by certify and fit.
struct Subject {
  OraclePtr oracle;
  MildCert default_cert;
  std::string description;
};

Subject make_subject(const std::string& function, const Alpha& alpha, const std::vector<Rational>& mu,
                     int bits) {
  if (function == "p_alpha") {
    return {std::make_shared<ExpPolyOracle>(construct(BasicKind::kPAlpha, 1, alpha.value()), bits),
            p_alpha_cert(alpha), "P_alpha(x) = exp(1 - x^-alpha)"};
  }
  if (function == "exp_linear") {
    if (mu.empty()) throw std::invalid_argument("exp_linear needs --mu");
    return {std::make_shared<ExpPolyOracle>(construct(BasicKind::kExpOfLinear, mu.size(), alpha.value(), mu), bits),
            abm_compose_cert(mu, mu.size(), alpha, compute_M(mu)), "x^mu ∘ P_alpha"};
  }
  if (function == "weakpower") {
    const Rational half(1, 2);
    return {std::make_shared<ExpPolyOracle>(
                construct(BasicKind::kExpOfLinear, 1, alpha.value(), std::span(&half, 1)), bits),
            weak_compose_cert(Constant::exact(1), Constant::exact(1), alpha), "x^(1/2) ∘ P_alpha"};
  }
  throw std::invalid_argument("unknown function '" + function + "' (p_alpha, exp_linear, weakpower, abm)");
}

Unit parse_unit(const std::string& text) {
  if (text == "recip" || text == "1/(1+y)") return Unit::reciprocal_one_plus();
  if (text.rfind("const:", 0) == 0) return Unit::constant_unit(parse_rational(text.substr(6)));
  if (text.rfind("poly:", 0) == 0) return Unit::polynomial(parse_rational_list({text.substr(5)}));
  throw std::invalid_argument("unknown unit '" + text + "' (recip, const:c, poly:c0,c1,...)");
}

// "1,1;1,2" -> {(1,1), (1,2)}
std::vector<std::vector<Rational>> parse_monomials(const std::string& text) {
  std::vector<std::vector<Rational>> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) out.push_back(parse_rational_list({part}));
  return out;
}

Outcome run_derive(const RunConfig& cfg, const std::string& function, const std::string& mu_text,
                   std::size_t var, const std::string& nu_text, const std::string& at_text, bool faa,
                   const std::string& lambda_text) {
  Outcome o;
  MultiIndex nu(parse_int_list(nu_text));
  if (faa) {
    MultiIndex lambda(parse_int_list(lambda_text));
    o.params = {{"nu", nu.entries()}, {"lambda", lambda.entries()}};
    o.result = ps_to_json(nu, lambda, enumerate_ps(nu, lambda));
    return o;
  }
  const Rational a = parse_rational(cfg.alpha);
  std::vector<Rational> mu = mu_text.empty() ? std::vector<Rational>{} : parse_rational_list({mu_text});
  BasicKind kind;
  if (function == "p_alpha") kind = BasicKind::kPAlpha;
  else if (function == "u_alpha") kind = BasicKind::kUAlpha;
  else if (function == "monomial") kind = BasicKind::kMonomial;
  else if (function == "exp_linear") kind = BasicKind::kExpOfLinear;
  else throw std::invalid_argument("unknown function '" + function + "' (p_alpha, u_alpha, monomial, exp_linear)");
  const std::size_t m = mu.empty() ? nu.size() : mu.size();
  if (nu.size() != m) throw std::invalid_argument("--nu must have one entry per variable");
  ExpPoly base = construct(kind, m, a, mu, 0, var);
  ExpPoly d = differentiate(base, std::span<const int>(nu.entries()));
  o.params = {{"function", function}, {"alpha", to_string(a)}, {"mu", rationals_json(mu)}, {"nu", nu.entries()}};
  o.result = {{"base", to_json(base)}, {"derivative", to_json(d)}, {"display", to_display_string(d)},
              {"terms", d.terms().size()}};
  if (!at_text.empty()) {
    std::vector<Rational> point = parse_rational_list({at_text});
    HPReal v = evaluate(d, point, cfg.precision_bits);
    o.result["at"] = rationals_json(point);
    o.result["value"] = v.value.to_string(40);
    o.result["abs_error"] = v.abs_error.to_string(6);
  }
  return o;
}

Outcome run_certify(const RunConfig& cfg, const std::string& function, const std::string& mu_text,
                    const std::string& unit_text, const std::string& cert_text, bool weak) {
  Outcome o;
  const Alpha alpha(parse_rational(cfg.alpha));
  GridSpec grid = grid_from(cfg);
  OraclePtr oracle;
  MildCert cert;
  std::string description;
  if (function == "abm") {
    ABMSpec spec;
    spec.monomials = parse_monomials(mu_text);
    spec.unit = parse_unit(unit_text.empty() ? "recip" : unit_text);
    Chart chart = abm_chart(spec, alpha, cfg.precision_bits);
    oracle = chart.components.back().oracle;
    cert = chart.cert;
    description = "b_j(x) F(b_1(x)) ∘ P_alpha with F = " + spec.unit.name();
  } else {
    std::vector<Rational> mu = mu_text.empty() ? std::vector<Rational>{} : parse_rational_list({mu_text});
    Subject s = make_subject(function, alpha, mu, cfg.precision_bits);
    oracle = s.oracle;
    cert = s.default_cert;
    description = s.description;
  }
  if (!cert_text.empty()) cert = parse_cert(cert_text, weak ? CertKind::kWeaklyMild : CertKind::kMild);
  BoundReport report = verify_cert(*oracle, cert, cfg.n_max, grid);
  o.params = {{"function", function}, {"alpha", to_string(alpha.value())}, {"n_max", cfg.n_max},
              {"grid", cfg.grid_points}, {"precision_bits", cfg.precision_bits}};
  o.result = to_json(report);
  o.result["function"] = description;
  o.csv = std::string(kMarginCsvHeader) +
          margin_csv_rows(report, {to_string(alpha.value()), "", "", function});
  o.pass = report.pass;
  return o;
}

Outcome run_fit(const RunConfig& cfg, const std::string& function, const std::string& mu_text,
                const std::string& C_text) {
  Outcome o;
  const Alpha alpha(parse_rational(cfg.alpha));
  std::vector<Rational> mu = mu_text.empty() ? std::vector<Rational>{} : parse_rational_list({mu_text});
  Subject s = make_subject(function, alpha, mu, cfg.precision_bits);
  if (s.oracle->arity() != 1) throw std::invalid_argument("fit supports univariate functions only");
  Rational C = C_text.empty() ? Rational(Rational(1) / alpha.value()) : parse_rational(C_text);
  C.canonicalize();
  FitResult fit = fit_constants(*s.oracle, C, cfg.n_max, grid_from(cfg));
  o.params = {{"function", function}, {"alpha", to_string(alpha.value())}, {"C", to_string(C)},
              {"n_max", cfg.n_max}, {"grid", cfg.grid_points}};
  o.result = to_json(fit);
  o.result["paper_cert"] = to_json(s.default_cert);
  return o;
}

Outcome run_check_lemmas(const RunConfig& cfg, int k_max) {
  Outcome o;
  const Alpha alpha(parse_rational(cfg.alpha));
  UmildReport umild = check_umild(alpha, k_max);
  json expmild = json::array();
  bool exp_pass = true;
  for (const Rational& r : {Rational(1, 2), Rational(1), Rational(2), Rational(4)}) {
    for (const Rational& s : {Rational(1, 2), Rational(1), Rational(2), Rational(4)}) {
      ExpmildReport e = check_expmild(r, s, alpha, cfg.precision_bits);
      exp_pass = exp_pass && e.pass;
      expmild.push_back(to_json(e));
    }
  }
  o.params = {{"alpha", to_string(alpha.value())}, {"kmax", k_max}};
  o.result = {{"umild", to_json(umild)}, {"expmild", std::move(expmild)}};
  o.pass = umild.pass && exp_pass;
  return o;
}

Outcome run_gf_check(const RunConfig& cfg, const std::string& af, const std::string& bf, const std::string& ag,
                     const std::string& bg) {
  Outcome o;
  GfReport r = gf_check(parse_rational(af), parse_rational(bf), parse_rational(ag), parse_rational(bg), cfg.n_max);
  o.params = {{"n_max", cfg.n_max}};
  o.result = to_json(r);
  o.pass = r.pass;
  return o;
}

std::vector<Rational> default_epsilon_grid() {
  std::vector<Rational> eps;
  for (int k = 1; k <= 10; ++k) eps.push_back(Rational(1, 1L << (2 * k)));
  return eps;
}

Outcome run_parametrize(const RunConfig& cfg, std::size_t samples, const std::string& fit_method,
                        const std::vector<std::string>& heldout_text) {
  Outcome o;
  const Alpha alpha(parse_rational(cfg.alpha));
  std::vector<Rational> eps = cfg.epsilons.empty() ? std::vector<Rational>{Rational(1, 4)}
                                                   : parse_rational_list(cfg.epsilons);
  std::vector<Rational> heldout = parse_rational_list(heldout_text);
  UniformFit method;
  if (fit_method == "envelope") method = UniformFit::kEnvelope;
  else if (fit_method == "largest-eps") method = UniformFit::kLargestEpsilon;
  else throw std::invalid_argument("unknown --fit method '" + fit_method + "' (envelope, largest-eps)");

  GridSpec grid = grid_from(cfg);
  const Rational largest = *std::max_element(eps.begin(), eps.end());
  MildCert cert = fit_uniform_cert(alpha, largest, cfg.n_max, method, grid, 2, cfg.precision_bits);
  std::vector<Rational> all = eps;
  all.insert(all.end(), heldout.begin(), heldout.end());
  FamilyParam family = yomdin_family_with_cert(alpha, all, cert, cfg.precision_bits);

  std::vector<CoverageReport> coverage = verify_family(family, samples);
  UniformReport uniform = uniform_verify(family, cfg.n_max, grid);

  json families = json::array();
  bool coverage_pass = true;
  for (std::size_t i = 0; i < family.parameters.size(); ++i) {
    json charts = json::array();
    for (const Chart& c : family.charts[i]) charts.push_back(to_json(c));
    families.push_back({{"alpha", to_string(alpha.value())},
                        {"epsilon", to_string(family.parameters[i])},
                        {"charts", std::move(charts)},
                        {"cert", to_json(cert)},
                        {"coverage", to_json(coverage[i])}});
    coverage_pass = coverage_pass && coverage[i].pass;
  }
  o.params = {{"alpha", to_string(alpha.value())}, {"epsilons", rationals_json(eps)},
              {"heldout", rationals_json(heldout)}, {"n_max", cfg.n_max}, {"samples", samples},
              {"fit", fit_method}, {"grid", cfg.grid_points}};
  o.result = {{"cert", to_json(cert)}, {"families", std::move(families)}, {"uniform", to_json(uniform)},
              {"coverage_pass", coverage_pass}};
  o.csv = std::string(kMarginCsvHeader) + margin_csv_rows(uniform, to_string(alpha.value()));
  o.pass = coverage_pass && uniform.pass;
  return o;
}

Outcome run_probe(const RunConfig& cfg, bool n_max_given) {
  Outcome o;
  std::vector<Rational> eps = cfg.epsilons.empty() ? default_epsilon_grid() : parse_rational_list(cfg.epsilons);
  const int n_max = n_max_given ? cfg.n_max : kProbeDefaultOrder;
  ProbeReport r = nonuniformity_probe(eps, n_max, grid_from(cfg));
  o.params = {{"epsilons", rationals_json(eps)}, {"n_max", n_max}, {"grid", cfg.grid_points}};
  o.result = to_json(r);
  std::ostringstream csv;
  csv << "epsilon,A0,lower_bound,meets_lower_bound\n";
  for (const ProbeRow& row : r.rows) {
    csv << to_string(row.epsilon) << ',' << row.A0.to_string(17) << ',' << row.lower_bound.to_string(17) << ','
        << (row.meets_lower_bound ? "true" : "false") << '\n';
  }
  o.csv = csv.str();
  o.pass = r.pass;
  return o;
}

Outcome run_bench(const RunConfig& cfg, int max_partition, int nu_order) {
  Outcome o;
  using clock = std::chrono::steady_clock;
  json rows = json::array();
  std::ostringstream csv;
  csv << "task,size,count,seconds\n";
  auto record = [&](const std::string& task, const std::string& size, std::size_t count, double seconds) {
    rows.push_back({{"task", task}, {"size", size}, {"count", count}, {"seconds", seconds}});
    csv << task << ',' << size << ',' << count << ',' << seconds << '\n';
  };

  for (int n = 10; n <= max_partition; n += 10) {
    clear_enumeration_caches();
    auto t0 = clock::now();
    std::size_t count = partitions_univariate(n).size();
    record("partitions_univariate", std::to_string(n), count,
           std::chrono::duration<double>(clock::now() - t0).count());
  }
  for (int e = 1; e <= 3; ++e) {
    // nu of order nu_order spread over e variables, all lambda = (k), k <= |nu|.
    std::vector<int> entries(e, nu_order / e);
    for (int i = 0; i < nu_order % e; ++i) ++entries[i];
    MultiIndex nu(entries);
    clear_enumeration_caches();
    auto t0 = clock::now();
    std::size_t count = 0;
    for (int k = 1; k <= nu_order; ++k) count += enumerate_ps(nu, MultiIndex({k})).size();
    std::string size = "nu=" + json(entries).dump() + ",d=1";
    record("enumerate_ps", size, count, std::chrono::duration<double>(clock::now() - t0).count());
  }
  {
    const Rational a = parse_rational(cfg.alpha);
    auto t0 = clock::now();
    ExpPoly p = construct(BasicKind::kPAlpha, 1, a);
    for (int i = 0; i < 30; ++i) p = differentiate(p, std::size_t{0});
    record("differentiate_p_alpha", "30", p.terms().size(),
           std::chrono::duration<double>(clock::now() - t0).count());
  }
  o.params = {{"alpha", cfg.alpha}, {"max_partition", max_partition}, {"nu_order", nu_order}};
  o.result = {{"rows", std::move(rows)}};
  o.csv = csv.str();
  return o;
}

void emit(const RunConfig& cfg, const std::string& command, const Outcome& o) {
  std::string text;
  if (cfg.format == "csv") {
    if (o.csv.empty()) throw UsageError("--format csv is not available for '" + command + "'");
    text = o.csv;
  } else {
    text = envelope(command, o.params, o.result, o.pass, cfg.deterministic).dump(2) + "\n";
  }
  if (cfg.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(cfg.output);
    if (!out) throw std::runtime_error("cannot open output file " + cfg.output);
    out << text;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mildkit: exact derivatives and mild-bound certification"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  app.set_config("--config", "", "INI file of key=value options (command-line flags win)");

  RunConfig cfg;
  app.add_option("--alpha", cfg.alpha, "alpha as p/q")->capture_default_str();
  auto* nmax_opt = app.add_option("--nmax", cfg.n_max, "maximal derivative order")->capture_default_str();
  app.add_option("--grid", cfg.grid_points, "grid points per axis (univariate)")->capture_default_str();
  app.add_option("--prec", cfg.precision_bits, "working precision in bits")->capture_default_str();
  app.add_option("--eps", cfg.epsilons, "epsilon values, p/q, comma separated or repeated");
  app.add_option("--output", cfg.output, "write the report here instead of stdout");
  app.add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_flag("--csv", [&](std::int64_t) { cfg.format = "csv"; }, "same as --format csv");
  app.add_flag("--deterministic", cfg.deterministic, "omit the timestamp");

  std::string function = "p_alpha", mu, unit, nu = "1", at, lambda = "1", cert_text, C_text;
  std::string af = "1", bf = "1", ag = "1", bg = "1", fit_method = "envelope";
  std::vector<std::string> heldout;
  std::size_t var = 0, samples = 10000;
  bool faa = false, weak = false;
  int k_max = 30, max_partition = 40, nu_order = 12;

  auto* derive = app.add_subcommand("derive", "symbolic partial derivatives of a basic function");
  derive->add_option("--function", function, "p_alpha, u_alpha, monomial, exp_linear")->capture_default_str();
  derive->add_option("--mu", mu, "exponent vector, comma separated");
  derive->add_option("--var", var, "variable of p_alpha / u_alpha");
  derive->add_option("--nu", nu, "multi-index, comma separated")->capture_default_str();
  derive->add_option("--at", at, "evaluate at this point (p/q list)");
  derive->add_flag("--faa", faa, "dump the Faà di Bruno index set p_s(nu, lambda) instead");
  derive->add_option("--lambda", lambda, "outer multi-index for --faa")->capture_default_str();

  auto* certify = app.add_subcommand("certify", "verify a mildness certificate");
  certify->add_option("--function", function, "p_alpha, exp_linear, weakpower, abm")->capture_default_str();
  certify->add_option("--mu", mu, "exponents; for abm components are separated by ';'");
  certify->add_option("--unit", unit, "abm unit: recip, const:c, poly:c0,c1,...");
  certify->add_option("--cert", cert_text, "override: A=..,B=..,C=..");
  certify->add_flag("--weak", weak, "treat --cert as weakly mild");

  auto* fit = app.add_subcommand("fit", "fit A and B for a fixed C");
  fit->add_option("--function", function, "p_alpha, exp_linear, weakpower")->capture_default_str();
  fit->add_option("--mu", mu, "exponent for exp_linear");
  fit->add_option("--C", C_text, "Gevrey index (default 1/alpha)");

  auto* lemmas = app.add_subcommand("check-lemmas", "u_alpha and x^-r exp(-s x^-alpha) lemmas");
  lemmas->add_option("--kmax", k_max, "maximal order")->capture_default_str();

  auto* gf = app.add_subcommand("gf-check", "composition generating-function identity");
  gf->add_option("--af", af)->capture_default_str();
  gf->add_option("--bf", bf)->capture_default_str();
  gf->add_option("--ag", ag)->capture_default_str();
  gf->add_option("--bg", bg)->capture_default_str();

  auto* param = app.add_subcommand("parametrize", "three-chart family for xy = eps^2");
  param->add_option("--samples", samples, "coverage samples per epsilon")->capture_default_str();
  param->add_option("--fit", fit_method, "envelope or largest-eps")->capture_default_str();
  param->add_option("--heldout", heldout, "epsilons verified but not used for fitting");

  auto* probe = app.add_subcommand("probe-nonuniform", "fitted A at C = 0 for naive affine charts");

  auto* bench = app.add_subcommand("bench", "timing table for the enumerations");
  bench->add_option("--max-partition", max_partition)->capture_default_str();
  bench->add_option("--nu-order", nu_order)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    if (cfg.precision_bits < 64) throw UsageError("--prec must be at least 64");
    if (cfg.n_max < 0) throw UsageError("--nmax must be nonnegative");
    if (cfg.grid_points < 4) throw UsageError("--grid must be at least 4");
    Outcome o;
    std::string command = app.get_subcommands().front()->get_name();
    if (derive->parsed()) o = run_derive(cfg, function, mu, var, nu, at, faa, lambda);
    else if (certify->parsed()) o = run_certify(cfg, function, mu, unit, cert_text, weak);
    else if (fit->parsed()) o = run_fit(cfg, function, mu, C_text);
    else if (lemmas->parsed()) o = run_check_lemmas(cfg, k_max);
    else if (gf->parsed()) o = run_gf_check(cfg, af, bf, ag, bg);
    else if (param->parsed()) o = run_parametrize(cfg, samples, fit_method, heldout);
    else if (probe->parsed()) o = run_probe(cfg, nmax_opt->count() > 0);
    else if (bench->parsed()) o = run_bench(cfg, max_partition, nu_order);
    emit(cfg, command, o);
    return o.pass ? kExitPass : kExitFail;
  } catch (const UsageError& e) {
    std::cerr << "mildkit: " << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    // Preconditions, parse failures and I/O: never a verification verdict.
    std::cerr << "mildkit: " << e.what() << "\n";
    return kExitUsage;
  }
}
