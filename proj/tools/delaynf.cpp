// delaynf: spectrum, normal form, rank scan, realization and self-test for
// scalar delay equations at a saddle-node/multiple-Hopf point.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "delaynf/errors.hpp"
#include "delaynf/model_io.hpp"
#include "delaynf/normal_form.hpp"
#include "delaynf/realize.hpp"
#include "delaynf/selftest.hpp"
#include "delaynf/version.hpp"

using namespace delaynf;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kFail = 1, kPrecondition = 2, kNumerical = 3, kParse = 4 };

struct Common {
  std::uint64_t seed = 0;
  std::string json_out;
};

json header(const std::string& command, const Common& c) {
  return {{"tool", "delaynf"}, {"version", kVersion}, {"command", command}, {"seed", c.seed}};
}

void emit(const json& doc, const Common& c) {
  std::cout << "--- machine ---\n" << doc.dump(2) << "\n";
  if (!c.json_out.empty()) {
    std::ofstream out(c.json_out);
    if (!out) throw PreconditionError(c.json_out + ": cannot write");
    out << doc.dump(2) << "\n";
  }
}

std::vector<std::string> center_names(int p, int s) {
  std::vector<std::string> n{"x0"};
  for (int j = 1; j <= p; ++j) {
    n.push_back(fmt::format("x{}", j));
    n.push_back(fmt::format("xb{}", j));
  }
  n.push_back("nu");
  for (int t = 1; t <= s; ++t) n.push_back(fmt::format("mu{}", t));
  return n;
}

std::vector<std::string> radial_names(int p, int s, const char* prefix) {
  std::vector<std::string> n;
  for (int j = 0; j <= p; ++j) n.push_back(fmt::format("{}{}", prefix, j));
  for (int t = 1; t <= s; ++t) n.push_back(fmt::format("mu{}", t));
  return n;
}

std::vector<std::string> delay_names(int d, int s) {
  std::vector<std::string> n;
  for (int i = 1; i <= d; ++i) n.push_back(fmt::format("z{}", i));
  for (int t = 1; t <= s; ++t) n.push_back(fmt::format("mu{}", t));
  return n;
}

std::string relation_text(const std::vector<int>& r) {
  std::string s = "(";
  for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + std::to_string(r[i]);
  return s + ")";
}

struct Spectrum {
  SpectralData data;
  HypothesisReport hyp;
};

Spectrum analyse(const ModelFile& mf) {
  Spectrum s{spectral_data(mf.model.kernel, mf.model.omegas, mf.scan), {}};
  s.hyp = verify_hypothesis(mf.model.kernel, s.data);
  return s;
}

void require_hypothesis(const Spectrum& s) {
  if (s.hyp.ok()) return;
  std::string why;
  if (!s.hyp.simple) why = "a root is not simple";
  if (!s.hyp.nonresonant && s.hyp.relation) why = "resonance r=" + relation_text(*s.hyp.relation);
  if (!s.hyp.margin_positive) why = "no spectral margin";
  throw PreconditionError("spectral hypothesis fails: " + why);
}

int cmd_spectrum(const std::string& model_path, const Common& c) {
  const ModelFile mf = load_model(model_path);
  const Spectrum s = analyse(mf);
  const int p = static_cast<int>(mf.model.omegas.size());
  std::cout << "model " << model_path << "\n";
  if (mf.design_points) std::cout << "kernel designed from delay points (condition " << fmt_human(mf.design_condition) << ")\n";
  std::cout << fmt::format("  {:<6} {:<22} {:<22} {}\n", "k", "root", "Delta'", "u_k");
  for (std::size_t k = 0; k < s.data.roots.size(); ++k) {
    std::cout << fmt::format("  {:<6} {:<22} {:<22} {}\n", k, fmt_human(s.data.roots[k]), fmt_human(s.data.delta_primes[k]),
                             fmt_human(cplx(s.data.psi0(static_cast<Eigen::Index>(k)))));
  }
  std::cout << "margin " << fmt_human(s.data.margin) << (s.data.margin_from_window ? " (window edge)" : "") << "\n";
  std::cout << "psi_{2p+2,1}(0) = 0\n";
  std::string verdict = s.hyp.ok() ? "hypothesis holds" : "hypothesis fails";
  if (!s.hyp.nonresonant && s.hyp.relation) verdict += ": resonance r=" + relation_text(*s.hyp.relation);
  if (!s.hyp.simple) verdict += ": root not simple";
  if (!s.hyp.margin_positive) verdict += ": no margin";
  std::cout << verdict << " (integer relations checked up to height " << s.hyp.r_max << ")\n";

  json doc = header("spectrum", c);
  json roots = json::array();
  for (std::size_t k = 0; k < s.data.roots.size(); ++k) {
    roots.push_back({{"root", {fmt_machine(s.data.roots[k].real()), fmt_machine(s.data.roots[k].imag())}},
                     {"delta_prime", {fmt_machine(s.data.delta_primes[k].real()), fmt_machine(s.data.delta_primes[k].imag())}},
                     {"u", {fmt_machine(s.data.psi0(static_cast<Eigen::Index>(k)).real()),
                            fmt_machine(s.data.psi0(static_cast<Eigen::Index>(k)).imag())}}});
  }
  doc["p"] = p;
  doc["roots"] = roots;
  doc["margin"] = fmt_machine(s.data.margin);
  doc["hypothesis"] = {{"ok", s.hyp.ok()},
                       {"simple", s.hyp.simple},
                       {"nonresonant", s.hyp.nonresonant},
                       {"r_max", s.hyp.r_max},
                       {"margin_positive", s.hyp.margin_positive}};
  if (s.hyp.relation) doc["hypothesis"]["relation"] = *s.hyp.relation;
  emit(doc, c);
  return s.hyp.ok() ? kOk : kPrecondition;
}

int cmd_nf(const std::string& model_path, std::optional<int> order_opt, const std::string& mode_name,
           const std::string& csv_path, const Common& c) {
  ModelFile mf = load_model(model_path);
  if (order_opt) {
    mf.model.order = *order_opt;
    if (mf.model.order < 2) throw PreconditionError("--order must be >= 2");
    mf.model.eta = mf.model.eta.truncated(mf.model.order);
    mf.model.xi = mf.model.xi.truncated(mf.model.order);
  }
  const NfMode mode = mode_name == "leading" ? NfMode::leading : NfMode::ode_reduction;
  const Spectrum s = analyse(mf);
  require_hypothesis(s);
  const RfdeModel& m = mf.model;
  const int p = static_cast<int>(m.omegas.size());
  const NormalFormOutput nf = normal_form(reduce_to_ode(m, s.data), m.order, mode);

  std::vector<std::string> caveats;
  if (m.order >= 3) {
    caveats.push_back(mode == NfMode::ode_reduction
                          ? "mode ode_reduction: degree >= 3 terms omit the U2/Q1 corrections of the full delay-equation normal form"
                          : "mode leading: the corrections Y_j, Z_j induced by lower degrees are ignored");
  }

  std::vector<std::string> comps{"x0"};
  for (int j = 1; j <= p; ++j) {
    comps.push_back(fmt::format("x{}", j));
    comps.push_back(fmt::format("xb{}", j));
  }
  std::cout << "normal form of " << model_path << " to order " << m.order << " (mode " << to_string(mode) << ")\n";
  for (int j = 2; j <= m.order; ++j) {
    std::cout << "degree " << j << " equivariant terms:\n"
              << poly_table(nf.g[static_cast<std::size_t>(j)], center_names(p, m.s), comps);
  }
  std::vector<std::string> rdots, tdots;
  for (int j = 0; j <= p; ++j) rdots.push_back(fmt::format("rho{}'", j));
  for (int j = 1; j <= p; ++j) tdots.push_back(fmt::format("theta{}'", j));
  std::cout << "radial equations (rho0' = nu + ...):\n" << poly_table(nf.radial, radial_names(p, m.s, "rho"), rdots);
  std::cout << "angular equations (theta_j' = omega_j + ...):\n" << poly_table(nf.angular, radial_names(p, m.s, "rho"), tdots);
  for (const auto& cv : caveats) std::cout << "caveat: " << cv << "\n";

  json doc = header("nf", c);
  doc["mode"] = to_string(mode);
  doc["order"] = m.order;
  doc["p"] = p;
  doc["s"] = m.s;
  doc["caveats"] = caveats;
  json degrees = json::array();
  for (int j = 2; j <= m.order; ++j) {
    const auto i = static_cast<std::size_t>(j);
    degrees.push_back({{"degree", j},
                       {"g", poly_to_json(nf.g[i])},
                       {"homological_residual", fmt_machine(nf.homological_residual[i])}});
  }
  doc["degrees"] = degrees;
  doc["radial"] = poly_to_json(nf.radial);
  doc["angular"] = poly_to_json(nf.angular);
  doc["nu_forcing"] = m.nu_forcing;
  emit(doc, c);

  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw PreconditionError(csv_path + ": cannot write");
    out << "part,component,exponents,re,im\n";
    for (const auto& [part, poly] : {std::pair<const char*, const Poly*>{"radial", &nf.radial}, {"angular", &nf.angular}}) {
      for (int k = 0; k < poly->ncomponents(); ++k) {
        for (const auto& [mon, coef] : (*poly)[k]) {
          std::string e;
          for (int x : mon.exponents()) e += (e.empty() ? "" : " ") + std::to_string(x);
          out << part << "," << k << "," << e << "," << fmt_machine(coef.real()) << "," << fmt_machine(coef.imag()) << "\n";
        }
      }
    }
  }
  return kOk;
}

int cmd_rank_scan(const std::string& model_path, int order, int samples, std::optional<int> delays, bool serial,
                  const std::string& csv_path, const Common& c) {
  const ModelFile mf = load_model(model_path);
  const Spectrum s = analyse(mf);
  require_hypothesis(s);
  const int p = static_cast<int>(mf.model.omegas.size());
  const int d = delays.value_or(p + 1);
  if (d < 1) throw PreconditionError("--delays must be >= 1");
  if (order < 2) throw PreconditionError("--order must be >= 2");
  std::vector<int> degrees;
  for (int j = 2; j <= order; ++j) degrees.push_back(j);
  const auto taus = sample_delays(mf.model.kernel.r, d, samples, c.seed);
  const RankScanReport rep =
      rank_scan(s.data, degrees, mf.model.s, taus, serial ? Execution::serial : Execution::parallel);

  std::cout << fmt::format("rank scan: p={} s={} delays={} samples={} seed={}\n", p, mf.model.s, d, samples, c.seed);
  std::cout << fmt::format("  {:<8} {:<8} {:<12} {:<12} {}\n", "degree", "valid", "surjective", "fraction", "min sigma");
  for (const auto& ds : rep.degrees) {
    std::cout << fmt::format("  {:<8} {:<8} {:<12} {:<12} {}\n", ds.degree, ds.valid, ds.surjective, fmt_human(ds.fraction),
                             fmt_human(ds.min_sigma));
  }
  if (rep.structural_degree) std::cout << "structural rank deficiency from degree " << *rep.structural_degree << "\n";

  const std::string csv = rank_scan_csv(rep);
  if (csv_path == "-") {
    std::cout << csv;
  } else if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw PreconditionError(csv_path + ": cannot write");
    out << csv;
  }

  json doc = header("rank-scan", c);
  doc["p"] = p;
  doc["s"] = mf.model.s;
  doc["delays"] = d;
  doc["samples"] = samples;
  doc["execution"] = serial ? "serial" : "parallel";
  json ds = json::array();
  for (const auto& x : rep.degrees) {
    ds.push_back({{"degree", x.degree},
                  {"valid", x.valid},
                  {"surjective", x.surjective},
                  {"fraction", fmt_machine(x.fraction)},
                  {"min_sigma", fmt_machine(x.min_sigma)}});
  }
  doc["degrees"] = ds;
  if (rep.structural_degree) doc["structural_degree"] = *rep.structural_degree;
  emit(doc, c);
  return kOk;
}

int cmd_realize(const std::string& model_path, const std::string& target_path, const std::vector<double>& tau_opt,
                const std::string& mode_name, int unfold_degree, const std::string& out_path, const Common& c) {
  ModelFile mf = load_model(model_path);
  if (!tau_opt.empty()) mf.model.delays = DelayTuple{tau_opt};
  const NfMode mode = mode_name == "leading" ? NfMode::leading : NfMode::ode_reduction;
  const Spectrum s = analyse(mf);
  require_hypothesis(s);
  const int p = static_cast<int>(mf.model.omegas.size());
  const TargetFile tf = load_target(target_path, p, mf.model.s);

  RealizationResult r;
  if (tf.unfolding) {
    r = realize_unfolding(s.data, mf.model, tf.h + tf.q, mode, unfold_degree);
  } else {
    r = realize_jet(s.data, mf.model.kernel, mf.model.delays, tf.h, tf.q, mf.model.order, mode);
  }
  const int d = r.tau.size();
  std::cout << "realized with delays";
  for (double t : r.tau.tau) std::cout << " " << fmt_human(t);
  std::cout << " (mode " << to_string(mode) << ")\n";
  std::cout << "eta:\n" << poly_table(r.eta(), delay_names(d, mf.model.s), {"eta"});
  std::cout << "xi:\n" << poly_table(r.xi(), delay_names(d, mf.model.s), {"xi"});
  std::cout << "round-trip residuals:";
  for (int j = 2; j < static_cast<int>(r.residual.size()); ++j) {
    std::cout << " degree " << j << " " << fmt_human(r.residual[static_cast<std::size_t>(j)]);
  }
  std::cout << "\n";

  ModelFile realized = mf;
  realized.model = r.model;
  json doc = header("realize", c);
  doc["mode"] = to_string(mode);
  doc["unfolding"] = tf.unfolding;
  if (tf.unfolding) doc["unfold_degree"] = unfold_degree == 0 ? mf.model.order : unfold_degree;
  doc["model"] = model_to_json(realized);
  json res = json::array();
  for (int j = 2; j < static_cast<int>(r.residual.size()); ++j) res.push_back(fmt_machine(r.residual[static_cast<std::size_t>(j)]));
  doc["residuals"] = res;
  emit(doc, c);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw PreconditionError(out_path + ": cannot write");
    out << model_to_json(realized).dump(2) << "\n";
  }
  if (r.max_residual() > 1e-9) {
    std::cerr << "error: round-trip residual " << fmt_human(r.max_residual()) << " above 1e-9\n";
    return kNumerical;
  }
  return kOk;
}

int cmd_selftest(const std::string& level_name, const std::string& golden, const std::string& write, const Common& c) {
  if (!write.empty()) {
    write_golden(write);
    std::cout << "wrote " << write << "\n";
    return kOk;
  }
  const SelftestLevel level = level_name == "full" ? SelftestLevel::full : SelftestLevel::fast;
  std::optional<std::string> golden_path;
  if (!golden.empty()) golden_path = golden;
  const SelftestReport rep = run_selftest(level, golden_path, [](const SelftestCheck& ch) {
    std::cout << fmt::format("{} {:<14} {:>7.2f}s  {}\n", ch.passed ? "PASS" : "FAIL", ch.name, ch.seconds, ch.detail)
              << std::flush;
  });
  json doc = header("selftest", c);
  doc["level"] = level_name;
  json checks = json::array();
  for (const auto& ch : rep.checks) {
    checks.push_back({{"name", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}, {"seconds", ch.seconds}});
  }
  doc["checks"] = checks;
  doc["passed"] = rep.passed();
  emit(doc, c);
  std::cout << (rep.passed() ? "selftest passed" : "selftest FAILED") << "\n";
  return rep.passed() ? kOk : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Normal forms and realizability for scalar delay equations"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Common common;
  app.add_option("--seed", common.seed, "Seed recorded in reports and used for sampling")->capture_default_str();
  app.add_option("--json", common.json_out, "Also write the machine-readable report to this file");

  std::string model, target, mode = "ode_reduction", csv, out, level = "fast", golden, write_golden_path;
  std::optional<int> order, delays;
  int scan_order = 3;
  int unfold_degree = 0;
  int samples = 200;
  bool serial = false;
  std::vector<double> tau;

  auto* spectrum = app.add_subcommand("spectrum", "Roots, Delta', Psi(0) and the spectral hypothesis");
  spectrum->add_option("model", model, "Model file")->required()->check(CLI::ExistingFile);

  auto* nf = app.add_subcommand("nf", "Equivariant normal form with radial and angular equations");
  nf->add_option("model", model, "Model file")->required()->check(CLI::ExistingFile);
  nf->add_option("--order", order, "Truncation order (defaults to the model's)");
  nf->add_option("--mode", mode, "ode_reduction or leading")->check(CLI::IsMember({"ode_reduction", "leading"}));
  nf->add_option("--csv", csv, "Write radial and angular terms as CSV");

  auto* rs = app.add_subcommand("rank-scan", "Surjectivity of the composite maps over random delays");
  rs->add_option("model", model, "Model file")->required()->check(CLI::ExistingFile);
  rs->add_option("--order", scan_order, "Highest degree scanned")->capture_default_str();
  rs->add_option("--samples", samples, "Number of delay tuples")->capture_default_str();
  rs->add_option("--delays", delays, "Delays per tuple (defaults to p+1)");
  rs->add_option("--csv", csv, "CSV output file, or - for stdout");
  rs->add_flag("--serial", serial, "Use the serial reference path");

  auto* rz = app.add_subcommand("realize", "Find a nonlinearity realizing a radial target");
  rz->add_option("model", model, "Model file")->required()->check(CLI::ExistingFile);
  rz->add_option("target", target, "Target file")->required()->check(CLI::ExistingFile);
  rz->add_option("--tau", tau, "Delays (comma separated); defaults to the model's")->delimiter(',');
  rz->add_option("--mode", mode, "ode_reduction or leading")->check(CLI::IsMember({"ode_reduction", "leading"}));
  rz->add_option("--unfold-degree", unfold_degree, "Highest degree of prescribed parameter terms (default: model order)");
  rz->add_option("--out", out, "Write the realized model here");

  auto* st = app.add_subcommand("selftest", "Run the invariant suite");
  st->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}))->capture_default_str();
  st->add_option("--golden", golden, "Golden reference file");
  st->add_option("--write-golden", write_golden_path, "Regenerate the golden reference file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*spectrum) return cmd_spectrum(model, common);
    if (*nf) return cmd_nf(model, order, mode, csv, common);
    if (*rs) return cmd_rank_scan(model, scan_order, samples, delays, serial, csv, common);
    if (*rz) return cmd_realize(model, target, tau, mode, unfold_degree, out, common);
    if (*st) return cmd_selftest(level, golden, write_golden_path, common);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << "\n";
    return kPrecondition;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kFail;
}
