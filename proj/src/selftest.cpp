#include "delaynf/selftest.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <random>

#include <fmt/format.h>
#include <json.hpp>

#include "delaynf/errors.hpp"
#include "delaynf/homological.hpp"
#include "delaynf/model_io.hpp"
#include "delaynf/normal_form.hpp"
#include "delaynf/realize.hpp"
#include "delaynf/symmetry.hpp"
#include "delaynf/version.hpp"

namespace delaynf {

bool SelftestReport::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

namespace {

struct Designed {
  DelayKernel kernel;
  SpectralData data;
};

Designed designed(const std::vector<double>& omegas) {
  std::vector<double> pts;
  for (std::size_t i = 0; i < 2 * omegas.size() + 1; ++i) pts.push_back(-static_cast<double>(i));
  const KernelDesign d = design_kernel(omegas, pts);
  return {d.kernel, spectral_data(d.kernel, omegas)};
}

const std::vector<double> kW1{1.0};
const std::vector<double> kW2{1.0, std::sqrt(2.0)};

std::string check_splitting(SelftestLevel level) {
  int runs = 0;
  for (int p = 1; p <= (level == SelftestLevel::full ? 2 : 1); ++p) {
    const auto& w = p == 1 ? kW1 : kW2;
    for (int s = 0; s <= 1; ++s) {
      for (int deg = 2; deg <= (level == SelftestLevel::full ? 4 : 3); ++deg) {
        const SplittingReport r = verify_splitting(w, s, deg);
        if (!r.ok()) throw NumericalError(fmt::format("splitting fails at p={} s={} degree={}", p, s, deg));
        ++runs;
      }
    }
  }
  return fmt::format("{} spaces", runs);
}

std::string check_spectral(SelftestLevel level) {
  std::vector<const std::vector<double>*> cases{&kW1};
  if (level == SelftestLevel::full) cases.push_back(&kW2);
  double worst = 0.0;
  for (const auto* w : cases) {
    const Designed d = designed(*w);
    const HypothesisReport h = verify_hypothesis(d.kernel, d.data);
    if (!h.ok()) throw NumericalError("designed kernel fails the spectral hypothesis");
    for (std::size_t k = 0; k < d.data.roots.size(); ++k) {
      const cplx lk = d.data.roots[k];
      if (std::abs(char_value(d.kernel, lk)) > 1e-10) throw NumericalError("root residual above 1e-10");
      if (std::abs(d.data.psi0(static_cast<Eigen::Index>(k)) * d.data.delta_primes[k] - 1.0) > 1e-12) {
        throw NumericalError("u_k Delta'(lambda_k) != 1");
      }
      for (std::size_t l = 0; l < d.data.roots.size(); ++l) {
        const cplx b = bilinear_check(d.kernel, lk, d.data.roots[l]);
        const double err = std::abs(b - (k == l ? 1.0 : 0.0));
        worst = std::max(worst, err);
        if (err > 1e-9) throw NumericalError("bilinear form is not biorthonormal");
      }
    }
    find_imaginary_roots(d.kernel, {.omega_max = 3.0 * w->back()});
  }
  return fmt::format("max bilinear error {:.3g}", worst);
}

Poly random_center_field(int p, int degree, std::mt19937_64& rng) {
  const int n = 2 * p + 2;
  Poly f(n, 2 * p + 1);
  std::normal_distribution<double> g;
  for (const auto& m : monomials_of_degree(n, degree)) {
    if (m[n - 1] != 0) continue;
    for (int k = 0; k < 2 * p + 1; ++k) f.add(k, m, cplx{g(rng), g(rng)});
  }
  return f;
}

std::string check_averaging() {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const Poly f = random_center_field(1, 3, rng);
    const Poly a = project_A(f);
    for (double T : {50.0, 100.0}) {
      const double err = distance(time_average(f, kW1, T, 20 * static_cast<int>(T)), a);
      const double bound = 2.0 * f.norm() / T;
      worst = std::max(worst, err / bound);
      if (err > bound + 1e-9) throw NumericalError(fmt::format("averaging error {:.3g} above {:.3g} at T={}", err, bound, T));
    }
  }
  return fmt::format("worst error/bound {:.3g}", worst);
}

std::string check_factorization(SelftestLevel level) {
  struct Case {
    int p, s, degree;
  };
  std::vector<Case> cases{{1, 0, 2}, {1, 1, 3}};
  if (level == SelftestLevel::full) cases.push_back({2, 0, 2});
  double worst = 0.0;
  for (const auto& c : cases) {
    const Designed d = designed(c.p == 1 ? kW1 : kW2);
    for (const auto& tau : sample_delays(d.kernel.r, c.p + 1, 5, 99)) {
      const CompositeMatrix m = composite_matrix(d.data, tau, c.degree, c.s, LiftFlavor::ring);
      worst = std::max(worst, m.factorization_residual);
      if (!(m.factorization_residual <= 1e-10)) throw NumericalError("factorization identity fails");
    }
  }
  return fmt::format("max residual {:.3g}", worst);
}

std::string check_surjectivity(SelftestLevel level) {
  std::string detail;
  auto run = [&](const std::vector<double>& w, std::vector<int> degrees, int count, double need) {
    const Designed d = designed(w);
    const int p = static_cast<int>(w.size());
    const RankScanReport rep = rank_scan(d.data, degrees, 0, sample_delays(d.kernel.r, p + 1, count, 7));
    for (const auto& ds : rep.degrees) {
      if (ds.fraction < need) {
        throw NumericalError(fmt::format("p={} degree {}: surjective fraction {:.3f} < {}", p, ds.degree, ds.fraction, need));
      }
      detail += fmt::format("p={} l={}: {:.2f} ", p, ds.degree, ds.fraction);
    }
  };
  if (level == SelftestLevel::full) {
    run(kW1, {2, 3, 4}, 100, 0.95);
    run(kW2, {2, 3}, 40, 0.90);
  } else {
    run(kW1, {2, 3}, 50, 0.95);
  }
  return detail;
}

std::string check_optimality() {
  const Designed d = designed(kW1);
  const std::vector<int> degrees{2};
  const RankScanReport rep = rank_scan(d.data, degrees, 0, sample_delays(d.kernel.r, 1, 30, 5));
  for (const auto& s : rep.samples) {
    if (s.rank >= s.target_dim) throw NumericalError("a single delay reached full rank");
  }
  return "single delay deficient at degree 2";
}

std::string check_guckenheimer() {
  const Designed d = designed(kW1);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    std::array<double, 7> A{};
    for (double& a : A) a = g(rng);
    const DelayTuple tau = sample_delays(d.kernel.r, 2, 1, rng())[0];
    const auto gc = guckenheimer_example(A, tau, d.data, d.kernel);
    const double u0 = d.data.psi0(0).real();
    const cplx u1 = d.data.psi0(1);
    const cplx z1 = std::exp(cplx{0.0, tau.tau[0]});
    const cplx z2 = std::exp(cplx{0.0, tau.tau[1]});
    const double a1 = u0 * (A[0] + A[1] + A[2]);
    const double a2 = u0 * (2.0 * A[0] + 2.0 * std::cos(tau.tau[0] - tau.tau[1]) * A[1] + 2.0 * A[2]);
    const double b1 = (u1 * (2.0 * z1 * A[0] + (z1 + z2) * A[1] + 2.0 * z2 * A[2])).real();
    worst = std::max({worst, std::abs(gc.a1 - a1), std::abs(gc.a2 - a2), std::abs(gc.b1 - b1)});
  }
  if (worst > 1e-10) throw NumericalError(fmt::format("degree-2 coefficients off by {:.3g}", worst));
  return fmt::format("max deviation {:.3g}", worst);
}

std::string check_realization() {
  const Designed d = designed(kW1);
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  double worst = 0.0;
  const DelayTuple tau{{0.0, -1.0}};
  for (int trial = 0; trial < 3; ++trial) {
    Poly h(3, 2, 1);
    Poly q(3, 2, 1);
    for (int deg = 2; deg <= 3; ++deg) {
      const Basis b = radial_basis(1, 1, deg);
      for (const auto& e : b.elements()) (e.monomial[2] == 0 ? h : q).add(e.component, e.monomial, g(rng));
    }
    const RealizationResult r = realize_jet(d.data, d.kernel, tau, h, q, 3);
    worst = std::max(worst, r.max_residual());
  }
  if (worst > 1e-9) throw NumericalError(fmt::format("round-trip residual {:.3g}", worst));
  return fmt::format("max residual {:.3g}", worst);
}

}  // namespace

std::map<std::string, double> golden_values() {
  std::map<std::string, double> v;
  const Designed d1 = designed(kW1);
  for (std::size_t i = 0; i < d1.kernel.atoms.size(); ++i) v[fmt::format("p1.weight{}", i)] = d1.kernel.atoms[i].weight;
  v["p1.u0"] = d1.data.psi0(0).real();
  v["p1.u1.re"] = d1.data.psi0(1).real();
  v["p1.u1.im"] = d1.data.psi0(1).imag();
  const Designed d2 = designed(kW2);
  for (std::size_t i = 0; i < d2.kernel.atoms.size(); ++i) v[fmt::format("p2.weight{}", i)] = d2.kernel.atoms[i].weight;
  v["p2.u0"] = d2.data.psi0(0).real();
  v["p2.u2.re"] = d2.data.psi0(3).real();
  v["p2.u2.im"] = d2.data.psi0(3).imag();

  const CompositeMatrix cm = composite_matrix(d1.data, DelayTuple{{0.0, -1.0}}, 3, 0, LiftFlavor::plain);
  for (Eigen::Index i = 0; i < cm.singular_values.size(); ++i) v[fmt::format("p1.l3.sigma{}", i)] = cm.singular_values(i);

  const auto gc = guckenheimer_example({0.4, -1.2, 0.9, 0.3, 0.7, -0.5, 1.1}, DelayTuple{{0.0, -1.0}}, d1.data, d1.kernel);
  v["guck.a1"] = gc.a1;
  v["guck.a2"] = gc.a2;
  v["guck.a3"] = gc.a3;
  v["guck.a4"] = gc.a4;
  v["guck.b1"] = gc.b1;
  v["guck.b2"] = gc.b2;
  v["guck.b3"] = gc.b3;
  return v;
}

void write_golden(const std::string& path) {
  nlohmann::json doc;
  doc["version"] = kVersion;
  nlohmann::json values = nlohmann::json::object();
  for (const auto& [k, x] : golden_values()) values[k] = x;
  doc["values"] = values;
  std::ofstream out(path);
  if (!out) throw PreconditionError(path + ": cannot write");
  out << doc.dump(2) << "\n";
}

std::optional<std::string> compare_golden(const std::string& path) {
  const nlohmann::json doc = nlohmann::json::parse(read_text(path), nullptr, false);
  if (doc.is_discarded() || !doc.contains("values") || !doc["values"].is_object()) {
    throw ParseError(path + ": not a golden file");
  }
  const auto& want = doc["values"];
  const auto have = golden_values();
  for (auto it = want.begin(); it != want.end(); ++it) {
    auto h = have.find(it.key());
    if (h == have.end()) return fmt::format("{}: no longer computed", it.key());
    if (!it.value().is_number()) return fmt::format("{}: golden entry is not a number", it.key());
    const double g = it.value().get<double>();
    if (std::abs(h->second - g) > 1e-9 * std::max(1.0, std::abs(g))) {
      return fmt::format("{}: expected {}, computed {}", it.key(), fmt_machine(g), fmt_machine(h->second));
    }
  }
  for (const auto& [k, x] : have) {
    if (!want.contains(k)) return fmt::format("{}: missing from the golden file", k);
  }
  return std::nullopt;
}

SelftestReport run_selftest(SelftestLevel level, const std::optional<std::string>& golden_path,
                            const std::function<void(const SelftestCheck&)>& progress) {
  SelftestReport rep;
  rep.level = level;
  auto run = [&](const std::string& name, const std::function<std::string()>& body) {
    SelftestCheck c;
    c.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.detail = body();
      c.passed = true;
    } catch (const std::exception& e) {
      c.detail = e.what();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (progress) progress(c);
    rep.checks.push_back(std::move(c));
  };
  run("splitting", [&] { return check_splitting(level); });
  run("spectral", [&] { return check_spectral(level); });
  run("averaging", [] { return check_averaging(); });
  run("factorization", [&] { return check_factorization(level); });
  run("surjectivity", [&] { return check_surjectivity(level); });
  run("optimality", [] { return check_optimality(); });
  run("guckenheimer", [] { return check_guckenheimer(); });
  run("realization", [] { return check_realization(); });
  if (golden_path) {
    run("golden", [&]() -> std::string {
      if (auto diff = compare_golden(*golden_path)) throw NumericalError("first divergent entry " + *diff);
      return "all entries match";
    });
  }
  return rep;
}

}  // namespace delaynf
