#include "delaynf/model_io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "delaynf/errors.hpp"
#include "delaynf/symmetry.hpp"

namespace delaynf {

using nlohmann::json;

namespace {

[[noreturn]] void field_error(const std::string& source, const std::string& path, const std::string& what) {
  throw ParseError(source + ": field " + path + ": " + what);
}

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 1;
    int col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(fmt::format("{}:{}:{}: malformed JSON ({})", source, line, col, e.what()));
  }
}

const json& member(const json& obj, const std::string& key, const std::string& path, const std::string& source) {
  if (!obj.is_object()) field_error(source, path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) field_error(source, path.empty() ? key : path + "." + key, "missing");
  return *it;
}

double number(const json& v, const std::string& path, const std::string& source) {
  if (!v.is_number()) field_error(source, path, "expected a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& path, const std::string& source) {
  if (!v.is_number_integer()) field_error(source, path, "expected an integer");
  return v.get<int>();
}

std::vector<double> numbers(const json& v, const std::string& path, const std::string& source) {
  if (!v.is_array()) field_error(source, path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], fmt::format("{}[{}]", path, i), source));
  return out;
}

std::vector<int> exponents(const json& v, std::size_t len, const std::string& path, const std::string& source) {
  if (!v.is_array()) field_error(source, path, "expected an array of exponents");
  if (v.size() != len) field_error(source, path, fmt::format("expected {} exponents, got {}", len, v.size()));
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const int e = integer(v[i], fmt::format("{}[{}]", path, i), source);
    if (e < 0) field_error(source, fmt::format("{}[{}]", path, i), "negative exponent");
    out.push_back(e);
  }
  return out;
}

}  // namespace

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ModelFile parse_model(const std::string& text, const std::string& source) {
  const json doc = parse_json(text, source);
  if (!doc.is_object()) field_error(source, "<root>", "expected an object");
  ModelFile mf;
  mf.source = source;

  const json& spectrum = member(doc, "spectrum", "", source);
  const std::vector<double> omegas = numbers(member(spectrum, "omegas", "spectrum", source), "spectrum.omegas", source);
  if (omegas.empty()) field_error(source, "spectrum.omegas", "at least one frequency required");
  if (auto it = spectrum.find("scan"); it != spectrum.end()) {
    if (auto om = it->find("omega_max"); om != it->end()) mf.scan.omega_max = number(*om, "spectrum.scan.omega_max", source);
    if (auto mw = it->find("margin_window"); mw != it->end()) {
      mf.scan.re_max = number(*mw, "spectrum.scan.margin_window", source);
    }
  }

  const json& kj = member(doc, "kernel", "", source);
  DelayKernel kernel;
  kernel.r = number(member(kj, "r", "kernel", source), "kernel.r", source);
  if (auto design = kj.find("design"); design != kj.end()) {
    const auto pts = numbers(member(*design, "delay_points", "kernel.design", source), "kernel.design.delay_points", source);
    const KernelDesign d = design_kernel(omegas, pts);
    kernel.atoms = d.kernel.atoms;
    mf.design_points = pts;
    mf.design_condition = d.condition;
  } else {
    const json& atoms = member(kj, "atoms", "kernel", source);
    if (!atoms.is_array()) field_error(source, "kernel.atoms", "expected an array");
    if (atoms.empty()) field_error(source, "kernel.atoms", "at least one atom required");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const std::string path = fmt::format("kernel.atoms[{}]", i);
      kernel.atoms.push_back({number(member(atoms[i], "theta", path, source), path + ".theta", source),
                              number(member(atoms[i], "weight", path, source), path + ".weight", source)});
    }
  }
  try {
    kernel.validate();
  } catch (const PreconditionError& e) {
    field_error(source, "kernel", e.what());
  }

  const std::vector<double> delays = numbers(member(doc, "delays", "", source), "delays", source);
  if (delays.empty()) field_error(source, "delays", "at least one delay required");
  int s = 0;
  if (auto it = doc.find("params"); it != doc.end()) s = integer(member(*it, "s", "params", source), "params.s", source);
  if (s < 0) field_error(source, "params.s", "must be >= 0");
  const int order = integer(member(doc, "order", "", source), "order", source);
  if (order < 2) field_error(source, "order", "must be >= 2");

  mf.model = RfdeModel::with_zero_nonlinearity(kernel, omegas, DelayTuple{delays}, s, order);
  const std::size_t d = delays.size();
  if (auto it = doc.find("nonlinearity"); it != doc.end()) {
    for (const char* part : {"eta", "xi"}) {
      auto terms = it->find(part);
      if (terms == it->end()) continue;
      const std::string base = std::string("nonlinearity.") + part;
      if (!terms->is_array()) field_error(source, base, "expected an array of terms");
      for (std::size_t i = 0; i < terms->size(); ++i) {
        const std::string path = fmt::format("{}[{}]", base, i);
        const json& t = (*terms)[i];
        std::vector<int> e = exponents(member(t, "exponents", path, source), d, path + ".exponents", source);
        std::vector<int> mu(static_cast<std::size_t>(s), 0);
        if (auto m = t.find("mu_exponents"); m != t.end()) {
          mu = exponents(*m, static_cast<std::size_t>(s), path + ".mu_exponents", source);
        }
        e.insert(e.end(), mu.begin(), mu.end());
        const double c = number(member(t, "coeff", path, source), path + ".coeff", source);
        (std::string(part) == "eta" ? mf.model.eta : mf.model.xi).add(0, Monomial(std::span<const int>(e)), c);
      }
    }
  }
  return mf;
}

ModelFile load_model(const std::string& path) { return parse_model(read_text(path), path); }

json model_to_json(const ModelFile& mf) {
  const RfdeModel& m = mf.model;
  json doc;
  json atoms = json::array();
  for (const auto& a : m.kernel.atoms) atoms.push_back({{"theta", a.theta}, {"weight", a.weight}});
  doc["kernel"] = {{"r", m.kernel.r}, {"atoms", atoms}};
  doc["spectrum"] = {{"omegas", m.omegas}, {"scan", {{"omega_max", mf.scan.omega_max}, {"margin_window", mf.scan.re_max}}}};
  doc["delays"] = m.delays.tau;
  doc["params"] = {{"s", m.s}};
  doc["order"] = m.order;
  const int d = m.delays.size();
  auto terms = [&](const Poly& f) {
    json arr = json::array();
    for (const auto& [mon, c] : f[0]) {
      std::vector<int> e = mon.exponents();
      json t;
      t["exponents"] = std::vector<int>(e.begin(), e.begin() + d);
      if (m.s > 0) t["mu_exponents"] = std::vector<int>(e.begin() + d, e.end());
      t["coeff"] = c.real();
      arr.push_back(t);
    }
    return arr;
  };
  doc["nonlinearity"] = {{"eta", terms(m.eta)}, {"xi", terms(m.xi)}};
  return doc;
}

TargetFile parse_target(const std::string& text, int p, int s, const std::string& source) {
  const json doc = parse_json(text, source);
  TargetFile tf;
  tf.h = Poly(p + 1 + s, p + 1, s);
  tf.q = tf.h;
  if (auto it = doc.find("unfolding"); it != doc.end()) {
    if (!it->is_boolean()) field_error(source, "unfolding", "expected true or false");
    tf.unfolding = it->get<bool>();
  }
  const json& terms = member(doc, "terms", "", source);
  if (!terms.is_array()) field_error(source, "terms", "expected an array");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string path = fmt::format("terms[{}]", i);
    const json& t = terms[i];
    const int comp = integer(member(t, "component", path, source), path + ".component", source);
    if (comp < 0 || comp > p) field_error(source, path + ".component", fmt::format("must lie in 0..{}", p));
    std::vector<int> e = exponents(member(t, "rho", path, source), static_cast<std::size_t>(p + 1), path + ".rho", source);
    std::vector<int> mu(static_cast<std::size_t>(s), 0);
    if (auto m = t.find("mu"); m != t.end()) mu = exponents(*m, static_cast<std::size_t>(s), path + ".mu", source);
    int mu_deg = 0;
    for (int x : mu) mu_deg += x;
    e.insert(e.end(), mu.begin(), mu.end());
    const Monomial mon{std::span<const int>(e)};
    if (!is_radially_equivariant(p, comp, mon)) {
      field_error(source, path, "term breaks the reflection symmetry of the radial equations");
    }
    const double c = number(member(t, "coeff", path, source), path + ".coeff", source);
    (mu_deg == 0 ? tf.h : tf.q).add(comp, mon, c);
  }
  return tf;
}

TargetFile load_target(const std::string& path, int p, int s) { return parse_target(read_text(path), p, s, path); }

std::string fmt_machine(double v) { return fmt::format("{:.17g}", v); }
std::string fmt_human(double v) { return fmt::format("{:.6g}", v); }
std::string fmt_human(cplx z) {
  if (z.imag() == 0.0) return fmt_human(z.real());
  return fmt::format("{:.6g}{:+.6g}i", z.real(), z.imag());
}

json poly_to_json(const Poly& f) {
  json arr = json::array();
  for (int k = 0; k < f.ncomponents(); ++k) {
    for (const auto& [m, c] : f[k]) {
      arr.push_back({{"component", k}, {"exponents", m.exponents()}, {"re", fmt_machine(c.real())},
                     {"im", fmt_machine(c.imag())}});
    }
  }
  return arr;
}

std::string poly_table(const Poly& f, const std::vector<std::string>& var_names,
                       const std::vector<std::string>& comp_names) {
  std::ostringstream out;
  for (int k = 0; k < f.ncomponents(); ++k) {
    for (const auto& [m, c] : f[k]) {
      std::string mono;
      for (int i = 0; i < m.nvars(); ++i) {
        if (m[i] == 0) continue;
        if (!mono.empty()) mono += "*";
        mono += var_names[static_cast<std::size_t>(i)];
        if (m[i] > 1) mono += "^" + std::to_string(m[i]);
      }
      if (mono.empty()) mono = "1";
      out << fmt::format("  {:<8} {:<24} {}\n", comp_names[static_cast<std::size_t>(k)], mono, fmt_human(c));
    }
  }
  return out.str();
}

std::string rank_scan_csv(const RankScanReport& rep) {
  std::ostringstream out;
  for (int i = 1; i <= rep.slots; ++i) out << "tau" << i << ",";
  out << "degree,rank,target_dim,sigma_min\n";
  for (const auto& s : rep.samples) {
    if (s.degenerate) continue;
    for (double t : rep.taus[static_cast<std::size_t>(s.sample)].tau) out << fmt_machine(t) << ",";
    out << s.degree << "," << s.rank << "," << s.target_dim << "," << fmt_machine(s.sigma_min) << "\n";
  }
  return out.str();
}

}  // namespace delaynf
