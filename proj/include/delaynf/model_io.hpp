#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "delaynf/normal_form.hpp"
#include "delaynf/realizability.hpp"
#include "delaynf/spectral.hpp"

namespace delaynf {

// A model document: kernel (atoms, or delay points to design from the
// frequencies), spectrum, delays, params, nonlinearity and order.
struct ModelFile {
  RfdeModel model;
  ScanOptions scan;
  // Set when the kernel came from design_kernel.
  std::optional<std::vector<double>> design_points;
  double design_condition = 0.0;
  std::string source;
};

// Throws ParseError with a line/column or field path on malformed input.
ModelFile parse_model(const std::string& text, const std::string& source = "<string>");
ModelFile load_model(const std::string& path);

nlohmann::json model_to_json(const ModelFile& mf);

// Radial target jet over (rho_0..rho_p, mu): mu-free part h, the rest q.
struct TargetFile {
  Poly h;
  Poly q;
  bool unfolding = false;
};

TargetFile parse_target(const std::string& text, int p, int s, const std::string& source = "<string>");
TargetFile load_target(const std::string& path, int p, int s);

std::string read_text(const std::string& path);

// 17 significant digits (machine blocks, CSV) and 6 (human tables).
std::string fmt_machine(double v);
std::string fmt_human(double v);
std::string fmt_human(cplx z);

// [{component, exponents, re, im}] with the coefficients printed at machine precision.
nlohmann::json poly_to_json(const Poly& f);
// One line per term: component, exponents, coefficient.
std::string poly_table(const Poly& f, const std::vector<std::string>& var_names,
                       const std::vector<std::string>& comp_names);

// Rows of the rank-scan CSV: tau_1..tau_d, degree, rank, target_dim, sigma_min.
std::string rank_scan_csv(const RankScanReport& rep);

}  // namespace delaynf
