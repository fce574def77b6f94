#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace delaynf {

enum class SelftestLevel { fast, full };

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct SelftestReport {
  SelftestLevel level = SelftestLevel::fast;
  std::vector<SelftestCheck> checks;
  bool passed() const;
};

// Reference quantities pinned by the golden file: designed kernel weights,
// Psi(0), a fixed composite spectrum and fixed Guckenheimer coefficients.
std::map<std::string, double> golden_values();

// Compares golden_values() with a golden JSON file ({"values": {name: number}})
// at relative tolerance 1e-9. Returns the first divergent entry, if any.
std::optional<std::string> compare_golden(const std::string& path);
void write_golden(const std::string& path);

// Runs the invariant suite; `progress` is called after each check.
SelftestReport run_selftest(SelftestLevel level, const std::optional<std::string>& golden_path,
                            const std::function<void(const SelftestCheck&)>& progress = {});

}  // namespace delaynf
