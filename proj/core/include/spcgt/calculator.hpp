#pragma once

// Closed-form abelianization and Picard-divisibility reports, engine-backed
// (co)homology runs, and the verification suites.  Every command returns a
// JSON document with sorted keys and integer-only numbers.

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spcgt/linalg.hpp"
#include "spcgt/modules.hpp"
#include "spcgt/symplectic.hpp"

namespace spcgt {

using Json = nlohmann::json;

/// {"rendered", "cyclic_factors": [{"order", "multiplicity"}], "free_rank"}.
Json structure_json(const AbelianGroupStructure& s);

/// K_{g,b} and H_1(Sp_2g(Z,L); Z) for the level-L mapping class group.
/// Requires 4 not dividing L (never relaxed) and g >= 5 (relaxed by force).
Json cmd_abelianize(unsigned g, std::uint64_t level, unsigned boundary, bool force = false);

/// space is "mg" (moduli of curves, g >= 5) or "ag" (abelian varieties, g >= 4).
Json cmd_picard(const std::string& space, unsigned g, std::uint64_t level);

/// Module specs: trivial, standard, adjoint, wedge3, wedge3-mod-omega, dual-of-<spec>.
LinearModule build_module(const GeneratedGroup& group, const std::string& spec);

struct H1Options {
  EnumerationOptions enumeration;
};

/// direction is "co" or "ho".
Json cmd_h1(unsigned g, std::uint64_t level, const std::string& module_spec, const std::string& direction,
            const H1Options& options = {});

struct CheckResult {
  std::string name;
  std::string anchor;
  bool passed = false;
  std::string detail;
};

/// suite is "quick" (groups of order <= 10^4) or "full" (adds Sp_6(Z/2) and Sp_4(Z/3)).
std::vector<CheckResult> run_verify_suite(const std::string& suite, const std::filesystem::path& cache_dir);

/// {"suite", "passed", "checks": [...]} from run_verify_suite.
Json cmd_verify(const std::string& suite, const std::filesystem::path& cache_dir, bool& all_passed);

}  // namespace spcgt
