#include <doctest.h>

#include <filesystem>

#include "spcgt/calculator.hpp"
#include "spcgt/errors.hpp"

using namespace spcgt;

namespace {

std::string rendered(const Json& j) { return j["structure"]["rendered"].get<std::string>(); }

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("spcgt-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("abelianize examples") {
  const Json odd = cmd_abelianize(5, 3, 1);
  CHECK(rendered(odd["K_part"]) == "(Z/3)^120");
  CHECK(rendered(odd["sp_part"]) == "(Z/3)^55");
  CHECK(odd["sp_part"]["kind"] == "structure");
  CHECK_FALSE(odd["outside_theorem_hypotheses"].get<bool>());

  const Json even = cmd_abelianize(5, 2, 1);
  REQUIRE(even["K_part"]["summands"].size() == 2);
  CHECK(rendered(even["K_part"]["summands"][0]) == "(Z/2)^55");
  CHECK(rendered(even["K_part"]["summands"][1]) == "(Z/2)^120");
  CHECK(rendered(even["K_part"]) == "(Z/2)^175");
  // B_2/B_0 drops exactly the constants.
  CHECK(even["K_part"]["summands"][0]["dim_B2"].get<int>() - 1 == 55);
  CHECK(even["sp_part"]["kind"] == "extension");
  CHECK(rendered(even["sp_part"]["kernel"]) == "(Z/2)^10");
  CHECK(rendered(even["sp_part"]["quotient"]) == "(Z/2)^55");

  const Json six = cmd_abelianize(5, 6, 1);
  CHECK(rendered(six["K_part"]) == "(Z/2)^55 + (Z/6)^120");
}

TEST_CASE("abelianize structure laws") {
  for (unsigned g = 5; g <= 7; ++g)
    for (std::uint64_t L : {3u, 5u, 15u}) {
      const std::size_t lie = 2 * g * g + g;
      const Json j = cmd_abelianize(g, L, 1);
      const auto& f = j["sp_part"]["structure"]["cyclic_factors"];
      REQUIRE(f.size() == 1);
      CHECK(f[0]["order"].get<std::uint64_t>() == L);
      CHECK(f[0]["multiplicity"].get<std::size_t>() == lie);
    }
  // Closed surface, L odd: |wedge^3 H_L / H_L| = L^{C(2g,3) - 2g}.
  const Json closed = cmd_abelianize(5, 3, 0);
  CHECK(rendered(closed["K_part"]) == "(Z/3)^110");
  const Json closed_even = cmd_abelianize(5, 2, 0);
  const auto& bbar = closed_even["K_part"]["summands"][0];
  CHECK(bbar["dim_Bbar0"] == 1);
  CHECK(rendered(bbar) == "(Z/2)^54");
  CHECK(rendered(closed_even["K_part"]["summands"][1]) == "(Z/2)^110");
}

TEST_CASE("abelianize guards") {
  CHECK_THROWS_AS(cmd_abelianize(5, 4, 1), UnsupportedCase);
  CHECK_THROWS_AS(cmd_abelianize(5, 12, 0, true), UnsupportedCase);
  CHECK_THROWS_AS(cmd_abelianize(4, 3, 1), UnsupportedCase);
  CHECK_THROWS_AS(cmd_abelianize(5, 3, 2), InvalidArgument);
  CHECK_THROWS_AS(cmd_abelianize(5, 1, 1), InvalidArgument);
  const Json forced = cmd_abelianize(3, 3, 1, true);
  CHECK(forced["outside_theorem_hypotheses"].get<bool>());
  CHECK(forced["warnings"].size() == 1);
  CHECK(rendered(forced["K_part"]) == "(Z/3)^20");
  try {
    cmd_abelianize(5, 8, 1, true);
    FAIL("expected rejection");
  } catch (const UnsupportedCase& e) {
    CHECK(std::string(e.what()).find("4 does not divide L") != std::string::npos);
  }
}

TEST_CASE("picard") {
  CHECK(cmd_picard("mg", 5, 2)["n"] == 4);
  CHECK(cmd_picard("ag", 4, 2)["n"] == 2);
  CHECK(cmd_picard("mg", 5, 3)["n"] == 1);
  CHECK(cmd_picard("ag", 4, 9)["n"] == 1);
  CHECK(cmd_picard("mg", 6, 10)["h2_image_index"] == 4);
  CHECK(cmd_picard("mg", 5, 2)["generator_mod_torsion"] == "(1/4) lambda_5(2)");
  CHECK_THROWS_AS(cmd_picard("mg", 4, 3), UnsupportedCase);
  CHECK_THROWS_AS(cmd_picard("ag", 3, 3), UnsupportedCase);
  CHECK_THROWS_AS(cmd_picard("ag", 4, 4), UnsupportedCase);
  CHECK_THROWS_AS(cmd_picard("xx", 5, 3), InvalidArgument);
  // Beyond the tabulated form range the closed-surface kernel is reported as unavailable.
  const Json big = cmd_picard("mg", 7, 2);
  CHECK(big["torsion_part"]["h1"]["K_part"].is_null());
  CHECK(big["warnings"].size() == 1);
}

TEST_CASE("output is deterministic") {
  CHECK(cmd_abelianize(5, 2, 1).dump(2) == cmd_abelianize(5, 2, 1).dump(2));
  CHECK(cmd_picard("mg", 5, 2).dump(2) == cmd_picard("mg", 5, 2).dump(2));
  const std::string text = cmd_abelianize(5, 3, 1).dump();
  CHECK(text.find('.') == std::string::npos);
}

TEST_CASE("module specs") {
  const auto grp = GeneratedGroup::symplectic(3, 3);
  CHECK(build_module(grp, "adjoint").dim == 21);
  CHECK(build_module(grp, "dual-of-adjoint").dim == 21);
  CHECK(build_module(grp, "dual-of-dual-of-standard").action == build_module(grp, "standard").action);
  CHECK(build_module(grp, "wedge3").dim == 20);
  CHECK(build_module(grp, "wedge3-mod-omega").dim == 14);
  CHECK(build_module(grp, "trivial").dim == 1);
  CHECK_THROWS_AS(build_module(grp, "sym2"), InvalidArgument);
}

TEST_CASE("h1 command") {
  H1Options opt;
  opt.enumeration.cache_dir = scratch_dir("h1");
  const Json first = cmd_h1(2, 2, "standard", "co", opt);
  CHECK(first["invariant_factors"] == Json::array({2}));
  CHECK_FALSE(first["cache_hit"].get<bool>());
  CHECK(first["group"]["order"] == 720);
  const Json second = cmd_h1(2, 2, "standard", "co", opt);
  CHECK(second["cache_hit"].get<bool>());
  CHECK(second["invariant_factors"] == first["invariant_factors"]);
  CHECK(cmd_h1(1, 3, "trivial", "ho", opt)["invariant_factors"] == Json::array({3}));
  CHECK_THROWS_AS(cmd_h1(2, 2, "standard", "sideways", opt), InvalidArgument);
  try {
    cmd_h1(3, 3, "adjoint", "co", opt);
    FAIL("expected resource limit");
  } catch (const ResourceLimit& e) {
    CHECK(std::string(e.what()).find("9170703360") != std::string::npos);
  }
  std::filesystem::remove_all(*opt.enumeration.cache_dir);
}
