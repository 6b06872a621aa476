#include <doctest.h>

#include <random>

#include "spcgt/cohomology.hpp"
#include "spcgt/errors.hpp"

using namespace spcgt;

namespace {

std::vector<LinearModule> module_zoo(const GeneratedGroup& grp) {
  std::vector<LinearModule> out;
  out.push_back(trivial_module(grp, 1));
  out.push_back(standard_module(grp));
  out.push_back(adjoint_module(grp));
  out.push_back(dual_module(adjoint_module(grp)));
  if (grp.genus() >= 2) out.push_back(exterior_cube(standard_module(grp)));
  return out;
}

}  // namespace

TEST_CASE("engine agrees with the bar complex") {
  for (auto [g, L] : std::vector<std::pair<unsigned, std::uint64_t>>{
           {1, 2}, {1, 3}, {1, 4}, {1, 5}, {1, 6}, {1, 7}, {1, 8}, {1, 9}, {2, 2}}) {
    const auto grp = enumerate(GeneratedGroup::symplectic(g, L));
    for (const auto& m : module_zoo(grp)) {
      CAPTURE(g);
      CAPTURE(L);
      CAPTURE(m.label);
      const auto engine = h1_cohomology(grp, m);
      const auto oracle = h1_bar_oracle(grp, m);
      CHECK(engine.h1 == oracle);
    }
  }
}

TEST_CASE("known first cohomology") {
  // Hom(SL_2(Z/p), Z/p): S_3 -> Z/2, SL_2(F_3) -> Z/3, perfect for p >= 5.
  const auto g12 = enumerate(GeneratedGroup::symplectic(1, 2));
  CHECK(h1_cohomology(g12, trivial_module(g12, 1)).h1 == AbelianGroupStructure::elementary(2, 1));
  const auto g13 = enumerate(GeneratedGroup::symplectic(1, 3));
  CHECK(h1_cohomology(g13, trivial_module(g13, 1)).h1 == AbelianGroupStructure::elementary(3, 1));
  const auto g15 = enumerate(GeneratedGroup::symplectic(1, 5));
  CHECK(h1_cohomology(g15, trivial_module(g15, 1)).h1.is_trivial());
  // Sp_4(Z/2) is S_6, with abelianization Z/2.
  const auto g22 = enumerate(GeneratedGroup::symplectic(2, 2));
  CHECK(h1_cohomology(g22, trivial_module(g22, 1)).h1 == AbelianGroupStructure::elementary(2, 1));
  CHECK(h1_cohomology(g22, standard_module(g22)).h1 == AbelianGroupStructure::elementary(2, 1));
}

TEST_CASE("cocycle space bookkeeping") {
  const auto grp = enumerate(GeneratedGroup::symplectic(1, 4));
  const auto ad = adjoint_module(grp);
  const auto cs = h1_cohomology(grp, ad);
  CHECK(cs.module_dim == 3);
  CHECK(cs.generator_count == grp.generators().size());
  CHECK(relative_quotient(cs.z1_generators, cs.b1_generators, cs.generator_count * 3, 4) == cs.h1);
  // B^1 = M / M^G.
  CHECK(cs.b1.torsion_order() * invariants_structure(ad).torsion_order() == 64);

  SUBCASE("every generator extends to a cocycle") {
    const auto& cay = grp.cayley();
    std::mt19937_64 rng(3);
    for (const auto& z : cs.z1_generators) {
      const auto f = extend_cocycle(cay, ad, z);
      for (int t = 0; t < 10000; ++t) {
        const std::size_t u = rng() % cay.order(), v = rng() % cay.order();
        const std::size_t uv = cay.multiply(u, v);
        const ModMatrix a = element_action(ad, cay, u);
        const ModVector fv(f.begin() + v * 3, f.begin() + v * 3 + 3);
        ModVector rhs = a.apply(fv);
        for (std::size_t i = 0; i < 3; ++i) rhs[i] = (rhs[i] + f[u * 3 + i]) % 4;
        CHECK(ModVector(f.begin() + uv * 3, f.begin() + uv * 3 + 3) == rhs);
      }
    }
  }
}

TEST_CASE("homology and coinvariants") {
  const auto grp = enumerate(GeneratedGroup::symplectic(1, 3));
  const auto triv = trivial_module(grp, 1);
  // H_1(G; Z/3) = G^ab / 3.
  CHECK(h1_homology(grp, triv) == AbelianGroupStructure::elementary(3, 1));
  CHECK(coinvariants(triv) == AbelianGroupStructure::elementary(3, 1));
  CHECK(coinvariants(standard_module(grp)).is_trivial());
  CHECK(invariants(standard_module(grp)).empty());

  const auto g2 = GeneratedGroup::symplectic(3, 2);
  const auto ad = adjoint_module(g2);
  // The identity matrix lies in sp_2g(Z/2) and is fixed by conjugation.
  CHECK(invariants_structure(ad) == AbelianGroupStructure::elementary(2, 1));
}

TEST_CASE("oracle cap") {
  const auto grp = enumerate(GeneratedGroup::symplectic(1, 9));
  CHECK_THROWS_AS(h1_bar_oracle(grp, trivial_module(grp, 1), 100), ResourceLimit);
  CHECK_THROWS_AS(h1_cohomology(GeneratedGroup::symplectic(1, 5), trivial_module(grp, 1)), InvalidArgument);
}

TEST_CASE("integral wedge3 coinvariants") {
  const ZMatrix id = ZMatrix::identity(6);
  CHECK(wedge3_matrix_integral(id).is_identity());
  for (std::uint64_t L : {2u, 3u, 4u, 5u, 6u}) {
    const auto res = integral_coinvariants_wedge3(3, L, 6, 11);
    CHECK(res.structure == AbelianGroupStructure::elementary(static_cast<unsigned long>(L), 20));
    CHECK_FALSE(res.below_stable_range);
  }
  CHECK(integral_coinvariants_wedge3(2, 3, 2, 1).below_stable_range);
  // Reduction of the integral action agrees with the modular one.
  const auto m = sample_congruence_element(3, 3, 5, 3).matrix();
  CHECK(wedge3_matrix_integral(m).reduce(7) == wedge3_matrix(m.reduce(7)));
}

TEST_CASE("coinvariants from generators match whole-group samples") {
  for (auto [g, L] : std::vector<std::pair<unsigned, std::uint64_t>>{{1, 4}, {1, 9}, {2, 2}}) {
    const auto grp = enumerate(GeneratedGroup::symplectic(g, L));
    std::mt19937_64 rng(g * 100 + L);
    for (const auto& m : module_zoo(grp)) {
      CAPTURE(m.label);
      std::vector<ModMatrix> sample;
      for (int t = 0; t < 1000; ++t) sample.push_back(element_action(m, grp.cayley(), rng() % grp.cayley().order()));
      CHECK(coinvariants_from_elements(m, sample) == coinvariants(m));
      // Coinvariants of the dual are the dual of the invariants.
      CHECK(coinvariants(dual_module(m)) == invariants_structure(m));
    }
  }
}

TEST_CASE("invariants vanish where expected") {
  CHECK(invariants(standard_module(GeneratedGroup::symplectic(2, 2))).empty());
  CHECK(invariants(adjoint_module(GeneratedGroup::symplectic(1, 3))).empty());
  const auto grp = GeneratedGroup::symplectic(2, 5);
  CHECK(invariants(trivial_module(grp, 3)).size() == 3);
  CHECK(coinvariants(trivial_module(grp, 3)) == AbelianGroupStructure::elementary(5, 3));
  const auto g15 = enumerate(GeneratedGroup::symplectic(1, 5));
  CHECK(h1_cohomology(g15, trivial_module(g15, 0)).h1.is_trivial());
}
