#include <doctest.h>

#include <random>

#include "spcgt/errors.hpp"
#include "spcgt/modules.hpp"

using namespace spcgt;

namespace {

ModVector unit_vector(std::size_t n, std::size_t i) {
  ModVector v(n, 0);
  v[i] = 1;
  return v;
}

std::uint64_t pairing(const ModVector& x, const ModVector& y, unsigned g, std::uint64_t L) {
  const ModMatrix w = omega(g, L);
  const ModVector wy = w.apply(y);
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s = (s + std::uint64_t{x[i]} * wy[i]) % L;
  return s;
}

}  // namespace

TEST_CASE("sp_lie_basis") {
  CHECK(sp_lie_basis(1, 5).size() == 3);
  CHECK(sp_lie_basis(3, 5).size() == 21);
  for (unsigned g = 1; g <= 4; ++g) {
    const auto basis = sp_lie_basis(g, 7);
    CHECK(basis.size() == 2 * g * g + g);
    for (std::size_t k = 0; k < basis.size(); ++k) {
      CHECK(is_lie_element(basis[k], g));
      CHECK(expand_in_lie_basis(basis[k], g) == unit_vector(basis.size(), k));
    }
  }
  const auto b2 = sp_lie_basis(2, 5);
  ModMatrix a12(4, 4, 5);
  a12.set(0, 1, 1);
  a12.set(3, 2, -1);
  CHECK(b2[1] == a12);
  CHECK_THROWS_AS(expand_in_lie_basis(elementary(2, 5, 0, 1), 2), InvalidArgument);
}

TEST_CASE("adjoint module") {
  const auto grp = enumerate(GeneratedGroup::symplectic(1, 3));
  const auto ad = adjoint_module(grp);
  CHECK(ad.dim == 3);
  CHECK(satisfies_relators(ad, grp.cayley()));
  const auto id_group = GeneratedGroup(2, 5, {ModMatrix::identity(4, 5)});
  CHECK(adjoint_module(id_group).action[0].is_identity());

  SUBCASE("conjugation preserves sp") {
    const auto g2 = enumerate(GeneratedGroup::symplectic(2, 3));
    const auto basis = sp_lie_basis(2, 3);
    std::mt19937_64 rng(17);
    for (int t = 0; t < 1000; ++t) {
      const ModMatrix x = g2.cayley().element(rng() % g2.cayley().order());
      ModMatrix a(4, 4, 3);
      for (const auto& b : basis) a = a + (rng() % 3) * b;
      CHECK(is_lie_element(x * a * inverse_mod(x), 2));
    }
  }
}

TEST_CASE("standard module") {
  const auto grp = GeneratedGroup::symplectic(2, 6);
  const auto h = standard_module(grp);
  CHECK(h.dim == 4);
  std::mt19937_64 rng(1);
  for (const auto& a : h.action)
    for (int t = 0; t < 20; ++t) {
      ModVector x(4), y(4);
      for (auto& v : x) v = static_cast<Residue>(rng() % 6);
      for (auto& v : y) v = static_cast<Residue>(rng() % 6);
      CHECK(pairing(a.apply(x), a.apply(y), 2, 6) == pairing(x, y, 2, 6));
    }
  const auto h2 = standard_module(GeneratedGroup::symplectic(2, 2));
  const auto reduced = reduce_module(h, 2);
  CHECK(reduced.action == h2.action);
}

TEST_CASE("exterior cube") {
  CHECK(exterior_cube(standard_module(GeneratedGroup::symplectic(1, 3))).dim == 0);
  const auto grp3 = GeneratedGroup::symplectic(3, 3);
  const auto w = exterior_cube(standard_module(grp3));
  CHECK(w.dim == 20);
  CHECK(wedge3_matrix(ModMatrix::identity(6, 3)).is_identity());
  const auto basis = wedge3_basis(6);
  for (std::size_t t = 0; t < basis.size(); ++t) CHECK(wedge3_index(6, basis[t][0], basis[t][1], basis[t][2]) == t);

  SUBCASE("functorial on random words") {
    std::mt19937_64 rng(8);
    const auto& gens = grp3.generators();
    for (int t = 0; t < 30; ++t) {
      ModMatrix prod = ModMatrix::identity(6, 3);
      ModMatrix wprod = ModMatrix::identity(20, 3);
      const std::size_t len = 1 + rng() % 6;
      for (std::size_t i = 0; i < len; ++i) {
        const std::size_t j = rng() % gens.size();
        prod = prod * gens[j];
        wprod = wprod * w.action[j];
      }
      CHECK(wedge3_matrix(prod) == wprod);
    }
  }
  SUBCASE("relators hold on a small group") {
    const auto g2 = enumerate(GeneratedGroup::symplectic(2, 2));
    CHECK(satisfies_relators(exterior_cube(standard_module(g2)), g2.cayley()));
  }
}

TEST_CASE("omega embedding") {
  CHECK_THROWS_AS(omega_embedding(1, 3), InvalidArgument);
  const ModMatrix e = omega_embedding(2, 5);
  CHECK(e.rows() == 4);
  CHECK(e.cols() == 4);
  // a_1 ^ (a_1 ^ b_1 + a_2 ^ b_2) = a_1 ^ a_2 ^ b_2, coordinates (0, 1, 3).
  ModVector col(4);
  for (std::size_t r = 0; r < 4; ++r) col[r] = e(r, 0);
  CHECK(col == unit_vector(4, wedge3_index(4, 0, 1, 3)));

  for (auto [g, L] : std::vector<std::pair<unsigned, std::uint64_t>>{{2, 2}, {2, 3}, {3, 2}, {3, 3}}) {
    const auto grp = GeneratedGroup::symplectic(g, L);
    const auto h = standard_module(grp);
    const auto w = exterior_cube(h);
    const ModMatrix emb = omega_embedding(g, L);
    for (std::size_t j = 0; j < h.action.size(); ++j) CHECK(w.action[j] * emb == emb * h.action[j]);
  }
  for (std::uint64_t L : {3u, 5u, 9u}) CHECK(kernel_mod(omega_embedding(3, L)).size() == 0);
}

TEST_CASE("quotient module") {
  const auto grp = GeneratedGroup::symplectic(3, 3);
  const auto w = exterior_cube(standard_module(grp));
  SUBCASE("zero submodule") {
    const auto q = quotient_module(w, {});
    REQUIRE(q.module.has_value());
    CHECK(q.module->dim == 20);
    CHECK(q.structure == AbelianGroupStructure::elementary(3, 20));
  }
  SUBCASE("wedge3 modulo the omega image") {
    const ModMatrix emb = omega_embedding(3, 3);
    std::vector<ModVector> image;
    for (std::size_t c = 0; c < 6; ++c) {
      ModVector v(20);
      for (std::size_t r = 0; r < 20; ++r) v[r] = emb(r, c);
      image.push_back(v);
    }
    const auto q = quotient_module(w, image);
    CHECK(q.structure == AbelianGroupStructure::elementary(3, 14));
    REQUIRE(q.module.has_value());
    CHECK(q.module->dim == 14);
    // The projection intertwines the actions.
    for (std::size_t j = 0; j < w.action.size(); ++j)
      CHECK(*q.projection * w.action[j] == q.module->action[j] * *q.projection);
  }
  SUBCASE("relators hold on the Sp_4(Z/2) quotient") {
    const auto g2 = enumerate(GeneratedGroup::symplectic(2, 2));
    const auto w2 = exterior_cube(standard_module(g2));
    const ModMatrix emb = omega_embedding(2, 2);
    std::vector<ModVector> image;
    for (std::size_t c = 0; c < 4; ++c) {
      ModVector v(4);
      for (std::size_t r = 0; r < 4; ++r) v[r] = emb(r, c);
      image.push_back(v);
    }
    const auto q = quotient_module(w2, image);
    REQUIRE(q.module.has_value());
    CHECK(satisfies_relators(*q.module, g2.cayley()));
  }
  SUBCASE("unstable submodule is rejected") {
    CHECK_THROWS_AS(quotient_module(w, {unit_vector(20, 0)}), InvalidArgument);
  }
  SUBCASE("non-free quotient reports structure only") {
    const auto triv = trivial_module(GeneratedGroup::symplectic(1, 4), 1);
    const auto q = quotient_module(triv, {ModVector{2}});
    CHECK(q.structure == AbelianGroupStructure::elementary(2, 1));
    CHECK_FALSE(q.module.has_value());
  }
}

TEST_CASE("dual module") {
  const auto grp = enumerate(GeneratedGroup::symplectic(1, 5));
  const auto ad = adjoint_module(grp);
  const auto d = dual_module(ad);
  CHECK(dual_module(d).action == ad.action);
  CHECK(satisfies_relators(d, grp.cayley()));
  CHECK(dual_module(trivial_module(grp, 2)).action[0].is_identity());
  // Functoriality of the contragredient on words.
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    ModMatrix a = ModMatrix::identity(3, 5), b = ModMatrix::identity(3, 5);
    for (int i = 0; i < 5; ++i) {
      const std::size_t j = rng() % ad.action.size();
      a = a * ad.action[j];
      b = b * d.action[j];
    }
    CHECK(b == inverse_mod(a).transpose());
  }
}

TEST_CASE("trace form") {
  CHECK_THROWS_AS(trace_form_gram(2, 2), InvalidArgument);
  CHECK_THROWS_AS(trace_form_gram(2, 9), InvalidArgument);
  for (unsigned g = 1; g <= 4; ++g)
    for (std::uint64_t p : {3u, 5u, 7u}) {
      const ModMatrix gram = trace_form_gram(g, p);
      CHECK(determinant_mod_prime(gram) != 0);
      for (std::size_t r = 0; r < gram.rows(); ++r) {
        std::size_t nonzero = 0;
        for (std::size_t c = 0; c < gram.cols(); ++c) nonzero += gram(r, c) != 0;
        CHECK(nonzero == 1);
      }
      // (A_{i,j}, A_{j,i}) = 2
      for (std::size_t i = 0; i < g; ++i)
        for (std::size_t j = 0; j < g; ++j) CHECK(gram(i * g + j, j * g + i) == 2);
    }
  const auto grp = GeneratedGroup::symplectic(2, 3);
  const auto ad = adjoint_module(grp);
  const ModMatrix gram = trace_form_gram(2, 3);
  for (const auto& a : ad.action) CHECK(a.transpose() * gram * a == gram);
}
