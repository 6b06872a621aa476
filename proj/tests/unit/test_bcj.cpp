#include <doctest.h>

#include <algorithm>
#include <random>

#include "spcgt/bcj.hpp"
#include "spcgt/errors.hpp"

using namespace spcgt;

namespace {

std::size_t binom(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

BooleanPoly random_poly(unsigned g, std::mt19937_64& rng) {
  std::vector<std::uint32_t> m;
  const std::size_t terms = rng() % 6;
  for (std::size_t t = 0; t < terms; ++t) m.push_back(static_cast<std::uint32_t>(rng() & ((1u << (2 * g)) - 1)));
  return BooleanPoly(g, m);
}

}  // namespace

TEST_CASE("evaluate_form") {
  const QuadraticForm zero{2, 0};
  CHECK(evaluate_form(zero, 0b0001) == 0);
  // a_1 + b_1 in genus 2: bits 0 and 2.
  CHECK(evaluate_form(zero, 0b0101) == 1);
  CHECK(intersection_pairing(2, 0b0001, 0b0100) == 1);
  CHECK(intersection_pairing(2, 0b0001, 0b0010) == 0);

  SUBCASE("independent of the expansion order") {
    std::mt19937_64 rng(5);
    for (unsigned g = 1; g <= 3; ++g)
      for (const auto& f : all_forms(g))
        for (std::uint32_t x = 0; x < (1u << (2 * g)); ++x) {
          std::vector<std::uint32_t> parts;
          for (std::uint32_t r = x; r; r &= r - 1) parts.push_back(r & (~r + 1));
          std::shuffle(parts.begin(), parts.end(), rng);
          std::uint32_t acc = 0;
          unsigned val = 0;
          for (auto e : parts) {
            val ^= evaluate_form(f, e) ^ intersection_pairing(g, acc, e);
            acc |= e;
          }
          CHECK(val == evaluate_form(f, x));
        }
  }
  SUBCASE("quadratic refinement of the pairing") {
    for (const auto& f : all_forms(2))
      for (std::uint32_t x = 0; x < 16; ++x)
        for (std::uint32_t y = 0; y < 16; ++y)
          CHECK(evaluate_form(f, x ^ y) == (evaluate_form(f, x) ^ evaluate_form(f, y) ^ intersection_pairing(2, x, y)));
  }
}

TEST_CASE("arf") {
  CHECK(arf({2, 0}) == 0);
  CHECK(arf({2, 0b0101}) == 1);
  for (unsigned g = 1; g <= 4; ++g) {
    std::size_t zeros = 0;
    for (const auto& f : all_forms(g)) zeros += arf(f) == 0;
    CHECK(zeros == (std::size_t{1} << (2 * g - 1)) + (std::size_t{1} << (g - 1)));
  }
  std::size_t zeros2 = 0;
  for (const auto& f : all_forms(2)) zeros2 += arf(f) == 0;
  CHECK(zeros2 == 10);
  // Arf as the polynomial sum x-bar_{a_k} x-bar_{b_k}.
  for (unsigned g = 1; g <= 3; ++g) {
    BooleanPoly p(g);
    for (unsigned k = 0; k < g; ++k) p = p + bcj_product(BooleanPoly::variable(g, k), BooleanPoly::variable(g, g + k));
    for (const auto& f : all_forms(g)) CHECK(p.evaluate(f) == arf(f));
  }
}

TEST_CASE("orbits are the Arf fibers") {
  const auto r1 = orbit_arf_classification(1);
  REQUIRE(r1.orbits.size() == 2);
  std::vector<std::size_t> sizes1{r1.orbits[0].size(), r1.orbits[1].size()};
  std::sort(sizes1.begin(), sizes1.end());
  CHECK(sizes1 == std::vector<std::size_t>{1, 3});
  CHECK(r1.orbits_are_arf_fibers);

  const auto r2 = orbit_arf_classification(2);
  REQUIRE(r2.orbits.size() == 2);
  for (std::size_t o = 0; o < 2; ++o) CHECK(r2.orbits[o].size() == (r2.orbit_arf[o] == 0 ? 10u : 6u));
  CHECK(r2.orbits_are_arf_fibers);

  const auto r3 = orbit_arf_classification(3);
  CHECK(r3.orbits.size() == 2);
  CHECK(r3.orbits_are_arf_fibers);
  CHECK_THROWS_AS(orbit_arf_classification(4), InvalidArgument);
}

TEST_CASE("transported forms stay quadratic") {
  // Transvection x -> x + i(x, v) v is its own inverse mod 2.
  const unsigned g = 2;
  const std::uint32_t v = 0b0011;
  std::vector<std::uint32_t> cols;
  for (unsigned c = 0; c < 4; ++c) {
    const std::uint32_t e = 1u << c;
    cols.push_back(intersection_pairing(g, e, v) ? e ^ v : e);
  }
  for (const auto& f : all_forms(g)) {
    const auto h = transport_form(f, cols);
    CHECK(arf(h) == arf(f));
    for (std::uint32_t x = 0; x < 16; ++x) {
      const std::uint32_t tx = intersection_pairing(g, x, v) ? x ^ v : x;
      CHECK(evaluate_form(h, x) == evaluate_form(f, tx));
    }
  }
}

TEST_CASE("boolean polynomials") {
  const auto x1 = BooleanPoly::variable(2, 0);
  CHECK(bcj_product(x1, x1) == x1);
  const auto one = BooleanPoly::constant(2, 1);
  std::mt19937_64 rng(9);
  for (int t = 0; t < 50; ++t) {
    const auto p = random_poly(2, rng), q = random_poly(2, rng), r = random_poly(2, rng);
    CHECK(bcj_product(one, p) == p);
    CHECK(bcj_product(p, q) == bcj_product(q, p));
    CHECK(bcj_product(bcj_product(p, q), r) == bcj_product(p, bcj_product(q, r)));
    CHECK(bcj_product(p + q, r) == bcj_product(p, r) + bcj_product(q, r));
    CHECK((p + p).is_zero());
  }
  // (x1 + x2) x3 agrees with its distribution pointwise on forms.
  const auto lhs = bcj_product(x1 + BooleanPoly::variable(2, 1), BooleanPoly::variable(2, 2));
  const auto rhs = bcj_product(x1, BooleanPoly::variable(2, 2)) + bcj_product(BooleanPoly::variable(2, 1), BooleanPoly::variable(2, 2));
  for (const auto& f : all_forms(2)) CHECK(lhs.evaluate(f) == rhs.evaluate(f));
  CHECK(rhs.to_string() == "x1*x3 + x2*x3");

  SUBCASE("evaluation is a ring homomorphism") {
    for (unsigned g = 1; g <= 3; ++g)
      for (int t = 0; t < 40; ++t) {
        const auto p = random_poly(g, rng), q = random_poly(g, rng);
        const auto pq = bcj_product(p, q);
        for (const auto& f : all_forms(g)) {
          CHECK(pq.evaluate(f) == (p.evaluate(f) & q.evaluate(f)));
          CHECK((p + q).evaluate(f) == (p.evaluate(f) ^ q.evaluate(f)));
        }
      }
  }
  SUBCASE("graded lexicographic order") {
    const auto monos = monomials_up_to(2, 2);
    CHECK(monos.front() == 0);
    CHECK(monos.size() == 11);
    CHECK(monos[1] == 0b0001);
    CHECK(monos[5] == 0b0011);
    CHECK(monos[6] == 0b0101);
    CHECK(monos.back() == 0b1100);
    CHECK(BooleanPoly(2, {0b0110, 0b0001, 0, 0b0110}).monomials() == std::vector<std::uint32_t>{0, 0b0001});
  }
}

TEST_CASE("class symbols") {
  CHECK(symbol_of_class(2, 0b0001) == BooleanPoly::variable(2, 0));
  CHECK(symbol_of_class(2, 0b0101) == BooleanPoly(2, {0b0001, 0b0100, 0}));
  CHECK_THROWS_AS(symbol_of_class(2, 0), InvalidArgument);
  for (unsigned g = 1; g <= 3; ++g)
    for (std::uint32_t x = 1; x < (1u << (2 * g)); ++x) {
      const auto s = symbol_of_class(g, x);
      CHECK(s.degree() <= 1);
      for (const auto& f : all_forms(g)) CHECK(s.evaluate(f) == evaluate_form(f, x));
    }
}

TEST_CASE("filtration ranks") {
  CHECK(dim_Bn(2, 0).ambient_dim == 1);
  CHECK(dim_Bn(2, 0).evaluation_rank == 1);
  CHECK(dim_Bn(2, 3).ambient_dim == 15);
  CHECK(dim_Bn(2, 3).evaluation_rank == 15);
  CHECK(dim_Bn(3, 3).ambient_dim == 42);
  CHECK(dim_Bn(3, 3).evaluation_rank == 42);
  for (unsigned g = 1; g <= 4; ++g)
    for (unsigned n = 0; n <= 2 * g; ++n) CHECK(dim_Bn(g, n).injective());
  for (unsigned g = 1; g <= 3; ++g) {
    const std::size_t expected = 1 + 2 * g + binom(2 * g, 2) + binom(2 * g, 3);
    CAPTURE(g);
    CHECK(dim_Bn(g, 3).evaluation_rank == expected);
    CHECK(dim_Bn(g, 3).evaluation_rank - dim_Bn(g, 2).evaluation_rank == binom(2 * g, 3));
  }
  CHECK(dim_Bbar(2, 0) == 1);
  CHECK(dim_Bbar(2, 3) <= 10);
  CHECK(dim_Bbar(3, 3) - dim_Bbar(3, 2) == 14);
  CHECK(dim_Bn(1, 5).evaluation_rank == 4);
  CHECK_THROWS_AS(dim_Bn(7, 1), InvalidArgument);
}
