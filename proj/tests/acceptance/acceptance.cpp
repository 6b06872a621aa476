#include <array>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "spcgt/bcj.hpp"
#include "spcgt/calculator.hpp"
#include "spcgt/cohomology.hpp"
#include "spcgt/errors.hpp"

using namespace spcgt;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::size_t binom(std::size_t n, std::size_t k) {
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

EnumerationOptions cached() {
  EnumerationOptions opt;
  opt.cache_dir = default_cache_dir();
  return opt;
}

Outcome sp6_homology() {
  const auto grp = enumerate(GeneratedGroup::symplectic(3, 2), cached());
  const auto h = h1_homology(grp, adjoint_module(grp));
  return {h.is_trivial() && grp.cayley().order() == 1451520,
          "order " + std::to_string(grp.cayley().order()) + ", H_1 = " + h.to_string()};
}

Outcome sp6_cohomology() {
  const auto grp = enumerate(GeneratedGroup::symplectic(3, 2), cached());
  const bool reused = grp.cayley().loaded_from_cache();
  const auto h = h1_cohomology(grp, adjoint_module(grp)).h1;
  return {h == AbelianGroupStructure::elementary(2, 1) && reused,
          "H^1 = " + h.to_string() + (reused ? ", Cayley cache reused" : ", Cayley cache NOT reused")};
}

Outcome sp4_standard() {
  const auto grp = enumerate(GeneratedGroup::symplectic(2, 2));
  const auto h = h1_cohomology(grp, standard_module(grp)).h1;
  return {h == AbelianGroupStructure::elementary(2, 1), "H^1 = " + h.to_string()};
}

Outcome engine_oracle() {
  std::size_t pairs = 0, agree = 0;
  std::string mismatches;
  for (auto [g, L] : std::vector<std::pair<unsigned, std::uint64_t>>{
           {1, 2}, {1, 3}, {1, 4}, {1, 5}, {1, 6}, {1, 7}, {1, 8}, {1, 9}, {2, 2}}) {
    const auto grp = enumerate(GeneratedGroup::symplectic(g, L));
    std::vector<std::string> specs{"trivial", "standard", "adjoint", "dual-of-adjoint", "dual-of-standard"};
    if (g >= 2) specs.push_back("wedge3");
    for (const auto& spec : specs) {
      const auto m = build_module(grp, spec);
      ++pairs;
      const bool same = h1_cohomology(grp, m).h1 == h1_bar_oracle(grp, m);
      agree += same;
      if (!same) mismatches += " Sp_" + std::to_string(2 * g) + "(Z/" + std::to_string(L) + "):" + spec;
    }
  }
  return {pairs >= 12 && agree == pairs, std::to_string(agree) + "/" + std::to_string(pairs) + " pairs agree" + mismatches};
}

Outcome orders() {
  std::string detail;
  bool ok = true;
  for (auto [g, L] : std::vector<std::pair<unsigned, std::uint64_t>>{
           {1, 2}, {1, 3}, {1, 5}, {1, 7}, {1, 4}, {1, 9}, {2, 2}, {2, 3}}) {
    const auto grp = enumerate(GeneratedGroup::symplectic(g, L), EnumerationOptions{});
    const bool match = Integer(static_cast<unsigned long>(grp.cayley().order())) == predicted_order(g, L);
    ok = ok && match;
    detail += std::to_string(grp.cayley().order()) + (match ? " " : "(mismatch) ");
  }
  // Sp_4(Z/6): random generator words land in Sp_4(Z/2) x Sp_4(Z/3) componentwise, and
  // random pairs of components glue to symplectic matrices mod 6.
  const auto s2 = enumerate(GeneratedGroup::symplectic(2, 2));
  const auto s3 = enumerate(GeneratedGroup::symplectic(2, 3));
  const auto gens6 = symplectic_generators(2, 6);
  std::mt19937_64 rng(2024);
  std::size_t failures = 0;
  for (int t = 0; t < 10000; ++t) {
    ModMatrix x = ModMatrix::identity(4, 6);
    for (int i = 0; i < 40; ++i) x = x * gens6[rng() % gens6.size()];
    failures += !is_symplectic(x, 2) || !s2.cayley().index_of(x.reduce(2)) || !s3.cayley().index_of(x.reduce(3));
    const ModMatrix a = s2.cayley().element(rng() % s2.cayley().order());
    const ModMatrix b = s3.cayley().element(rng() % s3.cayley().order());
    ModMatrix glued(4, 4, 6);
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 4; ++c) {
        const std::array<std::uint64_t, 2> res{a(r, c), b(r, c)}, mods{2, 3};
        glued.set(r, c, static_cast<std::int64_t>(crt_combine(res, mods)));
      }
    failures += !is_symplectic(glued, 2);
  }
  const Integer product = Integer(720) * 51840;
  ok = ok && failures == 0 && predicted_order(2, 6) == product &&
       Integer(static_cast<unsigned long>(s2.cayley().order() * s3.cayley().order())) == product;
  return {ok, detail + "| Sp_4(Z/6) = " + product.get_str() + ", " + std::to_string(failures) + " sampling failures"};
}

Outcome trace_form() {
  bool ok = true;
  for (unsigned g = 1; g <= 4; ++g)
    for (std::uint64_t p : {3u, 5u, 7u}) {
      const ModMatrix gram = trace_form_gram(g, p);
      ok = ok && determinant_mod_prime(gram) != 0;
      for (std::size_t i = 0; i < g; ++i)
        for (std::size_t j = 0; j < g; ++j) ok = ok && gram(i * g + j, j * g + i) == 2;
    }
  return {ok, "12 Gram matrices nondegenerate, (A_ij, A_ji) = 2"};
}

Outcome nonsplit() {
  bool ok = true;
  std::string detail;
  for (auto [p, k] : std::vector<std::pair<std::uint64_t, unsigned>>{{5, 1}, {3, 2}, {2, 2}}) {
    const auto rep = nonsplit_witness(p, k, 2, 100, 1000 + p * 10 + k);
    std::size_t exceptions = 0;
    for (const auto& t : rep.trials) exceptions += !t.exceeds;
    ok = ok && rep.trials.size() == 100 && exceptions == 0;
    detail += "(" + std::to_string(p) + "," + std::to_string(k) + "): " + std::to_string(exceptions) + " exceptions; ";
  }
  return {ok, detail};
}

Outcome coinvariants_wedge3() {
  bool ok = true;
  std::string detail;
  for (std::uint64_t L : {2u, 3u, 6u}) {
    const auto start = std::chrono::steady_clock::now();
    const auto r = integral_coinvariants_wedge3(3, L, 16, 77 + L);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ok = ok && r.structure == AbelianGroupStructure::elementary(static_cast<unsigned long>(L), 20) && secs <= 120;
    detail += r.structure.to_string() + " ";
  }
  return {ok, detail};
}

Outcome bcj_suite() {
  bool ok = true;
  std::string detail;
  for (unsigned g = 1; g <= 3; ++g) {
    const auto b3 = dim_Bn(g, 3), b2 = dim_Bn(g, 2);
    const std::size_t expected = 1 + 2 * g + binom(2 * g, 2) + binom(2 * g, 3);
    ok = ok && b3.evaluation_rank == expected && b3.evaluation_rank - b2.evaluation_rank == binom(2 * g, 3);
    const auto orbits = orbit_arf_classification(g);
    ok = ok && orbits.orbits_are_arf_fibers;
    detail += "g=" + std::to_string(g) + ": rank " + std::to_string(b3.evaluation_rank) + "/" + std::to_string(expected) + "; ";
  }
  std::size_t arf0 = 0;
  for (const auto& f : all_forms(2)) arf0 += arf(f) == 0;
  const auto r2 = orbit_arf_classification(2);
  std::multiset<std::size_t> sizes;
  for (const auto& o : r2.orbits) sizes.insert(o.size());
  ok = ok && arf0 == 10 && sizes == std::multiset<std::size_t>{6, 10};
  return {ok, detail + "Arf-0 forms (g=2): " + std::to_string(arf0) + ", orbit sizes 10 and 6"};
}

Outcome phi_igusa() {
  std::size_t failures = 0, samples = 0, kernel = 0;
  for (auto [g, L] : std::vector<std::pair<unsigned, std::uint64_t>>{{2, 2}, {2, 3}, {3, 2}, {3, 6}}) {
    for (std::uint64_t s = 0; s < 1000; ++s) {
      const auto a = sample_congruence_element(g, L, 31 * s + L, 1 + s % 6);
      const auto b = sample_congruence_element(g, L, 5'000'000 + 31 * s + L, 1 + (s / 6) % 6);
      const auto ab = a * b;
      ++samples;
      failures += !(phi(ab) == phi(a) + phi(b));
      if (L % 2 == 0) {
        const auto ia = igusa_vector(a), ib = igusa_vector(b), iab = igusa_vector(ab);
        for (std::size_t i = 0; i < ia.size(); ++i) failures += iab[i] != (ia[i] ^ ib[i]);
      }
      CongruenceElement power = a;
      for (std::uint64_t t = 1; t < L; ++t) power = power * a;
      for (const CongruenceElement* m : std::array<const CongruenceElement*, 3>{&a, &ab, &power}) {
        const bool zero = phi(*m).is_zero();
        const bool deep = (m->matrix() - ZMatrix::identity(2 * g)).reduce(L * L).is_zero();
        failures += zero != deep;
        kernel += zero;
      }
    }
  }
  return {failures == 0, std::to_string(samples) + " pairs, " + std::to_string(failures) + " failures, " +
                             std::to_string(kernel) + " elements in ker phi"};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome goldens() {
  const std::string dir = SPCGT_GOLDEN_DIR;
  std::size_t same = 0;
  const std::vector<std::pair<std::string, Json>> cases{
      {"abelianize_g5_L3_b1", cmd_abelianize(5, 3, 1)},
      {"abelianize_g5_L2_b1", cmd_abelianize(5, 2, 1)},
      {"picard_mg_g5_L2", cmd_picard("mg", 5, 2)},
      {"picard_ag_g4_L2", cmd_picard("ag", 4, 2)},
      {"picard_mg_g5_L3", cmd_picard("mg", 5, 3)}};
  for (const auto& [name, json] : cases) same += read_file(dir + "/" + name + ".json") == json.dump(2) + "\n";
  const bool values = cases[2].second["n"] == 4 && cases[3].second["n"] == 2 && cases[4].second["n"] == 1;
  std::size_t rejected = 0;
  for (std::uint64_t L : {4u, 8u, 12u}) {
    try {
      cmd_abelianize(5, L, 1, true);
    } catch (const UnsupportedCase& e) {
      rejected += std::string(e.what()).find("4 does not divide L") != std::string::npos;
    }
  }
  return {same == cases.size() && values && rejected == 3,
          std::to_string(same) + "/5 goldens byte-identical, " + std::to_string(rejected) + "/3 4|L inputs rejected"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"H_1(Sp_6(Z/2); sp_6(Z/2)) = 0", sp6_homology},
      {"H^1(Sp_6(Z/2); sp_6(Z/2)) = Z/2", sp6_cohomology},
      {"H^1(Sp_4(Z/2); H_1(Sigma_2; Z/2)) = Z/2", sp4_standard},
      {"tree engine = bar-complex oracle", engine_oracle},
      {"order formula and CRT order", orders},
      {"trace form nondegenerate", trace_form},
      {"non-split lifts", nonsplit},
      {"integral wedge3 coinvariants", coinvariants_wedge3},
      {"BCJ suite", bcj_suite},
      {"phi and Igusa laws", phi_igusa},
      {"CLI goldens", goldens}};
  const std::array<double, 11> budget_s{900, 900, 10, 300, 600, 60, 60, 360, 60, 600, 60};

  std::set<std::size_t> selected;
  for (int i = 1; i < argc; ++i) selected.insert(static_cast<std::size_t>(std::atoi(argv[i])));
  int failed = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    if (!selected.empty() && !selected.count(c + 1)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[c].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= budget_s[c];
    const bool pass = out.passed && in_time;
    failed += !pass;
    std::cout << "criterion " << std::setw(2) << c + 1 << " " << (pass ? "PASS" : "FAIL") << "  " << criteria[c].first
              << "  [" << out.detail << (in_time ? "" : " OVER TIME BUDGET") << "; " << std::fixed
              << std::setprecision(1) << secs << " s]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
