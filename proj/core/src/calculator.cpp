#include "spcgt/calculator.hpp"

#include <array>
#include <chrono>
#include <fstream>
#include <functional>
#include <random>

#include "spcgt/bcj.hpp"
#include "spcgt/cohomology.hpp"
#include "spcgt/errors.hpp"

namespace spcgt {

namespace {

std::uint64_t binom(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

Json integer_json(const Integer& x) {
  if (x.fits_ulong_p()) return static_cast<std::uint64_t>(x.get_ui());
  return x.get_str();
}

Json named(const std::string& name, const AbelianGroupStructure& s) {
  return Json{{"name", name}, {"structure", structure_json(s)}};
}

AbelianGroupStructure free_over(std::uint64_t level, std::uint64_t count) {
  return AbelianGroupStructure::elementary(static_cast<unsigned long>(level), count);
}

std::string sp_name(unsigned g, const std::string& ring) { return "Sp_" + std::to_string(2 * g) + "(" + ring + ")"; }

void check_level(std::uint64_t level) {
  if (level < 2) throw InvalidArgument("level L must be >= 2");
  if (level % 4 == 0)
    throw UnsupportedCase("L = " + std::to_string(level) + " violates the hypothesis that 4 does not divide L");
}

// (wedge^3 H_L) / H_L through the omega embedding.
AbelianGroupStructure wedge3_mod_omega(unsigned g, std::uint64_t level) {
  const std::size_t d = binom(2 * g, 3);
  const ModMatrix emb = omega_embedding(g, level);
  std::vector<ModVector> units, image;
  for (std::size_t i = 0; i < d; ++i) {
    ModVector v(d, 0);
    v[i] = 1;
    units.push_back(std::move(v));
  }
  for (std::size_t c = 0; c < emb.cols(); ++c) {
    ModVector v(d);
    for (std::size_t r = 0; r < d; ++r) v[r] = emb(r, c);
    image.push_back(std::move(v));
  }
  return relative_quotient(units, image, d, level);
}

Json sp_part_json(unsigned g, std::uint64_t level) {
  const std::uint64_t lie_dim = 2ull * g * g + g;
  const std::string lie = "sp_" + std::to_string(2 * g) + "(Z/" + std::to_string(level) + ")";
  if (level % 2 == 1) {
    return Json{{"kind", "structure"},
                {"group", "H_1(" + sp_name(g, "Z," + std::to_string(level)) + ";Z)"},
                {"identified_with", lie},
                {"structure", structure_json(free_over(level, lie_dim))}};
  }
  return Json{{"kind", "extension"},
              {"group", "H_1(" + sp_name(g, "Z," + std::to_string(level)) + ";Z)"},
              {"kernel", named("H_1(Sigma_" + std::to_string(g) + ";Z/2)", free_over(2, 2 * g))},
              {"quotient", named(lie, free_over(level, lie_dim))},
              {"note", "extension of abelian groups; splitting not determined"}};
}

Json k_part_json(unsigned g, std::uint64_t level, unsigned boundary) {
  const std::uint64_t n = 2 * g;
  const std::uint64_t w3 = binom(n, 3);
  Json summands = Json::array();
  AbelianGroupStructure total;
  auto add = [&](Json item, const AbelianGroupStructure& s) {
    summands.push_back(std::move(item));
    total = AbelianGroupStructure::direct_sum(total, s);
  };
  if (level % 2 == 0) {
    if (boundary == 1) {
      const std::uint64_t b2 = 1 + n + binom(n, 2), b0 = 1;
      const auto s = free_over(2, b2 - b0);
      Json item = named("B_2(" + std::to_string(n) + ")/B_0(" + std::to_string(n) + ")", s);
      item["dim_B2"] = b2;
      item["dim_B0"] = b0;
      add(std::move(item), s);
    } else {
      if (g > kMaxFormGenus)
        throw UnsupportedCase("the Arf-0 restriction is tabulated only for g <= " + std::to_string(kMaxFormGenus));
      const std::uint64_t b2 = dim_Bbar(g, 2), b0 = dim_Bbar(g, 0);
      const auto s = free_over(2, b2 - b0);
      Json item = named("Bbar_2(" + std::to_string(n) + ")/Bbar_0(" + std::to_string(n) + ")", s);
      item["dim_Bbar2"] = b2;
      item["dim_Bbar0"] = b0;
      add(std::move(item), s);
    }
  }
  if (boundary == 1) {
    add(named("wedge3(H_L)", free_over(level, w3)), free_over(level, w3));
  } else {
    const auto s = wedge3_mod_omega(g, level);
    add(named("wedge3(H_L)/H_L", s), s);
  }
  return Json{{"summands", summands}, {"structure", structure_json(total)}};
}

}  // namespace

Json structure_json(const AbelianGroupStructure& s) {
  Json factors = Json::array();
  for (std::size_t i = 0; i < s.invariant_factors.size();) {
    std::size_t j = i;
    while (j < s.invariant_factors.size() && s.invariant_factors[j] == s.invariant_factors[i]) ++j;
    factors.push_back(Json{{"order", integer_json(s.invariant_factors[i])}, {"multiplicity", j - i}});
    i = j;
  }
  return Json{{"rendered", s.to_string()}, {"cyclic_factors", factors}, {"free_rank", s.free_rank}};
}

Json cmd_abelianize(unsigned g, std::uint64_t level, unsigned boundary, bool force) {
  if (boundary > 1) throw InvalidArgument("boundary must be 0 or 1");
  check_level(level);
  if (g < 1) throw InvalidArgument("genus must be >= 1");
  const bool in_range = g >= 5;
  if (!in_range && !force) throw UnsupportedCase("g = " + std::to_string(g) + " violates the hypothesis g >= 5");
  if (boundary == 0 && g < 2) throw InvalidArgument("closed surfaces need g >= 2 for the omega embedding");

  Json warnings = Json::array();
  if (!in_range) warnings.push_back("outside theorem hypotheses: g >= 5 required, forced at g = " + std::to_string(g));
  const std::string surface = boundary == 1 ? std::to_string(g) + ",1" : std::to_string(g);
  const std::string lv = std::to_string(level);
  Json out;
  out["command"] = "abelianize";
  out["g"] = g;
  out["L"] = level;
  out["boundary"] = boundary;
  out["outside_theorem_hypotheses"] = !in_range;
  out["warnings"] = warnings;
  out["K_part"] = k_part_json(g, level, boundary);
  out["sp_part"] = sp_part_json(g, level);
  out["assembly"] = "0 -> K_{" + surface + "} -> H_1(Mod_{" + surface + "}(" + lv + ");Z) -> H_1(" +
                    sp_name(g, "Z," + lv) + ";Z) -> 0";
  return out;
}

Json cmd_picard(const std::string& space, unsigned g, std::uint64_t level) {
  const bool curves = space == "mg" || space == "moduli_curves";
  const bool ppav = space == "ag" || space == "ppav";
  if (!curves && !ppav) throw InvalidArgument("space must be mg or ag");
  check_level(level);
  const unsigned min_g = curves ? 5 : 4;
  if (g < min_g)
    throw UnsupportedCase("g = " + std::to_string(g) + " violates the hypothesis g >= " + std::to_string(min_g));
  const unsigned n = level % 2 == 1 ? 1 : (curves ? 4 : 2);
  const std::string lv = std::to_string(level), gs = std::to_string(g);
  const std::string bundle = curves ? "lambda_" + gs + "(" + lv + ")" : "lambda^a_" + gs + "(" + lv + ")";

  Json out;
  out["command"] = "picard";
  out["space"] = curves ? "moduli_curves" : "ppav";
  out["g"] = g;
  out["L"] = level;
  out["n"] = n;
  out["h2_image_index"] = n;
  out["line_bundle"] = bundle;
  out["generator_mod_torsion"] = n == 1 ? bundle : "(1/" + std::to_string(n) + ") " + bundle;
  out["h2_image"] = n == 1 ? "Z" : std::to_string(n) + "Z";
  Json torsion;
  if (curves) {
    torsion["group"] = "Hom(H_1(Mod_" + gs + "(" + lv + ");Z), Q/Z)";
    Json h1;
    h1["sp_part"] = sp_part_json(g, level);
    try {
      h1["K_part"] = k_part_json(g, level, 0);
    } catch (const UnsupportedCase& e) {
      h1["K_part"] = nullptr;
      out["warnings"] = Json::array({std::string("K_part unavailable: ") + e.what()});
    }
    torsion["h1"] = h1;
  } else {
    torsion["group"] = "Hom(H_1(" + sp_name(g, "Z," + lv) + ";Z), Q/Z)";
    torsion["h1"] = Json{{"sp_part", sp_part_json(g, level)}};
  }
  out["torsion_part"] = torsion;
  if (!out.contains("warnings")) out["warnings"] = Json::array();
  return out;
}

LinearModule build_module(const GeneratedGroup& group, const std::string& spec) {
  static const std::string dual_prefix = "dual-of-";
  if (spec.rfind(dual_prefix, 0) == 0) return dual_module(build_module(group, spec.substr(dual_prefix.size())));
  if (spec == "trivial") return trivial_module(group, 1);
  if (spec == "standard") return standard_module(group);
  if (spec == "adjoint") return adjoint_module(group);
  if (spec == "wedge3") return exterior_cube(standard_module(group));
  if (spec == "wedge3-mod-omega") {
    const auto w = exterior_cube(standard_module(group));
    const ModMatrix emb = omega_embedding(group.genus(), group.modulus());
    std::vector<ModVector> image;
    for (std::size_t c = 0; c < emb.cols(); ++c) {
      ModVector v(w.dim);
      for (std::size_t r = 0; r < w.dim; ++r) v[r] = emb(r, c);
      image.push_back(std::move(v));
    }
    auto q = quotient_module(w, image);
    if (!q.module) throw UnsupportedCase("wedge3-mod-omega is not free over Z/L here");
    q.module->label = "wedge3-mod-omega";
    return std::move(*q.module);
  }
  throw InvalidArgument("unknown module spec '" + spec + "'");
}

Json cmd_h1(unsigned g, std::uint64_t level, const std::string& module_spec, const std::string& direction,
            const H1Options& options) {
  const bool co = direction == "co" || direction == "cohomology";
  const bool ho = direction == "ho" || direction == "homology";
  if (!co && !ho) throw InvalidArgument("direction must be co or ho");
  using clock = std::chrono::steady_clock;
  auto ms = [](clock::duration d) { return std::chrono::duration_cast<std::chrono::milliseconds>(d).count(); };

  auto group = GeneratedGroup::symplectic(g, level);
  const LinearModule module = build_module(group, module_spec);
  const auto t0 = clock::now();
  group = enumerate(std::move(group), options.enumeration);
  const auto t1 = clock::now();
  const AbelianGroupStructure result = co ? h1_cohomology(group, module).h1 : h1_homology(group, module);
  const auto t2 = clock::now();

  Json factors = Json::array();
  for (const auto& d : result.invariant_factors) factors.push_back(integer_json(d));
  Json out;
  out["command"] = "h1";
  out["group"] = Json{{"g", g}, {"L", level}, {"order", group.cayley().order()}, {"name", sp_name(g, "Z/" + std::to_string(level))}};
  out["module"] = Json{{"spec", module_spec}, {"label", module.label}, {"dim", module.dim}};
  out["direction"] = co ? "cohomology" : "homology";
  out["invariant_factors"] = factors;
  out["structure"] = structure_json(result);
  out["cache_hit"] = group.cayley().loaded_from_cache();
  out["timings_ms"] = Json{{"enumerate", ms(t1 - t0)}, {"solve", ms(t2 - t1)}};
  return out;
}

// ---------------------------------------------------------------------------
// Verification suites

namespace {

CheckResult run_check(const std::string& name, const std::string& anchor, const std::function<std::string(bool&)>& body) {
  CheckResult r{name, anchor, false, ""};
  try {
    bool ok = true;
    r.detail = body(ok);
    r.passed = ok;
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  return r;
}

std::string check_orders(bool& ok, const std::vector<std::pair<unsigned, std::uint64_t>>& cases) {
  std::string detail;
  for (auto [g, L] : cases) {
    const auto grp = enumerate(GeneratedGroup::symplectic(g, L));
    const Integer expected = predicted_order(g, L);
    const bool match = Integer(static_cast<unsigned long>(grp.cayley().order())) == expected;
    ok = ok && match;
    detail += sp_name(g, "Z/" + std::to_string(L)) + "=" + std::to_string(grp.cayley().order()) + (match ? " " : "(mismatch) ");
  }
  return detail;
}

std::string check_engine_oracle(bool& ok) {
  std::size_t pairs = 0, agree = 0;
  for (auto [g, L] : std::vector<std::pair<unsigned, std::uint64_t>>{
           {1, 2}, {1, 3}, {1, 4}, {1, 5}, {1, 9}, {2, 2}}) {
    const auto grp = enumerate(GeneratedGroup::symplectic(g, L));
    std::vector<std::string> specs{"trivial", "standard", "adjoint", "dual-of-adjoint"};
    if (g >= 2) specs.push_back("wedge3");
    for (const auto& spec : specs) {
      const auto m = build_module(grp, spec);
      ++pairs;
      agree += h1_cohomology(grp, m).h1 == h1_bar_oracle(grp, m);
    }
  }
  ok = pairs == agree && pairs >= 12;
  return std::to_string(agree) + "/" + std::to_string(pairs) + " pairs agree";
}

std::string check_phi_igusa(bool& ok) {
  std::size_t failures = 0, kernel_hits = 0, samples = 0;
  for (auto [g, L] : std::vector<std::pair<unsigned, std::uint64_t>>{{2, 2}, {2, 3}, {3, 2}, {3, 6}}) {
    for (std::uint64_t s = 0; s < 1000; ++s) {
      const auto a = sample_congruence_element(g, L, 1000 * L + s, 1 + s % 5);
      const auto b = sample_congruence_element(g, L, 7'000'000 + 1000 * L + s, 1 + (s / 5) % 5);
      const auto ab = a * b;
      ++samples;
      if (!(phi(ab) == phi(a) + phi(b))) ++failures;
      if (L % 2 == 0) {
        const auto ia = igusa_vector(a), ib = igusa_vector(b), iab = igusa_vector(ab);
        for (std::size_t i = 0; i < ia.size(); ++i)
          if (iab[i] != (ia[i] ^ ib[i])) ++failures;
      }
      // Kernel: phi(M) = 0 exactly when M = I mod L^2; a^L always lies there.
      CongruenceElement power = a;
      for (std::uint64_t t = 1; t < L; ++t) power = power * a;
      for (const CongruenceElement* m : std::array<const CongruenceElement*, 3>{&a, &ab, &power}) {
        const bool zero = phi(*m).is_zero();
        const bool deep = (m->matrix() - ZMatrix::identity(2 * g)).reduce(L * L).is_zero();
        if (zero != deep) ++failures;
        kernel_hits += zero;
      }
    }
  }
  ok = failures == 0 && kernel_hits >= samples;
  return std::to_string(samples) + " pairs, " + std::to_string(failures) + " failures, " +
         std::to_string(kernel_hits) + " kernel elements";
}

std::string check_bcj(bool& ok) {
  std::string detail;
  for (unsigned g = 1; g <= 3; ++g) {
    const auto b3 = dim_Bn(g, 3), b2 = dim_Bn(g, 2);
    const std::uint64_t expected = 1 + 2 * g + binom(2 * g, 2) + binom(2 * g, 3);
    ok = ok && b3.evaluation_rank == expected && b3.evaluation_rank - b2.evaluation_rank == binom(2 * g, 3);
    const auto orbits = orbit_arf_classification(g);
    ok = ok && orbits.orbits_are_arf_fibers && orbits.orbits.size() == 2;
    detail += "g=" + std::to_string(g) + " rank(B_3)=" + std::to_string(b3.evaluation_rank) + " ";
  }
  std::size_t arf0 = 0;
  for (const auto& f : all_forms(2)) arf0 += arf(f) == 0;
  ok = ok && arf0 == 10;
  return detail + "arf0(g=2)=" + std::to_string(arf0);
}

std::string check_cache_integrity(bool& ok, const std::filesystem::path& cache_dir) {
  const auto dir = cache_dir / "verify-integrity";
  std::filesystem::create_directories(dir);
  EnumerationOptions opt;
  opt.cache_dir = dir;
  const auto fresh = enumerate(GeneratedGroup::symplectic(1, 5), opt);
  const auto file = cache_file_path(fresh, dir);
  const auto reread = enumerate(GeneratedGroup::symplectic(1, 5), opt);
  {
    std::fstream f(file, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.put('X');
  }
  const auto recomputed = enumerate(GeneratedGroup::symplectic(1, 5), opt);
  ok = reread.cayley().loaded_from_cache() && !recomputed.cayley().loaded_from_cache() &&
       recomputed.cayley().order() == 120;
  std::filesystem::remove_all(dir);
  return ok ? "corrupted cache rejected and recomputed" : "cache integrity contract violated";
}

}  // namespace

std::vector<CheckResult> run_verify_suite(const std::string& suite, const std::filesystem::path& cache_dir) {
  const bool full = suite == "full";
  if (!full && suite != "quick") throw InvalidArgument("suite must be quick or full");
  std::vector<CheckResult> out;

  out.push_back(run_check("order_formula", "BFS enumeration order equals the closed product formula for |Sp_2g(Z/L)|",
                          [](bool& ok) {
                            return check_orders(ok, {{1, 2}, {1, 3}, {1, 4}, {1, 5}, {1, 7}, {1, 9}, {2, 2}});
                          }));
  out.push_back(run_check("crt_membership", "Sp_2g(Z/6) -> Sp_2g(Z/2) x Sp_2g(Z/3) is a bijection", [](bool& ok) {
    const auto g6 = enumerate(GeneratedGroup::symplectic(1, 6));
    const auto g2 = enumerate(GeneratedGroup::symplectic(1, 2));
    const auto g3 = enumerate(GeneratedGroup::symplectic(1, 3));
    std::size_t failures = 0;
    std::mt19937_64 rng(6);
    for (int t = 0; t < 10000; ++t) {
      const ModMatrix x = g6.cayley().element(rng() % g6.cayley().order());
      failures += !g2.cayley().index_of(x.reduce(2)) || !g3.cayley().index_of(x.reduce(3));
    }
    ok = failures == 0 && g6.cayley().order() == g2.cayley().order() * g3.cayley().order();
    return std::to_string(failures) + " failures in 10000 samples";
  }));
  out.push_back(run_check("engine_vs_bar_complex", "tree-propagation H^1 equals bar-complex H^1 on small groups",
                          check_engine_oracle));
  out.push_back(run_check("pollatsek_g2", "H^1(Sp_4(Z/2); H_1(Sigma_2; Z/2)) = Z/2", [](bool& ok) {
    const auto grp = enumerate(GeneratedGroup::symplectic(2, 2));
    const auto h = h1_cohomology(grp, standard_module(grp)).h1;
    ok = h == AbelianGroupStructure::elementary(2, 1);
    return h.to_string();
  }));
  out.push_back(run_check("trace_form", "Trace(xy) is nondegenerate on sp_2g(Z/p), p odd", [](bool& ok) {
    for (unsigned g = 1; g <= 4; ++g)
      for (std::uint64_t p : {3u, 5u, 7u}) {
        const ModMatrix gram = trace_form_gram(g, p);
        ok = ok && determinant_mod_prime(gram) != 0;
        for (std::size_t i = 0; i < g; ++i)
          for (std::size_t j = 0; j < g; ++j) ok = ok && gram(i * g + j, j * g + i) == 2;
      }
    return std::string("g in 1..4, p in {3,5,7}");
  }));
  out.push_back(run_check("nonsplit_lifts", "lifts of I + E_{1,g+1} to Z/p^{k+1} have order > p^k", [](bool& ok) {
    std::string detail;
    for (auto [p, k] : std::vector<std::pair<std::uint64_t, unsigned>>{{5, 1}, {3, 2}, {2, 2}}) {
      const auto rep = nonsplit_witness(p, k, 2, 100, 42 + p);
      ok = ok && rep.all_exceed() && rep.trials.size() == 100;
      detail += "(" + std::to_string(p) + "," + std::to_string(k) + ") ";
    }
    return detail + "100 trials each";
  }));
  out.push_back(run_check("integral_coinvariants", "(wedge^3 Z^6) coinvariants under Sp_6(Z, L) are (Z/L)^20",
                          [](bool& ok) {
                            std::string detail;
                            for (std::uint64_t L : {2u, 3u, 6u}) {
                              const auto r = integral_coinvariants_wedge3(3, L, 8, L);
                              ok = ok && r.structure == AbelianGroupStructure::elementary(static_cast<unsigned long>(L), 20);
                              detail += r.structure.to_string() + " ";
                            }
                            return detail;
                          }));
  out.push_back(run_check("bcj_algebra", "B_3(2g) evaluates injectively; Sp_2g(Z/2) orbits on forms are the Arf fibers",
                          check_bcj));
  out.push_back(run_check("phi_igusa", "phi and the Igusa map are homomorphisms; ker phi is the level-L^2 subgroup",
                          check_phi_igusa));
  out.push_back(run_check("cache_integrity", "a corrupted Cayley cache file is rejected and recomputed",
                          [&](bool& ok) { return check_cache_integrity(ok, cache_dir); }));

  if (full) {
    EnumerationOptions opt;
    opt.cache_dir = cache_dir;
    auto sp6 = std::make_shared<GeneratedGroup>(GeneratedGroup::symplectic(3, 2));
    out.push_back(run_check("sp6_adjoint_homology", "H_1(Sp_6(Z/2); sp_6(Z/2)) = 0", [&](bool& ok) {
      *sp6 = enumerate(*sp6, opt);
      const auto h = h1_homology(*sp6, adjoint_module(*sp6));
      ok = h.is_trivial();
      return h.to_string();
    }));
    out.push_back(run_check("sp6_adjoint_cohomology", "H^1(Sp_6(Z/2); sp_6(Z/2)) = Z/2", [&](bool& ok) {
      if (!sp6->has_cayley()) *sp6 = enumerate(*sp6, opt);
      const auto h = h1_cohomology(*sp6, adjoint_module(*sp6)).h1;
      ok = h == AbelianGroupStructure::elementary(2, 1);
      return h.to_string();
    }));
    out.push_back(run_check("sp4_3", "|Sp_4(Z/3)| = 51840 and H^1, H_1 of sp_4(Z/3) have equal order (self-duality)",
                            [&](bool& ok) {
                              const auto grp = enumerate(GeneratedGroup::symplectic(2, 3), opt);
                              const auto ad = adjoint_module(grp);
                              const auto co = h1_cohomology(grp, ad).h1;
                              const auto ho = h1_homology(grp, ad);
                              ok = grp.cayley().order() == 51840 && co.torsion_order() == ho.torsion_order();
                              return "H^1 = " + co.to_string() + ", H_1 = " + ho.to_string();
                            }));
  }
  return out;
}

Json cmd_verify(const std::string& suite, const std::filesystem::path& cache_dir, bool& all_passed) {
  const auto checks = run_verify_suite(suite, cache_dir);
  all_passed = true;
  Json list = Json::array();
  for (const auto& c : checks) {
    all_passed = all_passed && c.passed;
    list.push_back(Json{{"name", c.name}, {"anchor", c.anchor}, {"passed", c.passed}, {"detail", c.detail}});
  }
  return Json{{"command", "verify"}, {"suite", suite}, {"passed", all_passed}, {"checks", list}};
}

}  // namespace spcgt
