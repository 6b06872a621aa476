#include "spcgt/bcj.hpp"

#include <algorithm>
#include <bit>
#include <map>

#include "spcgt/errors.hpp"
#include "spcgt/symplectic.hpp"

namespace spcgt {

namespace {

void check_genus(unsigned g) {
  if (g < 1 || g > kMaxFormGenus)
    throw InvalidArgument("bcj: genus must be in [1, " + std::to_string(kMaxFormGenus) + "]");
}

std::uint32_t full_mask(unsigned g) { return (std::uint32_t{1} << (2 * g)) - 1; }

void check_vector(unsigned g, std::uint32_t x) {
  if ((x & ~full_mask(g)) != 0) throw InvalidArgument("bcj: vector has bits beyond 2g coordinates");
}

// Rank over Z/2 of rows given as bitsets of equal word length.
std::size_t rank_gf2(std::vector<std::vector<std::uint64_t>> rows) {
  std::size_t rank = 0;
  if (rows.empty()) return 0;
  const std::size_t words = rows[0].size();
  for (std::size_t w = 0; w < words && rank < rows.size(); ++w)
    for (unsigned b = 0; b < 64 && rank < rows.size(); ++b) {
      const std::uint64_t bit = std::uint64_t{1} << b;
      std::size_t pivot = rank;
      while (pivot < rows.size() && !(rows[pivot][w] & bit)) ++pivot;
      if (pivot == rows.size()) continue;
      std::swap(rows[rank], rows[pivot]);
      for (std::size_t r = 0; r < rows.size(); ++r)
        if (r != rank && (rows[r][w] & bit))
          for (std::size_t k = w; k < words; ++k) rows[r][k] ^= rows[rank][k];
      ++rank;
    }
  return rank;
}

std::size_t evaluation_rank(unsigned g, unsigned n, bool arf_zero_only) {
  check_genus(g);
  std::vector<QuadraticForm> forms;
  for (const auto& f : all_forms(g))
    if (!arf_zero_only || arf(f) == 0) forms.push_back(f);
  const std::size_t words = (forms.size() + 63) / 64;
  std::vector<std::vector<std::uint64_t>> rows;
  for (std::uint32_t mono : monomials_up_to(g, n)) {
    std::vector<std::uint64_t> row(words, 0);
    for (std::size_t i = 0; i < forms.size(); ++i)
      if ((forms[i].basis_values & mono) == mono) row[i / 64] |= std::uint64_t{1} << (i % 64);
    rows.push_back(std::move(row));
  }
  return rank_gf2(std::move(rows));
}

}  // namespace

unsigned intersection_pairing(unsigned g, std::uint32_t x, std::uint32_t y) {
  const std::uint32_t low = (std::uint32_t{1} << g) - 1;
  const std::uint32_t xa = x & low, xb = (x >> g) & low, ya = y & low, yb = (y >> g) & low;
  return static_cast<unsigned>(std::popcount((xa & yb) ^ (xb & ya)) & 1);
}

unsigned evaluate_form(const QuadraticForm& f, std::uint32_t x) {
  check_vector(f.g, x);
  const std::uint32_t low = (std::uint32_t{1} << f.g) - 1;
  const unsigned linear = static_cast<unsigned>(std::popcount(x & f.basis_values));
  const unsigned cross = static_cast<unsigned>(std::popcount(x & (x >> f.g) & low));
  return (linear + cross) & 1;
}

unsigned arf(const QuadraticForm& f) {
  const std::uint32_t low = (std::uint32_t{1} << f.g) - 1;
  return static_cast<unsigned>(std::popcount(f.basis_values & (f.basis_values >> f.g) & low) & 1);
}

std::vector<QuadraticForm> all_forms(unsigned g) {
  check_genus(g);
  std::vector<QuadraticForm> out;
  for (std::uint32_t v = 0; v <= full_mask(g); ++v) out.push_back({g, v});
  return out;
}

QuadraticForm transport_form(const QuadraticForm& f, const std::vector<std::uint32_t>& inverse_columns) {
  if (inverse_columns.size() != 2 * f.g) throw InvalidArgument("transport_form: need 2g columns");
  QuadraticForm out{f.g, 0};
  for (std::size_t c = 0; c < inverse_columns.size(); ++c)
    if (evaluate_form(f, inverse_columns[c])) out.basis_values |= std::uint32_t{1} << c;
  return out;
}

OrbitReport orbit_arf_classification(unsigned g) {
  check_genus(g);
  if (g > 3) throw InvalidArgument("orbit_arf_classification: genus must be <= 3");
  std::vector<std::vector<std::uint32_t>> inverse_columns;
  for (const auto& x : symplectic_generators(g, 2)) {
    const ModMatrix inv = inverse_mod(x);
    std::vector<std::uint32_t> cols(2 * g, 0);
    for (std::size_t c = 0; c < 2 * g; ++c)
      for (std::size_t r = 0; r < 2 * g; ++r)
        if (inv(r, c)) cols[c] |= std::uint32_t{1} << r;
    inverse_columns.push_back(std::move(cols));
  }
  const std::size_t count = std::size_t{1} << (2 * g);
  std::vector<int> orbit_of(count, -1);
  OrbitReport report;
  report.g = g;
  for (std::uint32_t start = 0; start < count; ++start) {
    if (orbit_of[start] >= 0) continue;
    const int id = static_cast<int>(report.orbits.size());
    std::vector<std::uint32_t> members{start};
    orbit_of[start] = id;
    for (std::size_t i = 0; i < members.size(); ++i)
      for (const auto& cols : inverse_columns) {
        const std::uint32_t next = transport_form({g, members[i]}, cols).basis_values;
        if (orbit_of[next] < 0) {
          orbit_of[next] = id;
          members.push_back(next);
        }
      }
    std::sort(members.begin(), members.end());
    report.orbits.push_back(std::move(members));
  }
  bool ok = true;
  std::map<unsigned, int> arf_owner;
  for (std::size_t o = 0; o < report.orbits.size(); ++o) {
    const unsigned a = arf({g, report.orbits[o][0]});
    report.orbit_arf.push_back(a);
    for (auto v : report.orbits[o]) ok = ok && arf({g, v}) == a;
    ok = ok && arf_owner.emplace(a, static_cast<int>(o)).second;
  }
  report.orbits_are_arf_fibers = ok;
  return report;
}

bool monomial_less(std::uint32_t a, std::uint32_t b) {
  const int da = std::popcount(a), db = std::popcount(b);
  if (da != db) return da < db;
  // Lexicographic on the increasing index lists.
  while (a != b) {
    const int ia = std::countr_zero(a), ib = std::countr_zero(b);
    if (ia != ib) return ia < ib;
    a &= a - 1;
    b &= b - 1;
  }
  return false;
}

BooleanPoly::BooleanPoly(unsigned g) : g_(g) { check_genus(g); }

BooleanPoly::BooleanPoly(unsigned g, std::vector<std::uint32_t> monomials) : g_(g) {
  check_genus(g);
  for (auto m : monomials) check_vector(g, m);
  // Z/2 coefficients: equal monomials cancel in pairs.
  std::sort(monomials.begin(), monomials.end(), monomial_less);
  for (std::size_t i = 0; i < monomials.size();) {
    std::size_t j = i;
    while (j < monomials.size() && monomials[j] == monomials[i]) ++j;
    if ((j - i) % 2 == 1) monomials_.push_back(monomials[i]);
    i = j;
  }
}

BooleanPoly BooleanPoly::constant(unsigned g, unsigned value) {
  return value & 1 ? BooleanPoly(g, {0}) : BooleanPoly(g);
}

BooleanPoly BooleanPoly::variable(unsigned g, std::size_t c) {
  if (c >= 2 * g) throw InvalidArgument("BooleanPoly::variable: index out of range");
  return BooleanPoly(g, {std::uint32_t{1} << c});
}

int BooleanPoly::degree() const { return monomials_.empty() ? -1 : std::popcount(monomials_.back()); }

std::string BooleanPoly::to_string() const {
  if (monomials_.empty()) return "0";
  std::string out;
  for (auto m : monomials_) {
    if (!out.empty()) out += " + ";
    if (m == 0) {
      out += "1";
      continue;
    }
    bool first = true;
    for (std::uint32_t rest = m; rest; rest &= rest - 1) {
      if (!first) out += "*";
      out += "x" + std::to_string(std::countr_zero(rest) + 1);
      first = false;
    }
  }
  return out;
}

unsigned BooleanPoly::evaluate(const QuadraticForm& f) const {
  if (f.g != g_) throw InvalidArgument("BooleanPoly::evaluate: genus mismatch");
  unsigned v = 0;
  for (auto m : monomials_) v ^= (f.basis_values & m) == m ? 1u : 0u;
  return v;
}

BooleanPoly operator+(const BooleanPoly& p, const BooleanPoly& q) {
  if (p.g_ != q.g_) throw InvalidArgument("BooleanPoly: genus mismatch");
  std::vector<std::uint32_t> all = p.monomials_;
  all.insert(all.end(), q.monomials_.begin(), q.monomials_.end());
  return BooleanPoly(p.g_, std::move(all));
}

BooleanPoly bcj_product(const BooleanPoly& p, const BooleanPoly& q) {
  if (p.genus() != q.genus()) throw InvalidArgument("bcj_product: genus mismatch");
  std::vector<std::uint32_t> all;
  all.reserve(p.monomials().size() * q.monomials().size());
  for (auto a : p.monomials())
    for (auto b : q.monomials()) all.push_back(a | b);
  return BooleanPoly(p.genus(), std::move(all));
}

BooleanPoly symbol_of_class(unsigned g, std::uint32_t x) {
  check_genus(g);
  check_vector(g, x);
  if (x == 0) throw InvalidArgument("symbol_of_class: the zero class has no symbol");
  // Peel off one basis vector at a time: bar(e_c + y) = bar(e_c) + bar(y) + i(e_c, y).
  std::vector<std::uint32_t> monomials;
  std::uint32_t rest = x;
  while (rest) {
    const std::uint32_t e = rest & (~rest + 1);
    rest &= rest - 1;
    monomials.push_back(e);
    if (rest && intersection_pairing(g, e, rest)) monomials.push_back(0);
  }
  return BooleanPoly(g, std::move(monomials));
}

std::vector<std::uint32_t> monomials_up_to(unsigned g, unsigned n) {
  check_genus(g);
  std::vector<std::uint32_t> out;
  for (std::uint32_t m = 0; m <= full_mask(g); ++m)
    if (static_cast<unsigned>(std::popcount(m)) <= n) out.push_back(m);
  std::sort(out.begin(), out.end(), monomial_less);
  return out;
}

FiltrationRank dim_Bn(unsigned g, unsigned n) {
  FiltrationRank r;
  r.evaluation_rank = evaluation_rank(g, n, false);
  r.ambient_dim = monomials_up_to(g, n).size();
  return r;
}

std::size_t dim_Bbar(unsigned g, unsigned n) { return evaluation_rank(g, n, true); }

}  // namespace spcgt
