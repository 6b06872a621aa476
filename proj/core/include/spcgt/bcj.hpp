#pragma once

// Z/2 quadratic forms refining the intersection pairing on (Z/2)^{2g}, and
// the Boolean polynomial algebra in the class symbols x-bar that maps to
// functions on the set of such forms.
//
// Vectors and monomials are bitmasks over the coordinates
// a_1, ..., a_g, b_1, ..., b_g (bit c is coordinate c), matching omega().

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace spcgt {

/// Largest genus for which the form set is tabulated.
inline constexpr unsigned kMaxFormGenus = 6;

/// i(x, y) = sum_k x_{a_k} y_{b_k} + x_{b_k} y_{a_k} mod 2.
unsigned intersection_pairing(unsigned g, std::uint32_t x, std::uint32_t y);

struct QuadraticForm {
  unsigned g = 0;
  /// Bit c holds f(e_c).
  std::uint32_t basis_values = 0;

  friend bool operator==(const QuadraticForm&, const QuadraticForm&) = default;
};

/// f(x) from f(x + y) = f(x) + f(y) + i(x, y).
unsigned evaluate_form(const QuadraticForm& f, std::uint32_t x);
/// sum_k f(a_k) f(b_k).
unsigned arf(const QuadraticForm& f);

/// All 2^{2g} forms, ordered by basis_values.
std::vector<QuadraticForm> all_forms(unsigned g);

/// (X . f)(x) = f(X^{-1} x) for X in Sp_2g(Z/2), given by its 2g columns as bitmasks.
QuadraticForm transport_form(const QuadraticForm& f, const std::vector<std::uint32_t>& inverse_columns);

struct OrbitReport {
  unsigned g = 0;
  /// Orbits as sorted lists of basis_values, ordered by smallest member.
  std::vector<std::vector<std::uint32_t>> orbits;
  std::vector<unsigned> orbit_arf;
  /// Each orbit has constant Arf invariant and distinct orbits have distinct invariants.
  bool orbits_are_arf_fibers = false;
};

/// Orbits of Sp_2g(Z/2) (via its transvection generators) on the form set; g <= 3.
OrbitReport orbit_arf_classification(unsigned g);

/// Square-free Z/2 polynomial in x-bar_1, ..., x-bar_{2g}; monomials kept in
/// graded lexicographic order without repeats.
class BooleanPoly {
 public:
  BooleanPoly() = default;
  explicit BooleanPoly(unsigned g);
  BooleanPoly(unsigned g, std::vector<std::uint32_t> monomials);

  static BooleanPoly constant(unsigned g, unsigned value);
  static BooleanPoly variable(unsigned g, std::size_t c);

  unsigned genus() const { return g_; }
  const std::vector<std::uint32_t>& monomials() const { return monomials_; }
  bool is_zero() const { return monomials_.empty(); }
  /// -1 for the zero polynomial.
  int degree() const;
  /// "1 + x1 + x2*x3" style, variables numbered from 1.
  std::string to_string() const;

  unsigned evaluate(const QuadraticForm& f) const;

  friend BooleanPoly operator+(const BooleanPoly& p, const BooleanPoly& q);
  friend bool operator==(const BooleanPoly&, const BooleanPoly&) = default;

 private:
  unsigned g_ = 0;
  std::vector<std::uint32_t> monomials_;
};

/// Graded lexicographic comparison of monomial bitmasks.
bool monomial_less(std::uint32_t a, std::uint32_t b);

/// Product in B(2g), reduced with x-bar^2 = x-bar.
BooleanPoly bcj_product(const BooleanPoly& p, const BooleanPoly& q);

/// x-bar for x != 0, expanded in the basis symbols with the pairing correction.
BooleanPoly symbol_of_class(unsigned g, std::uint32_t x);

/// Monomials of degree <= n in graded lexicographic order.
std::vector<std::uint32_t> monomials_up_to(unsigned g, unsigned n);

struct FiltrationRank {
  std::size_t ambient_dim = 0;
  std::size_t evaluation_rank = 0;
  bool injective() const { return ambient_dim == evaluation_rank; }
};

/// B_n(2g): dimension and rank of the evaluation map into functions on all forms.
FiltrationRank dim_Bn(unsigned g, unsigned n);
/// Rank of B_n(2g) restricted to the Arf-0 forms.
std::size_t dim_Bbar(unsigned g, unsigned n);

}  // namespace spcgt
