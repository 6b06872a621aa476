#pragma once

// Exact integer and modular linear algebra.
//
// Two dense matrix carriers are used: ZMatrix holds arbitrary-precision
// integers (modulus 0), ModMatrix holds residues in [0, L) for a modulus
// 1 < L < 2^31.  Everything here is a pure function of its inputs.

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spcgt {

using Integer = mpz_class;
using Residue = std::uint32_t;
using ModVector = std::vector<Residue>;

/// Largest modulus accepted by ModMatrix; products of two residues fit in 64 bits.
inline constexpr std::uint64_t kMaxModulus = (std::uint64_t{1} << 31) - 1;

class ModMatrix;

/// Dense integral matrix, row-major.
class ZMatrix {
 public:
  ZMatrix() = default;
  ZMatrix(std::size_t rows, std::size_t cols);

  static ZMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Integer& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Integer& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  ZMatrix transpose() const;
  bool is_zero() const;
  bool is_identity() const;

  /// Entrywise reduction into [0, modulus).
  ModMatrix reduce(std::uint64_t modulus) const;

  friend ZMatrix operator*(const ZMatrix& a, const ZMatrix& b);
  friend ZMatrix operator+(const ZMatrix& a, const ZMatrix& b);
  friend ZMatrix operator-(const ZMatrix& a, const ZMatrix& b);
  friend ZMatrix operator*(const Integer& s, const ZMatrix& a);
  friend bool operator==(const ZMatrix& a, const ZMatrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Integer> data_;
};

/// Dense matrix over Z/L, entries kept reduced in [0, L).
class ModMatrix {
 public:
  ModMatrix() = default;
  ModMatrix(std::size_t rows, std::size_t cols, std::uint64_t modulus);

  static ModMatrix identity(std::size_t n, std::uint64_t modulus);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint64_t modulus() const { return modulus_; }

  Residue operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  /// Stores value mod L; negative values are accepted.
  void set(std::size_t r, std::size_t c, std::int64_t value);
  void set(std::size_t r, std::size_t c, const Integer& value);

  std::span<const Residue> entries() const { return data_; }
  std::span<const Residue> row(std::size_t r) const {
    return std::span<const Residue>(data_).subspan(r * cols_, cols_);
  }

  ModMatrix transpose() const;
  bool is_zero() const;
  bool is_identity() const;

  /// Reduction to a divisor of the modulus.
  ModMatrix reduce(std::uint64_t divisor) const;
  /// Representatives in [0, L) as an integral matrix.
  ZMatrix lift() const;

  ModVector apply(std::span<const Residue> v) const;

  friend ModMatrix operator*(const ModMatrix& a, const ModMatrix& b);
  friend ModMatrix operator+(const ModMatrix& a, const ModMatrix& b);
  friend ModMatrix operator-(const ModMatrix& a, const ModMatrix& b);
  friend ModMatrix operator*(std::uint64_t s, const ModMatrix& a);
  friend bool operator==(const ModMatrix& a, const ModMatrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::uint64_t modulus_ = 0;
  std::vector<Residue> data_;
};

/// Finite-rank abelian group Z^free_rank (+) Z/d_1 (+) ... (+) Z/d_k with d_i | d_{i+1}, d_i >= 2.
struct AbelianGroupStructure {
  std::vector<Integer> invariant_factors;
  std::size_t free_rank = 0;

  bool is_trivial() const { return invariant_factors.empty() && free_rank == 0; }
  bool is_finite() const { return free_rank == 0; }
  /// Order of the torsion part (1 for the trivial group).
  Integer torsion_order() const;
  /// "0", "Z^2 + Z/2 + Z/6", "(Z/3)^55" style rendering.
  std::string to_string() const;

  /// Normalizes an arbitrary list of cyclic orders (0 = infinite cyclic, 1 = trivial).
  static AbelianGroupStructure from_cyclic_orders(const std::vector<Integer>& orders);
  static AbelianGroupStructure elementary(const Integer& order, std::size_t count);
  static AbelianGroupStructure direct_sum(const AbelianGroupStructure& a, const AbelianGroupStructure& b);

  friend bool operator==(const AbelianGroupStructure&, const AbelianGroupStructure&) = default;
};

struct SmithForm {
  ZMatrix diagonal;  // D
  ZMatrix left;      // U
  ZMatrix right;     // V, with U * M * V = D
};

/// Smith normal form with minimal-absolute-value pivoting.  Total on integral matrices.
SmithForm smith_normal_form(const ZMatrix& m);

/// Invariant factors only (no transforms); same pivoting as smith_normal_form.
std::vector<Integer> smith_diagonal(ZMatrix m);

/// Structure of Z^n / <relations>.
AbelianGroupStructure abelian_quotient(std::size_t n, const std::vector<std::vector<Integer>>& relations);

struct PrimePower {
  std::uint64_t p = 0;
  unsigned k = 0;
  std::uint64_t value() const;
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// L = prod p_i^k_i with p_i increasing.  Throws InvalidArgument for L < 2.
std::vector<PrimePower> crt_split(std::uint64_t modulus);
bool is_prime(std::uint64_t n);

/// x with x = residues[i] mod moduli[i] (pairwise coprime moduli).
std::uint64_t crt_combine(std::span<const std::uint64_t> residues, std::span<const std::uint64_t> moduli);

struct AffineSolution {
  ModVector particular;
  std::vector<ModVector> kernel;  // generates {x : A x = 0} as a Z/L-module
};

/// Solves A x = b over Z/L by splitting L into prime powers.  Inconsistent systems give nullopt.
std::optional<AffineSolution> solution_space_mod(const ModMatrix& a, std::span<const Residue> b);

/// Generators of {x : A x = 0 mod L}.
std::vector<ModVector> kernel_mod(const ModMatrix& a);

/// Inverse over Z/L; throws InvalidArgument if the matrix is singular.
ModMatrix inverse_mod(const ModMatrix& a);

/// Structure of the Z/L-submodule of (Z/L)^n generated by the given vectors.
AbelianGroupStructure submodule_structure(const std::vector<ModVector>& generators, std::size_t n,
                                          std::uint64_t modulus);

/// Structure of <numerators> / <denominators> inside (Z/L)^n; requires the
/// denominator span to lie inside the numerator span.
AbelianGroupStructure relative_quotient(const std::vector<ModVector>& numerators,
                                        const std::vector<ModVector>& denominators, std::size_t n,
                                        std::uint64_t modulus);

/// Row-major bytes, each entry little-endian with width = minimal bytes for L-1.
std::vector<std::uint8_t> canonical_encoding(const ModMatrix& m);
std::size_t canonical_entry_width(std::uint64_t modulus);

// ---------------------------------------------------------------------------
// Arithmetic in Z/p^k.

class PrimePowerRing {
 public:
  PrimePowerRing(std::uint64_t p, unsigned k);

  std::uint64_t p() const { return p_; }
  unsigned k() const { return k_; }
  std::uint64_t modulus() const { return q_; }
  std::uint64_t power(unsigned e) const { return powers_[e]; }

  /// p-adic valuation of a residue; k for zero.
  unsigned valuation(std::uint64_t x) const;
  std::uint64_t unit_inverse(std::uint64_t unit) const;
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const { return (a * b) % q_; }
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const { return (a + b) % q_; }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return (a + q_ - b) % q_; }
  std::uint64_t neg(std::uint64_t a) const { return a == 0 ? 0 : q_ - a; }

 private:
  std::uint64_t p_;
  unsigned k_;
  std::uint64_t q_;
  std::vector<std::uint64_t> powers_;
};

/// Incremental canonical echelon form of a row module over Z/p^k.
///
/// Rows are kept in Howell form: pivots are normalized to powers of p,
/// entries in unit-pivot columns are zero in every other row, entries in a
/// column with pivot p^a are reduced into [0, p^a) in every other row, and
/// the module is closed under the annihilator multiples p^(k-a) * row.
/// The resulting set of rows depends only on the row module, not on the
/// insertion order.
class PrimePowerEchelon {
 public:
  PrimePowerEchelon(std::uint64_t p, unsigned k, std::size_t width);

  std::size_t width() const { return width_; }
  const PrimePowerRing& ring() const { return ring_; }
  /// Number of pivot rows.
  std::size_t size() const { return rows_.size(); }
  /// Composition length: log_p of the order of the row module.
  std::size_t length() const;

  /// Inserts a dense row; returns true if the row module grew.
  bool insert(std::span<const Residue> row);
  /// Inserts a row given as sorted (column, value) pairs with nonzero values.
  bool insert_sparse(std::span<const std::uint32_t> cols, std::span<const Residue> vals);

  /// Generators of {x : r . x = 0 for every row r}.
  std::vector<ModVector> kernel() const;

  /// Pivot rows in increasing pivot order, densified.
  std::vector<ModVector> dense_rows() const;
  std::vector<std::size_t> pivot_columns() const;

 private:
  struct Row {
    std::vector<std::uint32_t> cols;  // sorted; cols[0] is the pivot
    std::vector<Residue> vals;
    unsigned pivot_valuation = 0;
  };

  void load(std::span<const std::uint32_t> cols, std::span<const Residue> vals);
  void clear_accumulator();
  void subtract_row(std::uint64_t factor, const Row& row, std::uint32_t above);
  void reduce_tail(std::uint32_t start);
  Row extract_row(std::uint32_t pivot_col);
  bool process_pending();

  PrimePowerRing ring_;
  std::size_t width_;
  std::vector<Row> rows_;
  std::vector<std::int32_t> pivot_row_;  // column -> row index, -1 if none
  std::vector<std::uint64_t> acc_;
  std::vector<std::uint8_t> touched_flag_;
  std::vector<std::uint32_t> touched_;
  std::vector<std::uint32_t> heap_;
  std::vector<Row> pending_;
};

/// Kernel generators of a small dense matrix over Z/p^k via Smith reduction.
std::vector<ModVector> local_smith_kernel(const PrimePowerRing& ring, std::size_t rows, std::size_t cols,
                                          std::vector<std::uint64_t> data);

}  // namespace spcgt
