#pragma once

// Symplectic groups over Z/L, their Cayley enumeration, and integral
// congruence elements.
//
// Coordinates are (a_1..a_g, b_1..b_g); Omega_g = [[0, I], [-I, 0]].

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spcgt/linalg.hpp"

namespace spcgt {

ModMatrix omega(unsigned g, std::uint64_t modulus);
ZMatrix omega_integral(unsigned g);

bool is_symplectic(const ModMatrix& x, unsigned g);
bool is_symplectic(const ZMatrix& x, unsigned g);
bool is_lie_element(const ModMatrix& a, unsigned g);

/// Unit matrix E_{r,c} (0-based) of size 2g over Z/L.
ModMatrix elementary(unsigned g, std::uint64_t modulus, std::size_t r, std::size_t c);

/// Transvection x -> x + <x,v> v, i.e. I - v v^t Omega.
ModMatrix transvection(std::span<const std::int64_t> v, std::uint64_t modulus);
ZMatrix integral_transvection_power(std::span<const std::int64_t> v, const Integer& exponent);

/// Transvection vectors used as generators: e_1..e_2g, then a_i + b_j for
/// i, j = 1..g in row-major order.
std::vector<std::vector<std::int64_t>> generator_vectors(unsigned g);
std::vector<ModMatrix> symplectic_generators(unsigned g, std::uint64_t modulus);

/// |Sp_2g(Z/p^k)|.
Integer group_order_formula(unsigned g, std::uint64_t p, unsigned k);
/// |Sp_2g(Z/L)| via the CRT product of group_order_formula.
Integer predicted_order(unsigned g, std::uint64_t modulus);

/// Entrywise reduction of a symplectic matrix to a divisor of its modulus.
ModMatrix reduce_level(const ModMatrix& x, unsigned g, std::uint64_t target);

// ---------------------------------------------------------------------------
// Cayley data

/// Full enumeration of a finite group generated by s_0..s_{n-1}.
///
/// Element 0 is the identity; element i != 0 equals s_{edge(i)} * parent(i).
/// The Cayley table stores left multiplication by each generator.  Every
/// non-tree edge (u, j) yields the relator s_j * word(u) * word(s_j u)^{-1},
/// written with 1-based generator indices and negative entries for inverses.
class CayleyData {
 public:
  static constexpr std::uint32_t kNoParent = 0xFFFFFFFFu;

  std::size_t order() const { return parent_.size(); }
  std::size_t generator_count() const { return ngens_; }
  std::size_t dim() const { return dim_; }
  std::uint64_t modulus() const { return modulus_; }

  std::uint32_t parent(std::size_t i) const { return parent_[i]; }
  std::uint32_t edge_generator(std::size_t i) const { return edge_[i]; }
  /// Index of s_j * element(i).
  std::uint32_t left_multiply(std::size_t i, std::size_t j) const { return table_[i * ngens_ + j]; }
  bool is_tree_edge(std::size_t i, std::size_t j) const;

  ModMatrix element(std::size_t i) const;
  std::optional<std::size_t> index_of(const ModMatrix& x) const;
  /// Index of element(a) * element(b).
  std::size_t multiply(std::size_t a, std::size_t b) const;

  /// Generator indices (0-based) with element(i) = s_{w[0]} s_{w[1]} ... s_{w[m-1]}.
  std::vector<std::uint32_t> word(std::size_t i) const;
  std::size_t depth(std::size_t i) const;

  std::size_t relator_count() const { return relator_count_; }
  /// Visits every relator in (element, generator) order.
  void for_each_relator(const std::function<void(std::span<const int>)>& visit) const;

  /// True when this data was read from the on-disk cache.
  bool loaded_from_cache() const { return from_cache_; }

 private:
  friend class CayleyBuilder;
  friend struct CayleyCacheIo;

  void build_index();
  std::uint64_t hash_of(const std::uint64_t* packed) const;
  void pack(const ModMatrix& x, std::uint64_t* out) const;

  std::size_t dim_ = 0;
  std::uint64_t modulus_ = 0;
  std::size_t ngens_ = 0;
  unsigned bits_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> packed_;
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> edge_;
  std::vector<std::uint32_t> table_;
  std::vector<std::uint32_t> index_;
  std::uint64_t index_mask_ = 0;
  std::size_t relator_count_ = 0;
  bool from_cache_ = false;
};

struct EnumerationOptions {
  std::size_t order_cap = 2'000'000;
  /// Cache directory; nullopt disables the cache.
  std::optional<std::filesystem::path> cache_dir;
};

/// Default cache directory: $SPCGT_CACHE_DIR or ./.spcgt-cache.
std::filesystem::path default_cache_dir();

class GeneratedGroup {
 public:
  GeneratedGroup(unsigned g, std::uint64_t modulus, std::vector<ModMatrix> generators);
  /// The group generated by symplectic_generators(g, L), i.e. Sp_2g(Z/L).
  static GeneratedGroup symplectic(unsigned g, std::uint64_t modulus);

  unsigned genus() const { return g_; }
  std::uint64_t modulus() const { return modulus_; }
  std::size_t dim() const { return 2 * g_; }
  const std::vector<ModMatrix>& generators() const { return generators_; }

  bool has_cayley() const { return cayley_ != nullptr; }
  /// Throws StateError when the group has not been enumerated.
  const CayleyData& cayley() const;

  /// SHA-256 hex of (g, L, canonical generator encodings).
  std::string cache_key() const;

  friend GeneratedGroup enumerate(GeneratedGroup group, const EnumerationOptions& options);

 private:
  unsigned g_;
  std::uint64_t modulus_;
  std::vector<ModMatrix> generators_;
  std::shared_ptr<const CayleyData> cayley_;
};

/// Breadth-first enumeration; throws ResourceLimit when the order exceeds the cap.
GeneratedGroup enumerate(GeneratedGroup group, const EnumerationOptions& options = {});

/// Cache file helpers, exposed for integrity tests.
std::filesystem::path cache_file_path(const GeneratedGroup& group, const std::filesystem::path& dir);
bool write_cayley_cache(const CayleyData& data, const std::filesystem::path& file);
/// nullptr when the file is missing, truncated, or fails its checks.
std::shared_ptr<const CayleyData> read_cayley_cache(const std::filesystem::path& file, std::size_t dim,
                                                    std::uint64_t modulus, std::size_t generator_count);

// ---------------------------------------------------------------------------
// Congruence subgroups Sp_2g(Z, L)

class CongruenceElement {
 public:
  /// Validates M = I mod L and M^t Omega M = Omega over Z.
  CongruenceElement(ZMatrix matrix, std::uint64_t level);

  const ZMatrix& matrix() const { return matrix_; }
  std::uint64_t level() const { return level_; }
  unsigned genus() const { return static_cast<unsigned>(matrix_.rows() / 2); }

  /// Product in Sp_2g(Z, L); both factors must have the same level.
  CongruenceElement operator*(const CongruenceElement& other) const;

 private:
  ZMatrix matrix_;
  std::uint64_t level_;
};

/// A with M = I + L A, reduced mod L.
ModMatrix phi(const CongruenceElement& m);
/// (diag B, diag C) mod 2 for M = I + L [[A, B], [C, D]]; L must be even.
std::vector<std::uint8_t> igusa_vector(const CongruenceElement& m);

/// Random product of word_length factors T_v^{+-L}, v drawn from e_i and e_i + e_j.
CongruenceElement sample_congruence_element(unsigned g, std::uint64_t level, std::uint64_t seed,
                                            std::size_t word_length);

// ---------------------------------------------------------------------------
// Non-split lifts

struct NonsplitTrial {
  ModMatrix lift;               // over Z/p^{k+1}
  std::uint64_t order = 0;      // multiplicative order of the lift
  bool exceeds = false;         // order > p^k
};

struct NonsplitReport {
  std::uint64_t p = 0;
  unsigned k = 0;
  unsigned g = 0;
  std::vector<NonsplitTrial> trials;
  bool all_exceed() const;
};

/// Lifts I + E_{1,g+1} from Sp_2g(Z/p^k) to Sp_2g(Z/p^{k+1}) as (I + E)(I + p^k B) with B random in
/// sp_2g(Z/p) and records each lift's order.  (p, k) in {(2,1), (3,1)} is rejected.
NonsplitReport nonsplit_witness(std::uint64_t p, unsigned k, unsigned g, std::size_t trial_count,
                                std::uint64_t seed);

/// Multiplicative order of an invertible matrix, or 0 if it exceeds the limit.
std::uint64_t matrix_order(const ModMatrix& x, std::uint64_t limit);

}  // namespace spcgt
