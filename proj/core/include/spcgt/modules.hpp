#pragma once

// Linear representations of generated symplectic groups over Z/L.
//
// A LinearModule stores one action matrix per group generator; matrices act
// on column vectors.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spcgt/linalg.hpp"
#include "spcgt/symplectic.hpp"

namespace spcgt {

struct LinearModule {
  std::size_t dim = 0;
  std::uint64_t modulus = 0;
  std::vector<ModMatrix> action;
  std::string label;

  std::size_t generator_count() const { return action.size(); }
};

/// Validates shapes, moduli and invertibility of every action matrix.
LinearModule make_module(std::size_t dim, std::uint64_t modulus, std::vector<ModMatrix> action, std::string label);

/// Action of the group element with the given Cayley index.
ModMatrix element_action(const LinearModule& m, const CayleyData& cayley, std::size_t element);
/// Action of a signed 1-based generator word.
ModMatrix word_action(const LinearModule& m, std::span<const int> word);
/// True when every Cayley relator acts trivially.
bool satisfies_relators(const LinearModule& m, const CayleyData& cayley);

/// Basis of sp_2g: A_{i,j} = E_{i,j} - E_{g+j,g+i} (row-major in i, j), then
/// B_1, B_1', ..., B_g, B_g' with B_i = E_{g+i,i}, B_i' = E_{i,g+i}, then
/// C_{i,j}, C_{i,j}' for i < j with C_{i,j} = E_{g+i,j} + E_{g+j,i} and
/// C_{i,j}' = E_{i,g+j} + E_{j,g+i}.
std::vector<ModMatrix> sp_lie_basis(unsigned g, std::uint64_t modulus);
/// Coordinates in sp_lie_basis; throws InvalidArgument if a is not in sp_2g.
ModVector expand_in_lie_basis(const ModMatrix& a, unsigned g);

LinearModule adjoint_module(const GeneratedGroup& group);
LinearModule standard_module(const GeneratedGroup& group);
LinearModule trivial_module(const GeneratedGroup& group, std::size_t dim);

/// Triples i < j < k in lexicographic order; index into the exterior cube basis.
std::vector<std::array<std::size_t, 3>> wedge3_basis(std::size_t n);
std::size_t wedge3_index(std::size_t n, std::size_t i, std::size_t j, std::size_t k);
/// Induced action on the third exterior power (3x3 minors).
ModMatrix wedge3_matrix(const ModMatrix& x);
LinearModule exterior_cube(const LinearModule& m);

/// C(2g,3) x 2g matrix of h -> h ^ omega with omega = sum a_i ^ b_i.
ModMatrix omega_embedding(unsigned g, std::uint64_t modulus);

struct QuotientModule {
  AbelianGroupStructure structure;
  /// Present when the quotient is free over Z/L.
  std::optional<LinearModule> module;
  /// Quotient map (rows = quotient coordinates), present with module.
  std::optional<ModMatrix> projection;
};

/// M / <generators>; the span must be stable under every generator.
QuotientModule quotient_module(const LinearModule& m, const std::vector<ModVector>& submodule);

/// Contragredient module: s acts by the inverse transpose.
LinearModule dual_module(const LinearModule& m);

/// Entrywise reduction of every action matrix to a divisor of the modulus.
LinearModule reduce_module(const LinearModule& m, std::uint64_t divisor);

/// Gram matrix of (x, y) = Trace(xy) on sp_lie_basis over Z/p, p an odd prime.
ModMatrix trace_form_gram(unsigned g, std::uint64_t p);

/// Determinant over Z/p (p prime).
std::uint64_t determinant_mod_prime(const ModMatrix& m);

}  // namespace spcgt
