#pragma once

// Twisted first (co)homology of enumerated groups.
//
// A 1-cocycle f : G -> M (f(uv) = u f(v) + f(u)) is determined by its values
// on the generators, so Z^1 and B^1 live in M^{#generators}.  The engine
// pushes a symbolic cocycle down the BFS spanning tree and turns every
// non-tree Cayley edge into linear constraints on the generator values.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "spcgt/linalg.hpp"
#include "spcgt/modules.hpp"
#include "spcgt/symplectic.hpp"

namespace spcgt {

struct CocycleSpace {
  std::string module_label;
  std::uint64_t modulus = 0;
  std::size_t generator_count = 0;
  std::size_t module_dim = 0;
  /// Generators of Z^1 and B^1 as vectors (f(s_0), ..., f(s_{m-1})).
  std::vector<ModVector> z1_generators;
  std::vector<ModVector> b1_generators;
  AbelianGroupStructure z1;
  AbelianGroupStructure b1;
  AbelianGroupStructure h1;
};

/// H^1(G; M) by tree propagation.  Composite moduli are split by CRT.
CocycleSpace h1_cohomology(const GeneratedGroup& group, const LinearModule& module);

/// H_1(G; M), computed as the Pontryagin dual of H^1(G; M*).
AbelianGroupStructure h1_homology(const GeneratedGroup& group, const LinearModule& module);

/// Independent H^1 from the full bar complex: unknowns f(g) for every g,
/// one equation block g f(h) - f(gh) + f(g) = 0 per ordered pair.
AbelianGroupStructure h1_bar_oracle(const GeneratedGroup& group, const LinearModule& module,
                                    std::size_t order_cap = 10'000);

/// Generators of M^G.
std::vector<ModVector> invariants(const LinearModule& module);
AbelianGroupStructure invariants_structure(const LinearModule& module);

/// M_G = M / <s m - m>.
AbelianGroupStructure coinvariants(const LinearModule& module);
/// M / <x m - m : x in elements>, for cross-checks with whole-group samples.
AbelianGroupStructure coinvariants_from_elements(const LinearModule& module, const std::vector<ModMatrix>& elements);

/// Values f(u) for every element u (row-major, dim entries per element) of the
/// cocycle with the given generator values, extended along the spanning tree.
std::vector<Residue> extend_cocycle(const CayleyData& cayley, const LinearModule& module, const ModVector& values);

/// Induced action on the third exterior power over Z.
ZMatrix wedge3_matrix_integral(const ZMatrix& x);

struct Wedge3Coinvariants {
  AbelianGroupStructure structure;
  std::size_t witness_count = 0;
  std::size_t relation_count = 0;
  /// g < 3: the identification with wedge^3 H_L is not claimed there.
  bool below_stable_range = false;
};

/// Coinvariants of wedge^3 Z^{2g} under a witness list of elements of Sp_2g(Z, L):
/// T_v^L for every standard basis vector v plus witness_count random samples.
Wedge3Coinvariants integral_coinvariants_wedge3(unsigned g, std::uint64_t level, std::size_t witness_count,
                                                std::uint64_t seed);

}  // namespace spcgt
