#include "spcgt/modules.hpp"

#include <algorithm>

#include "spcgt/errors.hpp"

namespace spcgt {

LinearModule make_module(std::size_t dim, std::uint64_t modulus, std::vector<ModMatrix> action, std::string label) {
  if (modulus < 2 || modulus > kMaxModulus) throw InvalidArgument("module modulus out of range");
  for (const auto& a : action) {
    if (a.rows() != dim || a.cols() != dim || a.modulus() != modulus)
      throw InvalidArgument("module action matrix has the wrong shape or modulus");
    if (dim > 0) inverse_mod(a);
  }
  return LinearModule{dim, modulus, std::move(action), std::move(label)};
}

ModMatrix element_action(const LinearModule& m, const CayleyData& cayley, std::size_t element) {
  if (cayley.generator_count() != m.generator_count())
    throw InvalidArgument("module and group have different generator counts");
  ModMatrix r = ModMatrix::identity(m.dim, m.modulus);
  for (auto a : cayley.word(element)) r = r * m.action[a];
  return r;
}

ModMatrix word_action(const LinearModule& m, std::span<const int> word) {
  ModMatrix r = ModMatrix::identity(m.dim, m.modulus);
  std::vector<std::optional<ModMatrix>> inverses(m.action.size());
  for (int x : word) {
    const auto j = static_cast<std::size_t>(std::abs(x) - 1);
    if (x == 0 || j >= m.action.size()) throw InvalidArgument("word_action: generator index out of range");
    if (x > 0) {
      r = r * m.action[j];
    } else {
      if (!inverses[j]) inverses[j] = inverse_mod(m.action[j]);
      r = r * *inverses[j];
    }
  }
  return r;
}

bool satisfies_relators(const LinearModule& m, const CayleyData& cayley) {
  if (cayley.generator_count() != m.generator_count()) return false;
  if (m.dim == 0) return true;
  bool ok = true;
  cayley.for_each_relator([&](std::span<const int> rel) {
    if (ok && !word_action(m, rel).is_identity()) ok = false;
  });
  return ok;
}

// ---------------------------------------------------------------------------
// sp_2g

std::vector<ModMatrix> sp_lie_basis(unsigned g, std::uint64_t modulus) {
  if (g < 1) throw InvalidArgument("sp_lie_basis: genus must be >= 1");
  std::vector<ModMatrix> basis;
  const std::size_t n = 2 * g;
  auto unit = [&](std::initializer_list<std::tuple<std::size_t, std::size_t, std::int64_t>> entries) {
    ModMatrix m(n, n, modulus);
    for (auto [r, c, v] : entries) m.set(r, c, static_cast<std::int64_t>(m(r, c)) + v);
    return m;
  };
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) basis.push_back(unit({{i, j, 1}, {g + j, g + i, -1}}));
  for (std::size_t i = 0; i < g; ++i) {
    basis.push_back(unit({{g + i, i, 1}}));
    basis.push_back(unit({{i, g + i, 1}}));
  }
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = i + 1; j < g; ++j) {
      basis.push_back(unit({{g + i, j, 1}, {g + j, i, 1}}));
      basis.push_back(unit({{i, g + j, 1}, {j, g + i, 1}}));
    }
  return basis;
}

ModVector expand_in_lie_basis(const ModMatrix& a, unsigned g) {
  if (a.rows() != 2 * g || a.cols() != 2 * g) throw InvalidArgument("expand_in_lie_basis: dimension mismatch");
  ModVector coords;
  coords.reserve(2 * g * g + g);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) coords.push_back(a(i, j));
  for (std::size_t i = 0; i < g; ++i) {
    coords.push_back(a(g + i, i));
    coords.push_back(a(i, g + i));
  }
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = i + 1; j < g; ++j) {
      coords.push_back(a(g + i, j));
      coords.push_back(a(i, g + j));
    }
  // Reconstruct and compare: this rejects matrices outside sp_2g.
  const auto basis = sp_lie_basis(g, a.modulus());
  ModMatrix r(2 * g, 2 * g, a.modulus());
  for (std::size_t k = 0; k < basis.size(); ++k)
    if (coords[k] != 0) r = r + coords[k] * basis[k];
  if (!(r == a)) throw InvalidArgument("expand_in_lie_basis: matrix is not in sp_2g");
  return coords;
}

namespace {

ModMatrix adjoint_action(const ModMatrix& x, unsigned g, const std::vector<ModMatrix>& basis) {
  const ModMatrix xinv = inverse_mod(x);
  ModMatrix out(basis.size(), basis.size(), x.modulus());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const ModVector col = expand_in_lie_basis(x * basis[k] * xinv, g);
    for (std::size_t r = 0; r < col.size(); ++r) out.set(r, k, static_cast<std::int64_t>(col[r]));
  }
  return out;
}

}  // namespace

LinearModule adjoint_module(const GeneratedGroup& group) {
  const unsigned g = group.genus();
  const auto basis = sp_lie_basis(g, group.modulus());
  std::vector<ModMatrix> action;
  for (const auto& x : group.generators()) action.push_back(adjoint_action(x, g, basis));
  return make_module(basis.size(), group.modulus(), std::move(action),
                     "sp_" + std::to_string(2 * g) + "(Z/" + std::to_string(group.modulus()) + ")");
}

LinearModule standard_module(const GeneratedGroup& group) {
  return make_module(group.dim(), group.modulus(), group.generators(),
                     "H_1(Sigma_" + std::to_string(group.genus()) + ";Z/" + std::to_string(group.modulus()) + ")");
}

LinearModule trivial_module(const GeneratedGroup& group, std::size_t dim) {
  std::vector<ModMatrix> action(group.generators().size(), ModMatrix::identity(dim, group.modulus()));
  return make_module(dim, group.modulus(), std::move(action), "trivial^" + std::to_string(dim));
}

// ---------------------------------------------------------------------------
// Exterior cube

std::vector<std::array<std::size_t, 3>> wedge3_basis(std::size_t n) {
  std::vector<std::array<std::size_t, 3>> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) out.push_back({i, j, k});
  return out;
}

std::size_t wedge3_index(std::size_t n, std::size_t i, std::size_t j, std::size_t k) {
  // Count triples preceding (i, j, k) in lexicographic order.
  auto c2 = [](std::size_t m) { return m < 2 ? 0 : m * (m - 1) / 2; };
  std::size_t idx = 0;
  for (std::size_t a = 0; a < i; ++a) idx += c2(n - a - 1);
  for (std::size_t b = i + 1; b < j; ++b) idx += n - b - 1;
  return idx + (k - j - 1);
}

ModMatrix wedge3_matrix(const ModMatrix& x) {
  if (x.rows() != x.cols()) throw InvalidArgument("wedge3_matrix: matrix must be square");
  const std::size_t n = x.rows();
  const auto basis = wedge3_basis(n);
  const std::uint64_t L = x.modulus();
  ModMatrix out(basis.size(), basis.size(), L);
  for (std::size_t c = 0; c < basis.size(); ++c) {
    const auto& col = basis[c];
    for (std::size_t r = 0; r < basis.size(); ++r) {
      const auto& row = basis[r];
      auto e = [&](std::size_t a, std::size_t b) -> std::int64_t { return x(row[a], col[b]); };
      // 3x3 minor, reduced after each product to stay within 64 bits.
      auto m = [&](std::int64_t a, std::int64_t b, std::int64_t cc) {
        return static_cast<std::int64_t>((static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b) % L) *
                                         static_cast<std::uint64_t>(cc) % L);
      };
      std::int64_t det = m(e(0, 0), e(1, 1), e(2, 2)) + m(e(0, 1), e(1, 2), e(2, 0)) + m(e(0, 2), e(1, 0), e(2, 1)) -
                         m(e(0, 2), e(1, 1), e(2, 0)) - m(e(0, 0), e(1, 2), e(2, 1)) - m(e(0, 1), e(1, 0), e(2, 2));
      out.set(r, c, det);
    }
  }
  return out;
}

LinearModule exterior_cube(const LinearModule& m) {
  if (m.dim % 2 != 0) throw InvalidArgument("exterior_cube: module dimension must be even");
  std::vector<ModMatrix> action;
  for (const auto& a : m.action) action.push_back(wedge3_matrix(a));
  const std::size_t d = m.dim < 3 ? 0 : m.dim * (m.dim - 1) * (m.dim - 2) / 6;
  return make_module(d, m.modulus, std::move(action), "wedge3(" + m.label + ")");
}

ModMatrix omega_embedding(unsigned g, std::uint64_t modulus) {
  if (g < 2) throw InvalidArgument("omega_embedding: genus must be >= 2");
  const std::size_t n = 2 * g;
  const std::size_t d = n * (n - 1) * (n - 2) / 6;
  ModMatrix out(d, n, modulus);
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t i = 0; i < g; ++i) {
      if (m == i || m == g + i) continue;
      std::array<std::size_t, 3> t{m, i, g + i};
      int sign = 1;
      // Bubble sort, tracking the permutation sign.
      for (int pass = 0; pass < 2; ++pass)
        for (int q = 0; q < 2; ++q)
          if (t[q] > t[q + 1]) {
            std::swap(t[q], t[q + 1]);
            sign = -sign;
          }
      const std::size_t row = wedge3_index(n, t[0], t[1], t[2]);
      out.set(row, m, static_cast<std::int64_t>(out(row, m)) + sign);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Quotients and duals

QuotientModule quotient_module(const LinearModule& m, const std::vector<ModVector>& submodule) {
  const std::size_t n = m.dim;
  const std::uint64_t L = m.modulus;
  for (const auto& v : submodule)
    if (v.size() != n) throw InvalidArgument("quotient_module: submodule vector has the wrong length");

  // Stability: every s * v must lie in the span.
  ModMatrix span(n, submodule.size(), L);
  for (std::size_t j = 0; j < submodule.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) span.set(i, j, static_cast<std::int64_t>(submodule[j][i]));
  for (const auto& a : m.action)
    for (const auto& v : submodule) {
      const ModVector image = a.apply(v);
      const bool zero = std::all_of(image.begin(), image.end(), [](Residue x) { return x == 0; });
      if (zero) continue;
      if (submodule.empty() || !solution_space_mod(span, image))
        throw InvalidArgument("quotient_module: submodule is not stable under the action");
    }

  ZMatrix lattice(n, submodule.size() + n);
  for (std::size_t j = 0; j < submodule.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) lattice(i, j) = static_cast<unsigned long>(submodule[j][i]);
  for (std::size_t i = 0; i < n; ++i) lattice(i, submodule.size() + i) = static_cast<unsigned long>(L);
  const SmithForm snf = smith_normal_form(lattice);

  QuotientModule out;
  std::vector<Integer> orders;
  std::vector<std::size_t> kept;
  bool free = true;
  for (std::size_t i = 0; i < n; ++i) {
    const Integer& d = snf.diagonal(i, i);
    orders.push_back(d);
    if (d == static_cast<unsigned long>(L)) {
      kept.push_back(i);
    } else if (d != 1) {
      free = false;
    }
  }
  out.structure = AbelianGroupStructure::from_cyclic_orders(orders);
  if (!free) return out;

  // Quotient coordinates are rows `kept` of U; lifts are the matching columns of U^{-1}.
  const ModMatrix u = snf.left.reduce(L);
  const ModMatrix uinv = inverse_mod(u);
  ModMatrix proj(kept.size(), n, L), lift(n, kept.size(), L);
  for (std::size_t r = 0; r < kept.size(); ++r)
    for (std::size_t c = 0; c < n; ++c) {
      proj.set(r, c, static_cast<std::int64_t>(u(kept[r], c)));
      lift.set(c, r, static_cast<std::int64_t>(uinv(c, kept[r])));
    }
  std::vector<ModMatrix> action;
  for (const auto& a : m.action) action.push_back(proj * a * lift);
  out.module = make_module(kept.size(), L, std::move(action), "(" + m.label + ")/sub");
  out.projection = proj;
  return out;
}

LinearModule dual_module(const LinearModule& m) {
  std::vector<ModMatrix> action;
  for (const auto& a : m.action) action.push_back(m.dim == 0 ? a : inverse_mod(a).transpose());
  return make_module(m.dim, m.modulus, std::move(action), "dual(" + m.label + ")");
}

LinearModule reduce_module(const LinearModule& m, std::uint64_t divisor) {
  std::vector<ModMatrix> action;
  for (const auto& a : m.action) action.push_back(a.reduce(divisor));
  return make_module(m.dim, divisor, std::move(action), m.label + " mod " + std::to_string(divisor));
}

// ---------------------------------------------------------------------------
// Trace form

ModMatrix trace_form_gram(unsigned g, std::uint64_t p) {
  if (!is_prime(p) || p == 2) throw InvalidArgument("trace_form_gram: p must be an odd prime");
  const auto basis = sp_lie_basis(g, p);
  ModMatrix gram(basis.size(), basis.size(), p);
  for (std::size_t a = 0; a < basis.size(); ++a)
    for (std::size_t b = 0; b < basis.size(); ++b) {
      const ModMatrix prod = basis[a] * basis[b];
      std::uint64_t tr = 0;
      for (std::size_t i = 0; i < prod.rows(); ++i) tr += prod(i, i);
      gram.set(a, b, static_cast<std::int64_t>(tr % p));
    }
  return gram;
}

std::uint64_t determinant_mod_prime(const ModMatrix& m) {
  if (m.rows() != m.cols()) throw InvalidArgument("determinant: matrix must be square");
  const std::uint64_t p = m.modulus();
  if (!is_prime(p)) throw InvalidArgument("determinant: modulus must be prime");
  const PrimePowerRing ring(p, 1);
  const std::size_t n = m.rows();
  std::vector<std::uint64_t> a(m.entries().begin(), m.entries().end());
  std::uint64_t det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a[piv * n + c] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[c * n + j], a[piv * n + j]);
      det = ring.neg(det);
    }
    det = ring.mul(det, a[c * n + c]);
    const std::uint64_t inv = ring.unit_inverse(a[c * n + c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const std::uint64_t f = ring.mul(a[r * n + c], inv);
      if (f == 0) continue;
      for (std::size_t j = c; j < n; ++j) a[r * n + j] = ring.sub(a[r * n + j], ring.mul(f, a[c * n + j]));
    }
  }
  return det;
}

}  // namespace spcgt
