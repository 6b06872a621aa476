#include "spcgt/cohomology.hpp"

#include <algorithm>
#include <array>
#include <optional>

#include "spcgt/errors.hpp"

namespace spcgt {

namespace {

struct SparseAction {
  std::vector<std::uint32_t> row;
  std::vector<std::uint32_t> col;
  std::vector<std::uint64_t> val;
};

SparseAction sparse_of(const ModMatrix& a) {
  SparseAction s;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c)
      if (a(r, c) != 0) {
        s.row.push_back(static_cast<std::uint32_t>(r));
        s.col.push_back(static_cast<std::uint32_t>(c));
        s.val.push_back(a(r, c));
      }
  return s;
}

void check_compatible(const GeneratedGroup& group, const LinearModule& module) {
  if (module.generator_count() != group.generators().size())
    throw InvalidArgument("cohomology: module and group have different generator counts");
  if (group.modulus() % module.modulus != 0)
    throw InvalidArgument("cohomology: module modulus must divide the group level");
}

// Principal derivations d(v)_j = (s_j - 1) v, one generator per basis vector of M.
std::vector<ModVector> coboundary_generators(const LinearModule& m) {
  const std::size_t d = m.dim, ng = m.generator_count();
  const std::uint64_t q = m.modulus;
  std::vector<ModVector> out;
  for (std::size_t i = 0; i < d; ++i) {
    ModVector v(ng * d, 0);
    for (std::size_t j = 0; j < ng; ++j)
      for (std::size_t a = 0; a < d; ++a)
        v[j * d + a] = static_cast<Residue>((m.action[j](a, i) + q - (a == i ? 1 : 0)) % q);
    out.push_back(std::move(v));
  }
  return out;
}

struct LocalCocycles {
  std::vector<ModVector> z1;
  std::vector<ModVector> b1;
  AbelianGroupStructure z1s;
  AbelianGroupStructure b1s;
  AbelianGroupStructure h1s;
};

// Symbolic cocycle f(u) = F_u y with generator values x = K y.  Tree edges
// define F on children; non-tree edges give constraints on y, which are folded
// into K whenever enough of them have accumulated.
class TreeSolver {
 public:
  TreeSolver(const CayleyData& cayley, const LinearModule& m, PrimePower pp)
      : cayley_(cayley), m_(m), p_(pp.p), k_(pp.k), q_(pp.value()), d_(m.dim), ng_(m.generator_count()) {
    for (const auto& a : m.action) sparse_.push_back(sparse_of(a));
  }

  LocalCocycles solve() {
    const std::size_t n = ng_ * d_;
    LocalCocycles out;
    out.b1 = coboundary_generators(m_);
    std::size_t b1_rank = 0;
    if (k_ == 1) {
      // Start inside a complement of B^1 so the surviving parameters are H^1.
      PrimePowerEchelon e(p_, 1, n);
      for (const auto& v : out.b1) e.insert(v);
      b1_rank = e.size();
      std::vector<std::uint8_t> pivot(n, 0);
      for (auto c : e.pivot_columns()) pivot[c] = 1;
      r_ = n - b1_rank;
      k_mat_.assign(n * r_, 0);
      std::size_t t = 0;
      for (std::size_t c = 0; c < n; ++c)
        if (!pivot[c]) k_mat_[c * r_ + t++] = 1;
    } else {
      r_ = n;
      k_mat_.assign(n * r_, 0);
      for (std::size_t c = 0; c < n; ++c) k_mat_[c * r_ + c] = 1;
    }
    if (r_ > 0 && d_ > 0) propagate();

    std::vector<ModVector> params;
    for (std::size_t t = 0; t < r_; ++t) {
      ModVector v(n);
      for (std::size_t c = 0; c < n; ++c) v[c] = k_mat_[c * r_ + t];
      params.push_back(std::move(v));
    }
    if (k_ == 1) {
      out.b1s = AbelianGroupStructure::elementary(p_, b1_rank);
      out.h1s = AbelianGroupStructure::elementary(p_, r_);
      out.z1s = AbelianGroupStructure::elementary(p_, b1_rank + r_);
      out.z1 = out.b1;
      out.z1.insert(out.z1.end(), params.begin(), params.end());
    } else {
      out.z1 = std::move(params);
      out.b1s = submodule_structure(out.b1, n, q_);
      out.z1s = submodule_structure(out.z1, n, q_);
      out.h1s = relative_quotient(out.z1, out.b1, n, q_);
    }
    return out;
  }

 private:
  void rebuild_gk() {
    gk_.assign(ng_, std::vector<Residue>(d_ * r_));
    for (std::size_t j = 0; j < ng_; ++j)
      for (std::size_t a = 0; a < d_; ++a)
        std::copy_n(&k_mat_[(j * d_ + a) * r_], r_, &gk_[j][a * r_]);
  }

  void propagate() {
    const std::size_t order = cayley_.order();
    rebuild_gk();
    echelon_.emplace(p_, k_, r_);
    f_.assign(d_ * r_, 0);
    std::size_t assigned = 1;
    std::size_t checkpoint = 256;
    std::vector<std::uint64_t> acc;
    std::vector<std::uint32_t> cols;
    std::vector<Residue> vals;

    for (std::size_t u = 0; u < order; ++u) {
      for (std::size_t j = 0; j < ng_; ++j) {
        const std::size_t w = cayley_.left_multiply(u, j);
        const std::size_t block = d_ * r_;
        acc.assign(gk_[j].begin(), gk_[j].end());
        const Residue* fu = &f_[u * block];
        const auto& sp = sparse_[j];
        for (std::size_t z = 0; z < sp.val.size(); ++z) {
          std::uint64_t* dst = &acc[sp.row[z] * r_];
          const Residue* src = fu + sp.col[z] * r_;
          const std::uint64_t v = sp.val[z];
          for (std::size_t t = 0; t < r_; ++t) dst[t] = (dst[t] + v * src[t]) % q_;
        }
        if (cayley_.is_tree_edge(u, j)) {
          if (w != assigned) throw InternalError("cohomology: spanning tree is not in BFS order");
          f_.resize((assigned + 1) * block);
          std::copy(acc.begin(), acc.end(), f_.begin() + static_cast<std::ptrdiff_t>(assigned * block));
          ++assigned;
          continue;
        }
        const Residue* fw = &f_[w * block];
        for (std::size_t a = 0; a < d_; ++a) {
          cols.clear();
          vals.clear();
          for (std::size_t t = 0; t < r_; ++t) {
            const std::uint64_t diff = (acc[a * r_ + t] + q_ - fw[a * r_ + t]) % q_;
            if (diff != 0) {
              cols.push_back(static_cast<std::uint32_t>(t));
              vals.push_back(static_cast<Residue>(diff));
            }
          }
          if (!cols.empty()) echelon_->insert_sparse(cols, vals);
        }
      }
      const bool pending = echelon_->size() > 0;
      if (pending && (echelon_->size() * 4 >= r_ || assigned >= checkpoint || u + 1 == order)) {
        reparametrize(assigned);
        checkpoint = std::max<std::size_t>(2 * assigned, 256);
        if (r_ == 0) return;
      }
    }
  }

  // y = T y' with T spanning the solutions of the accumulated constraints.
  void reparametrize(std::size_t assigned) {
    const auto kernel = echelon_->kernel();
    const std::size_t r2 = kernel.size();
    auto transform = [&](const std::vector<Residue>& src, std::size_t rows) {
      std::vector<Residue> dst(rows * r2, 0);
      for (std::size_t i = 0; i < rows; ++i) {
        const Residue* s = &src[i * r_];
        for (std::size_t t2 = 0; t2 < r2; ++t2) {
          const auto& col = kernel[t2];
          std::uint64_t sum = 0;
          for (std::size_t t = 0; t < r_; ++t) {
            if (s[t] == 0 || col[t] == 0) continue;
            sum = (sum + std::uint64_t{s[t]} * col[t]) % q_;
          }
          dst[i * r2 + t2] = static_cast<Residue>(sum);
        }
      }
      return dst;
    };
    k_mat_ = transform(k_mat_, ng_ * d_);
    f_ = transform(f_, assigned * d_);
    r_ = r2;
    rebuild_gk();
    if (r_ > 0) echelon_.emplace(p_, k_, r_);
  }

  const CayleyData& cayley_;
  const LinearModule& m_;
  std::uint64_t p_;
  unsigned k_;
  std::uint64_t q_;
  std::size_t d_;
  std::size_t ng_;
  std::vector<SparseAction> sparse_;
  std::size_t r_ = 0;
  std::vector<Residue> k_mat_;  // (ng*d) x r, row-major
  std::vector<std::vector<Residue>> gk_;
  std::vector<Residue> f_;  // element-major blocks of d x r
  std::optional<PrimePowerEchelon> echelon_;
};

// Vector over Z/q embedded in Z/L as the CRT lift that vanishes at the other primes.
ModVector crt_embed(const ModVector& v, std::uint64_t q, std::uint64_t L) {
  const std::uint64_t other = L / q;
  // idempotent e = other * (other^{-1} mod q)
  std::uint64_t inv = 1;
  if (q > 1) {
    const Integer o = static_cast<unsigned long>(other % q), qq = static_cast<unsigned long>(q);
    Integer r;
    mpz_invert(r.get_mpz_t(), o.get_mpz_t(), qq.get_mpz_t());
    inv = r.get_ui();
  }
  const std::uint64_t e = (other % L) * inv % L;
  ModVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<Residue>(std::uint64_t{v[i]} * e % L);
  return out;
}

template <typename Local>
CocycleSpace split_by_crt(const LinearModule& module, std::size_t ngens, Local local) {
  CocycleSpace out;
  out.module_label = module.label;
  out.modulus = module.modulus;
  out.generator_count = ngens;
  out.module_dim = module.dim;
  for (const auto& pp : crt_split(module.modulus)) {
    const std::uint64_t q = pp.value();
    const LinearModule part = q == module.modulus ? module : reduce_module(module, q);
    LocalCocycles lc = local(part, pp);
    for (const auto& v : lc.z1) out.z1_generators.push_back(crt_embed(v, q, module.modulus));
    for (const auto& v : lc.b1) out.b1_generators.push_back(crt_embed(v, q, module.modulus));
    out.z1 = AbelianGroupStructure::direct_sum(out.z1, lc.z1s);
    out.b1 = AbelianGroupStructure::direct_sum(out.b1, lc.b1s);
    out.h1 = AbelianGroupStructure::direct_sum(out.h1, lc.h1s);
  }
  return out;
}

}  // namespace

CocycleSpace h1_cohomology(const GeneratedGroup& group, const LinearModule& module) {
  check_compatible(group, module);
  const CayleyData& cayley = group.cayley();
  return split_by_crt(module, module.generator_count(), [&](const LinearModule& part, PrimePower pp) {
    return TreeSolver(cayley, part, pp).solve();
  });
}

AbelianGroupStructure h1_homology(const GeneratedGroup& group, const LinearModule& module) {
  return h1_cohomology(group, dual_module(module)).h1;
}

AbelianGroupStructure h1_bar_oracle(const GeneratedGroup& group, const LinearModule& module,
                                    std::size_t order_cap) {
  check_compatible(group, module);
  const CayleyData& cayley = group.cayley();
  const std::size_t n = cayley.order();
  if (n > order_cap)
    throw ResourceLimit("h1_bar_oracle: group order " + std::to_string(n) + " exceeds the cap " +
                        std::to_string(order_cap));
  const std::size_t d = module.dim, ng = module.generator_count();
  if (d == 0) return {};

  // g * h for all pairs, built from the spanning tree: g = s_e * parent(g).
  std::vector<std::uint32_t> mult(n * n);
  for (std::size_t h = 0; h < n; ++h) mult[h] = static_cast<std::uint32_t>(h);
  for (std::size_t g = 1; g < n; ++g) {
    const std::size_t par = cayley.parent(g), e = cayley.edge_generator(g);
    for (std::size_t h = 0; h < n; ++h) mult[g * n + h] = cayley.left_multiply(mult[par * n + h], e);
  }

  auto local = [&](const LinearModule& part, PrimePower pp) {
    const std::uint64_t q = pp.value();
    std::vector<ModMatrix> rho(n);
    rho[0] = ModMatrix::identity(d, q);
    for (std::size_t g = 1; g < n; ++g) rho[g] = part.action[cayley.edge_generator(g)] * rho[cayley.parent(g)];

    PrimePowerEchelon e(pp.p, pp.k, n * d);
    std::vector<std::pair<std::uint32_t, std::uint64_t>> entries;
    std::vector<std::uint32_t> cols;
    std::vector<Residue> vals;
    for (std::size_t g = 0; g < n; ++g)
      for (std::size_t h = 0; h < n; ++h) {
        const std::size_t gh = mult[g * n + h];
        for (std::size_t i = 0; i < d; ++i) {
          entries.clear();
          for (std::size_t c = 0; c < d; ++c)
            if (rho[g](i, c) != 0) entries.emplace_back(static_cast<std::uint32_t>(h * d + c), rho[g](i, c));
          entries.emplace_back(static_cast<std::uint32_t>(gh * d + i), q - 1);
          entries.emplace_back(static_cast<std::uint32_t>(g * d + i), 1);
          std::sort(entries.begin(), entries.end());
          cols.clear();
          vals.clear();
          for (const auto& [c, v] : entries) {
            if (!cols.empty() && cols.back() == c) {
              vals.back() = static_cast<Residue>((vals.back() + v) % q);
              if (vals.back() == 0) {
                cols.pop_back();
                vals.pop_back();
              }
            } else {
              cols.push_back(c);
              vals.push_back(static_cast<Residue>(v % q));
            }
          }
          if (!cols.empty()) e.insert_sparse(cols, vals);
        }
      }
    // A cocycle is determined by its generator values; compare there.
    LocalCocycles lc;
    for (const auto& z : e.kernel()) {
      ModVector v(ng * d);
      for (std::size_t j = 0; j < ng; ++j) {
        const std::size_t idx = cayley.left_multiply(0, j);
        std::copy_n(&z[idx * d], d, &v[j * d]);
      }
      lc.z1.push_back(std::move(v));
    }
    lc.b1 = coboundary_generators(part);
    lc.h1s = relative_quotient(lc.z1, lc.b1, ng * d, q);
    return lc;
  };
  return split_by_crt(module, ng, local).h1;
}

std::vector<ModVector> invariants(const LinearModule& module) {
  const std::size_t d = module.dim, ng = module.generator_count();
  if (d == 0) return {};
  if (ng == 0) {
    std::vector<ModVector> all;
    for (std::size_t i = 0; i < d; ++i) {
      ModVector v(d, 0);
      v[i] = 1;
      all.push_back(std::move(v));
    }
    return all;
  }
  ModMatrix stacked(ng * d, d, module.modulus);
  for (std::size_t j = 0; j < ng; ++j)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b)
        stacked.set(j * d + a, b, std::int64_t{module.action[j](a, b)} - (a == b ? 1 : 0));
  return kernel_mod(stacked);
}

AbelianGroupStructure invariants_structure(const LinearModule& module) {
  return submodule_structure(invariants(module), module.dim, module.modulus);
}

AbelianGroupStructure coinvariants_from_elements(const LinearModule& module, const std::vector<ModMatrix>& elements) {
  const std::size_t d = module.dim;
  const std::uint64_t L = module.modulus;
  std::vector<ModVector> units, images;
  for (std::size_t i = 0; i < d; ++i) {
    ModVector v(d, 0);
    v[i] = 1;
    units.push_back(std::move(v));
  }
  for (const auto& a : elements) {
    if (a.rows() != d || a.cols() != d || a.modulus() != L)
      throw InvalidArgument("coinvariants: element shape or modulus mismatch");
    for (std::size_t i = 0; i < d; ++i) {
      ModVector v(d);
      for (std::size_t r = 0; r < d; ++r) v[r] = static_cast<Residue>((a(r, i) + L - (r == i ? 1 : 0)) % L);
      images.push_back(std::move(v));
    }
  }
  return relative_quotient(units, images, d, L);
}

AbelianGroupStructure coinvariants(const LinearModule& module) {
  return coinvariants_from_elements(module, module.action);
}

std::vector<Residue> extend_cocycle(const CayleyData& cayley, const LinearModule& module, const ModVector& values) {
  const std::size_t d = module.dim, ng = module.generator_count();
  const std::uint64_t L = module.modulus;
  if (ng != cayley.generator_count() || values.size() != ng * d)
    throw InvalidArgument("extend_cocycle: shape mismatch");
  std::vector<Residue> f(cayley.order() * d, 0);
  for (std::size_t w = 1; w < cayley.order(); ++w) {
    const std::size_t u = cayley.parent(w), j = cayley.edge_generator(w);
    const ModMatrix& a = module.action[j];
    for (std::size_t r = 0; r < d; ++r) {
      std::uint64_t s = values[j * d + r];
      for (std::size_t c = 0; c < d; ++c) s = (s + std::uint64_t{a(r, c)} * f[u * d + c]) % L;
      f[w * d + r] = static_cast<Residue>(s);
    }
  }
  return f;
}

ZMatrix wedge3_matrix_integral(const ZMatrix& x) {
  if (x.rows() != x.cols()) throw InvalidArgument("wedge3_matrix_integral: matrix must be square");
  const auto basis = wedge3_basis(x.rows());
  ZMatrix out(basis.size(), basis.size());
  for (std::size_t c = 0; c < basis.size(); ++c)
    for (std::size_t r = 0; r < basis.size(); ++r) {
      const auto& R = basis[r];
      const auto& C = basis[c];
      auto e = [&](std::size_t a, std::size_t b) -> const Integer& { return x(R[a], C[b]); };
      out(r, c) = e(0, 0) * e(1, 1) * e(2, 2) + e(0, 1) * e(1, 2) * e(2, 0) + e(0, 2) * e(1, 0) * e(2, 1) -
                  e(0, 2) * e(1, 1) * e(2, 0) - e(0, 0) * e(1, 2) * e(2, 1) - e(0, 1) * e(1, 0) * e(2, 2);
    }
  return out;
}

Wedge3Coinvariants integral_coinvariants_wedge3(unsigned g, std::uint64_t level, std::size_t witness_count,
                                                std::uint64_t seed) {
  if (g < 1) throw InvalidArgument("integral_coinvariants_wedge3: genus must be >= 1");
  if (level < 2) throw InvalidArgument("integral_coinvariants_wedge3: level must be >= 2");
  const std::size_t n = 2 * g;
  const std::size_t d = n < 3 ? 0 : n * (n - 1) * (n - 2) / 6;
  std::vector<ZMatrix> witnesses;
  const Integer lz = static_cast<unsigned long>(level);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::int64_t> v(n, 0);
    v[i] = 1;
    witnesses.push_back(CongruenceElement(integral_transvection_power(v, lz), level).matrix());
  }
  for (std::size_t t = 0; t < witness_count; ++t)
    witnesses.push_back(sample_congruence_element(g, level, seed + t, 1 + t % 4).matrix());

  std::vector<std::vector<Integer>> relations;
  for (const auto& w : witnesses) {
    const ZMatrix cube = wedge3_matrix_integral(w);
    for (std::size_t c = 0; c < d; ++c) {
      std::vector<Integer> rel(d);
      bool zero = true;
      for (std::size_t r = 0; r < d; ++r) {
        rel[r] = cube(r, c) - (r == c ? 1 : 0);
        zero = zero && rel[r] == 0;
      }
      if (!zero) relations.push_back(std::move(rel));
    }
  }
  Wedge3Coinvariants out;
  out.structure = abelian_quotient(d, relations);
  out.witness_count = witnesses.size();
  out.relation_count = relations.size();
  out.below_stable_range = g < 3;
  return out;
}

}  // namespace spcgt
