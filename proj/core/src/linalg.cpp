#include "spcgt/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <numeric>
#include <sstream>
#include <utility>

#include "spcgt/errors.hpp"

namespace spcgt {

namespace {

std::uint64_t check_modulus(std::uint64_t modulus) {
  if (modulus < 2 || modulus > kMaxModulus) {
    throw InvalidArgument("modulus must lie in [2, 2^31), got " + std::to_string(modulus));
  }
  return modulus;
}

Residue reduce_signed(std::int64_t value, std::uint64_t modulus) {
  auto m = static_cast<std::int64_t>(modulus);
  std::int64_t r = value % m;
  if (r < 0) r += m;
  return static_cast<Residue>(r);
}

Residue reduce_integer(const Integer& value, std::uint64_t modulus) {
  Integer r;
  mpz_fdiv_r_ui(r.get_mpz_t(), value.get_mpz_t(), static_cast<unsigned long>(modulus));
  return static_cast<Residue>(r.get_ui());
}

}  // namespace

// ---------------------------------------------------------------------------
// ZMatrix

ZMatrix::ZMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

ZMatrix ZMatrix::identity(std::size_t n) {
  ZMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

ZMatrix ZMatrix::transpose() const {
  ZMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

bool ZMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Integer& x) { return x == 0; });
}

bool ZMatrix::is_identity() const {
  if (rows_ != cols_) return false;
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c)
      if ((*this)(r, c) != (r == c ? 1 : 0)) return false;
  return true;
}

ModMatrix ZMatrix::reduce(std::uint64_t modulus) const {
  ModMatrix m(rows_, cols_, modulus);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) m.set(r, c, (*this)(r, c));
  return m;
}

ZMatrix operator*(const ZMatrix& a, const ZMatrix& b) {
  if (a.cols_ != b.rows_) throw InvalidArgument("ZMatrix product: dimension mismatch");
  ZMatrix c(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Integer& aik = a(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

ZMatrix operator+(const ZMatrix& a, const ZMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw InvalidArgument("ZMatrix sum: dimension mismatch");
  ZMatrix c(a.rows_, a.cols_);
  for (std::size_t i = 0; i < a.data_.size(); ++i) c.data_[i] = a.data_[i] + b.data_[i];
  return c;
}

ZMatrix operator-(const ZMatrix& a, const ZMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw InvalidArgument("ZMatrix difference: dimension mismatch");
  ZMatrix c(a.rows_, a.cols_);
  for (std::size_t i = 0; i < a.data_.size(); ++i) c.data_[i] = a.data_[i] - b.data_[i];
  return c;
}

ZMatrix operator*(const Integer& s, const ZMatrix& a) {
  ZMatrix c(a.rows_, a.cols_);
  for (std::size_t i = 0; i < a.data_.size(); ++i) c.data_[i] = s * a.data_[i];
  return c;
}

bool operator==(const ZMatrix& a, const ZMatrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

// ---------------------------------------------------------------------------
// ModMatrix

ModMatrix::ModMatrix(std::size_t rows, std::size_t cols, std::uint64_t modulus)
    : rows_(rows), cols_(cols), modulus_(check_modulus(modulus)), data_(rows * cols, 0) {}

ModMatrix ModMatrix::identity(std::size_t n, std::uint64_t modulus) {
  ModMatrix m(n, n, modulus);
  for (std::size_t i = 0; i < n; ++i) m.data_[i * n + i] = 1;
  return m;
}

void ModMatrix::set(std::size_t r, std::size_t c, std::int64_t value) {
  data_[r * cols_ + c] = reduce_signed(value, modulus_);
}

void ModMatrix::set(std::size_t r, std::size_t c, const Integer& value) {
  data_[r * cols_ + c] = reduce_integer(value, modulus_);
}

ModMatrix ModMatrix::transpose() const {
  ModMatrix t(cols_, rows_, modulus_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t.data_[c * rows_ + r] = data_[r * cols_ + c];
  return t;
}

bool ModMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](Residue x) { return x == 0; });
}

bool ModMatrix::is_identity() const {
  if (rows_ != cols_) return false;
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c)
      if (data_[r * cols_ + c] != (r == c ? 1u : 0u)) return false;
  return true;
}

ModMatrix ModMatrix::reduce(std::uint64_t divisor) const {
  if (divisor < 2 || modulus_ % divisor != 0) {
    throw InvalidArgument("cannot reduce modulo " + std::to_string(divisor) + ": not a divisor of " +
                          std::to_string(modulus_));
  }
  ModMatrix m(rows_, cols_, divisor);
  for (std::size_t i = 0; i < data_.size(); ++i) m.data_[i] = static_cast<Residue>(data_[i] % divisor);
  return m;
}

ZMatrix ModMatrix::lift() const {
  ZMatrix z(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) z(r, c) = static_cast<unsigned long>(data_[r * cols_ + c]);
  return z;
}

ModVector ModMatrix::apply(std::span<const Residue> v) const {
  if (v.size() != cols_) throw InvalidArgument("ModMatrix::apply: dimension mismatch");
  ModVector out(rows_, 0);
  for (std::size_t r = 0; r < rows_; ++r) {
    std::uint64_t acc = 0;
    for (std::size_t c = 0; c < cols_; ++c) acc = (acc + std::uint64_t{data_[r * cols_ + c]} * v[c]) % modulus_;
    out[r] = static_cast<Residue>(acc);
  }
  return out;
}

ModMatrix operator*(const ModMatrix& a, const ModMatrix& b) {
  if (a.cols_ != b.rows_ || a.modulus_ != b.modulus_) throw InvalidArgument("ModMatrix product: shape or modulus mismatch");
  ModMatrix c(a.rows_, b.cols_, a.modulus_);
  std::vector<std::uint64_t> row(b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    std::fill(row.begin(), row.end(), 0);
    for (std::size_t k = 0; k < a.cols_; ++k) {
      std::uint64_t aik = a.data_[i * a.cols_ + k];
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) row[j] = (row[j] + aik * b.data_[k * b.cols_ + j]) % a.modulus_;
    }
    for (std::size_t j = 0; j < b.cols_; ++j) c.data_[i * b.cols_ + j] = static_cast<Residue>(row[j]);
  }
  return c;
}

ModMatrix operator+(const ModMatrix& a, const ModMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_ || a.modulus_ != b.modulus_)
    throw InvalidArgument("ModMatrix sum: shape or modulus mismatch");
  ModMatrix c(a.rows_, a.cols_, a.modulus_);
  for (std::size_t i = 0; i < a.data_.size(); ++i)
    c.data_[i] = static_cast<Residue>((std::uint64_t{a.data_[i]} + b.data_[i]) % a.modulus_);
  return c;
}

ModMatrix operator-(const ModMatrix& a, const ModMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_ || a.modulus_ != b.modulus_)
    throw InvalidArgument("ModMatrix difference: shape or modulus mismatch");
  ModMatrix c(a.rows_, a.cols_, a.modulus_);
  for (std::size_t i = 0; i < a.data_.size(); ++i)
    c.data_[i] = static_cast<Residue>((std::uint64_t{a.data_[i]} + a.modulus_ - b.data_[i]) % a.modulus_);
  return c;
}

ModMatrix operator*(std::uint64_t s, const ModMatrix& a) {
  ModMatrix c(a.rows_, a.cols_, a.modulus_);
  s %= a.modulus_;
  for (std::size_t i = 0; i < a.data_.size(); ++i) c.data_[i] = static_cast<Residue>((s * a.data_[i]) % a.modulus_);
  return c;
}

// ---------------------------------------------------------------------------
// AbelianGroupStructure

Integer AbelianGroupStructure::torsion_order() const {
  Integer n = 1;
  for (const auto& d : invariant_factors) n *= d;
  return n;
}

std::string AbelianGroupStructure::to_string() const {
  if (is_trivial()) return "0";
  std::vector<std::string> parts;
  if (free_rank == 1) parts.push_back("Z");
  if (free_rank > 1) parts.push_back("Z^" + std::to_string(free_rank));
  for (std::size_t i = 0; i < invariant_factors.size();) {
    std::size_t j = i;
    while (j < invariant_factors.size() && invariant_factors[j] == invariant_factors[i]) ++j;
    std::string cyc = "Z/" + invariant_factors[i].get_str();
    if (j - i == 1) {
      parts.push_back(cyc);
    } else {
      parts.push_back("(" + cyc + ")^" + std::to_string(j - i));
    }
    i = j;
  }
  std::ostringstream out;
  for (std::size_t i = 0; i < parts.size(); ++i) out << (i ? " + " : "") << parts[i];
  return out.str();
}

AbelianGroupStructure AbelianGroupStructure::from_cyclic_orders(const std::vector<Integer>& orders) {
  AbelianGroupStructure s;
  std::vector<Integer> finite;
  for (const auto& o : orders) {
    if (o == 0) {
      ++s.free_rank;
    } else if (abs(o) > 1) {
      finite.push_back(abs(o));
    }
  }
  if (finite.empty()) return s;
  ZMatrix diag(finite.size(), finite.size());
  for (std::size_t i = 0; i < finite.size(); ++i) diag(i, i) = finite[i];
  for (const auto& d : smith_diagonal(std::move(diag)))
    if (d > 1) s.invariant_factors.push_back(d);
  return s;
}

AbelianGroupStructure AbelianGroupStructure::elementary(const Integer& order, std::size_t count) {
  AbelianGroupStructure s;
  if (order == 0) {
    s.free_rank = count;
  } else if (order > 1) {
    s.invariant_factors.assign(count, order);
  }
  return s;
}

AbelianGroupStructure AbelianGroupStructure::direct_sum(const AbelianGroupStructure& a, const AbelianGroupStructure& b) {
  std::vector<Integer> orders = a.invariant_factors;
  orders.insert(orders.end(), b.invariant_factors.begin(), b.invariant_factors.end());
  orders.insert(orders.end(), a.free_rank + b.free_rank, Integer(0));
  return from_cyclic_orders(orders);
}

// ---------------------------------------------------------------------------
// Smith normal form

namespace {

// Row/column operation sink: records into U and V when tracking.
struct SmithWork {
  ZMatrix& d;
  ZMatrix* u;
  ZMatrix* v;

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < d.cols(); ++j) std::swap(d(a, j), d(b, j));
    if (u)
      for (std::size_t j = 0; j < u->cols(); ++j) std::swap((*u)(a, j), (*u)(b, j));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < d.rows(); ++i) std::swap(d(i, a), d(i, b));
    if (v)
      for (std::size_t i = 0; i < v->rows(); ++i) std::swap((*v)(i, a), (*v)(i, b));
  }
  // row_dst -= q * row_src
  void row_axpy(std::size_t dst, std::size_t src, const Integer& q) {
    for (std::size_t j = 0; j < d.cols(); ++j)
      if (d(src, j) != 0) d(dst, j) -= q * d(src, j);
    if (u)
      for (std::size_t j = 0; j < u->cols(); ++j)
        if ((*u)(src, j) != 0) (*u)(dst, j) -= q * (*u)(src, j);
  }
  // col_dst -= q * col_src
  void col_axpy(std::size_t dst, std::size_t src, const Integer& q) {
    for (std::size_t i = 0; i < d.rows(); ++i)
      if (d(i, src) != 0) d(i, dst) -= q * d(i, src);
    if (v)
      for (std::size_t i = 0; i < v->rows(); ++i)
        if ((*v)(i, src) != 0) (*v)(i, dst) -= q * (*v)(i, src);
  }
  void negate_row(std::size_t r) {
    for (std::size_t j = 0; j < d.cols(); ++j) d(r, j) = -d(r, j);
    if (u)
      for (std::size_t j = 0; j < u->cols(); ++j) (*u)(r, j) = -(*u)(r, j);
  }
};

void smith_reduce(SmithWork& w) {
  ZMatrix& d = w.d;
  const std::size_t m = d.rows();
  const std::size_t n = d.cols();
  for (std::size_t t = 0; t < std::min(m, n); ++t) {
    // Minimal absolute nonzero entry of the trailing block.
    std::size_t pi = m, pj = n;
    Integer best;
    for (std::size_t i = t; i < m; ++i)
      for (std::size_t j = t; j < n; ++j) {
        const Integer& x = d(i, j);
        if (x == 0) continue;
        if (pi == m || abs(x) < best) {
          best = abs(x);
          pi = i;
          pj = j;
        }
      }
    if (pi == m) break;
    w.swap_rows(t, pi);
    w.swap_cols(t, pj);

    for (;;) {
      bool clean = true;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (d(i, t) == 0) continue;
        Integer q = d(i, t) / d(t, t);
        if (q != 0) w.row_axpy(i, t, q);
        if (d(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (d(t, j) == 0) continue;
        Integer q = d(t, j) / d(t, t);
        if (q != 0) w.col_axpy(j, t, q);
        if (d(t, j) != 0) clean = false;
      }
      if (!clean) {
        // Remainders are strictly smaller than the pivot; bring the smallest in.
        std::size_t bi = t, bj = t;
        Integer b = abs(d(t, t));
        for (std::size_t i = t + 1; i < m; ++i)
          if (d(i, t) != 0 && abs(d(i, t)) < b) {
            b = abs(d(i, t));
            bi = i;
            bj = t;
          }
        for (std::size_t j = t + 1; j < n; ++j)
          if (d(t, j) != 0 && abs(d(t, j)) < b) {
            b = abs(d(t, j));
            bi = t;
            bj = j;
          }
        w.swap_rows(t, bi);
        w.swap_cols(t, bj);
        continue;
      }
      std::size_t bad = m;
      for (std::size_t i = t + 1; i < m && bad == m; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (d(i, j) != 0 && !mpz_divisible_p(d(i, j).get_mpz_t(), d(t, t).get_mpz_t())) {
            bad = i;
            break;
          }
      if (bad == m) break;
      w.row_axpy(t, bad, Integer(-1));
    }
    if (d(t, t) < 0) w.negate_row(t);
  }
}

}  // namespace

SmithForm smith_normal_form(const ZMatrix& m) {
  SmithForm out{m, ZMatrix::identity(m.rows()), ZMatrix::identity(m.cols())};
  SmithWork w{out.diagonal, &out.left, &out.right};
  smith_reduce(w);
  return out;
}

std::vector<Integer> smith_diagonal(ZMatrix m) {
  SmithWork w{m, nullptr, nullptr};
  smith_reduce(w);
  std::vector<Integer> diag;
  for (std::size_t i = 0; i < std::min(m.rows(), m.cols()); ++i) diag.push_back(m(i, i));
  return diag;
}

AbelianGroupStructure abelian_quotient(std::size_t n, const std::vector<std::vector<Integer>>& relations) {
  AbelianGroupStructure s;
  if (n == 0) return s;
  ZMatrix m(relations.size(), n);
  for (std::size_t r = 0; r < relations.size(); ++r) {
    if (relations[r].size() != n) throw InvalidArgument("abelian_quotient: relation length mismatch");
    for (std::size_t c = 0; c < n; ++c) m(r, c) = relations[r][c];
  }
  std::size_t nonzero = 0;
  for (const auto& d : smith_diagonal(std::move(m))) {
    if (d == 0) continue;
    ++nonzero;
    if (d > 1) s.invariant_factors.push_back(d);
  }
  s.free_rank = n - nonzero;
  return s;
}

// ---------------------------------------------------------------------------
// Factorization and CRT

std::uint64_t PrimePower::value() const {
  std::uint64_t v = 1;
  for (unsigned i = 0; i < k; ++i) v *= p;
  return v;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::vector<PrimePower> crt_split(std::uint64_t modulus) {
  if (modulus < 2) throw InvalidArgument("crt_split: L must be >= 2, got " + std::to_string(modulus));
  std::vector<PrimePower> out;
  std::uint64_t n = modulus;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d != 0) continue;
    PrimePower pp{d, 0};
    while (n % d == 0) {
      n /= d;
      ++pp.k;
    }
    out.push_back(pp);
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

std::uint64_t crt_combine(std::span<const std::uint64_t> residues, std::span<const std::uint64_t> moduli) {
  if (residues.size() != moduli.size()) throw InvalidArgument("crt_combine: size mismatch");
  unsigned __int128 x = 0;
  unsigned __int128 m = 1;
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    const std::uint64_t mi = moduli[i];
    // Solve x + m*t = r_i (mod m_i).
    std::uint64_t m_mod = static_cast<std::uint64_t>(m % mi);
    std::uint64_t x_mod = static_cast<std::uint64_t>(x % mi);
    std::uint64_t diff = (residues[i] % mi + mi - x_mod) % mi;
    mpz_class inv;
    mpz_class mm = static_cast<unsigned long>(m_mod), mmi = static_cast<unsigned long>(mi);
    if (mpz_invert(inv.get_mpz_t(), mm.get_mpz_t(), mmi.get_mpz_t()) == 0 && mi != 1)
      throw InvalidArgument("crt_combine: moduli not coprime");
    std::uint64_t t = mi == 1 ? 0 : static_cast<std::uint64_t>((static_cast<unsigned __int128>(diff) * inv.get_ui()) % mi);
    x += m * t;
    m *= mi;
  }
  return static_cast<std::uint64_t>(x % m);
}

// ---------------------------------------------------------------------------
// Z/p^k arithmetic

PrimePowerRing::PrimePowerRing(std::uint64_t p, unsigned k) : p_(p), k_(k), q_(1) {
  if (!is_prime(p) || k == 0) throw InvalidArgument("PrimePowerRing: need a prime p and k >= 1");
  powers_.push_back(1);
  for (unsigned i = 0; i < k; ++i) {
    q_ *= p;
    powers_.push_back(q_);
  }
  check_modulus(q_);
}

unsigned PrimePowerRing::valuation(std::uint64_t x) const {
  x %= q_;
  if (x == 0) return k_;
  unsigned v = 0;
  while (x % p_ == 0) {
    x /= p_;
    ++v;
  }
  return v;
}

std::uint64_t PrimePowerRing::unit_inverse(std::uint64_t unit) const {
  std::int64_t a = static_cast<std::int64_t>(unit % q_), m = static_cast<std::int64_t>(q_);
  std::int64_t x0 = 1, x1 = 0;
  std::int64_t r0 = a, r1 = m;
  while (r1 != 0) {
    std::int64_t q = r0 / r1;
    std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
    std::tie(x0, x1) = std::make_pair(x1, x0 - q * x1);
  }
  if (r0 != 1) throw InvalidArgument("unit_inverse: argument is not a unit");
  x0 %= m;
  if (x0 < 0) x0 += m;
  return static_cast<std::uint64_t>(x0);
}

// ---------------------------------------------------------------------------
// PrimePowerEchelon

PrimePowerEchelon::PrimePowerEchelon(std::uint64_t p, unsigned k, std::size_t width)
    : ring_(p, k), width_(width), pivot_row_(width, -1), acc_(width, 0), touched_flag_(width, 0) {}

std::size_t PrimePowerEchelon::length() const {
  std::size_t len = 0;
  for (const auto& r : rows_) len += ring_.k() - r.pivot_valuation;
  return len;
}

void PrimePowerEchelon::load(std::span<const std::uint32_t> cols, std::span<const Residue> vals) {
  for (std::size_t i = 0; i < cols.size(); ++i) {
    const std::uint32_t c = cols[i];
    acc_[c] = ring_.add(acc_[c], vals[i] % ring_.modulus());
    if (!touched_flag_[c]) {
      touched_flag_[c] = 1;
      touched_.push_back(c);
    }
  }
}

void PrimePowerEchelon::clear_accumulator() {
  for (auto c : touched_) {
    acc_[c] = 0;
    touched_flag_[c] = 0;
  }
  touched_.clear();
  heap_.clear();
}

void PrimePowerEchelon::subtract_row(std::uint64_t factor, const Row& row, std::uint32_t above) {
  for (std::size_t i = 0; i < row.cols.size(); ++i) {
    const std::uint32_t c = row.cols[i];
    acc_[c] = ring_.sub(acc_[c], ring_.mul(factor, row.vals[i]));
    if (!touched_flag_[c]) {
      touched_flag_[c] = 1;
      touched_.push_back(c);
    }
    if (c > above) {
      heap_.push_back(c);
      std::push_heap(heap_.begin(), heap_.end(), std::greater<>());
    }
  }
}

// Reduces every pivot column strictly after `start` into canonical range.
void PrimePowerEchelon::reduce_tail(std::uint32_t start) {
  heap_.clear();
  for (auto c : touched_)
    if (c > start && acc_[c] != 0) heap_.push_back(c);
  std::make_heap(heap_.begin(), heap_.end(), std::greater<>());
  std::int64_t last = -1;
  while (!heap_.empty()) {
    std::pop_heap(heap_.begin(), heap_.end(), std::greater<>());
    const std::uint32_t c = heap_.back();
    heap_.pop_back();
    if (static_cast<std::int64_t>(c) == last) continue;
    last = c;
    const std::uint64_t e = acc_[c];
    const std::int32_t pr = pivot_row_[c];
    if (e == 0 || pr < 0) continue;
    const Row& prow = rows_[static_cast<std::size_t>(pr)];
    const std::uint64_t t = e / ring_.power(prow.pivot_valuation);
    if (t != 0) subtract_row(t, prow, c);
  }
}

PrimePowerEchelon::Row PrimePowerEchelon::extract_row(std::uint32_t pivot_col) {
  Row r;
  std::vector<std::uint32_t> cols;
  for (auto c : touched_)
    if (acc_[c] != 0) cols.push_back(c);
  std::sort(cols.begin(), cols.end());
  assert(!cols.empty() && cols.front() == pivot_col);
  (void)pivot_col;
  r.cols = cols;
  r.vals.reserve(cols.size());
  for (auto c : cols) r.vals.push_back(static_cast<Residue>(acc_[c]));
  clear_accumulator();
  return r;
}

bool PrimePowerEchelon::process_pending() {
  bool grew = false;
  while (!pending_.empty()) {
    Row incoming = std::move(pending_.back());
    pending_.pop_back();
    load(incoming.cols, incoming.vals);
    heap_.clear();
    for (auto c : touched_)
      if (acc_[c] != 0) heap_.push_back(c);
    std::make_heap(heap_.begin(), heap_.end(), std::greater<>());

    std::int64_t last = -1;
    std::int64_t place_at = -1;
    while (!heap_.empty()) {
      std::pop_heap(heap_.begin(), heap_.end(), std::greater<>());
      const std::uint32_t c = heap_.back();
      heap_.pop_back();
      if (static_cast<std::int64_t>(c) == last) continue;
      last = c;
      const std::uint64_t e = acc_[c];
      if (e == 0) continue;
      const std::int32_t pr = pivot_row_[c];
      if (pr < 0) {
        place_at = c;
        break;
      }
      const unsigned a = rows_[static_cast<std::size_t>(pr)].pivot_valuation;
      if (ring_.valuation(e) >= a) {
        subtract_row(e / ring_.power(a), rows_[static_cast<std::size_t>(pr)], c);
        continue;
      }
      // The incoming vector has a smaller valuation here: it takes over the
      // pivot and the displaced row is re-inserted.
      Row displaced = std::move(rows_[static_cast<std::size_t>(pr)]);
      const std::size_t last_idx = rows_.size() - 1;
      if (static_cast<std::size_t>(pr) != last_idx) {
        rows_[static_cast<std::size_t>(pr)] = std::move(rows_[last_idx]);
        pivot_row_[rows_[static_cast<std::size_t>(pr)].cols.front()] = pr;
      }
      rows_.pop_back();
      pivot_row_[c] = -1;
      pending_.push_back(std::move(displaced));
      place_at = c;
      break;
    }
    if (place_at < 0) {
      clear_accumulator();
      continue;
    }

    const auto c = static_cast<std::uint32_t>(place_at);
    const unsigned b = ring_.valuation(acc_[c]);
    const std::uint64_t unit = ring_.unit_inverse(acc_[c] / ring_.power(b));
    for (auto col : touched_) acc_[col] = ring_.mul(acc_[col], unit);
    reduce_tail(c);
    Row fresh = extract_row(c);
    fresh.pivot_valuation = b;

    // Restore reducedness of the existing rows in the new pivot column.
    const std::uint64_t pb = ring_.power(b);
    for (auto& row : rows_) {
      auto it = std::lower_bound(row.cols.begin(), row.cols.end(), c);
      if (it == row.cols.end() || *it != c) continue;
      const std::uint64_t t = row.vals[static_cast<std::size_t>(it - row.cols.begin())] / pb;
      if (t == 0) continue;
      const std::uint32_t own = row.cols.front();
      const unsigned val = row.pivot_valuation;
      load(row.cols, row.vals);
      subtract_row(t, fresh, c);
      reduce_tail(c);
      row = extract_row(own);
      row.pivot_valuation = val;
    }

    if (b > 0) {
      Row closure;
      const std::uint64_t f = ring_.power(ring_.k() - b);
      for (std::size_t i = 0; i < fresh.cols.size(); ++i) {
        const std::uint64_t v = ring_.mul(f, fresh.vals[i]);
        if (v != 0) {
          closure.cols.push_back(fresh.cols[i]);
          closure.vals.push_back(static_cast<Residue>(v));
        }
      }
      if (!closure.cols.empty()) pending_.push_back(std::move(closure));
    }
    pivot_row_[c] = static_cast<std::int32_t>(rows_.size());
    rows_.push_back(std::move(fresh));
    grew = true;
  }
  return grew;
}

bool PrimePowerEchelon::insert(std::span<const Residue> row) {
  if (row.size() != width_) throw InvalidArgument("PrimePowerEchelon::insert: width mismatch");
  Row r;
  for (std::uint32_t c = 0; c < row.size(); ++c) {
    const Residue v = static_cast<Residue>(row[c] % ring_.modulus());
    if (v != 0) {
      r.cols.push_back(c);
      r.vals.push_back(v);
    }
  }
  if (r.cols.empty()) return false;
  pending_.push_back(std::move(r));
  return process_pending();
}

bool PrimePowerEchelon::insert_sparse(std::span<const std::uint32_t> cols, std::span<const Residue> vals) {
  if (cols.empty()) return false;
  Row r;
  r.cols.assign(cols.begin(), cols.end());
  r.vals.assign(vals.begin(), vals.end());
  pending_.push_back(std::move(r));
  return process_pending();
}

std::vector<std::size_t> PrimePowerEchelon::pivot_columns() const {
  std::vector<std::size_t> cols;
  for (const auto& r : rows_) cols.push_back(r.cols.front());
  std::sort(cols.begin(), cols.end());
  return cols;
}

std::vector<ModVector> PrimePowerEchelon::dense_rows() const {
  std::vector<ModVector> out;
  for (auto c : pivot_columns()) {
    const Row& r = rows_[static_cast<std::size_t>(pivot_row_[c])];
    ModVector v(width_, 0);
    for (std::size_t i = 0; i < r.cols.size(); ++i) v[r.cols[i]] = r.vals[i];
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<ModVector> PrimePowerEchelon::kernel() const {
  // Columns without a unit pivot parametrize the kernel; unit-pivot
  // coordinates are then forced by their rows.
  std::vector<std::int64_t> small_index(width_, -1);
  std::vector<std::uint32_t> small_cols;
  for (std::uint32_t c = 0; c < width_; ++c) {
    const std::int32_t pr = pivot_row_[c];
    if (pr < 0 || rows_[static_cast<std::size_t>(pr)].pivot_valuation > 0) {
      small_index[c] = static_cast<std::int64_t>(small_cols.size());
      small_cols.push_back(c);
    }
  }
  std::vector<const Row*> nonunit;
  for (auto c : pivot_columns()) {
    const Row& r = rows_[static_cast<std::size_t>(pivot_row_[c])];
    if (r.pivot_valuation > 0) nonunit.push_back(&r);
  }
  const std::size_t n = small_cols.size();
  std::vector<ModVector> small_kernel;
  if (nonunit.empty()) {
    for (std::size_t j = 0; j < n; ++j) {
      ModVector e(n, 0);
      e[j] = 1;
      small_kernel.push_back(std::move(e));
    }
  } else {
    std::vector<std::uint64_t> data(nonunit.size() * n, 0);
    for (std::size_t i = 0; i < nonunit.size(); ++i) {
      const Row& r = *nonunit[i];
      for (std::size_t t = 0; t < r.cols.size(); ++t) {
        const std::int64_t j = small_index[r.cols[t]];
        if (j < 0) throw InternalError("PrimePowerEchelon: non-reduced unit column");
        data[i * n + static_cast<std::size_t>(j)] = r.vals[t];
      }
    }
    small_kernel = local_smith_kernel(ring_, nonunit.size(), n, std::move(data));
  }

  std::vector<ModVector> out;
  out.reserve(small_kernel.size());
  for (const auto& y : small_kernel) {
    ModVector x(width_, 0);
    for (std::size_t j = 0; j < n; ++j) x[small_cols[j]] = y[j];
    for (const auto& r : rows_) {
      if (r.pivot_valuation > 0) continue;
      std::uint64_t s = 0;
      for (std::size_t t = 1; t < r.cols.size(); ++t) s = ring_.add(s, ring_.mul(r.vals[t], x[r.cols[t]]));
      x[r.cols.front()] = static_cast<Residue>(ring_.neg(s));
    }
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<ModVector> local_smith_kernel(const PrimePowerRing& ring, std::size_t rows, std::size_t cols,
                                          std::vector<std::uint64_t> a) {
  auto at = [&](std::size_t r, std::size_t c) -> std::uint64_t& { return a[r * cols + c]; };
  std::vector<std::uint64_t> q(cols * cols, 0);
  for (std::size_t i = 0; i < cols; ++i) q[i * cols + i] = 1;
  auto qat = [&](std::size_t r, std::size_t c) -> std::uint64_t& { return q[r * cols + c]; };

  std::vector<unsigned> diag_val;
  std::size_t t = 0;
  for (; t < std::min(rows, cols); ++t) {
    std::size_t pi = rows, pj = cols;
    unsigned best = ring.k();
    for (std::size_t i = t; i < rows && best > 0; ++i)
      for (std::size_t j = t; j < cols; ++j) {
        const unsigned v = ring.valuation(at(i, j));
        if (v < best) {
          best = v;
          pi = i;
          pj = j;
          if (v == 0) break;
        }
      }
    if (pi == rows) break;
    if (pi != t)
      for (std::size_t j = 0; j < cols; ++j) std::swap(at(t, j), at(pi, j));
    if (pj != t) {
      for (std::size_t i = 0; i < rows; ++i) std::swap(at(i, t), at(i, pj));
      for (std::size_t i = 0; i < cols; ++i) std::swap(qat(i, t), qat(i, pj));
    }
    const std::uint64_t pv = ring.power(best);
    const std::uint64_t u = ring.unit_inverse(at(t, t) / pv);
    for (std::size_t j = t; j < cols; ++j) at(t, j) = ring.mul(at(t, j), u);
    for (std::size_t i = t + 1; i < rows; ++i) {
      const std::uint64_t f = at(i, t) / pv;
      if (f == 0) continue;
      for (std::size_t j = t; j < cols; ++j) at(i, j) = ring.sub(at(i, j), ring.mul(f, at(t, j)));
    }
    for (std::size_t j = t + 1; j < cols; ++j) {
      const std::uint64_t f = at(t, j) / pv;
      if (f == 0) continue;
      for (std::size_t i = 0; i < rows; ++i) at(i, j) = ring.sub(at(i, j), ring.mul(f, at(i, t)));
      for (std::size_t i = 0; i < cols; ++i) qat(i, j) = ring.sub(qat(i, j), ring.mul(f, qat(i, t)));
    }
    diag_val.push_back(best);
  }
  std::vector<ModVector> out;
  for (std::size_t j = 0; j < cols; ++j) {
    std::uint64_t scale = 1;
    if (j < diag_val.size()) {
      if (diag_val[j] == 0) continue;
      scale = ring.power(ring.k() - diag_val[j]);
    }
    ModVector v(cols);
    for (std::size_t i = 0; i < cols; ++i) v[i] = static_cast<Residue>(ring.mul(scale, qat(i, j)));
    out.push_back(std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Solving over Z/L

namespace {

// CRT idempotents: e_i = 1 mod q_i, 0 mod q_j (j != i).
std::vector<std::uint64_t> crt_idempotents(const std::vector<PrimePower>& parts) {
  std::vector<std::uint64_t> moduli;
  for (const auto& pp : parts) moduli.push_back(pp.value());
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    std::vector<std::uint64_t> res(parts.size(), 0);
    res[i] = 1;
    out.push_back(crt_combine(res, moduli));
  }
  return out;
}

PrimePowerEchelon echelon_of(const ModMatrix& a, const PrimePower& pp, std::span<const Residue> rhs = {}) {
  const std::uint64_t q = pp.value();
  const bool augmented = !rhs.empty();
  PrimePowerEchelon ech(pp.p, pp.k, a.cols() + (augmented ? 1 : 0));
  ModVector row(ech.width());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) row[c] = static_cast<Residue>(a(r, c) % q);
    if (augmented) row[a.cols()] = static_cast<Residue>((q - rhs[r] % q) % q);
    ech.insert(row);
  }
  return ech;
}

}  // namespace

std::vector<ModVector> kernel_mod(const ModMatrix& a) {
  const std::uint64_t L = a.modulus();
  const auto parts = crt_split(L);
  const auto idem = crt_idempotents(parts);
  std::vector<ModVector> out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (const auto& v : echelon_of(a, parts[i]).kernel()) {
      ModVector x(v.size());
      for (std::size_t j = 0; j < v.size(); ++j)
        x[j] = static_cast<Residue>((static_cast<unsigned __int128>(v[j]) * idem[i]) % L);
      out.push_back(std::move(x));
    }
  }
  return out;
}

std::optional<AffineSolution> solution_space_mod(const ModMatrix& a, std::span<const Residue> b) {
  if (b.size() != a.rows()) throw InvalidArgument("solution_space_mod: right-hand side length mismatch");
  const std::uint64_t L = a.modulus();
  const auto parts = crt_split(L);
  const std::size_t n = a.cols();
  std::vector<ModVector> particulars;
  ModVector rhs(b.begin(), b.end());
  bool homogeneous = std::all_of(rhs.begin(), rhs.end(), [L](Residue x) { return x % L == 0; });
  for (const auto& pp : parts) {
    if (homogeneous) {
      particulars.emplace_back(n, 0);
      continue;
    }
    const PrimePowerRing ring(pp.p, pp.k);
    auto ech = echelon_of(a, pp, rhs);
    bool found = false;
    for (const auto& v : ech.kernel()) {
      const std::uint64_t last = v[n];
      if (ring.valuation(last) != 0) continue;
      const std::uint64_t inv = ring.unit_inverse(last);
      ModVector x(n);
      for (std::size_t j = 0; j < n; ++j) x[j] = static_cast<Residue>(ring.mul(v[j], inv));
      particulars.push_back(std::move(x));
      found = true;
      break;
    }
    if (!found) return std::nullopt;
  }
  AffineSolution sol;
  sol.particular.assign(n, 0);
  std::vector<std::uint64_t> moduli;
  for (const auto& pp : parts) moduli.push_back(pp.value());
  std::vector<std::uint64_t> res(parts.size());
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < parts.size(); ++i) res[i] = particulars[i][j];
    sol.particular[j] = static_cast<Residue>(crt_combine(res, moduli));
  }
  sol.kernel = kernel_mod(a);
  return sol;
}

ModMatrix inverse_mod(const ModMatrix& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("inverse_mod: matrix not square");
  const std::size_t n = a.rows();
  const std::uint64_t L = a.modulus();
  const auto parts = crt_split(L);
  std::vector<ModMatrix> inverses;
  for (const auto& pp : parts) {
    const PrimePowerRing ring(pp.p, pp.k);
    const std::uint64_t q = pp.value();
    std::vector<std::uint64_t> m(n * 2 * n, 0);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) m[r * 2 * n + c] = a(r, c) % q;
      m[r * 2 * n + n + r] = 1;
    }
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t piv = n;
      for (std::size_t r = c; r < n; ++r)
        if (ring.valuation(m[r * 2 * n + c]) == 0) {
          piv = r;
          break;
        }
      if (piv == n) throw InvalidArgument("inverse_mod: matrix is singular modulo " + std::to_string(q));
      if (piv != c)
        for (std::size_t j = 0; j < 2 * n; ++j) std::swap(m[c * 2 * n + j], m[piv * 2 * n + j]);
      const std::uint64_t inv = ring.unit_inverse(m[c * 2 * n + c]);
      for (std::size_t j = 0; j < 2 * n; ++j) m[c * 2 * n + j] = ring.mul(m[c * 2 * n + j], inv);
      for (std::size_t r = 0; r < n; ++r) {
        if (r == c) continue;
        const std::uint64_t f = m[r * 2 * n + c];
        if (f == 0) continue;
        for (std::size_t j = 0; j < 2 * n; ++j) m[r * 2 * n + j] = ring.sub(m[r * 2 * n + j], ring.mul(f, m[c * 2 * n + j]));
      }
    }
    ModMatrix inv(n, n, q);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) inv.set(r, c, static_cast<std::int64_t>(m[r * 2 * n + n + c]));
    inverses.push_back(std::move(inv));
  }
  ModMatrix out(n, n, L);
  std::vector<std::uint64_t> moduli, res(parts.size());
  for (const auto& pp : parts) moduli.push_back(pp.value());
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t i = 0; i < parts.size(); ++i) res[i] = inverses[i](r, c);
      out.set(r, c, static_cast<std::int64_t>(crt_combine(res, moduli)));
    }
  return out;
}

AbelianGroupStructure relative_quotient(const std::vector<ModVector>& numerators,
                                        const std::vector<ModVector>& denominators, std::size_t n,
                                        std::uint64_t modulus) {
  if (n == 0) return {};
  // Work with the lattices numerators + L Z^n  and  denominators + L Z^n.
  ZMatrix gens(n, numerators.size() + n);
  for (std::size_t j = 0; j < numerators.size(); ++j) {
    if (numerators[j].size() != n) throw InvalidArgument("relative_quotient: vector length mismatch");
    for (std::size_t i = 0; i < n; ++i) gens(i, j) = static_cast<unsigned long>(numerators[j][i]);
  }
  for (std::size_t i = 0; i < n; ++i) gens(i, numerators.size() + i) = static_cast<unsigned long>(modulus);
  const SmithForm snf = smith_normal_form(gens);
  // Lattice basis is U^{-1} diag(d); coordinates of b are (U b)_i / d_i.
  std::vector<std::vector<Integer>> coords;
  auto coordinates_of = [&](const std::vector<Integer>& b) {
    std::vector<Integer> c(n);
    for (std::size_t i = 0; i < n; ++i) {
      Integer s = 0;
      for (std::size_t j = 0; j < n; ++j) s += snf.left(i, j) * b[j];
      const Integer& d = snf.diagonal(i, i);
      if (!mpz_divisible_p(s.get_mpz_t(), d.get_mpz_t()))
        throw InvalidArgument("relative_quotient: denominator not contained in numerator span");
      c[i] = s / d;
    }
    return c;
  };
  for (const auto& v : denominators) {
    if (v.size() != n) throw InvalidArgument("relative_quotient: vector length mismatch");
    std::vector<Integer> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = static_cast<unsigned long>(v[i]);
    coords.push_back(coordinates_of(b));
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Integer> b(n, 0);
    b[i] = static_cast<unsigned long>(modulus);
    coords.push_back(coordinates_of(b));
  }
  return abelian_quotient(n, coords);
}

AbelianGroupStructure submodule_structure(const std::vector<ModVector>& generators, std::size_t n,
                                          std::uint64_t modulus) {
  return relative_quotient(generators, {}, n, modulus);
}

std::size_t canonical_entry_width(std::uint64_t modulus) {
  std::uint64_t top = modulus - 1;
  std::size_t width = 1;
  while (top >>= 8) ++width;
  return width;
}

std::vector<std::uint8_t> canonical_encoding(const ModMatrix& m) {
  const std::size_t width = canonical_entry_width(m.modulus());
  std::vector<std::uint8_t> out;
  out.reserve(m.entries().size() * width);
  for (Residue x : m.entries())
    for (std::size_t b = 0; b < width; ++b) out.push_back(static_cast<std::uint8_t>((x >> (8 * b)) & 0xff));
  return out;
}

}  // namespace spcgt
