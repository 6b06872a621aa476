#include "spcgt/symplectic.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "spcgt/errors.hpp"

namespace spcgt {

namespace {

void check_genus(unsigned g) {
  if (g < 1) throw InvalidArgument("genus must be >= 1");
}

void check_square(const ModMatrix& x, unsigned g, const char* what) {
  if (x.rows() != 2 * g || x.cols() != 2 * g)
    throw InvalidArgument(std::string(what) + ": expected a " + std::to_string(2 * g) + "x" +
                          std::to_string(2 * g) + " matrix");
}

}  // namespace

ModMatrix omega(unsigned g, std::uint64_t modulus) {
  check_genus(g);
  ModMatrix m(2 * g, 2 * g, modulus);
  for (unsigned i = 0; i < g; ++i) {
    m.set(i, g + i, 1);
    m.set(g + i, i, -1);
  }
  return m;
}

ZMatrix omega_integral(unsigned g) {
  check_genus(g);
  ZMatrix m(2 * g, 2 * g);
  for (unsigned i = 0; i < g; ++i) {
    m(i, g + i) = 1;
    m(g + i, i) = -1;
  }
  return m;
}

bool is_symplectic(const ModMatrix& x, unsigned g) {
  check_square(x, g, "is_symplectic");
  const ModMatrix w = omega(g, x.modulus());
  return x.transpose() * w * x == w;
}

bool is_symplectic(const ZMatrix& x, unsigned g) {
  if (x.rows() != 2 * g || x.cols() != 2 * g) throw InvalidArgument("is_symplectic: dimension mismatch");
  const ZMatrix w = omega_integral(g);
  return x.transpose() * w * x == w;
}

bool is_lie_element(const ModMatrix& a, unsigned g) {
  check_square(a, g, "is_lie_element");
  const ModMatrix w = omega(g, a.modulus());
  return (a.transpose() * w + w * a).is_zero();
}

ModMatrix elementary(unsigned g, std::uint64_t modulus, std::size_t r, std::size_t c) {
  ModMatrix m(2 * g, 2 * g, modulus);
  m.set(r, c, 1);
  return m;
}

namespace {

// w = v^t Omega for v in coordinates (a, b): (v^t Omega)_j = -v_{g+j} for j < g, v_{j-g} otherwise.
std::vector<std::int64_t> row_times_omega(std::span<const std::int64_t> v) {
  const std::size_t n = v.size();
  const std::size_t g = n / 2;
  std::vector<std::int64_t> w(n);
  for (std::size_t j = 0; j < g; ++j) {
    w[j] = -v[g + j];
    w[g + j] = v[j];
  }
  return w;
}

}  // namespace

ModMatrix transvection(std::span<const std::int64_t> v, std::uint64_t modulus) {
  if (v.size() % 2 != 0 || v.empty()) throw InvalidArgument("transvection: vector length must be even");
  const auto w = row_times_omega(v);
  ModMatrix t = ModMatrix::identity(v.size(), modulus);
  for (std::size_t r = 0; r < v.size(); ++r)
    for (std::size_t c = 0; c < v.size(); ++c)
      if (v[r] != 0 && w[c] != 0) t.set(r, c, static_cast<std::int64_t>(t(r, c)) - v[r] * w[c]);
  return t;
}

ZMatrix integral_transvection_power(std::span<const std::int64_t> v, const Integer& exponent) {
  if (v.size() % 2 != 0 || v.empty()) throw InvalidArgument("transvection: vector length must be even");
  const auto w = row_times_omega(v);
  ZMatrix t = ZMatrix::identity(v.size());
  for (std::size_t r = 0; r < v.size(); ++r)
    for (std::size_t c = 0; c < v.size(); ++c)
      if (v[r] != 0 && w[c] != 0) t(r, c) -= exponent * Integer(static_cast<long>(v[r] * w[c]));
  return t;
}

std::vector<std::vector<std::int64_t>> generator_vectors(unsigned g) {
  check_genus(g);
  std::vector<std::vector<std::int64_t>> out;
  for (unsigned i = 0; i < 2 * g; ++i) {
    std::vector<std::int64_t> v(2 * g, 0);
    v[i] = 1;
    out.push_back(std::move(v));
  }
  for (unsigned i = 0; i < g; ++i)
    for (unsigned j = 0; j < g; ++j) {
      std::vector<std::int64_t> v(2 * g, 0);
      v[i] = 1;
      v[g + j] = 1;
      out.push_back(std::move(v));
    }
  return out;
}

std::vector<ModMatrix> symplectic_generators(unsigned g, std::uint64_t modulus) {
  std::vector<ModMatrix> out;
  for (const auto& v : generator_vectors(g)) out.push_back(transvection(v, modulus));
  return out;
}

Integer group_order_formula(unsigned g, std::uint64_t p, unsigned k) {
  check_genus(g);
  if (!is_prime(p)) throw InvalidArgument("group_order_formula: " + std::to_string(p) + " is not prime");
  if (k < 1) throw InvalidArgument("group_order_formula: k must be >= 1");
  Integer pz = static_cast<unsigned long>(p);
  Integer order;
  mpz_pow_ui(order.get_mpz_t(), pz.get_mpz_t(), (k - 1) * (2 * g * g + g) + g * g);
  for (unsigned i = 1; i <= g; ++i) {
    Integer q;
    mpz_pow_ui(q.get_mpz_t(), pz.get_mpz_t(), 2 * i);
    order *= q - 1;
  }
  return order;
}

Integer predicted_order(unsigned g, std::uint64_t modulus) {
  Integer order = 1;
  for (const auto& pp : crt_split(modulus)) order *= group_order_formula(g, pp.p, pp.k);
  return order;
}

ModMatrix reduce_level(const ModMatrix& x, unsigned g, std::uint64_t target) {
  if (!is_symplectic(x, g)) throw InvalidArgument("reduce_level: input is not symplectic");
  return x.reduce(target);
}

// ---------------------------------------------------------------------------
// CayleyData

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

}  // namespace

std::uint64_t CayleyData::hash_of(const std::uint64_t* packed) const {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (std::size_t w = 0; w < words_; ++w) h = mix64(h ^ packed[w]);
  return h;
}

void CayleyData::pack(const ModMatrix& x, std::uint64_t* out) const {
  const std::size_t per_word = 64 / bits_;
  std::fill(out, out + words_, 0);
  const auto entries = x.entries();
  for (std::size_t i = 0; i < entries.size(); ++i)
    out[i / per_word] |= std::uint64_t{entries[i]} << (bits_ * (i % per_word));
}

ModMatrix CayleyData::element(std::size_t i) const {
  if (i >= order()) throw InvalidArgument("CayleyData::element: index out of range");
  const std::size_t per_word = 64 / bits_;
  const std::uint64_t mask = (std::uint64_t{1} << bits_) - 1;
  const std::uint64_t* p = packed_.data() + i * words_;
  ModMatrix m(dim_, dim_, modulus_);
  for (std::size_t e = 0; e < dim_ * dim_; ++e)
    m.set(e / dim_, e % dim_, static_cast<std::int64_t>((p[e / per_word] >> (bits_ * (e % per_word))) & mask));
  return m;
}

void CayleyData::build_index() {
  std::size_t cap = 16;
  while (cap < 2 * order() + 2) cap <<= 1;
  index_.assign(cap, 0);
  index_mask_ = cap - 1;
  for (std::size_t i = 0; i < order(); ++i) {
    std::uint64_t h = hash_of(packed_.data() + i * words_) & index_mask_;
    while (index_[h] != 0) h = (h + 1) & index_mask_;
    index_[h] = static_cast<std::uint32_t>(i + 1);
  }
}

std::optional<std::size_t> CayleyData::index_of(const ModMatrix& x) const {
  if (x.rows() != dim_ || x.cols() != dim_ || x.modulus() != modulus_) return std::nullopt;
  std::vector<std::uint64_t> key(words_);
  pack(x, key.data());
  std::uint64_t h = hash_of(key.data()) & index_mask_;
  while (index_[h] != 0) {
    const std::size_t i = index_[h] - 1;
    if (std::equal(key.begin(), key.end(), packed_.begin() + static_cast<std::ptrdiff_t>(i * words_))) return i;
    h = (h + 1) & index_mask_;
  }
  return std::nullopt;
}

std::size_t CayleyData::multiply(std::size_t a, std::size_t b) const {
  // element(a) = s_{w0} ... s_{wm}; apply the word to b from the right end.
  const auto w = word(a);
  std::size_t x = b;
  for (auto it = w.rbegin(); it != w.rend(); ++it) x = left_multiply(x, *it);
  return x;
}

bool CayleyData::is_tree_edge(std::size_t i, std::size_t j) const {
  const std::uint32_t w = left_multiply(i, j);
  return parent_[w] == i && edge_[w] == j;
}

std::vector<std::uint32_t> CayleyData::word(std::size_t i) const {
  std::vector<std::uint32_t> w;
  while (parent_[i] != kNoParent) {
    w.push_back(edge_[i]);
    i = parent_[i];
  }
  return w;
}

std::size_t CayleyData::depth(std::size_t i) const {
  std::size_t d = 0;
  while (parent_[i] != kNoParent) {
    ++d;
    i = parent_[i];
  }
  return d;
}

void CayleyData::for_each_relator(const std::function<void(std::span<const int>)>& visit) const {
  std::vector<int> rel;
  std::vector<std::uint32_t> wu, ww;
  for (std::size_t u = 0; u < order(); ++u) {
    for (std::size_t j = 0; j < ngens_; ++j) {
      if (is_tree_edge(u, j)) continue;
      const std::size_t w = left_multiply(u, j);
      wu = word(u);
      ww = word(w);
      // Paths to the root share a common tail, which cancels freely.
      while (!wu.empty() && !ww.empty() && wu.back() == ww.back()) {
        wu.pop_back();
        ww.pop_back();
      }
      rel.clear();
      rel.push_back(static_cast<int>(j) + 1);
      for (auto a : wu) rel.push_back(static_cast<int>(a) + 1);
      for (auto it = ww.rbegin(); it != ww.rend(); ++it) rel.push_back(-(static_cast<int>(*it) + 1));
      visit(rel);
    }
  }
}

// ---------------------------------------------------------------------------
// Enumeration

class CayleyBuilder {
 public:
  static std::shared_ptr<CayleyData> build(std::size_t dim, std::uint64_t modulus,
                                           const std::vector<ModMatrix>& gens, std::size_t cap) {
    auto data = std::make_shared<CayleyData>();
    data->dim_ = dim;
    data->modulus_ = modulus;
    data->ngens_ = gens.size();
    data->bits_ = static_cast<unsigned>(std::bit_width(modulus - 1));
    const std::size_t per_word = 64 / data->bits_;
    data->words_ = (dim * dim + per_word - 1) / per_word;

    // Each generator as I + N with N sparse.
    struct Term {
      std::size_t r, c;
      std::uint64_t v;
    };
    std::vector<std::vector<Term>> sparse(gens.size());
    for (std::size_t j = 0; j < gens.size(); ++j)
      for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c) {
          const std::uint64_t v = (gens[j](r, c) + modulus - (r == c ? 1 : 0)) % modulus;
          if (v != 0) sparse[j].push_back({r, c, v});
        }

    std::size_t capacity = 1024;
    data->index_.assign(capacity, 0);
    data->index_mask_ = capacity - 1;
    const std::size_t words = data->words_;
    const unsigned bits = data->bits_;
    const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;

    auto grow = [&] {
      capacity <<= 1;
      data->index_.assign(capacity, 0);
      data->index_mask_ = capacity - 1;
      for (std::size_t i = 0; i < data->parent_.size(); ++i) {
        std::uint64_t h = data->hash_of(data->packed_.data() + i * words) & data->index_mask_;
        while (data->index_[h] != 0) h = (h + 1) & data->index_mask_;
        data->index_[h] = static_cast<std::uint32_t>(i + 1);
      }
    };

    std::vector<std::uint64_t> key(words);
    // Returns the index of the packed key, inserting it as a child of (parent, gen) if new.
    auto find_or_insert = [&](std::uint32_t parent, std::uint32_t gen) -> std::uint32_t {
      std::uint64_t h = data->hash_of(key.data()) & data->index_mask_;
      while (data->index_[h] != 0) {
        const std::size_t i = data->index_[h] - 1;
        if (std::equal(key.begin(), key.end(), data->packed_.begin() + static_cast<std::ptrdiff_t>(i * words)))
          return static_cast<std::uint32_t>(i);
        h = (h + 1) & data->index_mask_;
      }
      const std::size_t idx = data->parent_.size();
      if (idx >= cap) throw ResourceLimit("enumeration exceeded the order cap of " + std::to_string(cap));
      data->packed_.insert(data->packed_.end(), key.begin(), key.end());
      data->parent_.push_back(parent);
      data->edge_.push_back(gen);
      data->index_[h] = static_cast<std::uint32_t>(idx + 1);
      if (2 * (idx + 1) > capacity) grow();
      return static_cast<std::uint32_t>(idx);
    };

    data->pack(ModMatrix::identity(dim, modulus), key.data());
    find_or_insert(CayleyData::kNoParent, CayleyData::kNoParent);

    const std::size_t n2 = dim * dim;
    std::vector<std::uint64_t> cur(n2), out(n2);
    for (std::size_t u = 0; u < data->parent_.size(); ++u) {
      const std::uint64_t* p = data->packed_.data() + u * words;
      for (std::size_t e = 0; e < n2; ++e) cur[e] = (p[e / per_word] >> (bits * (e % per_word))) & mask;
      for (std::size_t j = 0; j < gens.size(); ++j) {
        out = cur;
        for (const auto& t : sparse[j])
          for (std::size_t k = 0; k < dim; ++k) out[t.r * dim + k] += t.v * cur[t.c * dim + k];
        std::fill(key.begin(), key.end(), 0);
        for (std::size_t e = 0; e < n2; ++e) key[e / per_word] |= (out[e] % modulus) << (bits * (e % per_word));
        data->table_.push_back(find_or_insert(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(j)));
      }
    }
    data->relator_count_ = data->order() * data->ngens_ - (data->order() - 1);
    return data;
  }
};

// ---------------------------------------------------------------------------
// Cache files

namespace {

constexpr std::array<char, 8> kMagic{'S', 'P', 'C', 'G', 'T', '\0', '\1', '\0'};

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) throw InternalError("SHA-256 init failed");
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_, data, n); }
  std::array<unsigned char, 32> finish() {
    std::array<unsigned char, 32> out{};
    unsigned len = 0;
    EVP_DigestFinal_ex(ctx_, out.data(), &len);
    return out;
  }

 private:
  EVP_MD_CTX* ctx_;
};

std::string to_hex(std::span<const unsigned char> bytes) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  for (unsigned char b : bytes) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 15]);
  }
  return s;
}

void put_le(std::vector<char>& buf, std::uint64_t v, std::size_t width) {
  for (std::size_t i = 0; i < width; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_le(const unsigned char* p, std::size_t width) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < width; ++i) v |= std::uint64_t{p[i]} << (8 * i);
  return v;
}

// Buffered writer that hashes everything it writes.
class HashingWriter {
 public:
  explicit HashingWriter(const std::filesystem::path& file) : out_(file, std::ios::binary | std::ios::trunc) {}
  bool ok() const { return static_cast<bool>(out_); }
  void put(std::uint64_t v, std::size_t width) {
    put_le(buf_, v, width);
    if (buf_.size() >= (1u << 20)) flush();
  }
  void raw(const char* p, std::size_t n) {
    buf_.insert(buf_.end(), p, p + n);
    if (buf_.size() >= (1u << 20)) flush();
  }
  void finish() {
    flush();
    const auto digest = sha_.finish();
    out_.write(reinterpret_cast<const char*>(digest.data()), static_cast<std::streamsize>(digest.size()));
    out_.flush();
  }

 private:
  void flush() {
    sha_.update(buf_.data(), buf_.size());
    out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    buf_.clear();
  }
  std::ofstream out_;
  std::vector<char> buf_;
  Sha256 sha_;
};

class HashingReader {
 public:
  explicit HashingReader(const std::filesystem::path& file) : in_(file, std::ios::binary) {}
  bool ok() const { return static_cast<bool>(in_); }
  bool read(void* dst, std::size_t n) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) return false;
    sha_.update(dst, n);
    return true;
  }
  bool get(std::uint64_t& v, std::size_t width) {
    unsigned char b[8];
    if (!read(b, width)) return false;
    v = get_le(b, width);
    return true;
  }
  bool verify_digest() {
    std::array<unsigned char, 32> stored{};
    in_.read(reinterpret_cast<char*>(stored.data()), 32);
    if (in_.gcount() != 32) return false;
    const auto actual = sha_.finish();
    char extra;
    if (in_.read(&extra, 1)) return false;
    return stored == actual;
  }

 private:
  std::ifstream in_;
  Sha256 sha_;
};

}  // namespace

struct CayleyCacheIo {
  static bool write(const CayleyData& d, const std::filesystem::path& file) {
    if (d.ngens_ > 127) return false;
    const std::filesystem::path tmp = file.string() + ".tmp";
    {
      HashingWriter w(tmp);
      if (!w.ok()) return false;
      w.raw(kMagic.data(), kMagic.size());
      w.put(d.order(), 8);
      w.put(d.dim_, 4);
      w.put(d.modulus_, 8);
      w.put(d.ngens_, 4);
      const std::size_t width = canonical_entry_width(d.modulus_);
      for (std::size_t i = 0; i < d.order(); ++i) {
        const ModMatrix x = d.element(i);
        for (Residue e : x.entries()) w.put(e, width);
      }
      for (auto p : d.parent_) w.put(p, 4);
      for (auto e : d.edge_) w.put(e, 4);
      for (auto t : d.table_) w.put(t, 4);
      w.put(d.relator_count_, 8);
      d.for_each_relator([&](std::span<const int> rel) {
        w.put(rel.size(), 2);
        for (int x : rel) w.put(static_cast<std::uint8_t>(static_cast<std::int8_t>(x)), 1);
      });
      w.finish();
      if (!w.ok()) return false;
    }
    std::error_code ec;
    std::filesystem::rename(tmp, file, ec);
    return !ec;
  }

  static std::shared_ptr<const CayleyData> read(const std::filesystem::path& file, std::size_t dim,
                                                std::uint64_t modulus, std::size_t ngens) {
    HashingReader r(file);
    if (!r.ok()) return nullptr;
    std::array<char, 8> magic{};
    if (!r.read(magic.data(), magic.size()) || magic != kMagic) return nullptr;
    std::uint64_t count = 0, fdim = 0, fmod = 0, fgens = 0;
    if (!r.get(count, 8) || !r.get(fdim, 4) || !r.get(fmod, 8) || !r.get(fgens, 4)) return nullptr;
    if (fdim != dim || fmod != modulus || fgens != ngens || count == 0 || count > 0xFFFFFFF0ULL) return nullptr;

    auto d = std::make_shared<CayleyData>();
    d->dim_ = dim;
    d->modulus_ = modulus;
    d->ngens_ = ngens;
    d->bits_ = static_cast<unsigned>(std::bit_width(modulus - 1));
    const std::size_t per_word = 64 / d->bits_;
    d->words_ = (dim * dim + per_word - 1) / per_word;
    d->from_cache_ = true;

    const std::size_t width = canonical_entry_width(modulus);
    const std::size_t n2 = dim * dim;
    std::vector<unsigned char> buf(n2 * width);
    d->packed_.assign(count * d->words_, 0);
    for (std::size_t i = 0; i < count; ++i) {
      if (!r.read(buf.data(), buf.size())) return nullptr;
      std::uint64_t* out = d->packed_.data() + i * d->words_;
      for (std::size_t e = 0; e < n2; ++e) {
        const std::uint64_t v = get_le(buf.data() + e * width, width);
        if (v >= modulus) return nullptr;
        out[e / per_word] |= v << (d->bits_ * (e % per_word));
      }
    }
    auto read_u32s = [&](std::vector<std::uint32_t>& dst, std::size_t n) {
      dst.resize(n);
      std::vector<unsigned char> raw(4 * n);
      if (!r.read(raw.data(), raw.size())) return false;
      for (std::size_t i = 0; i < n; ++i) dst[i] = static_cast<std::uint32_t>(get_le(raw.data() + 4 * i, 4));
      return true;
    };
    if (!read_u32s(d->parent_, count) || !read_u32s(d->edge_, count) || !read_u32s(d->table_, count * ngens))
      return nullptr;

    // Structural checks: BFS tree shape and table consistency.
    if (d->parent_[0] != CayleyData::kNoParent) return nullptr;
    for (std::size_t i = 1; i < count; ++i) {
      if (d->parent_[i] >= i || d->edge_[i] >= ngens) return nullptr;
      if (d->table_[d->parent_[i] * ngens + d->edge_[i]] != i) return nullptr;
    }
    for (auto t : d->table_)
      if (t >= count) return nullptr;

    std::uint64_t rel_count = 0;
    if (!r.get(rel_count, 8) || rel_count != count * ngens - (count - 1)) return nullptr;
    std::vector<unsigned char> rel(1 << 16);
    for (std::uint64_t i = 0; i < rel_count; ++i) {
      std::uint64_t len = 0;
      if (!r.get(len, 2) || !r.read(rel.data(), len)) return nullptr;
    }
    if (!r.verify_digest()) return nullptr;
    d->relator_count_ = rel_count;
    d->build_index();
    return d;
  }
};

bool write_cayley_cache(const CayleyData& data, const std::filesystem::path& file) {
  return CayleyCacheIo::write(data, file);
}

std::shared_ptr<const CayleyData> read_cayley_cache(const std::filesystem::path& file, std::size_t dim,
                                                    std::uint64_t modulus, std::size_t generator_count) {
  return CayleyCacheIo::read(file, dim, modulus, generator_count);
}

std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv("SPCGT_CACHE_DIR"); env && *env) return env;
  return ".spcgt-cache";
}

// ---------------------------------------------------------------------------
// GeneratedGroup

GeneratedGroup::GeneratedGroup(unsigned g, std::uint64_t modulus, std::vector<ModMatrix> generators)
    : g_(g), modulus_(modulus), generators_(std::move(generators)) {
  check_genus(g);
  if (modulus < 2 || modulus > kMaxModulus) throw InvalidArgument("modulus out of range");
  for (const auto& x : generators_) {
    if (x.modulus() != modulus) throw InvalidArgument("generator modulus mismatch");
    if (!is_symplectic(x, g)) throw InvalidArgument("generator is not symplectic");
  }
}

GeneratedGroup GeneratedGroup::symplectic(unsigned g, std::uint64_t modulus) {
  return GeneratedGroup(g, modulus, symplectic_generators(g, modulus));
}

const CayleyData& GeneratedGroup::cayley() const {
  if (!cayley_) throw StateError("group has not been enumerated");
  return *cayley_;
}

std::string GeneratedGroup::cache_key() const {
  Sha256 sha;
  std::vector<char> header;
  put_le(header, g_, 4);
  put_le(header, modulus_, 8);
  sha.update(header.data(), header.size());
  for (const auto& x : generators_) {
    const auto bytes = canonical_encoding(x);
    sha.update(bytes.data(), bytes.size());
  }
  const auto digest = sha.finish();
  return to_hex(digest);
}

std::filesystem::path cache_file_path(const GeneratedGroup& group, const std::filesystem::path& dir) {
  return dir / (group.cache_key() + ".spcgt");
}

GeneratedGroup enumerate(GeneratedGroup group, const EnumerationOptions& options) {
  const Integer bound = predicted_order(group.g_, group.modulus_);
  if (bound > Integer(static_cast<unsigned long>(options.order_cap)))
    throw ResourceLimit("predicted order " + bound.get_str() + " exceeds the enumeration cap of " +
                        std::to_string(options.order_cap));
  const bool standard = group.generators_ == symplectic_generators(group.g_, group.modulus_);

  std::shared_ptr<const CayleyData> data;
  std::filesystem::path file;
  if (options.cache_dir) {
    file = cache_file_path(group, *options.cache_dir);
    data = read_cayley_cache(file, group.dim(), group.modulus_, group.generators_.size());
    if (data && standard && Integer(static_cast<unsigned long>(data->order())) != bound) data = nullptr;
  }
  if (!data) {
    auto built = CayleyBuilder::build(group.dim(), group.modulus_, group.generators_, options.order_cap);
    if (standard && Integer(static_cast<unsigned long>(built->order())) != bound)
      throw InternalError("generators enumerate " + std::to_string(built->order()) + " elements, expected " +
                          bound.get_str());
    if (options.cache_dir) {
      std::error_code ec;
      std::filesystem::create_directories(*options.cache_dir, ec);
      if (!ec) write_cayley_cache(*built, file);
    }
    data = std::move(built);
  }
  group.cayley_ = std::move(data);
  return group;
}

// ---------------------------------------------------------------------------
// Congruence elements

CongruenceElement::CongruenceElement(ZMatrix matrix, std::uint64_t level) : matrix_(std::move(matrix)), level_(level) {
  if (level < 2) throw InvalidArgument("congruence level must be >= 2");
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0 || matrix_.rows() % 2 != 0)
    throw InvalidArgument("congruence element must be a square matrix of even size");
  const ZMatrix id = ZMatrix::identity(matrix_.rows());
  const Integer lz = static_cast<unsigned long>(level);
  for (std::size_t r = 0; r < matrix_.rows(); ++r)
    for (std::size_t c = 0; c < matrix_.cols(); ++c) {
      const Integer diff = matrix_(r, c) - id(r, c);
      if (!mpz_divisible_p(diff.get_mpz_t(), lz.get_mpz_t()))
        throw InvalidArgument("matrix is not congruent to the identity modulo " + std::to_string(level));
    }
  if (!is_symplectic(matrix_, genus())) throw InvalidArgument("matrix is not symplectic over Z");
}

CongruenceElement CongruenceElement::operator*(const CongruenceElement& other) const {
  if (level_ != other.level_) throw InvalidArgument("congruence elements of different levels");
  return CongruenceElement(matrix_ * other.matrix_, level_);
}

ModMatrix phi(const CongruenceElement& m) {
  const std::size_t n = m.matrix().rows();
  const Integer lz = static_cast<unsigned long>(m.level());
  ModMatrix a(n, n, m.level());
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      Integer diff = m.matrix()(r, c) - (r == c ? 1 : 0);
      a.set(r, c, Integer(diff / lz));
    }
  return a;
}

std::vector<std::uint8_t> igusa_vector(const CongruenceElement& m) {
  if (m.level() % 2 != 0) throw InvalidArgument("igusa_vector: level must be even");
  const unsigned g = m.genus();
  const Integer lz = static_cast<unsigned long>(m.level());
  std::vector<std::uint8_t> out(2 * g);
  for (unsigned i = 0; i < g; ++i) {
    const Integer b = m.matrix()(i, g + i) / lz;
    const Integer c = m.matrix()(g + i, i) / lz;
    out[i] = static_cast<std::uint8_t>(mpz_odd_p(b.get_mpz_t()) ? 1 : 0);
    out[g + i] = static_cast<std::uint8_t>(mpz_odd_p(c.get_mpz_t()) ? 1 : 0);
  }
  return out;
}

CongruenceElement sample_congruence_element(unsigned g, std::uint64_t level, std::uint64_t seed,
                                            std::size_t word_length) {
  check_genus(g);
  if (word_length < 1) throw InvalidArgument("sample_congruence_element: word_length must be >= 1");
  std::vector<std::vector<std::int64_t>> vectors;
  for (unsigned i = 0; i < 2 * g; ++i) {
    std::vector<std::int64_t> v(2 * g, 0);
    v[i] = 1;
    vectors.push_back(v);
    for (unsigned j = i + 1; j < 2 * g; ++j) {
      std::vector<std::int64_t> w = v;
      w[j] = 1;
      vectors.push_back(std::move(w));
    }
  }
  std::mt19937_64 rng(seed);
  ZMatrix m = ZMatrix::identity(2 * g);
  const Integer lz = static_cast<unsigned long>(level);
  for (std::size_t t = 0; t < word_length; ++t) {
    const auto& v = vectors[rng() % vectors.size()];
    const Integer e = (rng() & 1) ? lz : Integer(-lz);
    m = m * integral_transvection_power(v, e);
  }
  return CongruenceElement(std::move(m), level);
}

// ---------------------------------------------------------------------------
// Non-split lifts

bool NonsplitReport::all_exceed() const {
  return std::all_of(trials.begin(), trials.end(), [](const NonsplitTrial& t) { return t.exceeds; });
}

std::uint64_t matrix_order(const ModMatrix& x, std::uint64_t limit) {
  ModMatrix y = x;
  for (std::uint64_t n = 1; n <= limit; ++n) {
    if (y.is_identity()) return n;
    y = y * x;
  }
  return 0;
}

NonsplitReport nonsplit_witness(std::uint64_t p, unsigned k, unsigned g, std::size_t trial_count,
                                std::uint64_t seed) {
  check_genus(g);
  if (!is_prime(p) || k < 1) throw InvalidArgument("nonsplit_witness: need a prime p and k >= 1");
  if ((p == 2 && k == 1) || (p == 3 && k == 1))
    throw InvalidArgument("nonsplit_witness: the extension splits for (p, k) in {(2,1), (3,1)}");
  std::uint64_t pk = 1;
  for (unsigned i = 0; i < k; ++i) pk *= p;
  const std::uint64_t q = pk * p;
  if (q > kMaxModulus) throw InvalidArgument("nonsplit_witness: p^(k+1) too large");

  const std::size_t n = 2 * g;
  const ModMatrix base = ModMatrix::identity(n, q) + elementary(g, q, 0, g);
  const ModMatrix w = omega(g, q);
  std::mt19937_64 rng(seed);
  NonsplitReport report{p, k, g, {}};
  for (std::size_t t = 0; t < trial_count; ++t) {
    // B = -Omega S with S symmetric lies in sp_2g.
    ModMatrix s(n, n, q);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = r; c < n; ++c) {
        const auto v = static_cast<std::int64_t>(rng() % p);
        s.set(r, c, v);
        s.set(c, r, v);
      }
    const ModMatrix b = (q - 1) * (w * s);
    const ModMatrix lift = base * (ModMatrix::identity(n, q) + pk * b);
    if (!is_symplectic(lift, g) || !(lift.reduce(pk) == base.reduce(pk)))
      throw InternalError("nonsplit_witness: constructed lift is not a symplectic lift");
    NonsplitTrial trial{lift, matrix_order(lift, q), false};
    trial.exceeds = trial.order == 0 || trial.order > pk;
    report.trials.push_back(std::move(trial));
  }
  return report;
}

}  // namespace spcgt
