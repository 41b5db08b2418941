#pragma once

#include <gmpxx.h>

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "qmult/errors.hpp"

namespace qmult {

/// Exact rational scalar. Thin eager wrapper around mpq_class so that all
/// operators return plain values (Eigen-friendly, no gmp expression templates
/// leaking into deduced types).
struct Rat {
  mpq_class v;

  Rat() : v(0) {}
  Rat(int n) : v(n) {}
  Rat(long n) : v(n) {}
  Rat(long n, long d) : v(n, d) { v.canonicalize(); }
  explicit Rat(const mpq_class& x) : v(x) {}

  static Rat from_string(const std::string& s) {
    mpq_class x(s);
    x.canonicalize();
    return Rat(x);
  }

  bool is_zero() const { return v == 0; }
  Rat operator-() const { return Rat(mpq_class(-v)); }
  Rat& operator+=(const Rat& o) { v += o.v; return *this; }
  Rat& operator-=(const Rat& o) { v -= o.v; return *this; }
  Rat& operator*=(const Rat& o) { v *= o.v; return *this; }
  Rat& operator/=(const Rat& o) {
    require(o.v != 0, Err::NonUnit, "division by zero");
    v /= o.v;
    return *this;
  }
  friend Rat operator+(Rat a, const Rat& b) { return a += b; }
  friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
  friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
  friend Rat operator/(Rat a, const Rat& b) { return a /= b; }
  friend bool operator==(const Rat& a, const Rat& b) { return a.v == b.v; }
  friend bool operator!=(const Rat& a, const Rat& b) { return a.v != b.v; }

  Rat inv() const {
    require(v != 0, Err::NonUnit, "inverse of zero");
    return Rat(mpq_class(1) / v);
  }

  std::string str() const { return v.get_str(); }
  friend std::ostream& operator<<(std::ostream& os, const Rat& x) { return os << x.v.get_str(); }
};

/// Prime-field scalar with the modulus carried per element. p == 0 marks a
/// "field-less" integer (default construction, Eigen literals, permutation
/// matrices); it behaves as a plain integer until it meets a modulus, at
/// which point it reduces. Field-less values stay tiny in practice.
struct Fp {
  std::int64_t v = 0;
  std::uint32_t p = 0;

  Fp() = default;
  Fp(std::uint64_t val, std::uint32_t prime)
      : v(static_cast<std::int64_t>(val % prime)), p(prime) {}
  explicit Fp(int n) : v(n), p(0) {}

  static Fp from_int(long long n, std::uint32_t prime) {
    long long r = n % static_cast<long long>(prime);
    if (r < 0) r += prime;
    return Fp(static_cast<std::uint64_t>(r), prime);
  }

  void reduce() {
    if (p == 0) return;
    v %= static_cast<std::int64_t>(p);
    if (v < 0) v += p;
  }

  bool is_zero() const { return v == 0; }

  static std::uint32_t join(std::uint32_t a, std::uint32_t b) {
    if (a == 0) return b;
    if (b == 0) return a;
    require(a == b, Err::MismatchedRing, "elements of different prime fields");
    return a;
  }

  Fp operator-() const {
    Fp r = *this;
    r.v = -r.v;
    r.reduce();
    return r;
  }
  Fp& operator+=(const Fp& o) {
    p = join(p, o.p);
    v += o.v;
    reduce();
    return *this;
  }
  Fp& operator-=(const Fp& o) {
    p = join(p, o.p);
    v -= o.v;
    reduce();
    return *this;
  }
  Fp& operator*=(const Fp& o) {
    p = join(p, o.p);
    v *= o.v;
    reduce();
    return *this;
  }
  Fp& operator/=(const Fp& o) { return *this *= o.inv(); }
  friend Fp operator+(Fp a, const Fp& b) { return a += b; }
  friend Fp operator-(Fp a, const Fp& b) { return a -= b; }
  friend Fp operator*(Fp a, const Fp& b) { return a *= b; }
  friend Fp operator/(Fp a, const Fp& b) { return a /= b; }
  friend bool operator==(const Fp& a, const Fp& b) {
    if (a.v == b.v) return true;
    std::uint32_t q = join(a.p, b.p);
    if (q == 0) return false;
    Fp x = a, y = b;
    x.p = y.p = q;
    x.reduce();
    y.reduce();
    return x.v == y.v;
  }
  friend bool operator!=(const Fp& a, const Fp& b) { return !(a == b); }

  std::string str() const { return std::to_string(v); }
  friend std::ostream& operator<<(std::ostream& os, const Fp& x) { return os << x.v; }

  Fp inv() const {
    require(v != 0, Err::NonUnit, "inverse of zero in F_p");
    if (p == 0) {
      require(v == 1 || v == -1, Err::InvalidParams, "cannot invert a field-less value");
      return *this;
    }
    long long t = 0, nt = 1, r = p, nr = v;
    while (nr != 0) {
      long long q = r / nr;
      long long tmp = t - q * nt; t = nt; nt = tmp;
      tmp = r - q * nr; r = nr; nr = tmp;
    }
    if (t < 0) t += p;
    return Fp(static_cast<std::uint64_t>(t), p);
  }
};

/// Field descriptor used wherever generic code must mint elements or
/// enumerate them. Rationals are not enumerable; guards catch that upstream.
template <class K>
struct FieldCtx;

template <>
struct FieldCtx<Rat> {
  static constexpr bool enumerable = false;
  Rat from_int(long long n) const { return Rat(static_cast<long>(n)); }
  Rat parse(const std::string& s) const { return Rat::from_string(s); }
  long long size() const { return -1; }
  std::string name() const { return "Q"; }
};

template <>
struct FieldCtx<Fp> {
  std::uint32_t p = 2;
  static constexpr bool enumerable = true;
  Fp from_int(long long n) const { return Fp::from_int(n, p); }
  Fp parse(const std::string& s) const { return from_int(std::stoll(s)); }
  long long size() const { return p; }
  Fp element(std::uint32_t i) const { return Fp(i, p); }
  std::string name() const { return "Fp:" + std::to_string(p); }
};

template <class K>
using Mat = Eigen::Matrix<K, Eigen::Dynamic, Eigen::Dynamic>;
template <class K>
using Vec = Eigen::Matrix<K, Eigen::Dynamic, 1>;

template <class K>
Mat<K> zeros(Eigen::Index r, Eigen::Index c) {
  Mat<K> m(r, c);
  m.setConstant(K());
  return m;
}

template <class K>
Mat<K> identity(Eigen::Index n, const FieldCtx<K>& F) {
  Mat<K> m = zeros<K>(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = F.from_int(1);
  return m;
}

template <class K>
bool mat_eq(const Mat<K>& a, const Mat<K>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (a(i, j) != b(i, j)) return false;
  return true;
}

template <class K>
bool is_zero_mat(const Mat<K>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!m(i, j).is_zero()) return false;
  return true;
}

}  // namespace qmult

namespace Eigen {

template <>
struct NumTraits<qmult::Rat> : GenericNumTraits<qmult::Rat> {
  typedef qmult::Rat Real;
  typedef qmult::Rat NonInteger;
  typedef qmult::Rat Nested;
  typedef qmult::Rat Literal;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 40,
    MulCost = 60,
  };
  static inline Real epsilon() { return qmult::Rat(); }
  static inline Real dummy_precision() { return qmult::Rat(); }
  static inline int digits10() { return 0; }
};

template <>
struct NumTraits<qmult::Fp> : GenericNumTraits<qmult::Fp> {
  typedef qmult::Fp Real;
  typedef qmult::Fp NonInteger;
  typedef qmult::Fp Nested;
  typedef qmult::Fp Literal;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 0,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 3,
    MulCost = 6,
  };
  static inline Real epsilon() { return qmult::Fp(); }
  static inline Real dummy_precision() { return qmult::Fp(); }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen
