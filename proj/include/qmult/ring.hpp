#pragma once

#include <string>
#include <vector>

#include "qmult/errors.hpp"
#include "qmult/field.hpp"
#include "qmult/linalg.hpp"

namespace qmult {

/// Element of k_m = k[e]/(e^m): exactly m coefficients, degree-indexed from 0.
template <class K>
struct TruncPoly {
  int m = 1;
  std::vector<K> c;

  TruncPoly() : c(1, K()) {}
  explicit TruncPoly(int order) : m(order), c(order, K()) {
    require(order >= 1, Err::InvalidParams, "truncation order must be positive");
  }
  TruncPoly(int order, std::vector<K> coeffs) : m(order), c(std::move(coeffs)) {
    require(static_cast<int>(c.size()) == m, Err::MismatchedRing, "coefficient count != m");
  }

  static TruncPoly constant(int order, const K& x) {
    TruncPoly t(order);
    t.c[0] = x;
    return t;
  }
  static TruncPoly eps_power(int order, int j) {
    TruncPoly t(order);
    if (j < order) t.c[j] = k_one<K>();
    return t;
  }

  bool is_zero() const {
    for (const K& x : c)
      if (!x.is_zero()) return false;
    return true;
  }
  bool is_unit() const { return !c[0].is_zero(); }

  friend bool operator==(const TruncPoly& a, const TruncPoly& b) {
    if (a.m != b.m) return false;
    for (int i = 0; i < a.m; ++i)
      if (a.c[i] != b.c[i]) return false;
    return true;
  }
  friend bool operator!=(const TruncPoly& a, const TruncPoly& b) { return !(a == b); }
};

template <class K>
void check_same_ring(const TruncPoly<K>& a, const TruncPoly<K>& b) {
  require(a.m == b.m, Err::MismatchedRing, "truncation orders differ");
}

template <class K>
TruncPoly<K> tp_add(const TruncPoly<K>& a, const TruncPoly<K>& b) {
  check_same_ring(a, b);
  TruncPoly<K> r(a.m);
  for (int i = 0; i < a.m; ++i) r.c[i] = a.c[i] + b.c[i];
  return r;
}

template <class K>
TruncPoly<K> tp_sub(const TruncPoly<K>& a, const TruncPoly<K>& b) {
  check_same_ring(a, b);
  TruncPoly<K> r(a.m);
  for (int i = 0; i < a.m; ++i) r.c[i] = a.c[i] - b.c[i];
  return r;
}

template <class K>
TruncPoly<K> tp_neg(const TruncPoly<K>& a) {
  TruncPoly<K> r(a.m);
  for (int i = 0; i < a.m; ++i) r.c[i] = -a.c[i];
  return r;
}

/// Convolution truncated at degree m.
template <class K>
TruncPoly<K> tp_mul(const TruncPoly<K>& a, const TruncPoly<K>& b) {
  check_same_ring(a, b);
  TruncPoly<K> r(a.m);
  for (int i = 0; i < a.m; ++i)
    for (int j = 0; i + j < a.m; ++j) r.c[i + j] += a.c[i] * b.c[j];
  return r;
}

template <class K>
TruncPoly<K> tp_scale(const K& s, const TruncPoly<K>& a) {
  TruncPoly<K> r(a.m);
  for (int i = 0; i < a.m; ++i) r.c[i] = s * a.c[i];
  return r;
}

/// Power-series inverse; needs a unit constant term.
template <class K>
TruncPoly<K> tp_inv(const TruncPoly<K>& a) {
  require(!a.c[0].is_zero(), Err::NonUnit, "constant term is zero");
  TruncPoly<K> r(a.m);
  K inv0 = a.c[0].inv();
  r.c[0] = inv0;
  for (int k = 1; k < a.m; ++k) {
    K acc{};
    for (int i = 1; i <= k; ++i) acc += a.c[i] * r.c[k - i];
    r.c[k] = -(inv0 * acc);
  }
  return r;
}

template <class K>
TruncPoly<K> tp_div(const TruncPoly<K>& a, const TruncPoly<K>& b) {
  return tp_mul(a, tp_inv(b));
}

/// Res(e^{-m} a(e)) = top coefficient a_{m-1}.
template <class K>
K residue(const TruncPoly<K>& a) {
  return a.c[a.m - 1];
}

/// k_d -> k_m along e |-> e^{m/d}; requires d | m.
template <class K>
TruncPoly<K> embed_subring(const TruncPoly<K>& a, int m) {
  require(m % a.m == 0, Err::NotDivisible, "subring order does not divide target order");
  int step = m / a.m;
  TruncPoly<K> r(m);
  for (int j = 0; j < a.m; ++j) r.c[j * step] = a.c[j];
  return r;
}

template <class K>
std::string tp_to_string(const TruncPoly<K>& a) {
  std::string out;
  for (int i = 0; i < a.m; ++i) {
    if (a.c[i].is_zero()) continue;
    if (!out.empty()) out += " + ";
    if (i == 0) {
      out += a.c[i].str();
    } else {
      out += a.c[i].str() + "*e";
      if (i > 1) out += "^" + std::to_string(i);
    }
  }
  return out.empty() ? "0" : out;
}

}  // namespace qmult
