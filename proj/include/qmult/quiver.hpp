#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "qmult/errors.hpp"

namespace qmult {

struct Arrow {
  std::string id, from, to;
};

/// Quiver with a positive multiplicity per vertex. All derived data is keyed
/// by id, never by position.
struct QuiverWithMult {
  std::vector<std::string> vertices;
  std::vector<Arrow> arrows;
  std::map<std::string, int> mult;

  void validate() const {
    std::set<std::string> vs(vertices.begin(), vertices.end());
    require(vs.size() == vertices.size(), Err::InvalidParams, "duplicate vertex id");
    std::set<std::string> as;
    for (const Arrow& a : arrows) {
      require(vs.count(a.from) && vs.count(a.to), Err::InvalidParams,
              "arrow endpoint not a declared vertex: " + a.id);
      require(as.insert(a.id).second, Err::InvalidParams, "duplicate arrow id: " + a.id);
    }
    for (const std::string& v : vertices) {
      auto it = mult.find(v);
      require(it != mult.end() && it->second >= 1, Err::InvalidParams,
              "missing or nonpositive multiplicity at " + v);
    }
  }

  int m(const std::string& v) const { return mult.at(v); }
  const Arrow& arrow(const std::string& id) const {
    for (const Arrow& a : arrows)
      if (a.id == id) return a;
    fail(Err::InvalidParams, "no arrow " + id);
  }
};

/// Integer vector indexed by vertex id (ranks, stability parameters, ...).
using IntVec = std::map<std::string, long long>;

inline long long dot(const IntVec& a, const IntVec& b) {
  long long s = 0;
  for (const auto& [v, x] : a) {
    auto it = b.find(v);
    if (it != b.end()) s += x * it->second;
  }
  return s;
}

inline IntVec const_vec(const QuiverWithMult& Q, long long val) {
  IntVec r;
  for (const std::string& v : Q.vertices) r[v] = val;
  return r;
}

inline bool is_indivisible(const IntVec& r) {
  long long g = 0;
  for (const auto& [v, x] : r) g = std::gcd(g, x);
  return g == 1;
}

struct StabilityPair {
  IntVec theta, rho;
};

struct PairConsts {
  int m_ij, mu_ij, f_ij, f_ji;  // f_ji = m_i/m_ij (source side), f_ij = m_j/m_ij
};

inline PairConsts pair_consts(int mi, int mj) {
  int g = std::gcd(mi, mj);
  return PairConsts{g, mi / g * mj, mj / g, mi / g};
}

struct DerivedConstants {
  std::map<std::pair<std::string, std::string>, PairConsts> pairs;  // ordered (i, j)
  int delta = 1;  // gcd of multiplicities
  int big_m = 1;  // lcm of multiplicities
};

inline DerivedConstants derived_constants(const QuiverWithMult& Q) {
  DerivedConstants d;
  d.delta = 0;
  d.big_m = 1;
  for (const std::string& v : Q.vertices) {
    d.delta = std::gcd(d.delta, Q.m(v));
    d.big_m = std::lcm(d.big_m, Q.m(v));
  }
  if (d.delta == 0) d.delta = 1;  // empty quiver
  for (const std::string& i : Q.vertices)
    for (const std::string& j : Q.vertices) d.pairs[{i, j}] = pair_consts(Q.m(i), Q.m(j));
  return d;
}

inline PairConsts arrow_consts(const QuiverWithMult& Q, const Arrow& a) {
  return pair_consts(Q.m(a.from), Q.m(a.to));
}

/// <r,s> = sum_i m_i r_i s_i - sum_{a:i->j} mu_ij r_i s_j
inline long long euler_form(const QuiverWithMult& Q, const IntVec& r, const IntVec& s) {
  long long acc = 0;
  for (const std::string& v : Q.vertices) acc += static_cast<long long>(Q.m(v)) * r.at(v) * s.at(v);
  for (const Arrow& a : Q.arrows)
    acc -= static_cast<long long>(arrow_consts(Q, a).mu_ij) * r.at(a.from) * s.at(a.to);
  return acc;
}

inline long long rep_space_dim(const QuiverWithMult& Q, const IntVec& r) {
  long long acc = 0;
  for (const Arrow& a : Q.arrows)
    acc += static_cast<long long>(arrow_consts(Q, a).mu_ij) * r.at(a.from) * r.at(a.to);
  return acc;
}

enum class Genericity { theta_generic, pair_generic, neither };

inline const char* genericity_name(Genericity g) {
  switch (g) {
    case Genericity::theta_generic: return "theta_generic";
    case Genericity::pair_generic: return "pair_generic";
    case Genericity::neither: return "neither";
  }
  return "?";
}

/// Scan all 0 < r' < r in the componentwise box.
template <class Fn>
void for_each_proper_subvector(const IntVec& r, Fn&& fn) {
  std::vector<std::string> keys;
  std::vector<long long> caps;
  for (const auto& [v, x] : r) {
    keys.push_back(v);
    caps.push_back(x);
  }
  std::vector<long long> cur(keys.size(), 0);
  while (true) {
    std::size_t i = 0;
    for (; i < cur.size(); ++i) {
      if (++cur[i] <= caps[i]) break;
      cur[i] = 0;
    }
    if (i == cur.size()) break;
    bool is_full = true;
    for (std::size_t k = 0; k < cur.size(); ++k)
      if (cur[k] != caps[k]) { is_full = false; break; }
    if (is_full) continue;
    IntVec sub;
    for (std::size_t k = 0; k < keys.size(); ++k) sub[keys[k]] = cur[k];
    fn(sub);
  }
}

inline Genericity is_generic(const StabilityPair& pair, const IntVec& r) {
  require(dot(pair.theta, r) == 0, Err::ThetaNotOrthogonal, "theta . r != 0");
  bool theta_ok = true, pair_ok = true;
  for_each_proper_subvector(r, [&](const IntVec& sub) {
    long long t = dot(pair.theta, sub);
    if (t == 0) {
      theta_ok = false;
      if (dot(pair.rho, sub) == 0) pair_ok = false;
    }
  });
  if (theta_ok) return Genericity::theta_generic;
  if (pair_ok) return Genericity::pair_generic;
  return Genericity::neither;
}

struct FramedSetup {
  QuiverWithMult quiver;       // Q_f
  IntVec rank_hat;             // r with 1 at infinity
  IntVec theta_hat;
  long long ell = 0;
  std::string infinity = "inf";
  std::vector<std::string> framing_arrow_ids;
};

/// Crawley-Boevey construction: adjoin a vertex "inf" with f_i arrows inf->i.
/// theta_hat is fixed as l*theta_i + 1 on Q_0 and -sum r_i at infinity with
/// l = 1 + sum r_i, which is generic with respect to rank_hat.
/// m_infinity defaults to 1; the Grassmannian-with-multiplicities setup uses
/// a larger value there.
inline FramedSetup build_framed(const QuiverWithMult& Q, const IntVec& framing, const IntVec& r,
                                const IntVec& theta, int m_infinity = 1) {
  FramedSetup out;
  out.quiver = Q;
  std::string inf = "inf";
  while (std::find(Q.vertices.begin(), Q.vertices.end(), inf) != Q.vertices.end()) inf += "_";
  out.infinity = inf;
  out.quiver.vertices.push_back(inf);
  out.quiver.mult[inf] = m_infinity;
  for (const std::string& v : Q.vertices) {
    long long fi = framing.count(v) ? framing.at(v) : 0;
    require(fi >= 0, Err::InvalidParams, "negative framing at " + v);
    for (long long k = 1; k <= fi; ++k) {
      std::string id = "b_" + v + "_" + std::to_string(k);
      out.quiver.arrows.push_back(Arrow{id, inf, v});
      out.framing_arrow_ids.push_back(id);
    }
  }
  out.quiver.validate();
  long long total = 0;
  for (const std::string& v : Q.vertices) total += r.at(v);
  out.ell = 1 + total;
  out.rank_hat = r;
  out.rank_hat[inf] = 1;
  for (const std::string& v : Q.vertices)
    out.theta_hat[v] = out.ell * (theta.count(v) ? theta.at(v) : 0) + 1;
  out.theta_hat[inf] = -total;
  return out;
}

struct ThickArrow {
  std::string base;   // original arrow id
  int m, f1, f2;      // 0<=m<m_ij, 0<=f1<f_ji, 0<=f2<f_ij
  long long weight;   // alpha_j (m f_ij + f2) + alpha_i (f_ji - 1 - f1)
  std::string from, to;
  std::string id() const {
    return base + "[" + std::to_string(m) + "," + std::to_string(f1) + "," + std::to_string(f2) + "]";
  }
};

/// The thickened quiver Q_m: mu_ij arrows per original arrow, carrying the
/// external-grading weights for the given alpha.
inline std::vector<ThickArrow> thickened_quiver(const QuiverWithMult& Q, const IntVec& alpha) {
  std::vector<ThickArrow> out;
  for (const Arrow& a : Q.arrows) {
    PairConsts pc = arrow_consts(Q, a);
    long long ai = alpha.at(a.from), aj = alpha.at(a.to);
    require(ai > 0 && aj > 0, Err::InvalidParams, "alpha must be positive");
    for (int m = 0; m < pc.m_ij; ++m)
      for (int f1 = 0; f1 < pc.f_ji; ++f1)
        for (int f2 = 0; f2 < pc.f_ij; ++f2)
          out.push_back(ThickArrow{a.id, m, f1, f2,
                                   aj * (static_cast<long long>(m) * pc.f_ij + f2) +
                                       ai * (pc.f_ji - 1 - f1),
                                   a.from, a.to});
  }
  return out;
}

struct UnfoldedArrow {
  std::string base;
  int n;        // index in Z/mu_ij; (n_i, n_j) = (n mod m_i, n mod m_j)
  std::string from, to;
};

struct UnfoldedQuiver {
  QuiverWithMult quiver;  // constant multiplicity M
  std::vector<UnfoldedArrow> correspondence;
};

inline std::string unfolded_vertex(const std::string& v, int n) {
  return v + "@" + std::to_string(n);
}

/// Appendix unfolding: vertex (i, n) for n in Z/m_i, mu_ij arrows per original
/// arrow, all multiplicities lcm(m).
inline UnfoldedQuiver unfolded_quiver(const QuiverWithMult& Q) {
  UnfoldedQuiver out;
  DerivedConstants d = derived_constants(Q);
  for (const std::string& v : Q.vertices)
    for (int n = 0; n < Q.m(v); ++n) {
      out.quiver.vertices.push_back(unfolded_vertex(v, n));
      out.quiver.mult[unfolded_vertex(v, n)] = d.big_m;
    }
  for (const Arrow& a : Q.arrows) {
    PairConsts pc = arrow_consts(Q, a);
    int mi = Q.m(a.from), mj = Q.m(a.to);
    for (int n = 0; n < pc.mu_ij; ++n) {
      std::string from = unfolded_vertex(a.from, n % mi);
      std::string to = unfolded_vertex(a.to, n % mj);
      std::string id = a.id + "@" + std::to_string(n);
      out.quiver.arrows.push_back(Arrow{id, from, to});
      out.correspondence.push_back(UnfoldedArrow{a.id, n, from, to});
    }
  }
  out.quiver.validate();
  return out;
}

/// Adds a* : j -> i for each a : i -> j.
inline QuiverWithMult double_quiver(const QuiverWithMult& Q) {
  QuiverWithMult out = Q;
  for (const Arrow& a : Q.arrows) out.arrows.push_back(Arrow{a.id + "*", a.to, a.from});
  out.validate();
  return out;
}

inline bool is_reverse_arrow(const std::string& id) { return !id.empty() && id.back() == '*'; }

}  // namespace qmult
