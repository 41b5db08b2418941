#pragma once

#include "qmult/stability.hpp"

// Trace pairing, the explicit moment map on the doubled quiver, fibers,
// equivariance weights for the revised grading, and the modified
// (theta, rho, pi)-stability behind Nakajima-type varieties.

namespace qmult {

/// Point of T*R(Q,m;r): x on Q plus one reversed HomElem per arrow of Q.
template <class K>
struct CotangentPoint {
  RepPoint<K> x;
  std::map<std::string, HomElem<K>> y;  // y[a] : M_{t(a)} -> M_{s(a)}

  friend bool operator==(const CotangentPoint& a, const CotangentPoint& b) {
    return a.x == b.x && a.y == b.y;
  }
};

template <class K>
CotangentPoint<K> zero_cotangent(const QuiverWithMult& Q, const IntVec& r) {
  CotangentPoint<K> p;
  p.x = zero_rep<K>(Q, r);
  for (const Arrow& a : Q.arrows)
    p.y[a.id] = HomElem<K>(Q.m(a.to), Q.m(a.from), static_cast<int>(r.at(a.to)),
                           static_cast<int>(r.at(a.from)));
  return p;
}

/// Flatten to a representation of the doubled quiver (a* arrows = y).
template <class K>
RepPoint<K> to_doubled(const QuiverWithMult& Q, const CotangentPoint<K>& p) {
  RepPoint<K> out;
  out.rank = p.x.rank;
  for (const Arrow& a : Q.arrows) {
    out.x[a.id] = p.x.x.at(a.id);
    out.x[a.id + "*"] = p.y.at(a.id);
  }
  return out;
}

template <class K>
CotangentPoint<K> from_doubled(const QuiverWithMult& Q, const RepPoint<K>& d) {
  CotangentPoint<K> p;
  p.x.rank = d.rank;
  for (const Arrow& a : Q.arrows) {
    p.x.x[a.id] = d.x.at(a.id);
    p.y[a.id] = d.x.at(a.id + "*");
  }
  return p;
}

/// <A, B> = Res(Tr(AB)) over k_{m_ij}: sum_l Tr(a_l b_{m_ij - 1 - l}).
template <class K>
K trace_pairing(const HomElem<K>& a, const HomElem<K>& b) {
  require(a.mi == b.mj && a.mj == b.mi && a.ri == b.rj && a.rj == b.ri, Err::ShapeMismatch,
          "trace pairing needs dual shapes");
  K acc{};
  for (int l = 0; l < a.mij; ++l) {
    Mat<K> prod = a.blocks[l] * b.blocks[a.mij - 1 - l];
    for (Eigen::Index i = 0; i < prod.rows(); ++i) acc += prod(i, i);
  }
  return acc;
}

/// Sum of the arrow-wise pairings; the dual pairing on T*R.
template <class K>
K cotangent_pairing(const QuiverWithMult& Q, const RepPoint<K>& x,
                    const std::map<std::string, HomElem<K>>& y) {
  K acc{};
  for (const Arrow& a : Q.arrows) acc += trace_pairing(x.x.at(a.id), y.at(a.id));
  return acc;
}

/// Lie pairing <xi, eta> = sum_i Res(Tr(xi_i eta_i)) over k_{m_i}.
template <class K>
K lie_pairing(const QuiverWithMult& Q, const std::map<std::string, MatPoly<K>>& xi,
              const std::map<std::string, MatPoly<K>>& eta) {
  K acc{};
  for (const std::string& v : Q.vertices) {
    const MatPoly<K>& a = xi.at(v);
    const MatPoly<K>& b = eta.at(v);
    // top coefficient of Tr(ab)
    for (int l = 0; l < a.m; ++l) {
      Mat<K> prod = a.c[l] * b.c[a.m - 1 - l];
      for (Eigen::Index i = 0; i < prod.rows(); ++i) acc += prod(i, i);
    }
  }
  return acc;
}

/// mu(x,y)_i = sum_{a: j->i} sum_f e^f x_a y_a e^{F-1-f}
///           - sum_{a: i->j} sum_f e^f y_a x_a e^{F-1-f},   F = m_i / m_ij.
template <class K>
std::map<std::string, MatPoly<K>> moment_map(const QuiverWithMult& Q,
                                             const CotangentPoint<K>& p) {
  std::map<std::string, MatPoly<K>> mu;
  std::map<std::string, Mat<K>> acc;
  for (const std::string& v : Q.vertices) {
    int n = Q.m(v) * static_cast<int>(p.x.rank.at(v));
    acc[v] = zeros<K>(n, n);
  }
  for (const Arrow& a : Q.arrows) {
    Mat<K> xf = expand_full(p.x.x.at(a.id));
    Mat<K> yf = expand_full(p.y.at(a.id));
    {
      // incoming contribution at t(a)
      const std::string& i = a.to;
      int F = Q.m(i) / std::gcd(Q.m(a.from), Q.m(i));
      int ri = static_cast<int>(p.x.rank.at(i));
      Mat<K> C = xf * yf;
      for (int f = 0; f < F; ++f)
        acc[i] += eps_shift<K>(Q.m(i), ri, f) * C * eps_shift<K>(Q.m(i), ri, F - 1 - f);
    }
    {
      // outgoing contribution at s(a)
      const std::string& i = a.from;
      int F = Q.m(i) / std::gcd(Q.m(i), Q.m(a.to));
      int ri = static_cast<int>(p.x.rank.at(i));
      Mat<K> C = yf * xf;
      for (int f = 0; f < F; ++f)
        acc[i] -= eps_shift<K>(Q.m(i), ri, f) * C * eps_shift<K>(Q.m(i), ri, F - 1 - f);
    }
  }
  for (const std::string& v : Q.vertices) {
    int m = Q.m(v), r = static_cast<int>(p.x.rank.at(v));
    HomElem<K> h = compress_full(m, m, r, r, acc[v]);  // k_m-linearity check included
    MatPoly<K> g(m, r, r);
    for (int l = 0; l < m; ++l) g.c[l] = h.blocks[l];
    mu[v] = g;
  }
  return mu;
}

/// Infinitesimal-action pairing <xi . x, y>; the moment map is characterised
/// by its equality with <xi, mu(x,y)>.
template <class K>
K action_pairing(const QuiverWithMult& Q, const std::map<std::string, MatPoly<K>>& xi,
                 const CotangentPoint<K>& p) {
  return cotangent_pairing(Q, act_lie(Q, xi, p.x), p.y);
}

/// gamma (one k_{m_i}-matrix per vertex) lies in gl^0: orthogonal to the Lie
/// algebra of Delta_m, i.e. to (eps^{d m_i/delta} Id)_i for 0 <= d < delta.
template <class K>
bool in_gl0(const QuiverWithMult& Q, const IntVec& r,
            const std::map<std::string, MatPoly<K>>& gamma) {
  DerivedConstants d = derived_constants(Q);
  for (int dd = 0; dd < d.delta; ++dd) {
    std::map<std::string, MatPoly<K>> basis;
    for (const std::string& v : Q.vertices) {
      MatPoly<K> b(Q.m(v), r.at(v), r.at(v));
      int power = dd * Q.m(v) / d.delta;
      for (Eigen::Index i = 0; i < b.rows(); ++i) b.c[power](i, i) = k_one<K>();
      basis[v] = b;
    }
    if (!lie_pairing(Q, basis, gamma).is_zero()) return false;
  }
  return true;
}

template <class K>
struct FiberSolution {
  bool empty = false;
  CotangentPoint<K> particular;             // y part meaningful
  std::vector<CotangentPoint<K>> kernel;    // basis of the homogeneous space
  long long dim = 0;
};

/// Solve mu(x, y) = gamma, linear in y. gamma must lie in gl^0.
template <class K>
FiberSolution<K> moment_fiber_solve(const QuiverWithMult& Q, const RepPoint<K>& x,
                                    const std::map<std::string, MatPoly<K>>& gamma) {
  require(in_gl0(Q, x.rank, gamma), Err::GammaNotInGl0,
          "gamma pairs nontrivially with the Lie algebra of Delta_m");
  // flatten y coordinates
  struct Slot { std::string a; int l; Eigen::Index i, j; };
  std::vector<Slot> slots;
  CotangentPoint<K> zero = zero_cotangent<K>(Q, x.rank);
  zero.x = x;
  for (const Arrow& a : Q.arrows) {
    HomElem<K>& h = zero.y.at(a.id);
    for (int l = 0; l < h.mij; ++l)
      for (Eigen::Index j = 0; j < h.block_cols(); ++j)
        for (Eigen::Index i = 0; i < h.block_rows(); ++i) slots.push_back({a.id, l, i, j});
  }
  // output coordinates of mu
  long long out_dim = 0;
  for (const std::string& v : Q.vertices) out_dim += Q.m(v) * x.rank.at(v) * x.rank.at(v);
  auto flatten_mu = [&](const std::map<std::string, MatPoly<K>>& mu) {
    Vec<K> vec = zeros<K>(out_dim, 1);
    long long at = 0;
    for (const std::string& v : Q.vertices) {
      const MatPoly<K>& m = mu.at(v);
      for (int l = 0; l < m.m; ++l)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
          for (Eigen::Index i = 0; i < m.rows(); ++i) vec(at++) = m.c[l](i, j);
    }
    return vec;
  };
  Mat<K> sys = zeros<K>(out_dim, static_cast<Eigen::Index>(slots.size()));
  for (std::size_t k = 0; k < slots.size(); ++k) {
    CotangentPoint<K> e = zero;
    e.y.at(slots[k].a).blocks[slots[k].l](slots[k].i, slots[k].j) = k_one<K>();
    sys.col(static_cast<Eigen::Index>(k)) = flatten_mu(moment_map(Q, e));
  }
  Vec<K> rhs = flatten_mu(gamma);

  FiberSolution<K> sol;
  auto part = solve_linear(sys, rhs);
  if (!part.has_value()) {
    sol.empty = true;
    return sol;
  }
  auto unflatten = [&](const Vec<K>& vec) {
    CotangentPoint<K> p = zero_cotangent<K>(Q, x.rank);
    p.x = x;
    for (std::size_t k = 0; k < slots.size(); ++k)
      p.y.at(slots[k].a).blocks[slots[k].l](slots[k].i, slots[k].j) =
          vec(static_cast<Eigen::Index>(k));
    return p;
  };
  sol.particular = unflatten(*part);
  Mat<K> ker = kernel_basis(sys);
  sol.dim = ker.cols();
  for (Eigen::Index c = 0; c < ker.cols(); ++c) sol.kernel.push_back(unflatten(Vec<K>(ker.col(c))));
  return sol;
}

// ---------------------------------------------------------------------------
// Grading on the doubled quiver and moment-map equivariance weights.

struct DoubledBeta {
  std::map<std::string, long long> forward;  // beta_a
  std::map<std::string, long long> reverse;  // beta_{a*}
};

struct EquivarianceWeights {
  std::map<std::string, long long> w_fwd;    // w_a
  std::map<std::string, long long> w_rev;    // w_{a*}
  DoubledBeta revised;                       // beta with beta_a default, beta_{a*} = alpha_i + C
};

/// w_a = beta_a + beta_{a*} - alpha_j (f_ij - 1),
/// w_{a*} = beta_a + beta_{a*} - alpha_i (f_ji - 1); with the revised beta the
/// moment map scales by t^{alpha_i + C} at vertex i.
inline EquivarianceWeights equivariance_weights(const QuiverWithMult& Q, const IntVec& alpha,
                                                const DoubledBeta& beta, long long C) {
  for (const Arrow& a : Q.arrows)
    require(alpha.at(a.from) * Q.m(a.from) == alpha.at(a.to) * Q.m(a.to), Err::AlphaNotOnLine,
            "alpha_i m_i must be constant");
  EquivarianceWeights out;
  for (const Arrow& a : Q.arrows) {
    PairConsts pc = arrow_consts(Q, a);
    long long s = beta.forward.at(a.id) + beta.reverse.at(a.id);
    out.w_fwd[a.id] = s - alpha.at(a.to) * (pc.f_ij - 1);
    out.w_rev[a.id] = s - alpha.at(a.from) * (pc.f_ji - 1);
    out.revised.forward[a.id] = alpha.at(a.from) * (pc.f_ji - 1);
    out.revised.reverse[a.id] = alpha.at(a.from) + C;
    // with the revised beta: w_a = alpha_j + C and w_{a*} = alpha_i + C
    long long rs = out.revised.forward[a.id] + out.revised.reverse[a.id];
    require(rs - alpha.at(a.to) * (pc.f_ij - 1) == alpha.at(a.to) + C, Err::InvalidParams,
            "revised w_a defect");
    require(rs - alpha.at(a.from) * (pc.f_ji - 1) == alpha.at(a.from) + C, Err::InvalidParams,
            "revised w_{a*} defect");
  }
  return out;
}

/// Grading parameters on the doubled quiver assembled from per-direction beta.
inline GradingParams doubled_params(const QuiverWithMult& Q, const IntVec& alpha,
                                    const DoubledBeta& beta) {
  GradingParams p;
  p.alpha = alpha;
  for (const Arrow& a : Q.arrows) {
    p.beta[a.id] = beta.forward.at(a.id);
    p.beta[a.id + "*"] = beta.reverse.at(a.id);
  }
  for (const std::string& v : Q.vertices) p.scale = alpha.at(v) * Q.m(v);
  return p;
}

/// t * (x, y) for the doubled grading.
template <class K>
CotangentPoint<K> act_gm_cotangent(const QuiverWithMult& Q, const K& t, const CotangentPoint<K>& p,
                                   const IntVec& alpha, const DoubledBeta& beta) {
  QuiverWithMult dq = double_quiver(Q);
  RepPoint<K> d = to_doubled(Q, p);
  RepPoint<K> moved = act_gm(dq, t, d, doubled_params(Q, alpha, beta));
  return from_doubled(Q, moved);
}

/// t *_{alpha, alpha + C} xi: coefficient c at vertex i scales by
/// t^{alpha_i + C + alpha_i c}.
template <class K>
std::map<std::string, MatPoly<K>> act_gm_lie_shifted(const QuiverWithMult&, const K& t,
                                                     const std::map<std::string, MatPoly<K>>& xi,
                                                     const IntVec& alpha, long long C) {
  auto out = xi;
  for (auto& [v, m] : out)
    for (int l = 0; l < m.m; ++l) m.c[l] = m.c[l] * k_pow(t, alpha.at(v) + C + alpha.at(v) * l);
  return out;
}

// ---------------------------------------------------------------------------
// Modified stability for Nakajima-type varieties: condition 1 sees only the
// underlying Q-arrows.

inline Verdict<Fp> semistable_pi(const QuiverWithMult& Q, const CotangentPoint<Fp>& p,
                                 const IntVec& theta, const IntVec& rho, std::uint32_t q,
                                 unsigned long long guard = 1ull << 22) {
  require(dot(theta, p.x.rank) == 0 && dot(rho, p.x.rank) == 0, Err::NotOrthogonal,
          "theta . r and rho . r must vanish");
  // condition 1: King on the truncation of the Q-part only
  Verdict<Fp> king = king_semistable(Q, truncate(Q, p.x), theta, q, guard);
  if (king.verdict == SS::unstable) return king;
  // condition 2: locally free subrepresentations of the full doubled point
  QuiverWithMult dq = double_quiver(Q);
  RepPoint<Fp> d = to_doubled(Q, p);
  auto cond2 = scan_condition2<Fp>(
      dq, d, theta, rho, [&](const std::string& v, int rp) -> std::vector<MatPoly<Fp>> {
        return enumerate_free_submodules(dq.m(v), static_cast<int>(d.rank.at(v)), rp, q, guard);
      });
  if (cond2.verdict == SS::unstable) return Verdict<Fp>{SS::unstable, cond2.witness};
  if (cond2.verdict == SS::strictly_semistable)
    return Verdict<Fp>{SS::strictly_semistable, cond2.witness};
  return Verdict<Fp>{SS::stable, std::nullopt};
}

/// Definition-level oracle for the modified stability: condition 1 enumerates
/// all submodule families closed under the sigma-twisted forward arrows,
/// condition 2 all free families closed under both directions.
inline Verdict<Fp> semistable_pi_oracle(const QuiverWithMult& Q, const CotangentPoint<Fp>& p,
                                        const IntVec& theta, const IntVec& rho, std::uint32_t q,
                                        unsigned long long guard = 1ull << 22) {
  require(dot(theta, p.x.rank) == 0 && dot(rho, p.x.rank) == 0, Err::NotOrthogonal,
          "theta . r and rho . r must vanish");
  QuiverWithMult dq = double_quiver(Q);
  RepPoint<Fp> d = to_doubled(Q, p);
  RepPoint<Fp> sx = sigma_twist(Q, p.x);  // forward arrows only

  std::map<std::string, std::vector<Subspace<Fp>>> cands;
  std::map<std::string, std::vector<int>> ranks;
  unsigned long long total = 1;
  for (const std::string& v : Q.vertices) {
    int m = Q.m(v), r = static_cast<int>(p.x.rank.at(v));
    cands[v] = submodule_subspaces(m, r, q);
    total *= cands[v].size();
    require(total <= guard, Err::TooLarge, "oracle scan exceeds guard");
    Subspace<Fp> eps_m = Subspace<Fp>::span(eps_shift<Fp>(m, r, 1));
    for (const auto& s : cands[v])
      ranks[v].push_back(static_cast<int>(s.dim() - Subspace<Fp>::intersect(s, eps_m).dim()));
  }
  std::map<std::string, Mat<Fp>> fwd_sigma, both;
  for (const Arrow& a : Q.arrows) {
    fwd_sigma[a.id] = expand_full(sx.x.at(a.id));
    both[a.id] = expand_full(p.x.x.at(a.id));
    both[a.id + "*"] = expand_full(p.y.at(a.id));
  }

  SS verdict = SS::stable;
  std::vector<std::string> verts(Q.vertices);
  std::vector<std::size_t> idx(verts.size(), 0);
  while (true) {
    IntVec rk;
    bool all_free = true;
    for (std::size_t i = 0; i < verts.size(); ++i) {
      const std::string& v = verts[i];
      rk[v] = ranks[v][idx[i]];
      all_free =
          all_free && cands[v][idx[i]].dim() == static_cast<Eigen::Index>(Q.m(v)) * rk[v];
    }
    bool nonzero = false, proper = false;
    for (const std::string& v : verts) {
      if (rk.at(v) > 0) nonzero = true;
      if (rk.at(v) < p.x.rank.at(v)) proper = true;
    }
    if (nonzero && proper) {
      std::map<std::string, const Subspace<Fp>*> fam;
      for (std::size_t i = 0; i < verts.size(); ++i) fam[verts[i]] = &cands[verts[i]][idx[i]];
      auto closed_q_only = [&]() {
        for (const Arrow& a : Q.arrows) {
          if (fam.at(a.from)->dim() == 0) continue;
          if (!fam.at(a.to)->contains_cols(Mat<Fp>(fwd_sigma.at(a.id) * fam.at(a.from)->basis)))
            return false;
        }
        return true;
      };
      auto closed_both = [&]() {
        for (const Arrow& a : dq.arrows) {
          if (fam.at(a.from)->dim() == 0) continue;
          if (!fam.at(a.to)->contains_cols(Mat<Fp>(both.at(a.id) * fam.at(a.from)->basis)))
            return false;
        }
        return true;
      };
      if (closed_q_only() && dot(theta, rk) < 0) {
        verdict = SS::unstable;
        break;
      }
      if (all_free && dot(theta, rk) == 0 && closed_both()) {
        long long rr = dot(rho, rk);
        if (rr < 0) {
          verdict = SS::unstable;
          break;
        }
        if (rr == 0 && verdict == SS::stable) verdict = SS::strictly_semistable;
      }
    }
    std::size_t i = 0;
    for (; i < verts.size(); ++i) {
      if (++idx[i] < cands.at(verts[i]).size()) break;
      idx[i] = 0;
    }
    if (i == verts.size()) break;
  }
  return Verdict<Fp>{verdict, std::nullopt};
}

}  // namespace qmult
