#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "qmult/linalg.hpp"
#include "qmult/quiver.hpp"
#include "qmult/ring.hpp"

// Block-matrix model for representations with multiplicities.
//
// Every expanded matrix uses bases ordered by DECREASING eps-power
// ("power rank" 0 <=> eps^{m-1}, power rank m-1 <=> 1), grouped r at a time.
// In that ordering multiplication by eps^s is the s-th block superdiagonal and
// a k_{m_ij}-linear map is upper block-triangular Toeplitz.

namespace qmult {

/// Square or rectangular matrix over k_m stored as m coefficient matrices.
template <class K>
struct MatPoly {
  int m = 1;
  std::vector<Mat<K>> c;  // c[l] = coefficient of eps^l

  MatPoly() = default;
  MatPoly(int order, Eigen::Index rows, Eigen::Index cols) : m(order) {
    for (int l = 0; l < order; ++l) c.push_back(zeros<K>(rows, cols));
  }
  Eigen::Index rows() const { return c.at(0).rows(); }
  Eigen::Index cols() const { return c.at(0).cols(); }

  static MatPoly identity(int order, Eigen::Index n) {
    MatPoly g(order, n, n);
    for (Eigen::Index i = 0; i < n; ++i) g.c[0](i, i) = k_one<K>();
    return g;
  }

  TruncPoly<K> entry(Eigen::Index i, Eigen::Index j) const {
    TruncPoly<K> t(m);
    for (int l = 0; l < m; ++l) t.c[l] = c[l](i, j);
    return t;
  }
  void set_entry(Eigen::Index i, Eigen::Index j, const TruncPoly<K>& t) {
    require(t.m == m, Err::MismatchedRing, "entry order mismatch");
    for (int l = 0; l < m; ++l) c[l](i, j) = t.c[l];
  }

  bool is_zero() const {
    for (const Mat<K>& b : c)
      if (!is_zero_mat(b)) return false;
    return true;
  }

  friend bool operator==(const MatPoly& a, const MatPoly& b) {
    if (a.m != b.m || a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (int l = 0; l < a.m; ++l)
      for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
          if (a.c[l](i, j) != b.c[l](i, j)) return false;
    return true;
  }
};

template <class K>
MatPoly<K> mp_add(const MatPoly<K>& a, const MatPoly<K>& b) {
  require(a.m == b.m, Err::MismatchedRing, "orders differ");
  MatPoly<K> r(a.m, a.rows(), a.cols());
  for (int l = 0; l < a.m; ++l) r.c[l] = a.c[l] + b.c[l];
  return r;
}

template <class K>
MatPoly<K> mp_sub(const MatPoly<K>& a, const MatPoly<K>& b) {
  require(a.m == b.m, Err::MismatchedRing, "orders differ");
  MatPoly<K> r(a.m, a.rows(), a.cols());
  for (int l = 0; l < a.m; ++l) r.c[l] = a.c[l] - b.c[l];
  return r;
}

template <class K>
MatPoly<K> mp_mul(const MatPoly<K>& a, const MatPoly<K>& b) {
  require(a.m == b.m, Err::MismatchedRing, "orders differ");
  require(a.cols() == b.rows(), Err::ShapeMismatch, "matrix shapes");
  MatPoly<K> r(a.m, a.rows(), b.cols());
  for (int i = 0; i < a.m; ++i)
    for (int j = 0; i + j < a.m; ++j) r.c[i + j] += a.c[i] * b.c[j];
  return r;
}

/// Series inverse; the constant-coefficient matrix must be invertible.
template <class K>
MatPoly<K> mp_inv(const MatPoly<K>& a) {
  require(a.rows() == a.cols(), Err::ShapeMismatch, "inverse of non-square");
  auto inv0 = inverse_of(a.c[0]);
  require(inv0.has_value(), Err::NonUnit, "constant-term matrix not invertible");
  MatPoly<K> r(a.m, a.rows(), a.cols());
  r.c[0] = *inv0;
  for (int k = 1; k < a.m; ++k) {
    Mat<K> acc = zeros<K>(a.rows(), a.cols());
    for (int i = 1; i <= k; ++i) acc += a.c[i] * r.c[k - i];
    r.c[k] = -(*inv0 * acc);
  }
  return r;
}

/// Expanded matrix of "multiply k_m^r by this k_m-matrix": upper block
/// Toeplitz, block (t, s) = c[s - t].
template <class K>
Mat<K> mult_operator(const MatPoly<K>& g) {
  const Eigen::Index r = g.rows(), rc = g.cols();
  Mat<K> out = zeros<K>(g.m * r, g.m * rc);
  for (int t = 0; t < g.m; ++t)
    for (int s = t; s < g.m; ++s) out.block(t * r, s * rc, r, rc) = g.c[s - t];
  return out;
}

/// Expanded multiplication by eps^s on k_m^r.
template <class K>
Mat<K> eps_shift(int m, int r, int s) {
  Mat<K> out = zeros<K>(m * r, m * r);
  for (int p = s; p < m; ++p)
    for (int l = 0; l < r; ++l) out((p - s) * r + l, p * r + l) = k_one<K>();
  return out;
}

/// A k_{m_ij}-linear map k_{m_i}^{r_i} -> k_{m_j}^{r_j}, stored as its m_ij
/// block coefficients x_0..x_{m_ij-1}, each (r_j f_ij) x (r_i f_ji).
template <class K>
struct HomElem {
  int mi = 1, mj = 1, ri = 0, rj = 0;
  int mij = 1, fij = 1, fji = 1;
  std::vector<Mat<K>> blocks;

  HomElem() = default;
  HomElem(int mi_, int mj_, int ri_, int rj_) : mi(mi_), mj(mj_), ri(ri_), rj(rj_) {
    PairConsts pc = pair_consts(mi, mj);
    mij = pc.m_ij;
    fij = pc.f_ij;
    fji = pc.f_ji;
    for (int l = 0; l < mij; ++l) blocks.push_back(zeros<K>(rj * fij, ri * fji));
  }

  Eigen::Index block_rows() const { return static_cast<Eigen::Index>(rj) * fij; }
  Eigen::Index block_cols() const { return static_cast<Eigen::Index>(ri) * fji; }

  bool is_zero() const {
    for (const Mat<K>& b : blocks)
      if (!is_zero_mat(b)) return false;
    return true;
  }

  friend bool operator==(const HomElem& a, const HomElem& b) {
    if (a.mi != b.mi || a.mj != b.mj || a.ri != b.ri || a.rj != b.rj) return false;
    for (int l = 0; l < a.mij; ++l)
      for (Eigen::Index j = 0; j < a.block_cols(); ++j)
        for (Eigen::Index i = 0; i < a.block_rows(); ++i)
          if (a.blocks[l](i, j) != b.blocks[l](i, j)) return false;
    return true;
  }
};

template <class K>
Mat<K> expand_full(const HomElem<K>& h) {
  Mat<K> out = zeros<K>(h.mj * h.rj, h.mi * h.ri);
  for (int u = 0; u < h.mij; ++u)
    for (int v = u; v < h.mij; ++v)
      out.block(u * h.block_rows(), v * h.block_cols(), h.block_rows(), h.block_cols()) =
          h.blocks[v - u];
  return out;
}

template <class K>
HomElem<K> compress_full(int mi, int mj, int ri, int rj, const Mat<K>& full) {
  HomElem<K> h(mi, mj, ri, rj);
  require(full.rows() == mj * rj && full.cols() == mi * ri, Err::ShapeMismatch,
          "expanded size mismatch");
  for (int l = 0; l < h.mij; ++l)
    h.blocks[l] = full.block(0, l * h.block_cols(), h.block_rows(), h.block_cols());
  // every entry must match the Toeplitz pattern
  for (int u = 0; u < h.mij; ++u)
    for (int v = 0; v < h.mij; ++v) {
      Mat<K> want = v >= u ? h.blocks[v - u] : zeros<K>(h.block_rows(), h.block_cols());
      Mat<K> got = full.block(u * h.block_rows(), v * h.block_cols(), h.block_rows(), h.block_cols());
      for (Eigen::Index j = 0; j < h.block_cols(); ++j)
        for (Eigen::Index i = 0; i < h.block_rows(); ++i)
          require(got(i, j) == want(i, j), Err::NotModuleLinear,
                  "matrix violates the block-Toeplitz constraint");
    }
  return h;
}

template <class K>
HomElem<K> hom_add(const HomElem<K>& a, const HomElem<K>& b) {
  HomElem<K> r = a;
  require(a.mi == b.mi && a.mj == b.mj && a.ri == b.ri && a.rj == b.rj, Err::ShapeMismatch, "hom shapes");
  for (int l = 0; l < a.mij; ++l) r.blocks[l] = a.blocks[l] + b.blocks[l];
  return r;
}

template <class K>
HomElem<K> hom_scale(const K& s, const HomElem<K>& a) {
  HomElem<K> r = a;
  for (int l = 0; l < a.mij; ++l) r.blocks[l] = a.blocks[l] * s;
  return r;
}

/// Arrow-indexed family of HomElems.
template <class K>
struct RepPoint {
  IntVec rank;
  std::map<std::string, HomElem<K>> x;

  friend bool operator==(const RepPoint& a, const RepPoint& b) {
    return a.rank == b.rank && a.x == b.x;
  }
};

/// Classical representation of the (1,...,1)-multiplicity quiver.
template <class K>
struct ClassicalRep {
  IntVec dim;
  std::map<std::string, Mat<K>> v;

  friend bool operator==(const ClassicalRep& a, const ClassicalRep& b) {
    if (a.dim != b.dim) return false;
    if (a.v.size() != b.v.size()) return false;
    for (const auto& [id, m] : a.v) {
      auto it = b.v.find(id);
      if (it == b.v.end() || m.rows() != it->second.rows() || m.cols() != it->second.cols())
        return false;
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
          if (m(i, j) != it->second(i, j)) return false;
    }
    return true;
  }
};

template <class K>
RepPoint<K> zero_rep(const QuiverWithMult& Q, const IntVec& r) {
  RepPoint<K> p;
  p.rank = r;
  for (const Arrow& a : Q.arrows)
    p.x[a.id] = HomElem<K>(Q.m(a.from), Q.m(a.to), static_cast<int>(r.at(a.from)),
                           static_cast<int>(r.at(a.to)));
  return p;
}

template <class K>
ClassicalRep<K> zero_classical(const QuiverWithMult& Q, const IntVec& r) {
  ClassicalRep<K> v;
  v.dim = r;
  for (const Arrow& a : Q.arrows)
    v.v[a.id] = zeros<K>(r.at(a.to), r.at(a.from));
  return v;
}

/// Per-vertex invertible k_{m_i}-matrix; the group GL_{m,r}.
template <class K>
struct GroupElem {
  std::map<std::string, MatPoly<K>> g;

  friend bool operator==(const GroupElem& a, const GroupElem& b) { return a.g == b.g; }
};

template <class K>
GroupElem<K> group_identity(const QuiverWithMult& Q, const IntVec& r) {
  GroupElem<K> e;
  for (const std::string& v : Q.vertices) e.g[v] = MatPoly<K>::identity(Q.m(v), r.at(v));
  return e;
}

template <class K>
GroupElem<K> group_mul(const GroupElem<K>& a, const GroupElem<K>& b) {
  GroupElem<K> r;
  for (const auto& [v, m] : a.g) r.g[v] = mp_mul(m, b.g.at(v));
  return r;
}

template <class K>
GroupElem<K> group_inv(const GroupElem<K>& a) {
  GroupElem<K> r;
  for (const auto& [v, m] : a.g) r.g[v] = mp_inv(m);
  return r;
}

template <class K>
bool group_is_valid(const GroupElem<K>& a) {
  for (const auto& [v, m] : a.g)
    if (!inverse_of(m.c[0]).has_value()) return false;
  return true;
}

/// Kernel of GL_{m,r} ->> GL_r: constant term the identity everywhere.
template <class K>
bool in_unipotent_radical(const GroupElem<K>& a) {
  for (const auto& [v, m] : a.g) {
    Mat<K> want = zeros<K>(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i) want(i, i) = k_one<K>();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        if (m.c[0](i, j) != want(i, j)) return false;
  }
  return true;
}

/// Delta_m: one unit of k_delta, embedded at every vertex as a scalar matrix.
template <class K>
bool in_delta(const QuiverWithMult& Q, const GroupElem<K>& a) {
  DerivedConstants d = derived_constants(Q);
  // pull back the scalar at each vertex and compare in k_delta
  TruncPoly<K> common(d.delta);
  bool first = true;
  for (const std::string& v : Q.vertices) {
    const MatPoly<K>& m = a.g.at(v);
    if (m.rows() == 0) continue;
    int step = Q.m(v) / d.delta;
    TruncPoly<K> lambda(d.delta);
    for (int l = 0; l < Q.m(v); ++l) {
      // scalar matrix check per coefficient
      const Mat<K>& coef = m.c[l];
      K diag = coef(0, 0);
      for (Eigen::Index j = 0; j < coef.cols(); ++j)
        for (Eigen::Index i = 0; i < coef.rows(); ++i) {
          K want = (i == j) ? diag : K();
          if (coef(i, j) != want) return false;
        }
      if (l % step == 0)
        lambda.c[l / step] = diag;
      else if (!diag.is_zero())
        return false;  // supported outside the subring image
    }
    if (first) {
      common = lambda;
      first = false;
    } else if (!(common == lambda)) {
      return false;
    }
  }
  return first || !common.c[0].is_zero();
}

/// (g . x)_a = g_{t(a)} x_a g_{s(a)}^{-1}, computed on expanded matrices.
template <class K>
RepPoint<K> act(const QuiverWithMult& Q, const GroupElem<K>& g, const RepPoint<K>& p) {
  RepPoint<K> out;
  out.rank = p.rank;
  std::map<std::string, Mat<K>> left, right;
  for (const std::string& v : Q.vertices) {
    left[v] = mult_operator(g.g.at(v));
    right[v] = mult_operator(mp_inv(g.g.at(v)));
  }
  for (const Arrow& a : Q.arrows) {
    const HomElem<K>& h = p.x.at(a.id);
    Mat<K> full = left.at(a.to) * expand_full(h) * right.at(a.from);
    out.x[a.id] = compress_full(h.mi, h.mj, h.ri, h.rj, full);
  }
  return out;
}

/// Infinitesimal action (xi . x)_a = xi_{t(a)} x_a - x_a xi_{s(a)}.
template <class K>
RepPoint<K> act_lie(const QuiverWithMult& Q, const std::map<std::string, MatPoly<K>>& xi,
                    const RepPoint<K>& p) {
  RepPoint<K> out;
  out.rank = p.rank;
  for (const Arrow& a : Q.arrows) {
    const HomElem<K>& h = p.x.at(a.id);
    Mat<K> full = mult_operator(xi.at(a.to)) * expand_full(h) -
                  expand_full(h) * mult_operator(xi.at(a.from));
    out.x[a.id] = compress_full(h.mi, h.mj, h.ri, h.rj, full);
  }
  return out;
}

/// tau: extract the block of x_0 at block coordinates (f_ij, 1).
template <class K>
ClassicalRep<K> truncate(const QuiverWithMult& Q, const RepPoint<K>& p) {
  ClassicalRep<K> out;
  out.dim = p.rank;
  for (const Arrow& a : Q.arrows) {
    const HomElem<K>& h = p.x.at(a.id);
    out.v[a.id] = h.blocks[0].block((h.fij - 1) * h.rj, 0, h.rj, h.ri);
  }
  return out;
}

/// iota: section of tau, image concentrated in the weight-zero slot of every
/// diagonal block.
template <class K>
RepPoint<K> section_iota(const QuiverWithMult& Q, const ClassicalRep<K>& v) {
  RepPoint<K> out = zero_rep<K>(Q, v.dim);
  for (const Arrow& a : Q.arrows) {
    HomElem<K>& h = out.x[a.id];
    h.blocks[0].block((h.fij - 1) * h.rj, 0, h.rj, h.ri) = v.v.at(a.id);
  }
  return out;
}

/// Levi section GL_r -> GL_{m,r}: constant-coefficient group elements.
template <class K>
GroupElem<K> levi_embed(const QuiverWithMult& Q, const std::map<std::string, Mat<K>>& g0) {
  GroupElem<K> g;
  for (const std::string& v : Q.vertices) {
    MatPoly<K> m(Q.m(v), g0.at(v).rows(), g0.at(v).cols());
    m.c[0] = g0.at(v);
    g.g[v] = m;
  }
  return g;
}

/// Reduce a group element mod eps (the image in GL_r).
template <class K>
std::map<std::string, Mat<K>> group_truncate(const GroupElem<K>& g) {
  std::map<std::string, Mat<K>> out;
  for (const auto& [v, m] : g.g) out[v] = m.c[0];
  return out;
}

/// Action of GL_r on classical representations.
template <class K>
ClassicalRep<K> act_classical(const QuiverWithMult& Q, const std::map<std::string, Mat<K>>& g,
                              const ClassicalRep<K>& v) {
  ClassicalRep<K> out;
  out.dim = v.dim;
  for (const Arrow& a : Q.arrows) {
    auto gi_inv = inverse_of(g.at(a.from));
    require(gi_inv.has_value(), Err::NonUnit, "group element not invertible");
    out.v[a.id] = g.at(a.to) * v.v.at(a.id) * (*gi_inv);
  }
  return out;
}

/// sigma(M)_a = M_a eps^{f_ji - 1}: precompose with the source shift.
template <class K>
RepPoint<K> sigma_twist(const QuiverWithMult& Q, const RepPoint<K>& p) {
  RepPoint<K> out;
  out.rank = p.rank;
  for (const Arrow& a : Q.arrows) {
    const HomElem<K>& h = p.x.at(a.id);
    Mat<K> full = expand_full(h) * eps_shift<K>(h.mi, h.ri, h.fji - 1);
    out.x[a.id] = compress_full(h.mi, h.mj, h.ri, h.rj, full);
  }
  return out;
}

/// Thickened-quiver coordinates: x_{(a,m,f1,f2)} = [x_m]_{f_ij - f2, f_ji - f1}
/// as an r_j x r_i matrix.
template <class K>
Mat<K> thick_coord(const HomElem<K>& h, int m, int f1, int f2) {
  return h.blocks[m].block((h.fij - f2 - 1) * h.rj, (h.fji - f1 - 1) * h.ri, h.rj, h.ri);
}

template <class K>
void set_thick_coord(HomElem<K>& h, int m, int f1, int f2, const Mat<K>& val) {
  h.blocks[m].block((h.fij - f2 - 1) * h.rj, (h.fji - f1 - 1) * h.ri, h.rj, h.ri) = val;
}

/// Full re-indexing R(Q,m;r) ~ R(Q_m, r); keys are ThickArrow ids.
template <class K>
std::map<std::string, Mat<K>> thicken_coords(const QuiverWithMult&, const RepPoint<K>& p,
                                             const std::vector<ThickArrow>& thick) {
  std::map<std::string, Mat<K>> out;
  for (const ThickArrow& t : thick)
    out[t.id()] = thick_coord(p.x.at(t.base), t.m, t.f1, t.f2);
  return out;
}

template <class K>
RepPoint<K> unthicken_coords(const QuiverWithMult& Q, const IntVec& r,
                             const std::vector<ThickArrow>& thick,
                             const std::map<std::string, Mat<K>>& coords) {
  RepPoint<K> p = zero_rep<K>(Q, r);
  for (const ThickArrow& t : thick)
    set_thick_coord(p.x.at(t.base), t.m, t.f1, t.f2, coords.at(t.id()));
  return p;
}

/// Direct sum along each arrow, cellwise in the (f-grid x r) block structure.
template <class K>
HomElem<K> hom_direct_sum(const HomElem<K>& a, const HomElem<K>& b) {
  require(a.mi == b.mi && a.mj == b.mj, Err::ShapeMismatch, "direct sum orders");
  HomElem<K> out(a.mi, a.mj, a.ri + b.ri, a.rj + b.rj);
  for (int l = 0; l < out.mij; ++l)
    for (int ct = 0; ct < out.fij; ++ct)
      for (int cs = 0; cs < out.fji; ++cs) {
        out.blocks[l].block(ct * out.rj, cs * out.ri, a.rj, a.ri) =
            a.blocks[l].block(ct * a.rj, cs * a.ri, a.rj, a.ri);
        out.blocks[l].block(ct * out.rj + a.rj, cs * out.ri + a.ri, b.rj, b.ri) =
            b.blocks[l].block(ct * b.rj, cs * b.ri, b.rj, b.ri);
      }
  return out;
}

template <class K>
RepPoint<K> rep_direct_sum(const QuiverWithMult& Q, const RepPoint<K>& a, const RepPoint<K>& b) {
  RepPoint<K> out;
  for (const std::string& v : Q.vertices) out.rank[v] = a.rank.at(v) + b.rank.at(v);
  for (const Arrow& ar : Q.arrows)
    out.x[ar.id] = hom_direct_sum(a.x.at(ar.id), b.x.at(ar.id));
  return out;
}

// ---------------------------------------------------------------------------
// Enumeration and random sampling.

/// Visit every point of R(Q,m;r)(F_q) would be the census engine's job; here
/// we only enumerate group points, used by orbit and stabiliser scans.
template <class Fn>
void enumerate_group_points(const QuiverWithMult& Q, const IntVec& r, std::uint32_t q, Fn&& fn) {
  // digits: per vertex, per coefficient l in 0..m_i-1, an r_i x r_i matrix;
  // constant term restricted to invertibles by rejection.
  struct Slot { std::string v; int l; int i, j; };
  std::vector<Slot> slots;
  for (const std::string& v : Q.vertices)
    for (int l = 0; l < Q.m(v); ++l)
      for (int i = 0; i < r.at(v); ++i)
        for (int j = 0; j < r.at(v); ++j) slots.push_back(Slot{v, l, i, j});
  std::vector<std::uint32_t> digits(slots.size(), 0);
  FieldCtx<Fp> F{q};
  while (true) {
    GroupElem<Fp> g;
    for (const std::string& v : Q.vertices) g.g[v] = MatPoly<Fp>(Q.m(v), r.at(v), r.at(v));
    for (std::size_t k = 0; k < slots.size(); ++k)
      g.g[slots[k].v].c[slots[k].l](slots[k].i, slots[k].j) = F.element(digits[k]);
    if (group_is_valid(g)) fn(g);
    std::size_t idx = 0;
    for (; idx < digits.size(); ++idx) {
      if (++digits[idx] < q) break;
      digits[idx] = 0;
    }
    if (idx == digits.size()) break;
  }
}

template <class K>
struct RandomScalar;

template <>
struct RandomScalar<Rat> {
  FieldCtx<Rat> F;
  Rat operator()(std::mt19937_64& rng) const {
    std::uniform_int_distribution<long> num(-4, 4), den(1, 3);
    return Rat(num(rng), den(rng));
  }
};

template <>
struct RandomScalar<Fp> {
  FieldCtx<Fp> F;
  Fp operator()(std::mt19937_64& rng) const {
    std::uniform_int_distribution<std::uint32_t> d(0, F.p - 1);
    return F.element(d(rng));
  }
};

template <class K>
RepPoint<K> random_rep(const QuiverWithMult& Q, const IntVec& r, const RandomScalar<K>& rs,
                       std::mt19937_64& rng) {
  RepPoint<K> p = zero_rep<K>(Q, r);
  for (auto& [id, h] : p.x)
    for (Mat<K>& b : h.blocks)
      for (Eigen::Index j = 0; j < b.cols(); ++j)
        for (Eigen::Index i = 0; i < b.rows(); ++i) b(i, j) = rs(rng);
  return p;
}

template <class K>
GroupElem<K> random_group_elem(const QuiverWithMult& Q, const IntVec& r, const RandomScalar<K>& rs,
                               std::mt19937_64& rng) {
  while (true) {
    GroupElem<K> g;
    for (const std::string& v : Q.vertices) {
      MatPoly<K> m(Q.m(v), r.at(v), r.at(v));
      for (int l = 0; l < m.m; ++l)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
          for (Eigen::Index i = 0; i < m.rows(); ++i) m.c[l](i, j) = rs(rng);
      g.g[v] = m;
    }
    if (group_is_valid(g)) return g;
  }
}

template <class K>
std::map<std::string, MatPoly<K>> random_lie_elem(const QuiverWithMult& Q, const IntVec& r,
                                                  const RandomScalar<K>& rs, std::mt19937_64& rng) {
  std::map<std::string, MatPoly<K>> xi;
  for (const std::string& v : Q.vertices) {
    MatPoly<K> m(Q.m(v), r.at(v), r.at(v));
    for (int l = 0; l < m.m; ++l)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) m.c[l](i, j) = rs(rng);
    xi[v] = m;
  }
  return xi;
}

}  // namespace qmult
