#pragma once

#include <atomic>
#include <thread>

#include "qmult/stabilizers.hpp"
#include "qmult/symplectic.hpp"

// Finite-field censuses: exhaustive verdict scans over R(Q,m;r)(F_q) in
// lexicographic coefficient order, group orders, orbit counting, moment-fiber
// counting, and exact polynomial fitting across primes.
//
// The scan works on flat digit vectors through a precompiled verdict plan (no
// allocation per point); the plan's verdict is pinned to semistable_mult by
// tests.

namespace qmult {

struct GroupOrder {
  unsigned long long gl = 1;     // |GL_{m,r}(F_q)|
  unsigned long long delta = 1;  // |Delta_m(F_q)| = (q-1) q^{delta-1}
  unsigned long long g = 1;      // gl / delta
};

inline GroupOrder group_order(const QuiverWithMult& Q, const IntVec& r, std::uint32_t q) {
  GroupOrder out;
  for (const std::string& v : Q.vertices) {
    unsigned long long rr = static_cast<unsigned long long>(r.at(v));
    unsigned long long glr = 1;
    for (unsigned long long i = 0; i < rr; ++i) {
      unsigned long long qr = 1, qi = 1;
      for (unsigned long long j = 0; j < rr; ++j) qr *= q;
      for (unsigned long long j = 0; j < i; ++j) qi *= q;
      glr *= qr - qi;
    }
    unsigned long long qker = 1;
    for (long long i = 0; i < (Q.m(v) - 1) * static_cast<long long>(rr * rr); ++i) qker *= q;
    out.gl *= glr * qker;
  }
  int delta = derived_constants(Q).delta;
  out.delta = q - 1;
  for (int i = 1; i < delta; ++i) out.delta *= q;
  out.g = out.gl / out.delta;
  return out;
}

// ---------------------------------------------------------------------------
// Digit layout: per arrow (quiver order), per stored block, row-major.

struct PointLayout {
  struct ArrowSlots {
    std::string id;
    int mij, block_rows, block_cols;
    std::size_t offset;  // first digit index
  };
  std::vector<ArrowSlots> arrows;
  std::size_t total = 0;

  static PointLayout build(const QuiverWithMult& Q, const IntVec& r) {
    PointLayout lay;
    for (const Arrow& a : Q.arrows) {
      PairConsts pc = arrow_consts(Q, a);
      ArrowSlots s;
      s.id = a.id;
      s.mij = pc.m_ij;
      s.block_rows = static_cast<int>(r.at(a.to)) * pc.f_ij;
      s.block_cols = static_cast<int>(r.at(a.from)) * pc.f_ji;
      s.offset = lay.total;
      lay.total += static_cast<std::size_t>(s.mij) * s.block_rows * s.block_cols;
      lay.arrows.push_back(s);
    }
    return lay;
  }

  std::size_t slot(std::size_t arrow_idx, int l, int row, int col) const {
    const ArrowSlots& s = arrows[arrow_idx];
    return s.offset + (static_cast<std::size_t>(l) * s.block_rows + row) * s.block_cols + col;
  }

  RepPoint<Fp> to_point(const QuiverWithMult& Q, const IntVec& r,
                        const std::vector<std::uint32_t>& digits, std::uint32_t q) const {
    RepPoint<Fp> p = zero_rep<Fp>(Q, r);
    for (std::size_t ai = 0; ai < arrows.size(); ++ai) {
      HomElem<Fp>& h = p.x.at(arrows[ai].id);
      for (int l = 0; l < arrows[ai].mij; ++l)
        for (int row = 0; row < arrows[ai].block_rows; ++row)
          for (int col = 0; col < arrows[ai].block_cols; ++col)
            h.blocks[l](row, col) = Fp(digits[slot(ai, l, row, col)], q);
    }
    return p;
  }
};

// ---------------------------------------------------------------------------
// Compiled verdict plan.

namespace detail {

/// Tiny modular matrix utilities on flat uint32 data.
struct ModMat {
  int rows = 0, cols = 0;
  std::vector<std::uint32_t> a;  // row-major
  std::uint32_t& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  std::uint32_t get(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

inline std::uint32_t mod_inv(std::uint32_t x, std::uint32_t q) {
  long long t = 0, nt = 1, r = q, nr = x;
  while (nr != 0) {
    long long k = r / nr;
    long long tmp = t - k * nt; t = nt; nt = tmp;
    tmp = r - k * nr; r = nr; nr = tmp;
  }
  return static_cast<std::uint32_t>(t < 0 ? t + q : t);
}

/// Reduced row echelon basis for fast membership tests: rows are the reduced
/// basis vectors, pivots[i] the pivot column of row i.
struct RefBasis {
  int n = 0;
  std::vector<std::vector<std::uint32_t>> rows;
  std::vector<int> pivots;

  void build(const std::vector<std::vector<std::uint32_t>>& vectors, std::uint32_t q) {
    rows.clear();
    pivots.clear();
    for (auto v : vectors) insert(std::move(v), q);
  }

  bool insert(std::vector<std::uint32_t> v, std::uint32_t q) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      std::uint32_t c = v[pivots[r]];
      if (c == 0) continue;
      for (int k = 0; k < n; ++k)
        v[k] = (v[k] + static_cast<unsigned long long>(q - c) * rows[r][k]) % q;
    }
    int piv = -1;
    for (int k = 0; k < n; ++k)
      if (v[k] != 0) { piv = k; break; }
    if (piv < 0) return false;
    std::uint32_t inv = mod_inv(v[piv], q);
    for (int k = 0; k < n; ++k) v[k] = static_cast<std::uint32_t>(
        static_cast<unsigned long long>(v[k]) * inv % q);
    rows.push_back(std::move(v));
    pivots.push_back(piv);
    return true;
  }

  bool contains(const std::uint32_t* v, std::uint32_t q) const {
    std::vector<std::uint32_t> w(v, v + n);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      std::uint32_t c = w[pivots[r]];
      if (c == 0) continue;
      for (int k = 0; k < n; ++k)
        w[k] = (w[k] + static_cast<unsigned long long>(q - c) * rows[r][k]) % q;
    }
    for (int k = 0; k < n; ++k)
      if (w[k] != 0) return false;
    return true;
  }
};

}  // namespace detail

/// Precompiled semistability verdict over flat digit vectors. cond1 runs King
/// on the truncation through the given arrow subset (all arrows for the
/// ordinary stability, the forward arrows for the pi-modified one); cond2
/// scans the precomputed locally free families with theta-degree zero.
class VerdictPlan {
 public:
  VerdictPlan() = default;

  VerdictPlan(const QuiverWithMult& Q, const IntVec& r, const IntVec& theta, const IntVec& rho,
              std::uint32_t q, const std::vector<std::string>& cond1_arrows,
              unsigned long long guard = 1ull << 22) {
    q_ = q;
    layout_ = PointLayout::build(Q, r);
    std::map<std::string, std::size_t> arrow_index;
    for (std::size_t i = 0; i < layout_.arrows.size(); ++i)
      arrow_index[layout_.arrows[i].id] = i;

    // ---- condition 1: King candidates with negative theta-degree
    std::map<std::string, std::vector<Subspace<Fp>>> cands;
    unsigned long long total = 1;
    for (const std::string& v : Q.vertices) {
      cands[v] = enumerate_subspaces(static_cast<int>(r.at(v)), q);
      total *= cands[v].size();
      require(total <= guard, Err::TooLarge, "King candidate space exceeds guard");
    }
    std::vector<std::string> verts(Q.vertices);
    std::vector<std::size_t> idx(verts.size(), 0);
    while (true) {
      IntVec dims;
      for (std::size_t i = 0; i < verts.size(); ++i)
        dims[verts[i]] = cands[verts[i]][idx[i]].dim();
      long long t = dot(theta, dims);
      bool nonzero = false, proper = false;
      for (const std::string& v : verts) {
        if (dims.at(v) > 0) nonzero = true;
        if (dims.at(v) < r.at(v)) proper = true;
      }
      if (nonzero && proper && t < 0) {
        Cand1 c;
        for (const std::string& a : cond1_arrows) {
          const Arrow& arr = Q.arrow(a);
          const Subspace<Fp>& src = cands[arr.from][idx[std::find(verts.begin(), verts.end(),
                                                                  arr.from) -
                                                      verts.begin()]];
          const Subspace<Fp>& dst = cands[arr.to][idx[std::find(verts.begin(), verts.end(),
                                                                arr.to) -
                                                      verts.begin()]];
          if (src.dim() == 0) continue;
          Cand1::ArrowCheck chk;
          chk.rt = static_cast<int>(r.at(arr.to));
          chk.rs = static_cast<int>(r.at(arr.from));
          require(chk.rt <= 64, Err::TooLarge, "vertex dimension beyond the plan's buffers");
          // digit indices of tau(A): block 0, block coordinates (f_ij, 1)
          const PairConsts pc = arrow_consts(Q, arr);
          std::size_t ai = arrow_index[a];
          for (int i = 0; i < chk.rt; ++i)
            for (int j = 0; j < chk.rs; ++j)
              chk.tau_slots.push_back(layout_.slot(ai, 0, (pc.f_ij - 1) * chk.rt + i, j));
          for (Eigen::Index col = 0; col < src.dim(); ++col) {
            std::vector<std::uint32_t> b(chk.rs);
            for (int i = 0; i < chk.rs; ++i)
              b[i] = static_cast<std::uint32_t>(src.basis(i, col).v);
            chk.src_cols.push_back(std::move(b));
          }
          chk.dst.n = chk.rt;
          std::vector<std::vector<std::uint32_t>> dst_rows;
          for (Eigen::Index col = 0; col < dst.dim(); ++col) {
            std::vector<std::uint32_t> b(chk.rt);
            for (int i = 0; i < chk.rt; ++i)
              b[i] = static_cast<std::uint32_t>(dst.basis(i, col).v);
            dst_rows.push_back(std::move(b));
          }
          chk.dst.build(dst_rows, q);
          c.checks.push_back(std::move(chk));
        }
        cond1_.push_back(std::move(c));
      }
      std::size_t i = 0;
      for (; i < verts.size(); ++i) {
        if (++idx[i] < cands[verts[i]].size()) break;
        idx[i] = 0;
      }
      if (i == verts.size()) break;
    }

    // ---- condition 2: free families with theta-degree zero
    for_each_proper_subvector(r, [&](const IntVec& sub) {
      if (dot(theta, sub) != 0) return;
      std::map<std::string, std::vector<MatPoly<Fp>>> per_vertex;
      for (const std::string& v : Q.vertices)
        per_vertex[v] =
            enumerate_free_submodules(Q.m(v), static_cast<int>(r.at(v)), static_cast<int>(sub.at(v)),
                                      q, guard);
      std::vector<std::size_t> jdx(verts.size(), 0);
      while (true) {
        Cand2 c;
        c.rho_dot = dot(rho, sub);
        std::map<std::string, Mat<Fp>> span;
        for (std::size_t i = 0; i < verts.size(); ++i)
          span[verts[i]] = expanded_generators(per_vertex[verts[i]][jdx[i]]);
        for (const Arrow& arr : Q.arrows) {
          Cand2::ArrowCheck chk;
          std::size_t ai = arrow_index[arr.id];
          const PointLayout::ArrowSlots& as = layout_.arrows[ai];
          chk.n_rows = Q.m(arr.to) * static_cast<int>(r.at(arr.to));
          require(chk.n_rows <= 256, Err::TooLarge, "expanded dimension beyond the plan's buffers");
          int n_cols = Q.m(arr.from) * static_cast<int>(r.at(arr.from));
          // expanded matrix slot map: (row, col) -> digit or -1
          chk.exp_slots.assign(static_cast<std::size_t>(chk.n_rows) * n_cols, -1);
          for (int u = 0; u < as.mij; ++u)
            for (int vblk = u; vblk < as.mij; ++vblk)
              for (int i = 0; i < as.block_rows; ++i)
                for (int j = 0; j < as.block_cols; ++j)
                  chk.exp_slots[static_cast<std::size_t>(u * as.block_rows + i) * n_cols +
                                (vblk * as.block_cols + j)] =
                      static_cast<long long>(layout_.slot(ai, vblk - u, i, j));
          const Mat<Fp>& src = span[arr.from];
          for (Eigen::Index col = 0; col < src.cols(); ++col) {
            std::vector<std::uint32_t> b(n_cols);
            for (int i = 0; i < n_cols; ++i) b[i] = static_cast<std::uint32_t>(src(i, col).v);
            chk.src_cols.push_back(std::move(b));
          }
          chk.dst.n = chk.n_rows;
          std::vector<std::vector<std::uint32_t>> dst_rows;
          const Mat<Fp>& dst = span[arr.to];
          for (Eigen::Index col = 0; col < dst.cols(); ++col) {
            std::vector<std::uint32_t> b(chk.n_rows);
            for (int i = 0; i < chk.n_rows; ++i) b[i] = static_cast<std::uint32_t>(dst(i, col).v);
            dst_rows.push_back(std::move(b));
          }
          chk.dst.build(dst_rows, q);
          c.checks.push_back(std::move(chk));
        }
        cond2_.push_back(std::move(c));
        std::size_t i = 0;
        for (; i < verts.size(); ++i) {
          if (++jdx[i] < per_vertex[verts[i]].size()) break;
          jdx[i] = 0;
        }
        if (i == verts.size()) break;
      }
    });
  }

  const PointLayout& layout() const { return layout_; }

  SS eval(const std::uint32_t* digits) const {
    for (const Cand1& c : cond1_)
      if (closed1(c, digits)) return SS::unstable;
    bool strict = false;
    for (const Cand2& c : cond2_) {
      if (!closed2(c, digits)) continue;
      if (c.rho_dot < 0) return SS::unstable;
      if (c.rho_dot == 0) strict = true;
    }
    return strict ? SS::strictly_semistable : SS::stable;
  }

 private:
  struct Cand1 {
    struct ArrowCheck {
      int rt, rs;
      std::vector<std::size_t> tau_slots;               // rt x rs, row-major
      std::vector<std::vector<std::uint32_t>> src_cols; // length rs each
      detail::RefBasis dst;
    };
    std::vector<ArrowCheck> checks;
  };
  struct Cand2 {
    long long rho_dot;
    struct ArrowCheck {
      int n_rows;
      std::vector<long long> exp_slots;                 // n_rows x n_cols
      std::vector<std::vector<std::uint32_t>> src_cols; // length n_cols each
      detail::RefBasis dst;
    };
    std::vector<ArrowCheck> checks;
  };

  bool closed1(const Cand1& c, const std::uint32_t* digits) const {
    std::uint32_t img[64];
    for (const Cand1::ArrowCheck& chk : c.checks) {
      for (const auto& col : chk.src_cols) {
        for (int i = 0; i < chk.rt; ++i) {
          unsigned long long acc = 0;
          for (int j = 0; j < chk.rs; ++j)
            acc += static_cast<unsigned long long>(digits[chk.tau_slots[i * chk.rs + j]]) * col[j];
          img[i] = static_cast<std::uint32_t>(acc % q_);
        }
        if (!chk.dst.contains(img, q_)) return false;
      }
    }
    return true;
  }

  bool closed2(const Cand2& c, const std::uint32_t* digits) const {
    std::uint32_t img[256];
    for (const Cand2::ArrowCheck& chk : c.checks) {
      int n_cols = chk.src_cols.empty() ? 0 : static_cast<int>(chk.src_cols[0].size());
      for (const auto& col : chk.src_cols) {
        for (int i = 0; i < chk.n_rows; ++i) {
          unsigned long long acc = 0;
          const long long* slots = &chk.exp_slots[static_cast<std::size_t>(i) * n_cols];
          for (int j = 0; j < n_cols; ++j) {
            long long s = slots[j];
            if (s >= 0 && col[j]) acc += static_cast<unsigned long long>(digits[s]) * col[j];
          }
          img[i] = static_cast<std::uint32_t>(acc % q_);
        }
        if (!chk.dst.contains(img, q_)) return false;
      }
    }
    return true;
  }

  std::uint32_t q_ = 2;
  PointLayout layout_;
  std::vector<Cand1> cond1_;
  std::vector<Cand2> cond2_;
};

// ---------------------------------------------------------------------------
// Census driver.

enum class CensusMode { ordinary, pi, nakajima };

struct CountReport {
  std::uint32_t q = 2;
  CensusMode mode = CensusMode::ordinary;
  unsigned long long total_points = 0;   // points scanned (x-space in nakajima mode)
  unsigned long long semistable = 0;     // semistable points ((x,y) pairs in nakajima mode)
  GroupOrder group;
  std::string freeness = "unchecked";    // verified_free | not_free | unchecked
  long long moduli_num = 0;              // exact rational count of moduli points
  long long moduli_den = 1;
  bool moduli_integral = false;
  unsigned long long cursor = 0;         // points processed so far (= total when complete)
  bool complete = false;
  std::optional<long long> s_class_count;  // explicit S-equivalence classes, when attempted
};

namespace detail {

inline unsigned long long pow_check(std::uint32_t q, unsigned long long e,
                                    unsigned long long guard) {
  unsigned long long r = 1;
  for (unsigned long long i = 0; i < e; ++i) {
    require(r <= guard / q, Err::TooLarge, "enumeration exceeds guard");
    r *= q;
  }
  return r;
}

inline void index_to_digits(unsigned long long index, std::uint32_t q,
                            std::vector<std::uint32_t>& digits) {
  // lexicographic with slot 0 most significant
  for (std::size_t k = digits.size(); k-- > 0;) {
    digits[k] = static_cast<std::uint32_t>(index % q);
    index /= q;
  }
}

/// Freeness hypotheses: indivisible rank, generic pair, assumption U.
inline std::string verify_freeness(const QuiverWithMult& Q, const IntVec& r, const IntVec& theta,
                                   const IntVec& rho, std::uint32_t q,
                                   unsigned long long guard) {
  if (!is_indivisible(r)) return "not_free";
  if (is_generic({theta, rho}, r) == Genericity::neither) return "unchecked";
  try {
    if (!check_assumption_U(Q, r, theta, q, guard).holds) return "not_free";
  } catch (const DomainError&) {
    return "unchecked";
  }
  return "verified_free";
}

inline void attach_moduli(CountReport& rep) {
  long long num = static_cast<long long>(rep.semistable);
  long long den = static_cast<long long>(rep.group.g);
  long long g = std::gcd(num, den);
  if (g > 0) {
    num /= g;
    den /= g;
  }
  rep.moduli_num = num;
  rep.moduli_den = den;
  rep.moduli_integral = den == 1;
}

}  // namespace detail

/// Exhaustive scan of R(Q,m;r)(F_q). Deterministic, chunked, resumable via
/// the cursor, parallelisable over index ranges.
inline CountReport count_semistable(const QuiverWithMult& Q, const IntVec& r, const IntVec& theta,
                                    const IntVec& rho, std::uint32_t q,
                                    unsigned long long guard = 1ull << 26, int workers = 1,
                                    unsigned long long start_cursor = 0,
                                    unsigned long long initial_semistable = 0,
                                    unsigned long long point_budget = ~0ull) {
  require(dot(theta, r) == 0 && dot(rho, r) == 0, Err::NotOrthogonal,
          "theta . r and rho . r must vanish");
  CountReport rep;
  rep.q = q;
  rep.mode = CensusMode::ordinary;
  rep.group = group_order(Q, r, q);
  PointLayout lay = PointLayout::build(Q, r);
  rep.total_points = detail::pow_check(q, lay.total, guard);
  std::vector<std::string> all_arrows;
  for (const Arrow& a : Q.arrows) all_arrows.push_back(a.id);
  VerdictPlan plan(Q, r, theta, rho, q, all_arrows);

  unsigned long long end = rep.total_points;
  if (point_budget != ~0ull && start_cursor + point_budget < end) end = start_cursor + point_budget;
  unsigned long long range = end - start_cursor;
  int nw = std::max(1, workers);
  std::vector<unsigned long long> partial(nw, 0);
  std::vector<std::thread> pool;
  for (int w = 0; w < nw; ++w) {
    unsigned long long lo = start_cursor + range * w / nw;
    unsigned long long hi = start_cursor + range * (w + 1) / nw;
    pool.emplace_back([&, w, lo, hi]() {
      std::vector<std::uint32_t> digits(lay.total, 0);
      detail::index_to_digits(lo, q, digits);
      unsigned long long count = 0;
      for (unsigned long long i = lo; i < hi; ++i) {
        if (plan.eval(digits.data()) != SS::unstable) ++count;
        // odometer: last slot least significant
        for (std::size_t k = digits.size(); k-- > 0;) {
          if (++digits[k] < q) break;
          digits[k] = 0;
        }
      }
      partial[w] = count;
    });
  }
  for (auto& t : pool) t.join();
  rep.semistable = initial_semistable;
  for (auto c : partial) rep.semistable += c;
  rep.cursor = end;
  rep.complete = end == rep.total_points;
  if (rep.complete) {
    rep.freeness = detail::verify_freeness(Q, r, theta, rho, q, guard);
    detail::attach_moduli(rep);
  }
  return rep;
}

/// (theta, rho, pi)-census on the doubled quiver: condition 1 through the
/// forward arrows only.
inline CountReport count_semistable_pi(const QuiverWithMult& Q, const IntVec& r,
                                       const IntVec& theta, const IntVec& rho, std::uint32_t q,
                                       unsigned long long guard = 1ull << 26, int workers = 1) {
  require(dot(theta, r) == 0 && dot(rho, r) == 0, Err::NotOrthogonal,
          "theta . r and rho . r must vanish");
  QuiverWithMult dq = double_quiver(Q);
  CountReport rep;
  rep.q = q;
  rep.mode = CensusMode::pi;
  rep.group = group_order(dq, r, q);
  PointLayout lay = PointLayout::build(dq, r);
  rep.total_points = detail::pow_check(q, lay.total, guard);
  std::vector<std::string> fwd;
  for (const Arrow& a : Q.arrows) fwd.push_back(a.id);
  VerdictPlan plan(dq, r, theta, rho, q, fwd);
  int nw = std::max(1, workers);
  std::vector<unsigned long long> partial(nw, 0);
  std::vector<std::thread> pool;
  for (int w = 0; w < nw; ++w) {
    unsigned long long lo = rep.total_points * w / nw;
    unsigned long long hi = rep.total_points * (w + 1) / nw;
    pool.emplace_back([&, lo, hi, w]() {
      std::vector<std::uint32_t> digits(lay.total, 0);
      detail::index_to_digits(lo, q, digits);
      unsigned long long count = 0;
      for (unsigned long long i = lo; i < hi; ++i) {
        if (plan.eval(digits.data()) != SS::unstable) ++count;
        for (std::size_t k = digits.size(); k-- > 0;) {
          if (++digits[k] < q) break;
          digits[k] = 0;
        }
      }
      partial[w] = count;
    });
  }
  for (auto& t : pool) t.join();
  for (auto c : partial) rep.semistable += c;
  rep.cursor = rep.total_points;
  rep.complete = true;
  rep.freeness = detail::verify_freeness(dq, r, theta, rho, q, guard);
  detail::attach_moduli(rep);
  return rep;
}

/// Nakajima-mode census: enumerate x, solve the linear system mu(x, y) = gamma
/// for y, and count semistable pairs in the fiber. Needs theta generic (then
/// condition 2 is vacuous and the verdict is a function of the truncation of
/// the doubled point); non-generic theta falls back to explicit y-enumeration
/// under the guard.
inline CountReport count_nakajima(const QuiverWithMult& Q, const IntVec& r, const IntVec& theta,
                                  const IntVec& rho, const std::map<std::string, MatPoly<Fp>>& gamma,
                                  std::uint32_t q, unsigned long long guard = 1ull << 26,
                                  int workers = 1) {
  require(dot(theta, r) == 0 && dot(rho, r) == 0, Err::NotOrthogonal,
          "theta . r and rho . r must vanish");
  require(in_gl0(Q, r, gamma), Err::GammaNotInGl0, "gamma must pair to zero with Lie(Delta)");
  QuiverWithMult dq = double_quiver(Q);
  CountReport rep;
  rep.q = q;
  rep.mode = CensusMode::nakajima;
  rep.group = group_order(dq, r, q);

  PointLayout xlay = PointLayout::build(Q, r);
  rep.total_points = detail::pow_check(q, xlay.total, guard);

  // y layout: same shapes reversed; flatten mu outputs
  CotangentPoint<Fp> base = zero_cotangent<Fp>(Q, r);
  struct YSlot { std::string a; int l; Eigen::Index i, j; };
  std::vector<YSlot> yslots;
  for (const Arrow& a : Q.arrows) {
    HomElem<Fp>& h = base.y.at(a.id);
    for (int l = 0; l < h.mij; ++l)
      for (Eigen::Index j = 0; j < h.block_cols(); ++j)
        for (Eigen::Index i = 0; i < h.block_rows(); ++i) yslots.push_back({a.id, l, i, j});
  }
  long long out_dim = 0;
  for (const std::string& v : Q.vertices) out_dim += Q.m(v) * r.at(v) * r.at(v);
  auto flatten_mu = [&](const std::map<std::string, MatPoly<Fp>>& mu,
                        std::vector<std::uint32_t>& out) {
    out.assign(out_dim, 0);
    long long at = 0;
    for (const std::string& v : Q.vertices) {
      const MatPoly<Fp>& m = mu.at(v);
      for (int l = 0; l < m.m; ++l)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
          for (Eigen::Index i = 0; i < m.rows(); ++i) {
            Fp val = m.c[l](i, j);
            val.p = q;
            val.reduce();
            out[at++] = static_cast<std::uint32_t>(val.v);
          }
    }
  };

  // bilinear tensor T[k][l] = mu(e_k^x, e_l^y) coordinates
  std::vector<std::vector<std::vector<std::uint32_t>>> tensor(xlay.total);
  {
    RepPoint<Fp> ex = zero_rep<Fp>(Q, r);
    struct XSlot { std::string a; int l; Eigen::Index i, j; };
    std::vector<XSlot> xslots;
    for (const Arrow& a : Q.arrows) {
      HomElem<Fp>& h = ex.x.at(a.id);
      for (int l = 0; l < h.mij; ++l)
        for (Eigen::Index j = 0; j < h.block_cols(); ++j)
          for (Eigen::Index i = 0; i < h.block_rows(); ++i) xslots.push_back({a.id, l, i, j});
    }
    for (std::size_t k = 0; k < xslots.size(); ++k) {
      CotangentPoint<Fp> probe = base;
      probe.x = zero_rep<Fp>(Q, r);
      probe.x.x.at(xslots[k].a).blocks[xslots[k].l](xslots[k].i, xslots[k].j) = Fp(1, q);
      tensor[k].resize(yslots.size());
      for (std::size_t l = 0; l < yslots.size(); ++l) {
        CotangentPoint<Fp> pr = probe;
        pr.y.at(yslots[l].a).blocks[yslots[l].l](yslots[l].i, yslots[l].j) = Fp(1, q);
        flatten_mu(moment_map(Q, pr), tensor[k][l]);
      }
    }
  }
  std::vector<std::uint32_t> gamma_flat;
  flatten_mu(gamma, gamma_flat);

  bool generic = is_generic({theta, rho}, r) != Genericity::neither &&
                 is_generic({theta, const_vec(Q, 0)}, r) == Genericity::theta_generic;

  // tau coordinates of the doubled point: forward from x digits, reverse from
  // y values; the King verdict over the doubled quiver is a function of those
  PointLayout dlay = PointLayout::build(dq, r);
  std::vector<std::string> all_arrows;
  for (const Arrow& a : dq.arrows) all_arrows.push_back(a.id);
  VerdictPlan dplan(dq, r, theta, rho, q, all_arrows);

  // map doubled digit slots: forward arrows <- x digits, reverse <- y slots
  std::map<std::string, std::size_t> x_arrow_index, d_arrow_index;
  for (std::size_t i = 0; i < xlay.arrows.size(); ++i) x_arrow_index[xlay.arrows[i].id] = i;
  for (std::size_t i = 0; i < dlay.arrows.size(); ++i) d_arrow_index[dlay.arrows[i].id] = i;

  unsigned long long count = 0;
  std::vector<std::uint32_t> xdigits(xlay.total, 0);
  std::vector<std::uint32_t> ddigits(dlay.total, 0);
  std::vector<std::uint32_t> sys;  // out_dim x (ydim + 1) augmented, row-major
  const int ydim = static_cast<int>(yslots.size());
  (void)workers;  // the x loop is cheap relative to plan evaluation; single sweep

  for (unsigned long long xi = 0; xi < rep.total_points; ++xi) {
    // assemble the linear system sum_l M[.][l] y_l = gamma
    sys.assign(static_cast<std::size_t>(out_dim) * (ydim + 1), 0);
    for (std::size_t k = 0; k < xdigits.size(); ++k) {
      std::uint32_t xv = xdigits[k];
      if (!xv) continue;
      for (int l = 0; l < ydim; ++l) {
        const auto& col = tensor[k][l];
        for (long long o = 0; o < out_dim; ++o)
          sys[static_cast<std::size_t>(o) * (ydim + 1) + l] = static_cast<std::uint32_t>(
              (sys[static_cast<std::size_t>(o) * (ydim + 1) + l] +
               static_cast<unsigned long long>(xv) * col[o]) %
              q);
      }
    }
    for (long long o = 0; o < out_dim; ++o)
      sys[static_cast<std::size_t>(o) * (ydim + 1) + ydim] = gamma_flat[o];

    // gaussian elimination over F_q on the augmented system
    int rank = 0;
    bool inconsistent = false;
    std::vector<int> pivots;
    for (int col = 0; col < ydim + 1 && rank < out_dim; ++col) {
      int piv = -1;
      for (int row = rank; row < out_dim; ++row)
        if (sys[static_cast<std::size_t>(row) * (ydim + 1) + col] != 0) { piv = row; break; }
      if (piv < 0) continue;
      if (col == ydim) { inconsistent = true; break; }
      if (piv != rank)
        for (int c2 = 0; c2 <= ydim; ++c2)
          std::swap(sys[static_cast<std::size_t>(piv) * (ydim + 1) + c2],
                    sys[static_cast<std::size_t>(rank) * (ydim + 1) + c2]);
      std::uint32_t inv = detail::mod_inv(sys[static_cast<std::size_t>(rank) * (ydim + 1) + col], q);
      for (int c2 = col; c2 <= ydim; ++c2)
        sys[static_cast<std::size_t>(rank) * (ydim + 1) + c2] = static_cast<std::uint32_t>(
            static_cast<unsigned long long>(sys[static_cast<std::size_t>(rank) * (ydim + 1) + c2]) *
            inv % q);
      for (int row = 0; row < out_dim; ++row) {
        if (row == rank) continue;
        std::uint32_t f = sys[static_cast<std::size_t>(row) * (ydim + 1) + col];
        if (!f) continue;
        for (int c2 = col; c2 <= ydim; ++c2)
          sys[static_cast<std::size_t>(row) * (ydim + 1) + c2] = static_cast<std::uint32_t>(
              (sys[static_cast<std::size_t>(row) * (ydim + 1) + c2] +
               static_cast<unsigned long long>(q - f) *
                   sys[static_cast<std::size_t>(rank) * (ydim + 1) + c2]) %
              q);
      }
      pivots.push_back(col);
      ++rank;
    }

    if (!inconsistent) {
      // particular solution + kernel dimension
      int kdim = ydim - rank;
      std::vector<std::uint32_t> y0(ydim, 0);
      for (int i = 0; i < rank; ++i)
        y0[pivots[i]] = sys[static_cast<std::size_t>(i) * (ydim + 1) + ydim];
      std::vector<std::vector<std::uint32_t>> kbasis;
      std::vector<bool> is_piv(ydim, false);
      for (int c2 : pivots) is_piv[c2] = true;
      for (int free = 0; free < ydim; ++free) {
        if (is_piv[free]) continue;
        std::vector<std::uint32_t> kv(ydim, 0);
        kv[free] = 1;
        for (int i = 0; i < rank; ++i)
          kv[pivots[i]] = (q - sys[static_cast<std::size_t>(i) * (ydim + 1) + free]) % q;
        kbasis.push_back(std::move(kv));
      }

      // write x digits into the doubled layout once
      for (std::size_t ai = 0; ai < xlay.arrows.size(); ++ai) {
        const auto& as = xlay.arrows[ai];
        std::size_t di = d_arrow_index[as.id];
        for (int l = 0; l < as.mij; ++l)
          for (int i = 0; i < as.block_rows; ++i)
            for (int j = 0; j < as.block_cols; ++j)
              ddigits[dlay.slot(di, l, i, j)] = xdigits[xlay.slot(ai, l, i, j)];
      }
      auto write_y = [&](const std::vector<std::uint32_t>& y) {
        for (int l = 0; l < ydim; ++l) {
          const YSlot& ys = yslots[l];
          std::size_t di = d_arrow_index[ys.a + "*"];
          ddigits[dlay.slot(di, ys.l, static_cast<int>(ys.i), static_cast<int>(ys.j))] = y[l];
        }
      };

      if (generic && kdim <= 62) {
        // group fiber points by their reverse-truncation class: the verdict
        // depends only on the truncated doubled point, so it is enough to
        // visit one representative per class, weighted by the class size
        std::vector<std::size_t> tau_y_slots;  // y-slot indices carrying tau(y)
        for (int l = 0; l < ydim; ++l) {
          const YSlot& ys = yslots[l];
          const Arrow& a = Q.arrow(ys.a);
          PairConsts pc = arrow_consts(Q, a);
          // reverse arrow a*: j -> i; tau slot = block 0, block coords (f_ji, 1)
          int rt = static_cast<int>(r.at(a.from));
          if (ys.l == 0 && ys.i >= (pc.f_ji - 1) * rt && ys.j < r.at(a.to)) tau_y_slots.push_back(l);
        }
        // kernel vectors whose tau-projections form a basis of the image
        std::vector<std::vector<std::uint32_t>> reps;
        {
          detail::RefBasis probe;
          probe.n = static_cast<int>(tau_y_slots.size());
          for (const auto& kv : kbasis) {
            std::vector<std::uint32_t> pr;
            for (std::size_t t : tau_y_slots) pr.push_back(kv[t]);
            if (probe.insert(pr, q)) reps.push_back(kv);
          }
        }
        unsigned long long mult = 1;  // class size q^{kdim - rank of projection}
        for (std::size_t i = 0; i < kbasis.size() - reps.size(); ++i) mult *= q;
        std::vector<std::uint32_t> coeff(reps.size(), 0);
        std::vector<std::uint32_t> yrep(ydim, 0);
        while (true) {
          yrep = y0;
          for (std::size_t rI = 0; rI < reps.size(); ++rI) {
            std::uint32_t cv = coeff[rI];
            if (!cv) continue;
            for (int l = 0; l < ydim; ++l)
              yrep[l] = static_cast<std::uint32_t>(
                  (yrep[l] + static_cast<unsigned long long>(cv) * reps[rI][l]) % q);
          }
          write_y(yrep);
          if (dplan.eval(ddigits.data()) != SS::unstable) count += mult;
          std::size_t i = 0;
          for (; i < coeff.size(); ++i) {
            if (++coeff[i] < q) break;
            coeff[i] = 0;
          }
          if (i == coeff.size()) break;
        }
      } else {
        // explicit fiber enumeration under a stricter budget
        require(kdim <= 24, Err::TooLarge, "nakajima fiber enumeration exceeds guard");
        std::vector<std::uint32_t> coeff(kdim, 0);
        std::vector<std::uint32_t> y(ydim, 0);
        while (true) {
          y = y0;
          for (int rI = 0; rI < kdim; ++rI) {
            std::uint32_t cv = coeff[rI];
            if (!cv) continue;
            for (int l = 0; l < ydim; ++l)
              y[l] = static_cast<std::uint32_t>(
                  (y[l] + static_cast<unsigned long long>(cv) * kbasis[rI][l]) % q);
          }
          write_y(y);
          if (dplan.eval(ddigits.data()) != SS::unstable) ++count;
          std::size_t i = 0;
          for (; i < coeff.size(); ++i) {
            if (++coeff[i] < q) break;
            coeff[i] = 0;
          }
          if (i == coeff.size()) break;
        }
      }
    }

    for (std::size_t k = xdigits.size(); k-- > 0;) {
      if (++xdigits[k] < q) break;
      xdigits[k] = 0;
    }
  }
  rep.semistable = count;
  rep.cursor = rep.total_points;
  rep.complete = true;
  rep.freeness = detail::verify_freeness(dq, r, theta, rho, q, guard);
  detail::attach_moduli(rep);
  return rep;
}

/// Explicit S-equivalence class count via polystable representatives; only
/// for very small instances.
inline long long count_s_classes(const QuiverWithMult& Q, const IntVec& r, const IntVec& theta,
                                 const IntVec& rho, std::uint32_t q,
                                 unsigned long long guard = 1ull << 14,
                                 unsigned long long group_guard = 1ull << 16) {
  PointLayout lay = PointLayout::build(Q, r);
  unsigned long long total = detail::pow_check(q, lay.total, guard);
  std::vector<std::string> reps_seen;
  long long classes = 0;
  std::vector<std::uint32_t> digits(lay.total, 0);
  auto key_of = [&](const RepPoint<Fp>& p) {
    std::string k;
    for (const auto& [id, h] : p.x)
      for (const auto& b : h.blocks)
        for (Eigen::Index j = 0; j < b.cols(); ++j)
          for (Eigen::Index i = 0; i < b.rows(); ++i) k += std::to_string(b(i, j).v) + ",";
    return k;
  };
  for (unsigned long long i = 0; i < total; ++i) {
    RepPoint<Fp> p = lay.to_point(Q, r, digits, q);
    for (std::size_t k = digits.size(); k-- > 0;) {
      if (++digits[k] < q) break;
      digits[k] = 0;
    }
    if (semistable_mult(Q, p, theta, rho, q).verdict == SS::unstable) continue;
    auto fs = jh_filtrations(Q, p, theta, rho, q, false);
    require(!fs.empty(), Err::Unsupported, "no Jordan-Hoelder filtration found");
    // canonical representative: the lexicographically least point in the
    // orbit of the associated graded
    RepPoint<Fp> graded = fs[0].graded;
    std::string best;
    enumerate_group_points(Q, r, q, [&](const GroupElem<Fp>& g) {
      std::string k = key_of(act(Q, g, graded));
      if (best.empty() || k < best) best = k;
    });
    (void)group_guard;
    bool fresh = std::find(reps_seen.begin(), reps_seen.end(), best) == reps_seen.end();
    if (fresh) {
      reps_seen.push_back(best);
      ++classes;
    }
  }
  return classes;
}

// ---------------------------------------------------------------------------
// Exact polynomial fitting.

struct PolyFit {
  bool polynomial = false;
  std::vector<Rat> coeffs;  // low to high
  long long degree = -1;
  bool held_out_verified = false;  // more points than the interpolation needed
};

/// Minimal-degree exact interpolation through all points; NotPolynomial when
/// the minimal degree exceeds the bound. With more points than degree + 1 the
/// extra points act as held-out checks.
inline PolyFit poly_fit(const std::vector<std::pair<long long, long long>>& points,
                        long long degree_bound) {
  require(points.size() >= 2, Err::InsufficientData, "need at least two sample points");
  std::set<long long> qs;
  for (auto& [x, y] : points) qs.insert(x);
  require(qs.size() == points.size(), Err::InsufficientData, "sample points must be distinct");

  // Newton divided differences over exact rationals
  std::size_t n = points.size();
  std::vector<Rat> xs(n), divided(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = Rat(static_cast<long>(points[i].first));
    divided[i] = Rat(static_cast<long>(points[i].second));
  }
  for (std::size_t level = 1; level < n; ++level)
    for (std::size_t i = n - 1; i >= level; --i) {
      divided[i] = (divided[i] - divided[i - 1]) / (xs[i] - xs[i - level]);
      if (i == level) break;
    }
  // expand Newton form to monomial coefficients
  std::vector<Rat> coeffs{divided[0]};
  std::vector<Rat> basis{Rat(1)};  // product (x - x_0)...(x - x_{k-1})
  for (std::size_t k = 1; k < n; ++k) {
    // basis *= (x - x_{k-1})
    std::vector<Rat> nb(basis.size() + 1, Rat(0));
    for (std::size_t i = 0; i < basis.size(); ++i) {
      nb[i + 1] += basis[i];
      nb[i] -= basis[i] * xs[k - 1];
    }
    basis = std::move(nb);
    if (coeffs.size() < basis.size()) coeffs.resize(basis.size(), Rat(0));
    for (std::size_t i = 0; i < basis.size(); ++i) coeffs[i] += divided[k] * basis[i];
  }
  while (coeffs.size() > 1 && coeffs.back().is_zero()) coeffs.pop_back();
  long long degree = static_cast<long long>(coeffs.size()) - 1;
  if (coeffs.size() == 1 && coeffs[0].is_zero()) degree = 0;

  PolyFit fit;
  fit.coeffs = coeffs;
  fit.degree = degree;
  fit.polynomial = degree <= degree_bound;
  fit.held_out_verified = static_cast<long long>(n) >= degree + 2;
  return fit;
}

/// q-adic valuation helper used by dimension-degree checks: factor each count
/// as q^v * cofactor with the common minimal v.
inline std::pair<long long, std::vector<std::pair<long long, long long>>> strip_valuation(
    const std::vector<std::pair<long long, long long>>& points) {
  long long v = -1;
  for (auto& [q, n] : points) {
    require(n > 0, Err::InsufficientData, "counts must be positive to strip a valuation");
    long long val = 0, m = n;
    while (m % q == 0) {
      m /= q;
      ++val;
    }
    v = v < 0 ? val : std::min(v, val);
  }
  std::vector<std::pair<long long, long long>> cof;
  for (auto& [q, n] : points) {
    long long m = n;
    for (long long i = 0; i < v; ++i) m /= q;
    cof.push_back({q, m});
  }
  return {v, cof};
}

}  // namespace qmult
