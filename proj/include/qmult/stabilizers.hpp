#pragma once

#include <numeric>

#include "qmult/stability.hpp"

// Endomorphism algebras of classical representations, the graded pieces
// End(x)_q along the interval I, closed-form unipotent stabilisers of
// truncated points, and the sufficient conditions for assumption [U;theta].

namespace qmult {

/// Basis of End(x) in gl_r: tuples xi = (xi_i) with xi_t v_a = v_a xi_s.
template <class K>
std::vector<std::map<std::string, Mat<K>>> end_classical(const QuiverWithMult& Q,
                                                         const ClassicalRep<K>& v) {
  // unknowns: entries of xi_i, vertex by vertex
  std::vector<std::pair<std::string, std::pair<int, int>>> unknowns;
  std::map<std::string, int> offset;
  int total = 0;
  for (const std::string& vert : Q.vertices) {
    offset[vert] = total;
    int r = static_cast<int>(v.dim.at(vert));
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) unknowns.push_back({vert, {i, j}});
    total += r * r;
  }
  long long rows = 0;
  for (const Arrow& a : Q.arrows) rows += v.dim.at(a.to) * v.dim.at(a.from);
  Mat<K> sys = zeros<K>(rows, total);
  long long row = 0;
  for (const Arrow& a : Q.arrows) {
    const Mat<K>& va = v.v.at(a.id);
    int rt = static_cast<int>(v.dim.at(a.to)), rs = static_cast<int>(v.dim.at(a.from));
    for (int i = 0; i < rt; ++i)
      for (int j = 0; j < rs; ++j) {
        // (xi_t v_a - v_a xi_s)(i, j) = sum_k xi_t(i,k) va(k,j) - va(i,k) xi_s(k,j)
        for (int k = 0; k < rt; ++k) sys(row, offset[a.to] + i * rt + k) += va(k, j);
        for (int k = 0; k < rs; ++k) sys(row, offset[a.from] + k * rs + j) -= va(i, k);
        ++row;
      }
  }
  Mat<K> ker = kernel_basis(sys);
  std::vector<std::map<std::string, Mat<K>>> basis;
  for (Eigen::Index c = 0; c < ker.cols(); ++c) {
    std::map<std::string, Mat<K>> xi;
    for (const std::string& vert : Q.vertices) {
      int r = static_cast<int>(v.dim.at(vert));
      Mat<K> m = zeros<K>(r, r);
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) m(i, j) = ker(offset[vert] + i * r + j, c);
      xi[vert] = m;
    }
    basis.push_back(std::move(xi));
  }
  return basis;
}

template <class K>
bool jointly_injective(const QuiverWithMult& Q, const ClassicalRep<K>& v, const std::string& i) {
  // intersection of kernels of outgoing maps is zero
  int r = static_cast<int>(v.dim.at(i));
  Subspace<K> cap = Subspace<K>::full(r);
  for (const Arrow& a : Q.arrows) {
    if (a.from != i) continue;
    cap = Subspace<K>::intersect(cap, Subspace<K>::span(kernel_basis(v.v.at(a.id))));
  }
  return cap.dim() == 0;
}

template <class K>
bool jointly_surjective(const QuiverWithMult& Q, const ClassicalRep<K>& v, const std::string& i) {
  int r = static_cast<int>(v.dim.at(i));
  Subspace<K> sum = Subspace<K>::zero(r);
  for (const Arrow& a : Q.arrows) {
    if (a.to != i) continue;
    sum = Subspace<K>::sum(sum, Subspace<K>::span(v.v.at(a.id)));
  }
  return sum.dim() == r;
}

/// dim End(x)_i = dim Hom(V_i / sum Im, cap Ker).
template <class K>
long long end_at_vertex(const QuiverWithMult& Q, const ClassicalRep<K>& v, const std::string& i) {
  int r = static_cast<int>(v.dim.at(i));
  Subspace<K> cap = Subspace<K>::full(r);
  for (const Arrow& a : Q.arrows)
    if (a.from == i) cap = Subspace<K>::intersect(cap, Subspace<K>::span(kernel_basis(v.v.at(a.id))));
  Subspace<K> sum = Subspace<K>::zero(r);
  for (const Arrow& a : Q.arrows)
    if (a.to == i) sum = Subspace<K>::sum(sum, Subspace<K>::span(v.v.at(a.id)));
  return (r - sum.dim()) * cap.dim();
}

/// s = p/m_i in (0,1); q_i = s m_i; support = vertices with integral q_i.
struct AdmissibleLevel {
  long long num = 0, den = 1;  // s reduced
  std::vector<std::string> support;
  std::map<std::string, long long> q;  // defined on the support
  bool delta_level = false;
};

inline std::vector<AdmissibleLevel> admissible_levels(const QuiverWithMult& Q) {
  DerivedConstants d = derived_constants(Q);
  std::set<std::pair<long long, long long>> seen;
  std::vector<AdmissibleLevel> out;
  for (const std::string& v : Q.vertices)
    for (int p = 1; p < Q.m(v); ++p) {
      long long g = std::gcd(static_cast<long long>(p), static_cast<long long>(Q.m(v)));
      seen.insert({p / g, Q.m(v) / g});
    }
  for (const auto& [num, den] : seen) {
    AdmissibleLevel lvl;
    lvl.num = num;
    lvl.den = den;
    for (const std::string& v : Q.vertices) {
      long long qi_num = num * Q.m(v);
      if (qi_num % den) continue;
      lvl.support.push_back(v);
      lvl.q[v] = qi_num / den;
    }
    lvl.delta_level = (d.delta % den == 0);
    out.push_back(std::move(lvl));
  }
  std::sort(out.begin(), out.end(), [](const AdmissibleLevel& a, const AdmissibleLevel& b) {
    return a.num * b.den < b.num * a.den;
  });
  return out;
}

/// dim of End(x)_q = endomorphisms supported on the level's support.
template <class K>
long long end_level_dim(const QuiverWithMult& Q, const ClassicalRep<K>& v,
                        const AdmissibleLevel& lvl, bool* scalars_only = nullptr) {
  std::set<std::string> sup(lvl.support.begin(), lvl.support.end());
  std::map<std::string, int> offset;
  int total = 0;
  for (const std::string& vert : lvl.support) {
    offset[vert] = total;
    total += static_cast<int>(v.dim.at(vert)) * static_cast<int>(v.dim.at(vert));
  }
  if (total == 0) {
    if (scalars_only) *scalars_only = false;
    return 0;
  }
  long long rows = 0;
  for (const Arrow& a : Q.arrows) rows += v.dim.at(a.to) * v.dim.at(a.from);
  Mat<K> sys = zeros<K>(rows, total);
  long long row = 0;
  for (const Arrow& a : Q.arrows) {
    const Mat<K>& va = v.v.at(a.id);
    int rt = static_cast<int>(v.dim.at(a.to)), rs = static_cast<int>(v.dim.at(a.from));
    bool t_in = sup.count(a.to), s_in = sup.count(a.from);
    for (int i = 0; i < rt; ++i)
      for (int j = 0; j < rs; ++j) {
        if (t_in)
          for (int k = 0; k < rt; ++k) sys(row, offset[a.to] + i * rt + k) += va(k, j);
        if (s_in)
          for (int k = 0; k < rs; ++k) sys(row, offset[a.from] + k * rs + j) -= va(i, k);
        ++row;
      }
  }
  Mat<K> ker = kernel_basis(sys);
  if (scalars_only) {
    // the level piece is exactly the scalar line iff dim = 1 (scalar tuples
    // always belong when the support is full)
    *scalars_only = false;
    if (ker.cols() == 1) {
      // verify the single basis vector is a scalar tuple with one common value
      bool ok = true;
      bool have = false;
      K common{};
      for (const std::string& vert : lvl.support) {
        int r = static_cast<int>(v.dim.at(vert));
        if (r == 0) continue;
        K diag = ker(offset[vert], 0);
        for (int i = 0; i < r && ok; ++i)
          for (int j = 0; j < r && ok; ++j) {
            K want = (i == j) ? diag : K();
            if (ker(offset[vert] + i * r + j, 0) != want) ok = false;
          }
        if (!have) {
          common = diag;
          have = true;
        } else if (diag != common) {
          ok = false;
        }
      }
      *scalars_only = ok && have && !common.is_zero();
    }
  }
  return ker.cols();
}

struct UnipStabReport {
  long long dim = 0;
  bool in_delta = false;
  struct Level {
    AdmissibleLevel level;
    long long dim;
  };
  std::vector<Level> per_level;
};

/// Closed form for Stab_U(iota(v)): one End(v)_q summand per admissible
/// level; contained in Delta_m iff non-delta levels vanish and delta levels
/// carry exactly the scalar line.
template <class K>
UnipStabReport unip_stab(const QuiverWithMult& Q, const ClassicalRep<K>& v) {
  UnipStabReport rep;
  rep.in_delta = true;
  for (const AdmissibleLevel& lvl : admissible_levels(Q)) {
    bool scalars = false;
    long long d = end_level_dim(Q, v, lvl, &scalars);
    rep.dim += d;
    rep.per_level.push_back({lvl, d});
    if (lvl.delta_level) {
      if (!(d == 1 && scalars)) rep.in_delta = false;
    } else if (d != 0) {
      rep.in_delta = false;
    }
  }
  return rep;
}

/// |Stab_U(iota(v))(F_q)| by enumerating the unipotent radical.
inline unsigned long long brute_force_stab_u_order(const QuiverWithMult& Q,
                                                   const ClassicalRep<Fp>& v, std::uint32_t q,
                                                   unsigned long long guard = 1ull << 22) {
  unsigned long long udim = 0;
  for (const std::string& vert : Q.vertices)
    udim += static_cast<unsigned long long>(Q.m(vert) - 1) * v.dim.at(vert) * v.dim.at(vert);
  unsigned long long usize = 1;
  for (unsigned long long i = 0; i < udim; ++i) {
    usize *= q;
    require(usize <= guard, Err::TooLarge, "unipotent radical enumeration exceeds guard");
  }
  RepPoint<Fp> ix = section_iota(Q, v);
  unsigned long long count = 0;
  enumerate_group_points(Q, v.dim, q, [&](const GroupElem<Fp>& g) {
    if (!in_unipotent_radical(g)) return;
    if (act(Q, g, ix) == ix) ++count;
  });
  return count;
}

struct AssumptionUReport {
  bool holds = true;
  std::optional<ClassicalRep<Fp>> counterexample;
  unsigned long long semistable_scanned = 0;
};

/// Exhaustive scan: every theta-semistable classical F_q-point must have
/// Stab_U(iota(x)) inside Delta_m.
inline AssumptionUReport check_assumption_U(const QuiverWithMult& Q, const IntVec& r,
                                            const IntVec& theta, std::uint32_t q,
                                            unsigned long long guard = 1ull << 22) {
  AssumptionUReport rep;
  unsigned long long dim = 0;
  for (const Arrow& a : Q.arrows) dim += r.at(a.from) * r.at(a.to);
  unsigned long long total = 1;
  for (unsigned long long i = 0; i < dim; ++i) {
    total *= q;
    require(total <= guard, Err::TooLarge, "classical point scan exceeds guard");
  }
  ClassicalRep<Fp> v = zero_classical<Fp>(Q, r);
  struct Slot { std::string a; Eigen::Index i, j; };
  std::vector<Slot> slots;
  for (const Arrow& a : Q.arrows)
    for (Eigen::Index j = 0; j < r.at(a.from); ++j)
      for (Eigen::Index i = 0; i < r.at(a.to); ++i) slots.push_back({a.id, i, j});
  std::vector<std::uint32_t> digits(slots.size(), 0);
  FieldCtx<Fp> F{q};
  while (true) {
    for (std::size_t k = 0; k < slots.size(); ++k)
      v.v[slots[k].a](slots[k].i, slots[k].j) = F.element(digits[k]);
    if (king_semistable(Q, v, theta, q, guard).verdict != SS::unstable) {
      ++rep.semistable_scanned;
      if (!unip_stab(Q, v).in_delta) {
        rep.holds = false;
        if (!rep.counterexample) rep.counterexample = v;
      }
    }
    std::size_t i = 0;
    for (; i < digits.size(); ++i) {
      if (++digits[i] < q) break;
      digits[i] = 0;
    }
    if (i == digits.size()) break;
  }
  return rep;
}

struct SufficientConditionsReport {
  bool indivisible_and_generic = false;       // item i
  bool ss_equals_s = false;                   // item ii, scanned over F_q
  bool coprime_neighbours = false;            // item iii, structural part
  bool inj_or_surj_everywhere = false;        // item iii, pointwise part over F_q
  bool any_condition = false;
};

inline SufficientConditionsReport sufficient_conditions(const QuiverWithMult& Q, const IntVec& r,
                                                        const IntVec& theta, std::uint32_t q = 2,
                                                        unsigned long long guard = 1ull << 22) {
  SufficientConditionsReport rep;
  rep.indivisible_and_generic =
      is_indivisible(r) && is_generic({theta, const_vec(Q, 0)}, r) == Genericity::theta_generic;
  rep.coprime_neighbours = true;
  for (const Arrow& a : Q.arrows)
    if (std::gcd(Q.m(a.from), Q.m(a.to)) != 1) rep.coprime_neighbours = false;
  // scans
  rep.ss_equals_s = true;
  rep.inj_or_surj_everywhere = true;
  ClassicalRep<Fp> v = zero_classical<Fp>(Q, r);
  struct Slot { std::string a; Eigen::Index i, j; };
  std::vector<Slot> slots;
  for (const Arrow& a : Q.arrows)
    for (Eigen::Index j = 0; j < r.at(a.from); ++j)
      for (Eigen::Index i = 0; i < r.at(a.to); ++i) slots.push_back({a.id, i, j});
  unsigned long long total = 1;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    total *= q;
    require(total <= guard, Err::TooLarge, "scan exceeds guard");
  }
  std::vector<std::uint32_t> digits(slots.size(), 0);
  FieldCtx<Fp> F{q};
  while (true) {
    for (std::size_t k = 0; k < slots.size(); ++k)
      v.v[slots[k].a](slots[k].i, slots[k].j) = F.element(digits[k]);
    SS verdict = king_semistable(Q, v, theta, q, guard).verdict;
    if (verdict == SS::strictly_semistable) rep.ss_equals_s = false;
    if (verdict != SS::unstable) {
      for (const std::string& vert : Q.vertices)
        if (!jointly_injective(Q, v, vert) && !jointly_surjective(Q, v, vert))
          rep.inj_or_surj_everywhere = false;
    }
    std::size_t i = 0;
    for (; i < digits.size(); ++i) {
      if (++digits[i] < q) break;
      digits[i] = 0;
    }
    if (i == digits.size()) break;
  }
  rep.any_condition = rep.indivisible_and_generic || rep.ss_equals_s ||
                      (rep.coprime_neighbours && rep.inj_or_surj_everywhere);
  return rep;
}

}  // namespace qmult
