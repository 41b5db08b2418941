#pragma once

#include <map>
#include <string>
#include <vector>

#include "qmult/rep.hpp"

// Locally free submodule families N_i <= k_{m_i}^{r_i} in epsilon-adapted
// column-reduced canonical form, and the restriction / quotient constructions
// on representations they support.

namespace qmult {

/// Per-vertex generator matrix over k_{m_i}, r_i x rank_i, canonical: pivot
/// rows (lex-first set invertible mod eps) carry the exact identity of k_m.
template <class K>
struct FreeSubmoduleFamily {
  IntVec rank;
  std::map<std::string, MatPoly<K>> gen;       // generator matrices
  std::map<std::string, std::vector<int>> piv; // pivot rows per vertex

  friend bool operator==(const FreeSubmoduleFamily& a, const FreeSubmoduleFamily& b) {
    return a.rank == b.rank && a.gen == b.gen;
  }
};

/// Expanded k-columns spanning N inside k^{m r} (power-rank basis): the
/// columns of the multiplication-operator expansion of the generator matrix.
template <class K>
Mat<K> expanded_generators(const MatPoly<K>& gen) {
  return mult_operator(gen);
}

/// Lex-first pivot row set making the mod-eps reduction invertible.
template <class K>
std::vector<int> pivot_rows(const Mat<K>& gbar) {
  Mat<K> t = gbar.transpose();
  std::vector<int> piv;
  rref(t, &piv);
  require(static_cast<Eigen::Index>(piv.size()) == gbar.cols(), Err::InvalidParams,
          "generator matrix not full column rank mod eps");
  return piv;
}

/// Column-reduce so that the pivot-row submatrix is the identity of k_m.
template <class K>
MatPoly<K> canonicalize_generators(const MatPoly<K>& gen, std::vector<int>* pivots_out = nullptr) {
  std::vector<int> piv = pivot_rows(gen.c[0]);
  MatPoly<K> sub(gen.m, gen.cols(), gen.cols());
  for (int l = 0; l < gen.m; ++l)
    for (Eigen::Index t = 0; t < gen.cols(); ++t)
      for (Eigen::Index s = 0; s < gen.cols(); ++s) sub.c[l](t, s) = gen.c[l](piv[t], s);
  MatPoly<K> out = mp_mul(gen, mp_inv(sub));
  if (pivots_out) *pivots_out = piv;
  return out;
}

template <class K>
FreeSubmoduleFamily<K> make_family(const QuiverWithMult& Q, std::map<std::string, MatPoly<K>> gens) {
  FreeSubmoduleFamily<K> f;
  for (const std::string& v : Q.vertices) {
    MatPoly<K>& g = gens.at(v);
    f.rank[v] = g.cols();
    if (g.cols() > 0) {
      std::vector<int> piv;
      f.gen[v] = canonicalize_generators(g, &piv);
      f.piv[v] = piv;
    } else {
      f.gen[v] = g;
      f.piv[v] = {};
    }
  }
  return f;
}

/// Count of rank-r' free submodules of k_m^r over F_q:
/// |Gr(r',r)(F_q)| * q^{(m-1) r' (r-r')}.
inline unsigned long long free_submodule_count(int m, int r, int rp, std::uint32_t q) {
  // Gaussian binomial by the product formula, small sizes only.
  unsigned long long num = 1, den = 1;
  auto qpow = [&](int e) {
    unsigned long long x = 1;
    for (int i = 0; i < e; ++i) x *= q;
    return x;
  };
  for (int i = 0; i < rp; ++i) {
    num *= qpow(r - i) - 1;
    den *= qpow(i + 1) - 1;
  }
  unsigned long long count = num / den;
  return count * qpow((m - 1) * rp * (r - rp));
}

/// One canonical generator matrix per rank-r' free submodule of k_m^{+r}.
/// Cell structure: pivot set P, entries at non-pivot rows free (all m
/// coefficients below the pivot, coefficients 1..m-1 above it).
inline std::vector<MatPoly<Fp>> enumerate_free_submodules(int m, int r, int rp, std::uint32_t q,
                                                          unsigned long long guard = 1ull << 22) {
  require(0 <= rp && rp <= r, Err::InvalidParams, "rank out of range");
  require(free_submodule_count(m, r, rp, q) <= guard, Err::TooLarge,
          "free submodule enumeration exceeds guard");
  FieldCtx<Fp> F{q};
  std::vector<MatPoly<Fp>> out;
  if (rp == 0) {
    out.emplace_back(m, r, 0);
    return out;
  }
  std::vector<int> piv(rp);
  for (int i = 0; i < rp; ++i) piv[i] = i;
  while (true) {
    struct Pos { int row, col, coeff; };
    std::vector<Pos> free_pos;
    std::vector<bool> is_piv(r, false);
    for (int c = 0; c < rp; ++c) is_piv[piv[c]] = true;
    for (int c = 0; c < rp; ++c)
      for (int row = 0; row < r; ++row) {
        if (is_piv[row]) continue;
        int first = row > piv[c] ? 0 : 1;  // above-pivot rows vanish mod eps
        for (int l = first; l < m; ++l) free_pos.push_back(Pos{row, c, l});
      }
    std::vector<std::uint32_t> digits(free_pos.size(), 0);
    while (true) {
      MatPoly<Fp> g(m, r, rp);
      for (int c = 0; c < rp; ++c) g.c[0](piv[c], c) = F.from_int(1);
      for (std::size_t k = 0; k < free_pos.size(); ++k)
        g.c[free_pos[k].coeff](free_pos[k].row, free_pos[k].col) = F.element(digits[k]);
      out.push_back(std::move(g));
      std::size_t idx = 0;
      for (; idx < digits.size(); ++idx) {
        if (++digits[idx] < q) break;
        digits[idx] = 0;
      }
      if (idx == digits.size()) break;
    }
    int i = rp - 1;
    while (i >= 0 && piv[i] == r - rp + i) --i;
    if (i < 0) break;
    ++piv[i];
    for (int j = i + 1; j < rp; ++j) piv[j] = piv[j - 1] + 1;
  }
  return out;
}

/// x_a(N_{s(a)}) <= N_{t(a)} for every arrow.
template <class K>
bool is_subrep(const QuiverWithMult& Q, const RepPoint<K>& p, const FreeSubmoduleFamily<K>& fam) {
  std::map<std::string, Subspace<K>> span;
  for (const std::string& v : Q.vertices)
    span[v] = Subspace<K>::span(expanded_generators(fam.gen.at(v)));
  for (const Arrow& a : Q.arrows) {
    Mat<K> img = expand_full(p.x.at(a.id)) * expanded_generators(fam.gen.at(a.from));
    if (!span.at(a.to).contains_cols(img)) return false;
  }
  return true;
}

/// The subrepresentation carried by a closed family, in generator bases.
template <class K>
RepPoint<K> restrict_rep(const QuiverWithMult& Q, const RepPoint<K>& p,
                         const FreeSubmoduleFamily<K>& fam) {
  RepPoint<K> out;
  out.rank = fam.rank;
  for (const Arrow& a : Q.arrows) {
    const HomElem<K>& h = p.x.at(a.id);
    Mat<K> gi = expanded_generators(fam.gen.at(a.from));
    Mat<K> gj = expanded_generators(fam.gen.at(a.to));
    Mat<K> img = expand_full(h) * gi;
    Mat<K> y = zeros<K>(gj.cols(), gi.cols());
    for (Eigen::Index col = 0; col < img.cols(); ++col) {
      auto sol = solve_linear(gj, Vec<K>(img.col(col)));
      require(sol.has_value(), Err::InvalidParams, "family is not closed under the arrow maps");
      y.col(col) = *sol;
    }
    out.x[a.id] = compress_full(h.mi, h.mj, static_cast<int>(fam.rank.at(a.from)),
                                static_cast<int>(fam.rank.at(a.to)), y);
  }
  return out;
}

/// Quotient representation on the complement coordinates (rows outside the
/// pivot set), with the projection v |-> v - G v_P.
template <class K>
RepPoint<K> quotient_rep(const QuiverWithMult& Q, const RepPoint<K>& p,
                         const FreeSubmoduleFamily<K>& fam) {
  RepPoint<K> out;
  std::map<std::string, MatPoly<K>> proj, incl;
  for (const std::string& v : Q.vertices) {
    int r = static_cast<int>(p.rank.at(v));
    int rp = static_cast<int>(fam.rank.at(v));
    int m = Q.m(v);
    const std::vector<int>& piv = fam.piv.at(v);
    std::vector<bool> is_piv(r, false);
    for (int x : piv) is_piv[x] = true;
    std::vector<int> comp;
    for (int row = 0; row < r; ++row)
      if (!is_piv[row]) comp.push_back(row);
    out.rank[v] = r - rp;
    MatPoly<K> pr(m, r - rp, r), in(m, r, r - rp);
    for (std::size_t c = 0; c < comp.size(); ++c) {
      pr.c[0](c, comp[c]) = k_one<K>();
      in.c[0](comp[c], c) = k_one<K>();
    }
    // projection along N: v |-> v - G v_P, read off on complement rows
    for (int l = 0; l < m; ++l)
      for (std::size_t c = 0; c < comp.size(); ++c)
        for (int t = 0; t < rp; ++t)
          pr.c[l](c, piv[t]) -= fam.gen.at(v).c[l](comp[c], t);
    proj[v] = pr;
    incl[v] = in;
  }
  for (const Arrow& a : Q.arrows) {
    const HomElem<K>& h = p.x.at(a.id);
    Mat<K> y = mult_operator(proj.at(a.to)) * expand_full(h) * mult_operator(incl.at(a.from));
    out.x[a.id] = compress_full(h.mi, h.mj, static_cast<int>(out.rank.at(a.from)),
                                static_cast<int>(out.rank.at(a.to)), y);
  }
  return out;
}

/// Rebuild a canonical family from an expanded eps-stable subspace known to be
/// free of the stated rank: lift a basis of W/(W cap eps M) and canonicalise.
template <class K>
MatPoly<K> family_from_expanded(int m, int r, const Subspace<K>& w, int rank) {
  // project columns to the bottom r coordinates (power rank m-1 <=> eps^0)
  Mat<K> bottom = zeros<K>(r, w.dim());
  for (Eigen::Index j = 0; j < w.dim(); ++j)
    for (int i = 0; i < r; ++i) bottom(i, j) = w.basis((m - 1) * r + i, j);
  std::vector<int> piv;  // columns of w whose projections are independent
  int rk = rref(bottom, &piv);
  require(rk == rank, Err::InvalidParams, "subspace is not free of the stated rank");
  MatPoly<K> gen(m, r, rank);
  for (int c = 0; c < rank; ++c) {
    // column piv[c] of w.basis lifts the c-th reduced basis vector
    for (int j = 0; j < m; ++j)
      for (int row = 0; row < r; ++row)
        gen.c[m - 1 - j](row, c) = w.basis(j * r + row, piv[c]);
  }
  return canonicalize_generators(gen);
}

}  // namespace qmult
