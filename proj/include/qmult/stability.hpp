#pragma once

#include <optional>
#include <variant>

#include "qmult/grading.hpp"
#include "qmult/submodule.hpp"

// King semistability for classical representations, (theta,rho)-stability for
// representations with multiplicities (definition route and direct oracle),
// Hilbert-Mumford pairings, naive Jordan-Hoelder filtrations and
// polystability.

namespace qmult {

enum class SS { stable, strictly_semistable, unstable };

inline const char* ss_name(SS s) {
  switch (s) {
    case SS::stable: return "stable";
    case SS::strictly_semistable: return "strictly_semistable";
    case SS::unstable: return "unstable";
  }
  return "?";
}

/// Destabilising or strictness witness: a graded subspace family of the
/// truncation (condition 1) or a locally free submodule family (condition 2).
template <class K>
struct StabWitness {
  std::map<std::string, Subspace<K>> graded;
  std::optional<FreeSubmoduleFamily<K>> family;
  IntVec dims;
};

template <class K>
struct Verdict {
  SS verdict;
  std::optional<StabWitness<K>> witness;  // present when not stable
};

// ---------------------------------------------------------------------------
// King semistability for classical representations.

template <class K>
bool graded_family_closed(const QuiverWithMult& Q, const ClassicalRep<K>& v,
                          const std::map<std::string, Subspace<K>>& fam) {
  for (const Arrow& a : Q.arrows) {
    const Subspace<K>& src = fam.at(a.from);
    if (src.dim() == 0) continue;
    if (!fam.at(a.to).contains_cols(Mat<K>(v.v.at(a.id) * src.basis))) return false;
  }
  return true;
}

/// Scan a fixed list of per-vertex subspace candidates. Shared by the
/// finite-field path (all subspaces) and the small-rank rational path.
template <class K>
Verdict<K> king_scan(const QuiverWithMult& Q, const ClassicalRep<K>& v, const IntVec& theta,
                     const std::map<std::string, std::vector<Subspace<K>>>& cands) {
  Verdict<K> out{SS::stable, std::nullopt};
  std::vector<std::string> verts(Q.vertices);
  std::vector<std::size_t> idx(verts.size(), 0);
  std::optional<StabWitness<K>> strict_witness;
  while (true) {
    std::map<std::string, Subspace<K>> fam;
    IntVec dims;
    long long total = 0, full = 0;
    for (std::size_t i = 0; i < verts.size(); ++i) {
      const Subspace<K>& s = cands.at(verts[i])[idx[i]];
      fam[verts[i]] = s;
      dims[verts[i]] = s.dim();
      total += s.dim();
      full += v.dim.at(verts[i]);
    }
    bool proper = total > 0 && total < full;
    if (proper && graded_family_closed(Q, v, fam)) {
      long long t = dot(theta, dims);
      if (t < 0) {
        out.verdict = SS::unstable;
        out.witness = StabWitness<K>{fam, std::nullopt, dims};
        return out;
      }
      if (t == 0 && !strict_witness) strict_witness = StabWitness<K>{fam, std::nullopt, dims};
    }
    std::size_t i = 0;
    for (; i < verts.size(); ++i) {
      if (++idx[i] < cands.at(verts[i]).size()) break;
      idx[i] = 0;
    }
    if (i == verts.size()) break;
  }
  if (strict_witness) {
    out.verdict = SS::strictly_semistable;
    out.witness = strict_witness;
  }
  return out;
}

inline std::map<std::string, std::vector<Subspace<Fp>>> all_subspace_candidates(
    const QuiverWithMult& Q, const IntVec& dim, std::uint32_t q, unsigned long long guard) {
  std::map<std::string, std::vector<Subspace<Fp>>> cands;
  unsigned long long total = 1;
  for (const std::string& v : Q.vertices) {
    cands[v] = enumerate_subspaces(static_cast<int>(dim.at(v)), q);
    total *= cands[v].size();
    require(total <= guard, Err::TooLarge, "graded subspace scan exceeds guard");
  }
  return cands;
}

inline Verdict<Fp> king_semistable(const QuiverWithMult& Q, const ClassicalRep<Fp>& v,
                                   const IntVec& theta, std::uint32_t q,
                                   unsigned long long guard = 1ull << 22) {
  require(dot(theta, v.dim) == 0, Err::NotOrthogonal, "theta . dim != 0");
  return king_scan(Q, v, theta, all_subspace_candidates(Q, v.dim, q, guard));
}

/// Rational-field King test. Exact when every vertex dimension is <= 1 (the
/// candidate subspaces are just 0 and the line). Otherwise candidates come
/// from the lattice generated by arrow kernels and images under sum,
/// intersection, subrepresentation closure and interior; a destabiliser found
/// there is definitive, a clean scan is not, and the test refuses to guess.
inline Verdict<Rat> king_semistable(const QuiverWithMult& Q, const ClassicalRep<Rat>& v,
                                    const IntVec& theta, unsigned long long lattice_guard = 512) {
  require(dot(theta, v.dim) == 0, Err::NotOrthogonal, "theta . dim != 0");
  bool toric = true;
  for (const std::string& vert : Q.vertices) toric = toric && v.dim.at(vert) <= 1;
  if (toric) {
    std::map<std::string, std::vector<Subspace<Rat>>> cands;
    for (const std::string& vert : Q.vertices) {
      std::vector<Subspace<Rat>> list{Subspace<Rat>::zero(v.dim.at(vert))};
      if (v.dim.at(vert) == 1) list.push_back(Subspace<Rat>::full(1));
      cands[vert] = list;
    }
    return king_scan(Q, v, theta, cands);
  }

  using Family = std::map<std::string, Subspace<Rat>>;
  auto closure_up = [&](Family f) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const Arrow& a : Q.arrows) {
        Subspace<Rat> img = f.at(a.from).apply(v.v.at(a.id));
        Subspace<Rat> sum = Subspace<Rat>::sum(f.at(a.to), img);
        if (sum.dim() != f.at(a.to).dim()) {
          f[a.to] = sum;
          changed = true;
        }
      }
    }
    return f;
  };
  auto closure_down = [&](Family f) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const Arrow& a : Q.arrows) {
        Subspace<Rat> pre = Subspace<Rat>::preimage(v.v.at(a.id), f.at(a.to));
        Subspace<Rat> cap = Subspace<Rat>::intersect(f.at(a.from), pre);
        if (cap.dim() != f.at(a.from).dim()) {
          f[a.from] = cap;
          changed = true;
        }
      }
    }
    return f;
  };
  auto base = [&](bool full) {
    Family f;
    for (const std::string& vert : Q.vertices)
      f[vert] = full ? Subspace<Rat>::full(v.dim.at(vert)) : Subspace<Rat>::zero(v.dim.at(vert));
    return f;
  };
  auto key = [&](const Family& f) {
    std::string k;
    for (const auto& [vert, s] : f) {
      k += vert + ":";
      for (Eigen::Index j = 0; j < s.dim(); ++j)
        for (Eigen::Index i = 0; i < s.ambient(); ++i) k += s.basis(i, j).str() + ",";
      k += ";";
    }
    return k;
  };

  std::vector<Family> lattice;
  std::set<std::string> seen;
  auto add = [&](const Family& f) {
    std::string k = key(f);
    if (seen.insert(k).second) lattice.push_back(f);
  };
  for (const Arrow& a : Q.arrows) {
    Family fk = base(false);
    fk[a.from] = Subspace<Rat>::span(kernel_basis(v.v.at(a.id)));
    add(closure_up(fk));
    Family fi = base(false);
    fi[a.to] = Subspace<Rat>::span(v.v.at(a.id));
    add(closure_up(fi));
  }
  for (const std::string& vert : Q.vertices) {
    Family fv = base(false);
    fv[vert] = Subspace<Rat>::full(v.dim.at(vert));
    add(closure_up(fv));
    Family fc = base(true);
    fc[vert] = Subspace<Rat>::zero(v.dim.at(vert));
    add(closure_down(fc));
  }
  for (std::size_t grow = 0; grow < lattice.size(); ++grow) {
    for (std::size_t j = 0; j < grow && lattice.size() < lattice_guard; ++j) {
      Family s, c;
      for (const std::string& vert : Q.vertices) {
        s[vert] = Subspace<Rat>::sum(lattice[grow].at(vert), lattice[j].at(vert));
        c[vert] = Subspace<Rat>::intersect(lattice[grow].at(vert), lattice[j].at(vert));
      }
      add(s);
      add(c);
    }
    if (lattice.size() >= lattice_guard) break;
  }

  for (const Family& f : lattice) {
    IntVec dims;
    long long total = 0, full = 0;
    for (const std::string& vert : Q.vertices) {
      dims[vert] = f.at(vert).dim();
      total += dims[vert];
      full += v.dim.at(vert);
    }
    if (total == 0 || total == full) continue;
    if (!graded_family_closed(Q, v, f)) continue;
    if (dot(theta, dims) < 0)
      return Verdict<Rat>{SS::unstable, StabWitness<Rat>{f, std::nullopt, dims}};
  }
  fail(Err::Unsupported, "rational King test is exact only for vertex dimensions <= 1; "
                         "the kernel/image lattice found no destabiliser");
}

// ---------------------------------------------------------------------------
// (theta, rho)-semistability via the definition (truncation shortcut for
// condition 1, locally free families for condition 2).

/// Candidate free-submodule families per rank vector with theta . rk = 0.
template <class K>
struct Cond2Scan {
  SS verdict = SS::stable;
  std::optional<StabWitness<K>> witness;
};

template <class K, class FamilySource>
Cond2Scan<K> scan_condition2(const QuiverWithMult& Q, const RepPoint<K>& x, const IntVec& theta,
                             const IntVec& rho, FamilySource&& families_of_rank) {
  Cond2Scan<K> out;
  std::optional<StabWitness<K>> strict;
  bool aborted = false;
  for_each_proper_subvector(x.rank, [&](const IntVec& sub) {
    if (aborted || dot(theta, sub) != 0) return;
    std::map<std::string, std::vector<MatPoly<K>>> per_vertex;
    for (const std::string& v : Q.vertices) {
      per_vertex[v] = families_of_rank(v, static_cast<int>(sub.at(v)));
      if (per_vertex[v].empty()) return;  // rank not realisable / unsupported
    }
    std::vector<std::string> verts(Q.vertices);
    std::vector<std::size_t> idx(verts.size(), 0);
    while (!aborted) {
      std::map<std::string, MatPoly<K>> gens;
      for (std::size_t i = 0; i < verts.size(); ++i) gens[verts[i]] = per_vertex[verts[i]][idx[i]];
      FreeSubmoduleFamily<K> fam = make_family(Q, gens);
      if (is_subrep(Q, x, fam)) {
        long long rr = dot(rho, sub);
        if (rr < 0) {
          out.verdict = SS::unstable;
          out.witness = StabWitness<K>{{}, fam, sub};
          aborted = true;
          return;
        }
        if (rr == 0 && !strict) strict = StabWitness<K>{{}, fam, sub};
      }
      std::size_t i = 0;
      for (; i < verts.size(); ++i) {
        if (++idx[i] < per_vertex[verts[i]].size()) break;
        idx[i] = 0;
      }
      if (i == verts.size()) break;
    }
  });
  if (out.verdict != SS::unstable && strict) {
    out.verdict = SS::strictly_semistable;
    out.witness = strict;
  }
  return out;
}

inline Verdict<Fp> semistable_mult(const QuiverWithMult& Q, const RepPoint<Fp>& x,
                                   const IntVec& theta, const IntVec& rho, std::uint32_t q,
                                   unsigned long long guard = 1ull << 22) {
  require(dot(theta, x.rank) == 0 && dot(rho, x.rank) == 0, Err::NotOrthogonal,
          "theta . r and rho . r must vanish");
  Verdict<Fp> king = king_semistable(Q, truncate(Q, x), theta, q, guard);
  if (king.verdict == SS::unstable) return king;
  auto cond2 = scan_condition2<Fp>(
      Q, x, theta, rho, [&](const std::string& v, int rp) -> std::vector<MatPoly<Fp>> {
        return enumerate_free_submodules(Q.m(v), static_cast<int>(x.rank.at(v)), rp, q, guard);
      });
  if (cond2.verdict == SS::unstable) return Verdict<Fp>{SS::unstable, cond2.witness};
  if (cond2.verdict == SS::strictly_semistable)
    return Verdict<Fp>{SS::strictly_semistable, cond2.witness};
  return Verdict<Fp>{SS::stable, std::nullopt};
}

/// Rational-field variant: condition 2 families are enumerable exactly when
/// each component rank is 0 or full (always true for rank vectors <= 1).
inline Verdict<Rat> semistable_mult(const QuiverWithMult& Q, const RepPoint<Rat>& x,
                                    const IntVec& theta, const IntVec& rho) {
  require(dot(theta, x.rank) == 0 && dot(rho, x.rank) == 0, Err::NotOrthogonal,
          "theta . r and rho . r must vanish");
  Verdict<Rat> king = king_semistable(Q, truncate(Q, x), theta);
  if (king.verdict == SS::unstable) return king;
  auto cond2 = scan_condition2<Rat>(
      Q, x, theta, rho, [&](const std::string& v, int rp) -> std::vector<MatPoly<Rat>> {
        int r = static_cast<int>(x.rank.at(v));
        if (rp == 0) return {MatPoly<Rat>(Q.m(v), r, 0)};
        if (rp == r) return {MatPoly<Rat>::identity(Q.m(v), r)};
        fail(Err::Unsupported, "intermediate free-submodule ranks over Q are not enumerable");
      });
  if (cond2.verdict == SS::unstable) return Verdict<Rat>{SS::unstable, cond2.witness};
  if (cond2.verdict == SS::strictly_semistable)
    return Verdict<Rat>{SS::strictly_semistable, cond2.witness};
  return Verdict<Rat>{SS::stable, std::nullopt};
}

// ---------------------------------------------------------------------------
// Direct oracle: enumerate every eps-stable graded subspace family, apply the
// definition verbatim. Independent of the truncation shortcut and of the
// canonical-form enumeration.

inline std::vector<Subspace<Fp>> submodule_subspaces(int m, int r, std::uint32_t q) {
  std::vector<Subspace<Fp>> out;
  Mat<Fp> shift = eps_shift<Fp>(m, r, 1);
  for (auto& s : enumerate_subspaces(m * r, q))
    if (s.contains_cols(Mat<Fp>(shift * s.basis))) out.push_back(std::move(s));
  return out;
}

inline Verdict<Fp> semistable_direct_oracle(const QuiverWithMult& Q, const RepPoint<Fp>& x,
                                            const IntVec& theta, const IntVec& rho, std::uint32_t q,
                                            unsigned long long guard = 1ull << 22) {
  require(dot(theta, x.rank) == 0 && dot(rho, x.rank) == 0, Err::NotOrthogonal,
          "theta . r and rho . r must vanish");
  RepPoint<Fp> sx = sigma_twist(Q, x);
  std::map<std::string, std::vector<Subspace<Fp>>> cands;
  std::map<std::string, std::vector<int>> ranks;  // rank of each candidate
  unsigned long long total = 1;
  for (const std::string& v : Q.vertices) {
    int m = Q.m(v), r = static_cast<int>(x.rank.at(v));
    cands[v] = submodule_subspaces(m, r, q);
    total *= cands[v].size();
    require(total <= guard, Err::TooLarge, "direct oracle scan exceeds guard");
    Subspace<Fp> eps_m = Subspace<Fp>::span(eps_shift<Fp>(m, r, 1));
    for (const auto& s : cands[v])
      ranks[v].push_back(static_cast<int>(s.dim() - Subspace<Fp>::intersect(s, eps_m).dim()));
  }
  std::map<std::string, Mat<Fp>> x_full, sx_full;
  for (const Arrow& a : Q.arrows) {
    x_full[a.id] = expand_full(x.x.at(a.id));
    sx_full[a.id] = expand_full(sx.x.at(a.id));
  }

  SS verdict = SS::stable;
  std::optional<StabWitness<Fp>> witness;
  std::vector<std::string> verts(Q.vertices);
  std::vector<std::size_t> idx(verts.size(), 0);
  while (true) {
    IntVec rk;
    bool all_free = true;
    for (std::size_t i = 0; i < verts.size(); ++i) {
      const std::string& v = verts[i];
      rk[v] = ranks[v][idx[i]];
      all_free = all_free &&
                 cands[v][idx[i]].dim() == static_cast<Eigen::Index>(Q.m(v)) * rk[v];
    }
    bool nonzero = false, proper = false;
    for (const std::string& v : verts) {
      if (rk.at(v) > 0) nonzero = true;
      if (rk.at(v) < x.rank.at(v)) proper = true;
    }
    if (nonzero && proper) {
      std::map<std::string, Subspace<Fp>> fam;
      for (std::size_t i = 0; i < verts.size(); ++i) fam[verts[i]] = cands[verts[i]][idx[i]];
      // condition 1: subrepresentations of sigma(M)
      auto closed_under = [&](const std::map<std::string, Mat<Fp>>& maps) {
        for (const Arrow& a : Q.arrows) {
          const Subspace<Fp>& src = fam.at(a.from);
          if (src.dim() == 0) continue;
          if (!fam.at(a.to).contains_cols(Mat<Fp>(maps.at(a.id) * src.basis))) return false;
        }
        return true;
      };
      if (closed_under(sx_full) && dot(theta, rk) < 0) {
        verdict = SS::unstable;
        witness = StabWitness<Fp>{fam, std::nullopt, rk};
        break;
      }
      // condition 2: locally free subrepresentations of M with theta-degree 0
      if (all_free && dot(theta, rk) == 0 && closed_under(x_full)) {
        long long rr = dot(rho, rk);
        if (rr < 0) {
          verdict = SS::unstable;
          witness = StabWitness<Fp>{fam, std::nullopt, rk};
          break;
        }
        if (rr == 0 && verdict == SS::stable) {
          verdict = SS::strictly_semistable;
          witness = StabWitness<Fp>{fam, std::nullopt, rk};
        }
      }
    }
    std::size_t i = 0;
    for (; i < verts.size(); ++i) {
      if (++idx[i] < cands.at(verts[i]).size()) break;
      idx[i] = 0;
    }
    if (i == verts.size()) break;
  }
  return Verdict<Fp>{verdict, witness};
}

// ---------------------------------------------------------------------------
// Hilbert-Mumford pairing and one-parameter-subgroup limits.

/// Descending filtration V^p of the Q_0-graded space, listed by strictly
/// decreasing weight with strictly increasing subspaces; the last step must be
/// the full space. l >= 0 is the grading-factor weight.
template <class K>
struct GradedFiltration {
  struct Step {
    long long weight;
    std::map<std::string, Subspace<K>> space;
  };
  std::vector<Step> steps;
  long long l = 0;

  /// V^p at a vertex: the smallest listed space whose weight is >= p, the
  /// zero space above the top weight.
  const Subspace<K>* at(const std::string& v, long long p) const {
    const Subspace<K>* best = nullptr;
    for (const Step& s : steps) {
      if (s.weight >= p) best = &s.space.at(v);
      else break;
    }
    return best;
  }
};

/// <lambda~, rho~> = sum_p rho . dim V^p + l n, the sum over the weight range
/// above the bottom step (the terms below contribute rho . r = 0).
template <class K>
long long hm_pairing(const GradedFiltration<K>& filt, const IntVec& rho, long long n) {
  long long acc = filt.l * n;
  for (std::size_t j = 0; j + 1 < filt.steps.size(); ++j) {
    IntVec dims;
    for (const auto& [v, s] : filt.steps[j].space) dims[v] = s.dim();
    acc += (filt.steps[j].weight - filt.steps[j + 1].weight) * dot(rho, dims);
  }
  return acc;
}

/// Limit-existence for the 1PS (filtration, l) against thickened coordinates:
/// l >= 0 and x_{(a,m,f1,f2)}(V^p) <= V^{p - l wt} for all steps and arrows.
template <class K>
bool limit_exists(const QuiverWithMult&, const std::map<std::string, Mat<K>>& thick_coords,
                  const std::vector<ThickArrow>& thick, const GradedFiltration<K>& filt) {
  if (filt.l < 0) return false;
  for (const ThickArrow& t : thick) {
    const Mat<K>& coord = thick_coords.at(t.id());
    for (const auto& step : filt.steps) {
      const Subspace<K>* src = step.space.count(t.from) ? &step.space.at(t.from) : nullptr;
      if (!src || src->dim() == 0) continue;
      long long target_level = step.weight - filt.l * t.weight;
      const Subspace<K>* dst = filt.at(t.to, target_level);
      if (dst == nullptr) {
        // target is the zero space: the image must vanish
        if (!is_zero_mat(Mat<K>(coord * src->basis))) return false;
      } else if (!dst->contains_cols(Mat<K>(coord * src->basis))) {
        return false;
      }
    }
  }
  return true;
}

/// n_0 from the HM lemma: any n > A(r) B w works; we return that bound + 1.
inline long long hm_n0(const QuiverWithMult& Q, const IntVec& r, const IntVec& rho,
                       const IntVec& alpha) {
  long long a = 1;
  for (const auto& [v, rv] : r) a *= rv + 1;
  long long b = 0;
  for_each_proper_subvector(r, [&](const IntVec& sub) {
    long long d = dot(rho, sub);
    if (d < 0) b = std::max(b, -d);
  });
  // also the full vector (<= r includes r itself; rho . r = 0 anyway)
  long long w = 0;
  for (const ThickArrow& t : thickened_quiver(Q, alpha)) w = std::max(w, t.weight);
  return a * b * w + 1;
}

// ---------------------------------------------------------------------------
// Naive Jordan-Hoelder filtrations, polystability, S-equivalence
// representatives. Finite fields, tiny ranks, exhaustive.

template <class K>
struct JHData {
  std::vector<IntVec> step_ranks;  // ranks of the successive stable pieces
  RepPoint<K> graded;              // direct sum of the stable subquotients
};

namespace detail {

/// All proper nonzero degree-0 locally free subrep families of x.
inline std::vector<FreeSubmoduleFamily<Fp>> degree0_subreps(const QuiverWithMult& Q,
                                                            const RepPoint<Fp>& x,
                                                            const IntVec& theta, const IntVec& rho,
                                                            std::uint32_t q,
                                                            unsigned long long guard) {
  std::vector<FreeSubmoduleFamily<Fp>> out;
  for_each_proper_subvector(x.rank, [&](const IntVec& sub) {
    if (dot(theta, sub) != 0 || dot(rho, sub) != 0) return;
    std::map<std::string, std::vector<MatPoly<Fp>>> per_vertex;
    for (const std::string& v : Q.vertices)
      per_vertex[v] = enumerate_free_submodules(Q.m(v), static_cast<int>(x.rank.at(v)),
                                                static_cast<int>(sub.at(v)), q, guard);
    std::vector<std::string> verts(Q.vertices);
    std::vector<std::size_t> idx(verts.size(), 0);
    while (true) {
      std::map<std::string, MatPoly<Fp>> gens;
      for (std::size_t i = 0; i < verts.size(); ++i) gens[verts[i]] = per_vertex[verts[i]][idx[i]];
      auto fam = make_family(Q, gens);
      if (is_subrep(Q, x, fam)) out.push_back(fam);
      std::size_t i = 0;
      for (; i < verts.size(); ++i) {
        if (++idx[i] < per_vertex[verts[i]].size()) break;
        idx[i] = 0;
      }
      if (i == verts.size()) break;
    }
  });
  return out;
}

inline void jh_recurse(const QuiverWithMult& Q, const RepPoint<Fp>& x, const IntVec& theta,
                       const IntVec& rho, std::uint32_t q, unsigned long long guard,
                       std::vector<RepPoint<Fp>>& pieces, std::vector<IntVec>& piece_ranks,
                       std::vector<JHData<Fp>>& results, bool all_filtrations,
                       std::size_t result_guard) {
  if (results.size() >= result_guard && all_filtrations) return;
  bool zero_rank = true;
  for (const auto& [v, rv] : x.rank) zero_rank = zero_rank && rv == 0;
  if (zero_rank) {
    JHData<Fp> data;
    data.step_ranks = piece_ranks;
    RepPoint<Fp> acc = pieces.front();
    for (std::size_t i = 1; i < pieces.size(); ++i) acc = rep_direct_sum(Q, acc, pieces[i]);
    data.graded = acc;
    results.push_back(std::move(data));
    return;
  }
  auto subs = degree0_subreps(Q, x, theta, rho, q, guard);
  // keep only those whose restriction is stable (naive JH steps)
  bool found = false;
  for (const auto& fam : subs) {
    RepPoint<Fp> piece = restrict_rep(Q, x, fam);
    if (semistable_mult(Q, piece, theta, rho, q, guard).verdict != SS::stable) continue;
    found = true;
    RepPoint<Fp> quo = quotient_rep(Q, x, fam);
    pieces.push_back(piece);
    piece_ranks.push_back(fam.rank);
    jh_recurse(Q, quo, theta, rho, q, guard, pieces, piece_ranks, results, all_filtrations,
               result_guard);
    pieces.pop_back();
    piece_ranks.pop_back();
    if (!all_filtrations && !results.empty()) return;
  }
  if (!found) {
    // x itself must be stable; the filtration ends here
    pieces.push_back(x);
    piece_ranks.push_back(x.rank);
    bool zero = true;
    (void)zero;
    JHData<Fp> data;
    data.step_ranks = piece_ranks;
    RepPoint<Fp> acc = pieces.front();
    for (std::size_t i = 1; i < pieces.size(); ++i) acc = rep_direct_sum(Q, acc, pieces[i]);
    data.graded = acc;
    results.push_back(std::move(data));
    pieces.pop_back();
    piece_ranks.pop_back();
  }
}

}  // namespace detail

/// Naive Jordan-Hoelder filtrations of a semistable point: stable degree-0
/// subrepresentation, recurse on the quotient. all_filtrations enumerates
/// every choice at every stage.
inline std::vector<JHData<Fp>> jh_filtrations(const QuiverWithMult& Q, const RepPoint<Fp>& x,
                                              const IntVec& theta, const IntVec& rho,
                                              std::uint32_t q, bool all_filtrations,
                                              unsigned long long guard = 1ull << 22,
                                              std::size_t result_guard = 4096) {
  require(semistable_mult(Q, x, theta, rho, q, guard).verdict != SS::unstable, Err::NotSemistable,
          "Jordan-Hoelder filtrations exist only for semistable points");
  std::vector<RepPoint<Fp>> pieces;
  std::vector<IntVec> piece_ranks;
  std::vector<JHData<Fp>> results;
  detail::jh_recurse(Q, x, theta, rho, q, guard, pieces, piece_ranks, results, all_filtrations,
                     result_guard);
  return results;
}

/// Orbit membership by exhaustive group enumeration.
inline bool in_orbit(const QuiverWithMult& Q, const RepPoint<Fp>& x, const RepPoint<Fp>& y,
                     std::uint32_t q, unsigned long long group_guard = 1ull << 20) {
  if (x.rank != y.rank) return false;
  unsigned long long order = 1;
  for (const std::string& v : Q.vertices) {
    int m = Q.m(v), r = static_cast<int>(x.rank.at(v));
    unsigned long long glr = 1, qp = 1;
    for (int i = 0; i < r; ++i) {
      unsigned long long qr = 1;
      for (int j = 0; j < r; ++j) qr *= q;
      unsigned long long qi = 1;
      for (int j = 0; j < i; ++j) qi *= q;
      glr *= qr - qi;
    }
    for (int i = 0; i < (m - 1) * r * r; ++i) qp *= q;
    order *= glr * qp;
    require(order <= group_guard, Err::TooLarge, "group enumeration exceeds guard");
  }
  bool found = false;
  enumerate_group_points(Q, x.rank, q, [&](const GroupElem<Fp>& g) {
    if (found) return;
    if (act(Q, g, x) == y) found = true;
  });
  return found;
}

/// Polystable: every naive JH filtration splits. Naively polystable: some
/// direct sum of stables is isomorphic to x (equivalently some filtration
/// splits). The two predicates are distinct on purpose.
struct PolyReport {
  bool polystable = false;
  bool naively_polystable = false;
  std::size_t filtration_count = 0;
};

inline PolyReport polystable(const QuiverWithMult& Q, const RepPoint<Fp>& x, const IntVec& theta,
                             const IntVec& rho, std::uint32_t q,
                             unsigned long long guard = 1ull << 22,
                             unsigned long long group_guard = 1ull << 20) {
  auto filts = jh_filtrations(Q, x, theta, rho, q, /*all_filtrations=*/true, guard);
  PolyReport rep;
  rep.filtration_count = filts.size();
  bool all = true, any = false;
  for (const auto& f : filts) {
    bool split = in_orbit(Q, x, f.graded, q, group_guard);
    all = all && split;
    any = any || split;
  }
  rep.polystable = all;
  rep.naively_polystable = any;
  return rep;
}

// ---------------------------------------------------------------------------
// Framed stability.

/// Assemble the framed-quiver point from x and k_{m_i}-framing matrices
/// b_v (r_v x f_v). Supported framing multiplicities: 1 (the default framed
/// quiver) or the vertex multiplicity itself (the Grassmannian configuration).
template <class K>
RepPoint<K> framed_point(const QuiverWithMult& Q, const FramedSetup& setup, const RepPoint<K>& x,
                         const std::map<std::string, MatPoly<K>>& b) {
  RepPoint<K> out;
  out.rank = setup.rank_hat;
  for (const Arrow& a : Q.arrows) out.x[a.id] = x.x.at(a.id);
  int m_inf = setup.quiver.m(setup.infinity);
  std::map<std::string, int> next_col;
  for (const std::string& id : setup.framing_arrow_ids) {
    const Arrow& a = setup.quiver.arrow(id);
    int m_v = setup.quiver.m(a.to);
    int r_v = static_cast<int>(setup.rank_hat.at(a.to));
    int col = next_col[a.to]++;
    const MatPoly<K>& bv = b.at(a.to);
    require(bv.m == m_v && bv.rows() == r_v, Err::ShapeMismatch, "framing matrix shape");
    MatPoly<K> column(m_v, r_v, 1);
    for (int l = 0; l < m_v; ++l) column.c[l].col(0) = bv.c[l].col(col);
    Mat<K> full;
    if (m_inf == 1) {
      full = mult_operator(column).col(0);  // image of 1 in the expanded basis
      full.resize(m_v * r_v, 1);
    } else {
      require(m_inf == m_v, Err::Unsupported,
              "framing multiplicity must be 1 or match the framed vertex");
      full = mult_operator(column);
    }
    out.x[id] = compress_full(m_inf, m_v, 1, r_v, full);
  }
  return out;
}

inline Verdict<Fp> framed_semistable(const FramedSetup& setup, const RepPoint<Fp>& framed,
                                     std::uint32_t q, unsigned long long guard = 1ull << 22) {
  IntVec rho0 = const_vec(setup.quiver, 0);
  return semistable_mult(setup.quiver, framed, setup.theta_hat, rho0, q, guard);
}

inline Verdict<Rat> framed_semistable(const FramedSetup& setup, const RepPoint<Rat>& framed) {
  IntVec rho0 = const_vec(setup.quiver, 0);
  return semistable_mult(setup.quiver, framed, setup.theta_hat, rho0);
}

}  // namespace qmult
