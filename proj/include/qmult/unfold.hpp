#pragma once

#include "qmult/grading.hpp"

// Appendix machinery: embedding R(Q,m;r) into the constant-multiplicity
// representation space of the unfolded quiver, with Galois twists by a
// primitive root of unity, plus the coordinate/weight correspondence.

namespace qmult {

template <class K>
struct RootOfUnity {
  K zeta;
  long long order = 1;
};

inline RootOfUnity<Fp> primitive_root(long long order, const FieldCtx<Fp>& F) {
  require(order >= 1, Err::InvalidParams, "order must be positive");
  require((F.p - 1) % order == 0, Err::NoRoot,
          "F_p has a primitive root of order M only when M | p - 1");
  for (std::uint32_t c = 1; c < F.p; ++c) {
    Fp z = F.element(c);
    Fp acc = F.from_int(1);
    bool primitive = true;
    for (long long e = 1; e < order; ++e) {
      acc = acc * z;
      if (acc == F.from_int(1)) {
        primitive = false;
        break;
      }
    }
    if (primitive && (acc * z) == F.from_int(1)) return {z, order};
  }
  fail(Err::NoRoot, "no primitive root found");
}

inline RootOfUnity<Rat> primitive_root(long long order, const FieldCtx<Rat>&) {
  if (order == 1) return {Rat(1), 1};
  if (order == 2) return {Rat(-1), 2};
  fail(Err::NoRoot, "only orders 1 and 2 exist over the rationals");
}

/// The folded coordinate (arrow a, eps-power g at the target, component f of
/// the source decomposition) lands at eps_M-exponent g M/m_j + f M/m_i on
/// every unfolded copy of a. That exponent also equals the coordinate's
/// canonical grading weight.
struct UnfoldSlot {
  std::string arrow;
  int g, f;            // target power, source component
  long long exponent;  // = weight
};

inline std::vector<UnfoldSlot> unfold_coordinate_exponents(const QuiverWithMult& Q) {
  DerivedConstants d = derived_constants(Q);
  std::vector<UnfoldSlot> out;
  for (const Arrow& a : Q.arrows) {
    PairConsts pc = arrow_consts(Q, a);
    long long ai = d.big_m / Q.m(a.from), aj = d.big_m / Q.m(a.to);
    for (int g = 0; g < Q.m(a.to); ++g)
      for (int f = 0; f < pc.f_ji; ++f)
        out.push_back(UnfoldSlot{a.id, g, f, aj * g + ai * f});
  }
  return out;
}

/// Every arrow must join comparable multiplicities (one divides the other);
/// otherwise some folded coordinate would land at exponent >= M and die in
/// k_M, and the embedding could not be injective.
inline void check_unfoldable(const QuiverWithMult& Q) {
  for (const Arrow& a : Q.arrows) {
    int mi = Q.m(a.from), mj = Q.m(a.to);
    require(mi % mj == 0 || mj % mi == 0, Err::Unsupported,
            "unfold embedding needs comparable multiplicities along every arrow (arrow " + a.id +
                ")");
  }
}

/// iota: R(Q,m;r) -> R(Q', M 1; r'). The (a, n) entry carries, per matrix
/// entry and slot, the coefficient lambda_g at eps_M-exponent e with the
/// Galois twist zeta^{n e}.
template <class K>
RepPoint<K> unfold_embed(const QuiverWithMult& Q, const UnfoldedQuiver& unf, const RepPoint<K>& x,
                         const RootOfUnity<K>& root) {
  DerivedConstants d = derived_constants(Q);
  require(root.order == d.big_m, Err::WrongOrder, "root order must be lcm of multiplicities");
  check_unfoldable(Q);
  IntVec rank_unf;
  for (const std::string& v : unf.quiver.vertices) rank_unf[v] = 0;
  for (const std::string& v : Q.vertices)
    for (int n = 0; n < Q.m(v); ++n) rank_unf[unfolded_vertex(v, n)] = x.rank.at(v);
  RepPoint<K> out = zero_rep<K>(unf.quiver, rank_unf);

  // powers of zeta
  std::vector<K> zp(static_cast<std::size_t>(d.big_m));
  zp[0] = k_one<K>();
  for (int e = 1; e < d.big_m; ++e) zp[e] = zp[e - 1] * root.zeta;

  for (const UnfoldedArrow& ua : unf.correspondence) {
    const Arrow& a = Q.arrow(ua.base);
    PairConsts pc = arrow_consts(Q, a);
    const HomElem<K>& h = x.x.at(a.id);
    HomElem<K>& target = out.x.at(a.id + "@" + std::to_string(ua.n));
    long long ai = d.big_m / Q.m(a.from), aj = d.big_m / Q.m(a.to);
    for (int g = 0; g < Q.m(a.to); ++g)
      for (int f = 0; f < pc.f_ji; ++f) {
        long long e = aj * g + ai * f;
        require(e < d.big_m, Err::Unsupported, "coordinate exponent overflows k_M");
        // lambda_g of component f = the (target power g, source power
        // f_ji - 1 - f) cell of the stored blocks
        int l = g / pc.f_ij, f2 = g % pc.f_ij, f1 = pc.f_ji - 1 - f;
        Mat<K> cell = thick_coord(h, l, f1, f2);
        target.blocks[e] += cell * zp[static_cast<std::size_t>((ua.n * e) % d.big_m)];
      }
  }
  return out;
}

/// Group embedding (g_i) |-> (zeta^{n_i} twists of g_i viewed in k_M).
template <class K>
GroupElem<K> unfold_group_embed(const QuiverWithMult& Q, const UnfoldedQuiver&,
                                const GroupElem<K>& g, const RootOfUnity<K>& root) {
  DerivedConstants d = derived_constants(Q);
  require(root.order == d.big_m, Err::WrongOrder, "root order must be lcm of multiplicities");
  std::vector<K> zp(static_cast<std::size_t>(d.big_m));
  zp[0] = k_one<K>();
  for (int e = 1; e < d.big_m; ++e) zp[e] = zp[e - 1] * root.zeta;
  GroupElem<K> out;
  for (const std::string& v : Q.vertices) {
    const MatPoly<K>& gv = g.g.at(v);
    long long ai = d.big_m / Q.m(v);
    for (int n = 0; n < Q.m(v); ++n) {
      MatPoly<K> m(d.big_m, gv.rows(), gv.cols());
      for (int c = 0; c < Q.m(v); ++c) {
        long long e = ai * c;
        m.c[e] = gv.c[c] * zp[static_cast<std::size_t>((n * e) % d.big_m)];
      }
      out.g[unfolded_vertex(v, n)] = m;
    }
  }
  return out;
}

/// The assembled k-linear map has zero kernel (checked by explicit linear
/// algebra; the embedding is coordinatewise injective by construction, this
/// is the belt-and-braces version used by tests).
template <class K>
bool unfold_is_injective(const QuiverWithMult& Q, const UnfoldedQuiver& unf, const IntVec& r,
                         const RootOfUnity<K>& root) {
  // probe each folded basis coordinate and collect images
  RepPoint<K> zero = zero_rep<K>(Q, r);
  std::vector<Vec<K>> images;
  long long out_dim = 0;
  auto flatten = [&](const RepPoint<K>& p) {
    std::vector<K> entries;
    for (const auto& [id, h] : p.x)
      for (const auto& b : h.blocks)
        for (Eigen::Index j = 0; j < b.cols(); ++j)
          for (Eigen::Index i = 0; i < b.rows(); ++i) entries.push_back(b(i, j));
    Vec<K> v = zeros<K>(static_cast<Eigen::Index>(entries.size()), 1);
    for (std::size_t k = 0; k < entries.size(); ++k) v(static_cast<Eigen::Index>(k)) = entries[k];
    return v;
  };
  for (auto& [id, h] : zero.x) {
    for (auto& b : h.blocks)
      for (Eigen::Index j = 0; j < b.cols(); ++j)
        for (Eigen::Index i = 0; i < b.rows(); ++i) {
          RepPoint<K> probe = zero;
          probe.x.at(id).blocks[&b - h.blocks.data()](i, j) = k_one<K>();
          Vec<K> img = flatten(unfold_embed(Q, unf, probe, root));
          out_dim = img.size();
          images.push_back(img);
        }
  }
  Mat<K> assembled = zeros<K>(out_dim, static_cast<Eigen::Index>(images.size()));
  for (std::size_t k = 0; k < images.size(); ++k)
    assembled.col(static_cast<Eigen::Index>(k)) = images[k];
  return rank_of(assembled) == static_cast<int>(images.size());
}

}  // namespace qmult
