#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qmult/grading.hpp"

using namespace qmult;

namespace {

QuiverWithMult kronecker(int m1, int m2) {
  QuiverWithMult q;
  q.vertices = {"1", "2"};
  q.arrows = {{"a1", "1", "2"}, {"a2", "1", "2"}};
  q.mult = {{"1", m1}, {"2", m2}};
  return q;
}

QuiverWithMult two_vertex(int m1, int m2) {
  QuiverWithMult q;
  q.vertices = {"1", "2"};
  q.arrows = {{"a", "1", "2"}};
  q.mult = {{"1", m1}, {"2", m2}};
  return q;
}

const IntVec ONE = {{"1", 1}, {"2", 1}};

}  // namespace

TEST_CASE("canonical parameters") {
  auto q = two_vertex(2, 3);
  auto p = canonical_params(q);
  CHECK(p.alpha.at("1") == 3);
  CHECK(p.alpha.at("2") == 2);
  CHECK(p.beta.at("a") == 3);  // alpha_1 (f_21 - 1)
  CHECK(p.scale == 6);
  CHECK(beta_is_default(q, p));

  auto qc = two_vertex(4, 4);
  auto pc = canonical_params(qc);
  CHECK(pc.alpha.at("1") == 1);
  CHECK(pc.beta.at("a") == 0);

  QuiverWithMult single;
  single.vertices = {"v"};
  single.mult = {{"v", 5}};
  CHECK(canonical_params(single).alpha.at("v") == 1);
}

TEST_CASE("action at t = 1 is the identity and composes multiplicatively") {
  auto q = kronecker(2, 3);
  auto p = canonical_params(q);
  std::mt19937_64 rng(3);
  RandomScalar<Rat> rs;
  for (int it = 0; it < 20; ++it) {
    auto x = random_rep<Rat>(q, ONE, rs, rng);
    CHECK(act_gm(q, Rat(1), x, p) == x);
    Rat t(2), s(1, 3);
    CHECK(act_gm(q, t, act_gm(q, s, x, p), p) == act_gm(q, t * s, x, p));
  }
}

TEST_CASE("group action is by automorphisms compatible with the rep action") {
  auto q = kronecker(2, 3);
  auto p = canonical_params(q);
  std::mt19937_64 rng(5);
  RandomScalar<Rat> rs;
  for (int it = 0; it < 20; ++it) {
    auto g = random_group_elem<Rat>(q, ONE, rs, rng);
    auto h = random_group_elem<Rat>(q, ONE, rs, rng);
    Rat t(1 + static_cast<long>(rng() % 3), 1 + static_cast<long>(rng() % 2));
    CHECK(act_gm_group(q, t, group_mul(g, h), p) ==
          group_mul(act_gm_group(q, t, g, p), act_gm_group(q, t, h, p)));
    auto x = random_rep<Rat>(q, ONE, rs, rng);
    CHECK(act_gm(q, t, act(q, g, x), p) == act(q, act_gm_group(q, t, g, p), act_gm(q, t, x, p)));
  }
}

TEST_CASE("the torus action matches explicit Phi conjugation") {
  auto q = two_vertex(4, 6);
  auto p = canonical_params(q);
  std::mt19937_64 rng(7);
  RandomScalar<Rat> rs;
  IntVec r = {{"1", 2}, {"2", 1}};
  auto phi = [&](const std::string& v, const Rat& t, long long e) {
    // diag(t^{e(m-1)}, ..., t^e, 1) blocks of size r
    int m = q.m(v);
    int rv = static_cast<int>(r.at(v));
    Mat<Rat> d = zeros<Rat>(m * rv, m * rv);
    for (int pr = 0; pr < m; ++pr)
      for (int l = 0; l < rv; ++l) d(pr * rv + l, pr * rv + l) = k_pow(t, e * (m - 1 - pr));
    return d;
  };
  for (int it = 0; it < 15; ++it) {
    auto x = random_rep<Rat>(q, r, rs, rng);
    Rat t(1 + static_cast<long>(rng() % 4), 1 + static_cast<long>(rng() % 3));
    auto moved = act_gm(q, t, x, p);
    for (const Arrow& a : q.arrows) {
      Mat<Rat> expect = k_pow(t, p.beta.at(a.id)) * phi(a.to, t, p.alpha.at(a.to)) *
                        expand_full(x.x.at(a.id)) *
                        (inverse_of(phi(a.from, t, p.alpha.at(a.from))).value());
      CHECK(mat_eq(expand_full(moved.x.at(a.id)), expect));
    }
  }
}

TEST_CASE("invalid alpha is rejected exactly when a constrained arrow exists") {
  auto q = two_vertex(4, 6);  // m_12 = 2 > 1
  GradingParams bad;
  bad.alpha = {{"1", 1}, {"2", 1}};
  bad.beta = {{"a", 0}};
  CHECK_THROWS_AS(check_params(q, bad), DomainError);
  CHECK(constraint_weight_defect(q, bad.alpha, q.arrows[0]) == (4 - 6) / 2);

  auto qcop = two_vertex(2, 3);  // m_12 = 1: any positive alpha is fine
  GradingParams free_alpha;
  free_alpha.alpha = {{"1", 1}, {"2", 1}};
  free_alpha.beta = {{"a", 5}};
  check_params(qcop, free_alpha);
  // and the action still preserves the (trivial) constraint subspace
  std::mt19937_64 rng(9);
  RandomScalar<Rat> rs;
  auto x = random_rep<Rat>(qcop, ONE, rs, rng);
  act_gm(qcop, Rat(2), x, free_alpha);
}

TEST_CASE("weight table: nonnegative iff beta >= default, zero set = iota image") {
  auto q = two_vertex(2, 3);
  auto p = canonical_params(q);
  auto table = weight_table(q, p);
  CHECK(table.size() == 6);
  int zeros_n = 0;
  for (const auto& [id, w] : table) {
    CHECK(w >= 0);
    if (w == 0) ++zeros_n;
  }
  CHECK(zeros_n == 1);
  CHECK(beta_is_graded(q, p));
  // raising beta shifts every weight
  GradingParams up = p;
  up.beta["a"] += 2;
  auto table_up = weight_table(q, up);
  for (const auto& [id, w] : table) CHECK(table_up.at(id) == w + 2);
  // lowering beta below default breaks nonnegativity
  GradingParams down = p;
  down.beta["a"] -= 1;
  CHECK(!beta_is_graded(q, down));
  bool has_negative = false;
  for (const auto& [id, w] : weight_table(q, down)) has_negative = has_negative || w < 0;
  CHECK(has_negative);
}

TEST_CASE("stored-coordinate weights match the thickened table") {
  auto q = two_vertex(4, 6);
  auto p = canonical_params(q);
  IntVec r = {{"1", 2}, {"2", 1}};
  auto thick = thickened_quiver(q, p.alpha);
  auto x = zero_rep<Rat>(q, r);
  for (const ThickArrow& t : thick) {
    const HomElem<Rat>& h = x.x.at(t.base);
    Eigen::Index row = (h.fij - t.f2 - 1) * h.rj;
    Eigen::Index col = (h.fji - t.f1 - 1) * h.ri;
    CHECK(coord_weight(p, q.arrows[0], h, t.m, row, col) == t.weight);
  }
}

TEST_CASE("limit at zero is the truncation; fixed points are the iota image") {
  auto q = kronecker(2, 3);
  auto p = canonical_params(q);
  std::mt19937_64 rng(11);
  RandomScalar<Rat> rs;
  for (int it = 0; it < 25; ++it) {
    auto x = random_rep<Rat>(q, ONE, rs, rng);
    CHECK(limit_zero(q, x, p) == truncate(q, x));
    // iota lands in weight zero: acting by any t fixes it
    auto v = truncate(q, x);
    auto fixed = section_iota(q, v);
    CHECK(act_gm(q, Rat(5), fixed, p) == fixed);
    CHECK(limit_zero(q, fixed, p) == v);
    // group limit: the constant coefficient
    auto g = random_group_elem<Rat>(q, ONE, rs, rng);
    auto lim = limit_zero_group(g);
    for (const auto& vert : q.vertices) CHECK(mat_eq(lim.at(vert), g.g.at(vert).c[0]));
  }
  // a point is fixed iff it lies in the iota image (weight-0 support)
  auto x = random_rep<Rat>(q, ONE, rs, rng);
  bool fixed = act_gm(q, Rat(7), x, p) == x;
  bool in_iota = section_iota(q, truncate(q, x)) == x;
  CHECK(fixed == in_iota);
  // non-default beta refuses the classical limit
  GradingParams up = p;
  up.beta["a1"] += 1;
  CHECK_THROWS_AS(limit_zero(q, x, up), DomainError);
}

TEST_CASE("an invalid alpha really moves points off the constraint subspace") {
  // m = (4, 6), alpha = (1, 1): the raw Phi conjugation leaves the
  // block-Toeplitz subspace, and the weight defect names the offending pair
  auto q = two_vertex(4, 6);
  IntVec alpha = {{"1", 1}, {"2", 1}};
  CHECK(constraint_weight_defect(q, alpha, q.arrows[0]) != 0);
  std::mt19937_64 rng(13);
  RandomScalar<Rat> rs;
  bool violated = false;
  for (int it = 0; it < 10 && !violated; ++it) {
    auto x = random_rep<Rat>(q, ONE, rs, rng);
    // scale coordinates by the raw per-entry weight with beta = 0; a valid
    // alpha keeps Toeplitz cells synchronised, this alpha cannot
    const HomElem<Rat>& h = x.x.at("a");
    Mat<Rat> full = expand_full(h);
    Rat t(2);
    for (Eigen::Index row = 0; row < full.rows(); ++row)
      for (Eigen::Index col = 0; col < full.cols(); ++col) {
        long long pt = 5 - row;  // m_j r_j = 6: power ranks downward
        long long ps = 3 - col;
        full(row, col) = full(row, col) * k_pow(t, alpha.at("2") * pt - alpha.at("1") * ps);
      }
    try {
      compress_full(4, 6, 1, 1, full);
    } catch (const DomainError& e) {
      violated = e.code() == Err::NotModuleLinear;
    }
  }
  CHECK(violated);
}
