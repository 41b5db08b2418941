#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "qmult/quiver.hpp"

using namespace qmult;

namespace {

QuiverWithMult kronecker(int m1, int m2) {
  QuiverWithMult q;
  q.vertices = {"1", "2"};
  q.arrows = {{"a1", "1", "2"}, {"a2", "1", "2"}};
  q.mult = {{"1", m1}, {"2", m2}};
  q.validate();
  return q;
}

QuiverWithMult two_vertex(int m1, int m2) {
  QuiverWithMult q;
  q.vertices = {"1", "2"};
  q.arrows = {{"a", "1", "2"}};
  q.mult = {{"1", m1}, {"2", m2}};
  q.validate();
  return q;
}

}  // namespace

TEST_CASE("derived constants") {
  auto d = derived_constants(two_vertex(4, 6));
  auto pc = d.pairs.at({"1", "2"});
  CHECK(pc.m_ij == 2);
  CHECK(pc.mu_ij == 12);
  CHECK(pc.f_ji == 2);  // m_1 / m_12
  CHECK(pc.f_ij == 3);  // m_2 / m_12
  CHECK(d.delta == 2);
  CHECK(d.big_m == 12);

  auto d2 = derived_constants(two_vertex(2, 3));
  auto pc2 = d2.pairs.at({"1", "2"});
  CHECK(pc2.m_ij == 1);
  CHECK(pc2.mu_ij == 6);
  CHECK(pc2.f_ji == 2);
  CHECK(pc2.f_ij == 3);
  CHECK(d2.delta == 1);
  CHECK(d2.big_m == 6);

  auto d3 = derived_constants(two_vertex(5, 5));
  auto pc3 = d3.pairs.at({"1", "2"});
  CHECK(pc3.m_ij == 5);
  CHECK(pc3.mu_ij == 5);
  CHECK(pc3.f_ij == 1);
  CHECK(pc3.f_ji == 1);
  CHECK(d3.delta == 5);
  CHECK(d3.big_m == 5);
}

TEST_CASE("derived constants invariants on random multiplicities") {
  std::mt19937_64 rng(3);
  for (int it = 0; it < 200; ++it) {
    int m1 = 1 + static_cast<int>(rng() % 12), m2 = 1 + static_cast<int>(rng() % 12);
    PairConsts pc = pair_consts(m1, m2);
    CHECK(pc.m_ij * pc.f_ij * pc.f_ji == pc.mu_ij);
    CHECK(std::gcd(pc.f_ij, pc.f_ji) == 1);
  }
}

TEST_CASE("euler form") {
  auto q = kronecker(2, 3);
  IntVec one = {{"1", 1}, {"2", 1}};
  CHECK(euler_form(q, one, one) == -7);
  // delta - <r,r> = 1 + 7 = 8 = 3m - 1 at m = 3, the known chart dimension
  CHECK(derived_constants(q).delta - euler_form(q, one, one) == 8);

  QuiverWithMult no_arrows;
  no_arrows.vertices = {"1", "2"};
  no_arrows.mult = {{"1", 2}, {"2", 3}};
  CHECK(euler_form(no_arrows, one, one) == 5);

  auto cls = kronecker(1, 1);
  CHECK(euler_form(cls, one, one) == 1 + 1 - 2);  // classical Euler form
}

TEST_CASE("euler form is bilinear") {
  std::mt19937_64 rng(5);
  auto q = kronecker(2, 3);
  for (int it = 0; it < 100; ++it) {
    auto rnd = [&]() {
      IntVec v;
      v["1"] = static_cast<long long>(rng() % 7) - 3;
      v["2"] = static_cast<long long>(rng() % 7) - 3;
      return v;
    };
    IntVec a = rnd(), b = rnd(), c = rnd();
    IntVec bc;
    for (const auto& [k, x] : b) bc[k] = x + c.at(k);
    CHECK(euler_form(q, a, bc) == euler_form(q, a, b) + euler_form(q, a, c));
    CHECK(euler_form(q, bc, a) == euler_form(q, b, a) + euler_form(q, c, a));
  }
}

TEST_CASE("rep space dimension agrees with the Euler form") {
  std::mt19937_64 rng(9);
  for (int it = 0; it < 50; ++it) {
    auto q = kronecker(1 + rng() % 4, 1 + rng() % 4);
    IntVec r = {{"1", static_cast<long long>(rng() % 4)}, {"2", static_cast<long long>(rng() % 4)}};
    long long msq = 0;
    for (const auto& v : q.vertices) msq += q.m(v) * r.at(v) * r.at(v);
    CHECK(rep_space_dim(q, r) == -euler_form(q, r, r) + msq);
  }
}

TEST_CASE("genericity scan") {
  IntVec r = {{"1", 1}, {"2", 1}};
  CHECK(is_generic({{{"1", -1}, {"2", 1}}, {{"1", 0}, {"2", 0}}}, r) == Genericity::theta_generic);
  CHECK(is_generic({{{"1", 0}, {"2", 0}}, {{"1", 0}, {"2", 0}}}, r) == Genericity::neither);
  CHECK(is_generic({{{"1", 0}, {"2", 0}}, {{"1", -1}, {"2", 1}}}, r) == Genericity::pair_generic);
  CHECK_THROWS_AS(is_generic({{{"1", 1}, {"2", 1}}, {}}, r), DomainError);
}

TEST_CASE("framed quiver construction") {
  QuiverWithMult q;
  q.vertices = {"v"};
  q.mult = {{"v", 3}};
  IntVec f = {{"v", 2}}, r = {{"v", 1}}, theta0 = {{"v", 0}};
  auto setup = build_framed(q, f, r, theta0);
  CHECK(setup.quiver.vertices.size() == 2);
  CHECK(setup.quiver.arrows.size() == 2);
  CHECK(setup.quiver.m(setup.infinity) == 1);
  CHECK(setup.rank_hat.at(setup.infinity) == 1);
  CHECK(setup.ell == 2);
  CHECK(setup.theta_hat.at("v") == 1);
  CHECK(setup.theta_hat.at(setup.infinity) == -1);
  CHECK(is_generic({setup.theta_hat, {}}, setup.rank_hat) == Genericity::theta_generic);

  auto grass = build_framed(q, f, r, theta0, 3);
  CHECK(grass.quiver.m(grass.infinity) == 3);

  auto lone = build_framed(q, {{"v", 0}}, r, theta0);
  CHECK(lone.quiver.arrows.empty());
  CHECK(lone.quiver.vertices.size() == 2);
}

TEST_CASE("theta_hat is generic for random small data") {
  std::mt19937_64 rng(21);
  QuiverWithMult q;
  q.vertices = {"1", "2"};
  q.arrows = {{"a", "1", "2"}};
  q.mult = {{"1", 2}, {"2", 3}};
  for (int it = 0; it < 60; ++it) {
    IntVec r = {{"1", 1 + static_cast<long long>(rng() % 3)},
                {"2", 1 + static_cast<long long>(rng() % 3)}};
    long long t1 = static_cast<long long>(rng() % 5) - 2;
    IntVec theta = {{"1", 0}, {"2", 0}};
    if (t1 * r.at("1") % r.at("2") == 0) theta = {{"1", t1}, {"2", -t1 * r.at("1") / r.at("2")}};
    IntVec f = {{"1", static_cast<long long>(rng() % 3)}, {"2", static_cast<long long>(rng() % 3)}};
    auto setup = build_framed(q, f, r, theta);
    CHECK(is_generic({setup.theta_hat, {}}, setup.rank_hat) == Genericity::theta_generic);
  }
}

TEST_CASE("thickened quiver arrows and weights") {
  auto q = two_vertex(2, 3);
  IntVec alpha = {{"1", 3}, {"2", 2}};
  auto thick = thickened_quiver(q, alpha);
  CHECK(thick.size() == 6);  // mu_12 arrows
  std::vector<long long> weights;
  for (const auto& t : thick) weights.push_back(t.weight);
  std::sort(weights.begin(), weights.end());
  CHECK(weights == std::vector<long long>{0, 2, 3, 4, 5, 7});
  int zero_at = 0;
  for (const auto& t : thick)
    if (t.weight == 0) {
      ++zero_at;
      CHECK(t.m == 0);
      CHECK(t.f1 == 1);  // f_ji - 1
      CHECK(t.f2 == 0);
    }
  CHECK(zero_at == 1);

  // constant multiplicities: weight of (a, n) is alpha * n
  auto qc = two_vertex(3, 3);
  auto thick_c = thickened_quiver(qc, IntVec{{"1", 1}, {"2", 1}});
  CHECK(thick_c.size() == 3);
  for (const auto& t : thick_c) CHECK(t.weight == t.m);
}

TEST_CASE("thickened weights are nonnegative with one zero per arrow") {
  std::mt19937_64 rng(33);
  for (int it = 0; it < 50; ++it) {
    int m1 = 1 + static_cast<int>(rng() % 6), m2 = 1 + static_cast<int>(rng() % 6);
    auto q = kronecker(m1, m2);
    long long l = std::lcm(m1, m2);
    IntVec alpha = {{"1", l / m1}, {"2", l / m2}};
    auto thick = thickened_quiver(q, alpha);
    CHECK(static_cast<long long>(thick.size()) == 2 * std::lcm(m1, m2));
    std::map<std::string, int> zeros;
    for (const auto& t : thick) {
      CHECK(t.weight >= 0);
      if (t.weight == 0) zeros[t.base]++;
    }
    for (const auto& [id, n] : zeros) CHECK(n == 1);
    CHECK(zeros.size() == 2);
  }
}

TEST_CASE("unfolded quiver") {
  auto q = two_vertex(2, 1);
  auto unf = unfolded_quiver(q);
  CHECK(unf.quiver.vertices.size() == 3);
  CHECK(unf.quiver.arrows.size() == 2);  // mu_12 = 2 arrows into the single target copy
  for (const auto& a : unf.quiver.arrows) CHECK(a.to == unfolded_vertex("2", 0));
  for (const auto& v : unf.quiver.vertices) CHECK(unf.quiver.m(v) == 2);

  auto trivial = unfolded_quiver(kronecker(1, 1));
  CHECK(trivial.quiver.vertices.size() == 2);
  CHECK(trivial.quiver.arrows.size() == 2);

  auto mixed = unfolded_quiver(two_vertex(2, 3));
  CHECK(mixed.quiver.arrows.size() == 6);  // mu_ij arrows per original arrow
  CHECK(mixed.quiver.vertices.size() == 5);
}

TEST_CASE("doubled quiver") {
  auto q = kronecker(2, 3);
  auto d = double_quiver(q);
  CHECK(d.arrows.size() == 4);
  int fwd = 0, bwd = 0;
  for (const auto& a : d.arrows) {
    if (is_reverse_arrow(a.id)) {
      ++bwd;
      CHECK(a.from == "2");
      CHECK(a.to == "1");
    } else {
      ++fwd;
    }
  }
  CHECK(fwd == 2);
  CHECK(bwd == 2);

  QuiverWithMult loop;
  loop.vertices = {"v"};
  loop.arrows = {{"l", "v", "v"}};
  loop.mult = {{"v", 4}};
  auto dl = double_quiver(loop);
  CHECK(dl.arrows.size() == 2);
  CHECK(dl.arrows[1].from == "v");
  CHECK(dl.arrows[1].to == "v");
}
