#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qmult/ring.hpp"

using namespace qmult;

namespace {

TruncPoly<Rat> q_poly(std::initializer_list<long> coeffs) {
  TruncPoly<Rat> t(static_cast<int>(coeffs.size()));
  int i = 0;
  for (long c : coeffs) t.c[i++] = Rat(c);
  return t;
}

TruncPoly<Fp> fp_poly(std::uint32_t p, std::initializer_list<long> coeffs) {
  TruncPoly<Fp> t(static_cast<int>(coeffs.size()));
  int i = 0;
  for (long c : coeffs) t.c[i++] = Fp::from_int(c, p);
  return t;
}

TruncPoly<Rat> random_q_poly(int m, std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-5, 5), den(1, 3);
  TruncPoly<Rat> t(m);
  for (int i = 0; i < m; ++i) t.c[i] = Rat(num(rng), den(rng));
  return t;
}

TruncPoly<Fp> random_fp_poly(int m, std::uint32_t p, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint32_t> d(0, p - 1);
  TruncPoly<Fp> t(m);
  for (int i = 0; i < m; ++i) t.c[i] = Fp(d(rng), p);
  return t;
}

}  // namespace

TEST_CASE("multiplication truncates at degree m") {
  CHECK(tp_mul(q_poly({1, 1, 0}), q_poly({1, 1, 1})) == q_poly({1, 2, 2}));
  CHECK(tp_mul(q_poly({0, 1}), q_poly({0, 1})) == q_poly({0, 0}));
  CHECK(tp_mul(fp_poly(2, {1, 1, 0}), fp_poly(2, {1, 1, 0})) == fp_poly(2, {1, 0, 1}));
  CHECK_THROWS_AS(tp_mul(q_poly({1}), q_poly({1, 0})), DomainError);
}

TEST_CASE("inverse of a unit") {
  CHECK(tp_inv(q_poly({1, 1, 0})) == q_poly({1, -1, 1}));
  TruncPoly<Rat> two(2);
  two.c[0] = Rat(2);
  TruncPoly<Rat> half(2);
  half.c[0] = Rat(1, 2);
  CHECK(tp_inv(two) == half);
  CHECK_THROWS_AS(tp_inv(q_poly({0, 1})), DomainError);
}

TEST_CASE("residue reads the top coefficient") {
  CHECK(residue(q_poly({2, 0, 5})) == Rat(5));
  CHECK(residue(q_poly({7})) == Rat(7));
  CHECK(residue(q_poly({3, 0})) == Rat(0));
}

TEST_CASE("subring embedding along eps -> eps^{m/d}") {
  CHECK(embed_subring(q_poly({1, 3}), 4) == q_poly({1, 0, 3, 0}));
  CHECK(embed_subring(q_poly({9}), 5) == q_poly({9, 0, 0, 0, 0}));
  CHECK_THROWS_AS(embed_subring(q_poly({1, 3}), 3), DomainError);
}

TEST_CASE("ring axioms on random triples") {
  std::mt19937_64 rng(7);
  for (int it = 0; it < 200; ++it) {
    int m = 1 + static_cast<int>(rng() % 5);
    auto a = random_q_poly(m, rng), b = random_q_poly(m, rng), c = random_q_poly(m, rng);
    CHECK(tp_mul(a, tp_mul(b, c)) == tp_mul(tp_mul(a, b), c));
    CHECK(tp_mul(a, b) == tp_mul(b, a));
    CHECK(tp_mul(a, tp_add(b, c)) == tp_add(tp_mul(a, b), tp_mul(a, c)));
  }
  for (int it = 0; it < 200; ++it) {
    int m = 1 + static_cast<int>(rng() % 4);
    std::uint32_t p = (it % 2) ? 3 : 5;
    auto a = random_fp_poly(m, p, rng), b = random_fp_poly(m, p, rng),
         c = random_fp_poly(m, p, rng);
    CHECK(tp_mul(a, tp_mul(b, c)) == tp_mul(tp_mul(a, b), c));
    CHECK(tp_mul(a, tp_add(b, c)) == tp_add(tp_mul(a, b), tp_mul(a, c)));
  }
}

TEST_CASE("units are exactly the polynomials with nonzero constant term") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 200; ++it) {
    int m = 1 + static_cast<int>(rng() % 5);
    auto a = random_q_poly(m, rng);
    if (a.c[0].is_zero()) {
      CHECK_THROWS_AS(tp_inv(a), DomainError);
    } else {
      TruncPoly<Rat> one(m);
      one.c[0] = Rat(1);
      CHECK(tp_mul(a, tp_inv(a)) == one);
    }
  }
}

TEST_CASE("embedding is a ring homomorphism") {
  std::mt19937_64 rng(13);
  for (int it = 0; it < 100; ++it) {
    int d = 1 + static_cast<int>(rng() % 3);
    int m = d * (1 + static_cast<int>(rng() % 3));
    auto a = random_q_poly(d, rng), b = random_q_poly(d, rng);
    CHECK(embed_subring(tp_mul(a, b), m) == tp_mul(embed_subring(a, m), embed_subring(b, m)));
    CHECK(embed_subring(tp_add(a, b), m) == tp_add(embed_subring(a, m), embed_subring(b, m)));
  }
}

TEST_CASE("residue pairing is bilinear and nondegenerate") {
  std::mt19937_64 rng(17);
  for (int it = 0; it < 100; ++it) {
    int m = 1 + static_cast<int>(rng() % 5);
    auto a = random_q_poly(m, rng), b = random_q_poly(m, rng);
    Rat direct;
    for (int i = 0; i < m; ++i) direct += a.c[i] * b.c[m - 1 - i];
    CHECK(residue(tp_mul(a, b)) == direct);
  }
  for (int m = 1; m <= 5; ++m)
    for (int i = 0; i < m; ++i) {
      auto ei = TruncPoly<Rat>::eps_power(m, i);
      auto dual = TruncPoly<Rat>::eps_power(m, m - 1 - i);
      CHECK(residue(tp_mul(ei, dual)) == Rat(1));
    }
}

TEST_CASE("text rendering") {
  CHECK(tp_to_string(q_poly({2, 0, 5})) == "2 + 5*e^2");
  CHECK(tp_to_string(q_poly({0, 0})) == "0");
  CHECK(tp_to_string(q_poly({1, 2})) == "1 + 2*e");
}
