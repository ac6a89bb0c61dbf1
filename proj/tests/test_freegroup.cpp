#include "doctest.h"

#include <map>
#include <set>

#include "schottky/schottky_group.hpp"
#include "test_support.hpp"

using namespace schottky;
using schottky::testing::cis;

namespace {

// Brute-force class table: cyclically reduce every reduced word, key by the least rotation,
// drop proper powers.
std::set<Word> brute_force_classes(int g, int maxlen) {
  std::set<Word> out;
  for (const Word& w : enumerate_words(g, maxlen)) {
    if (w.empty()) continue;
    const Word c = cyclic_reduce(w);
    if (c.size() != w.size()) continue;
    if (is_proper_power(c)) continue;
    out.insert(minimal_rotation(c));
  }
  return out;
}

Word random_reduced(std::mt19937_64& rng, int g, int len) {
  std::uniform_int_distribution<int> pick(1, 2 * g);
  Word w;
  while (static_cast<int>(w.size()) < len) {
    const Letter r = letter_from_key(pick(rng));
    if (!w.empty() && w.back() == -r) continue;
    w.push_back(r);
  }
  return w;
}

}  // namespace

TEST_CASE("reduce") {
  CHECK(reduce(Word{1, -1, 2}) == Word{2});
  CHECK(reduce(Word{}).empty());
  CHECK(reduce(Word{1, 2, -2, -1, 1}) == Word{1});
  CHECK_THROWS_AS(reduce(Word{0}), Error);
}

TEST_CASE("cyclic_reduce") {
  CHECK(cyclic_reduce(Word{1, 2, -1}) == Word{2});
  CHECK(cyclic_reduce(Word{1, 2}) == Word{1, 2});
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const Word u = random_reduced(rng, 3, 1 + i % 4);
    const Word w = random_reduced(rng, 3, 1 + i % 6);
    const Word conj = multiply(multiply(u, w), invert(u));
    const Word lhs = cyclic_reduce(conj);
    const Word rhs = cyclic_reduce(w);
    if (rhs.empty()) continue;
    CHECK(minimal_rotation(lhs) == minimal_rotation(rhs));
  }
}

TEST_CASE("enumerate_words counts and order") {
  CHECK(enumerate_words(2, 1).size() == 5);
  CHECK(enumerate_words(2, 2).size() == 17);
  for (int g = 1; g <= 3; ++g) {
    const int maxlen = g == 3 ? 6 : 8;
    std::vector<std::uint64_t> counts(maxlen + 1, 0);
    Word prev;
    bool first = true;
    bool ordered = true;
    bool reduced = true;
    for_each_word(g, maxlen, [&](std::span<const Letter> w) {
      ++counts[w.size()];
      if (!first && !shortlex_less(prev, w)) ordered = false;
      for (std::size_t i = 1; i < w.size(); ++i) reduced = reduced && w[i] != -w[i - 1];
      prev.assign(w.begin(), w.end());
      first = false;
    });
    CHECK(ordered);
    CHECK(reduced);
    for (int l = 0; l <= maxlen; ++l) CHECK(counts[l] == reduced_word_count(g, l));
  }
  CHECK(reduced_word_count(3, 8) == 6ull * 5 * 5 * 5 * 5 * 5 * 5 * 5);
}

TEST_CASE("primitive conjugacy classes") {
  CHECK(primitive_conjugacy_classes(2, 1).size() == 4);
  int len2 = 0;
  for (const auto& c : primitive_conjugacy_classes(2, 2)) len2 += c.representative.size() == 2;
  CHECK(len2 == 4);
  CHECK(primitive_conjugacy_classes(1, 7).size() == 2);

  for (int maxlen = 1; maxlen <= 8; ++maxlen) {
    const auto classes = primitive_conjugacy_classes(2, maxlen);
    std::set<Word> got;
    for (const auto& c : classes) {
      CHECK(c.primitive);
      CHECK(cyclic_reduce(c.representative) == c.representative);
      CHECK(minimal_rotation(c.representative) == c.representative);
      got.insert(c.representative);
    }
    CHECK(got.size() == classes.size());
    CHECK(got == brute_force_classes(2, maxlen));
  }
}

TEST_CASE("coset representatives of generator subgroups") {
  const auto reps = coset_representatives(2, 1, 1);
  CHECK(reps == std::vector<Word>{{}, {2}, {-2}});
  CHECK(coset_representatives(1, 1, 6) == std::vector<Word>{{}});
  const auto many = coset_representatives(2, 2, 5);
  for (std::size_t i = 0; i < many.size(); ++i) {
    for (std::size_t k = i + 1; k < many.size(); ++k) {
      const Word x = multiply(many[i], invert(many[k]));
      bool power = true;
      for (Letter r : x) power = power && std::abs(r) == 2;
      CHECK_FALSE(power);
    }
  }
}

TEST_CASE("coset representatives of a general cyclic subgroup") {
  // Every word of length <= 6 is c^k times a representative for exactly one representative.
  for (const Word& core : {Word{1, 2}, Word{1, -2, -1, -2}, Word{2}}) {
    const auto reps = coset_representatives(2, core, 8);
    std::set<Word> rep_set(reps.begin(), reps.end());
    const Word cinv = invert(core);
    for (const Word& w : enumerate_words(2, 6)) {
      // Walk w along c^{+-1} toward the shortest element of its coset.
      Word x = w;
      for (;;) {
        const Word plus = multiply(core, x);
        const Word minus = multiply(cinv, x);
        const Word& better = shortlex_less(plus, minus) ? plus : minus;
        if (shortlex_less(better, x)) {
          x = better;
        } else {
          break;
        }
      }
      CHECK(rep_set.count(x) == 1);
      CHECK(is_coset_representative(core, x));
    }
  }
}

TEST_CASE("evaluate") {
  const SchottkyGroup g = schottky::testing::g2();
  CHECK(g.evaluate(Word{}).distance(MoebiusMap::identity()) < 1e-15);
  CHECK(g.evaluate(Word{1}).distance(g.generator(1)) < 1e-15);
  const auto q = g.evaluate(Word{1, 2, -1}).loxodromic_data().multiplier;
  CHECK(std::abs(q - g.fixed_data(2).multiplier) < 1e-10);
}

TEST_CASE("class multipliers are conjugation invariant") {
  const SchottkyGroup g = schottky::testing::g2();
  std::mt19937_64 rng(12);
  for (const auto& c : primitive_conjugacy_classes(2, 4)) {
    const Complex q = g.evaluate(c.representative).loxodromic_data().multiplier;
    for (int i = 0; i < 3; ++i) {
      const Word u = random_reduced(rng, 2, 1 + i);
      const Word w = multiply(multiply(u, c.representative), invert(u));
      CHECK(std::abs(g.evaluate(w).loxodromic_data().multiplier - q) < 1e-10);
    }
  }
}

TEST_CASE("validate") {
  const Complex q(0.2, 0.1);
  std::vector<Circle> annulus{{0.0, 1.0, 1}, {0.0, std::abs(q), 1}};
  const SchottkyGroup dilation({MoebiusMap(q, 0.0, 0.0, 1.0)}, annulus);
  const auto rep1 = validate(dilation);
  CHECK(rep1.ok());
  CHECK(rep1.normalized);
  CHECK(dilation.circle(1).orientation == -1);
  CHECK(dilation.circle(-1).orientation == 1);

  const auto rep2 = validate(schottky::testing::g2());
  CHECK(rep2.ok());
  CHECK(rep2.normalized);
  CHECK(validate(schottky::testing::g3()).ok());
  CHECK_FALSE(validate(schottky::testing::g3()).normalized);

  // Two generators whose isometric circles overlap.
  const MoebiusMap l1 = from_fixed_data(RiemannSpherePoint(0.0), RiemannSpherePoint::infinity(), Complex(0.5));
  const MoebiusMap l2 = from_fixed_data(RiemannSpherePoint(1.0), RiemannSpherePoint(-1.0), Complex(0.5));
  const auto bad = validate(SchottkyGroup({l1, l2}));
  CHECK_FALSE(bad.disjoint);
  CHECK_FALSE(bad.failures.empty());

  // Circles that L does not pair.
  std::vector<Circle> wrong{{0.0, 1.0, 1}, {0.0, 0.5, 1}};
  CHECK_FALSE(validate(SchottkyGroup({MoebiusMap(q, 0.0, 0.0, 1.0)}, wrong)).pairing);
}

TEST_CASE("normalization by conjugation") {
  const SchottkyGroup g = schottky::testing::g3();
  const SchottkyGroup n = g.normalized();
  CHECK(n.is_normalized());
  CHECK(validate(n).ok());
  for (int r = 1; r <= 3; ++r) {
    CHECK(std::abs(n.fixed_data(r).multiplier - g.fixed_data(r).multiplier) < 1e-10);
  }
}

TEST_CASE("disk membership follows the word structure") {
  const SchottkyGroup g = schottky::testing::g2();
  for (const Word& w : enumerate_words(2, 4)) {
    if (w.empty()) continue;
    const auto fd = g.evaluate(w).loxodromic_data();
    CHECK(disk_membership(g, fd.repelling).disk == w.back());
    CHECK(disk_membership(g, fd.attracting).disk == -w.front());
    for (int key = 1; key <= 4; ++key) {
      const Letter r = letter_from_key(key);
      bool is_power = true;
      for (Letter x : w) is_power = is_power && x == w.front() && std::abs(x) == std::abs(r);
      if (is_power) continue;
      const RiemannSpherePoint image = g.evaluate(invert(w)).apply(g.fixed_data(r).attracting);
      CHECK(disk_membership(g, image).disk == w.back());
    }
  }
  const Circle& c = g.circle(2);
  CHECK_THROWS_AS(disk_membership(g, RiemannSpherePoint(c.point_at(0.3))), Error);
  CHECK(disk_membership(g, RiemannSpherePoint(g.interior_point())).in_fundamental_domain());
}

TEST_CASE("convergence exponent estimate") {
  const SchottkyGroup rank1 = schottky::testing::rank_one(Complex(0.1, 0.05));
  CHECK(convergence_exponent_estimate(rank1, Complex(0.0, 0.9), 6) < 1e-9);

  const SchottkyGroup g = schottky::testing::g2();
  const double est = convergence_exponent_estimate(g, g.interior_point(), 7);
  CHECK(est > 0.0);
  CHECK(est < 0.9);

  // Shrinking the multipliers (fixed points fixed) shrinks the circles and the estimate.
  const MoebiusMap l1 = from_fixed_data(RiemannSpherePoint(0.0), RiemannSpherePoint::infinity(), cis(0.001, 0.5));
  const MoebiusMap l2 = from_fixed_data(RiemannSpherePoint(1.0), RiemannSpherePoint(Complex(-1.0, 0.2)), cis(0.0012, -0.7));
  const SchottkyGroup smaller({l1, l2});
  CHECK(convergence_exponent_estimate(smaller, smaller.interior_point(), 7) < est);
}
