#include <doctest.h>

#include <cmath>
#include <functional>

#include "helpers.hpp"
#include "subnorm/errors.hpp"
#include "subnorm/setfn.hpp"

using namespace subnorm;
using namespace subnorm::testing;

TEST_SUITE_BEGIN("setfn");

TEST_CASE("range_plus_constant values") {
  auto f = range_plus_constant(4);
  CHECK((*f)({1}) == 3.0);  // p - 2 + range({2}) = 2 + 1, paper indices {2}
  CHECK((*f)({}) == 0.0);
  CHECK((*f)({0, 3}) == 6.0);
  CHECK((*f)({0, 1, 2, 3}) == 6.0);
}

TEST_CASE("interval_count values") {
  auto f = interval_count(5);
  CHECK((*f)({0, 1, 3}) == 5.0);  // |A| + 2 intervals
  CHECK((*f)({}) == 0.0);
  CHECK((*f)({2}) == 2.0);
  CHECK((*f)({0, 1, 2, 3, 4}) == 6.0);
}

TEST_CASE("group_cover values") {
  auto f = group_cover(3, {{0, 1}, {1, 2}}, {1.0, 1.0});
  CHECK((*f)({1}) == 2.0);  // element 2 hits both groups
  CHECK((*f)({0}) == 1.0);
  CHECK((*f)({0, 2}) == 2.0);
  CHECK((*f)({}) == 0.0);
}

TEST_CASE("spectral values on a diagonal matrix") {
  Matrix q(2, 2);
  q(0, 0) = 4.0;
  q(1, 1) = 9.0;
  auto f = spectral_from_q(q, {SpectralH::kPower, 0.5});
  CHECK((*f)({0, 1}) == doctest::Approx(5.0).epsilon(1e-14));  // sqrt(4) + sqrt(9)
  CHECK((*f)({0}) == doctest::Approx(2.0));
  CHECK((*f)({}) == 0.0);
}

TEST_CASE("spectral from X matches spectral from Q = X^T X") {
  RngStream rng(21);
  Matrix x = rng.gaussian_matrix(4, 7);  // n < p exercises the sample-side route
  auto fx = spectral_from_x(x, {SpectralH::kPower, 0.5});
  auto fq = spectral_from_q(gram(x), {SpectralH::kPower, 0.5});
  for (int trial = 0; trial < 40; ++trial) {
    auto a = rng.sample_subset(7, 1 + static_cast<int>(rng.below(7)));
    CHECK((*fx)(a) == doctest::Approx((*fq)(a)).epsilon(1e-9));
  }
  // log_shift has h(0) != 0: structural zeros beyond rank must be counted
  auto gx = spectral_from_x(x, {SpectralH::kLogShift, 2.0});
  auto gq = spectral_from_q(gram(x), {SpectralH::kLogShift, 2.0});
  std::vector<int> all{0, 1, 2, 3, 4, 5, 6};
  CHECK((*gx)(all) == doctest::Approx((*gq)(all)).epsilon(1e-9));
}

TEST_CASE("construction rejections") {
  CHECK_THROWS_AS(weighted_cardinality({1.0, 0.0}), ArgumentError);
  CHECK_THROWS_AS(concave_cardinality({0.5, 1.0}), ArgumentError);       // h(0) != 0
  CHECK_THROWS_AS(concave_cardinality({0.0, 1.0, 3.0}), ArgumentError);  // convex increments
  CHECK_THROWS_AS(group_cover(3, {{0}}, {1.0}), ArgumentError);  // element 2,3 uncovered
  CHECK_THROWS_AS(range_plus_constant(1), ArgumentError);
  Matrix not_psd(2, 2);
  not_psd(0, 1) = not_psd(1, 0) = 1.0;  // eigenvalues -1, 1
  CHECK_THROWS_AS(spectral_from_q(not_psd, {SpectralH::kPower, 0.5}), ArgumentError);
  CHECK_THROWS_AS(cardinality(0), ArgumentError);
}

TEST_CASE("evaluate rejects out-of-range and duplicate indices") {
  auto f = cardinality(3);
  CHECK_THROWS_AS((*f)({3}), ArgumentError);
  CHECK_THROWS_AS((*f)({-1}), ArgumentError);
  CHECK_THROWS_AS((*f)({1, 1}), ArgumentError);
}

TEST_CASE("submodularity and monotonicity checks") {
  CHECK(is_submodular(*cardinality(3)));
  CHECK(is_nondecreasing(*cardinality(3)));

  RngStream rng(31);
  Matrix x = rng.gaussian_matrix(8, 6);
  auto spec = spectral_from_x(x, {SpectralH::kPower, 0.5});
  CHECK(is_submodular(*spec));
  CHECK(is_nondecreasing(*spec));

  auto probe = custom(3, [](std::span<const int> a) {
    return static_cast<double>(a.size() * a.size());
  });
  CHECK_FALSE(is_submodular(*probe));

  CHECK_THROWS_AS(is_submodular(*cardinality(13)), CapabilityError);
}

TEST_CASE("every built-in family passes the brute-force checks") {
  RngStream rng(32);
  for (int trial = 0; trial < 25; ++trial) {
    const int p = 2 + static_cast<int>(rng.below(5));  // p <= 6 keeps spectral cheap
    auto f = random_builtin(rng, p);
    CAPTURE(f->describe());
    CHECK(is_submodular(*f));
    CHECK(is_nondecreasing(*f));
    CHECK((*f)({}) == 0.0);
    for (int k = 0; k < p; ++k) CHECK((*f)({k}) > 0.0);
    // superadditivity on disjoint sets
    const Vector table = eval_all(*f);
    for (uint32_t a = 1; a < (1u << p); ++a)
      for (uint32_t b = 1; b < (1u << p); ++b) {
        if (a & b) continue;
        CHECK(table[a] + table[b] >= table[a | b] - 1e-9 * (1.0 + table[a | b]));
      }
  }
}

TEST_CASE("chain evaluators match direct evaluation") {
  RngStream rng(33);
  for (int trial = 0; trial < 30; ++trial) {
    const int p = 3 + static_cast<int>(rng.below(5));
    auto f = random_builtin(rng, p);
    auto order = rng.sample_subset(p, p);
    // random ordering: shuffle by sampling without replacement
    std::vector<int> perm;
    std::vector<int> pool = order;
    while (!pool.empty()) {
      const size_t i = rng.below(pool.size());
      perm.push_back(pool[i]);
      pool.erase(pool.begin() + i);
    }
    auto chain = f->chain();
    chain->reset();
    std::vector<int> prefix;
    for (int j : perm) {
      prefix.push_back(j);
      std::vector<int> sorted = prefix;
      std::sort(sorted.begin(), sorted.end());
      CHECK(chain->extend(j) == doctest::Approx((*f)(sorted)).epsilon(1e-12));
    }
  }
}

TEST_CASE("stability") {
  auto card = cardinality(3);
  CHECK(is_stable(*card, std::vector<int>{0, 2}));
  CHECK(is_stable(*card, std::vector<int>{}));

  auto range = range_plus_constant(4);
  CHECK_FALSE(is_stable(*range, std::vector<int>{0, 2}));  // adding 2 keeps the range
  CHECK(is_stable(*range, std::vector<int>{0, 1, 2, 3}));  // V has no supersets
}

TEST_CASE("single-element stability test matches the all-supersets definition") {
  RngStream rng(34);
  for (int trial = 0; trial < 15; ++trial) {
    const int p = 2 + static_cast<int>(rng.below(4));
    auto f = random_builtin(rng, p);
    const Vector table = eval_all(*f);
    for (uint32_t mask = 0; mask < (1u << p); ++mask) {
      bool def = true;  // definitional: every proper superset strictly increases
      for (uint32_t sup = 0; sup < (1u << p) && def; ++sup) {
        if ((sup & mask) != mask || sup == mask) continue;
        if (table[sup] <= table[mask] + 1e-9 * (1.0 + std::fabs(table[mask]))) def = false;
      }
      CHECK(is_stable(*f, mask_to_indices(mask, p)) == def);
    }
  }
}

TEST_CASE("separability") {
  CHECK(is_separable(*cardinality(3), std::vector<int>{0, 1}));
  CHECK_FALSE(is_separable(*min_card_one(3), std::vector<int>{0, 1}));
  CHECK_FALSE(is_separable(*cardinality(3), std::vector<int>{1}));
}

TEST_CASE("binary-split separability matches full-partition enumeration") {
  RngStream rng(35);
  std::function<bool(const Vector&, uint32_t, double, int)> partition_additive =
      [&](const Vector& table, uint32_t mask, double tol, int p) {
        // any partition into >= 2 parts with additive values, by recursion on
        // the first part
        std::function<bool(uint32_t, double, bool)> rec = [&](uint32_t rest, double acc,
                                                              bool started) -> bool {
          if (rest == 0) return started && std::fabs(acc - table[mask]) <= tol;
          const uint32_t low = rest & (~rest + 1);
          for (uint32_t part = rest; part > 0; part = (part - 1) & rest) {
            if (!(part & low)) continue;  // anchor the lowest element
            if (part == mask && !started) continue;  // proper partitions only
            if (rec(rest ^ part, acc + table[part], true)) return true;
          }
          return false;
        };
        return rec(mask, 0.0, false);
      };

  for (int trial = 0; trial < 12; ++trial) {
    const int p = 2 + static_cast<int>(rng.below(4));  // |A| <= 5
    auto f = random_builtin(rng, p);
    const Vector table = eval_all(*f);
    for (uint32_t mask = 1; mask < (1u << p); ++mask) {
      if (std::popcount(mask) < 2) continue;
      const double tol = 1e-9 * (1.0 + std::fabs(table[mask]));
      CHECK(is_separable(*f, mask_to_indices(mask, p)) ==
            partition_additive(table, mask, tol, p));
    }
  }
}

TEST_CASE("stable inseparable families of the four reference norms") {
  auto rep_card = stable_inseparable_sets(*cardinality(2));
  REQUIRE(rep_card.stable_inseparable.size() == 2);  // {1}, {2}

  auto rep_mixed = stable_inseparable_sets(*mixed_fig_norm());
  REQUIRE(rep_mixed.stable_inseparable.size() == 2);
  CHECK(rep_mixed.stable_inseparable[0] == std::vector<int>{0});
  CHECK(rep_mixed.stable_inseparable[1] == std::vector<int>{0, 1});

  auto rep_sqrt = stable_inseparable_sets(*sqrt_cardinality(2));
  REQUIRE(rep_sqrt.stable_inseparable.size() == 3);

  auto rep_linf = stable_inseparable_sets(*min_card_one(2));
  REQUIRE(rep_linf.stable_inseparable.size() == 1);
  CHECK(rep_linf.stable_inseparable[0] == std::vector<int>{0, 1});
}

TEST_CASE("smallest stable superset") {
  auto card = cardinality(4);
  CHECK(smallest_stable_superset(*card, std::vector<int>{0, 2}) == std::vector<int>{0, 2});
  CHECK(smallest_stable_superset(*card, std::vector<int>{}).empty());

  auto range = range_plus_constant(4);
  CHECK(smallest_stable_superset(*range, std::vector<int>{0, 2}) == std::vector<int>{0, 1, 2});

  // closure is stable, contains J, has equal F value, and is minimal
  RngStream rng(36);
  for (int trial = 0; trial < 12; ++trial) {
    const int p = 2 + static_cast<int>(rng.below(4));
    auto f = random_builtin(rng, p);
    const Vector table = eval_all(*f);
    for (uint32_t mask = 0; mask < (1u << p); ++mask) {
      auto j = mask_to_indices(mask, p);
      auto closure = smallest_stable_superset(*f, j);
      CHECK(is_stable(*f, closure));
      const uint32_t cmask = indices_to_mask(closure);
      CHECK((cmask & mask) == mask);
      CHECK(table[cmask] == doctest::Approx(table[mask]).epsilon(1e-12));
      for (uint32_t sup = 0; sup < (1u << p); ++sup)
        if ((sup & mask) == mask && is_stable(*f, mask_to_indices(sup, p)))
          CHECK((sup & cmask) == cmask);  // every stable superset contains it
    }
  }
}

TEST_CASE("restriction and contraction") {
  auto card = cardinality(4);
  auto restr = restrict_to(card, std::vector<int>{1, 3});
  CHECK(restr->ground_size() == 2);
  CHECK((*restr)({0, 1}) == 2.0);

  auto contr = contract_by(card, std::vector<int>{1, 3});
  CHECK(contr->ground_size() == 2);
  CHECK((*contr)({0}) == 1.0);  // |{0,1,3}| - |{1,3}|

  // contraction of min(|A|,1) by {0} vanishes on singletons
  auto degen = contract_by(min_card_one(2), std::vector<int>{0});
  CHECK((*degen)({0}) == 0.0);
  CHECK(vanishing_singletons(*degen) == std::vector<int>{0});

  // range example: F({1,2,3}) - F({2,3}) = 5 - 4 = 1
  auto range = range_plus_constant(4);
  auto c = contract_by(range, std::vector<int>{1, 2});
  CHECK((*c)({0}) == 1.0);

  RngStream rng(37);
  for (int trial = 0; trial < 10; ++trial) {
    const int p = 3 + static_cast<int>(rng.below(3));
    auto f = random_builtin(rng, p);
    auto j = rng.sample_subset(p, 1 + static_cast<int>(rng.below(p - 1)));
    auto fr = restrict_to(f, j);
    auto fc = contract_by(f, j);
    CHECK(is_submodular(*fr));
    CHECK(is_nondecreasing(*fr));
    CHECK(is_submodular(*fc));
    CHECK(is_nondecreasing(*fc));
  }
}

TEST_CASE("sum of submodular functions stays submodular") {
  auto mix = sum_of({range_plus_constant(5), cardinality(5)}, {1.0, 0.5});
  CHECK(is_submodular(*mix));
  CHECK(is_nondecreasing(*mix));
  CHECK((*mix)({2}) == doctest::Approx(3.0 + 1.0 + 0.5));
}

TEST_CASE("modular shift") {
  auto g = modular_shift(cardinality(3), 2.0, {0.5, 1.0, 4.0});
  CHECK((*g)({}) == 0.0);
  CHECK((*g)({0}) == doctest::Approx(1.5));
  CHECK((*g)({2}) == doctest::Approx(-2.0));
  CHECK((*g)({0, 1, 2}) == doctest::Approx(6.0 - 5.5));
}

TEST_SUITE_END();
