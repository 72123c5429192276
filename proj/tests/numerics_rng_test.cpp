#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "longmix/errors.hpp"
#include "longmix/numerics/rng.hpp"

using namespace longmix;

TEST_CASE("identical seeds give byte-identical draw sequences") {
  RngState a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());

  RngState c(9001), d(9001);
  for (int i = 0; i < 200; ++i) {
    CHECK(draw_normal(c, 0.0, 1.0) == draw_normal(d, 0.0, 1.0));
    CHECK(draw_gamma(c, 3.7) == draw_gamma(d, 3.7));
    CHECK(draw_scaled_inv_chi2(c, 5.0, 2.0) == draw_scaled_inv_chi2(d, 5.0, 2.0));
  }
}

TEST_CASE("different seeds diverge") {
  RngState a(1), b(2);
  int same = 0;
  for (int i = 0; i < 100; ++i) same += a.next_u64() == b.next_u64();
  CHECK(same == 0);
}

TEST_CASE("draw_normal with sd zero returns the mean exactly") {
  RngState rng(3);
  CHECK(draw_normal(rng, 4.25, 0.0) == 4.25);
  CHECK_THROWS_AS(draw_normal(rng, 0.0, -1.0), DomainError);
}

TEST_CASE("draw_normal moments") {
  RngState rng(11);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = draw_normal(rng, 2.0, 3.0);
    sum += z;
    sum_sq += z * z;
  }
  const double m = sum / n;
  const double v = sum_sq / n - m * m;
  CHECK(m == doctest::Approx(2.0).epsilon(0.02));
  CHECK(v == doctest::Approx(9.0).epsilon(0.03));
}

TEST_CASE("scaled inverse chi-square mean matches dof*scale/(dof-2)") {
  RngState rng(17);
  const int n = 1000000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += draw_scaled_inv_chi2(rng, 10.0, 1.0);
  CHECK(sum / n == doctest::Approx(1.25).epsilon(0.01 / 1.25));
}

TEST_CASE("draw_gamma handles shapes below one") {
  RngState rng(23);
  const int n = 400000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = draw_gamma(rng, 0.4);
    CHECK(g >= 0.0);
    sum += g;
  }
  CHECK(sum / n == doctest::Approx(0.4).epsilon(0.02));
}

TEST_CASE("scaled inverse chi-square rejects nonpositive parameters") {
  RngState rng(5);
  CHECK_THROWS_AS(draw_scaled_inv_chi2(rng, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(draw_scaled_inv_chi2(rng, 1.0, -1.0), DomainError);
}

TEST_CASE("draw_categorical respects the weights") {
  RngState rng(31);
  const std::vector<double> weights = {45, 15, 13, 11, 4};
  std::vector<int> counts(5, 0);
  const int n = 88000;
  for (int i = 0; i < n; ++i) counts[draw_categorical(rng, weights)]++;
  for (std::size_t k = 0; k < 5; ++k)
    CHECK(static_cast<double>(counts[k]) / n ==
          doctest::Approx(weights[k] / 88.0).epsilon(0.05));
}
