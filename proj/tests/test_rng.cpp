#include <doctest.h>

#include "fastpca/rng.hpp"

using namespace fastpca;

TEST_CASE("random_unit_vector is unit norm and deterministic per seed") {
  SeededRng a(42);
  SeededRng b(42);
  Vec va = random_unit_vector(a, 3);
  Vec vb = random_unit_vector(b, 3);
  CHECK(va == vb);
  CHECK(std::fabs(norm(va) - 1.0) <= 1e-12);

  SeededRng c(43);
  Vec vc = random_unit_vector(c, 3);
  CHECK(va != vc);
}

TEST_CASE("d=1 gives plus or minus one") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    SeededRng rng(s);
    Vec v = random_unit_vector(rng, 1);
    CHECK(std::fabs(std::fabs(v[0]) - 1.0) <= 1e-15);
  }
}

TEST_CASE("d=0 rejected") {
  SeededRng rng(1);
  CHECK_THROWS_AS(random_unit_vector(rng, 0), InputError);
}

TEST_CASE("sphere sampling has centered coordinates") {
  // Monte-Carlo check of uniformity: with 1e4 samples every coordinate mean
  // must land within 4/sqrt(1e4) of zero.
  const std::size_t d = 1000;
  const int samples = 10000;
  SeededRng rng(7);
  Vec mean(d, 0.0);
  for (int s = 0; s < samples; ++s) {
    Vec v = random_unit_vector(rng, d);
    axpy(1.0, v, mean);
  }
  scale(mean, 1.0 / samples);
  double bound = 4.0 / std::sqrt(static_cast<double>(samples));
  for (double m : mean) CHECK(std::fabs(m) <= bound);
}

TEST_CASE("uniform draws live in [0,1) and split streams are independent") {
  SeededRng rng(123);
  for (int i = 0; i < 1000; ++i) {
    double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  SeededRng base(9);
  SeededRng c1 = base.split(1);
  SeededRng c2 = base.split(2);
  SeededRng c1_again = base.split(1);
  CHECK(c1.uniform() == c1_again.uniform());
  CHECK(c1.seed() != c2.seed());
}
