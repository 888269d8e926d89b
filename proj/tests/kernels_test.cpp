#include "ordmed/kernels.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"

using namespace ordmed::kern;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, int n) {
  std::vector<double> v(n);
  for (auto& x : v) x = (double(rng() >> 11) * 0x1.0p-53) * 2.0 - 1.0;
  return v;
}

}  // namespace

TEST_CASE("scalar backend is always selectable") {
  Backend prev = active_backend();
  CHECK(set_backend(Backend::scalar));
  CHECK(active_backend() == Backend::scalar);
  set_backend(prev);
}

TEST_CASE("backends agree on dot, axpy, scal, nrm2sq") {
  if (!avx2_available()) return;  // single-backend build: nothing to compare

  std::mt19937_64 rng(321);
  for (int n : {1, 3, 7, 16, 33, 100, 1023}) {
    auto x = random_vec(rng, n);
    auto y = random_vec(rng, n);
    auto w = random_vec(rng, n);

    REQUIRE(set_backend(Backend::scalar));
    const double d_s = dot(x.data(), y.data(), n);
    const double wd_s = wdot(x.data(), y.data(), w.data(), n);
    const double n_s = nrm2sq(x.data(), n);
    auto ax_s = y;
    axpy(0.37, x.data(), ax_s.data(), n);
    auto sc_s = x;
    scal(1.75, sc_s.data(), n);

    REQUIRE(set_backend(Backend::avx2));
    const double d_v = dot(x.data(), y.data(), n);
    const double wd_v = wdot(x.data(), y.data(), w.data(), n);
    const double n_v = nrm2sq(x.data(), n);
    auto ax_v = y;
    axpy(0.37, x.data(), ax_v.data(), n);
    auto sc_v = x;
    scal(1.75, sc_v.data(), n);

    CHECK(d_v == doctest::Approx(d_s).epsilon(1e-13));
    CHECK(wd_v == doctest::Approx(wd_s).epsilon(1e-13));
    CHECK(n_v == doctest::Approx(n_s).epsilon(1e-13));
    for (int i = 0; i < n; ++i) {
      // fma fuses the multiply-add, so allow last-ulp wiggle
      CHECK(ax_v[i] == doctest::Approx(ax_s[i]).epsilon(1e-14));
      CHECK(sc_v[i] == sc_s[i]);  // scal is a single rounded multiply in both
    }
    set_backend(Backend::scalar);
  }
}

TEST_CASE("kernels handle empty and single-element spans") {
  const double x[] = {3.0};
  CHECK(dot(x, x, 0) == 0.0);
  CHECK(dot(x, x, 1) == 9.0);
  CHECK(nrm2sq(x, 1) == 9.0);
}
