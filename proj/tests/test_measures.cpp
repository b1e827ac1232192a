#include <doctest.h>

#include <random>

#include "linfty/measures.hpp"
#include "oracles.hpp"

using namespace linfty;

TEST_CASE("two-point measure") {
  const auto mu = make_measure({Point{0.0}, Point{1.0}}, {0.5, 0.5}, false);
  CHECK(mu.size() == 2);
  CHECK(mu.weight(0) + mu.weight(1) == doctest::Approx(1.0));
}

TEST_CASE("duplicate points merge, first position kept") {
  const auto mu = make_measure({Point{0.0}, Point{0.0}, Point{1.0}}, {0.25, 0.25, 0.5}, false);
  REQUIRE(mu.size() == 2);
  CHECK(mu.point(0) == Point{0.0});
  CHECK(mu.weight(0) == 0.5);
  CHECK(mu.weight(1) == 0.5);
}

TEST_CASE("normalization of a 3x3 grid with unit weights") {
  std::vector<Point> pts;
  for (double a : {0.0, 0.5, 1.0})
    for (double b : {0.0, 0.5, 1.0}) pts.push_back(Point{a, b});
  const auto mu = make_measure(pts, std::vector<double>(9, 1.0), true);
  CHECK(mu.size() == 9);
  for (double w : mu.weights()) CHECK(w == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("make_measure rejects bad input") {
  CHECK_THROWS_AS(make_measure({Point{0.0}, Point{1.0, 2.0}}, {0.5, 0.5}, true),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_measure({Point{0.0}, Point{1.0}}, {0.0, 0.0}, true),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_measure({Point{0.0}, Point{1.0}}, {-0.5, 1.5}, false),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_measure({Point{0.0}}, {0.5, 0.5}, true), std::invalid_argument);
  CHECK_THROWS_AS(make_measure({Point{0.0}, Point{1.0}}, {0.5, 0.6}, false),
                  std::invalid_argument);
  CHECK_THROWS(Point(std::vector<double>{std::nan("")}));
}

TEST_CASE("make_measure is idempotent") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto pts = oracle::random_points(rng, 6, 2);
    pts.push_back(pts[0]);
    std::vector<double> w;
    for (std::size_t k = 0; k < pts.size(); ++k) w.push_back(oracle::unit(rng) + 0.01);
    const auto mu = make_measure(pts, w, true);
    const auto again = make_measure(mu.points(), {mu.weights().begin(), mu.weights().end()},
                                    false);
    CHECK(again.points() == mu.points());
    CHECK(std::equal(again.weights().begin(), again.weights().end(), mu.weights().begin()));
  }
}

TEST_CASE("grid measures") {
  const auto g2 = grid_measure(Point{0.0, 0.0}, Point{1.0, 1.0}, 2);
  REQUIRE(g2.size() == 4);
  CHECK(g2.point(0) == Point{0.25, 0.25});
  CHECK(g2.point(1) == Point{0.25, 0.75});
  CHECK(g2.point(2) == Point{0.75, 0.25});
  CHECK(g2.point(3) == Point{0.75, 0.75});
  for (double w : g2.weights()) CHECK(w == 0.25);

  const auto g1 = grid_measure(Point{0.0, 0.0}, Point{1.0, 1.0}, 1);
  REQUIRE(g1.size() == 1);
  CHECK(g1.point(0) == Point{0.5, 0.5});
  CHECK(g1.weight(0) == 1.0);

  const auto shifted = grid_measure(Point{10.0, 0.0}, Point{11.0, 1.0}, 2);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(shifted.point(k)[0] == doctest::Approx(g2.point(k)[0] + 10.0));
    CHECK(shifted.point(k)[1] == g2.point(k)[1]);
  }

  for (std::size_t n : {1u, 3u, 7u}) {
    const auto g = grid_measure(Point{0.0, 0.0, 0.0}, Point{1.0, 2.0, 3.0}, n);
    CHECK(g.size() == n * n * n);
    double total = 0.0;
    for (double w : g.weights()) total += w;
    CHECK(std::abs(total - 1.0) <= 1e-12);
  }
  CHECK_THROWS_AS(grid_measure(Point{0.0}, Point{0.0}, 2), std::invalid_argument);
  CHECK_THROWS_AS(grid_measure(Point{0.0}, Point{1.0}, 0), std::invalid_argument);
}

TEST_CASE("marginals and product couplings") {
  const auto u3 = share(grid_measure(Point{0.0}, Point{1.0}, 3));
  const auto u2 = share(grid_measure(Point{0.0}, Point{1.0}, 2));
  const auto [a, b] = marginals(identity_coupling(u3));
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(a.weight(k) == doctest::Approx(1.0 / 3.0));
    CHECK(b.weight(k) == doctest::Approx(1.0 / 3.0));
  }
  const auto prod = product_coupling(u2, u3);
  CHECK(prod.support_size() == 6);
  const auto [p, q] = marginals(prod);
  CHECK(p.weight(0) == doctest::Approx(0.5));
  CHECK(q.weight(2) == doctest::Approx(1.0 / 3.0));

  const auto dirac = share(make_measure({Point{0.0}}, {1.0}, false));
  const auto single = Coupling(dirac, dirac, {{0, 0, 1.0}});
  const auto [s, t] = marginals(single);
  CHECK(s.weight(0) == 1.0);
  CHECK(t.weight(0) == 1.0);

  const auto from_dirac = product_coupling(dirac, u3);
  const auto cols = from_dirac.column_sums();
  for (std::size_t j = 0; j < 3; ++j) CHECK(cols[j] == doctest::Approx(u3->weight(j)));

  const auto p33 = product_coupling(u3, u3);
  CHECK(p33.support_size() == 9);
  for (const auto& e : p33.entries()) CHECK(e.mass == doctest::Approx(1.0 / 9.0));
  const auto check = validate_coupling(p33, 1e-9);
  CHECK(check.pass);
  CHECK(check.max_deviation() <= 1e-15);
}

TEST_CASE("validate_coupling finds an injected defect") {
  const auto u2 = share(grid_measure(Point{0.0}, Point{1.0}, 2));
  auto entries = product_coupling(u2, u2).entries();
  entries[2].mass += 1e-3;
  const auto check = validate_coupling(Coupling(u2, u2, entries), 1e-9);
  CHECK_FALSE(check.pass);
  CHECK(check.max_row_deviation == doctest::Approx(1e-3));
  CHECK(check.worst_row == entries[2].i);
}

TEST_CASE("coupling construction rejects malformed entries") {
  const auto u2 = share(grid_measure(Point{0.0}, Point{1.0}, 2));
  CHECK_THROWS_AS(Coupling(u2, u2, {{0, 0, 0.5}, {0, 0, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(Coupling(u2, u2, {{0, 2, 0.5}}), std::out_of_range);
  CHECK_THROWS_AS(Coupling(u2, u2, {{0, 0, 0.0}}), std::invalid_argument);
}
