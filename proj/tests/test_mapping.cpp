#include <doctest.h>

#include <random>

#include "linfty/mapping.hpp"
#include "oracles.hpp"

using namespace linfty;

namespace {

MeasurePtr line(std::vector<double> xs, std::vector<double> w = {}) {
  std::vector<Point> pts;
  for (double x : xs) pts.push_back(Point{x});
  if (w.empty()) return share(uniform_measure(std::move(pts)));
  return share(make_measure(std::move(pts), std::move(w), true));
}

}  // namespace

TEST_CASE("extract_map examples") {
  const auto mu = line({0.0, 1.0, 2.0});
  const auto id = extract_map(identity_coupling(mu));
  CHECK(id.nondeterministic_mass == 0.0);
  CHECK(id.assignment == Assignment{0, 1, 2});
  CHECK(id.is_map);

  const auto two = line({0.0, 1.0});
  const auto prod = extract_map(product_coupling(two, two));
  CHECK(prod.nondeterministic_mass == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(prod.assignment == Assignment{0, 0});  // ties go to the lowest target
  CHECK(prod.per_source_split_count == std::vector<std::size_t>{2, 2});
  CHECK_FALSE(prod.is_map);

  CHECK_THROWS_AS(extract_map(identity_coupling(mu), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(extract_map(identity_coupling(mu), -0.1), std::invalid_argument);
}

TEST_CASE("single-entry sources give an exact map") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 50; ++t) {
    const std::size_t m = 1 + rng() % 8, n = 1 + rng() % 5;
    std::vector<double> w(m);
    for (double& v : w) v = 0.1 + oracle::unit(rng);
    const auto mu = share(make_measure(oracle::random_points(rng, m, 2), w, true));
    std::vector<std::size_t> target(m);
    std::vector<double> col(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) col[target[i] = rng() % n] += mu->weight(i);
    std::vector<Point> ys;
    std::vector<double> ws;
    std::vector<std::size_t> renumber(n, kNoTarget);
    for (std::size_t j = 0; j < n; ++j) {
      if (col[j] == 0.0) continue;
      renumber[j] = ys.size();
      ys.push_back(Point{static_cast<double>(j), 0.0});
      ws.push_back(col[j]);
    }
    const auto nu = share(make_measure(ys, ws, true));
    std::vector<CouplingEntry> entries;
    for (std::size_t i = 0; i < m; ++i) entries.push_back({i, renumber[target[i]], mu->weight(i)});
    const Coupling plan(mu, nu, entries);
    const auto map = extract_map(plan);
    CHECK(map.nondeterministic_mass == 0.0);
    CHECK(map.is_map);
    std::vector<double> pushed(nu->size(), 0.0);
    for (std::size_t i = 0; i < m; ++i) pushed[map.assignment[i]] += mu->weight(i);
    for (std::size_t j = 0; j < nu->size(); ++j) CHECK(std::abs(pushed[j] - nu->weight(j)) <= 1e-12);
  }
}

TEST_CASE("nondeterministic mass is the mass off the dominant targets") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 50; ++t) {
    const auto rp = oracle::random_plan(rng, 2 + rng() % 10, false);
    const Coupling plan(rp.mu, rp.nu, rp.entries);
    const auto map = extract_map(plan);
    std::vector<double> best(rp.mu->size(), 0.0);
    for (const auto& e : plan.entries()) best[e.i] = std::max(best[e.i], e.mass);
    double off = 0.0;
    for (std::size_t i = 0; i < best.size(); ++i) off += rp.mu->weight(i) - best[i];
    CHECK(std::abs(map.nondeterministic_mass - off) <= 1e-9);
    CHECK(map.nondeterministic_mass >= 0.0);
    CHECK(map.nondeterministic_mass <= 1.0);
  }
}

TEST_CASE("improvement region") {
  const auto mu = line({0.0, 1.0});
  const auto nu = line({0.0, 1.0, 10.0});
  const auto c = CostFunction::euclidean(1);
  const Assignment t{2, 0};
  const Assignment t_tilde{1, 0};
  CHECK(improvement_region({}, t, t, c, *mu, *nu).empty());
  // Maps differ only at x = 0. For z = 1:
  // max{c(0, T(1)), c(1, T~(0))} = max{0, 0} < max{c(0, T~(0)), c(1, T(1))} = 1.
  CHECK(improvement_region({0}, t, t_tilde, c, *mu, *nu) == std::vector<std::size_t>{1});
  // x itself never qualifies: the left side contains c(x, T(x)) and c(x, T~(x)).
  CHECK(improvement_region({0}, t, t_tilde, c, *mu, *nu, 0.0).size() == 1);
  // A tolerance above the margin empties the region.
  CHECK(improvement_region({0}, t, t_tilde, c, *mu, *nu, 1.0).empty());
  CHECK_THROWS_AS(improvement_region({1}, t, t_tilde, c, *mu, *nu), std::invalid_argument);
  CHECK_THROWS_AS(improvement_region({0}, Assignment{0}, t_tilde, c, *mu, *nu),
                  std::invalid_argument);
}

TEST_CASE("uniqueness gap") {
  const auto mu = line({0.0, 1.0, 2.0}, {0.3, 0.3, 0.4});
  const auto nu = line({0.0, 5.0});
  const Assignment t{0, 1, 1};
  auto same = uniqueness_gap(t, t, 0, *mu, *nu);
  CHECK(same.gap == 0.0);
  CHECK(same.symmetric_gap == 0.0);
  const auto r = uniqueness_gap(t, Assignment{1, 1, 1}, 0, *mu, *nu);
  CHECK(r.gap == doctest::Approx(0.3));
  CHECK(r.symmetric_gap == doctest::Approx(0.3));
  const auto back = uniqueness_gap(Assignment{1, 1, 1}, t, 0, *mu, *nu);
  CHECK(back.gap == 0.0);
  CHECK(back.symmetric_gap == doctest::Approx(0.3));
  CHECK_THROWS_AS(uniqueness_gap(t, t, 2, *mu, *nu), std::out_of_range);
  CHECK(source_mass({0, 2}, *mu) == doctest::Approx(0.7));

  std::mt19937_64 rng(31);
  for (int k = 0; k < 100; ++k) {
    Assignment a(3), b(3);
    for (auto& v : a) v = rng() % 2;
    for (auto& v : b) v = rng() % 2;
    const auto g = uniqueness_gap(a, b, rng() % 2, *mu, *nu);
    CHECK(g.gap >= 0.0);
    CHECK(g.gap <= g.symmetric_gap + 1e-15);
    CHECK(g.symmetric_gap <= 1.0 + 1e-15);
  }
}
