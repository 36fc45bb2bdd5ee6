#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "sparsever/scoring.hpp"

using namespace sparsever;

namespace {

FeatureVector fv(Vector v, std::string id = "s") { return {std::move(v), "face", std::move(id)}; }

Vector e(Eigen::Index n, Eigen::Index i) { return Vector::Unit(n, i); }

// Class "a" = {e0, e1}, class "b" = {e2}, in R^3.
Dictionary tiny() {
  return Dictionary::build({{"a", {fv(e(3, 0)), fv(e(3, 1))}}, {"b", {fv(e(3, 2))}}});
}

SparseCode code_of(std::initializer_list<double> v) {
  SparseCode c;
  c.coefficients.resize(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) c.coefficients(i++) = x;
  return c;
}

Dictionary random_dict(std::size_t classes, std::size_t per, Eigen::Index dim, std::mt19937_64& rng) {
  const Matrix A = oracle::random_unit_columns(dim, static_cast<Eigen::Index>(classes * per), rng);
  std::vector<ClassBlock> blocks;
  for (std::size_t c = 0; c < classes; ++c) {
    ClassBlock b{"K" + std::to_string(c), {}};
    for (std::size_t s = 0; s < per; ++s) b.samples.push_back(fv(A.col(static_cast<Eigen::Index>(c * per + s))));
    blocks.push_back(std::move(b));
  }
  return Dictionary::build(std::move(blocks));
}

}  // namespace

TEST_CASE("SCE and SCR by hand") {
  const Dictionary d = tiny();
  const SparseCode c = code_of({0.5, -0.2, 0.3});
  Vector y(3);
  y << 0.5, -0.2, 0.3;
  // Keeping class a leaves (0, 0, 0.3); keeping b leaves (0.5, -0.2, 0).
  CHECK(sce(d, c, y, "a").value == doctest::Approx(0.3));
  CHECK(sce(d, c, y, "b").value == doctest::Approx(std::sqrt(0.29)));
  CHECK(scr(c, d, "a").value == doctest::Approx(0.7));
  CHECK(scr(c, d, "b").value == doctest::Approx(0.3));
  const auto all = sce_all(d, c, y);
  CHECK(all[0] == sce(d, c, y, "a").value);
  CHECK(all[1] == sce(d, c, y, "b").value);
  CHECK(sce(d, c, y, "a").polarity() == Polarity::kDistance);
  CHECK(scr(c, d, "a").polarity() == Polarity::kSimilarity);
}

TEST_CASE("SCR shares sum to one for any nonzero code") {
  std::mt19937_64 rng(4);
  const Dictionary d = random_dict(7, 3, 5, rng);
  std::uniform_real_distribution<double> u(-1, 1);
  std::bernoulli_distribution keep(0.3);
  for (int t = 0; t < 200; ++t) {
    SparseCode c;
    c.coefficients = Vector::Zero(d.column_count());
    for (Eigen::Index j = 0; j < c.coefficients.size(); ++j)
      if (keep(rng)) c.coefficients(j) = u(rng);
    if (c.coefficients.isZero(0)) c.coefficients(0) = 0.1;
    const auto s = scr_all(c, d);
    CHECK(std::accumulate(s.begin(), s.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (double v : s) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("SCR of an all-zero code is undefined") {
  const Dictionary d = tiny();
  const SparseCode zero = code_of({0, 0, 0});
  try {
    scr(zero, d, "a");
    FAIL("expected undefined score");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::kUndefinedScore);
  }
  CHECK_THROWS_AS(scr_all(zero, d), Error);
  // SCE stays defined: every class leaves the full query.
  for (double v : sce_all(d, zero, e(3, 1))) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("decision rules at the threshold") {
  const MatchScore s{"a", Metric::kSce, 0.4};
  CHECK(decide_sce(s, 0.4).accepted());
  CHECK_FALSE(decide_sce(s, 0.39).accepted());
  const MatchScore r{"a", Metric::kScr, 0.4};
  CHECK_FALSE(decide_scr(r, 0.4).accepted());
  CHECK(decide_scr(r, 0.39).accepted());
  CHECK(decide(s, 0.4).accepted());
  CHECK_FALSE(decide(r, 0.4).accepted());
  try {
    decide_sce(r, 0.5);
    FAIL("expected metric mismatch");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::kMetricMismatch);
  }
  CHECK_THROWS_AS(decide_scr(s, 0.5), Error);
}

TEST_CASE("cosine baseline takes the best sample of the class") {
  Vector y(2);
  y << 1, 1;
  const ClassBlock b{"a", {fv(e(2, 0)), fv(Vector::Ones(2) * 3.0)}};
  CHECK(cosine_best_match(y, b).value == doctest::Approx(1.0));
  const Dictionary d = Dictionary::build({b, {"b", {fv(-Vector::Ones(2))}}});
  const auto all = cosine_all(d, y);
  CHECK(all[0] == doctest::Approx(1.0));
  CHECK(all[1] == doctest::Approx(-1.0));
}

TEST_CASE("score_query codes the normalized query once for all metrics") {
  std::mt19937_64 rng(6);
  const Dictionary d = random_dict(5, 4, 12, rng);
  const Vector q = 7.0 * oracle::random_unit(12, rng);
  const SolverConfig cfg;
  int calls = 0;
  const SolveFn counting = [&](const Matrix& A, const Vector& y, const SolverConfig& c) {
    ++calls;
    CHECK(y.norm() == doctest::Approx(1.0));
    return default_solve(A, y, c);
  };
  const Metric all[] = {Metric::kSce, Metric::kScr, Metric::kCosine};
  const auto multi = score_query(d, q, all, cfg, counting);
  CHECK(calls == 1);
  CHECK(multi[0] == score_query(d, q, Metric::kSce, cfg));
  CHECK(multi[1] == score_query(d, q, Metric::kScr, cfg));
  CHECK(multi[2] == score_query(d, q, Metric::kCosine, cfg));

  // An all-zero code leaves SCR undefined but SCE usable.
  const SolveFn zero = [](const Matrix& A, const Vector&, const SolverConfig&) {
    SparseCode c;
    c.coefficients = Vector::Zero(A.cols());
    return c;
  };
  const auto z = score_query(d, q, all, cfg, zero);
  CHECK(z[1].empty());
  CHECK(z[0].size() == 5);
  CHECK_THROWS_AS(score_query(d, Vector::Ones(3), Metric::kSce, cfg), Error);
}

TEST_CASE("a gallery sample is its own best match") {
  std::mt19937_64 rng(7);
  const Dictionary d = random_dict(6, 3, 40, rng);
  const SolverConfig cfg;
  for (std::size_t c = 0; c < d.class_count(); ++c) {
    const Vector y = d.block_matrix(c).col(1);
    for (Metric m : {Metric::kSce, Metric::kScr, Metric::kCosine}) {
      const auto s = score_query(d, y, m, cfg);
      CHECK(rank_classes(s, polarity_of(m)).front() == c);
    }
  }
}

TEST_CASE("ranking is stable on ties") {
  const std::vector<double> s{0.3, 0.1, 0.3, 0.1};
  CHECK(rank_classes(s, Polarity::kDistance) == std::vector<std::size_t>{1, 3, 0, 2});
  CHECK(rank_classes(s, Polarity::kSimilarity) == std::vector<std::size_t>{0, 2, 1, 3});
}

TEST_CASE("metric names") {
  CHECK(parse_metric("SCE") == Metric::kSce);
  CHECK(parse_metric("scr") == Metric::kScr);
  CHECK(parse_metric("Cosine") == Metric::kCosine);
  CHECK_THROWS_AS(parse_metric("l2"), Error);
  CHECK(to_string(Metric::kScr) == "scr");
  CHECK(polarity_of(Metric::kCosine) == Polarity::kSimilarity);
}
