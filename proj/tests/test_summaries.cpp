#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bmr/special_math.hpp"
#include "bmr/summaries.hpp"

using namespace bmr;

namespace {

Chain chain_of(const std::vector<Eigen::VectorXd>& draws,
               std::vector<std::string> names) {
  Chain c;
  c.param_names = std::move(names);
  c.draws = draws;
  c.log_target.assign(draws.size(), 0.0);
  c.n_keep = draws.size();
  return c;
}

Chain chain_1d(const std::vector<double>& xs) {
  std::vector<Eigen::VectorXd> draws;
  draws.reserve(xs.size());
  for (double x : xs) draws.push_back(Eigen::VectorXd::Constant(1, x));
  return chain_of(draws, {"x"});
}

}  // namespace

TEST_CASE("hpd of a standard normal sample") {
  Rng rng(801);
  std::vector<double> xs(100000);
  for (auto& x : xs) x = rng.normal();
  const auto [lo, hi] = hpd_interval(xs, 0.95);
  CHECK(std::abs(lo + 1.96) < 0.06);
  CHECK(std::abs(hi - 1.96) < 0.06);

  std::sort(xs.begin(), xs.end());
  const double et_lo = xs[static_cast<std::size_t>(0.025 * xs.size())];
  const double et_hi = xs[static_cast<std::size_t>(0.975 * xs.size()) - 1];
  CHECK(hi - lo <= et_hi - et_lo + 1e-12);
}

TEST_CASE("hpd of an exponential sample hugs the support edge") {
  Rng rng(803);
  std::vector<double> xs(100000);
  for (auto& x : xs) x = rng.exponential();
  const auto [lo, hi] = hpd_interval(xs, 0.95);
  CHECK(lo <= 0.01);  // equal-tail would start near 0.025
  CHECK(std::abs(hi - 2.996) < 0.1);  // -ln 0.05

  // and it is never wider than the equal-tail interval
  std::sort(xs.begin(), xs.end());
  const double et_lo = xs[static_cast<std::size_t>(0.025 * xs.size())];
  const double et_hi = xs[static_cast<std::size_t>(0.975 * xs.size()) - 1];
  CHECK(hi - lo <= et_hi - et_lo + 1e-12);
}

TEST_CASE("constant chain summary is degenerate") {
  const std::vector<Chain> chains{chain_1d(std::vector<double>(500, 3.25))};
  const auto summary = posterior_summary(chains);
  CHECK(summary[0].mean == doctest::Approx(3.25));
  CHECK(summary[0].sd == 0.0);
  CHECK(summary[0].hpd_lo == 3.25);
  CHECK(summary[0].hpd_hi == 3.25);
  CHECK_FALSE(summary[0].hpd_ambiguous);
}

TEST_CASE("summary pooling is order invariant") {
  Rng rng(805);
  std::vector<double> a(3000), b(3000);
  for (auto& x : a) x = rng.normal();
  for (auto& x : b) x = rng.normal() + 0.3;
  const std::vector<Chain> ab{chain_1d(a), chain_1d(b)};
  const std::vector<Chain> ba{chain_1d(b), chain_1d(a)};
  const auto s1 = posterior_summary(ab);
  const auto s2 = posterior_summary(ba);
  CHECK(s1[0].mean == s2[0].mean);
  CHECK(s1[0].sd == s2[0].sd);
  CHECK(s1[0].hpd_lo == s2[0].hpd_lo);
  CHECK(s1[0].hpd_hi == s2[0].hpd_hi);
}

TEST_CASE("a well separated bimodal pool flags hpd ambiguity") {
  Rng rng(807);
  std::vector<double> xs;
  for (int i = 0; i < 5000; ++i) xs.push_back(0.0 + 0.01 * rng.normal());
  for (int i = 0; i < 5000; ++i) xs.push_back(10.0 + 0.01 * rng.normal());
  const std::vector<Chain> chains{chain_1d(xs)};
  const auto summary = posterior_summary(chains);
  CHECK(summary[0].hpd_ambiguous);

  Rng rng2(809);
  std::vector<double> uni(10000);
  for (auto& x : uni) x = rng2.normal();
  const auto s2 = posterior_summary({chain_1d(uni)});
  CHECK_FALSE(s2[0].hpd_ambiguous);
}

TEST_CASE("chain covariance on degenerate and independent components") {
  // draws on the line b1 = -b0: perfect negative correlation
  Rng rng(811);
  std::vector<Eigen::VectorXd> line;
  for (int i = 0; i < 2000; ++i) {
    const double t = rng.normal();
    Eigen::VectorXd v(2);
    v << t, -t;
    line.push_back(v);
  }
  const Eigen::MatrixXd cov =
      chain_covariance({chain_of(line, {"b0", "b1"})});
  CHECK(cov(0, 1) ==
        doctest::Approx(-std::sqrt(cov(0, 0) * cov(1, 1))).epsilon(1e-12));

  // independent components: off-diagonals near zero
  std::vector<Eigen::VectorXd> ind;
  for (int i = 0; i < 200000; ++i) {
    Eigen::VectorXd v(2);
    v << rng.normal(), rng.normal();
    ind.push_back(v);
  }
  const Eigen::MatrixXd cov2 =
      chain_covariance({chain_of(ind, {"b0", "b1"})});
  CHECK(std::abs(cov2(0, 1)) < 0.01);

  // symmetric positive semidefinite
  CHECK(cov2(0, 1) == cov2(1, 0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov2);
  CHECK(es.eigenvalues().minCoeff() >= -1e-12);
}

TEST_CASE("scaled inverse covariance is N times the chain covariance") {
  Rng rng(813);
  std::vector<double> xs(1000);
  for (auto& x : xs) x = rng.normal();
  const Chain c = chain_1d(xs);
  const Eigen::MatrixXd cov = chain_covariance({c});
  const Eigen::MatrixXd scaled = scaled_inverse_cov({c});
  CHECK(scaled(0, 0) == doctest::Approx(1000.0 * cov(0, 0)).epsilon(1e-12));

  // duplicating the chain doubles the scaling but not the covariance
  const Eigen::MatrixXd cov2 = chain_covariance({c, c});
  const Eigen::MatrixXd scaled2 = scaled_inverse_cov({c, c});
  CHECK(cov2(0, 0) == doctest::Approx(cov(0, 0)).epsilon(1e-3));
  CHECK(scaled2(0, 0) ==
        doctest::Approx(2000.0 * cov2(0, 0)).epsilon(1e-12));
}

TEST_CASE("summary report fills the fixed json schema") {
  Rng rng(815);
  std::vector<double> xs(500);
  for (auto& x : xs) x = rng.normal();
  const SummaryReport rep = summarize_chains({chain_1d(xs)}, "pbmr", 7);
  const std::string json = summary_json(rep);
  for (const char* key :
       {"\"params\"", "\"name\"", "\"mean\"", "\"sd\"", "\"hpd95\"",
        "\"acceptance\"", "\"ess\"", "\"geweke_z\"", "\"seed\"",
        "\"method\"", "\"n_chains\""})
    CHECK(json.find(key) != std::string::npos);
  CHECK(json.find("\"method\": \"pbmr\"") != std::string::npos);
  CHECK(json.find("\"seed\": 7") != std::string::npos);

  const std::string table = summary_table(rep);
  CHECK(table.find("pbmr") != std::string::npos);
  CHECK(table.find("95% HPD") != std::string::npos);
}

TEST_CASE("pooling rejects mismatched layouts and empty input") {
  const Chain a = chain_1d({1.0, 2.0, 3.0});
  Chain b = chain_1d({1.0, 2.0});
  b.param_names = {"y"};
  CHECK_THROWS_AS(posterior_summary({a, b}), std::invalid_argument);
  CHECK_THROWS_AS(posterior_summary({}), std::invalid_argument);
  CHECK_THROWS_AS(chain_covariance({chain_1d({1.0})}),
                  std::invalid_argument);
}
