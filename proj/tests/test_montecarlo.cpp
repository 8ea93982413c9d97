#include "doctest.h"

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "qot/montecarlo.hpp"

using namespace qot;

namespace {

ExperimentSpec small_spec(std::int64_t trials, std::uint64_t seed = 42) {
  ExperimentSpec s;
  s.trials = trials;
  s.seed = seed;
  s.geometry = ProtocolGeometry(30, 1);
  return s;
}

std::string as_json(const ExperimentStats& s) {
  std::ostringstream os;
  write_json(os, s);
  return os.str();
}

}  // namespace

TEST_SUITE("montecarlo") {

TEST_CASE("mutual information estimator") {
  std::vector<std::pair<int, int>> constant, identity, independent;
  std::mt19937_64 rng(1);
  std::bernoulli_distribution coin(0.5);
  for (int i = 0; i < 20000; ++i) {
    const int b = coin(rng) ? 1 : 0;
    constant.emplace_back(7, b);
    identity.emplace_back(b, b);
    independent.emplace_back(coin(rng) ? 1 : 0, b);
  }
  CHECK(mutual_information_bits(constant) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(mutual_information_bits(identity) - 1.0) < 1e-3);
  CHECK(mutual_information_bits(independent) < 1e-3);
  CHECK(mutual_information_bits(independent) >= 0.0);

  std::vector<std::pair<int, int>> few(999, {0, 0});
  CHECK_THROWS_AS(mutual_information_bits(few), InvalidInput);
}

TEST_CASE("spec validation") {
  auto s = small_spec(0);
  CHECK_THROWS_AS(run_experiment(s), InvalidInput);
  s = small_spec(10);
  s.b_policy = BitPolicy::fixed(3);
  CHECK_THROWS_AS(run_experiment(s), InvalidInput);
}

TEST_CASE("parallel and serial paths agree bit for bit") {
  auto s = small_spec(20000);
  s.noise = {0.05, 0.02};
  CHECK(as_json(run_experiment(s)) == as_json(run_experiment_serial(s)));
  CHECK(as_json(run_experiment(s)) == as_json(run_experiment(s)));
  auto other = s;
  other.seed = 43;
  CHECK(as_json(run_experiment(other)) != as_json(run_experiment(s)));
}

TEST_CASE("honest statistics") {
  const auto st = run_experiment(small_spec(100000));
  CHECK(st.aborted == 0);
  CHECK(st.wrong_conclusive == 0);
  CHECK(st.reliability_conclusive == 1.0);
  CHECK(std::abs(st.p_conclusive - 0.5) < 0.005);
  CHECK(std::abs(st.avg_reliability - 0.75) < 0.005);
  CHECK(st.avg_reliability == doctest::Approx(st.p_conclusive * 1.0 + (1 - st.p_conclusive) * 0.5).epsilon(1e-12));
  CHECK(std::abs(st.u_hat) < 0.005);
  CHECK(std::abs(st.v_hat) < 0.005);
  CHECK(st.match_detector_violations == 0);
  CHECK(st.match_clicks == st.conclusive);
  CHECK(st.mismatch_mi_bits < 0.01);
  CHECK(st.mismatch_joint_mi_bits < 0.01);
  CHECK(st.bob_to_alice_messages == 0);
  CHECK(std::isnan(st.guess_reliability));
}

TEST_CASE("estimators tighten as trials grow") {
  for (std::int64_t trials : {1000, 10000, 100000}) {
    const auto st = run_experiment(small_spec(trials, 900 + static_cast<std::uint64_t>(trials)));
    const double band = 4.0 * 0.5 / std::sqrt(static_cast<double>(trials));
    CHECK(std::abs(st.u_hat) < band);
    CHECK(std::abs(st.v_hat) < band);
  }
}

TEST_CASE("store-and-wait with long memory") {
  auto s = small_spec(5000);
  s.adversary = {BobStrategy::StoreAndWait, 200.0, 100.0};
  const auto st = run_experiment(s);
  CHECK(st.p_conclusive == 1.0);
  CHECK(st.u_hat == 0.5);
  CHECK(st.reliability_conclusive == 1.0);
}

TEST_CASE("immediate guess: half right on the mismatch branch") {
  auto s = small_spec(40000);
  s.adversary.bob_strategy = BobStrategy::ImmediateGuess;
  const auto st = run_experiment(s);
  CHECK(std::abs(st.guess_reliability - 0.5) < 0.015);
  CHECK(std::abs(st.p_conclusive - 0.5) < 0.01);
}

TEST_CASE("noise sensitivity") {
  const std::vector<double> losses{0.0, 0.25, 0.5, 1.0};
  const std::vector<double> darks{0.0, 0.1, 1.0};
  const auto grid = noise_sensitivity(small_spec(20000), losses, darks);
  REQUIRE(grid.size() == 12);
  auto at = [&](std::size_t i, std::size_t j) { return grid[i * darks.size() + j].stats; };
  CHECK(at(0, 0).abort_rate == 0.0);
  CHECK(std::abs(at(2, 0).abort_rate - 0.5) < 0.01);
  CHECK(at(0, 2).abort_rate == 1.0);
  for (std::size_t i = 0; i < losses.size(); ++i) {
    for (std::size_t j = 0; j < darks.size(); ++j) {
      if (i > 0) CHECK(at(i, j).abort_rate >= at(i - 1, j).abort_rate);
      if (j > 0) CHECK(at(i, j).abort_rate >= at(i, j - 1).abort_rate);
    }
    if (losses[i] < 1.0) CHECK(at(i, 0).reliability_conclusive == 1.0);
  }

  std::ostringstream os;
  write_csv(os, grid);
  CHECK(os.str().rfind("p_loss,p_dark,abort_rate,p_conclusive,avg_reliability\n0,0,0,", 0) == 0);
  CHECK_THROWS_AS(noise_sensitivity(small_spec(10), std::vector<double>{}, darks), InvalidInput);
}

TEST_CASE("stats json keys") {
  const auto j = nlohmann::json::parse(as_json(run_experiment(small_spec(2000))));
  for (const char* k : {"trials", "p_conclusive", "p_conclusive_band", "reliability_conclusive", "avg_reliability",
                        "v_hat", "u_hat", "abort_rate", "mismatch_mi_bits", "counts"})
    CHECK(j.contains(k));
  CHECK(j["guess_reliability"].is_null());
}

TEST_CASE("two proportion z") {
  CHECK(two_proportion_z(0.5, 100, 0.5, 100) == 0.0);
  CHECK(two_proportion_z(0.6, 10000, 0.5, 10000) > 10.0);
  CHECK_THROWS_AS(two_proportion_z(0.5, 0, 0.5, 1), InvalidInput);
}

}
