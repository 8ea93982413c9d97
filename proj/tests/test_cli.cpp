#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qot/cli.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args, std::optional<std::string> env_seed = std::nullopt) {
  std::ostringstream out, err;
  const int code = qot::cli::run(args, out, err, [&](const std::string& name) -> std::optional<std::string> {
    if (name == "QOT_SEED") return env_seed;
    return std::nullopt;
  });
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream is(text);
  std::string l;
  while (std::getline(is, l)) v.push_back(l);
  return v;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("run writes a transcript ending in a conclusion") {
  const auto r = invoke({"run", "--n", "100", "--delta", "1", "--b", "0", "--seed", "7"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 6);
  const auto last = nlohmann::json::parse(ls.back());
  CHECK(last["event"] == "concluded");
  CHECK(last.contains("outcome"));
  for (const auto& l : ls) {
    const auto j = nlohmann::json::parse(l);
    CHECK(j.contains("event"));
    CHECK(j.contains("t"));
  }
}

TEST_CASE("run usage errors") {
  CHECK(invoke({"run", "--n", "1", "--delta", "1"}).code == 2);
  CHECK(invoke({"run", "--b", "2"}).code == 2);
  CHECK(invoke({"run", "--format", "csv"}).code == 2);
  CHECK(invoke({"run", "--p-loss", "1.5"}).code == 2);
  CHECK(invoke({"run", "--adversary", "sneaky"}).code == 2);
  CHECK(invoke({"bogus"}).code == 2);
  CHECK(invoke({}).code == 2);
}

TEST_CASE("aborts are data, not failures") {
  const auto r = invoke({"run", "--n", "20", "--p-loss", "1"});
  CHECK(r.code == 0);
  CHECK(r.out.find("\"outcome\":\"abort\"") != std::string::npos);
}

TEST_CASE("seed resolution") {
  const auto explicit_seed = invoke({"run", "--n", "50", "--seed", "9"});
  const auto env_seed = invoke({"run", "--n", "50"}, "9");
  CHECK(explicit_seed.out == env_seed.out);
  const auto default_seed = invoke({"run", "--n", "50"});
  const auto default_explicit = invoke({"run", "--n", "50", "--seed", "12345"});
  CHECK(default_seed.out == default_explicit.out);
  CHECK(invoke({"run"}, "not-a-number").code == 2);
}

TEST_CASE("tracedist csv") {
  const auto r = invoke({"tracedist", "--n", "1,2", "--delta", "1"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 3);
  CHECK(ls[0] == "n,delta,trace_distance");
  CHECK(ls[1] == "1,1,1");
  const double d2 = std::stod(ls[2].substr(ls[2].rfind(',') + 1));
  CHECK(std::abs(d2 - std::sqrt(5.0) / 3.0) < 1e-12);

  const auto big = invoke({"tracedist", "--n", "1000", "--delta", "1"});
  const double d = std::stod(lines(big.out)[1].substr(7));
  CHECK(std::abs(d - 0.637) < 1e-3);

  CHECK(invoke({"tracedist", "--n", "1..30"}).out == invoke({"tracedist", "--n", "1..30"}).out);
  CHECK(lines(invoke({"tracedist", "--n", "1..30"}).out).size() == 31);
  CHECK(invoke({"tracedist", "--n", "1", "--delta", "2"}).code == 2);
  CHECK(invoke({"tracedist", "--n", "2", "--delta", "2", "--window", "restricted"}).code == 2);
  CHECK(invoke({"tracedist"}).code == 2);
  CHECK(invoke({"tracedist", "--n", "5,3"}).code == 2);
}

TEST_CASE("tracedist writes byte-identical files") {
  const auto dir = std::filesystem::temp_directory_path() / "qot_cli_test";
  std::filesystem::create_directories(dir);
  const auto a = (dir / "a.csv").string();
  const auto b = (dir / "b.csv").string();
  REQUIRE(invoke({"tracedist", "--n", "1..50", "--out", a}).code == 0);
  REQUIRE(invoke({"tracedist", "--n", "1..50", "--out", b}).code == 0);
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).size() > 100);
  std::filesystem::remove_all(dir);
}

TEST_CASE("helstrom json") {
  const auto r = invoke({"helstrom", "--n", "1000"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::ordered_json::parse(r.out);
  CHECK(std::abs(j["u"].get<double>() - 0.137) < 2e-3);
  CHECK(std::abs(j["R_bar"].get<double>() - 0.819) < 1e-3);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"n", "delta", "D", "p", "u", "R_bar"});

  const auto one = nlohmann::json::parse(invoke({"helstrom", "--n", "1"}).out);
  CHECK(one["u"].get<double>() == doctest::Approx(0.5));
  CHECK(invoke({"helstrom"}).code == 2);
  CHECK(invoke({"helstrom", "--n", "1", "--window", "restricted"}).code == 2);
  const auto restricted = nlohmann::json::parse(invoke({"helstrom", "--n", "1000", "--window", "restricted"}).out);
  CHECK(std::abs(restricted["D"].get<double>() - j["D"].get<double>()) < 1e-6);
}

TEST_CASE("montecarlo") {
  const auto r = invoke({"montecarlo", "--n", "30", "--trials", "20000"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(std::abs(j["avg_reliability"].get<double>() - 0.75) < 0.01);

  const auto attack = nlohmann::json::parse(
      invoke({"montecarlo", "--n", "30", "--trials", "2000", "--adversary", "store-and-wait", "--lifetime", "2T"}).out);
  CHECK(attack["p_conclusive"].get<double>() == 1.0);
  CHECK(attack["u_hat"].get<double>() == 0.5);

  CHECK(invoke({"montecarlo", "--trials", "0"}).code == 2);
  CHECK(invoke({"montecarlo", "--n", "30", "--trials", "10", "--b", "x"}).code == 2);
}

TEST_CASE("montecarlo noise grid csv") {
  const auto r = invoke({"montecarlo", "--n", "20", "--trials", "2000", "--p-loss", "0,0.5", "--p-dark", "0,1"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 5);
  CHECK(ls[0] == "p_loss,p_dark,abort_rate,p_conclusive,avg_reliability");
  CHECK(invoke({"montecarlo", "--n", "20", "--trials", "20", "--p-loss", "0,0.5", "--format", "json"}).code == 2);
}

TEST_CASE("config file") {
  const auto path = (std::filesystem::temp_directory_path() / "qot_cli_config.json").string();
  {
    std::ofstream f(path);
    f << R"({"adversary": {"bob_strategy": "store_and_wait", "memory_lifetime": 500, "announce_delay": 100}})";
  }
  const auto j = nlohmann::json::parse(invoke({"montecarlo", "--n", "20", "--trials", "1000", "--config", path}).out);
  CHECK(j["p_conclusive"].get<double>() == 1.0);
  {
    std::ofstream f(path);
    f << R"({"noise": {"p_loss": "lots"}})";
  }
  CHECK(invoke({"run", "--n", "20", "--config", path}).code == 2);
  std::filesystem::remove(path);
  CHECK(invoke({"run", "--n", "20", "--config", path}).code == 2);
}

TEST_CASE("list and lifetime parsing") {
  CHECK(qot::cli::parse_int_list("1..3,7") == std::vector<int>{1, 2, 3, 7});
  CHECK(qot::cli::parse_lifetime("2T", 100.0) == 200.0);
  CHECK(qot::cli::parse_lifetime("0.5T", 100.0) == 50.0);
  CHECK(qot::cli::parse_lifetime("150", 100.0) == 150.0);
  CHECK_THROWS(qot::cli::parse_int_list("1,,2"));
  CHECK_THROWS(qot::cli::parse_int_list("5..2"));
}

}
