#include <doctest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "fastlyap/cli.hpp"

using fastlyap::cli::run;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json json_of(const Result& r) { return nlohmann::json::parse(r.out); }

std::string data(const std::string& name) { return std::string(FASTLYAP_TEST_DATA) + "/" + name; }

}  // namespace

TEST_CASE("spectrum subcommand") {
  auto r = call({"spectrum", "--map", "gauss", "--psi", "power:2", "--alpha", "finite", "--which", "fast"});
  REQUIRE(r.code == 0);
  auto j = json_of(r);
  CHECK(j["dimension"].get<double>() == doctest::Approx(0.5).epsilon(0.01));
  CHECK(j["config"]["subcommand"] == "spectrum");
  CHECK(j["config"]["options"]["psi"] == "power:2");

  auto zero = json_of(call({"spectrum", "--map", "gauss", "--psi", "power:2", "--alpha", "0"}));
  CHECK(zero["dimension"].get<double>() == 1.0);

  auto exact = json_of(call({"spectrum", "--psi", "factorial_block", "--beta", "5", "--B", "4", "--b", "3", "--which", "upper"}));
  CHECK(exact["dimension"].get<double>() == 0.25);
}

TEST_CASE("map check on the builtin Renyi map") {
  auto r = call({"map", "check", "--map", "renyi"});
  REQUIRE(r.code == 0);
  auto j = json_of(r);
  CHECK(j["all_pass"] == true);
  CHECK(j["parabolic"] == true);
  CHECK(j["config"]["subcommand"] == "map check");
}

TEST_CASE("maps and tables loaded from files") {
  auto m = json_of(call({"map", "check", "--map", data("doubling.json")}));
  CHECK(m["map"] == "doubling");
  CHECK(m["all_pass"] == true);
  auto o = call({"orbit", "--map", data("doubling.json"), "--x", "1/3", "--depth", "4", "--format", "csv"});
  REQUIRE(o.code == 0);
  CHECK(o.out.find("2,1/3,1,") != std::string::npos);
  auto s = call({"spectrum", "--map", data("renyi.json"), "--psi", "exp:2", "--alpha", "inf"});
  CHECK(json_of(s)["dimension"].get<double>() == doctest::Approx(1.0 / 3));
  auto t = call({"scaling", "--psi", "table:" + data("psi_small.csv"), "--horizon", "8"});
  REQUIRE(t.code == 0);
  CHECK(json_of(t)["B"]["window"].get<double>() == doctest::Approx(2.0));
  CHECK(call({"scaling", "--psi", "table:" + data("psi_small.csv"), "--horizon", "20"}).code == 1);
}

TEST_CASE("exit codes and messages") {
  auto bad_flag = call({"orbit", "--x", "1/3", "--bogus", "1"});
  CHECK(bad_flag.code == 2);
  CHECK(bad_flag.err.find("--bogus") != std::string::npos);
  auto missing = call({"orbit", "--bogus", "1"});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("--bogus") != std::string::npos);
  auto unknown = call({"--format", "csv", "bogus"});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("bogus") != std::string::npos);
  auto domain = call({"orbit", "--x", "1/2", "--depth", "3"});
  CHECK(domain.code == 1);
  CHECK(domain.err.find("exceptional") != std::string::npos);
  CHECK(call({"spectrum", "--alpha", "sideways"}).code != 0);
  CHECK(call({"count-oracle", "--n", "9"}).code == 1);
  CHECK(call({"--help"}).code == 0);
}

TEST_CASE("digit outputs") {
  CHECK(call({"dset", "--b", "2", "--c", "2", "--depth", "4"}).out == "4,4,16,256\n");
  CHECK(call({"eset", "--s", "e", "--t", "e", "--depth", "5"}).out == "3,8,21,55,149\n");
  auto j = json_of(call({"eset", "--s", "exp:2", "--t", "exp:2", "--depth", "4", "--format", "json"}));
  CHECK(j["config"]["subcommand"] == "eset");
  auto c = json_of(call({"count-oracle", "--n", "1", "--k", "1"}));
  CHECK(c["count"] == 2);
  auto code = json_of(call({"code", "--decode", "1", "--tolerance", "1e-9"}));
  CHECK(std::fabs(code["point"].get<double>() - 0.6180339887498949) < 1e-9);
}

TEST_CASE("determinism and config echo") {
  std::vector<std::vector<std::string>> runs = {
      {"exponent", "--map", "gauss", "--random", "8", "--seed", "7", "--depth", "20"},
      {"gpsi", "--psi", "alternating:2:4", "--horizon", "100", "--b", "2"},
      {"gpsi", "--psi", "power:2", "--method", "appendix", "--horizon", "200"},
      {"eset", "dim", "--depth", "3"},
      {"cylinder", "--max-length", "2", "--max-digit", "3", "--workers", "2"},
  };
  for (const auto& args : runs) {
    auto a = call(args), b = call(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(json_of(a).contains("config"));
    CHECK(json_of(a)["config"].contains("seed"));
  }
  auto seven = call(runs[0]);
  auto other = runs[0];
  other[6] = "8";
  CHECK(call(other).out != seven.out);
}
