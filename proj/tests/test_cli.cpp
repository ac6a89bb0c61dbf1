#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

#include "schottky/cli.hpp"
#include "schottky/group_io.hpp"
#include "schottky/kernels.hpp"
#include "test_support.hpp"

using namespace schottky;
using nlohmann::json;

namespace {

const std::string kData = SCHOTTKY_TEST_DATA;

struct Captured {
  int code;
  std::string out;
  std::string err;
};

Captured invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "schottky_cli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("group files parse both generator forms") {
  const SchottkyGroup file = read_group(kData + "/g2.json");
  const SchottkyGroup ref = testing::g2();
  for (int r = 1; r <= 2; ++r) CHECK(file.generator(r).distance(ref.generator(r)) < 1e-15);

  const SchottkyGroup annulus = read_group(kData + "/rank1.json");
  CHECK(std::abs(annulus.fixed_data(1).multiplier - Complex(0.1)) < 1e-15);

  const SchottkyGroup g3 = read_group(kData + "/g3.json");
  CHECK(g3.is_normalized());
}

TEST_CASE("group files round trip") {
  const SchottkyGroup g = testing::g3();
  const SchottkyGroup back = build_group(parse_group_spec(json::parse(group_to_json(g).dump())));
  for (int r = 1; r <= 3; ++r) {
    CHECK(back.generator(r).distance(g.generator(r)) < 1e-12);
    CHECK(std::abs(back.circle(r).center - g.circle(r).center) < 1e-15);
    CHECK(back.circle(-r).orientation == g.circle(-r).orientation);
  }
}

TEST_CASE("group file errors are input errors") {
  auto kind_of = [](const std::string& text) {
    try {
      parse_group_spec(json::parse(text));
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Inconclusive;
  };
  CHECK(kind_of(R"({"generators": []})") == ErrorKind::InvalidInput);
  CHECK(kind_of(R"({"g": 1, "generators": []})") == ErrorKind::InvalidInput);
  CHECK(kind_of(R"({"g": 1, "generators": [{"a": [1, 0]}]})") == ErrorKind::InvalidInput);
  CHECK(kind_of(R"({"g": 1, "generators": [{"a": 1, "b": 0, "c": 0, "d": 0}]})") == ErrorKind::InvalidInput);
  CHECK(kind_of(R"({"g": 1, "generators": [{"fixed_attracting": 0, "fixed_repelling": "inf", "multiplier": 2}]})") ==
        ErrorKind::InvalidMultiplier);
  CHECK(kind_of(R"({"g": 1, "generators": [{"a": 2, "b": 0, "c": 0, "d": 0.5}], "circles": [{"center": 0, "radius": 1}]})") ==
        ErrorKind::InvalidInput);
  CHECK(kind_of(R"({"g": 1, "generators": [{"a": 2, "b": 0, "c": 0, "d": 0.5}], "normalize": "yes"})") ==
        ErrorKind::InvalidInput);
}

TEST_CASE("word parsing") {
  CHECK(cli::parse_word("1,-2,1") == Word{1, -2, 1});
  CHECK(cli::parse_word("2,1,-1") == Word{2});
  CHECK_THROWS_AS(cli::parse_word("1,,2"), Error);
  CHECK_THROWS_AS(cli::parse_word("1,0"), Error);
  CHECK_THROWS_AS(cli::parse_word("x"), Error);
  CHECK_THROWS_AS(cli::parse_word("1,-1"), Error);
}

TEST_CASE("torus-check on the square torus") {
  const Captured r = invoke({"torus-check", "--tau", "0.0", "1.0"});
  CHECK(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["result"]["residual"].get<double>() < 1e-12);
  CHECK(j["diagnostics"].contains("maxlen"));
  CHECK(j["diagnostics"].contains("tail_estimate"));
  CHECK(j["diagnostics"].contains("seed"));
}

TEST_CASE("classes row count matches a brute-force count") {
  const Captured r = invoke({"classes", "--group", kData + "/g2.json", "--maxlen", "6", "--format", "csv"});
  REQUIRE(r.code == 0);
  const auto lines = std::count(r.out.begin(), r.out.end(), '\n');

  // Cyclically reduced, not a proper power, one entry per rotation class.
  std::set<Word> classes;
  for (const Word& w : enumerate_words(2, 6)) {
    if (w.empty() || w.front() == -w.back()) continue;
    bool power = false;
    for (std::size_t d = 1; d < w.size() && !power; ++d) {
      if (w.size() % d) continue;
      power = std::equal(w.begin() + d, w.end(), w.begin());
    }
    if (power) continue;
    Word best = w;
    Word rot = w;
    for (std::size_t i = 0; i < w.size(); ++i) {
      std::rotate(rot.begin(), rot.begin() + 1, rot.end());
      if (lex_less(rot, best)) best = rot;
    }
    classes.insert(best);
  }
  CHECK(lines == static_cast<long>(classes.size()) + 1);
  CHECK(r.out.rfind("word,length,multiplier_re,multiplier_im,abs_multiplier,maxlen,tail_estimate,seed\n", 0) == 0);
}

TEST_CASE("fn output is identical across thread counts") {
  const std::vector<std::string> base{"fn", "--group", kData + "/g2.json", "--n", "2", "--maxlen", "12", "--tol", "1e-10"};
  auto one = base;
  one.insert(one.end(), {"--threads", "1"});
  auto eight = base;
  eight.insert(eight.end(), {"--threads", "8"});
  const Captured a = invoke(one);
  const Captured b = invoke(eight);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const json j = json::parse(a.out);
  CHECK(j["result"]["tail_estimate"].get<double>() <= 1e-10);
}

TEST_CASE("exit codes") {
  CHECK(invoke({"bogus"}).code == 1);
  CHECK(invoke({"eta"}).code == 1);
  CHECK(invoke({"eta", "--tau", "0", "-1"}).code == 1);
  CHECK(invoke({"fn", "--group", kData + "/missing.json"}).code == 1);
  CHECK(invoke({"fn", "--group", kData + "/g2.json", "--maxlen", "0"}).code == 1);
  CHECK(invoke({"fn", "--group", kData + "/g2.json", "--tol", "-1"}).code == 1);
  CHECK(invoke({"kernels", "--group", kData + "/g2.json", "--z", "0", "0"}).code == 1);
  CHECK(invoke({"--help"}).code == 0);
  // Three shells cannot certify 1e-20.
  CHECK(invoke({"fn", "--group", kData + "/g2.json", "--maxlen", "3", "--tol", "1e-20"}).code == 2);
}

TEST_CASE("errors as JSON") {
  const Captured r = invoke({"eta", "--tau", "0", "-1", "--errors-json"});
  CHECK(r.code == 1);
  const json j = json::parse(r.err);
  CHECK(j["error"]["kind"] == "NotUpperHalfPlane");
}

TEST_CASE("csv rows carry truncation metadata") {
  const Captured r = invoke({"kernels", "--group", kData + "/g2.json", "--n", "2", "--z", "-0.5", "0.4", "--format", "csv"});
  CHECK(r.code == 0);
  std::istringstream in(r.out);
  std::string header;
  std::getline(in, header);
  CHECK(header.find("tail_estimate") != std::string::npos);
  CHECK(header.find("maxlen") != std::string::npos);
  CHECK(header.find("seed") != std::string::npos);
  CHECK(header.find("value_re,value_im") != std::string::npos);
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 5);
}

TEST_CASE("kernels agree with the library and honour the seed") {
  const Captured r = invoke({"kernels", "--group", kData + "/g2.json", "--n", "3", "--seed", "7"});
  CHECK(r.code == 0);
  const json j = json::parse(r.out);
  const auto& z = j["result"]["z"];
  const Complex zc(z[0].get<double>(), z[1].get<double>());
  const KernelEval lib = t_hat(testing::g2(), 3, zc);
  const auto& v = j["result"]["t_hat"]["value"];
  CHECK(Complex(v[0].get<double>(), v[1].get<double>()) == lib.value);
  CHECK(invoke({"kernels", "--group", kData + "/g2.json", "--n", "3", "--seed", "7"}).out == r.out);
  CHECK(invoke({"kernels", "--group", kData + "/g2.json", "--n", "3", "--seed", "8"}).out != r.out);
}

TEST_CASE("validate reports and fails bad groups") {
  const Captured ok = invoke({"validate", "--group", kData + "/g2.json"});
  CHECK(ok.code == 0);
  CHECK(json::parse(ok.out)["result"]["ok"] == true);
  const Captured bad = invoke({"validate", "--group", kData + "/overlapping.json"});
  CHECK(bad.code == 1);
  CHECK(json::parse(bad.out)["result"]["disjoint"] == false);
}

TEST_CASE("remaining commands run") {
  CHECK(invoke({"torus-det", "--tau", "0.2", "1.5"}).code == 0);
  CHECK(invoke({"eisenstein", "--tau", "0.2", "1.5", "--s", "2"}).code == 0);
  CHECK(invoke({"eisenstein", "--tau", "0.2", "1.5"}).code == 1);
  const Captured k = invoke({"kronecker", "--tau", "0.2", "1.5"});
  CHECK(k.code == 0);
  CHECK(json::parse(k.out)["result"]["constant_deviation"].get<double>() < 1e-6);
  CHECK(invoke({"cocycle", "--group", kData + "/g2.json", "--n", "2", "--maxlen", "6", "--tol", "1e-6"}).code == 0);
  const Captured p = invoke({"periods", "--group", kData + "/g2.json", "--maxlen", "6", "--tol", "1e-6"});
  CHECK(p.code == 0);
  const json pj = json::parse(p.out);
  CHECK(pj["result"]["alpha_defect"].get<double>() < 1e-6);
  CHECK(pj["result"]["symmetry_defect"].get<double>() < 1e-6);
  const Captured sweep = invoke({"sweep", "--format", "csv"});
  CHECK(sweep.code == 0);
  CHECK(std::count(sweep.out.begin(), sweep.out.end(), '\n') == 122);
  CHECK(invoke({"sweep", "--group", kData + "/g2.json", "--format", "csv"}).code == 0);
}
