#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "equihf/cli.hpp"
#include "equihf/floermodel.hpp"
#include "equihf/io.hpp"
#include "json.hpp"

using namespace equihf;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args, const std::string& stdin_text = "") {
  std::ostringstream out, err;
  std::istringstream in(stdin_text);
  const int code = run_cli(args, out, err, in);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& rel) { return (fs::path(EQUIHF_DATA_DIR) / rel).string(); }

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("fnv1a64 reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"example", "no_such_example"}).code == 2);
  CHECK(run({"check", data("no/such/file.json")}).code == 2);
  CHECK(run({"check", "-"}, "{not json").code == 2);
  CHECK(run({"floer-validate", "-"}, "name = x\nbogus line\n").code == 2);
  CHECK(run({"check", data("complexes/free_swap.json")}).code == 0);
  CHECK(run({"check", data("complexes/bad_square.json")}).code == 1);
  CHECK(run({"floer-validate", data("corrupted/morse_pair_i1_n1_no_yyy.datum")}).code == 1);
  auto r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("floer-transfer") != std::string::npos);
}

TEST_CASE("malformed input names the location") {
  auto r = run({"check", "-"}, R"({"generators": ["a"], "differential": [["a", "zz"]]})");
  CHECK(r.code == 2);
  CHECK(r.err.find("differential entry 0") != std::string::npos);
  CHECK(r.err.find("zz") != std::string::npos);
}

TEST_CASE("example clifford piped into floer-transfer") {
  auto ex = run({"example", "clifford"});
  REQUIRE(ex.code == 0);
  auto r = run({"floer-transfer", "-", "--json"}, ex.out);
  CHECK(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["schema"] == kReportSchema);
  CHECK(j["values"]["dim_h"] == 2);
  CHECK(j["values"]["hf_poly_dim"] == 2);
  CHECK(j["values"]["free_orbits"].get<int>() <= 2);
}

TEST_CASE("strata P i=2 codim 2 has six rows") {
  auto r = run({"strata", "--space", "P", "--i", "2", "--sigma", "+", "--codim", "2", "--json"});
  CHECK(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["values"]["strata"].size() == 6);
}

TEST_CASE("cz-krein on i-:a=-0.5") {
  auto r = run({"cz-krein", "--blocks", "i-:a=-0.5", "--json"});
  CHECK(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["values"]["kappa_minus_n"] == -1);
  CHECK(j["values"]["mu_square_minus_2mu"] == -1);
}

TEST_CASE("example output round-trips and validates") {
  for (std::vector<std::string> args : {std::vector<std::string>{"example", "morse_pair", "--i", "1", "--n", "1"},
                                        {"example", "twisted_pair", "--i", "3", "--n", "3"},
                                        {"example", "annulus"},
                                        {"example", "clifford"},
                                        {"example", "fixed_point"}}) {
    auto ex = run(args);
    REQUIRE(ex.code == 0);
    CHECK(serialize_datum(parse_datum(ex.out)) == ex.out);
    CHECK(run({"floer-validate", "-"}, ex.out).code == 0);
  }
  const auto annulus = parse_datum(run({"example", "annulus"}).out);
  CHECK(annulus.size2() == 4);
  const auto clifford = parse_datum(run({"example", "clifford"}).out);
  CHECK(clifford.m() == 0);
  for (int k = 0; k < clifford.size2(); ++k) CHECK(clifford.rho[k] != k);
}

TEST_CASE("json reports are byte-identical across runs") {
  const std::vector<std::vector<std::string>> cmds = {
      {"floer-smith", data("floer/annulus.datum"), "--json"},
      {"floer-transfer", data("floer/clifford.datum"), "--json"},
      {"cz-krein", "--random", "10", "--n", "2", "--json", "--seed", "7"},
      {"kaledin", data("complexes/mixed.json"), "--json"},
      {"batch", data("manifest.txt"), "--json"},
  };
  for (const auto& c : cmds) {
    const auto a = run(c), b = run(c);
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("seed selects the random datum") {
  const auto a = run({"random-datum", "--seed", "11"});
  const auto b = run({"random-datum", "--seed", "11"});
  const auto c = run({"random-datum", "--seed", "12"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);
  CHECK(run({"floer-validate", "-"}, a.out).code == 0);
}

TEST_CASE("batch manifests") {
  auto all = run({"batch", data("manifest.txt"), "--json"});
  CHECK(all.code == 0);
  const auto j = json::parse(all.out);
  CHECK(j["values"]["entries"].size() > 50);
  int prev = 0;
  for (const auto& e : j["values"]["entries"]) {
    CHECK(e["line"].get<int>() > prev);
    prev = e["line"].get<int>();
  }

  auto bad = run({"batch", data("corrupted_manifest.txt")});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("p_relations") != std::string::npos);
  CHECK(bad.out.find("d_squared") != std::string::npos);

  auto empty = run({"batch", data("empty_manifest.txt"), "--json"});
  CHECK(empty.code == 0);
  CHECK(json::parse(empty.out)["values"]["entries"].empty());

  auto broken = run({"batch", "-"}, "floer/missing.datum floer-validate\n");
  CHECK(broken.code == 2);
}

TEST_CASE("shipped datum files round-trip") {
  int count = 0;
  for (const auto& dir : {"floer", "corrupted"})
    for (const auto& e : fs::directory_iterator(data(dir))) {
      if (e.path().extension() != ".datum") continue;
      const auto text = slurp(e.path().string());
      CAPTURE(e.path().string());
      CHECK(serialize_datum(parse_datum(text)) == text);
      ++count;
    }
  CHECK(count >= 20);
}

TEST_CASE("shipped complex files round-trip") {
  for (const auto& e : fs::directory_iterator(data("complexes"))) {
    const auto f = parse_complex_json(slurp(e.path().string()));
    const auto again = parse_complex_json(complex_to_json(f));
    CAPTURE(e.path().string());
    CHECK(complex_to_json(again) == complex_to_json(f));
  }
}
