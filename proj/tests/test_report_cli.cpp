#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "flatbands/report.hpp"

using namespace flatbands;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("flatbands_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FLATBANDS_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Json load(const fs::path& p) { return Json::parse(slurp(p)); }

}  // namespace

TEST_CASE("json helpers") {
  Json j;
  put_complex(j, "z", {1.5, -2.0});
  put_complex(j, "bad", {std::nan(""), 0.0});
  CHECK(j["z_re"] == 1.5);
  CHECK(j["z_im"] == -2.0);
  CHECK(j["bad_re"].is_null());
  CHECK(j["bad_im"] == 0.0);

  MultiplicityResult inf;
  inf.infinite = true;
  CHECK(to_json(inf)["m"] == "Infinite");
  MultiplicityResult two;
  two.m = 2;
  CHECK(to_json(two)["m"] == 2);

  MagicCandidate c;
  c.alpha = 1.25;
  const Json jc = to_json(c);
  CHECK(jc["alpha_re"] == 1.25);
  CHECK(jc["residual"].is_null());

  const Json doc = make_document("test", Json::object(), 0xabcULL, describe_window(Model::Scalar, 2.0));
  CHECK(doc["schema"] == schema_version);
  CHECK(doc["kind"] == "test");
  CHECK(doc["status"] == "ok");
  CHECK(doc["potential_fingerprint"] == "0000000000000abc");
  CHECK(dump(doc).back() == '\n');
}

TEST_CASE("cli multiplicity at the origin") {
  const auto dir = scratch("mult");
  REQUIRE(run_cli("mult --alpha 0,0 --k 0,0 --out " + dir.string()) == 0);
  const Json j = load(dir / "mult.json");
  CHECK(j["kind"] == "multiplicity");
  CHECK(j["result"]["m"] == 2);
}

TEST_CASE("cli magic search with a zero potential is empty") {
  const auto dir = scratch("zero");
  std::ofstream(dir / "u.txt") << "# no modes\n";
  REQUIRE(run_cli("magic --potential " + (dir / "u.txt").string() + " --radii 3,4 --out " + dir.string()) == 0);
  CHECK(load(dir / "magics.json")["magics"].empty());
  CHECK(load(dir / "spacings.json")["spacings"].empty());
}

TEST_CASE("cli configuration errors exit with 2") {
  const auto dir = scratch("errors");
  CHECK(run_cli("mult --model tetragonal --out " + dir.string()) == 2);
  CHECK(run_cli("mult --potential /nonexistent/u.txt --out " + dir.string()) == 2);
  CHECK(run_cli("traces --k 0,0 --radius 3 --out " + dir.string()) == 2);
  CHECK(run_cli("bands --kset spiral --out " + dir.string()) == 2);
  CHECK(run_cli("no-such-command") == 2);
}

TEST_CASE("cli output is byte-reproducible") {
  const auto a = scratch("repro_a");
  const auto b = scratch("repro_b");
  const std::string args = "magic --radii 4,5 --max-abs-alpha 3 --format csv --out ";
  REQUIRE(run_cli(args + a.string()) == 0);
  REQUIRE(run_cli(args + b.string()) == 0);
  for (const char* f : {"magics.json", "spacings.json", "magics.csv"}) {
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK_FALSE(slurp(a / f).empty());
  }
  const std::string bands = "bands --alpha 0.9,0 --kset path --samples 4 --window-radius 3 --out ";
  REQUIRE(run_cli(bands + a.string()) == 0);
  REQUIRE(run_cli(bands + b.string()) == 0);
  CHECK(slurp(a / "bands.csv") == slurp(b / "bands.csv"));
}
