#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_raw(const std::string& cmd) {
  std::array<char, 4096> buf{};
  RunResult res;
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (fgets(buf.data(), buf.size(), pipe)) res.output += buf.data();
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

RunResult run_cli(const std::string& args) {
  return run_raw(std::string(FRAMEQ_CLI_PATH) + " " + args);
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("frameq_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("cli builds frames and reports their shape") {
  TempDir dir;
  const std::string out = dir.file("kashin.json");
  const RunResult r = run_cli(
      "build-frame --kind kashin --n 16 --N 48 --seed 7 --trial-samples 16 "
      "--out " +
      out);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("N=48") != std::string::npos);
  CHECK(r.output.find("tight bounds (0.99") != std::string::npos);
  CHECK(r.output.find("K_hat=") != std::string::npos);

  const json j = json::parse(slurp(out));
  CHECK(j.at("n") == 16);
  CHECK(j.at("N") == 48);
  CHECK(j.contains("config_hash"));
  CHECK(fs::exists(out + ".manifest.json"));

  const RunResult d = run_cli("build-frame --kind dyadic --n 8 --m 7 --out " +
                              dir.file("dyadic.json"));
  CHECK(d.exit_code == 0);
  CHECK(d.output.find("N=112") != std::string::npos);
}

TEST_CASE("cli quantize round trips and enforces contracts") {
  TempDir dir;
  const std::string frame = dir.file("dyadic.json");
  REQUIRE(run_cli("build-frame --kind dyadic --n 4 --m 5 --out " + frame)
              .exit_code == 0);

  SUBCASE("zero input quantizes to zero error") {
    const RunResult r =
        run_cli("quantize --frame " + frame +
                " --algorithm dyadic --x zero --delta 1 --out " +
                dir.file("rq.json"));
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("error=0 ") != std::string::npos);
  }

  SUBCASE("random dyadic draw passes its construction bound") {
    const RunResult r = run_cli(
        "quantize --frame " + frame +
        " --algorithm dyadic --x random --seed 5 --delta 1 --epsilon 1.14 "
        "--C 3 --out " +
        dir.file("rq.json"));
    CHECK(r.exit_code == 0);
  }

  SUBCASE("violated contract exits 3") {
    const RunResult r =
        run_cli("quantize --frame " + frame +
                " --algorithm dyadic --x random --seed 5 --delta 1 "
                "--epsilon 1e-9 --C 3 --out " +
                dir.file("rq.json"));
    CHECK(r.exit_code == 3);
  }

  SUBCASE("mismatched algorithm and frame exits 2") {
    const RunResult r = run_cli("quantize --frame " + frame +
                                " --algorithm kashin --x random --out " +
                                dir.file("rq.json"));
    CHECK(r.exit_code == 2);
  }
}

TEST_CASE("cli rejects malformed and unknown config") {
  TempDir dir;
  const std::string bad = dir.file("bad.json");
  {
    std::ofstream out(bad);
    out << "{\"bad json";
  }
  CHECK(run_cli("build-frame --config " + bad).exit_code == 2);

  const std::string unknown = dir.file("unknown.json");
  {
    std::ofstream out(unknown);
    out << R"({"kind": "dyadic", "bogus_key": 1})";
  }
  CHECK(run_cli("build-frame --config " + unknown).exit_code == 2);

  // config value used when no flag overrides it
  const std::string good = dir.file("good.json");
  {
    std::ofstream out(good);
    out << R"({"kind": "dyadic", "n": 8, "m": 7, "out": ")"
        << dir.file("fromcfg.json") << R"("})";
  }
  const RunResult r = run_cli("build-frame --config " + good);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("N=112") != std::string::npos);
}

TEST_CASE("cli sweep emits deterministic CSV") {
  TempDir dir;
  const std::string args =
      "sweep --dims 2,4 --kind dyadic --trials 50 --seed 3 --out-prefix ";
  REQUIRE(run_cli(args + dir.file("a")).exit_code == 0);
  REQUIRE(run_cli(args + dir.file("b")).exit_code == 0);
  const std::string csv_a = slurp(dir.file("a.csv"));
  CHECK(csv_a == slurp(dir.file("b.csv")));
  // header plus one row per dimension
  CHECK(std::count(csv_a.begin(), csv_a.end(), '\n') == 3);
  CHECK(csv_a.rfind("n,N,delta,C,", 0) == 0);
  const json mirror = json::parse(slurp(dir.file("a.json")));
  CHECK(mirror.at("records").size() == 2);
  CHECK(mirror.contains("bound_params"));
}

TEST_CASE("cli sigma-delta pipeline reports the bound") {
  TempDir dir;
  const RunResult r = run_cli(
      "sigma-delta --lambda 4 --T 20 --signal demo --grid-step 0.1 "
      "--out-prefix " +
      dir.file("sd"));
  CHECK(r.exit_code == 0);
  CHECK(r.output.find(" pass") != std::string::npos);
  const json rep = json::parse(slurp(dir.file("sd.json")));
  CHECK(rep.at("pass").get<bool>());
  CHECK(rep.at("max_error").get<double>() <=
        rep.at("bound").get<double>() + rep.at("tail").get<double>());
  const std::string csv = slurp(dir.file("sd.csv"));
  CHECK(csv.rfind("x,f_exact,f_reconstructed,error\n", 0) == 0);
}

TEST_CASE("cli density command") {
  TempDir dir;
  const std::string empty = dir.file("empty.json");
  {
    std::ofstream out(empty);
    out << R"({"points": []})";
  }
  CHECK(run_cli("density --set " + empty).exit_code == 2);

  const std::string set = dir.file("set.json");
  {
    std::ofstream out(set);
    out << R"({"points": [[0.0, 0.0]]})";
  }
  const RunResult r = run_cli("density --set " + set +
                              " --samples 500 --seed 3 --out " +
                              dir.file("density.json"));
  CHECK(r.exit_code == 0);
  const json rep = json::parse(slurp(dir.file("density.json")));
  CHECK(rep.at("epsilon_hat").get<double>() > 0.9);
}

TEST_CASE("cli outputs are bit-identical for identical config and seed") {
  TempDir dir;
  const std::string args =
      "build-frame --kind kashin --n 6 --N 18 --seed 11 --trial-samples 8 "
      "--out ";
  REQUIRE(run_cli(args + dir.file("a.json")).exit_code == 0);
  REQUIRE(run_cli(args + dir.file("b.json")).exit_code == 0);
  CHECK(slurp(dir.file("a.json")) == slurp(dir.file("b.json")));
}

TEST_CASE("FRAMEQ_SEED supplies the default seed") {
  TempDir dir;
  const std::string base = "build-frame --kind kashin --n 4 --N 12 "
                           "--trial-samples 4 --out ";
  REQUIRE(run_raw("env FRAMEQ_SEED=77 " + std::string(FRAMEQ_CLI_PATH) + " " +
                  base + dir.file("env.json"))
              .exit_code == 0);
  // equivalent explicit seed
  REQUIRE(run_cli(base + dir.file("explicit.json") + " --seed 77").exit_code ==
          0);
  // compare the frames only (config echo differs in the out path)
  const json a = json::parse(slurp(dir.file("env.json")));
  const json b = json::parse(slurp(dir.file("explicit.json")));
  CHECK(a.at("synthesis") == b.at("synthesis"));
}

TEST_CASE("cli bound-eval matches the library formula") {
  const RunResult r = run_cli(
      "bound-eval --which eq433 --n 2 --eps 0.5 --C 4 --delta 1 --K-Z 1 "
      "--f-alpha 1");
  CHECK(r.exit_code == 0);
  const json j = json::parse(r.output);
  CHECK(j.at("value").get<double>() ==
        doctest::Approx(-2.48664).epsilon(1e-4));
}
