#include <catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>

#include "support.hpp"

#ifndef LOCM_CLI
#error "LOCM_CLI must point at the locm binary"
#endif

using namespace locm;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

// Fresh scratch directory per test case.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) {
    dir = fs::temp_directory_path() / ("locm-cli-" + name + "-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }

  Run locm(const std::string& args) const {
    auto out = dir / "stdout.txt", err = dir / "stderr.txt";
    std::string cmd = "cd '" + dir.string() + "' && '" + std::string(LOCM_CLI) + "' " + args + " >'" + out.string() +
                      "' 2>'" + err.string() + "'";
    int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = test::slurp(out.string());
    r.err = test::slurp(err.string());
    return r;
  }

  std::string read(const std::string& rel) const { return test::slurp((dir / rel).string()); }
  void write(const std::string& rel, const std::string& text) const {
    std::ofstream(dir / rel, std::ios::binary) << text;
  }
};

const std::string kKaizen = test::data_path("fixtures/kaizen.jsonl");
const std::string kTable = test::data_path("fixtures/bin_accuracy.csv");

}  // namespace

TEST_CASE("validate: exit codes and one diagnostic per rejected line") {
  Scratch s("validate");
  auto ok = s.locm("--corpus '" + kKaizen + "' validate");
  CHECK(ok.code == 0);

  auto inst = test::kaizen();
  std::string good = Json(inst).dump();
  inst.premises[3].fol = "P(a";
  s.write("bad.jsonl", good + "\n" + Json(inst).dump() + "\n");
  auto bad = s.locm("--corpus bad.jsonl validate");
  CHECK(bad.code == 1);
  CHECK(bad.out.find("line 2: UnbalancedParens") != std::string::npos);
  CHECK(bad.out.find("line 1:") == std::string::npos);

  auto missing = s.locm("--corpus nope.jsonl validate");
  CHECK(missing.code == 3);
}

TEST_CASE("config errors exit with 2") {
  Scratch s("config");
  CHECK(s.locm("--set no.such.key=1 --corpus '" + kKaizen + "' validate").code == 2);
  CHECK(s.locm("--set transform=Cubic --corpus '" + kKaizen + "' validate").code == 2);
  CHECK(s.locm("no-such-command").code == 2);
  CHECK(s.locm("-o run score").code == 2);  // no corpus configured
  s.write("bad.conf", "weights.and = -1\n");
  CHECK(s.locm("-c bad.conf --corpus '" + kKaizen + "' -o run score").code == 2);
}

TEST_CASE("score on the case study writes scores and a manifest") {
  Scratch s("score");
  auto r = s.locm("--corpus '" + kKaizen + "' -o run score");
  REQUIRE(r.code == 0);
  auto scored = instance_from_json(Json::parse(s.read("run/scored.jsonl")));
  REQUIRE(scored.score);
  CHECK(scored.score->raw == 52.5);
  CHECK(std::abs(scored.score->value - 7.246) < 0.001);

  auto manifest = Json::parse(s.read("run/manifest.score.json"));
  CHECK(manifest["command"] == "score");
  CHECK(manifest["tool_version"] == "locm 1.0.0");
  CHECK(manifest["config_digest"].get<std::string>().size() == 64);
  CHECK(manifest["inputs"]["corpus"] == sha256_hex(test::slurp(kKaizen)));
  CHECK(manifest.contains("seed"));

  // Reruns are byte-identical; a different config changes the digest.
  auto first = s.read("run/scored.jsonl");
  REQUIRE(s.locm("--corpus '" + kKaizen + "' -o run score").code == 0);
  CHECK(s.read("run/scored.jsonl") == first);
  CHECK(Json::parse(s.read("run/manifest.score.json")) == manifest);
  REQUIRE(s.locm("--set transform=Linear --corpus '" + kKaizen + "' -o run2 score").code == 0);
  CHECK(Json::parse(s.read("run2/manifest.score.json"))["config_digest"] != manifest["config_digest"]);
}

TEST_CASE("missing upstream artifacts name the producing command") {
  Scratch s("missing");
  auto check = [&](const std::string& cmd, const std::string& producer) {
    auto r = s.locm("--corpus '" + kKaizen + "' -o empty " + cmd);
    INFO(cmd << ": " << r.err);
    CHECK(r.code == 3);
    CHECK(r.err.find("run `locm " + producer + "` first") != std::string::npos);
  };
  check("stratify", "score");
  check("eval", "score");
  check("curve", "eval");
  check("detect", "curve");
  check("correlate", "eval");
  check("curriculum", "stratify");
  check("report", "curve");
}

TEST_CASE("published table: curve, detect and report") {
  Scratch s("table");
  REQUIRE(s.locm("-o run curve --table '" + kTable + "'").code == 0);
  REQUIRE(s.locm("-o run detect").code == 0);
  auto doc = Json::parse(s.read("run/intervals.json"));
  const Json* qwen = nullptr;
  const Json* gemma = nullptr;
  for (const auto& c : doc["curves"]) {
    if (c["name"] == "Qwen2.5-7B") qwen = &c;
    if (c["name"] == "Gemma3-1B") gemma = &c;
  }
  REQUIRE(qwen);
  REQUIRE(gemma);
  REQUIRE((*qwen)["intervals"].size() == 1);
  CHECK((*qwen)["intervals"][0]["tau_min"].get<double>() <= 4.0);
  CHECK((*qwen)["intervals"][0]["tau_max"].get<double>() >= 6.0);
  CHECK((*gemma)["baseline_convergence"]["converged"] == true);

  REQUIRE(s.locm("-o run report").code == 0);
  std::string svg;
  for (const auto& e : fs::directory_iterator(s.dir / "run")) {
    auto name = e.path().filename().string();
    if (name.find("Qwen2.5-7B") != std::string::npos && e.path().extension() == ".svg") svg = test::slurp(e.path());
  }
  REQUIRE_FALSE(svg.empty());
  auto count = [&](const std::string& needle) {
    std::size_t n = 0;
    for (auto p = svg.find(needle); p != std::string::npos; p = svg.find(needle, p + 1)) ++n;
    return n;
  };
  CHECK(count("class=\"interval\"") == 1);
  CHECK(count("class=\"baseline\"") == 1);
  CHECK(svg.find("stroke-dasharray") != std::string::npos);
  auto report = s.read("run/report.md");
  CHECK(report.find("| Qwen2.5-7B |") != std::string::npos);
}

TEST_CASE("full synthetic pipeline and curriculum history") {
  Scratch s("pipeline");
  REQUIRE(s.locm("generate -n 300 corpus.jsonl").code == 0);
  auto corpus_before = s.read("corpus.jsonl");
  const std::string base = "--corpus corpus.jsonl -o run ";
  for (const char* cmd : {"ingest", "score", "eval", "curve", "detect", "stratify", "correlate", "curriculum", "report"}) {
    auto r = s.locm(base + cmd);
    INFO(cmd << ": " << r.err);
    REQUIRE(r.code == 0);
    CHECK(fs::exists(s.dir / "run" / ("manifest." + std::string(cmd) + ".json")));
  }
  CHECK(s.read("corpus.jsonl") == corpus_before);

  double a_old = -1.0;
  int entries = 0;
  std::istringstream in(s.read("run/history.jsonl"));
  for (std::string line; std::getline(in, line);) {
    auto h = Json::parse(line);
    CHECK(h["a_old"].get<double>() >= a_old);
    a_old = h["a_old"].get<double>();
    ++entries;
  }
  CHECK(entries >= 3);
  CHECK(Json::parse(s.read("run/theta.json")).contains("values"));

  auto pool = pool_from_json(Json::parse(s.read("run/pool.json")));
  CHECK(pool.size() == 300);
}
