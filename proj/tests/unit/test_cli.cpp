#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "deltanet/cli.hpp"
#include "deltanet/encode.hpp"
#include "deltanet/engine.hpp"
#include "deltanet/serialize.hpp"

using namespace deltanet;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args, const std::string& input = {}) {
  std::istringstream in(input);
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("translate") {
  const Run json = run({"translate", "λx.x", "--calculus", "L", "--format", "json"});
  REQUIRE(json.code == kExitOk);
  const Net n = from_json(json.out);
  CHECK(count_agents(n) == AgentCounts{1, 0, 0});

  const Run dot = run({"translate", "λx.x x", "--format", "dot"});
  CHECK(dot.code == kExitOk);
  CHECK(dot.out.find("rep 1 [-1,0]") != std::string::npos);

  CHECK(run({"translate", "λx.x x", "--calculus", "A"}).code == kExitFlavorMismatch);
  CHECK(run({"translate", "(λx.x"}).code == kExitInputError);
  CHECK(run({"translate", "λx.x", "--format", "yaml"}).code == kExitInputError);
  CHECK(run({"translate", "λx.x", "--calculus", "Q"}).code == kExitInputError);
  CHECK(run({"translate", "-"}, "λy.y").out == json.out);
}

TEST_CASE("normalize") {
  const Run simple = run({"normalize", "(λx.x) y"});
  CHECK(simple.code == kExitOk);
  CHECK(simple.out == "y\n");
  const Run stats = run({"normalize", "(λx.x) y", "--format", "stats"});
  CHECK(stats.code == kExitOk);
  const auto j = nlohmann::json::parse(stats.out);
  CHECK(j["total_interactions"] == 1);
  CHECK(j["status"] == "Normal");
  CHECK(j["rules"]["FanAnnihilation"] == 1);

  const Run omega = run({"normalize", "(λx.x x)(λy.y y)", "--max-steps", "10000"});
  CHECK(omega.code == kExitLimit);
  const auto o = nlohmann::json::parse(omega.out);
  CHECK(o["status"] == "StepLimit");
  CHECK(o["peak_live_agents"].get<int>() < 20);

  CHECK(run({"normalize", "(λx.x x x)(λx.x x x)", "--max-agents", "100"}).code == kExitLimit);
  CHECK(run({"normalize", "two two", "--prelude", "church"}).out == "λv0.λv1.v0 (v0 (v0 (v0 v1)))\n");
  CHECK(run({"normalize", "exp two two", "--prelude", "church"}).out ==
        run({"normalize", "exp two two", "--prelude", "church", "--parallel", "4"}).out);
  CHECK(run({"normalize", "two two", "--prelude", "peano"}).code == kExitInputError);
  CHECK(run({"normalize", "(λx.x) y", "--format", "trace"}).code == kExitInputError);
}

TEST_CASE("normalize reads net JSON and pipes compose") {
  const Run translated = run({"translate", "(λf.λx.f (f x)) (λy.y)", "--binary-replicators"});
  REQUIRE(translated.code == kExitOk);
  const Run reduced = run({"normalize", "-", "--binary-replicators"}, translated.out);
  CHECK(reduced.code == kExitOk);
  CHECK(reduced.out == "λv0.v0\n");
  const Run as_json = run({"normalize", translated.out, "--format", "json"});
  CHECK(as_json.code == kExitOk);
  const Run checked = run({"check", as_json.out});
  CHECK(checked.code == kExitOk);
  CHECK(checked.out.find("canonical: yes") != std::string::npos);
}

TEST_CASE("trace") {
  const Run one = run({"trace", "(λx.x) y"});
  CHECK(one.code == kExitOk);
  CHECK(line_count(one.out) == 1);
  CHECK(one.out.find("rule=FanAnnihilation") != std::string::npos);

  const std::string term = "(λf.λx.f (f x)) (λy.(λz.z) y) (λw.w)";
  const Run a = run({"trace", term, "--seed", "3"});
  CHECK(a.out == run({"trace", term, "--seed", "3"}).out);
  CHECK(a.out != run({"trace", term, "--seed", "4"}).out);
  CHECK(run({"normalize", term, "--seed", "3"}).out == run({"normalize", term, "--seed", "4"}).out);

  CHECK(run({"trace", "(λx.x x)(λy.y y)", "--max-steps", "5"}).code == kExitLimit);

  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "deltanet_cli_trace";
  std::filesystem::remove_all(dir);
  const Run dot = run({"trace", "(λx.x) y", "--format", "dot", "--output-dir", dir.string()});
  CHECK(dot.code == kExitOk);
  CHECK(std::filesystem::exists(dir / "step-000000.dot"));
  CHECK(std::filesystem::exists(dir / "step-000001.dot"));
  std::ifstream last(dir / "step-000001.dot");
  const std::string text{std::istreambuf_iterator<char>(last), std::istreambuf_iterator<char>()};
  CHECK(text.find("fan") == std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("check") {
  const Run fresh = run({"check", run({"translate", "λx.x x"}).out});
  CHECK(fresh.code == kExitOk);
  CHECK(fresh.out.find("structure: ok") != std::string::npos);
  CHECK(fresh.out.find("duality: ok") != std::string::npos);
  CHECK(fresh.out.find("canonical: yes") != std::string::npos);

  const Run bad = run({"check", R"({"nodes":[{"id":0,"kind":"root"},{"id":1,"kind":"fan"}],"wires":[[[0,0],[1,0]]]})"});
  CHECK(bad.code == kExitInputError);
  CHECK(bad.out.find("DanglingPort") != std::string::npos);

  Net mid = translate(parse_term("(λx.x x) (λy.y)"));
  {
    Engine e(mid);
    REQUIRE(e.step());
  }
  const std::filesystem::path file = std::filesystem::temp_directory_path() / "deltanet_cli_mid.json";
  std::ofstream(file) << to_json(mid);
  const Run snapshot = run({"check", file.string()});
  CHECK(snapshot.code == kExitOk);
  CHECK(snapshot.out.find("structure: ok") != std::string::npos);
  CHECK(snapshot.out.find("canonical: no") != std::string::npos);
  std::filesystem::remove(file);

  CHECK(run({"check", "/nonexistent/net.json"}).code == kExitInputError);
}

TEST_CASE("usage") {
  CHECK(run({}).code == kExitInputError);
  CHECK(run({"frobnicate"}).code == kExitInputError);
  const Run help = run({"--help"});
  CHECK(help.code == kExitOk);
  CHECK(help.out.find("normalize") != std::string::npos);
}
