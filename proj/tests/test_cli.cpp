#include <doctest.h>

#include <json.hpp>
#include <kmsgraph/cli.hpp>
#include <kmsgraph/graph.hpp>
#include <kmsgraph/report.hpp>
#include <fstream>
#include <sstream>
#include <vector>

using namespace kmsgraph;

TEST_SUITE_BEGIN("cli");

namespace {

struct RunResult {
  int code;
  std::string out, err;
};

RunResult run(std::vector<const char*> args) {
  args.insert(args.begin(), "kmsgraph");
  std::ostringstream out, err;
  int code = cli_main(static_cast<int>(args.size()), args.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("examples list and export") {
  RunResult list = run({"examples", "list", "--format", "json"});
  CHECK(list.code == 0);
  auto j = nlohmann::json::parse(list.out);
  CHECK(j["examples"].size() == 3);

  RunResult exp = run({"examples", "export", "G5"});
  CHECK(exp.code == 0);
  // the exported document is canonical: parse + serialize is the identity
  GraphSpec spec = GraphSpec::parse_document(exp.out);
  CHECK(spec.serialize() == exp.out);
  CHECK(spec.name == "G5");
}

TEST_CASE("validate subcommand") {
  RunResult r = run({"validate", "G5", "--format", "json"});
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["strongly_connected"] == "yes");
  CHECK(j["row_finite"] == true);
}

TEST_CASE("beta-critical subcommand brackets the gauge threshold") {
  RunResult r = run({"beta-critical", "G5", "--potential", "gauge", "--bracket", "2/5,1",
                     "--tol", "1/1000000", "--format", "json"});
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  double lo = std::stod(j["bracket"][0].get<std::string>());
  double hi = std::stod(j["bracket"][1].get<std::string>());
  CHECK(lo <= 0.5025263);
  CHECK(hi >= 0.5025262);
  CHECK(hi - lo <= 2e-6);
}

TEST_CASE("factor-type subcommand emits the serialized verdict") {
  RunResult r = run({"factor-type", "G5", "--potential", "ab:2,1", "--beta", "1.5", "--kind",
                     "exit", "--format", "json"});
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["factor_type"]["type"] == "III_lambda");
  double lam = std::stod(j["factor_type"]["lambda"][0].get<std::string>());
  CHECK(lam == doctest::Approx(std::exp(-1.5)).epsilon(1e-9));
  CHECK(j["factor_type"].contains("rule"));

  RunResult b = run({"factor-type", "G5", "--beta", "0.7", "--kind", "exit", "--format", "json"});
  CHECK(nlohmann::json::parse(b.out)["factor_type"]["type"] == "II_inf");
}

TEST_CASE("ground-states subcommand") {
  RunResult r = run({"ground-states", "G5", "--vertex", "t1", "--levels", "8", "--format", "json"});
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["summary"] == "state space of UHF(2^inf)");
  CHECK(j["levels"].size() == 9);
  CHECK(j["levels"][3]["classes"][0]["mult"] == 8);
}

TEST_CASE("analyze produces a full deterministic report") {
  std::vector<const char*> args{"analyze", "G5", "--beta", "0.6", "--format", "json"};
  RunResult a = run(args);
  RunResult b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);  // byte-identical reruns
  auto j = nlohmann::json::parse(a.out);
  CHECK(j["recurrence"]["verdict"] == "transient");
  CHECK(j["cycle_value_group"]["kind"] == "cyclic");
  CHECK(j["harmonic"]["kind"] == "exists");
  CHECK(j["factor_types"]["conservative"]["type"] == "III_lambda");
  CHECK(j["exits"][0]["factor_type"]["type"] == "II_inf");
  CHECK(j["ground_states"]["summary"] == "state space of UHF(2^inf)");
  CHECK(j["tool"] == std::string(kToolVersion));
  // the spec digest is stable across runs and matches the library value
  CHECK(j["digest"] == spec_digest(builtin_graph("G5")));
}

TEST_CASE("spec documents load from files") {
  GraphSpec pw = builtin_graph("PINWHEEL3");
  const std::string path = "/tmp/kmsgraph_test_pw.json";
  {
    std::ofstream f(path);
    f << pw.serialize();
  }
  RunResult r = run({"validate", path.c_str(), "--format", "json"});
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["strongly_connected"] == "yes");
}

TEST_CASE("input errors exit with code 2") {
  CHECK(run({"nonsense"}).code == 2);
  CHECK(run({"examples", "export", "NOPE"}).code == 2);
  CHECK(run({"factor-type", "G5", "--kind", "conservative"}).code == 2);  // missing beta
  CHECK(run({"validate", "/nonexistent/file.json"}).code == 2);
  CHECK(run({"beta-critical", "G5", "--bracket", "1,2"}).code == 2);  // no sign change
  RunResult bad = run({"factor-type", "G5", "--beta", "0.7", "--kind", "exit", "--exit", "zz"});
  CHECK(bad.code == 2);
  CHECK(!bad.err.empty());
}

TEST_CASE("undecided verdicts exit with code 3") {
  // a tolerance far beyond the 32-bit working precision cannot be certified
  RunResult r = run({"beta-critical", "G5", "--bracket", "2/5,1", "--precision", "32", "--tol",
                     "1/100000000000000000000000000000000000000"});
  CHECK(r.code == 3);
}

TEST_CASE("KMSGRAPH_PRECISION environment override") {
  setenv("KMSGRAPH_PRECISION", "64", 1);
  RunResult r = run({"analyze", "G5", "--beta", "0.6", "--format", "json"});
  unsetenv("KMSGRAPH_PRECISION");
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["precision_bits"] == 64);
}

TEST_SUITE_END();
