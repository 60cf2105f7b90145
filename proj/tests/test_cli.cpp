// Integration tests that drive the CLI binary end to end.
// argv[1] = path to the congruence-flows executable, argv[2] = specs dir.

#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>
#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace {

std::string g_cli;
std::string g_specs;

std::string temp_path(const std::string& suffix) {
  static std::atomic<int> counter{0};
  return "/tmp/congflow_cli_" + std::to_string(getpid()) + "_" +
         std::to_string(counter.fetch_add(1)) + suffix;
}

struct RunResult {
  int exit_code = -1;
  std::string stdout_text;
};

RunResult run(const std::string& args) {
  const std::string out_file = temp_path(".stdout");
  const std::string cmd = g_cli + " " + args + " > " + out_file + " 2>/dev/null";
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(out_file, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  r.stdout_text = buf.str();
  std::remove(out_file.c_str());
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string write_spec(const std::string& body) {
  const std::string path = temp_path(".spec");
  std::ofstream(path) << body;
  return path;
}

std::string spec(const std::string& name) { return g_specs + "/" + name; }

}  // namespace

TEST_CASE("verify passes on the bundled canonical specs") {
  for (const char* name : {"sphere.spec", "cylinder.spec", "plane.spec"}) {
    CAPTURE(name);
    const RunResult r = run("verify --spec " + spec(name));
    CHECK(r.exit_code == 0);
    const auto summary = nlohmann::json::parse(r.stdout_text);
    CHECK(summary.at("pass").get<bool>());
    CHECK(summary.at("sup_momentum").get<double>() < 1e-5);
    CHECK(summary.at("sup_divergence").get<double>() < 1e-5);
    CHECK(summary.at("samples").get<int>() == 125 * 3);
  }
}

TEST_CASE("verify exit codes follow the contract") {
  SUBCASE("no pressure to verify") {
    CHECK(run("verify --spec " + spec("sphere_nopressure.spec")).exit_code == 2);
  }
  SUBCASE("singularity inside the sample box") {
    CHECK(run("verify --spec " + spec("sphere_origin_box.spec")).exit_code == 3);
  }
  SUBCASE("tolerance failure") {
    CHECK(run("verify --spec " + spec("sphere.spec") + " --tol 1e-14").exit_code == 1);
  }
  SUBCASE("missing file") {
    CHECK(run("verify --spec /nonexistent.spec").exit_code == 2);
  }
  SUBCASE("malformed spec") {
    const std::string path = write_spec("{\"schema_version\": 1}");
    CHECK(run("verify --spec " + path).exit_code == 2);
    std::remove(path.c_str());
  }
}

TEST_CASE("verify output is byte-identical across runs") {
  const std::string csv1 = temp_path(".csv");
  const std::string csv2 = temp_path(".csv");
  const RunResult r1 = run("verify --spec " + spec("sphere.spec") + " --out " + csv1);
  const RunResult r2 = run("verify --spec " + spec("sphere.spec") + " --out " + csv2);
  CHECK(r1.exit_code == 0);
  CHECK(r2.exit_code == 0);
  CHECK(r1.stdout_text == r2.stdout_text);
  const std::string a = slurp(csv1), b = slurp(csv2);
  CHECK(!a.empty());
  CHECK(a == b);
  CHECK(a.rfind("x1,x2,x3,t,res_x1,res_x2,res_x3,res_norm,divergence\n", 0) == 0);
  std::size_t lines = 0;
  for (char c : a) lines += c == '\n';
  CHECK(lines == 1 + 125 * 3);  // header + 5x5x5 grid at 3 times
  std::remove(csv1.c_str());
  std::remove(csv2.c_str());
}

TEST_CASE("worker cap does not change the output") {
  const RunResult base = run("verify --spec " + spec("sphere.spec"));
  setenv("CONGRUENCE_FLOWS_THREADS", "1", 1);
  const RunResult capped = run("verify --spec " + spec("sphere.spec"));
  unsetenv("CONGRUENCE_FLOWS_THREADS");
  CHECK(base.exit_code == 0);
  CHECK(base.stdout_text == capped.stdout_text);
}

TEST_CASE("classify") {
  SUBCASE("bundled sphere spec is the pencil of the origin") {
    const RunResult r = run("classify --spec " + spec("sphere.spec"));
    CHECK(r.exit_code == 0);
    const auto out = nlohmann::json::parse(r.stdout_text);
    CHECK(out.at("verdict") == "sphere");
    for (int i = 0; i < 3; ++i) CHECK(std::abs(out.at("center").at(i).get<double>()) < 1e-10);
  }
  SUBCASE("cylinder spec reports the x2-axis") {
    const RunResult r = run("classify --spec " + spec("cylinder.spec"));
    CHECK(r.exit_code == 0);
    const auto out = nlohmann::json::parse(r.stdout_text);
    CHECK(out.at("verdict") == "cylinder");
    const auto dir = out.at("axis").at("direction");
    CHECK(std::abs(std::abs(dir.at(1).get<double>()) - 1.0) < 1e-9);
    CHECK(std::abs(dir.at(0).get<double>()) < 1e-9);
    CHECK(std::abs(dir.at(2).get<double>()) < 1e-9);
    const auto pt = out.at("axis").at("point");
    for (int i = 0; i < 3; ++i) CHECK(std::abs(pt.at(i).get<double>()) < 1e-9);
  }
  SUBCASE("plane spec reports its normal") {
    const RunResult r = run("classify --spec " + spec("plane.spec"));
    CHECK(r.exit_code == 0);
    const auto out = nlohmann::json::parse(r.stdout_text);
    CHECK(out.at("verdict") == "plane");
    CHECK(out.at("normal").at(2).get<double>() == doctest::Approx(1.0));
  }
  SUBCASE("sheared congruence is obstructed with exit 1 and a named condition") {
    const std::string path = write_spec(R"({"schema_version": 1,
      "congruence": {"rank": 2, "F": [{"i": 0, "j": 1, "re": 1.0, "im": 0.0}]}})");
    const RunResult r = run("classify --spec " + path);
    CHECK(r.exit_code == 1);
    const auto out = nlohmann::json::parse(r.stdout_text);
    CHECK(out.at("verdict") == "obstructed");
    CHECK(out.at("reason").get<std::string>().find("shear") != std::string::npos);
    CHECK(out.at("diagnostics").at(0).at("condition") == "shear");
    std::remove(path.c_str());
  }
}

TEST_CASE("focal report") {
  SUBCASE("pencil of the origin lists a double root at zero") {
    const RunResult r = run("focal --spec " + spec("sphere.spec"));
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.rfind("xi_re,xi_im,r1,r2\n", 0) == 0);
    CHECK(r.stdout_text.find("\n0,0,0,0\n") != std::string::npos);
  }
  SUBCASE("shear congruence lists -1,1 at the chart origin") {
    const std::string path = write_spec(R"({"schema_version": 1,
      "congruence": {"rank": 2, "F": [{"i": 0, "j": 1, "re": 1.0, "im": 0.0}]}})");
    const RunResult r = run("focal --spec " + path);
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("\n0,0,-1,1\n") != std::string::npos);
    std::remove(path.c_str());
  }
  SUBCASE("twist congruence has empty radii at the chart origin") {
    const std::string path = write_spec(R"({"schema_version": 1,
      "congruence": {"rank": 2, "F": [{"i": 1, "j": 0, "re": 0.0, "im": 1.0}]}})");
    const RunResult r = run("focal --spec " + path);
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("\n0,0,,\n") != std::string::npos);
    std::remove(path.c_str());
  }
  SUBCASE("cylinder congruence focuses on its axis: r = -beta = 0") {
    const RunResult r = run("focal --spec " + spec("cylinder.spec"));
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.rfind("u,v,r1\n", 0) == 0);
    CHECK(r.stdout_text.find("\n0,0,0\n") != std::string::npos);
  }
}

TEST_CASE("trace") {
  SUBCASE("radial trace from (0,0,2) of length 1 ends at (0,0,3)") {
    const RunResult r = run("trace --spec " + spec("sphere.spec") + " --seed 0,0,2 --length 1");
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.rfind("s,x1,x2,x3\n", 0) == 0);
    const std::size_t last_start = r.stdout_text.rfind('\n', r.stdout_text.size() - 2) + 1;
    CHECK(r.stdout_text.substr(last_start) == "1,0,0,3\n");
  }
  SUBCASE("zero length emits a single row") {
    const RunResult r = run("trace --spec " + spec("sphere.spec") + " --seed 0,0,2 --length 0");
    CHECK(r.exit_code == 0);
    std::size_t lines = 0;
    for (char c : r.stdout_text) lines += c == '\n';
    CHECK(lines == 2);  // header + one point
  }
  SUBCASE("seeding at the source is refused") {
    const RunResult r = run("trace --spec " + spec("sphere.spec") + " --seed 0,0,0 --length 1");
    CHECK(r.exit_code == 3);
  }
}

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: test_cli <cli-binary> <specs-dir>\n");
    return 1;
  }
  g_cli = argv[1];
  g_specs = argv[2];
  doctest::Context ctx;
  return ctx.run();
}
