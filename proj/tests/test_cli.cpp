#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Workdir {
  fs::path dir;
  Workdir() {
    dir = fs::temp_directory_path() / ("mixdesign_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Workdir() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args) {
  const std::string cmd = std::string(MIXDESIGN_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("exit codes") {
  Workdir w;
  CHECK(run("") == 1);
  CHECK(run("design solve --m 5 --out " + w.path("a.json")) == 0);
  CHECK(run("design solve --topology " + w.path("missing.txt")) == 1);
  CHECK(run("design ramanujan --m 9 --d 3") == 1);  // m * d odd
  CHECK(run("design ramanujan --m 10 --d 3 --out " + w.path("r.json")) == 0);
  CHECK(run("design greedy --m 6 --budget 0.0001") == 2);
  CHECK(run("design greedy --m 6 --budget 0.03") == 0);
  CHECK(run("design solve --m 5 --rule nope") == 1);
  CHECK(run("simulate --design " + w.path("a.json") + " --iters 5") == 0);
  CHECK(run("validate --design " + w.path("a.json") + " --design " + w.path("r.json")) == 1);  // node counts differ
  CHECK(run("validate --design " + w.path("a.json") + " --trials 50") == 0);
  CHECK(run("sweep --m 6 --grid 0.0001") == 2);
}

TEST_CASE("star topology file fails greedy with exit code 2") {
  Workdir w;
  std::ofstream(w.path("star.txt")) << "#comm_cost 1\n0 1\n0 2\n0 3\n";
  CHECK(run("design greedy --topology " + w.path("star.txt") + " --budget 2 --out " + w.path("g.json")) == 2);
  const auto doc = nlohmann::json::parse(slurp(w.path("g.json")));
  CHECK(doc["greedy"]["success"] == false);
  CHECK(doc["greedy"]["failure"] == "disconnection");
}

TEST_CASE("same seed, byte-identical outputs; manifest beside the output") {
  Workdir w;
  std::ofstream(w.path("t.txt")) << "0 1\n1 2\n2 3\n3 0\n0 2\n1 3\n3 4\n4 5\n5 0\n";
  const std::string topo = "--topology " + w.path("t.txt");
  for (int rep = 0; rep < 2; ++rep) {
    const std::string s = std::to_string(rep);
    REQUIRE(run("design greedy " + topo + " --budget 0.03 --seed 3 --out " + w.path("g" + s + ".json")) == 0);
    REQUIRE(run("design ramanujan --m 12 --d 4 --seed 3 --out " + w.path("r" + s + ".json")) == 0);
    REQUIRE(run("simulate --design " + w.path("g0.json") + " --iters 20 --seed 3 --out " + w.path("s" + s + ".csv")) ==
            0);
    REQUIRE(run("sweep " + topo + " --grid-points 4 --seed 3 --jobs " + std::to_string(rep + 1) + " --out " +
                w.path("w" + s + ".csv")) == 0);
    REQUIRE(run("validate --design " + w.path("g0.json") + " --design " + w.path("g0.json") +
                " --prob 0.5 --prob 0.5 --trials 100 --seed 3 --out " + w.path("v" + s + ".json")) == 0);
  }
  for (std::string f : {"g", "r", "s", "w", "v"}) {
    const std::string ext = (f == "s" || f == "w") ? ".csv" : ".json";
    CHECK(slurp(w.path(f + "0" + ext)) == slurp(w.path(f + "1" + ext)));
  }
  const auto m = nlohmann::json::parse(slurp(w.path("g0.json.manifest.json")));
  CHECK(m["seeds"]["seed"] == 3);
  CHECK(m["inputs"][w.path("t.txt")].get<std::string>().size() == 64);
  CHECK(m.contains("timestamps"));
  CHECK(run("design ramanujan --m 12 --d 4 --seed 4 --out " + w.path("r2.json")) == 0);
  CHECK(slurp(w.path("r2.json")) != slurp(w.path("r0.json")));
}
