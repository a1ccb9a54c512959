#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string output;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(PWFIT_CLI_PATH) + " " + args + " 2>&1";
  Run r{-1, {}};
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[512];
  while (std::fgets(buf, sizeof buf, pipe)) r.output += buf;
  const int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "pwfit_test_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("heuristic solve writes artifacts") {
    const fs::path dir = scratch();
    const Run r = run("solve --synthetic cross --size 8x10 --variant heuristic --out " +
                      dir.string() + " --stem t");
    CHECK(r.status == 0);
    CHECK(fs::exists(dir / "t_report.json"));
    CHECK(fs::exists(dir / "t_labels.csv"));
    fs::remove_all(dir);
  }

  TEST_CASE("exact solve from a file") {
    const fs::path dir = scratch();
    {
      FILE* f = std::fopen((dir / "in.csv").c_str(), "w");
      std::fputs("0.1,0.2,0.3,0.9\n0.1,0.2,0.3,0.9\n0.1,0.2,0.3,0.9\n", f);
      std::fclose(f);
    }
    const Run r = run("solve --input " + (dir / "in.csv").string() + " --variant mph-4 --out " +
                      dir.string());
    CHECK(r.status == 0);
    CHECK(fs::exists(dir / "in_report.json"));
    fs::remove_all(dir);
  }

  TEST_CASE("usage errors exit with 2 and one line") {
    const Run r = run("solve --no-such-flag");
    CHECK(r.status == 2);
    CHECK(r.output.rfind("pwfit: ", 0) == 0);
    CHECK(r.output.find('\n') == r.output.size() - 1);
    CHECK(run("solve --synthetic cross --variant bogus").status != 0);
  }

  TEST_CASE("runtime errors exit with 1") {
    const Run r = run("solve --input /nonexistent/image.csv");
    CHECK(r.status == 1);
    CHECK(r.output.find("pwfit: error: ") == 0);
  }

  TEST_CASE("small sweep") {
    const fs::path dir = scratch();
    const Run r = run("sweep --sizes 6x8 --variants heuristic --scenes plus --repeats 2 --out " +
                      dir.string());
    CHECK(r.status == 0);
    CHECK(fs::exists(dir / "sweep.csv"));
    fs::remove_all(dir);
  }
}
