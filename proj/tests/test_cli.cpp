#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(IONGRAD_CLI) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("iongrad_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  write(dir / "bad.json", R"({"schema_version": 1, "crystal": {"n_ion": 3}})");
  write(dir / "zigzag.json", R"({"schema_version": 1, "crystal": {"n_ions": 20, "radial_x_hz": 4.0e5}})");
  write(dir / "ok.json", R"({"schema_version": 1, "crystal": {"n_ions": 3}})");
  CHECK(run("--config " + (dir / "bad.json").string() + " modes") == 2);
  CHECK(run("--bogus modes") == 2);
  CHECK(run("--config " + (dir / "zigzag.json").string() + " --out " + (dir / "o").string() + " modes") == 3);
  write(dir / "file", "x");
  CHECK(run("--config " + (dir / "ok.json").string() + " --out " + (dir / "file" / "sub").string() + " modes") == 4);
  CHECK(run("--config " + (dir / "ok.json").string() + " --out " + (dir / "o").string() + " modes") == 0);
  CHECK(fs::exists(dir / "o" / "spectra.csv"));
  CHECK(fs::exists(dir / "o" / "spacing.json"));
}

TEST_CASE("format and plot flags") {
  const auto dir = scratch("format");
  write(dir / "ok.json", R"({"schema_version": 1, "crystal": {"n_ions": 2}})");
  CHECK(run("--config " + (dir / "ok.json").string() + " --out " + (dir / "o").string() +
            " --format json --plots scan") == 0);
  CHECK_FALSE(fs::exists(dir / "o" / "deflector_scan.csv"));
  CHECK(fs::exists(dir / "o" / "deflector_scan.svg"));
}
