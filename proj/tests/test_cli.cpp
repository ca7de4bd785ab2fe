// End-to-end checks of the command-line surface: flags, exit codes, and the
// files each subcommand leaves behind. Drives the real binary, whose path
// arrives via NAVKF_CLI_BIN.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

std::string cli_bin() {
  const char* bin = std::getenv("NAVKF_CLI_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "NAVKF_CLI_BIN must point at the binary");
  return bin;
}

int run_cli(const std::string& args) {
  const std::string cmd = cli_bin() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("navkf_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string sub(const std::string& name) const {
    return (path / name).string();
  }
};

void put(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

const char* kHoverSpec =
    "kind = hover\n"
    "amplitude = 0.5 0.5 0.5\n"
    "duration = 2\n"
    "imu_rate = 200\n"
    "cam_rate = 20\n"
    "seed = 3\n";

const char* kRunConfig =
    "init_mode = truth\n"
    "c_f = 1e-4\n"
    "p0_diag = 1e-10 1e-10 1e-10 1e-10 1e-10 1e-10 1e-10 1e-10 1e-10 "
    "1e-10 1e-10 1e-10 1e-10 1e-10 1e-10\n";

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("simulate") == 2);                       // missing flags
  CHECK(run_cli("simulate --spec /no/such/file --out /tmp/x") == 2);
  CHECK(run_cli("run --dataset /no/such/dir --filter qnukf "
                "--config /no/such/cfg --out /tmp/x") == 2);
  TempDir tmp;
  put(tmp.sub("spec.cfg"), kHoverSpec);
  CHECK(run_cli("simulate --spec " + tmp.sub("spec.cfg") +
                " --out " + tmp.sub("ds") + " --bogus-flag 1") == 2);
}

TEST_CASE("help exits with 0") {
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("simulate --help") == 0);
}

TEST_CASE("full pipeline through the binary") {
  TempDir tmp;
  put(tmp.sub("spec.cfg"), kHoverSpec);
  put(tmp.sub("run.cfg"), kRunConfig);

  CHECK(run_cli("simulate --spec " + tmp.sub("spec.cfg") + " --out " +
                tmp.sub("ds")) == 0);
  CHECK(std::filesystem::exists(tmp.sub("ds") + "/imu.csv"));
  CHECK(std::filesystem::exists(tmp.sub("ds") + "/truth.csv"));

  SUBCASE("run rejects an unknown filter name") {
    CHECK(run_cli("run --dataset " + tmp.sub("ds") + " --filter msckf "
                  "--config " + tmp.sub("run.cfg") + " --out " +
                  tmp.sub("out")) == 2);
  }
  SUBCASE("run, evaluate, compare") {
    for (const char* filter : {"qnukf", "ekf"}) {
      CHECK(run_cli(std::string("run --dataset ") + tmp.sub("ds") +
                    " --filter " + filter + " --config " + tmp.sub("run.cfg") +
                    " --out " + tmp.sub(filter)) == 0);
      CHECK(std::filesystem::exists(tmp.sub(filter) + "/estimates.csv"));
      CHECK(std::filesystem::exists(tmp.sub(filter) + "/diagnostics.csv"));
    }

    CHECK(run_cli("evaluate --run " + tmp.sub("qnukf") + " --truth " +
                  tmp.sub("ds") + "/truth.csv") == 0);
    CHECK(std::filesystem::exists(tmp.sub("qnukf") + "/metrics.json"));
    CHECK(std::filesystem::exists(tmp.sub("qnukf") + "/errors.csv"));

    CHECK(run_cli("compare --dataset " + tmp.sub("ds") + " --config " +
                  tmp.sub("run.cfg") + " --out " + tmp.sub("cmp")) == 0);
    CHECK(std::filesystem::exists(tmp.sub("cmp") + "/comparison.json"));
  }
  SUBCASE("corrupt input exits with 1 and names the line") {
    put(tmp.sub("ds") + "/imu.csv", "5000000,0,0,0,0,0,9.81\n10000000,0,0\n");
    const std::string cmd = cli_bin() + " run --dataset " + tmp.sub("ds") +
                            " --filter qnukf --config " + tmp.sub("run.cfg") +
                            " --out " + tmp.sub("broken") + " 2>" +
                            tmp.sub("stderr.txt") + " >/dev/null";
    const int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 1);
    std::ifstream err(tmp.sub("stderr.txt"));
    std::string text((std::istreambuf_iterator<char>(err)),
                     std::istreambuf_iterator<char>());
    CHECK(text.find(":2") != std::string::npos);
  }
}

TEST_CASE("simulate is deterministic per seed") {
  TempDir tmp;
  put(tmp.sub("spec.cfg"), kHoverSpec);
  CHECK(run_cli("simulate --spec " + tmp.sub("spec.cfg") + " --out " +
                tmp.sub("a") + " --seed 17") == 0);
  CHECK(run_cli("simulate --spec " + tmp.sub("spec.cfg") + " --out " +
                tmp.sub("b") + " --seed 17") == 0);
  for (const char* name : {"/imu.csv", "/features_obs.csv", "/truth.csv"}) {
    std::ifstream fa(tmp.sub("a") + name, std::ios::binary);
    std::ifstream fb(tmp.sub("b") + name, std::ios::binary);
    const std::string sa((std::istreambuf_iterator<char>(fa)),
                         std::istreambuf_iterator<char>());
    const std::string sb((std::istreambuf_iterator<char>(fb)),
                         std::istreambuf_iterator<char>());
    CHECK(sa == sb);
  }
}
