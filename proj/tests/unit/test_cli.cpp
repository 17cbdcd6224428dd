#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <string>

#include <sys/wait.h>

namespace {

struct Shell {
    int exit_code = -1;
    std::string out;
};

// Runs the CLI when ctest exports its location; cases self-skip otherwise.
const char* cli_path() { return std::getenv("GRAPHCURV_CLI"); }

Shell run_cli(const std::string& args) {
    Shell r;
    FILE* pipe =
        popen((std::string(cli_path()) + " " + args + " 2>/dev/null").c_str(),
              "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, got);
    int status = pclose(pipe);
    if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
    return r;
}

}  // namespace

TEST_CASE("cli point dumps the headline scalars") {
    if (!cli_path()) return;
    Shell plane = run_cli("point --graph builtin:plane --at 0.3,-0.2");
    CHECK(plane.exit_code == 0);
    CHECK(plane.out.find("\"w\":1") != std::string::npos);
    CHECK(plane.out.find("\"normA2\":0") != std::string::npos);

    Shell cap = run_cli("point --graph builtin:sphere-cap --at 0,0 --depth 2");
    CHECK(cap.exit_code == 0);
    CHECK(cap.out.find("\"normA2\":0.5") != std::string::npos);
}

TEST_CASE("cli exit codes partition by failure kind") {
    if (!cli_path()) return;
    CHECK(run_cli("point --graph builtin:sphere-cap --at 1.6,0").exit_code == 3);
    CHECK(run_cli("point --graph builtin:missing --at 0,0").exit_code == 2);
    CHECK(run_cli("point --graph builtin:plane --at 0,0 --grid 1").exit_code ==
          2);
    CHECK(run_cli("nonsense").exit_code == 2);
    CHECK(run_cli("area-ratio --graph builtin:sphere-cap --center 0,0 --R 1.9")
              .exit_code == 4);
    CHECK(run_cli("verify --graph builtin:nonflat-quadratic --grid 2 "
                  "--require-flat")
              .exit_code == 1);
    CHECK(run_cli("verify --graph builtin:nonflat-quadratic --grid 2")
              .exit_code == 0);
}

TEST_CASE("cli estimate formats") {
    if (!cli_path()) return;
    Shell csv = run_cli(
        "stability --graph builtin:affine --center 0,0 --rho 0.5 --grid 4 "
        "--format csv");
    CHECK(csv.exit_code == 0);
    CHECK(csv.out.rfind("lhs_A2phi2,", 0) == 0);
    Shell sweep = run_cli(
        "sup-sweep --graph builtin:affine --center 0,0 --radii 1 --grid 4 "
        "--gauss 3 --format csv");
    CHECK(sweep.out.rfind("R,sup_normA2_R2,area_ratio,R_sup_H,", 0) == 0);
}
