#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "selfs/cli.hpp"
#include "selfs/grid.hpp"
#include "selfs/ranking.hpp"

using namespace selfs;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path = fs::temp_directory_path() / ("selfs_cli_" + std::to_string(::getpid()));
    TempDir() { fs::create_directories(path); }
    ~TempDir() { fs::remove_all(path); }
};

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "selfs");
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("small pipeline through every subcommand") {
    TempDir tmp;
    const auto d = tmp.path.string();
    REQUIRE(cli({"synth", "--out", d + "/data", "--rows", "48", "--cols", "40", "--steps", "3", "--seed", "5",
                 "--model", "m1:1:1:0:0.05", "--model", "m2:0:0:2:0.1"})
                .code == kExitOk);
    CHECK(fs::exists(tmp.path / "data/obs/t000.grid"));
    CHECK(fs::exists(tmp.path / "data/m2/t002.grid"));
    const auto obs = read_grid(tmp.path / "data/obs/t001.grid");
    CHECK(obs.rows() == 48);
    CHECK(obs.kind() == FieldKind::mask);

    REQUIRE(cli({"filter", "--spec", "W0.1-inf", d + "/data/obs/t000.grid", d + "/w.grid"}).code == kExitOk);
    CHECK(read_grid(tmp.path / "w.grid").kind() == FieldKind::real);
    CHECK(slurp(tmp.path / "w.grid.json").find("\"spec\"") != std::string::npos);

    REQUIRE(cli({"score", "--obs", d + "/data/obs", "--model", "m1=" + d + "/data/m1", "--model", "m2=" + d + "/data/m2",
                 "--metric", "fss_nbhd_r2", "--metric", "brier_F0-0.2", "--out", d + "/scores.csv"})
                .code == kExitOk);
    const auto matrix = parse_scores_csv(slurp(tmp.path / "scores.csv"));
    CHECK(matrix.models == std::vector<std::string>{"m1", "m2"});
    CHECK(matrix.metrics.size() == 2);

    REQUIRE(cli({"rank", "--scores", d + "/scores.csv", "--out-dir", d + "/rank"}).code == kExitOk);
    CHECK(fs::exists(tmp.path / "rank/winners.json"));

    REQUIRE(cli({"eval", "--obs", d + "/data/obs", "--model", "m1=" + d + "/data/m1", "--n-boot", "20",
                 "--n-boot-bars", "10", "--out-dir", d + "/eval"})
                .code == kExitOk);
    CHECK(slurp(tmp.path / "eval/eval_m1.json").find("selfs.eval/1") != std::string::npos);

    const auto gc = cli({"gradcheck", "--spec", "fss_nbhd_r1", "--spec", "csi_W0-0.4", "--size", "8"});
    CHECK(gc.code == kExitOk);
    CHECK(gc.out.find("fss_nbhd_r1") != std::string::npos);
}

TEST_CASE("validation errors map to exit code 1") {
    TempDir tmp;
    const auto d = tmp.path.string();
    CHECK(cli({"filter", "--spec", "nbhd_max_r-2", d + "/missing.grid", d + "/o.grid"}).code == kExitValidation);
    CHECK(cli({"score", "--obs", d + "/nowhere", "--model", "a=" + d, "--metric", "fss_nbhd_r1"}).code == kExitValidation);
    CHECK(cli({"gradcheck", "--spec", "not_a_spec"}).code == kExitValidation);
    const auto r = cli({"bogus"});
    CHECK(r.code == kExitValidation);
    CHECK_FALSE(r.err.empty());
}
