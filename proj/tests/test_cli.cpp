#include "husimi/grid_csv.hpp"
#include "husimi/job_config.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace husimi;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("husimi_cli_test_" + std::to_string(::getpid())) / name;
    fs::create_directories(d.parent_path());
    return d;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(HUSIMI_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string without_out_line(const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line))
        if (line.rfind("# out=", 0) != 0) out += line + "\n";
    return out;
}

}  // namespace

TEST(JobConfig, TextRoundTrip) {
    JobConfig a;
    a.set("state", "coherent:0.5,-1");
    a.set("frame", "0.25,pi/4");
    a.set("grid", "-1:1:3,-2:2:5,0,0.5");
    JobConfig b;
    b.apply_text("# comment\n\n" + a.to_text());
    EXPECT_TRUE(a == b);
    JobConfig c;
    c.apply_csv_metadata(a.to_text("# ") + "# unrelated=1\nx_re,x_im\n1,2\n");
    EXPECT_TRUE(a == c);
    EXPECT_THROW(a.set("no_such_key", "1"), ConfigError);
    EXPECT_THROW(b.apply_text("frame"), ConfigError);
    EXPECT_EQ(JobConfig().get("dim"), "40");
}

TEST(JobConfig, ValueParsers) {
    EXPECT_DOUBLE_EQ(parse_double("pi/2", "t"), pi / 2);
    EXPECT_DOUBLE_EQ(parse_double(" -0.25 ", "t"), -0.25);
    EXPECT_THROW(parse_double("1.5x", "t"), ConfigError);
    EXPECT_THROW(parse_int("2.5", "n"), ConfigError);

    const auto f = parse_frame("0.5,pi/4");
    EXPECT_DOUBLE_EQ(f.lambda(), 0.5);
    EXPECT_DOUBLE_EQ(f.theta(), pi / 4);
    EXPECT_THROW(parse_frame("-1,0"), std::exception);

    EXPECT_EQ(parse_state("fock:3").n, 3);
    EXPECT_EQ(parse_state("thermal:0.7").kind, StateSpec::Kind::thermal);
    EXPECT_DOUBLE_EQ(parse_state("coherent:0.5,-1").p, -1.0);
    EXPECT_THROW(parse_state("fock:-1"), ConfigError);
    EXPECT_THROW(parse_state("cat:1"), ConfigError);

    const auto g = parse_grid("-1:1:3,0:2:2,0.5,-0.5");
    EXPECT_EQ(g.x.values().size(), 3u);
    EXPECT_DOUBLE_EQ(g.p.values()[1], 2.0);
    EXPECT_TRUE(g.complex_offsets());
    EXPECT_FALSE(parse_grid("-1:1:3,0:0:1").complex_offsets());
    EXPECT_THROW(parse_grid("-1:1:0,0:0:1"), ConfigError);

    const auto d = parse_disps("0.5,0,0,0;0,0,1,-1");
    ASSERT_EQ(d.size(), 2u);
    EXPECT_THROW(parse_disps("1,2,3"), ConfigError);
}

TEST(GridCsv, RoundTripIsExact) {
    GridCsv g;
    g.meta("state", "fock:1");
    g.meta("lambda", 0.1);
    g.add(cplx(0.1, 0.0), cplx(1.0 / 3.0, -2.0), cplx(std::exp(-7.0), 1e-300));
    const GridCsv h = GridCsv::parse(g.to_string());
    EXPECT_EQ(h.to_string(), g.to_string());
    EXPECT_EQ(h.rows[0][2], 1.0 / 3.0);
    EXPECT_EQ(h.meta_value("lambda"), "0.10000000000000001");
    EXPECT_THROW(h.meta_value("missing"), ConfigError);
    EXPECT_THROW(GridCsv::parse("a,b\n1,2,3\n"), ConfigError);
}

TEST(MatrixFile, RoundTrip) {
    CMatrix m = CMatrix::Zero(3, 3);
    m(0, 0) = 0.5;
    m(1, 2) = cplx(0.1, -0.2);
    m(2, 1) = cplx(0.1, 0.2);
    EXPECT_EQ(parse_matrix_file(matrix_file_text(m)), m);
    EXPECT_THROW(parse_matrix_file("# dim=2\n0,5,1,0\n"), ConfigError);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run_cli("--help"), 0);
    EXPECT_EQ(run_cli("defaults"), 0);
    EXPECT_EQ(run_cli(""), 2);
    EXPECT_EQ(run_cli("husimi --state cat:1"), 2);
    EXPECT_EQ(run_cli("husimi --no-such-flag 1"), 2);
    EXPECT_EQ(run_cli("husimi --frame 0,0"), 2);
    EXPECT_EQ(run_cli("husimi --config /nonexistent/job.cfg"), 2);
    // the Gaussian factor divided out of W underflows this far out
    EXPECT_EQ(run_cli("wigner --state fock:1 --grid 30:30:1,0:0:1"), 3);
}

TEST(Cli, HusimiOutputAndRerun) {
    const fs::path a = scratch("vac.csv"), b = scratch("vac_rerun.csv");
    ASSERT_EQ(run_cli("husimi --state fock:0 --grid 0:0:1,0:0:1 --out " + a.string()), 0);
    const std::string first = read_file(a.string());
    const GridCsv g = GridCsv::parse(first);
    ASSERT_EQ(g.rows.size(), 1u);
    EXPECT_NEAR(g.rows[0][4], 1.0 / (2 * pi), 1e-15);
    EXPECT_EQ(g.meta_value("state"), "fock:0");
    EXPECT_EQ(g.meta_value("command"), "husimi");

    ASSERT_EQ(run_cli("rerun " + a.string() + " --out " + b.string()), 0);
    EXPECT_EQ(without_out_line(read_file(b.string())), without_out_line(first));
}

TEST(Cli, ConfigFileAndFlagPrecedence) {
    const fs::path cfg = scratch("job.cfg"), out = scratch("cfg.csv");
    std::ofstream(cfg) << "state=fock:1\ngrid=0:0:1,0:0:1\nframe=0.5,0\n";
    ASSERT_EQ(run_cli("husimi --config " + cfg.string() + " --frame 1,0 --out " + out.string()), 0);
    const GridCsv g = GridCsv::parse(read_file(out.string()));
    EXPECT_EQ(g.meta_value("frame"), "1,0");
    EXPECT_EQ(g.meta_value("state"), "fock:1");
    EXPECT_NEAR(g.rows[0][4], 0.0, 1e-15);
}

TEST(Cli, FiguresWritesFourPanels) {
    const fs::path dir = scratch("figs");
    ASSERT_EQ(run_cli("figures --figure-grid -2:2:5,-2:2:5 --out " + dir.string()), 0);
    for (const char* p : {"fig1a", "fig1b", "fig2a", "fig2b"}) {
        const GridCsv g = GridCsv::parse(read_file((dir / (std::string(p) + ".csv")).string()));
        EXPECT_EQ(g.meta_value("panel"), p);
        EXPECT_EQ(g.rows.size(), 25u);
    }
    EXPECT_EQ(run_cli("figures"), 2);
}
