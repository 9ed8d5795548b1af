#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "ppcauchy/app.hpp"

namespace ppcauchy::cli {
namespace {

using namespace fixtures;

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::path(PPCAUCHY_TEST_TMP) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const json& j) {
    const fs::path p = dir / "config.json";
    io::write_text(p, j.dump(2));
    return p;
}

json base_config(std::size_t n = 32) {
    return json{{"domain", {{"h1", 1.0}, {"h2", 1.0}, {"p", 2.0}}},
                {"grid", {{"nx", n}, {"ny", n}}},
                {"curve", "linear"}};
}

RunOptions quiet() {
    RunOptions o;
    o.quiet = true;
    return o;
}

json read_json(const fs::path& p) { return json::parse(io::read_text(p)); }

int run_binary(const std::string& args) {
    const std::string cmd = std::string("\"") + PPCAUCHY_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Writes the classical bundle of x^3 y^2 on the unit square, optionally with a jump in Z20.
fs::path classical_bundle(const fs::path& dir, std::size_t n, bool jump) {
    const Case s = linear_setup(n);
    ClassicalData cl = oracle_cl(x3y2(), s);
    if (jump) {
        for (std::size_t k = 0; k < s.g.x.size(); ++k)
            if (s.g.x[k] > 0.5) cl.traces[2][0][k] += 1.0;
    }
    return io::save_classical(dir / "classical", cl, Domain{});
}

TEST(Config, DefaultsAreFilledIn) {
    const fs::path dir = scratch("defaults");
    RunConfig cfg = parse_config(write_config(dir, base_config()));
    EXPECT_EQ(cfg.domain.p, 2.0);
    EXPECT_EQ(cfg.solver.tol, 1e-10);
    EXPECT_EQ(cfg.solver.max_iter, 100);
    EXPECT_EQ(cfg.solver.relaxation, 1.0);
    EXPECT_EQ(cfg.agreement.levels, 4);
    EXPECT_EQ(cfg.agreement.threshold, 4.0);
    EXPECT_TRUE(std::isinf(cfg.agreement.p));
    EXPECT_EQ(cfg.sizes, (std::vector<std::size_t>{16, 32, 64}));
    EXPECT_EQ(cfg.echo["solver"]["max_iter"], 100);
    EXPECT_EQ(cfg.echo["agreement"]["p"], "inf");
}

TEST(Config, DomainExponentDefaultsToTwo) {
    const fs::path dir = scratch("default_p");
    json j = base_config();
    j["domain"].erase("p");
    EXPECT_EQ(parse_config(write_config(dir, j)).domain.p, 2.0);
}

TEST(Config, RejectsNonPositiveTolerance) {
    const fs::path dir = scratch("bad_tol");
    json j = base_config();
    j["solver"] = {{"tol", -1.0}};
    try {
        (void)parse_config(write_config(dir, j));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Config);
        EXPECT_NE(std::string(e.what()).find("solver.tol"), std::string::npos) << e.what();
    }
}

TEST(Config, RejectsUnknownKeysWithPath) {
    const fs::path dir = scratch("unknown");
    for (const auto& [key, patch] : std::vector<std::pair<std::string, json>>{
             {"colour", json{{"colour", 1}}},
             {"solver.tolerance", json{{"solver", {{"tolerance", 1e-8}}}}},
             {"coefficients.a32", json{{"coefficients", {{"a32", 1.0}}}}},
             {"coefficients.a42", json{{"coefficients", {{"a42", 1.0}}}}}}) {
        json j = base_config();
        j.merge_patch(patch);
        try {
            (void)parse_config(write_config(dir, j));
            ADD_FAILURE() << key;
        } catch (const Error& e) {
            EXPECT_NE(std::string(e.what()).find(key), std::string::npos) << e.what();
        }
    }
}

TEST(Config, RejectsSmallGridsAndBadRelaxation) {
    const fs::path dir = scratch("small");
    json j = base_config(4);
    EXPECT_THROW((void)parse_config(write_config(dir, j)), Error);
    j = base_config();
    j["solver"] = {{"relaxation", 1.5}};
    EXPECT_THROW((void)parse_config(write_config(dir, j)), Error);
    j = base_config();
    j["convergence"] = {{"sizes", {16, 32}}};
    EXPECT_THROW((void)parse_config(write_config(dir, j)), Error);
}

TEST(Config, MissingFileIsIoError) {
    try {
        (void)parse_config(fs::path(PPCAUCHY_TEST_TMP) / "no" / "such.json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
    }
}

TEST(Run, MmsSucceedsAndWritesSummary) {
    const fs::path dir = scratch("mms");
    json j = base_config();
    j["coefficients"] = {{"a00", 1.0}};
    const int code = run(Command::Mms, write_config(dir, j), dir / "out", quiet());
    EXPECT_EQ(code, kOk);
    const json s = read_json(dir / "out" / "summary.json");
    EXPECT_EQ(s["status"], "ok");
    EXPECT_EQ(s["command"], "mms");
    EXPECT_TRUE(s["metrics"]["convergence"]["converged"].get<bool>());
    EXPECT_LT(s["metrics"]["g00_error_sup"].get<double>(), 1e-2);
    EXPECT_TRUE(fs::exists(dir / "out" / "errors.csv"));
    EXPECT_TRUE(fs::exists(dir / "out" / "g00.csv"));
    EXPECT_FALSE(fs::exists(dir / "out" / "jet"));
}

TEST(Run, FullJetWritesTwelveFields) {
    const fs::path dir = scratch("full_jet");
    RunOptions opts;
    opts.quiet = true;
    opts.full_jet = true;
    ASSERT_EQ(run(Command::Mms, write_config(dir, base_config(16)), dir / "out", opts), kOk);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dir / "out" / "jet")) files += e.is_regular_file();
    EXPECT_EQ(files, 12u);
}

TEST(Run, GridOverrideTakesPrecedence) {
    const fs::path dir = scratch("override");
    RunOptions opts;
    opts.quiet = true;
    opts.grid_nx = 16;
    opts.grid_ny = 24;
    ASSERT_EQ(run(Command::Mms, write_config(dir, base_config()), dir / "out", opts), kOk);
    const json s = read_json(dir / "out" / "summary.json");
    EXPECT_EQ(s["config_echo"]["grid"]["nx"], 16);
    EXPECT_EQ(s["config_echo"]["grid"]["ny"], 24);
    EXPECT_EQ(io::load_fn2(dir / "out" / "g00.csv").axis_x.cells(), 16u);
}

TEST(Run, InputErrorStillWritesSummary) {
    const fs::path dir = scratch("input_error");
    json j = base_config();
    j["solver"] = {{"tol", 0.0}};
    EXPECT_EQ(run(Command::Solve, write_config(dir, j), dir / "out", quiet()), kInputError);
    const json s = read_json(dir / "out" / "summary.json");
    EXPECT_EQ(s["status"], "input-error");
    EXPECT_NE(s["metrics"]["error"].get<std::string>().find("solver.tol"), std::string::npos);
}

TEST(Run, SolveWithoutDataIsInputError) {
    const fs::path dir = scratch("no_data");
    EXPECT_EQ(run(Command::Solve, write_config(dir, base_config()), dir / "out", quiet()),
              kInputError);
}

TEST(Run, TransformChainReproducesBundle) {
    const fs::path dir = scratch("chain");
    json j = base_config();
    ASSERT_EQ(run(Command::Mms, write_config(dir, j), dir / "mms", quiet()), kOk);

    j["data"] = {{"nonclassical", "mms/nonclassical/manifest.json"}};
    ASSERT_EQ(run(Command::ToClassical, write_config(dir, j), dir / "cl", quiet()), kOk);
    j["data"] = {{"classical", "cl/classical/manifest.json"}};
    ASSERT_EQ(run(Command::ToNonClassical, write_config(dir, j), dir / "nc", quiet()), kOk);

    const auto a = io::load_nonclassical(dir / "mms" / "nonclassical" / "manifest.json");
    const auto b = io::load_nonclassical(dir / "nc" / "nonclassical" / "manifest.json");
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 2; ++k) EXPECT_EQ(a.data.corner[i][k], b.data.corner[i][k]);
    EXPECT_TRUE(bitwise_equal(a.data.y_traces[2], b.data.y_traces[2]));
    EXPECT_EQ(std::memcmp(a.data.rhs.values.data(), b.data.rhs.values.data(), a.data.rhs.values.size() * sizeof(double)),
              0);
    EXPECT_LT(nc_distance(a.data, b.data), 1e-2);
}

TEST(Run, NormReportsComponents) {
    const fs::path dir = scratch("norm");
    const NonClassicalData nc = oracle_nc(x3y2(), linear_setup(16));
    io::save_nonclassical(dir / "nc", nc, Domain{});
    json j = base_config(16);
    j["data"] = {{"nonclassical", "nc/manifest.json"}};
    ASSERT_EQ(run(Command::Norm, write_config(dir, j), dir / "out", quiet()), kOk);
    const json s = read_json(dir / "out" / "summary.json");
    EXPECT_DOUBLE_EQ(s["metrics"]["product_norm"].get<double>(), product_norm(nc, 2.0));
    EXPECT_DOUBLE_EQ(s["metrics"]["components"]["z32"].get<double>(), 12.0);
}

TEST(Binary, ExitCodes) {
    const fs::path dir = scratch("binary");
    const std::string out = " --quiet --out \"" + (dir / "out").string() + "\"";

    // Smooth manufactured run.
    EXPECT_EQ(run_binary("mms --config \"" + write_config(dir, base_config()).string() + "\"" + out), 0);

    // A jump in the classical data fails the agreement diagnostic.
    classical_bundle(dir, 64, true);
    json j = base_config(64);
    j["data"] = {{"classical", "classical/manifest.json"}};
    EXPECT_EQ(run_binary("check-agreement --config \"" + write_config(dir, j).string() + "\"" + out), 2);
    EXPECT_TRUE(read_json(dir / "out" / "agreement.json")["any_flagged"].get<bool>());

    classical_bundle(dir, 64, false);
    EXPECT_EQ(run_binary("check-agreement --config \"" + write_config(dir, j).string() + "\"" + out), 0);

    // A huge coefficient on a singly integrated term blows the iteration up.
    json d = base_config(16);
    d["coefficients"] = {{"a22", 1e6}};
    EXPECT_EQ(run_binary("mms --config \"" + write_config(dir, d).string() + "\"" + out), 3);
    const json s = read_json(dir / "out" / "summary.json");
    EXPECT_EQ(s["status"], "not-converged");
    EXPECT_FALSE(s["metrics"]["convergence"]["converged"].get<bool>());

    // Usage errors.
    EXPECT_EQ(run_binary("solve"), 1);
    EXPECT_EQ(run_binary("solve --config /no/such/file.json"), 1);
    EXPECT_EQ(run_binary("frobnicate"), 1);
    EXPECT_EQ(run_binary("--help"), 0);
}

TEST(Binary, ConvergenceIsDeterministic) {
    const fs::path dir = scratch("determinism");
    json j = base_config();
    j["coefficients"] = {{"a00", 1.0}, {"a21", {{"type", "step"}, {"left", 0.0}, {"right", 0.5}, {"at", 0.5}}}};
    j["convergence"] = {{"sizes", {8, 16, 32}}};
    const fs::path cfg = write_config(dir, j);
    ASSERT_EQ(run_binary("convergence --quiet --config \"" + cfg.string() + "\" --out \"" + (dir / "a").string() + "\""), 0);
    ASSERT_EQ(run_binary("convergence --quiet --config \"" + cfg.string() + "\" --out \"" + (dir / "b").string() + "\""), 0);
    for (const char* f : {"orders.csv", "orders.json"}) EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
    // Output paths in the summary are relative, so it matches too.
    EXPECT_EQ(slurp(dir / "a" / "summary.json"), slurp(dir / "b" / "summary.json"));
}

} // namespace
} // namespace ppcauchy::cli
