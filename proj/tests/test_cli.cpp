#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr combined
};

std::string binary() {
    const char* b = std::getenv("WCPL_BIN");
    REQUIRE_MESSAGE(b != nullptr, "WCPL_BIN must point at the built binary");
    return b;
}

RunResult run(const std::string& args) {
    const std::string cmd = binary() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult res;
    char buf[4096];
    while (std::fgets(buf, sizeof(buf), pipe)) res.output += buf;
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("wcpl_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string write_config(const fs::path& dir, const std::string& body) {
    const fs::path p = dir / "exp.ini";
    std::ofstream out(p);
    out << body;
    return p.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Data rows of a CSV/TSV file: skips # comments, blank lines, and an
// alpha,... header.
std::vector<std::string> data_rows(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("alpha,", 0) == 0 || line.rfind("name,", 0) == 0) continue;
        rows.push_back(line);
    }
    return rows;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string f;
    while (std::getline(ss, f, sep)) out.push_back(f);
    return out;
}

const std::string kGluedProblem =
    "[problem]\n"
    "p = 2\n"
    "N = 3\n"
    "V = glued\n"
    "r0 = 2\n"
    "W_shape = bump\n"
    "W_radius = 1\n"
    "W_amplitude = 1\n";

}  // namespace

TEST_CASE("usage errors exit with the configuration code") {
    CHECK(run("").exit_code == 2);                        // no subcommand
    CHECK(run("frobnicate").exit_code == 2);              // unknown subcommand
    CHECK(run("sweep").exit_code == 2);                   // missing --config
    CHECK(run("sweep --config /nonexistent.ini").exit_code == 2);
}

TEST_CASE("config rejection: unknown key, duplicate key, invalid values") {
    const fs::path dir = fresh_dir("badcfg");
    {
        const std::string cfg = write_config(
            dir, kGluedProblem + "bogus_knob = 3\n[outputs]\ndirectory = o\n");
        const RunResult r = run("make-potential --config " + cfg);
        CHECK(r.exit_code == 2);
        CHECK(r.output.find("bogus_knob") != std::string::npos);
    }
    {
        const std::string cfg = write_config(
            dir, kGluedProblem + "p = 3\n[outputs]\ndirectory = o\n");
        const RunResult r = run("make-potential --config " + cfg);
        CHECK(r.exit_code == 2);  // duplicate key: p appears twice
    }
    {
        // p equals N: no admissible decay regime.
        const std::string cfg = write_config(
            dir,
            "[problem]\np = 2\nN = 2\nV = zero\nW_shape = bump\n"
            "W_radius = 1\nW_amplitude = 1\n[outputs]\ndirectory = o\n");
        const RunResult r = run("make-potential --config " + cfg);
        CHECK(r.exit_code == 2);
        CHECK_FALSE(r.output.empty());
    }
    {
        const std::string cfg = write_config(
            dir, kGluedProblem + "\n[grid]\ngrading = diagonal\n");
        CHECK(run("make-potential --config " + cfg).exit_code == 2);
    }
    {
        const std::string cfg =
            write_config(dir, "[problem]\np = 2\nN = 3\nV = glued\nr0 = 2\n"
                              "W_shape = sawtooth\n");
        CHECK(run("make-potential --config " + cfg).exit_code == 2);
    }
    fs::remove_all(dir);
}

TEST_CASE("make-potential tabulates the inverse-construction potential") {
    const fs::path dir = fresh_dir("mkpot");
    const std::string cfg = write_config(
        dir, "[problem]\np = 2\nN = 3\nV = smooth_tail\n"
             "W_shape = none\n"
             "[grid]\nR_max = 20\ncells = 400\n"
             "[outputs]\ndirectory = " + (dir / "out").string() + "\n");
    const RunResult r = run("make-potential --config " + cfg);
    CHECK(r.exit_code == 0);
    const fs::path tsv = dir / "out" / "potential.tsv";
    REQUIRE(fs::exists(tsv));

    const std::string all = slurp(tsv);
    CHECK(all.find("# radial-potential p=2 N=3") != std::string::npos);
    CHECK(all.find("config-hash=") != std::string::npos);
    CHECK(all.find("generated=") == std::string::npos);  // no timestamp by default

    const auto rows = data_rows(tsv);
    REQUIRE(rows.size() == 401);
    // First row: r = 0, V(0) = -3 for this profile.
    std::stringstream first(rows.front());
    double r0 = -1, v0 = 0;
    first >> r0 >> v0;
    CHECK(r0 == 0.0);
    CHECK(v0 == doctest::Approx(-3.0).epsilon(1e-9));
    fs::remove_all(dir);
}

TEST_CASE("make-potential: glued construction is supported inside the blend") {
    const fs::path dir = fresh_dir("mkglue");
    const std::string cfg = write_config(
        dir, kGluedProblem +
                 "[grid]\nR_max = 10\ncells = 500\n"
                 "[outputs]\ndirectory = " + (dir / "out").string() + "\n");
    REQUIRE(run("make-potential --config " + cfg).exit_code == 0);
    for (const std::string& row : data_rows(dir / "out" / "potential.tsv")) {
        std::stringstream ss(row);
        double r = 0, v = 0;
        ss >> r >> v;
        if (r < 0.999 || r > 2.001)
            CHECK(std::fabs(v) < 1e-12);  // potential lives on [1, 2] only
    }
    fs::remove_all(dir);
}

TEST_CASE("ground-state solves one coupling and reports a negative level") {
    const fs::path dir = fresh_dir("gs");
    const std::string cfg = write_config(
        dir, "[problem]\np = 2\nN = 3\nV = zero\nW_shape = well\n"
             "W_radius = 1\nW_amplitude = 1\n"
             "[grid]\nR_max = 15\nR_schedule = 10, 15\ncells = 1200\n"
             "grading = geometric\nratio = 1.005\n"
             "[outputs]\ndirectory = " + (dir / "out").string() + "\n");
    const RunResult r = run("ground-state --alpha 5 --config " + cfg);
    CHECK(r.exit_code == 0);
    const auto rows = data_rows(dir / "out" / "ground_state.csv");
    REQUIRE(rows.size() == 1);
    const auto f = split(rows.front(), ',');
    REQUIRE(f.size() >= 6);
    CHECK(std::stod(f[0]) == doctest::Approx(5.0));   // alpha
    const double lambda = std::stod(f[1]);
    CHECK(lambda < -0.8);   // deep level of the unit well at this coupling
    CHECK(lambda > -1.0);
    CHECK(f[5] == "1");     // converged flag
    fs::remove_all(dir);
}

TEST_CASE("ground-state without a coupling and without a sweep block fails") {
    const fs::path dir = fresh_dir("gsnone");
    const std::string cfg = write_config(
        dir, kGluedProblem + "[outputs]\ndirectory = " + (dir / "out").string() +
                 "\n");
    const RunResult r = run("ground-state --config " + cfg);
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("alpha") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("sweep writes a deterministic curve and an honest fit verdict") {
    const std::string body =
        kGluedProblem +
        "[grid]\nR_max = 120\ncells = 2000\ngrading = geometric\nratio = 1.004\n"
        "[sweep]\nalphas = 0.25, 0.125, 0.0625, 0.03125\n"
        "[solver]\nseed = 1\n";

    const fs::path dir_a = fresh_dir("sweep_a");
    const fs::path dir_b = fresh_dir("sweep_b");
    const std::string cfg_a = write_config(dir_a, body);
    const std::string cfg_b = write_config(dir_b, body);

    const RunResult ra =
        run("sweep --config " + cfg_a + " --out " + (dir_a / "out").string());
    // Four alphas span under a decade: the window check must fail, which is
    // reported through the checks-failed exit code, not an error code.
    CHECK(ra.exit_code == 4);
    CHECK(ra.output.find("pass=false") != std::string::npos);

    const fs::path curve_a = dir_a / "out" / "curve.csv";
    REQUIRE(fs::exists(curve_a));
    const auto rows = data_rows(curve_a);
    REQUIRE(rows.size() == 4);
    // Ascending alphas, all converged, all negative.
    double prev_alpha = 0.0;
    for (const std::string& row : rows) {
        const auto f = split(row, ',');
        REQUIRE(f.size() >= 6);
        const double alpha = std::stod(f[0]);
        CHECK(alpha > prev_alpha);
        prev_alpha = alpha;
        CHECK(std::stod(f[1]) < 0.0);
        CHECK(f[5] == "1");
    }

    // fit.json carries the same verdict and the window bounds.
    const fs::path fit_a = dir_a / "out" / "fit.json";
    REQUIRE(fs::exists(fit_a));
    const std::string fit_text = slurp(fit_a);
    CHECK(fit_text.find("\"pass\": false") != std::string::npos);
    CHECK(fit_text.find("\"model\": \"power\"") != std::string::npos);

    // Byte-identical reproduction from the same config and seed.
    const RunResult rb =
        run("sweep --config " + cfg_b + " --out " + (dir_b / "out").string());
    CHECK(rb.exit_code == 4);
    CHECK(slurp(dir_b / "out" / "curve.csv") == slurp(curve_a));

    // Re-fitting the stored curve reproduces the sweep's fit verbatim.
    const RunResult rf =
        run("fit --config " + cfg_a + " --out " + (dir_a / "out").string());
    CHECK(rf.exit_code == 4);
    CHECK(slurp(dir_a / "out" / "fit.json") == fit_text);

    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("fit without a stored curve points at the missing file") {
    const fs::path dir = fresh_dir("fitmiss");
    const std::string cfg = write_config(
        dir, kGluedProblem + "[outputs]\ndirectory = " + (dir / "out").string() +
                 "\n");
    const RunResult r = run("fit --config " + cfg);
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("curve.csv") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("verify-bounds passes all closed-form checks") {
    const fs::path dir = fresh_dir("vb");
    const std::string cfg = write_config(
        dir, kGluedProblem + "[outputs]\ndirectory = " + (dir / "out").string() +
                 "\n");
    const RunResult r = run("verify-bounds --config " + cfg);
    CHECK(r.exit_code == 0);
    const auto rows = data_rows(dir / "out" / "bounds.csv");
    CHECK(rows.size() == 18);
    for (const std::string& row : rows) {
        const auto f = split(row, ',');
        CHECK(f.back() == "1");  // pass column
    }
    fs::remove_all(dir);
}

TEST_CASE("criticality check certifies the zero eigenvalue at zero coupling") {
    const fs::path dir = fresh_dir("crit");
    const std::string cfg = write_config(
        dir, kGluedProblem +
                 "[grid]\nR_max = 600\nR_schedule = 300, 600\ncells = 2500\n"
                 "grading = geometric\nratio = 1.005\n"
                 "[outputs]\ndirectory = " + (dir / "out").string() + "\n");
    const RunResult r = run("criticality-check --config " + cfg);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("criticality: lambda(0)=") != std::string::npos);
    CHECK(r.output.find("pass=true") != std::string::npos);
    REQUIRE(fs::exists(dir / "out" / "criticality.csv"));
    fs::remove_all(dir);
}

TEST_CASE("seed override and timestamps are reflected in the provenance") {
    const fs::path dir = fresh_dir("prov");
    const std::string cfg = write_config(
        dir, "[problem]\np = 2\nN = 3\nV = smooth_tail\nW_shape = none\n"
             "[grid]\nR_max = 10\ncells = 200\n"
             "[outputs]\ndirectory = " + (dir / "out").string() + "\n");
    REQUIRE(run("make-potential --config " + cfg + " --seed 7").exit_code == 0);
    const std::string body = slurp(dir / "out" / "potential.tsv");
    CHECK(body.find("seed=7") != std::string::npos);
    CHECK(body.find("generated=") == std::string::npos);

    REQUIRE(run("make-potential --config " + cfg + " --timestamps").exit_code == 0);
    CHECK(slurp(dir / "out" / "potential.tsv").find("generated=") !=
          std::string::npos);
    fs::remove_all(dir);
}
