#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gascollide/cli/commands.hpp"
#include "gascollide/cli/config.hpp"
#include "gascollide/cli/csv.hpp"
#include "gascollide/errors.hpp"

using namespace gascollide;
using namespace gascollide::cli;
namespace fs = std::filesystem;

namespace {

KeyValueConfig kv_from(const std::string& text)
{
    std::istringstream in(text);
    return KeyValueConfig::parse(in);
}

fs::path scratch_dir()
{
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("gas_collide_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path write_config(const std::string& name, const std::string& text)
{
    const fs::path p = scratch_dir() / name;
    std::ofstream(p) << text;
    return p;
}

int run_binary(const std::string& args)
{
    const std::string cmd = std::string(GAS_COLLIDE_BIN) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const std::string kSmallSpin = "J = 2\nD = 1\nalpha = 1\nomega_S_over_ER = 0.5\nA = equilibrium\n"
                               "t_max = 5\nn_samples = 11\ninitial_state = mixed:0.01\nmicro_samples = 200\n";

}  // namespace

TEST_CASE("key value parsing")
{
    const auto kv = kv_from("# comment\n  J = 20  \n\nD=1 # trailing\nA = equilibrium\n");
    CHECK(kv.get("J") == "20");
    CHECK(kv.get("D") == "1");
    CHECK(kv.entries().size() == 3);
    CHECK_THROWS_AS(kv_from("J = 1\nJ = 2\n"), InvalidArgument);
    CHECK_THROWS_AS(kv_from("no equals sign\n"), InvalidArgument);
    CHECK_THROWS_AS(KeyValueConfig::parse_file("/nonexistent/x.conf"), IoError);
}

TEST_CASE("scenario config")
{
    const ScenarioConfig c = ScenarioConfig::from(kv_from("J = 1/2\nD = 2\nalpha = 0.5\nomega_S_over_ER = 2\nA = equilibrium\n"));
    CHECK(c.spin.J.twice_j() == 1);
    CHECK(c.spin.A == doctest::Approx(3.0));

    const ScenarioConfig g = ScenarioConfig::from(kv_from("alpha_grid = 1:2:3\ns_grid = -1, 0.5\n"));
    CHECK(g.alpha_grid == std::vector<double>{1.0, 1.5, 2.0});
    CHECK(g.s_grid == std::vector<double>{-1.0, 0.5});

    const ScenarioConfig i = ScenarioConfig::from(kv_from("initial_state = custom: 0.5, 0.25, 0.25\nJ = 1\n"));
    CHECK(i.initial.kind == InitialState::Kind::custom);
    CHECK(i.initial.populations.size() == 3);

    CHECK_THROWS_AS(ScenarioConfig::from(kv_from("unknown_key = 1\n")), InvalidArgument);
    CHECK_THROWS_AS(ScenarioConfig::from(kv_from("t_max = -1\n")), InvalidArgument);
    CHECK_THROWS_AS(ScenarioConfig::from(kv_from("J = 0.3\n")), InvalidArgument);
    CHECK_THROWS_AS(ScenarioConfig::from(kv_from("alpha = abc\n")), InvalidArgument);
    CHECK_THROWS_AS(ScenarioConfig::from(kv_from("gamma_tilde = 1\nn_R3 = 0.1\nV0_over_ER = 1\n")), InvalidArgument);
    CHECK_THROWS_AS(ScenarioConfig::from(kv_from("initial_state = gibbs:0\n")), InvalidArgument);
    CHECK_THROWS_AS(ScenarioConfig::from(kv_from("alpha_grid = 0:1:3\n")), InvalidArgument);
}

TEST_CASE("csv output format")
{
    CHECK(CsvWriter::format(0.1) == "0.10000000000000001");
    CHECK(CsvWriter::format(std::nan("")) == "nan");
    CHECK(CsvWriter::format(-HUGE_VAL) == "-inf");
    const fs::path p = scratch_dir() / "fmt.csv";
    {
        CsvWriter w(p.string(), {"a", "b", "c"});
        w.row({1.5, 2LL, std::string("x")});
        CHECK_THROWS_AS(w.row({1.0}), InvalidArgument);
        w.close();
    }
    CHECK(slurp(p) == "a,b,c\n1.5,2,x\n");
    CHECK_THROWS_AS(CsvWriter("/nonexistent/dir/out.csv", {"a"}), IoError);
}

TEST_CASE("integral command")
{
    const fs::path out = scratch_dir() / "integral.csv";
    const RunReport r = run_command("integral", kv_from("alpha_grid = 1\ns_grid = 0\n"), out.string());
    CHECK(r.exit_code == kExitOk);
    const std::string text = slurp(out);
    CHECK(text.rfind("alpha,s,I\n", 0) == 0);
    std::istringstream rows(text);
    std::string header, row;
    std::getline(rows, header);
    std::getline(rows, row);
    CHECK(std::stod(row.substr(row.rfind(',') + 1)) == doctest::Approx(0.4).epsilon(1e-9));

    CHECK(run_command("integral", kv_from("alpha_grid = 1\n"), out.string()).exit_code == kExitInvalidConfig);
    CHECK(run_command("integral", kv_from("alpha_grid = 1\ns_grid = 0\n"), "/nonexistent/dir/x.csv").exit_code
          == kExitInvalidConfig);
}

TEST_CASE("verify reflects the module reports")
{
    const RunReport eq = run_command("verify", kv_from(kSmallSpin), "");
    CHECK(eq.exit_code == kExitOk);
    CHECK(eq.checks.size() == 4);
    CHECK(eq.all_pass());

    const RunReport two = run_command("verify", kv_from("J = 2\nD = 2\nA = 1.5\nomega_S_over_ER = 0.5\n"
                                                        "t_max = 5\nn_samples = 11\nmicro_samples = 200\n"
                                                        "initial_state = mixed:0.01\n"),
                                      "");
    CHECK(two.exit_code == kExitCheckFailure);
    for (const Check& c : two.checks) {
        if (c.name == "local_detailed_balance") {
            CHECK_FALSE(c.pass);
        }
        if (c.name == "microreversibility") {
            CHECK(c.pass);
        }
    }
}

TEST_CASE("rates command for the spin model")
{
    const fs::path out = scratch_dir() / "rates.csv";
    const RunReport r = run_command("rates", kv_from(kSmallSpin), out.string());
    CHECK(r.exit_code == kExitOk);
    CHECK(slurp(out).rfind("i,j,rate,analytic,rel_dev\n", 0) == 0);
}

TEST_CASE("ergotropy command output is deterministic")
{
    const fs::path a = scratch_dir() / "erg_a.csv";
    const fs::path b = scratch_dir() / "erg_b.csv";
    REQUIRE(run_command("ergotropy", kv_from(kSmallSpin), a.string()).exit_code == kExitOk);
    REQUIRE(run_command("ergotropy", kv_from(kSmallSpin), b.string()).exit_code == kExitOk);
    const std::string text = slurp(a);
    CHECK(text == slurp(b));
    CHECK(text.rfind("t_gamma,ergotropy_over_hbar_omegaS,E_S,S,Q_dot,clausius_residual\n", 0) == 0);
}

TEST_CASE("sweeps write per-run files and a merged csv")
{
    const fs::path out = scratch_dir() / "sweep.csv";
    const RunReport r = run_sweep("rates", kv_from(kSmallSpin), out.string(), "D", {"1", "2"});
    CHECK(r.exit_code == kExitOk);
    CHECK(r.runs.size() == 2);
    CHECK(fs::exists(scratch_dir() / "sweep.D_1.csv"));
    CHECK(fs::exists(scratch_dir() / "sweep.D_2.csv"));
    CHECK(slurp(out).rfind("D,i,j,rate", 0) == 0);
}

TEST_CASE("binary exit codes")
{
    const std::string src = GAS_COLLIDE_SOURCE_DIR;
    const fs::path spin = write_config("spin.conf", kSmallSpin);
    CHECK(run_binary("verify --config " + spin.string()) == 0);
    CHECK(run_binary("verify --config /nonexistent.conf") == 2);
    CHECK(run_binary("bogus --config " + spin.string()) == 2);

    const fs::path empty_grid = write_config("empty.conf", "alpha_grid = 1\n");
    CHECK(run_binary("integral --config " + empty_grid.string() + " --out " + (scratch_dir() / "e.csv").string()) == 2);

    const fs::path two = write_config("two.conf", "J = 2\nD = 2\nA = 1.5\nomega_S_over_ER = 0.5\nt_max = 5\n"
                                                  "n_samples = 11\nmicro_samples = 200\ninitial_state = mixed:0.01\n");
    CHECK(run_binary("verify --config " + two.string()) == 4);

    std::string table = slurp(src + "/configs/table.conf");
    const auto at = table.find("../data/born_table.csv");
    REQUIRE(at != std::string::npos);
    table.replace(at, std::string("../data/born_table.csv").size(), src + "/data/born_table_corrupted.csv");
    table += "t_max = 5\nn_samples = 6\n";
    // drop the original sampling keys that were just overridden
    for (const char* key : {"t_max = 200\n", "n_samples = 101\n"}) {
        table.erase(table.find(key), std::string(key).size());
    }
    const fs::path corrupted = write_config("corrupted.conf", table);
    CHECK(run_binary("verify --config " + corrupted.string()) == 4);
}
