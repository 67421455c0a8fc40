#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "conpredict/common/csv.hpp"
#include "fixtures.hpp"

namespace fs = std::filesystem;
using namespace conpredict;
using support::cli_path;
using support::data_path;
using support::read_text;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

class Cli : public ::testing::Test {
protected:
    fs::path dir;

    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir = fs::temp_directory_path() / (std::string("conpredict_cli_") + info->name());
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string path(const std::string& name) const { return (dir / name).string(); }

    Result run(const std::string& args, const std::string& env = "") const {
        const std::string out = path("stdout.txt"), err = path("stderr.txt");
        const std::string cmd = env + " '" + cli_path() + "' " + args + " >'" + out + "' 2>'" + err + "'";
        const int status = std::system(cmd.c_str());
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_text(out), read_text(err)};
    }
};

std::string q(const std::string& s) { return "'" + s + "'"; }

void write_text(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_F(Cli, ExitCodes) {
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("frobnicate").code, 1);
    EXPECT_EQ(run("metrics " + q(path("missing.mcc"))).code, 1);
    EXPECT_EQ(run("--version").code, 0);

    const std::string bad = path("bad.mcc");
    write_text(bad, "int main() { return 0 }\n");
    const auto r = run("parse " + q(bad));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("1:"), std::string::npos) << r.err;

    const std::string labels = path("labels.csv");
    write_text(labels, "program,function,label\nnope,main,1\n");
    EXPECT_EQ(run("assemble --metrics " + q(labels) + " --labels " + q(labels)).code, 2);
}

TEST_F(Cli, WorkedExampleMetricTable) {
    const auto r = run("metrics " + q(data_path("figure2.ccfg")) + " --node-weight 2");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto t = csv::parse(r.out);
    ASSERT_EQ(t.header, (std::vector<std::string>{"program", "function", "SPC", "SVC", "CSC", "CEC", "CCC", "SVD"}));
    std::map<std::string, std::vector<std::string>> rows;
    for (const auto& row : t.rows) rows[row[1]] = {row.begin() + 2, row.end()};
    EXPECT_EQ(rows["main"], (std::vector<std::string>{"2", "0", "0", "4", "5", "0"}));
    EXPECT_EQ(rows["foo"], (std::vector<std::string>{"2", "2", "2", "4", "7", "9"}));
    EXPECT_EQ(rows["bar"], (std::vector<std::string>{"2", "2", "0", "4", "5", "4"}));
}

TEST_F(Cli, SynthIsSeededAndDeterministic) {
    const auto a = run("--seed 5 synth --n 60 --faulty 0.2 -o " + q(path("a.csv")));
    const auto b = run("synth --n 60 --faulty 0.2 -o " + q(path("b.csv")), "CONPREDICT_SEED=5");
    const auto c = run("--seed 6 synth --n 60 --faulty 0.2 -o " + q(path("c.csv")));
    ASSERT_EQ(a.code, 0) << a.err;
    ASSERT_EQ(b.code, 0) << b.err;
    ASSERT_EQ(c.code, 0) << c.err;
    EXPECT_EQ(read_text(path("a.csv")), read_text(path("b.csv")));
    EXPECT_NE(read_text(path("a.csv")), read_text(path("c.csv")));
    EXPECT_TRUE(fs::exists(path("a.json")));
    const auto t = csv::parse(read_text(path("a.csv")));
    EXPECT_EQ(t.rows.size(), 60u);
}

TEST_F(Cli, MutateCountsMatchManifest) {
    const auto r = run("mutate " + q(data_path("corpus/queue.mcc")) + " --out-dir " + q(path("m")));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto mus = csv::parse(read_text(path("m/mus.csv")));
    long total = 0;
    for (const auto& row : mus.rows)
        for (std::size_t i = 2; i < row.size(); ++i) total += std::stol(row[i]);
    long files = 0;
    for (const auto& e : fs::directory_iterator(path("m"))) files += e.path().extension() == ".mcc";
    EXPECT_EQ(total, files);
    EXPECT_GT(total, 0);
}

TEST_F(Cli, PipelineEqualsChainedSubcommands) {
    const std::string corpus = data_path("corpus");
    const std::string labels = data_path("corpus_labels.csv");
    const std::string study = " --trees 5 --folds 2 --repeats 2 --select-trees 3 --select-folds 2 --stale-limit 1";
    const auto p = run("--seed 3 pipeline " + q(corpus) + " " + q(labels) + study +
                       " --seeds 5 --out-dir " + q(path("pipe")));
    ASSERT_EQ(p.code, 0) << p.err;

    std::vector<std::string> tables;
    for (const std::string prog : {"bank", "cache", "pool", "queue", "stats"}) {
        const std::string src = corpus + "/" + prog + ".mcc";
        const std::string m = path(prog + "_metrics.csv");
        ASSERT_EQ(run("metrics " + q(src) + " -o " + q(m)).code, 0);
        ASSERT_EQ(run("mutate " + q(src) + " --out-dir " + q(path(prog))).code, 0);
        const auto e = run("--seed 3 exec " + q(src) + " --mutants " + q(path(prog + "/manifest.json")) +
                           " --seeds 5 --out-dir " + q(path(prog)));
        ASSERT_EQ(e.code, 0) << e.err;
        tables.push_back(m);
        tables.push_back(path(prog + "/mus.csv"));
        tables.push_back(path(prog + "/dynamic.csv"));
    }
    std::string args = "assemble --features all --labels " + q(labels) + " -o " + q(path("dataset.csv")) + " --metrics";
    for (const auto& t : tables) args += " " + q(t);
    const auto a = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(read_text(path("dataset.csv")), read_text(path("pipe/dataset.csv")));

    const auto ev = run("--seed 3 evaluate " + q(path("dataset.csv")) + study + " --out-dir " + q(path("eval")));
    ASSERT_EQ(ev.code, 0) << ev.err;
    const auto mine = csv::parse(read_text(path("eval/report.csv")));
    const auto theirs = csv::parse(read_text(path("pipe/report.csv")));
    ASSERT_EQ(mine.header, theirs.header);
    ASSERT_EQ(mine.rows.size(), theirs.rows.size());
    // Only the subject column differs (directory name against file name).
    for (std::size_t i = 0; i < mine.rows.size(); ++i)
        for (std::size_t j = 0; j < mine.header.size(); ++j)
            if (mine.header[j] != "subject") EXPECT_EQ(mine.rows[i][j], theirs.rows[i][j]) << i << "," << j;
}
