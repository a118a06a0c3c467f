#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>

#include "doctest.h"
#include "iqp/cli.hpp"
#include "iqp/io.hpp"
#include "iqp/sim.hpp"
#include "json.hpp"

using namespace iqp;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "iqp_workbench");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

struct Scratch {
    fs::path dir;
    explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("iqp_cli_" + name)) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    std::string operator/(const std::string& file) const { return (dir / file).string(); }
};

}  // namespace

TEST_CASE("generate is deterministic and writes the documented shapes") {
    Scratch tmp("generate");
    REQUIRE(run_cli({"generate", "stabilizer", "300", "360", "4", "--seed", "11", "--out", tmp / "a"}).code == 0);
    REQUIRE(run_cli({"generate", "stabilizer", "300", "360", "4", "--seed", "11", "--out", tmp / "b"}).code == 0);
    for (const char* ext : {".matrix", ".secret", ".json"}) CHECK(read_file(tmp / ("a" + std::string(ext))) == read_file(tmp / ("b" + std::string(ext))));

    const BitMatrix h = parse_matrix(read_file(tmp / "a.matrix"));
    CHECK(h.rows() == 360);
    CHECK(h.cols() == 300);
    CHECK(rank(h) == 300);
    const auto meta = nlohmann::json::parse(read_file(tmp / "a.json"));
    CHECK(meta["params"]["g"] == 4);
    CHECK(parse_secret(read_file(tmp / "a.secret")).size() == 300);

    REQUIRE(run_cli({"generate", "stabilizer", "300", "360", "4", "--seed", "12", "--out", tmp / "c"}).code == 0);
    CHECK(read_file(tmp / "a.matrix") != read_file(tmp / "c.matrix"));

    REQUIRE(run_cli({"generate", "qrc", "103", "155", "--out", tmp / "q", "--challenge"}).code == 0);
    const BitMatrix hq = parse_matrix(read_file(tmp / "q.matrix"));
    CHECK(hq.rows() == 206);
    CHECK(hq.cols() == 155);
    CHECK_FALSE(fs::exists(tmp / "q.secret"));

    CHECK(run_cli({"generate", "stabilizer", "10", "20", "11", "--out", tmp / "bad"}).code == 2);
    CHECK(run_cli({"generate", "qrc", "21", "15", "--out", tmp / "bad"}).code == 2);
    CHECK(run_cli({"generate", "stabilizer", "300", "360", "4", "--out", tmp / "bad", "--redundancy-mode", "nope"}).code == 2);
    CHECK(run_cli({"generate", "stabilizer", "300", "360"}).code == 2);
}

TEST_CASE("attack exit codes and recovered secret") {
    Scratch tmp("attack");
    REQUIRE(run_cli({"generate", "stabilizer", "300", "360", "4", "--seed", "21", "--out", tmp / "inst"}).code == 0);
    const Result r = run_cli({"attack", "radical", tmp / "inst.matrix", "--out", tmp / "rec"});
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["outcome"] == "found");
    CHECK(parse_secret(read_file(tmp / "rec.secret")) == parse_secret(read_file(tmp / "inst.secret")));

    // the identity has no structure for any attack to latch onto
    write_file_atomic(tmp / "eye.matrix", "3 3\n100\n010\n001\n");
    const Result fail = run_cli({"attack", "radical", tmp / "eye.matrix", "--out", tmp / "eye"});
    CHECK(fail.code == 1);
    CHECK(nlohmann::json::parse(fail.out)["outcome"] == "failed");
    CHECK_FALSE(fs::exists(tmp / "eye.secret"));

    write_file_atomic(tmp / "broken.matrix", "3 3\n100\n01\n001\n");
    const Result broken = run_cli({"attack", "radical", tmp / "broken.matrix"});
    CHECK(broken.code == 2);
    CHECK(broken.err.find("line 3") != std::string::npos);

    CHECK(run_cli({"attack", "radical", tmp / "missing.matrix"}).code == 2);
    CHECK(run_cli({"attack", "nonsense", tmp / "inst.matrix"}).code == 2);
    CHECK(run_cli({"attack", "razor", tmp / "inst.matrix", "--p", "1.5"}).code == 2);
}

TEST_CASE("lazy attack reports are reproducible") {
    Scratch tmp("lazy");
    REQUIRE(run_cli({"generate", "qrc", "23", "20", "--seed", "3", "--out", tmp / "q"}).code == 0);
    const Result a = run_cli({"attack", "lazy", tmp / "q.matrix", "--seed", "5", "--out", tmp / "a"});
    const Result b = run_cli({"attack", "lazy", tmp / "q.matrix", "--seed", "5", "--out", tmp / "b"});
    CHECK(a.code == b.code);
    CHECK(read_file(tmp / "a.json") == read_file(tmp / "b.json"));
    if (a.code == 0) CHECK(parse_secret(read_file(tmp / "a.secret")) == parse_secret(read_file(tmp / "q.secret")));
}

TEST_CASE("razor warns when p is outside the suggested interval") {
    Scratch tmp("razor");
    REQUIRE(run_cli({"generate", "stabilizer", "300", "360", "4", "--seed", "8", "--redundancy-mode", "challenge-legacy",
                     "--out", tmp / "l"})
                .code == 0);
    const Result r = run_cli({"attack", "razor", tmp / "l.matrix", "--meta", tmp / "l.json", "--p", "0.6", "--endurance", "2"});
    CHECK(r.err.find("warning") != std::string::npos);
    CHECK((r.code == 0 || r.code == 1));
}

TEST_CASE("singletons") {
    Scratch tmp("singletons");
    write_file_atomic(tmp / "h.matrix", "3 2\n10\n01\n11\n");
    const Result r = run_cli({"singletons", tmp / "h.matrix", "--out", tmp / "t"});
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["count"] == 0);
    write_file_atomic(tmp / "e.matrix", "3 2\n10\n01\n00\n");
    CHECK(nlohmann::json::parse(run_cli({"singletons", tmp / "e.matrix"}).out)["count"] == 2);
}

TEST_CASE("simulate and verify") {
    Scratch tmp("verify");
    REQUIRE(run_cli({"generate", "stabilizer", "10", "20", "2", "--seed", "4", "--out", tmp / "s"}).code == 0);
    REQUIRE(run_cli({"simulate", tmp / "s.matrix", "--samples", "4000", "--seed", "9", "--out", tmp / "x.samples"}).code == 0);
    CHECK(parse_samples(read_file(tmp / "x.samples")).size() == 4000);

    const Result ok = run_cli({"verify", tmp / "x.samples", tmp / "s.secret", "--g", "2"});
    CHECK(ok.code == 0);
    const auto j = nlohmann::json::parse(ok.out);
    CHECK(j["verdict"] == "accept");
    CHECK(j["expected_bias"].get<double>() == doctest::Approx(0.75));

    // uniform samples against a g = 4 secret: bias one half instead of 0.625
    Rng rng(77);
    std::vector<BitVector> uniform;
    for (int i = 0; i < 10000; ++i) uniform.push_back(BitVector::random(300, rng));
    write_file_atomic(tmp / "u.samples", emit_samples(uniform));
    REQUIRE(run_cli({"generate", "stabilizer", "300", "360", "4", "--seed", "5", "--out", tmp / "big"}).code == 0);
    const Result rej = run_cli({"verify", tmp / "u.samples", tmp / "big.secret", "--g", "4"});
    CHECK(rej.code == 1);
    CHECK(nlohmann::json::parse(rej.out)["verdict"] == "reject");

    write_file_atomic(tmp / "empty.samples", "");
    const Result empty = run_cli({"verify", tmp / "empty.samples", tmp / "s.secret", "--g", "2"});
    CHECK(empty.code == 2);
    CHECK(empty.err.find("empty") != std::string::npos);
    CHECK(run_cli({"verify", tmp / "u.samples", tmp / "s.secret", "--g", "2"}).code == 2);

    // stdout sampling matches the file for the same seed
    const Result printed = run_cli({"simulate", tmp / "s.matrix", "--samples", "4000", "--seed", "9"});
    CHECK(printed.out == read_file(tmp / "x.samples"));
    write_file_atomic(tmp / "wide.matrix", emit_matrix(BitMatrix(1, 20)));
    CHECK(run_cli({"simulate", tmp / "wide.matrix"}).code == 2);
}

TEST_CASE("experiments") {
    Scratch tmp("experiment");
    const Result one = run_cli({"experiment", "sigmoid", "60", "80", "2", "--trials", "1", "--out", tmp / "sig"});
    CHECK(one.code == 0);
    const std::string csv = read_file(tmp / "sig.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
    CHECK(csv.rfind("family,", 0) == 0);
    CHECK(fs::exists(tmp / "sig.bins.csv"));
    CHECK(fs::exists(tmp / "sig.jsonl"));

    REQUIRE(run_cli({"experiment", "sigmoid", "60", "80", "2", "--trials", "12", "--seed", "3", "--out", tmp / "a"}).code == 0);
    REQUIRE(run_cli({"experiment", "sigmoid", "60", "80", "2", "--trials", "12", "--seed", "3", "--out", tmp / "b"}).code == 0);
    CHECK(read_file(tmp / "a.bins.csv") == read_file(tmp / "b.bins.csv"));

    CHECK(run_cli({"experiment", "qrc-sweep", "23", "--trials", "2", "--out", tmp / "sw"}).code == 0);
    CHECK(fs::exists(tmp / "sw.points.csv"));
    CHECK(run_cli({"experiment", "kernel-stats", "23", "--trials", "1", "--probes", "3", "--out", tmp / "ks"}).code == 0);
    CHECK(fs::exists(tmp / "ks.summary.csv"));
    CHECK(run_cli({"experiment", "qrc-sweep", "21", "--out", tmp / "x"}).code == 2);
    CHECK(run_cli({"experiment", "nonsense", "--out", tmp / "x"}).code == 2);
}

TEST_CASE("installed binary exit codes") {
    const char* exe = std::getenv("IQP_WORKBENCH");
    if (!exe) {
        MESSAGE("IQP_WORKBENCH not set; skipping process-level checks");
        return;
    }
    Scratch tmp("process");
    const std::string base = std::string(exe) + " ";
    const int missing = std::system((base + "attack radical " + (tmp / "none.matrix") + " >/dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(missing) == 2);
    const int gen = std::system((base + "generate qrc 23 20 --out " + (tmp / "q") + " >/dev/null").c_str());
    CHECK(WEXITSTATUS(gen) == 0);
    const int help = std::system((base + "--help >/dev/null").c_str());
    CHECK(WEXITSTATUS(help) == 0);
}
