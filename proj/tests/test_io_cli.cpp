#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "opk/cli.hpp"
#include "opk/error.hpp"
#include "opk/io.hpp"
#include "oracles.hpp"

using namespace opk;
using io::Json;

namespace {

struct RunResult {
    int code;
    std::string out;
    std::string err;
};

RunResult run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "opk");
    std::vector<const char *> argv;
    for (const auto &a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
public:
    TempDir() {
        path_ = std::filesystem::temp_directory_path() / ("opk_test_" + std::to_string(counter_++) + "_" +
                                                          std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    [[nodiscard]] std::string write(const std::string &name, const std::string &text) const {
        const auto p = path_ / name;
        std::ofstream(p) << text;
        return p.string();
    }
    [[nodiscard]] std::string file(const std::string &name) const { return (path_ / name).string(); }

private:
    static inline int counter_ = 0;
    std::filesystem::path path_;
};

std::string slurp(const std::string &path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

OperatorKernel gaussian2() {
    return OperatorKernel::radial(RadialProfile::gaussian(), OperatorMeasure(2, {{1.0, HermitianMatrix::identity(2)}}), 1);
}

}  // namespace

TEST_SUITE("io") {
    TEST_CASE("vectors and matrices round-trip") {
        oracle::Rng rng(5);
        const CVector v = oracle::random_vector(rng, 3);
        CHECK(io::cvector_from_json(io::to_json(v), "v") == v);
        const HermitianMatrix h = oracle::random_psd(rng, 3, 2);
        CHECK(io::hermitian_from_json(io::to_json(h), "G") == h);
        const Json real_only = Json::parse(R"({"re": [1.5, -2]})");
        CHECK(io::cvector_from_json(real_only, "v") == CVector{1.5, -2.0});
        const Json skew = Json::parse(R"({"re": [[1, 2], [0, 1]]})");
        CHECK_THROWS_AS(io::hermitian_from_json(skew, "G"), Error);
    }

    TEST_CASE("kernel descriptors round-trip") {
        oracle::Rng rng(6);
        const OperatorMeasure mu(2, {{0.5, oracle::random_psd(rng, 2, 1)}, {2.0, oracle::random_psd(rng, 2, 2)}});
        const std::vector<OperatorKernel> kernels{
            OperatorKernel::radial(RadialProfile::gaussian(), mu, 3),
            OperatorKernel::radial(RadialProfile::askey(5), mu, 2),
            OperatorKernel::radial(RadialProfile::omega(4), mu, 3),
            OperatorKernel::plane_wave({{{0.3, -1.0}, oracle::random_psd(rng, 2, 2)}}, 2, 2),
            OperatorKernel::shifted_gaussian({1.0, 0.5}),
        };
        for (const auto &k : kernels) {
            const Json j = io::to_json(k);
            CHECK(io::kernel_from_json(j) == k);
            CHECK(io::to_json(io::kernel_from_json(j)).dump() == j.dump());
        }
        CHECK(io::measure_from_json(io::to_json(mu)) == mu);
    }

    TEST_CASE("vector measures round-trip") {
        oracle::Rng rng(7);
        DerivVectorMeasure eta(2, 2, 2);
        for (const auto &alpha : MultiIndex::graded_lex(2, 2)) eta.add(alpha, rng.point(2, 1.0), oracle::random_vector(rng, 2));
        CHECK(io::deriv_measure_from_json(io::to_json(eta), 2, 2) == eta);
    }

    TEST_CASE("unknown and malformed fields are rejected with their path") {
        Json j = io::to_json(gaussian2());
        j["extra"] = 1;
        try {
            (void)io::kernel_from_json(j);
            FAIL("expected InvalidDescriptor");
        } catch (const Error &e) {
            CHECK(e.code() == ErrorCode::InvalidDescriptor);
            CHECK(std::string(e.what()).find("extra") != std::string::npos);
        }
        Json bad_kind = io::to_json(gaussian2());
        bad_kind["family"]["kind"] = "matern";
        CHECK_THROWS_AS(io::kernel_from_json(bad_kind), Error);
        Json not_psd = io::to_json(gaussian2());
        not_psd["measure"]["atoms"][0]["G"] = Json::parse(R"({"re": [[1, 0], [0, -1]]})");
        CHECK_THROWS_AS(io::kernel_from_json(not_psd), Error);
        CHECK_THROWS_AS(io::integer_from_json(Json(1.5), "n"), Error);
        CHECK_THROWS_AS(io::number_from_json(Json("x"), "t"), Error);
    }
}

TEST_SUITE("cli") {
    TEST_CASE("version and usage errors") {
        CHECK(run_cli({"--version"}).code == cli::kOk);
        CHECK(run_cli({}).code == cli::kInputError);
        CHECK(run_cli({"frobnicate"}).code == cli::kInputError);
        CHECK(run_cli({"probe"}).code == cli::kInputError);
        CHECK(run_cli({"probe", "--input", "/nonexistent/file.json"}).code == cli::kInputError);
    }

    TEST_CASE("eval and gram") {
        TempDir dir;
        Json in{{"kernel", io::to_json(gaussian2())}, {"x", {0.0}}, {"y", {1.0}}};
        const RunResult r = run_cli({"eval", "--input", dir.write("e.json", in.dump()), "--no-timestamp"});
        REQUIRE(r.code == cli::kOk);
        const Json rep = Json::parse(r.out);
        CHECK(rep["command"] == "eval");
        CHECK(rep["exit_code"] == 0);
        CHECK_FALSE(rep.contains("timestamp"));
        CHECK(rep["result"]["value"]["re"][0][0].get<double>() == doctest::Approx(std::exp(-1.0)));

        Json garbage = in;
        garbage["colour"] = "blue";
        CHECK(run_cli({"eval", "--input", dir.write("g.json", garbage.dump())}).code == cli::kInputError);
        CHECK(run_cli({"eval", "--input", dir.write("m.json", "{not json")}).code == cli::kInputError);

        Json pw{{"kernel", io::to_json(OperatorKernel::plane_wave({{{1.0}, HermitianMatrix::identity(1)}}, 1, 1))}, {"t", 0.5}};
        CHECK(run_cli({"eval", "--input", dir.write("pw.json", pw.dump())}).code == cli::kInputError);

        Json g{{"kernel", io::to_json(gaussian2())}, {"points", {{0.0}, {1.0}}}};
        const std::string gpath = dir.write("gram.json", g.dump());
        const RunResult gr = run_cli({"gram", "--input", gpath, "--no-timestamp"});
        REQUIRE(gr.code == cli::kOk);
        CHECK(Json::parse(gr.out)["result"]["dim"] == 4);
        Json dup = g;
        dup["points"] = {{0.0}, {0.0}};
        CHECK(run_cli({"gram", "--input", dir.write("dup.json", dup.dump())}).code == cli::kInputError);

        CHECK(run_cli({"gram", "--input", gpath, "--format", "csv"}).code == cli::kInputError);
        const std::string csv = dir.file("gram.csv");
        REQUIRE(run_cli({"gram", "--input", gpath, "--format", "csv", "--output", csv, "--no-timestamp"}).code == cli::kOk);
        const std::string text = slurp(csv);
        CHECK(text.rfind("\"row\"", 0) == 0);
        CHECK(text.find("\"1,0\"") != std::string::npos);
        CHECK(Json::parse(slurp(csv + ".json"))["result"]["dim"] == 4);
    }

    TEST_CASE("deriv-gram") {
        TempDir dir;
        const OperatorKernel k = OperatorKernel::radial(RadialProfile::gaussian(), OperatorMeasure(1, {{1.0, HermitianMatrix::identity(1)}}), 1);
        Json in{{"kernel", io::to_json(k)}, {"points", {{0.0}}}, {"q", 1}};
        const RunResult r = run_cli({"deriv-gram", "--input", dir.write("d.json", in.dump()), "--no-timestamp"});
        REQUIRE(r.code == cli::kOk);
        const Json re = Json::parse(r.out)["result"]["matrix"]["re"];
        CHECK(re[0][0] == 1.0);
        CHECK(re[1][1] == 2.0);
        CHECK(re[0][1] == 0.0);
    }

    TEST_CASE("verdict exit codes") {
        TempDir dir;
        const OperatorKernel c = OperatorKernel::radial(RadialProfile::gaussian(), OperatorMeasure(1, {{0.0, HermitianMatrix::identity(1)}}), 1);
        Json probe{{"kernel", io::to_json(c)}};
        CHECK(run_cli({"probe", "--input", dir.write("p.json", probe.dump()), "--trials", "3"}).code == cli::kNegativeVerdict);
        CHECK(run_cli({"classify", "--input", dir.write("c.json", probe.dump()), "--trials", "3"}).code == cli::kNegativeVerdict);
        Json good{{"kernel", io::to_json(gaussian2())}};
        CHECK(run_cli({"probe", "--input", dir.write("ok.json", good.dump()), "--trials", "3"}).code == cli::kOk);
        CHECK(run_cli({"probe", "--input", dir.file("ok.json"), "--n", "1"}).code == cli::kInputError);

        CHECK(run_cli({"monotone", "--function", "exp(-t)"}).code == cli::kOk);
        CHECK(run_cli({"monotone", "--function", "2+sin(t)"}).code == cli::kNegativeVerdict);
        CHECK(run_cli({"monotone", "--function", "tan(t)"}).code == cli::kInputError);
        CHECK(run_cli({"demo", "radial-bump", "--grid-n", "8"}).code == cli::kInputError);
        CHECK(run_cli({"demo", "unknown"}).code == cli::kInputError);
        CHECK(run_cli({"--tol", "bogus=1", "demo", "shifted-gaussian"}).code == cli::kInputError);
        // An unreachable projection bar turns the reproduction into a negative verdict.
        CHECK(run_cli({"--tol", "projection_eig=1", "demo", "shifted-gaussian"}).code == cli::kNegativeVerdict);
    }

    TEST_CASE("interp") {
        TempDir dir;
        const RunResult e = run_cli({"interp", "--no-timestamp"});
        REQUIRE(e.code == cli::kOk);
        CHECK(Json::parse(e.out)["result"]["ratio_n5_over_n20"].get<double>() >= 5.0);

        const OperatorKernel k = OperatorKernel::radial(RadialProfile::gaussian(), OperatorMeasure(1, {{1.0, HermitianMatrix::identity(1)}}), 1);
        Json h{{"kernel", io::to_json(k)},
               {"ridge", 0.0},
               {"data", {{{"x", {0.3}}, {"alpha", {0}}, {"target", {{"re", {0.0}}}}},
                         {{"x", {0.3}}, {"alpha", {1}}, {"target", {{"re", {1.0}}}}}}}};
        const RunResult r = run_cli({"interp", "--input", dir.write("h.json", h.dump()), "--no-timestamp"});
        REQUIRE(r.code == cli::kOk);
        const Json rep = Json::parse(r.out);
        CHECK(rep["result"]["method"] == "hermite");
        CHECK(rep["result"]["residual"].get<double>() <= 1e-8);
    }

    TEST_CASE("reports are byte-identical across reruns") {
        TempDir dir;
        Json in{{"kernel", io::to_json(gaussian2())}, {"n", 3}, {"trials", 7}};
        const std::string p = dir.write("p.json", in.dump());
        const RunResult a = run_cli({"--seed", "11", "--no-timestamp", "probe", "--input", p});
        const RunResult b = run_cli({"--seed", "11", "--no-timestamp", "probe", "--input", p, "--jobs", "3"});
        REQUIRE(a.code == cli::kOk);
        CHECK(a.out == b.out);
        const RunResult c = run_cli({"--seed", "12", "--no-timestamp", "probe", "--input", p});
        CHECK(a.out != c.out);
        const RunResult t = run_cli({"--seed", "11", "probe", "--input", p});
        CHECK(Json::parse(t.out).contains("timestamp"));
    }
}
