#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "jointlab/cli.hpp"
#include "jointlab/errors.hpp"
#include "jointlab/io.hpp"

using namespace jointlab;
namespace fs = std::filesystem;

namespace {

// Two-string brace lists would become JSON objects, so lines are built explicitly.
json line_json(const std::string& b0, const std::string& b1, const std::string& d0, const std::string& d1) {
    return json{{"ambient_dim", 2}, {"base", json::array({b0, b1})}, {"directions", json::array({json::array({d0, d1})})}};
}

struct Run {
    int code;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "jointlab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / "jointlab_test_cli") {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("generate, count, carbery and transversal") {
    TempDir tmp;
    auto g = cli({"generate", "--kind", "grid_lines", "-S", "3", "-o", tmp.path.string()});
    CHECK(g.code == 0);
    CHECK(fs::exists(tmp / "family_0.json"));
    CHECK(fs::exists(tmp / "family_2.json"));
    CHECK(cli({"count", tmp / "manifest.json"}).out == "27\n");
    CHECK(cli({"count", tmp / "family_0.json", tmp / "family_1.json", tmp / "family_2.json", "--strategy", "naive"}).out ==
          "27\n");
    CHECK(cli({"carbery", tmp / "manifest.json"}).out.rfind("27 ", 0) == 0);
    CHECK(cli({"transversal", tmp / "manifest.json"}).out == "transversal\n");
    auto c = cli({"count", tmp / "manifest.json", "--output", tmp / "joints.json"});
    CHECK(read_json_file(tmp / "joints.json").size() == 27);
}

TEST_CASE("partition and crossings") {
    TempDir tmp;
    json pts = json::array();
    for (int i = 0; i < 60; ++i)
        pts.push_back(json::array({std::to_string(i % 7) + "/7", std::to_string((i * 13) % 11) + "/11"}));
    write_json_file(tmp / "points.json", pts);
    auto p = cli({"partition", "--degree", "4", "--tolerance", "0.1", "--seed", "3", "--input", tmp / "points.json",
                  "--output", tmp / "partition.json"});
    CHECK(p.code == 0);
    json pj = read_json_file(tmp / "partition.json");
    CHECK(pj.contains("factors"));

    write_json_file(tmp / "line.json", line_json("1/3", "1/5", "1", "2"));
    auto c = cli({"crossings", "--partition", tmp / "partition.json", "--line", tmp / "line.json"});
    CHECK(c.code == 0);
    CHECK(std::stoul(c.out) <= pj["product_degree"].get<std::size_t>() + 1);

    // a partition whose only factor is x, and the line x = 0
    json zero = pj;
    zero["factors"] = json::array({json::array({{{"exponents", {1, 0}}, {"coeff", "1"}}})});
    zero["product_degree"] = 1;
    zero["j"] = 1;
    write_json_file(tmp / "zero.json", zero);
    write_json_file(tmp / "axis.json", line_json("0", "0", "0", "1"));
    auto z = cli({"crossings", "--partition", tmp / "zero.json", "--line", tmp / "axis.json"});
    CHECK(z.code == 1);
    CHECK(z.err.find("zero set") != std::string::npos);

    // an inconsistent product degree is rejected on input
    zero["product_degree"] = 0;
    write_json_file(tmp / "understated.json", zero);
    write_json_file(tmp / "x_axis.json", line_json("0", "0", "1", "0"));
    auto bad = cli({"crossings", "--partition", tmp / "understated.json", "--line", tmp / "x_axis.json"});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("product_degree") != std::string::npos);
}

TEST_CASE("demo-recursion, experiment and fit") {
    TempDir tmp;
    auto d = cli({"demo-recursion", "-S", "3", "--degree", "4"});
    CHECK(d.code == 0);
    CHECK(json::parse(d.out)["total"] == 27);

    write_json_file(tmp / "cfg.json", json{{"kind", "grid_lines"}, {"ladder", {2, 3, 4, 5}}});
    auto e = cli({"experiment", "--config", tmp / "cfg.json", "--output", tmp / "rows.csv", "--no-timing"});
    CHECK(e.code == 0);
    auto f = cli({"fit", "--input", tmp / "rows.csv", "-x", "total_size", "-y", "joints"});
    CHECK(f.code == 0);
    CHECK(f.out.rfind("slope=", 0) == 0);

    auto again = cli({"experiment", "--config", tmp / "cfg.json", "--no-timing", "--seed", "4"});
    CHECK(again.out.find("grid_lines,n=3;S=5,25;25;25,125,125,4,\n") != std::string::npos);
}

TEST_CASE("exit codes") {
    CHECK(exit_code_for(InvariantViolation("x")) == 2);
    CHECK(exit_code_for(PreconditionError("x")) == 1);
    CHECK(exit_code_for(SearchExhausted("x")) == 1);
    CHECK(cli({}).code == 1);
    CHECK(cli({"bogus"}).code == 1);
    CHECK(cli({"count"}).code == 1);
    CHECK(cli({"count", "/nonexistent.json"}).code == 1);
    CHECK(cli({"--help"}).code == 0);
    TempDir tmp;
    write_json_file(tmp / "cfg.json", json{{"kind", "grid_lines"}, {"ladder", json::array()}});
    CHECK(cli({"experiment", "--config", tmp / "cfg.json"}).code == 1);
}
