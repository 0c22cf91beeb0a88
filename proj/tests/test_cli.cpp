#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "utilisvm/cli.hpp"
#include "utilisvm/dataset.hpp"
#include "utilisvm/experiments.hpp"
#include "utilisvm/json_io.hpp"

using namespace utilisvm;

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Fixture {
    std::string dist = "tmp_cli_dist.json";
    std::string config = "tmp_cli_config.json";
    std::string data = "tmp_cli_data.csv";
    std::string model = "tmp_cli_model.json";
    std::string plan = "tmp_cli_plan.json";

    Fixture() {
        const auto bundled = bundled_test_distributions();
        write_file(dist, distribution_to_json(bundled[0].dist).dump(2));
        write_file(config, knowledge_config_to_json({bundled[0].region, bundled[0].costs}).dump(2));
        ExperimentPlan plan_obj = bundled_default_plan();
        plan_obj.m_grid = {30, 60};
        plan_obj.repetitions = 2;
        plan_obj.quadrature.nodes_per_axis = 24;
        plan_obj.solver.tolerance = 1e-5;
        write_file(plan, plan_to_json(plan_obj).dump(2));
    }

    ~Fixture() {
        for (const auto& p : {dist, config, data, model, plan}) std::remove(p.c_str());
    }
};

}  // namespace

TEST_CASE("dataset csv parsing") {
    const std::string path = "tmp_parse.csv";

    write_file(path, "x0,x1,y\n0.1,0.2,1\n0.3,0.4,-1\n");
    const Dataset ds = load_dataset_csv(path);
    CHECK(ds.size() == 2);
    CHECK(ds.dim() == 2);
    CHECK(ds.labels == std::vector<int>{1, -1});

    write_file(path, "x0,x1,y\n0.1,0.2,0\n");
    try {
        load_dataset_csv(path);
        FAIL("expected a parse error");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }

    write_file(path, "x0,x1,y\n");
    CHECK_THROWS_AS(load_dataset_csv(path), FormatError);

    write_file(path, "x0,x1,y\n0.1,abc,1\n");
    CHECK_THROWS_AS(load_dataset_csv(path), FormatError);

    write_file(path, "x0,x1,y\n0.1,1\n");
    CHECK_THROWS_AS(load_dataset_csv(path), FormatError);

    write_file(path, "a,b,y\n0.1,0.2,1\n");
    CHECK_THROWS_AS(load_dataset_csv(path), FormatError);

    // optional confidence column
    write_file(path, "x0,y,conf\n0.5,1,0.8\n");
    const Dataset with_conf = load_dataset_csv(path);
    CHECK(with_conf.has_confidences());
    CHECK(with_conf.confidences[0] == 0.8);

    write_file(path, "x0,y,conf\n0.5,1,1.5\n");
    CHECK_THROWS_AS(load_dataset_csv(path), FormatError);

    std::remove(path.c_str());
}

TEST_CASE("dataset csv round trip") {
    const std::string path = "tmp_roundtrip.csv";
    Dataset ds;
    ds.push_back({0.125, -3.5}, 1);
    ds.push_back({1.0 / 3.0, 2.718281828459045}, -1);
    save_dataset_csv(ds, path);
    const Dataset back = load_dataset_csv(path);
    CHECK(back.points == ds.points);
    CHECK(back.labels == ds.labels);
    std::remove(path.c_str());
}

TEST_CASE("synth is byte deterministic") {
    Fixture fx;
    CHECK(cli::run({"synth", "--dist", fx.dist, "--m", "50", "--seed", "7", "--out", fx.data}) ==
          0);
    const std::string first = slurp(fx.data);
    CHECK(cli::run({"synth", "--dist", fx.dist, "--m", "50", "--seed", "7", "--out", fx.data}) ==
          0);
    CHECK(slurp(fx.data) == first);
    const Dataset ds = load_dataset_csv(fx.data);
    CHECK(ds.size() == 50);
}

TEST_CASE("train, predict and eval round trip") {
    Fixture fx;
    REQUIRE(cli::run({"synth", "--dist", fx.dist, "--m", "80", "--seed", "3", "--out",
                      fx.data}) == 0);
    REQUIRE(cli::run({"train", "--data", fx.data, "--config", fx.config, "--C", "5", "--kernel",
                      "gaussian", "--sigma", "0.5", "--out", fx.model, "--seed", "9"}) == 0);
    const TrainedModel model = load_model(fx.model);
    CHECK(model.diagnostics.converged);
    CHECK(model.alphas.size() == 80);

    // the whole pipeline is deterministic: retraining reproduces the file
    const std::string second = "tmp_cli_model2.json";
    REQUIRE(cli::run({"train", "--data", fx.data, "--config", fx.config, "--C", "5", "--kernel",
                      "gaussian", "--sigma", "0.5", "--out", second, "--seed", "9"}) == 0);
    CHECK(slurp(second) == slurp(fx.model));
    std::remove(second.c_str());

    const std::string preds = "tmp_cli_preds.csv";
    CHECK(cli::run({"predict", "--model", fx.model, "--data", fx.data, "--out", preds}) == 0);
    const std::string text = slurp(preds);
    CHECK(std::count(text.begin(), text.end(), '\n') == 81);  // header + 80 rows
    const std::string preds2 = "tmp_cli_preds2.csv";
    CHECK(cli::run({"predict", "--model", fx.model, "--data", fx.data, "--out", preds2}) == 0);
    CHECK(slurp(preds2) == text);
    std::remove(preds.c_str());
    std::remove(preds2.c_str());

    CHECK(cli::run({"eval", "--model", fx.model, "--data", fx.data, "--config", fx.config}) == 0);
}

TEST_CASE("converge emits a deterministic csv") {
    Fixture fx;
    const std::string out = "tmp_cli_report.csv";
    REQUIRE(cli::run({"converge", "--plan", fx.plan, "--out", out}) == 0);
    const std::string first = slurp(out);
    REQUIRE(cli::run({"converge", "--plan", fx.plan, "--out", out}) == 0);
    CHECK(slurp(out) == first);
    CHECK(first.rfind("variant,m,rep,seed,C,gap,", 0) == 0);
    std::remove(out.c_str());
}

TEST_CASE("compare runs the requested variants") {
    Fixture fx;
    const std::string variants = "tmp_cli_variants.json";
    write_file(variants, R"({"variants": [
        {"kind": "standard"},
        {"kind": "knowledge"},
        {"kind": "knowledge_points", "v": 0.5, "grid_counts": [4, 4]}
    ]})");
    const std::string out = "tmp_cli_compare.csv";
    CHECK(cli::run({"compare", "--plan", fx.plan, "--variants", variants, "--out", out}) == 0);
    const std::string text = slurp(out);
    CHECK(text.find("standard") != std::string::npos);
    CHECK(text.find("knowledge_points") != std::string::npos);
    std::remove(variants.c_str());
    std::remove(out.c_str());
}

TEST_CASE("check-theory reports zero violations on the bundled fixture") {
    Fixture fx;
    CHECK(cli::run({"check-theory", "--dist", fx.dist, "--config", fx.config, "--n", "10",
                    "--seed", "1", "--nodes", "32"}) == 0);
}

TEST_CASE("cli error handling") {
    Fixture fx;
    // unknown flag
    CHECK(cli::run({"train", "--nonsense", "x"}) == 1);
    // unknown subcommand
    CHECK(cli::run({"frobnicate"}) == 1);
    // missing required flags
    CHECK(cli::run({"train", "--data", fx.data}) == 1);
    // missing file
    CHECK(cli::run({"synth", "--dist", "no_such.json", "--m", "10", "--seed", "1", "--out",
                    fx.data}) == 1);
    // malformed dataset
    write_file(fx.data, "x0,y\n0.1,0\n");
    CHECK(cli::run({"train", "--data", fx.data, "--config", fx.config, "--C", "1", "--out",
                    fx.model}) == 1);
    // help exits cleanly
    CHECK(cli::run({"--help"}) == 0);
}

TEST_CASE("train reports non-convergence with exit code 2") {
    Fixture fx;
    REQUIRE(cli::run({"synth", "--dist", fx.dist, "--m", "60", "--seed", "4", "--out",
                      fx.data}) == 0);
    CHECK(cli::run({"train", "--data", fx.data, "--config", fx.config, "--C", "50", "--sigma",
                    "0.3", "--out", fx.model, "--max-passes", "1", "--tol", "1e-12"}) == 2);
}
