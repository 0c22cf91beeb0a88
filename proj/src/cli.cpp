#include "utilisvm/cli.hpp"

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "utilisvm/experiments.hpp"
#include "utilisvm/json_io.hpp"

namespace utilisvm::cli {

namespace {

KernelSpec kernel_from_flags(const std::string& kind, double sigma, int degree, double offset) {
    if (kind == "gaussian") return KernelSpec::gaussian(sigma);
    if (kind == "linear") return KernelSpec::linear();
    if (kind == "polynomial") return KernelSpec::polynomial(degree, offset);
    throw InputError("unknown kernel kind: " + kind);
}

struct TrainArgs {
    std::string data, config, out;
    double C = 1.0;
    std::string kernel = "gaussian";
    double sigma = 1.0;
    int degree = 2;
    double offset = 0.0;
    double tolerance = 1e-6;
    std::size_t max_passes = 10000;
    std::uint64_t seed = 0;
};

int cmd_train(const TrainArgs& a) {
    const Dataset data = load_dataset_csv(a.data);
    const KnowledgeConfig kc = load_knowledge_config(a.config);
    const KernelSpec kernel = kernel_from_flags(a.kernel, a.sigma, a.degree, a.offset);
    const TrainingProblem problem =
        build_problem_knowledge(data, kc.costs, kc.region, a.C, kernel);
    SolverConfig config{a.tolerance, a.max_passes, a.seed};
    const TrainedModel model = solve_dual(problem, config);
    save_model(model, a.out);
    std::cout << "trained m=" << data.size() << " passes=" << model.diagnostics.passes
              << " violation=" << format_double(model.diagnostics.violation)
              << " gap=" << format_double(model.diagnostics.gap)
              << " norm=" << format_double(model.diagnostics.norm_k)
              << " converged=" << (model.diagnostics.converged ? "yes" : "no") << "\n";
    if (!model.diagnostics.converged) {
        std::cerr << "error: solver did not converge within " << a.max_passes << " passes\n";
        return 2;
    }
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path) {
    const TrainedModel model = load_model(model_path);
    const Dataset data = load_dataset_csv(data_path);
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw InputError("cannot write predictions: " + out_path);
        out = &file;
    }
    *out << "pred,f\n";
    for (const Vec& x : data.points) {
        const double f = model.evaluate(x);
        *out << (f >= 0.0 ? 1 : -1) << "," << format_double(f) << "\n";
    }
    return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_path,
             const std::string& config_path) {
    const TrainedModel model = load_model(model_path);
    const Dataset data = load_dataset_csv(data_path);
    const KnowledgeConfig kc = load_knowledge_config(config_path);
    const auto f = [&model](const Vec& x) { return model.evaluate(x); };
    const Classifier clf = [&model](const Vec& x) { return predict(model, x); };
    nlohmann::json j{
        {"empirical_utility", empirical_utility(data, kc.costs, kc.region, clf)},
        {"empirical_error", empirical_error(data, kc.costs, kc.region, f)},
        {"m", data.size()}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_synth(const std::string& dist_path, std::size_t m, std::uint64_t seed,
              const std::string& out_path) {
    const SyntheticDistribution dist = load_distribution(dist_path);
    const Dataset data = sample_dataset(dist, m, seed);
    save_dataset_csv(data, out_path);
    std::cout << "wrote " << data.size() << " samples to " << out_path << "\n";
    return 0;
}

int cmd_converge(const std::string& plan_path, const std::string& out_path,
                 const std::string& json_path) {
    const ExperimentPlan plan = load_plan(plan_path);
    const ConvergenceReport report = convergence_run(plan);
    if (!out_path.empty()) emit_report_csv(report, out_path);
    if (!json_path.empty()) emit_report_json(report, json_path);
    for (const GapAggregate& a : report.gap_quartiles())
        std::cout << "m=" << a.m << " gap_median=" << format_double(a.median)
                  << " q1=" << format_double(a.q1) << " q3=" << format_double(a.q3) << "\n";
    bool all_converged = true;
    for (const ReportRow& r : report.rows) all_converged = all_converged && r.converged;
    if (!all_converged) {
        std::cerr << "error: some cells did not converge (flagged in the report)\n";
        return 2;
    }
    return 0;
}

int cmd_compare(const std::string& plan_path, const std::string& variants_path,
                const std::string& out_path) {
    const ExperimentPlan plan = load_plan(plan_path);
    const std::vector<VariantSpec> variants = load_variants(variants_path);
    const ConvergenceReport report = comparison_run(plan, variants);
    if (!out_path.empty()) emit_report_csv(report, out_path);
    for (const VariantSpec& v : variants) {
        Vec utilities;
        for (const ReportRow& r : report.rows)
            if (r.variant == v.name() && r.m == plan.m_grid.back()) utilities.push_back(r.utility);
        std::sort(utilities.begin(), utilities.end());
        const double median = utilities.empty()
                                  ? 0.0
                                  : utilities[utilities.size() / 2];
        std::cout << v.name() << " median_utility_at_m" << plan.m_grid.back() << "="
                  << format_double(median) << "\n";
    }
    return 0;
}

int cmd_check_theory(const std::string& dist_path, const std::string& config_path,
                     std::size_t n, std::uint64_t seed, double sigma, std::size_t nodes) {
    const SyntheticDistribution dist = load_distribution(dist_path);
    const KnowledgeConfig kc = load_knowledge_config(config_path);
    QuadratureSpec quad;
    quad.nodes_per_axis = nodes;
    const BridgeCheckResult result = bridge_check(dist, kc.costs, kc.region,
                                                 KernelSpec::gaussian(sigma), n, seed, quad);
    std::cout << "violations=" << result.violations
              << " max_excess=" << format_double(result.max_excess) << " n=" << result.n_functions
              << "\n";
    return result.violations == 0 ? 0 : 2;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"kernel classifier with region-weighted costs and a utility oracle"};
    app.require_subcommand(1);

    TrainArgs train;
    CLI::App* t = app.add_subcommand("train", "train a model on a CSV dataset");
    t->add_option("--data", train.data, "dataset CSV")->required();
    t->add_option("--config", train.config, "region/costs JSON")->required();
    t->add_option("--C", train.C, "trade-off parameter")->required();
    t->add_option("--kernel", train.kernel, "gaussian|linear|polynomial");
    t->add_option("--sigma", train.sigma, "gaussian width");
    t->add_option("--degree", train.degree, "polynomial degree");
    t->add_option("--offset", train.offset, "polynomial offset");
    t->add_option("--out", train.out, "output model JSON")->required();
    t->add_option("--tol", train.tolerance, "solver tolerance");
    t->add_option("--max-passes", train.max_passes, "solver pass limit");
    t->add_option("--seed", train.seed, "solver shuffle seed");

    std::string model_path, data_path, config_path, out_path;
    CLI::App* p = app.add_subcommand("predict", "predict labels with a saved model");
    p->add_option("--model", model_path, "model JSON")->required();
    p->add_option("--data", data_path, "dataset CSV")->required();
    p->add_option("--out", out_path, "output CSV (default stdout)");

    CLI::App* e = app.add_subcommand("eval", "empirical utility/error of a model on a dataset");
    e->add_option("--model", model_path, "model JSON")->required();
    e->add_option("--data", data_path, "dataset CSV")->required();
    e->add_option("--config", config_path, "region/costs JSON")->required();

    std::string dist_path;
    std::size_t synth_m = 100;
    std::uint64_t seed = 0;
    CLI::App* s = app.add_subcommand("synth", "sample a dataset from a distribution spec");
    s->add_option("--dist", dist_path, "distribution JSON")->required();
    s->add_option("--m", synth_m, "sample count")->required();
    s->add_option("--seed", seed, "sampling seed")->required();
    s->add_option("--out", out_path, "output CSV")->required();

    std::string plan_path, json_out;
    CLI::App* c = app.add_subcommand("converge", "run a convergence experiment plan");
    c->add_option("--plan", plan_path, "plan JSON")->required();
    c->add_option("--out", out_path, "report CSV");
    c->add_option("--json-out", json_out, "report JSON");

    std::string variants_path;
    CLI::App* cm = app.add_subcommand("compare", "compare trainer variants on one plan");
    cm->add_option("--plan", plan_path, "plan JSON")->required();
    cm->add_option("--variants", variants_path, "variants JSON")->required();
    cm->add_option("--out", out_path, "report CSV");

    std::size_t n_functions = 100;
    double sigma = 0.5;
    std::size_t nodes = 64;
    CLI::App* ct = app.add_subcommand("check-theory",
                                      "verify the utility/error inequality on random functions");
    ct->add_option("--dist", dist_path, "distribution JSON")->required();
    ct->add_option("--config", config_path, "region/costs JSON")->required();
    ct->add_option("--n", n_functions, "number of random functions");
    ct->add_option("--seed", seed, "randomness seed");
    ct->add_option("--sigma", sigma, "gaussian kernel width for the random functions");
    ct->add_option("--nodes", nodes, "quadrature nodes per axis");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& err) {
        if (err.get_exit_code() == 0) {  // --help
            app.exit(err);
            return 0;
        }
        std::cerr << err.what() << "\n" << app.help() << "\n";
        return 1;
    }

    try {
        if (t->parsed()) return cmd_train(train);
        if (p->parsed()) return cmd_predict(model_path, data_path, out_path);
        if (e->parsed()) return cmd_eval(model_path, data_path, config_path);
        if (s->parsed()) return cmd_synth(dist_path, synth_m, seed, out_path);
        if (c->parsed()) return cmd_converge(plan_path, out_path, json_out);
        if (cm->parsed()) return cmd_compare(plan_path, variants_path, out_path);
        if (ct->parsed())
            return cmd_check_theory(dist_path, config_path, n_functions, seed, sigma, nodes);
        std::cerr << app.help() << "\n";
        return 1;
    } catch (const InputError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    } catch (const FormatError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    } catch (const NumericError& err) {
        std::cerr << "numeric error: " << err.what() << "\n";
        return 2;
    } catch (const ContractError& err) {
        std::cerr << "contract error: " << err.what() << "\n";
        return 2;
    }
}

}  // namespace utilisvm::cli
