#include "utilisvm/experiments.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "utilisvm/json_io.hpp"

namespace utilisvm {

void ExperimentPlan::validate() const {
    distribution.validate();
    costs.validate();
    region.validate();
    kernel.validate();
    solver.validate();
    quadrature.validate();
    if (!(gamma > 0.0 && gamma < 1.0)) throw InputError("plan: gamma must be in (0,1)");
    if (m_grid.empty()) throw InputError("plan: empty m grid");
    for (std::size_t i = 0; i + 1 < m_grid.size(); ++i)
        if (!(m_grid[i] < m_grid[i + 1]))
            throw InputError("plan: m grid must be strictly ascending");
    if (m_grid.front() < 1) throw InputError("plan: m must be >= 1");
    if (repetitions < 1) throw InputError("plan: repetitions must be >= 1");
    // desk scale: the Gram work across cells stays around 1e8 kernel values
    double work = 0.0;
    for (std::size_t m : m_grid)
        work += static_cast<double>(m) * static_cast<double>(m) *
                static_cast<double>(repetitions);
    if (work > 1e8)
        throw InputError("plan: sum of m^2 over cells exceeds the desk-scale budget");
}

std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t m, std::size_t rep) {
    return base_seed ^ (static_cast<std::uint64_t>(m) * 0x9E3779B97F4A7C15ULL +
                        static_cast<std::uint64_t>(rep));
}

namespace {

// distinct stream for the solver's shuffling within a cell
std::uint64_t shuffle_seed_for(std::uint64_t cell) { return cell ^ 0xD1B54A32D192ED03ULL; }

double quantile(Vec sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double h = static_cast<double>(n - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

/// Lemma-21-style bound sqrt(2 sum_i C_i mu_i); equals sqrt(2 C M~) for the
/// knowledge instantiation and stays valid for shifted margins.
double norm_bound_of(const TrainingProblem& problem) {
    double s = 0.0;
    for (std::size_t i = 0; i < problem.size(); ++i)
        s += problem.per_sample_cost[i] * problem.per_sample_margin[i];
    return std::sqrt(2.0 * s);
}

ReportRow evaluate_cell(const ExperimentPlan& plan, const std::string& variant,
                        const Dataset& data, const TrainingProblem& problem,
                        std::size_t m, std::size_t rep, std::uint64_t seed, double C) {
    SolverConfig config = plan.solver;
    config.shuffle_seed = shuffle_seed_for(seed);
    const TrainedModel model = solve_dual(problem, config);

    const Classifier clf = [&model](const Vec& x) { return predict(model, x); };
    const UtilityReport ureport =
        utility(plan.distribution, plan.costs, plan.region, clf, plan.quadrature);

    std::size_t m1 = 0;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (data.labels[i] == 1 && region_membership(plan.region, data.points[i])) ++m1;
    const double kappa = kernel_sup(plan.kernel, plan.distribution.domain);
    const SampleErrorBound bound =
        sample_error_bound(data.size(), C, 0.05, plan.costs, m1, data.size() - m1, kappa);

    ReportRow row;
    row.variant = variant;
    row.m = m;
    row.rep = rep;
    row.seed = seed;
    row.C = C;
    row.gap = ureport.utility_gap;
    row.utility = ureport.utility;
    row.u_fq = ureport.u_fq;
    row.emp_error = empirical_error(data, plan.costs, plan.region,
                                    [&model](const Vec& x) { return model.evaluate(x); });
    row.norm = model.diagnostics.norm_k;
    row.norm_bound = norm_bound_of(problem);
    row.theory_bound = bound.total;
    row.converged = model.diagnostics.converged;
    return row;
}

void sort_rows(ConvergenceReport& report) {
    std::sort(report.rows.begin(), report.rows.end(), [](const ReportRow& a, const ReportRow& b) {
        if (a.variant != b.variant) return a.variant < b.variant;
        if (a.m != b.m) return a.m < b.m;
        return a.rep < b.rep;
    });
}

}  // namespace

std::vector<GapAggregate> ConvergenceReport::gap_quartiles() const {
    std::vector<GapAggregate> out;
    std::vector<std::size_t> ms;
    for (const ReportRow& r : rows) ms.push_back(r.m);
    std::sort(ms.begin(), ms.end());
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
    for (std::size_t m : ms) {
        Vec gaps;
        for (const ReportRow& r : rows)
            if (r.m == m) gaps.push_back(r.gap);
        std::sort(gaps.begin(), gaps.end());
        out.push_back({m, quantile(gaps, 0.25), quantile(gaps, 0.5), quantile(gaps, 0.75)});
    }
    return out;
}

ConvergenceReport convergence_run(const ExperimentPlan& plan) {
    plan.validate();
    ConvergenceReport report;
    for (std::size_t m : plan.m_grid) {
        const double C = std::pow(static_cast<double>(m), plan.gamma);
        for (std::size_t rep = 0; rep < plan.repetitions; ++rep) {
            const std::uint64_t seed = cell_seed(plan.base_seed, m, rep);
            const Dataset data = sample_dataset(plan.distribution, m, seed);
            const TrainingProblem problem =
                build_problem_knowledge(data, plan.costs, plan.region, C, plan.kernel);
            report.rows.push_back(
                evaluate_cell(plan, "knowledge", data, problem, m, rep, seed, C));
        }
    }
    sort_rows(report);
    return report;
}

std::string VariantSpec::name() const {
    switch (kind) {
        case Kind::standard: return "standard";
        case Kind::lin: return "lin";
        case Kind::knowledge: return "knowledge";
        case Kind::confidence: return "confidence";
        case Kind::knowledge_points: return "knowledge_points";
    }
    return "?";
}

void VariantSpec::validate() const {
    h.validate();
    if (kind == Kind::confidence && (!(confidence > 0.0) || confidence > 1.0))
        throw InputError("variant: confidence must be in (0,1]");
    if (kind == Kind::knowledge_points) {
        if (v < 0.0) throw InputError("variant: v must be >= 0");
        if (grid_counts.empty()) throw InputError("variant: knowledge_points needs grid counts");
    }
}

ConvergenceReport comparison_run(const ExperimentPlan& plan,
                                 const std::vector<VariantSpec>& variants) {
    plan.validate();
    if (variants.empty()) throw InputError("comparison_run: no variants");
    for (const VariantSpec& v : variants) v.validate();

    ConvergenceReport report;
    for (std::size_t m : plan.m_grid) {
        const double C = std::pow(static_cast<double>(m), plan.gamma);
        for (std::size_t rep = 0; rep < plan.repetitions; ++rep) {
            const std::uint64_t seed = cell_seed(plan.base_seed, m, rep);
            const Dataset data = sample_dataset(plan.distribution, m, seed);
            for (const VariantSpec& variant : variants) {
                TrainingProblem problem;
                switch (variant.kind) {
                    case VariantSpec::Kind::standard:
                        problem = build_problem_standard(data, C, plan.kernel);
                        break;
                    case VariantSpec::Kind::lin:
                        problem = build_problem_lin(data, plan.costs, C, plan.kernel);
                        break;
                    case VariantSpec::Kind::knowledge:
                        problem = build_problem_knowledge(data, plan.costs, plan.region, C,
                                                          plan.kernel);
                        break;
                    case VariantSpec::Kind::confidence: {
                        const Vec conf(data.size(), variant.confidence);
                        problem =
                            build_problem_confidence(data, conf, variant.h, C, plan.kernel);
                        break;
                    }
                    case VariantSpec::Kind::knowledge_points: {
                        GridSpec grid{plan.distribution.domain, variant.grid_counts};
                        problem = build_problem_knowledge_points(data, plan.region, variant.v,
                                                                 grid, C, plan.kernel);
                        break;
                    }
                }
                report.rows.push_back(
                    evaluate_cell(plan, variant.name(), data, problem, m, rep, seed, C));
            }
        }
    }
    sort_rows(report);
    return report;
}

BridgeCheckResult bridge_check(const SyntheticDistribution& dist, const CostStructure& costs,
                              const KnowledgeRegion& region, const KernelSpec& kernel,
                              std::size_t n_functions, std::uint64_t seed,
                              const QuadratureSpec& quad) {
    dist.validate();
    costs.validate();
    region.validate();
    kernel.validate();
    quad.validate();
    if (n_functions < 1) throw InputError("bridge_check: need n_functions >= 1");

    const double e_fq = generalization_error(
        dist, costs, region,
        [&](const Vec& x) {
            return static_cast<double>(optimal_classifier_fq(dist, costs, region, x));
        },
        quad);

    std::mt19937_64 rng(seed);
    const auto u01 = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

    BridgeCheckResult result;
    result.n_functions = n_functions;
    const std::size_t centers = 10;
    for (std::size_t t = 0; t < n_functions; ++t) {
        std::vector<Vec> pts(centers, Vec(dist.dim()));
        Vec coeff(centers);
        std::vector<int> ones(centers, 1);
        for (std::size_t c = 0; c < centers; ++c) {
            for (std::size_t k = 0; k < dist.dim(); ++k)
                pts[c][k] = dist.domain.lower[k] +
                            (dist.domain.upper[k] - dist.domain.lower[k]) * u01();
            coeff[c] = -2.0 + 4.0 * u01();
        }
        const RealFunction f = [&](const Vec& x) {
            return eval_expansion(coeff, ones, pts, kernel, x);
        };
        const Classifier sgn_f = [&f](const Vec& x) { return f(x) >= 0.0 ? 1 : -1; };

        const UtilityReport rep = utility(dist, costs, region, sgn_f, quad);
        const double lhs = rep.utility_gap;  // U(f_q) - U(sgn f)
        const double rhs = generalization_error(dist, costs, region, f, quad) - e_fq;
        const double excess = lhs - rhs;
        result.max_excess = std::max(result.max_excess, excess);
        if (excess > quad.abs_tolerance) ++result.violations;
    }
    return result;
}

// ---------------------------------------------------------------------------
// report emission

std::string report_to_csv_string(const ConvergenceReport& report) {
    std::ostringstream out;
    out << "variant,m,rep,seed,C,gap,utility,u_fq,emp_error,norm,norm_bound,theory_bound,"
           "converged\n";
    for (const ReportRow& r : report.rows) {
        out << r.variant << ',' << r.m << ',' << r.rep << ',' << r.seed << ','
            << format_double(r.C) << ',' << format_double(r.gap) << ','
            << format_double(r.utility) << ',' << format_double(r.u_fq) << ','
            << format_double(r.emp_error) << ',' << format_double(r.norm) << ','
            << format_double(r.norm_bound) << ',' << format_double(r.theory_bound) << ','
            << (r.converged ? 1 : 0) << "\n";
    }
    return out.str();
}

void emit_report_csv(const ConvergenceReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write report: " + path);
    out << report_to_csv_string(report);
    if (!out) throw InputError("failed writing report: " + path);
}

void emit_report_json(const ConvergenceReport& report, const std::string& path) {
    nlohmann::json rows = nlohmann::json::array();
    for (const ReportRow& r : report.rows) {
        rows.push_back({{"variant", r.variant},
                        {"m", r.m},
                        {"rep", r.rep},
                        {"seed", r.seed},
                        {"C", r.C},
                        {"gap", r.gap},
                        {"utility", r.utility},
                        {"u_fq", r.u_fq},
                        {"emp_error", r.emp_error},
                        {"norm", r.norm},
                        {"norm_bound", r.norm_bound},
                        {"theory_bound", r.theory_bound},
                        {"converged", r.converged}});
    }
    nlohmann::json aggregates = nlohmann::json::array();
    for (const GapAggregate& a : report.gap_quartiles())
        aggregates.push_back(
            {{"m", a.m}, {"gap_q1", a.q1}, {"gap_median", a.median}, {"gap_q3", a.q3}});
    nlohmann::json j{{"rows", rows}, {"gap_aggregates", aggregates}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write report: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw InputError("failed writing report: " + path);
}

ConvergenceReport load_report_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open report: " + path);
    nlohmann::json j;
    try {
        in >> j;
        ConvergenceReport report;
        for (const auto& e : j.at("rows")) {
            ReportRow r;
            r.variant = e.at("variant").get<std::string>();
            r.m = e.at("m").get<std::size_t>();
            r.rep = e.at("rep").get<std::size_t>();
            r.seed = e.at("seed").get<std::uint64_t>();
            r.C = e.at("C").get<double>();
            r.gap = e.at("gap").get<double>();
            r.utility = e.at("utility").get<double>();
            r.u_fq = e.at("u_fq").get<double>();
            r.emp_error = e.at("emp_error").get<double>();
            r.norm = e.at("norm").get<double>();
            r.norm_bound = e.at("norm_bound").get<double>();
            r.theory_bound = e.at("theory_bound").get<double>();
            r.converged = e.at("converged").get<bool>();
            report.rows.push_back(std::move(r));
        }
        return report;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("report file " + path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// bundled fixtures

ExperimentPlan bundled_default_plan() {
    ExperimentPlan plan;
    plan.distribution.marginal.kind = MarginalSpec::Kind::uniform;
    plan.distribution.eta_spec.kind = EtaSpec::Kind::logistic;
    plan.distribution.eta_spec.w = {4.0, -4.0};
    plan.distribution.eta_spec.b = 0.0;
    plan.distribution.domain = Box{{0.0, 0.0}, {1.0, 1.0}};
    plan.costs = CostStructure{1.0, 1.0, 4.0};
    plan.region = KnowledgeRegion::ball({0.3, 0.7}, 0.25);
    // width comparable to the region so the trained rule can follow the
    // boundary the region weighting moves
    plan.kernel = KernelSpec::gaussian(0.2);
    plan.gamma = 0.5;
    plan.m_grid = {50, 100, 200, 400, 800, 1600};
    plan.repetitions = 10;
    plan.base_seed = 20260801;
    plan.solver = SolverConfig{};
    plan.quadrature = QuadratureSpec{};
    return plan;
}

std::vector<BundledDistribution> bundled_test_distributions() {
    std::vector<BundledDistribution> out;

    {
        const ExperimentPlan plan = bundled_default_plan();
        out.push_back({"uniform2d_logistic_ball", plan.distribution, plan.costs, plan.region});
    }
    {
        BundledDistribution b;
        b.name = "uniform1d_linear_box";
        b.dist.marginal.kind = MarginalSpec::Kind::uniform;
        b.dist.eta_spec.kind = EtaSpec::Kind::linear;
        b.dist.eta_spec.w = {1.0};
        b.dist.eta_spec.b = 0.0;
        b.dist.domain = Box{{0.0}, {1.0}};
        b.costs = CostStructure{1.0, 1.0, 2.0};
        b.region = KnowledgeRegion::box(Box{{0.6}, {0.9}});
        out.push_back(std::move(b));
    }
    {
        BundledDistribution b;
        b.name = "mixture2d_piecewise_halfspace";
        b.dist.marginal.kind = MarginalSpec::Kind::gaussian_mixture;
        b.dist.marginal.components = {{0.5, {-0.4, 0.0}, {0.3, 0.3}},
                                      {0.5, {0.5, 0.2}, {0.25, 0.25}}};
        b.dist.eta_spec.kind = EtaSpec::Kind::piecewise_constant;
        b.dist.eta_spec.axis = 0;
        b.dist.eta_spec.edges = {-0.2, 0.3};
        b.dist.eta_spec.values = {0.15, 0.5, 0.85};
        b.dist.domain = Box{{-1.0, -1.0}, {1.0, 1.0}};
        b.costs = CostStructure{1.0, 1.0, 3.0};
        b.region = KnowledgeRegion::halfspace({1.0, 0.0}, -0.1);
        out.push_back(std::move(b));
    }
    return out;
}

}  // namespace utilisvm
