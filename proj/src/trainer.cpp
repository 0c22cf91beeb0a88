#include "utilisvm/trainer.hpp"

#include <fstream>
#include <iostream>
#include <numeric>
#include <random>

#include <json.hpp>

#include "utilisvm/json_io.hpp"

namespace utilisvm {

void TrainingProblem::validate() const {
    if (points.empty()) throw InputError("training problem: empty dataset");
    if (labels.size() != points.size() || per_sample_cost.size() != points.size() ||
        per_sample_margin.size() != points.size())
        throw InputError("training problem: inconsistent field lengths");
    if (!(trade_off > 0.0) || !std::isfinite(trade_off))
        throw InputError("training problem: C must be > 0");
    const std::size_t n = points.front().size();
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != n) throw InputError("training problem: ragged points");
        if (!all_finite(points[i])) throw InputError("training problem: non-finite feature");
        require_label(labels[i]);
        if (!(per_sample_cost[i] > 0.0) || !std::isfinite(per_sample_cost[i]))
            throw InputError("training problem: per-sample cost must be > 0");
        if (!std::isfinite(per_sample_margin[i]))
            throw InputError("training problem: non-finite margin");
    }
    if (m1 + m2 != points.size())
        throw InputError("training problem: m1 + m2 must equal m");
    kernel.validate();
}

bool TrainingProblem::unit_margins() const {
    for (double mu : per_sample_margin)
        if (mu != 1.0) return false;
    return true;
}

void SolverConfig::validate() const {
    if (!(tolerance > 0.0)) throw InputError("solver config: tolerance must be > 0");
    if (max_passes < 1) throw InputError("solver config: max_passes must be >= 1");
}

double TrainedModel::evaluate(const Vec& x) const {
    return eval_expansion(alphas, labels, points, kernel, x);
}

std::vector<std::size_t> TrainedModel::support_set() const {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < alphas.size(); ++i)
        if (alphas[i] > 0.0) s.push_back(i);
    return s;
}

void TrainedModel::validate() const {
    if (alphas.size() != points.size() || labels.size() != points.size() ||
        per_sample_cost.size() != points.size() || per_sample_margin.size() != points.size())
        throw FormatError("model: inconsistent field lengths");
    kernel.validate();
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        require_label(labels[i]);
        if (!(per_sample_cost[i] > 0.0))
            throw FormatError("model: per-sample cost must be > 0");
        if (alphas[i] < 0.0 || alphas[i] > per_sample_cost[i])
            throw FormatError("model: alpha outside [0, C_i] at index " + std::to_string(i));
    }
}

namespace {

TrainingProblem make_problem(const Dataset& dataset, Vec costs_per_sample, Vec margins,
                             double C, const KernelSpec& kernel, std::size_t m1) {
    TrainingProblem p;
    p.points = dataset.points;
    p.labels = dataset.labels;
    p.per_sample_cost = std::move(costs_per_sample);
    p.per_sample_margin = std::move(margins);
    p.kernel = kernel;
    p.trade_off = C;
    p.m1 = m1;
    p.m2 = dataset.size() - m1;
    p.validate();
    return p;
}

}  // namespace

TrainingProblem build_problem_knowledge(const Dataset& dataset, const CostStructure& costs,
                                        const KnowledgeRegion& region, double C,
                                        const KernelSpec& kernel) {
    dataset.validate();
    costs.validate();
    region.validate();
    if (dataset.size() == 0) throw InputError("build_problem_knowledge: empty dataset");
    if (!(C > 0.0)) throw InputError("build_problem_knowledge: C must be > 0");
    if (auto warning = cost_region_warning(costs, region))
        std::cerr << "warning: " << *warning << "\n";

    const double m = static_cast<double>(dataset.size());
    Vec ci(dataset.size());
    std::size_t m1 = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        ci[i] = C * sample_weight(costs, region, dataset.points[i], dataset.labels[i]) / m;
        if (dataset.labels[i] == 1 && region_membership(region, dataset.points[i])) ++m1;
    }
    return make_problem(dataset, std::move(ci), Vec(dataset.size(), 1.0), C, kernel, m1);
}

TrainingProblem build_problem_standard(const Dataset& dataset, double C,
                                       const KernelSpec& kernel) {
    dataset.validate();
    if (dataset.size() == 0) throw InputError("build_problem_standard: empty dataset");
    if (!(C > 0.0)) throw InputError("build_problem_standard: C must be > 0");
    const double m = static_cast<double>(dataset.size());
    Vec ci(dataset.size(), C * 1.0 / m);
    return make_problem(dataset, std::move(ci), Vec(dataset.size(), 1.0), C, kernel, 0);
}

TrainingProblem build_problem_lin(const Dataset& dataset, const CostStructure& costs, double C,
                                  const KernelSpec& kernel) {
    dataset.validate();
    costs.validate();
    if (dataset.size() == 0) throw InputError("build_problem_lin: empty dataset");
    if (!(C > 0.0)) throw InputError("build_problem_lin: C must be > 0");
    const double m = static_cast<double>(dataset.size());
    Vec ci(dataset.size(), C * (costs.c_minus / costs.c_plus) / m);
    return make_problem(dataset, std::move(ci), Vec(dataset.size(), 1.0), C, kernel, 0);
}

double HMapSpec::operator()(double v) const {
    validate();
    switch (kind) {
        case Kind::identity: return v;
        case Kind::power: return std::pow(v, exponent);
    }
    return v;
}

void HMapSpec::validate() const {
    if (kind == Kind::power && !(exponent > 0.0))
        throw InputError("h map: power exponent must be > 0");
}

TrainingProblem build_problem_confidence(const Dataset& dataset, const Vec& confidences,
                                         const HMapSpec& h, double C, const KernelSpec& kernel) {
    dataset.validate();
    h.validate();
    if (dataset.size() == 0) throw InputError("build_problem_confidence: empty dataset");
    if (!(C > 0.0)) throw InputError("build_problem_confidence: C must be > 0");
    if (confidences.size() != dataset.size())
        throw InputError("build_problem_confidence: confidence count mismatch");
    const double m = static_cast<double>(dataset.size());
    Vec ci(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (!(confidences[i] > 0.0) || confidences[i] > 1.0)
            throw InputError("build_problem_confidence: confidence outside (0,1]");
        ci[i] = C * h(confidences[i]) / m;
    }
    return make_problem(dataset, std::move(ci), Vec(dataset.size(), 1.0), C, kernel, 0);
}

void GridSpec::validate() const {
    box.validate();
    if (!box.finite()) throw InputError("grid: box must be bounded");
    if (counts.size() != box.dim()) throw InputError("grid: counts/box dimension mismatch");
    for (std::size_t c : counts)
        if (c < 1) throw InputError("grid: per-axis count must be >= 1");
}

std::vector<Vec> GridSpec::points() const {
    validate();
    std::vector<Vec> out;
    std::size_t total = 1;
    for (std::size_t c : counts) total *= c;
    out.reserve(total);
    std::vector<std::size_t> idx(counts.size(), 0);
    for (std::size_t t = 0; t < total; ++t) {
        Vec x(counts.size());
        for (std::size_t k = 0; k < counts.size(); ++k) {
            if (counts[k] == 1)
                x[k] = 0.5 * (box.lower[k] + box.upper[k]);
            else
                x[k] = box.lower[k] + (box.upper[k] - box.lower[k]) *
                                          static_cast<double>(idx[k]) /
                                          static_cast<double>(counts[k] - 1);
        }
        out.push_back(std::move(x));
        for (std::size_t k = counts.size(); k-- > 0;) {
            if (++idx[k] < counts[k]) break;
            idx[k] = 0;
        }
    }
    return out;
}

TrainingProblem build_problem_knowledge_points(const Dataset& dataset,
                                               const KnowledgeRegion& region_g, double v,
                                               const GridSpec& grid, double C,
                                               const KernelSpec& kernel,
                                               std::size_t* pseudo_count) {
    dataset.validate();
    region_g.validate();
    if (dataset.size() == 0) throw InputError("build_problem_knowledge_points: empty dataset");
    if (!(C > 0.0)) throw InputError("build_problem_knowledge_points: C must be > 0");
    if (v < 0.0) throw InputError("build_problem_knowledge_points: v must be >= 0");

    std::vector<Vec> pseudo;
    Vec pseudo_margin;
    for (Vec& x : grid.points()) {
        const double g = region_g.g_plus(x);
        if (g <= 0.0) {
            pseudo_margin.push_back(1.0 - v * g);
            pseudo.push_back(std::move(x));
        }
    }
    if (pseudo.empty())
        std::cerr << "note: knowledge-point grid has no points inside the region; "
                     "problem reduces to the plain instantiation\n";
    if (pseudo_count != nullptr) *pseudo_count = pseudo.size();

    TrainingProblem p;
    p.points = dataset.points;
    p.labels = dataset.labels;
    for (std::size_t j = 0; j < pseudo.size(); ++j) {
        p.points.push_back(std::move(pseudo[j]));
        p.labels.push_back(1);
    }
    const double m = static_cast<double>(p.points.size());
    p.per_sample_cost.assign(p.points.size(), C / m);
    p.per_sample_margin.assign(dataset.size(), 1.0);
    p.per_sample_margin.insert(p.per_sample_margin.end(), pseudo_margin.begin(),
                               pseudo_margin.end());
    p.kernel = kernel;
    p.trade_off = C;
    p.m1 = 0;
    p.m2 = p.points.size();
    p.validate();
    return p;
}

namespace {

// Deterministic Fisher-Yates; std::shuffle's draw sequence is
// implementation-defined, this one is pinned.
void seeded_shuffle(std::vector<std::size_t>& order, std::mt19937_64& rng) {
    for (std::size_t i = order.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(order[i - 1], order[j]);
    }
}

double projected_gradient(double grad, double alpha, double cap) {
    if (alpha <= 0.0) return std::min(grad, 0.0);
    if (alpha >= cap) return std::max(grad, 0.0);
    return grad;
}

}  // namespace

TrainedModel solve_dual(const TrainingProblem& problem, const SolverConfig& config) {
    problem.validate();
    config.validate();
    const std::size_t m = problem.size();

    const GramMatrix gram = gram_matrix(problem.kernel, problem.points);
    for (double v : gram.entries)
        if (!std::isfinite(v)) throw NumericError("solve_dual: non-finite kernel value");

    Vec alpha(m, 0.0);
    Vec f(m, 0.0);  // f(x_i) under the current alpha
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(config.shuffle_seed);

    // coordinates with K(x_i,x_i) = 0 cannot affect f; their alpha stays 0
    std::vector<char> active(m, 1);
    for (std::size_t i = 0; i < m; ++i)
        if (gram.at(i, i) <= 0.0) active[i] = 0;

    const auto max_violation = [&]() {
        double worst = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (!active[i]) continue;
            const double grad = problem.labels[i] * f[i] - problem.per_sample_margin[i];
            worst = std::max(worst,
                             std::abs(projected_gradient(grad, alpha[i], problem.per_sample_cost[i])));
        }
        return worst;
    };

    std::size_t pass = 0;
    bool converged = false;
    for (; pass < config.max_passes; ++pass) {
        seeded_shuffle(order, rng);
        for (std::size_t i : order) {
            if (!active[i]) continue;
            const double qii = gram.at(i, i);
            const double step = (problem.per_sample_margin[i] - problem.labels[i] * f[i]) / qii;
            const double next =
                std::clamp(alpha[i] + step, 0.0, problem.per_sample_cost[i]);
            const double delta = next - alpha[i];
            if (delta == 0.0) continue;
            alpha[i] = next;
            const double scaled = delta * problem.labels[i];
            const double* row = gram.row(i);
            for (std::size_t j = 0; j < m; ++j) f[j] += scaled * row[j];
        }
        if (max_violation() <= config.tolerance) {
            ++pass;
            converged = true;
            break;
        }
    }

    const double final_violation = max_violation();

    TrainedModel model;
    model.alphas = std::move(alpha);
    model.points = problem.points;
    model.labels = problem.labels;
    model.per_sample_cost = problem.per_sample_cost;
    model.per_sample_margin = problem.per_sample_margin;
    model.kernel = problem.kernel;
    model.trade_off = problem.trade_off;

    SolverDiagnostics& d = model.diagnostics;
    d.passes = pass;
    d.converged = converged;
    d.violation = final_violation;

    // |f|^2 = sum_i alpha_i y_i f(x_i), from the cached values
    double norm_sq = 0.0;
    double hinge = 0.0;
    double mu_alpha = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        norm_sq += model.alphas[i] * problem.labels[i] * f[i];
        hinge += problem.per_sample_cost[i] *
                 std::max(0.0, problem.per_sample_margin[i] - problem.labels[i] * f[i]);
        mu_alpha += problem.per_sample_margin[i] * model.alphas[i];
    }
    norm_sq = std::max(0.0, norm_sq);
    d.norm_k = std::sqrt(norm_sq);
    d.primal = norm_sq / (2.0 * problem.trade_off) + hinge / problem.trade_off;
    d.dual = (mu_alpha - 0.5 * norm_sq) / problem.trade_off;
    d.gap = d.primal - d.dual;
    return model;
}

namespace {

void require_match(const TrainedModel& model, const TrainingProblem& problem) {
    if (model.points.size() != problem.size() || model.labels != problem.labels ||
        model.per_sample_cost != problem.per_sample_cost ||
        model.per_sample_margin != problem.per_sample_margin ||
        !(model.kernel == problem.kernel) || model.trade_off != problem.trade_off ||
        model.points != problem.points)
        throw InputError("model does not belong to this training problem");
}

}  // namespace

double primal_objective(const TrainedModel& model, const TrainingProblem& problem) {
    require_match(model, problem);
    const GramMatrix gram = gram_matrix(problem.kernel, problem.points);
    const double norm_sq = rkhs_norm_sq(model.alphas, model.labels, gram);
    double hinge = 0.0;
    for (std::size_t i = 0; i < problem.size(); ++i) {
        double fi = 0.0;
        const double* row = gram.row(i);
        for (std::size_t j = 0; j < problem.size(); ++j)
            fi += model.alphas[j] * model.labels[j] * row[j];
        hinge += (problem.per_sample_cost[i] / problem.trade_off) *
                 std::max(0.0, problem.per_sample_margin[i] - problem.labels[i] * fi);
    }
    return std::max(0.0, norm_sq) / (2.0 * problem.trade_off) + hinge;
}

double dual_objective(const TrainedModel& model, const TrainingProblem& problem) {
    require_match(model, problem);
    const GramMatrix gram = gram_matrix(problem.kernel, problem.points);
    const double norm_sq = rkhs_norm_sq(model.alphas, model.labels, gram);
    double mu_alpha = 0.0;
    for (std::size_t i = 0; i < problem.size(); ++i)
        mu_alpha += problem.per_sample_margin[i] * model.alphas[i];
    return (mu_alpha - 0.5 * norm_sq) / problem.trade_off;
}

double duality_gap(const TrainedModel& model, const TrainingProblem& problem) {
    return primal_objective(model, problem) - dual_objective(model, problem);
}

Vec slack_values(const TrainedModel& model) {
    const GramMatrix gram = gram_matrix(model.kernel, model.points);
    Vec slacks(model.points.size());
    for (std::size_t i = 0; i < model.points.size(); ++i) {
        double fi = 0.0;
        const double* row = gram.row(i);
        for (std::size_t j = 0; j < model.points.size(); ++j)
            fi += model.alphas[j] * model.labels[j] * row[j];
        slacks[i] = std::max(0.0, model.per_sample_margin[i] - model.labels[i] * fi);
    }
    return slacks;
}

int predict(const TrainedModel& model, const Vec& x) {
    return model.evaluate(x) >= 0.0 ? 1 : -1;
}

double project_pi(double f_value) {
    if (!std::isfinite(f_value)) throw InputError("project_pi: non-finite input");
    return std::clamp(f_value, -1.0, 1.0);
}

NormBoundReport check_norm_bound(const TrainedModel& model, const TrainingProblem& problem,
                                 const CostStructure& costs) {
    require_match(model, problem);
    costs.validate();
    if (!problem.unit_margins())
        throw InputError("check_norm_bound: only unit-margin (knowledge) problems supported");
    const double m = static_cast<double>(problem.size());
    const double m_tilde = (costs.c_minus / costs.c_plus) *
                           (costs.c_hat * static_cast<double>(problem.m1) +
                            static_cast<double>(problem.m2)) /
                           m;
    NormBoundReport rep;
    const GramMatrix gram = gram_matrix(problem.kernel, problem.points);
    rep.norm = std::sqrt(std::max(0.0, rkhs_norm_sq(model.alphas, model.labels, gram)));
    rep.bound = std::sqrt(2.0 * problem.trade_off * m_tilde);
    rep.holds = rep.norm <= rep.bound * (1.0 + 1e-9);
    return rep;
}

// ---------------------------------------------------------------------------
// model file I/O

namespace {

constexpr int kModelFormatVersion = 1;

void dump_vec(std::ostream& out, const Vec& v) {
    out << "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ",";
        out << format_double(v[i]);
    }
    out << "]";
}

}  // namespace

void save_model(const TrainedModel& model, const std::string& path) {
    model.validate();
    std::ofstream out(path);
    if (!out) throw InputError("cannot write model file: " + path);
    out << "{\n";
    out << "  \"format_version\": " << kModelFormatVersion << ",\n";
    out << "  \"kernel\": " << kernel_to_json(model.kernel).dump() << ",\n";
    out << "  \"trade_off\": " << format_double(model.trade_off) << ",\n";
    out << "  \"points\": [";
    for (std::size_t i = 0; i < model.points.size(); ++i) {
        if (i) out << ",";
        dump_vec(out, model.points[i]);
    }
    out << "],\n";
    out << "  \"labels\": [";
    for (std::size_t i = 0; i < model.labels.size(); ++i) {
        if (i) out << ",";
        out << model.labels[i];
    }
    out << "],\n";
    out << "  \"alphas\": ";
    dump_vec(out, model.alphas);
    out << ",\n  \"per_sample_cost\": ";
    dump_vec(out, model.per_sample_cost);
    out << ",\n  \"per_sample_margin\": ";
    dump_vec(out, model.per_sample_margin);
    out << ",\n  \"diagnostics\": {";
    out << "\"passes\": " << model.diagnostics.passes;
    out << ", \"violation\": " << format_double(model.diagnostics.violation);
    out << ", \"primal\": " << format_double(model.diagnostics.primal);
    out << ", \"dual\": " << format_double(model.diagnostics.dual);
    out << ", \"gap\": " << format_double(model.diagnostics.gap);
    out << ", \"norm_k\": " << format_double(model.diagnostics.norm_k);
    out << ", \"converged\": " << (model.diagnostics.converged ? "true" : "false");
    out << "}\n}\n";
    if (!out) throw InputError("failed writing model file: " + path);
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("model file " + path + ": " + e.what());
    }
    try {
        if (!j.contains("format_version") || !j["format_version"].is_number_integer())
            throw FormatError("model file: missing format_version");
        if (j["format_version"].get<int>() != kModelFormatVersion)
            throw FormatError("model file: unknown format_version " +
                              j["format_version"].dump());
        TrainedModel model;
        model.kernel = kernel_from_json(j.at("kernel"));
        model.trade_off = j.at("trade_off").get<double>();
        for (const auto& row : j.at("points"))
            model.points.push_back(row.get<Vec>());
        model.labels = j.at("labels").get<std::vector<int>>();
        model.alphas = j.at("alphas").get<Vec>();
        model.per_sample_cost = j.at("per_sample_cost").get<Vec>();
        model.per_sample_margin = j.at("per_sample_margin").get<Vec>();
        const auto& d = j.at("diagnostics");
        model.diagnostics.passes = d.at("passes").get<std::size_t>();
        model.diagnostics.violation = d.at("violation").get<double>();
        model.diagnostics.primal = d.at("primal").get<double>();
        model.diagnostics.dual = d.at("dual").get<double>();
        model.diagnostics.gap = d.at("gap").get<double>();
        model.diagnostics.norm_k = d.at("norm_k").get<double>();
        model.diagnostics.converged = d.at("converged").get<bool>();
        model.validate();
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("model file " + path + ": " + e.what());
    }
}

}  // namespace utilisvm
