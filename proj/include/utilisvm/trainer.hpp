#pragma once

#include "utilisvm/dataset.hpp"
#include "utilisvm/kernel.hpp"
#include "utilisvm/knowledge.hpp"

namespace utilisvm {

/// Generalized weighted-margin hinge problem
///   min_f  1/(2C) |f|_K^2 + sum_i (C_i / C) * max(0, mu_i - y_i f(x_i))
/// over the RKHS of `kernel`, with per-sample cost C_i > 0 and margin mu_i.
/// There is no intercept term.
struct TrainingProblem {
    std::vector<Vec> points;
    std::vector<int> labels;
    Vec per_sample_cost;    // C_i
    Vec per_sample_margin;  // mu_i
    KernelSpec kernel;
    double trade_off = 1.0;  // C
    std::size_t m1 = 0;      // samples with x in A+ and y = +1
    std::size_t m2 = 0;      // the rest

    std::size_t size() const { return points.size(); }
    void validate() const;
    bool unit_margins() const;
};

struct SolverConfig {
    double tolerance = 1e-6;
    std::size_t max_passes = 10000;
    std::uint64_t shuffle_seed = 0;

    void validate() const;
};

struct SolverDiagnostics {
    std::size_t passes = 0;
    double violation = 0.0;  // max projected-gradient magnitude at the final iterate
    double primal = 0.0;
    double dual = 0.0;
    double gap = 0.0;
    double norm_k = 0.0;  // |f|_K
    bool converged = false;
};

/// Solution in representer form: f(x) = sum_i alphas[i] * labels[i] * K(x_i, x),
/// with 0 <= alphas[i] <= C_i.
struct TrainedModel {
    Vec alphas;
    std::vector<Vec> points;
    std::vector<int> labels;
    Vec per_sample_cost;
    Vec per_sample_margin;
    KernelSpec kernel;
    double trade_off = 1.0;
    SolverDiagnostics diagnostics;

    double evaluate(const Vec& x) const;
    std::vector<std::size_t> support_set() const;
    void validate() const;
};

/// Knowledge-based weighting: C_i = C * sample_weight(costs, region, x_i, y_i) / m,
/// all margins 1. Emits the c_hat diagnostic to stderr when applicable.
TrainingProblem build_problem_knowledge(const Dataset& dataset, const CostStructure& costs,
                                        const KnowledgeRegion& region, double C,
                                        const KernelSpec& kernel);

/// Unweighted instantiation: C_i = C / m, margins 1.
TrainingProblem build_problem_standard(const Dataset& dataset, double C,
                                       const KernelSpec& kernel);

/// Cost-only instantiation (no region): C_i = C * (c-/c+) / m, margins 1.
TrainingProblem build_problem_lin(const Dataset& dataset, const CostStructure& costs, double C,
                                  const KernelSpec& kernel);

/// Monotone confidence transform for the confidence-weighted instantiation.
struct HMapSpec {
    enum class Kind { identity, power } kind = Kind::identity;
    double exponent = 1.0;

    double operator()(double v) const;
    void validate() const;
};

/// Confidence weighting: C_i = C * h(v_i) / m, margins 1.
TrainingProblem build_problem_confidence(const Dataset& dataset, const Vec& confidences,
                                         const HMapSpec& h, double C, const KernelSpec& kernel);

/// Regular grid over a box, per-axis point counts. A single point on an axis
/// sits at the midpoint; otherwise points include both endpoints.
struct GridSpec {
    Box box;
    std::vector<std::size_t> counts;

    void validate() const;
    std::vector<Vec> points() const;
};

/// Knowledge-point instantiation: appends the grid points with g(x) <= 0 as
/// positive pseudo-samples with margin 1 - v * g(x); every sample (original
/// or pseudo) gets cost C / (m + p).
TrainingProblem build_problem_knowledge_points(const Dataset& dataset,
                                               const KnowledgeRegion& region_g, double v,
                                               const GridSpec& grid, double C,
                                               const KernelSpec& kernel,
                                               std::size_t* pseudo_count = nullptr);

/// Dual coordinate descent on
///   max_alpha  sum_i mu_i alpha_i - 1/2 sum_ij alpha_i alpha_j y_i y_j K(x_i,x_j)
///   s.t. 0 <= alpha_i <= C_i
/// (no equality constraint; the primal has no intercept). Deterministic for a
/// fixed shuffle_seed. Non-convergence is reported via diagnostics, not thrown.
TrainedModel solve_dual(const TrainingProblem& problem, const SolverConfig& config);

double primal_objective(const TrainedModel& model, const TrainingProblem& problem);
double dual_objective(const TrainedModel& model, const TrainingProblem& problem);
double duality_gap(const TrainedModel& model, const TrainingProblem& problem);

/// Post-hoc slack values (mu_i - y_i f(x_i))_+ over the training points.
Vec slack_values(const TrainedModel& model);

/// sgn(f(x)) with sgn(0) = +1.
int predict(const TrainedModel& model, const Vec& x);

/// Clamp to [-1, 1].
double project_pi(double f_value);

struct NormBoundReport {
    double norm = 0.0;
    double bound = 0.0;
    bool holds = false;
};

/// |f|_K against sqrt(2 C M~) with M~ = (c-/c+) (c_hat m1 + m2) / m.
/// Only defined for unit-margin (knowledge-style) problems.
NormBoundReport check_norm_bound(const TrainedModel& model, const TrainingProblem& problem,
                                 const CostStructure& costs);

/// Model file format: JSON, format_version 1, numbers with >= 17 significant
/// digits so that save/load round-trips predictions bit-exactly.
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

}  // namespace utilisvm
