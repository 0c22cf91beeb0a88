#pragma once

#include "utilisvm/oracle.hpp"
#include "utilisvm/trainer.hpp"

namespace utilisvm {

/// One seeded experiment: train on growing sample sizes with C = m^gamma and
/// measure the utility gap to the optimal rule by quadrature.
struct ExperimentPlan {
    SyntheticDistribution distribution;
    CostStructure costs;
    KnowledgeRegion region;
    KernelSpec kernel;
    double gamma = 0.5;  // C = m^gamma, 0 < gamma < 1
    std::vector<std::size_t> m_grid;
    std::size_t repetitions = 1;
    std::uint64_t base_seed = 1;
    SolverConfig solver;
    QuadratureSpec quadrature;

    void validate() const;
};

/// Per-cell seed: base ^ (m * golden + rep),64-bit wraparound.
std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t m, std::size_t rep);

struct ReportRow {
    std::string variant;
    std::size_t m = 0;
    std::size_t rep = 0;
    std::uint64_t seed = 0;
    double C = 0.0;
    double gap = 0.0;       // U(f_q) - U(sgn f)
    double utility = 0.0;   // U(sgn f)
    double u_fq = 0.0;      // U(f_q)
    double emp_error = 0.0; // training-set empirical error of f
    double norm = 0.0;      // |f|_K
    double norm_bound = 0.0;
    double theory_bound = 0.0;  // sample-error budget at delta = 0.05
    bool converged = false;

    bool operator==(const ReportRow& other) const = default;
};

struct GapAggregate {
    std::size_t m = 0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
};

struct ConvergenceReport {
    std::vector<ReportRow> rows;

    /// Quartiles of the gap per m, pooled over variants and repetitions.
    std::vector<GapAggregate> gap_quartiles() const;
    bool operator==(const ConvergenceReport& other) const { return rows == other.rows; }
};

ConvergenceReport convergence_run(const ExperimentPlan& plan);

/// A trainer instantiation to compare under the plan's utility.
struct VariantSpec {
    enum class Kind { standard, lin, knowledge, confidence, knowledge_points } kind =
        Kind::knowledge;
    HMapSpec h;                // confidence
    double confidence = 1.0;   // confidence: constant per-sample value
    double v = 0.0;            // knowledge_points: margin slope
    std::vector<std::size_t> grid_counts;  // knowledge_points: grid over the domain box

    std::string name() const;
    void validate() const;
};

/// Trains every variant on identical data per cell and evaluates all of them
/// under the plan's costs and region.
ConvergenceReport comparison_run(const ExperimentPlan& plan,
                                 const std::vector<VariantSpec>& variants);

struct BridgeCheckResult {
    std::size_t n_functions = 0;
    std::size_t violations = 0;
    double max_excess = -std::numeric_limits<double>::infinity();
};

/// Draws random kernel expansions (10 centers, coefficients in [-2,2]) and
/// checks U(f_q) - U(sgn f) <= E(f) - E(f_q) for each, allowing the
/// quadrature tolerance.
BridgeCheckResult bridge_check(const SyntheticDistribution& dist, const CostStructure& costs,
                              const KnowledgeRegion& region, const KernelSpec& kernel,
                              std::size_t n_functions, std::uint64_t seed,
                              const QuadratureSpec& quad);

/// CSV columns: variant,m,rep,seed,C,gap,utility,u_fq,emp_error,norm,
/// norm_bound,theory_bound,converged. Rows ordered by (variant, m, rep);
/// output is byte-deterministic.
void emit_report_csv(const ConvergenceReport& report, const std::string& path);
void emit_report_json(const ConvergenceReport& report, const std::string& path);
ConvergenceReport load_report_json(const std::string& path);
std::string report_to_csv_string(const ConvergenceReport& report);

/// The distribution/costs/region/kernel every experiment defaults to:
/// uniform on [0,1]^2, logistic eta, a ball region straddling the optimal
/// boundary, c+ = c- = 1 and c_hat = 4.
ExperimentPlan bundled_default_plan();

struct BundledDistribution {
    std::string name;
    SyntheticDistribution dist;
    CostStructure costs;
    KnowledgeRegion region;
};

/// Three fixtures covering every marginal, eta and region family.
std::vector<BundledDistribution> bundled_test_distributions();

}  // namespace utilisvm
