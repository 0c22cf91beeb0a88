#pragma once

#include "utilisvm/dataset.hpp"
#include "utilisvm/knowledge.hpp"

namespace utilisvm {

/// Marginal distribution over the domain box, with closed-form density:
/// uniform, or a Gaussian mixture truncated to the box (diagonal covariance).
struct MarginalSpec {
    enum class Kind { uniform, gaussian_mixture } kind = Kind::uniform;

    struct Component {
        double weight = 1.0;
        Vec mean;
        Vec sigma;  // per-axis standard deviation
    };
    std::vector<Component> components;

    void validate(const Box& domain) const;
};

/// Conditional positive probability eta(x) = Pr(Y=1 | X=x), in closed form.
struct EtaSpec {
    enum class Kind { constant, logistic, linear, piecewise_constant } kind = Kind::constant;

    double value = 0.5;  // constant
    Vec w;               // logistic: 1/(1+exp(-(w.x+b))); linear: clamp(w.x+b, 0, 1)
    double b = 0.0;
    std::size_t axis = 0;  // piecewise_constant: cell edges along one axis
    Vec edges;             // strictly ascending interior edges
    Vec values;            // edges.size() + 1 cell values, each in [0,1]

    void validate(const Box& domain) const;
};

/// A distribution with known eta, so the utility-optimal classifier and all
/// expectations can be computed exactly.
struct SyntheticDistribution {
    MarginalSpec marginal;
    EtaSpec eta_spec;
    Box domain;

    void validate() const;
    std::size_t dim() const { return domain.dim(); }

    /// Marginal density at x (normalized over the box).
    double density(const Vec& x) const;
};

double eta(const SyntheticDistribution& dist, const Vec& x);

/// m i.i.d. samples: x from the marginal (inverse CDF per axis for uniform,
/// component draw + rejection into the box for mixtures), y = +1 with
/// probability eta(x). Deterministic for a fixed seed.
Dataset sample_dataset(const SyntheticDistribution& dist, std::size_t m, std::uint64_t seed);

/// Utility-optimal rule: +1 iff w(x) eta(x) >= 1 - eta(x), where w(x) is the
/// in-region positive weight c- c_hat / c+ inside A+ and c- / c+ outside.
/// Ties go to +1. With c_hat = 1 this is the cost-threshold rule; with
/// c_hat = 1 and c+ = c- it is the Bayes rule.
int optimal_classifier_fq(const SyntheticDistribution& dist, const CostStructure& costs,
                          const KnowledgeRegion& region, const Vec& x);

struct PointwiseMinimum {
    double argmin_w = 0.0;
    double min_value = 0.0;
};

/// Exhaustive grid minimization of
///   G(w) = weight_pos * eta * (margin - w)_+ + weight_neg * (1 - eta) * (margin + w)_+
/// over w in [-1, 1]; ties resolve toward +1.
PointwiseMinimum pointwise_minimizer(double eta_value, double weight_pos, double weight_neg,
                                     double margin, std::size_t grid_steps);

struct QuadratureSpec {
    std::size_t nodes_per_axis = 64;
    // accuracy target: ~1e-9 for smooth integrands, ~1e-3 for the
    // discontinuous ones classifiers produce (inequality checks evaluate
    // both sides on the same grid, where the comparison is exact node-wise)
    double abs_tolerance = 1e-3;
    std::size_t mc_samples = 200000;  // Monte-Carlo fallback for dim > 3
    std::uint64_t mc_seed = 0x5eedULL;

    void validate() const;
};

enum class EvalMode { quadrature, monte_carlo };

struct UtilityReport {
    double utility = 0.0;                  // U(f), always <= 0
    double expected_cost = 0.0;            // -c+ * U evaluated at c_hat = 1
    double misclassification_error = 0.0;  // the c_hat = 1, c+ = c- = 1 instance
    double utility_gap = 0.0;              // U(f_q) - U(f)
    double u_fq = 0.0;                     // U(f_q)
    EvalMode mode = EvalMode::quadrature;
    double ci_half_width = 0.0;  // 99% CI on `utility` (Monte-Carlo mode only)
};

using Classifier = std::function<int(const Vec&)>;
using RealFunction = std::function<double(const Vec&)>;

/// U(f) = -E[ (1-eta) 1{f=+1} + w(x) eta 1{f=-1} ] against the marginal.
/// Tensor Gauss-Legendre for dim <= 3, seeded Monte-Carlo above.
UtilityReport utility(const SyntheticDistribution& dist, const CostStructure& costs,
                      const KnowledgeRegion& region, const Classifier& classifier,
                      const QuadratureSpec& quad);

/// Generalization error E(f) = E[ V(Y, f(X)) ] of a real-valued function under
/// the piecewise weighted hinge.
double generalization_error(const SyntheticDistribution& dist, const CostStructure& costs,
                            const KnowledgeRegion& region, const RealFunction& f,
                            const QuadratureSpec& quad);

/// Plug-in estimate of U(f) on a labeled test set.
double empirical_utility(const Dataset& test_set, const CostStructure& costs,
                         const KnowledgeRegion& region, const Classifier& classifier);

/// Per-sample variance of the empirical-utility terms (for standard errors).
double empirical_utility_variance(const Dataset& test_set, const CostStructure& costs,
                                  const KnowledgeRegion& region, const Classifier& classifier);

/// Sample mean of the piecewise loss of f over the dataset.
double empirical_error(const Dataset& dataset, const CostStructure& costs,
                       const KnowledgeRegion& region, const RealFunction& f);

struct SampleErrorBound {
    double m_tilde = 0.0;
    double beta = 0.0;
    double radius = 0.0;     // R = sqrt(2 C M~)
    double eps_rad = 0.0;    // (1 + kappa R) beta sqrt(ln(2/delta) / m)
    double rad_term = 0.0;   // 2 kappa R beta / sqrt(m)
    double m_bar = 0.0;      // beta (1 + kappa sqrt(2 beta C))
    double eps_hoeff = 0.0;  // M^bar sqrt(2 ln(2/delta) / m)
    double total = 0.0;
};

/// High-probability sample-error budget at confidence 1 - delta.
SampleErrorBound sample_error_bound(std::size_t m, double C, double delta,
                                    const CostStructure& costs, std::size_t m1, std::size_t m2,
                                    double kappa);

}  // namespace utilisvm
