#include "utilisvm/oracle.hpp"

#include <algorithm>
#include <array>
#include <random>

namespace utilisvm {

// ---------------------------------------------------------------------------
// specs and validation

void MarginalSpec::validate(const Box& domain) const {
    if (kind == Kind::uniform) {
        if (!domain.finite()) throw InputError("uniform marginal: box must be bounded");
        if (!(domain.volume() > 0.0))
            throw InputError("uniform marginal: box must have positive volume");
        return;
    }
    if (components.empty()) throw InputError("gaussian mixture: no components");
    double total = 0.0;
    for (const Component& c : components) {
        if (!(c.weight > 0.0)) throw InputError("gaussian mixture: weights must be > 0");
        if (c.mean.size() != domain.dim() || c.sigma.size() != domain.dim())
            throw InputError("gaussian mixture: component dimension mismatch");
        if (!all_finite(c.mean)) throw InputError("gaussian mixture: non-finite mean");
        for (double s : c.sigma)
            if (!(s > 0.0) || !std::isfinite(s))
                throw InputError("gaussian mixture: sigma must be > 0");
        total += c.weight;
    }
    if (!(total > 0.0)) throw InputError("gaussian mixture: zero total weight");
    if (!domain.finite()) throw InputError("gaussian mixture: box must be bounded");
}

void EtaSpec::validate(const Box& domain) const {
    switch (kind) {
        case Kind::constant:
            if (!(value >= 0.0 && value <= 1.0))
                throw InputError("eta: constant value must be in [0,1]");
            break;
        case Kind::logistic:
        case Kind::linear:
            if (w.size() != domain.dim()) throw InputError("eta: weight dimension mismatch");
            if (!all_finite(w) || !std::isfinite(b))
                throw InputError("eta: non-finite parameter");
            break;
        case Kind::piecewise_constant: {
            if (axis >= domain.dim()) throw InputError("eta: axis out of range");
            if (values.size() != edges.size() + 1)
                throw InputError("eta: need edges.size()+1 values");
            for (std::size_t i = 0; i + 1 < edges.size(); ++i)
                if (!(edges[i] < edges[i + 1]))
                    throw InputError("eta: edges must be strictly ascending");
            for (double e : edges)
                if (!std::isfinite(e)) throw InputError("eta: non-finite edge");
            for (double v : values)
                if (!(v >= 0.0 && v <= 1.0)) throw InputError("eta: values must be in [0,1]");
            break;
        }
    }
}

void SyntheticDistribution::validate() const {
    domain.validate();
    if (!domain.finite()) throw InputError("distribution: domain box must be bounded");
    marginal.validate(domain);
    eta_spec.validate(domain);
}

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double normal_cdf(double z) { return 0.5 * (1.0 + std::erf(z * kInvSqrt2)); }

double component_box_mass(const MarginalSpec::Component& c, const Box& box) {
    double mass = 1.0;
    for (std::size_t k = 0; k < box.dim(); ++k) {
        const double lo = (box.lower[k] - c.mean[k]) / c.sigma[k];
        const double hi = (box.upper[k] - c.mean[k]) / c.sigma[k];
        mass *= normal_cdf(hi) - normal_cdf(lo);
    }
    return mass;
}

double component_density(const MarginalSpec::Component& c, const Vec& x) {
    double d = 1.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double z = (x[k] - c.mean[k]) / c.sigma[k];
        d *= kInvSqrt2Pi / c.sigma[k] * std::exp(-0.5 * z * z);
    }
    return d;
}

}  // namespace

double SyntheticDistribution::density(const Vec& x) const {
    if (!domain.contains(x)) return 0.0;
    if (marginal.kind == MarginalSpec::Kind::uniform) return 1.0 / domain.volume();
    // component weights cancel between numerator and truncation mass, so no
    // separate normalization is needed
    double trunc_mass = 0.0;
    double dens = 0.0;
    for (const auto& c : marginal.components) {
        trunc_mass += c.weight * component_box_mass(c, domain);
        dens += c.weight * component_density(c, x);
    }
    if (!(trunc_mass > 0.0)) throw NumericError("gaussian mixture: no mass inside the box");
    return dens / trunc_mass;
}

double eta(const SyntheticDistribution& dist, const Vec& x) {
    if (x.size() != dist.dim()) throw InputError("eta: dimension mismatch");
    if (!dist.domain.contains(x)) throw InputError("eta: x outside the domain box");
    const EtaSpec& s = dist.eta_spec;
    switch (s.kind) {
        case EtaSpec::Kind::constant:
            return s.value;
        case EtaSpec::Kind::logistic: {
            double t = s.b;
            for (std::size_t k = 0; k < x.size(); ++k) t += s.w[k] * x[k];
            return 1.0 / (1.0 + std::exp(-t));
        }
        case EtaSpec::Kind::linear: {
            double t = s.b;
            for (std::size_t k = 0; k < x.size(); ++k) t += s.w[k] * x[k];
            return std::clamp(t, 0.0, 1.0);
        }
        case EtaSpec::Kind::piecewise_constant: {
            const double coord = x[s.axis];
            const std::size_t cell =
                std::upper_bound(s.edges.begin(), s.edges.end(), coord) - s.edges.begin();
            return s.values[cell];
        }
    }
    throw InputError("eta: unknown spec kind");
}

// ---------------------------------------------------------------------------
// sampling

namespace {

// 53-bit uniform in [0, 1)
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double standard_normal(std::mt19937_64& rng) {
    const double u1 = 1.0 - uniform01(rng);  // (0, 1]
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Vec sample_marginal(const SyntheticDistribution& dist, std::mt19937_64& rng) {
    const Box& box = dist.domain;
    const std::size_t n = box.dim();
    Vec x(n);
    if (dist.marginal.kind == MarginalSpec::Kind::uniform) {
        for (std::size_t k = 0; k < n; ++k)
            x[k] = box.lower[k] + (box.upper[k] - box.lower[k]) * uniform01(rng);
        return x;
    }
    double total = 0.0;
    for (const auto& c : dist.marginal.components) total += c.weight;
    for (std::size_t attempt = 0; attempt < 1000000; ++attempt) {
        double pick = uniform01(rng) * total;
        std::size_t ci = 0;
        for (; ci + 1 < dist.marginal.components.size(); ++ci) {
            pick -= dist.marginal.components[ci].weight;
            if (pick < 0.0) break;
        }
        const auto& c = dist.marginal.components[ci];
        for (std::size_t k = 0; k < n; ++k)
            x[k] = c.mean[k] + c.sigma[k] * standard_normal(rng);
        if (box.contains(x)) return x;
    }
    throw NumericError("gaussian mixture sampling: rejection failed; "
                       "the box carries almost no mass");
}

}  // namespace

Dataset sample_dataset(const SyntheticDistribution& dist, std::size_t m, std::uint64_t seed) {
    dist.validate();
    if (m < 1) throw InputError("sample_dataset: m must be >= 1");
    std::mt19937_64 rng(seed);
    Dataset ds;
    ds.points.reserve(m);
    ds.labels.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        Vec x = sample_marginal(dist, rng);
        const double p = eta(dist, x);
        const int y = uniform01(rng) < p ? 1 : -1;
        ds.push_back(std::move(x), y);
    }
    return ds;
}

// ---------------------------------------------------------------------------
// the optimal rule and the pointwise oracle

int optimal_classifier_fq(const SyntheticDistribution& dist, const CostStructure& costs,
                          const KnowledgeRegion& region, const Vec& x) {
    costs.validate();
    const double p = eta(dist, x);
    const double w = region_membership(region, x) ? costs.beta() : costs.c_minus / costs.c_plus;
    return w * p >= 1.0 - p ? 1 : -1;
}

PointwiseMinimum pointwise_minimizer(double eta_value, double weight_pos, double weight_neg,
                                     double margin, std::size_t grid_steps) {
    if (!(eta_value >= 0.0 && eta_value <= 1.0))
        throw InputError("pointwise_minimizer: eta must be in [0,1]");
    if (!(weight_pos > 0.0) || !(weight_neg > 0.0))
        throw InputError("pointwise_minimizer: weights must be > 0");
    if (!(margin >= 1.0)) throw InputError("pointwise_minimizer: margin must be >= 1");
    if (grid_steps < 1000) throw InputError("pointwise_minimizer: grid_steps must be >= 1000");

    const auto g = [&](double w) {
        return weight_pos * eta_value * std::max(0.0, margin - w) +
               weight_neg * (1.0 - eta_value) * std::max(0.0, margin + w);
    };
    // scan from +1 downward so exact ties resolve to the positive side
    PointwiseMinimum best{1.0, g(1.0)};
    for (std::size_t j = grid_steps; j-- > 0;) {
        const double w = -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(grid_steps);
        const double v = g(w);
        if (v < best.min_value) best = {w, v};
    }
    return best;
}

// ---------------------------------------------------------------------------
// quadrature

void QuadratureSpec::validate() const {
    if (nodes_per_axis < 2) throw InputError("quadrature: nodes_per_axis must be >= 2");
    if (!(abs_tolerance > 0.0)) throw InputError("quadrature: tolerance must be > 0");
    if (mc_samples < 100) throw InputError("quadrature: mc_samples must be >= 100");
}

namespace {

// Gauss-Legendre nodes and weights on [-1, 1], Newton iteration on P_n.
void gauss_legendre(std::size_t n, Vec& nodes, Vec& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

struct TensorGrid {
    std::vector<Vec> axis_nodes;    // mapped into the box
    std::vector<Vec> axis_weights;  // scaled by the box half-width
    std::size_t dim = 0;
    std::size_t per_axis = 0;
    std::size_t total = 0;

    TensorGrid(const Box& box, std::size_t nodes_per_axis) {
        dim = box.dim();
        per_axis = nodes_per_axis;
        total = 1;
        Vec base_nodes, base_weights;
        gauss_legendre(nodes_per_axis, base_nodes, base_weights);
        axis_nodes.resize(dim);
        axis_weights.resize(dim);
        for (std::size_t k = 0; k < dim; ++k) {
            const double mid = 0.5 * (box.lower[k] + box.upper[k]);
            const double half = 0.5 * (box.upper[k] - box.lower[k]);
            axis_nodes[k].resize(nodes_per_axis);
            axis_weights[k].resize(nodes_per_axis);
            for (std::size_t i = 0; i < nodes_per_axis; ++i) {
                axis_nodes[k][i] = mid + half * base_nodes[i];
                axis_weights[k][i] = half * base_weights[i];
            }
            total *= nodes_per_axis;
        }
    }

    void point(std::size_t flat, Vec& x, double& weight) const {
        weight = 1.0;
        for (std::size_t k = dim; k-- > 0;) {
            const std::size_t i = flat % per_axis;
            flat /= per_axis;
            x[k] = axis_nodes[k][i];
            weight *= axis_weights[k][i];
        }
    }
};

/// Integrate several integrands of x against the marginal in one pass.
/// fn(x) fills `out` with the integrand values at x.
template <std::size_t N>
std::array<double, N> integrate(const SyntheticDistribution& dist, std::size_t nodes_per_axis,
                                const std::function<void(const Vec&, std::array<double, N>&)>& fn) {
    const TensorGrid grid(dist.domain, nodes_per_axis);
    std::vector<Vec> buffers(N, Vec(grid.total));
    parallel_for(grid.total, [&](std::size_t t) {
        Vec x(grid.dim);
        double w = 0.0;
        grid.point(t, x, w);
        const double dens = dist.density(x);
        std::array<double, N> vals{};
        fn(x, vals);
        for (std::size_t q = 0; q < N; ++q) buffers[q][t] = w * dens * vals[q];
    });
    std::array<double, N> result{};
    for (std::size_t q = 0; q < N; ++q) result[q] = pairwise_sum(buffers[q]);
    return result;
}

int checked_classify(const Classifier& classifier, const Vec& x) {
    const int g = classifier(x);
    if (g != 1 && g != -1)
        throw ContractError("classifier returned a value outside {-1,+1}");
    return g;
}

}  // namespace

UtilityReport utility(const SyntheticDistribution& dist, const CostStructure& costs,
                      const KnowledgeRegion& region, const Classifier& classifier,
                      const QuadratureSpec& quad) {
    dist.validate();
    costs.validate();
    region.validate();
    quad.validate();

    const double ratio = costs.c_minus / costs.c_plus;
    const auto integrands = [&](const Vec& x, std::array<double, 4>& out) {
        const double p = eta(dist, x);
        const bool member = region_membership(region, x);
        const double w = member ? costs.beta() : ratio;
        const int g = checked_classify(classifier, x);
        const int fq = w * p >= 1.0 - p ? 1 : -1;
        out[0] = g == 1 ? (1.0 - p) : w * p;                              // -U(f)
        out[1] = g == 1 ? costs.c_plus * (1.0 - p) : costs.c_minus * p;   // expected cost
        out[2] = g == 1 ? (1.0 - p) : p;                                  // misclassification
        out[3] = fq == 1 ? (1.0 - p) : w * p;                             // -U(f_q)
    };

    UtilityReport rep;
    if (dist.dim() <= 3) {
        const auto sums = integrate<4>(dist, quad.nodes_per_axis, integrands);
        rep.utility = -sums[0];
        rep.expected_cost = sums[1];
        rep.misclassification_error = sums[2];
        rep.u_fq = -sums[3];
        rep.mode = EvalMode::quadrature;
    } else {
        std::mt19937_64 rng(quad.mc_seed);
        Vec risk(quad.mc_samples);
        double s1 = 0.0, s2 = 0.0, s3 = 0.0;
        for (std::size_t t = 0; t < quad.mc_samples; ++t) {
            const Vec x = sample_marginal(dist, rng);
            std::array<double, 4> vals{};
            integrands(x, vals);
            risk[t] = vals[0];
            s1 += vals[1];
            s2 += vals[2];
            s3 += vals[3];
        }
        const double n = static_cast<double>(quad.mc_samples);
        const double mean_risk = pairwise_sum(risk) / n;
        double var = 0.0;
        for (double r : risk) var += (r - mean_risk) * (r - mean_risk);
        var /= (n - 1.0);
        rep.utility = -mean_risk;
        rep.expected_cost = s1 / n;
        rep.misclassification_error = s2 / n;
        rep.u_fq = -s3 / n;
        rep.mode = EvalMode::monte_carlo;
        rep.ci_half_width = 2.5758293035489004 * std::sqrt(var / n);  // 99%
    }
    rep.utility_gap = rep.u_fq - rep.utility;
    return rep;
}

double generalization_error(const SyntheticDistribution& dist, const CostStructure& costs,
                            const KnowledgeRegion& region, const RealFunction& f,
                            const QuadratureSpec& quad) {
    dist.validate();
    costs.validate();
    region.validate();
    quad.validate();

    const double ratio = costs.c_minus / costs.c_plus;
    const auto integrand = [&](const Vec& x, std::array<double, 1>& out) {
        const double p = eta(dist, x);
        const double fx = f(x);
        if (!std::isfinite(fx)) throw ContractError("generalization_error: f(x) not finite");
        const double w_pos = region_membership(region, x) ? costs.beta() : ratio;
        out[0] = w_pos * p * std::max(0.0, 1.0 - fx) +
                 ratio * (1.0 - p) * std::max(0.0, 1.0 + fx);
    };

    if (dist.dim() <= 3) return integrate<1>(dist, quad.nodes_per_axis, integrand)[0];

    std::mt19937_64 rng(quad.mc_seed);
    Vec vals(quad.mc_samples);
    for (std::size_t t = 0; t < quad.mc_samples; ++t) {
        const Vec x = sample_marginal(dist, rng);
        std::array<double, 1> out{};
        integrand(x, out);
        vals[t] = out[0];
    }
    return pairwise_sum(vals) / static_cast<double>(quad.mc_samples);
}

// ---------------------------------------------------------------------------
// empirical estimators

double empirical_utility(const Dataset& test_set, const CostStructure& costs,
                         const KnowledgeRegion& region, const Classifier& classifier) {
    if (test_set.size() == 0) throw InputError("empirical_utility: empty test set");
    costs.validate();
    const double ratio = costs.c_minus / costs.c_plus;
    Vec terms(test_set.size(), 0.0);
    for (std::size_t i = 0; i < test_set.size(); ++i) {
        const int g = checked_classify(classifier, test_set.points[i]);
        const int y = test_set.labels[i];
        if (y == -1 && g == 1) terms[i] = 1.0;
        else if (y == 1 && g == -1)
            terms[i] = region_membership(region, test_set.points[i]) ? costs.beta() : ratio;
    }
    return -pairwise_sum(terms) / static_cast<double>(test_set.size());
}

double empirical_utility_variance(const Dataset& test_set, const CostStructure& costs,
                                  const KnowledgeRegion& region, const Classifier& classifier) {
    if (test_set.size() < 2) throw InputError("empirical_utility_variance: need >= 2 samples");
    costs.validate();
    const double ratio = costs.c_minus / costs.c_plus;
    Vec terms(test_set.size(), 0.0);
    for (std::size_t i = 0; i < test_set.size(); ++i) {
        const int g = checked_classify(classifier, test_set.points[i]);
        const int y = test_set.labels[i];
        if (y == -1 && g == 1) terms[i] = -1.0;
        else if (y == 1 && g == -1)
            terms[i] = -(region_membership(region, test_set.points[i]) ? costs.beta() : ratio);
    }
    const double n = static_cast<double>(test_set.size());
    const double mean = pairwise_sum(terms) / n;
    double var = 0.0;
    for (double t : terms) var += (t - mean) * (t - mean);
    return var / (n - 1.0);
}

double empirical_error(const Dataset& dataset, const CostStructure& costs,
                       const KnowledgeRegion& region, const RealFunction& f) {
    if (dataset.size() == 0) throw InputError("empirical_error: empty dataset");
    Vec losses(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i)
        losses[i] = piecewise_loss(costs, region, dataset.points[i], dataset.labels[i],
                                   f(dataset.points[i]));
    return pairwise_sum(losses) / static_cast<double>(dataset.size());
}

SampleErrorBound sample_error_bound(std::size_t m, double C, double delta,
                                    const CostStructure& costs, std::size_t m1, std::size_t m2,
                                    double kappa) {
    if (m < 1 || m1 + m2 != m) throw InputError("sample_error_bound: need m1 + m2 = m >= 1");
    if (!(C > 0.0)) throw InputError("sample_error_bound: C must be > 0");
    if (!(delta > 0.0 && delta < 1.0))
        throw InputError("sample_error_bound: delta must be in (0,1)");
    if (!(kappa > 0.0)) throw InputError("sample_error_bound: kappa must be > 0");
    costs.validate();

    SampleErrorBound b;
    const double md = static_cast<double>(m);
    b.beta = costs.beta();
    b.m_tilde = (costs.c_minus / costs.c_plus) *
                (costs.c_hat * static_cast<double>(m1) + static_cast<double>(m2)) / md;
    b.radius = std::sqrt(2.0 * C * b.m_tilde);
    const double log_term = std::log(2.0 / delta);
    b.eps_rad = (1.0 + kappa * b.radius) * b.beta * std::sqrt(log_term / md);
    b.rad_term = 2.0 * kappa * b.radius * b.beta / std::sqrt(md);
    b.m_bar = b.beta * (1.0 + kappa * std::sqrt(2.0 * b.beta * C));
    b.eps_hoeff = b.m_bar * std::sqrt(2.0 * log_term / md);
    b.total = b.eps_rad + b.rad_term + b.eps_hoeff;
    return b;
}

}  // namespace utilisvm
