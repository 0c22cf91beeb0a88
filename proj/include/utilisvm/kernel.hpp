#pragma once

#include "utilisvm/common.hpp"

namespace utilisvm {

enum class KernelKind { gaussian, linear, polynomial };

/// Mercer kernel parameterization. The Gaussian uses the convention
/// K(x,y) = exp(-|x-y|^2 / sigma^2), with no factor 2 in the denominator.
struct KernelSpec {
    KernelKind kind = KernelKind::gaussian;
    double sigma = 1.0;   // gaussian width
    int degree = 2;       // polynomial degree
    double offset = 0.0;  // polynomial offset

    static KernelSpec gaussian(double sigma);
    static KernelSpec linear();
    static KernelSpec polynomial(int degree, double offset);

    void validate() const;
    std::string name() const;

    bool operator==(const KernelSpec& other) const = default;
};

/// Dense symmetric kernel matrix on a finite point set.
struct GramMatrix {
    std::vector<double> entries;  // row-major m*m
    std::size_t point_count = 0;

    double at(std::size_t i, std::size_t j) const { return entries[i * point_count + j]; }
    const double* row(std::size_t i) const { return entries.data() + i * point_count; }
    double trace() const;
};

double eval_kernel(const KernelSpec& spec, const Vec& x, const Vec& x2);

GramMatrix gram_matrix(const KernelSpec& spec, const std::vector<Vec>& points);

/// Kernel expansion f(x) = sum_i coefficients[i] * labels[i] * K(points[i], x).
/// An empty expansion is the zero function.
double eval_expansion(const Vec& coefficients, const std::vector<int>& labels,
                      const std::vector<Vec>& support_points, const KernelSpec& spec,
                      const Vec& x);

/// Squared RKHS norm of the expansion: (a.y)^T K (a.y) over the expansion's
/// own support points.
double rkhs_norm_sq(const Vec& coefficients, const std::vector<int>& labels,
                    const GramMatrix& gram);

/// kappa = sup over the box of sqrt(K(x,x)). Exactly 1 for the Gaussian.
double kernel_sup(const KernelSpec& spec, const Box& domain);

}  // namespace utilisvm
