#pragma once

#include <optional>

#include "utilisvm/common.hpp"

namespace utilisvm {

enum class RegionKind { halfspace, ball, box, empty };

/// Region A+ = { x : g+(x) <= 0 }. Boundary points (g+ = 0) are members.
/// The `empty` kind has g+ == +1, so nothing is a member.
struct KnowledgeRegion {
    RegionKind kind = RegionKind::empty;
    Vec a;            // halfspace: g+(x) = a.x + b
    double b = 0.0;
    Vec center;       // ball: g+(x) = |x - center| - radius
    double radius = 0.0;
    Box bounds;       // box: g+(x) = max_k max(lower_k - x_k, x_k - upper_k)

    static KnowledgeRegion halfspace(Vec a, double b);
    static KnowledgeRegion ball(Vec center, double radius);
    static KnowledgeRegion box(Box bounds);
    static KnowledgeRegion empty();

    void validate() const;
    bool is_empty_kind() const { return kind == RegionKind::empty; }

    /// Declared dimension; 0 for the empty region (matches any x).
    std::size_t dim() const;

    double g_plus(const Vec& x) const;
};

/// Misclassification costs: c+ (false positive), c- (false negative) and the
/// extra false-negative multiplier c_hat inside the knowledge region.
struct CostStructure {
    double c_plus = 1.0;
    double c_minus = 1.0;
    double c_hat = 1.0;

    void validate() const;
    /// beta = c- * c_hat / c+, the largest per-sample weight.
    double beta() const { return c_minus * c_hat / c_plus; }
};

bool region_membership(const KnowledgeRegion& region, const Vec& x);

/// -1 when x is a member of the region, +1 otherwise.
int chi_indicator(const KnowledgeRegion& region, const Vec& x);

/// Per-sample loss weight: c- c_hat / c+ for positive samples inside the
/// region, c- / c+ otherwise.
double sample_weight(const CostStructure& costs, const KnowledgeRegion& region,
                     const Vec& x, int y);

/// Same weight through the chi-indicator closed form
/// d(x,y) = (c-/c+) * (1 + [1 - chi(g+(x))] (y+1) (c_hat - 1) / 4).
double sample_weight_chi_form(const CostStructure& costs, const KnowledgeRegion& region,
                              const Vec& x, int y);

/// Weighted hinge: sample_weight(...) * max(0, 1 - y * f_value).
double piecewise_loss(const CostStructure& costs, const KnowledgeRegion& region,
                      const Vec& x, int y, double f_value);

/// Diagnostic for the corner case c_hat <= 1 with a non-empty region: the
/// region then no longer up-weights its positives.
std::optional<std::string> cost_region_warning(const CostStructure& costs,
                                               const KnowledgeRegion& region);

}  // namespace utilisvm
