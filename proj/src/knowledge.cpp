#include "utilisvm/knowledge.hpp"

namespace utilisvm {

KnowledgeRegion KnowledgeRegion::halfspace(Vec a, double b) {
    KnowledgeRegion r;
    r.kind = RegionKind::halfspace;
    r.a = std::move(a);
    r.b = b;
    r.validate();
    return r;
}

KnowledgeRegion KnowledgeRegion::ball(Vec center, double radius) {
    KnowledgeRegion r;
    r.kind = RegionKind::ball;
    r.center = std::move(center);
    r.radius = radius;
    r.validate();
    return r;
}

KnowledgeRegion KnowledgeRegion::box(Box bounds) {
    KnowledgeRegion r;
    r.kind = RegionKind::box;
    r.bounds = std::move(bounds);
    r.validate();
    return r;
}

KnowledgeRegion KnowledgeRegion::empty() {
    return KnowledgeRegion{};
}

void KnowledgeRegion::validate() const {
    switch (kind) {
        case RegionKind::halfspace:
            if (a.empty()) throw InputError("halfspace region: empty normal vector");
            if (!all_finite(a) || !std::isfinite(b))
                throw InputError("halfspace region: non-finite parameter");
            break;
        case RegionKind::ball:
            if (center.empty()) throw InputError("ball region: empty center");
            if (!all_finite(center)) throw InputError("ball region: non-finite center");
            if (!(radius > 0.0)) throw InputError("ball region: radius must be > 0");
            break;
        case RegionKind::box:
            bounds.validate();
            break;
        case RegionKind::empty:
            break;
    }
}

std::size_t KnowledgeRegion::dim() const {
    switch (kind) {
        case RegionKind::halfspace: return a.size();
        case RegionKind::ball: return center.size();
        case RegionKind::box: return bounds.dim();
        case RegionKind::empty: return 0;
    }
    return 0;
}

double KnowledgeRegion::g_plus(const Vec& x) const {
    switch (kind) {
        case RegionKind::halfspace: {
            if (x.size() != a.size()) throw InputError("region: dimension mismatch");
            double s = b;
            for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * x[k];
            return s;
        }
        case RegionKind::ball: {
            if (x.size() != center.size()) throw InputError("region: dimension mismatch");
            double s = 0.0;
            for (std::size_t k = 0; k < center.size(); ++k) {
                const double d = x[k] - center[k];
                s += d * d;
            }
            return std::sqrt(s) - radius;
        }
        case RegionKind::box: {
            if (x.size() != bounds.dim()) throw InputError("region: dimension mismatch");
            double g = -std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < x.size(); ++k)
                g = std::max(g, std::max(bounds.lower[k] - x[k], x[k] - bounds.upper[k]));
            return g;
        }
        case RegionKind::empty:
            return 1.0;
    }
    return 1.0;
}

void CostStructure::validate() const {
    if (!(c_plus > 0.0) || !(c_minus > 0.0) || !(c_hat > 0.0))
        throw InputError("costs: c_plus, c_minus, c_hat must all be > 0");
    if (!std::isfinite(c_plus) || !std::isfinite(c_minus) || !std::isfinite(c_hat))
        throw InputError("costs: non-finite value");
}

bool region_membership(const KnowledgeRegion& region, const Vec& x) {
    return region.g_plus(x) <= 0.0;
}

int chi_indicator(const KnowledgeRegion& region, const Vec& x) {
    return region_membership(region, x) ? -1 : 1;
}

double sample_weight(const CostStructure& costs, const KnowledgeRegion& region,
                     const Vec& x, int y) {
    costs.validate();
    require_label(y);
    if (y == 1 && region_membership(region, x))
        return costs.c_minus * costs.c_hat / costs.c_plus;
    return costs.c_minus / costs.c_plus;
}

double sample_weight_chi_form(const CostStructure& costs, const KnowledgeRegion& region,
                              const Vec& x, int y) {
    costs.validate();
    require_label(y);
    const double chi = static_cast<double>(chi_indicator(region, x));
    const double ratio = costs.c_minus / costs.c_plus;
    return ratio * (1.0 + (1.0 - chi) * (y + 1.0) * (costs.c_hat - 1.0) / 4.0);
}

double piecewise_loss(const CostStructure& costs, const KnowledgeRegion& region,
                      const Vec& x, int y, double f_value) {
    if (!std::isfinite(f_value)) throw InputError("piecewise_loss: non-finite f value");
    return sample_weight(costs, region, x, y) * std::max(0.0, 1.0 - y * f_value);
}

std::optional<std::string> cost_region_warning(const CostStructure& costs,
                                               const KnowledgeRegion& region) {
    if (costs.c_hat <= 1.0 && !region.is_empty_kind())
        return "c_hat <= 1 with a non-empty knowledge region: in-region positives are "
               "not up-weighted";
    return std::nullopt;
}

}  // namespace utilisvm
