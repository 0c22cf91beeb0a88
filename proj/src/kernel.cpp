#include "utilisvm/kernel.hpp"

namespace utilisvm {

KernelSpec KernelSpec::gaussian(double sigma) {
    KernelSpec s;
    s.kind = KernelKind::gaussian;
    s.sigma = sigma;
    s.validate();
    return s;
}

KernelSpec KernelSpec::linear() {
    KernelSpec s;
    s.kind = KernelKind::linear;
    return s;
}

KernelSpec KernelSpec::polynomial(int degree, double offset) {
    KernelSpec s;
    s.kind = KernelKind::polynomial;
    s.degree = degree;
    s.offset = offset;
    s.validate();
    return s;
}

void KernelSpec::validate() const {
    switch (kind) {
        case KernelKind::gaussian:
            if (!(sigma > 0.0) || !std::isfinite(sigma))
                throw InputError("gaussian kernel requires sigma > 0");
            break;
        case KernelKind::linear:
            break;
        case KernelKind::polynomial:
            if (degree < 1) throw InputError("polynomial kernel requires degree >= 1");
            // offset < 0 breaks positive semidefiniteness
            if (!(offset >= 0.0) || !std::isfinite(offset))
                throw InputError("polynomial kernel requires offset >= 0");
            break;
    }
}

std::string KernelSpec::name() const {
    switch (kind) {
        case KernelKind::gaussian: return "gaussian";
        case KernelKind::linear: return "linear";
        case KernelKind::polynomial: return "polynomial";
    }
    return "?";
}

double GramMatrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < point_count; ++i) t += at(i, i);
    return t;
}

namespace {

double dot(const Vec& x, const Vec& y) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
    return s;
}

double sq_dist(const Vec& x, const Vec& y) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = x[k] - y[k];
        s += d * d;
    }
    return s;
}

double ipow(double base, int exp) {
    double r = 1.0;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

}  // namespace

double eval_kernel(const KernelSpec& spec, const Vec& x, const Vec& x2) {
    spec.validate();
    if (x.size() != x2.size() || x.empty())
        throw InputError("eval_kernel: dimension mismatch");
    if (!all_finite(x) || !all_finite(x2))
        throw InputError("eval_kernel: non-finite coordinate");
    switch (spec.kind) {
        case KernelKind::gaussian:
            return std::exp(-sq_dist(x, x2) / (spec.sigma * spec.sigma));
        case KernelKind::linear:
            return dot(x, x2);
        case KernelKind::polynomial:
            return ipow(dot(x, x2) + spec.offset, spec.degree);
    }
    throw InputError("eval_kernel: unknown kernel kind");
}

GramMatrix gram_matrix(const KernelSpec& spec, const std::vector<Vec>& points) {
    spec.validate();
    if (points.empty()) throw InputError("gram_matrix: empty point list");
    const std::size_t n = points.front().size();
    for (const Vec& p : points)
        if (p.size() != n) throw InputError("gram_matrix: ragged point dimensions");

    GramMatrix gram;
    gram.point_count = points.size();
    gram.entries.assign(points.size() * points.size(), 0.0);
    // rows are independent; entry (i,j) is always evaluated the same way,
    // so a parallel fill is bit-identical to the sequential one
    parallel_for(points.size(), [&](std::size_t i) {
        for (std::size_t j = 0; j < points.size(); ++j)
            gram.entries[i * points.size() + j] = eval_kernel(spec, points[i], points[j]);
    });
    return gram;
}

double eval_expansion(const Vec& coefficients, const std::vector<int>& labels,
                      const std::vector<Vec>& support_points, const KernelSpec& spec,
                      const Vec& x) {
    if (coefficients.size() != labels.size() || coefficients.size() != support_points.size())
        throw InputError("eval_expansion: length mismatch");
    double f = 0.0;
    for (std::size_t i = 0; i < coefficients.size(); ++i)
        f += coefficients[i] * labels[i] * eval_kernel(spec, support_points[i], x);
    return f;
}

double rkhs_norm_sq(const Vec& coefficients, const std::vector<int>& labels,
                    const GramMatrix& gram) {
    if (coefficients.size() != labels.size() || coefficients.size() != gram.point_count)
        throw InputError("rkhs_norm_sq: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < coefficients.size(); ++i) {
        const double ci = coefficients[i] * labels[i];
        if (ci == 0.0) continue;
        const double* row = gram.row(i);
        double inner = 0.0;
        for (std::size_t j = 0; j < coefficients.size(); ++j)
            inner += coefficients[j] * labels[j] * row[j];
        s += ci * inner;
    }
    return s;
}

double kernel_sup(const KernelSpec& spec, const Box& domain) {
    spec.validate();
    domain.validate();
    if (spec.kind == KernelKind::gaussian) return 1.0;
    if (!domain.finite())
        throw InputError("kernel_sup: unbounded domain for a non-stationary kernel");
    // sup of |x|^2 over the box is reached coordinate-wise at an endpoint
    double norm_sq = 0.0;
    for (std::size_t k = 0; k < domain.dim(); ++k) {
        const double lo = domain.lower[k] * domain.lower[k];
        const double hi = domain.upper[k] * domain.upper[k];
        norm_sq += std::max(lo, hi);
    }
    if (spec.kind == KernelKind::linear) return std::sqrt(norm_sq);
    return std::sqrt(ipow(norm_sq + spec.offset, spec.degree));
}

}  // namespace utilisvm
