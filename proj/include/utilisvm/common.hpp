#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace utilisvm {

using Vec = std::vector<double>;

/// Bad arguments or malformed user input. Maps to CLI exit code 1.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or incompatible file content (CSV, JSON configs, model files).
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numeric failure (non-finite values, impossible sampling). Maps to CLI exit code 2.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A caller-supplied callable broke its contract (e.g. a classifier
/// returning something other than -1/+1).
class ContractError : public std::logic_error {
public:
    explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

/// Axis-aligned box in R^n. Used both as an integration domain and as a
/// knowledge-region shape.
struct Box {
    Vec lower;
    Vec upper;

    std::size_t dim() const { return lower.size(); }

    void validate() const {
        if (lower.size() != upper.size())
            throw InputError("box: lower/upper dimension mismatch");
        if (lower.empty())
            throw InputError("box: empty dimension");
        for (std::size_t k = 0; k < lower.size(); ++k) {
            if (std::isnan(lower[k]) || std::isnan(upper[k]))
                throw InputError("box: NaN bound");
            if (lower[k] > upper[k])
                throw InputError("box: lower > upper on axis " + std::to_string(k));
        }
    }

    bool finite() const {
        for (std::size_t k = 0; k < lower.size(); ++k)
            if (!std::isfinite(lower[k]) || !std::isfinite(upper[k])) return false;
        return true;
    }

    bool contains(const Vec& x) const {
        if (x.size() != lower.size()) return false;
        for (std::size_t k = 0; k < x.size(); ++k)
            if (x[k] < lower[k] || x[k] > upper[k]) return false;
        return true;
    }

    double volume() const {
        double v = 1.0;
        for (std::size_t k = 0; k < lower.size(); ++k) v *= upper[k] - lower[k];
        return v;
    }
};

inline bool all_finite(const Vec& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

inline void require_label(int y) {
    if (y != 1 && y != -1) throw InputError("label must be -1 or +1");
}

/// Order-independent deterministic summation: reduce pairwise so the result
/// does not depend on how the values were produced (e.g. by how many threads).
double pairwise_sum(const double* values, std::size_t n);
inline double pairwise_sum(const Vec& values) {
    return pairwise_sum(values.data(), values.size());
}

/// Internal parallelism cap: min(UTILISVM_THREADS, hardware threads), >= 1.
unsigned max_threads();

/// Run fn(i) for i in [0, n). Splits across threads when the cap allows;
/// every index is computed exactly once, so results are identical to the
/// sequential order for independent writes.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Format a double with enough digits to round-trip exactly.
std::string format_double(double v);

}  // namespace utilisvm
