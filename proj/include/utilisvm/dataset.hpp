#pragma once

#include "utilisvm/common.hpp"

namespace utilisvm {

/// Labeled samples: features in R^n, labels in {-1,+1}, optional per-sample
/// confidences in (0,1].
struct Dataset {
    std::vector<Vec> points;
    std::vector<int> labels;
    Vec confidences;  // empty, or one entry per sample

    std::size_t size() const { return points.size(); }
    std::size_t dim() const { return points.empty() ? 0 : points.front().size(); }
    bool has_confidences() const { return !confidences.empty(); }

    void validate() const;

    void push_back(Vec x, int y) {
        points.push_back(std::move(x));
        labels.push_back(y);
    }
};

/// CSV dialect: header row `x0,...,x{n-1},y` with an optional trailing
/// `conf` column; comma separated, decimal point, UTF-8.
Dataset load_dataset_csv(const std::string& path);
void save_dataset_csv(const Dataset& dataset, const std::string& path);

}  // namespace utilisvm
