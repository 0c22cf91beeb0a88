#include "utilisvm/dataset.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace utilisvm {

void Dataset::validate() const {
    if (points.size() != labels.size())
        throw InputError("dataset: points/labels size mismatch");
    if (!confidences.empty() && confidences.size() != points.size())
        throw InputError("dataset: confidences size mismatch");
    const std::size_t n = dim();
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != n) throw InputError("dataset: ragged feature rows");
        if (!all_finite(points[i])) throw InputError("dataset: non-finite feature");
        require_label(labels[i]);
    }
    for (double c : confidences)
        if (!(c > 0.0) || c > 1.0) throw InputError("dataset: confidence outside (0,1]");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& cell, std::size_t line_no, const std::string& column) {
    const std::string t = strip(cell);
    double v = 0.0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw FormatError("line " + std::to_string(line_no) + ": non-numeric value '" + t +
                          "' in column " + column);
    return v;
}

}  // namespace

Dataset load_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open dataset file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw FormatError(path + ": empty file");
    std::vector<std::string> header = split_csv_line(line);
    for (auto& h : header) h = strip(h);

    // header must be x0..x{n-1}, y [, conf]
    std::size_t n_features = 0;
    while (n_features < header.size() && header[n_features] == "x" + std::to_string(n_features))
        ++n_features;
    if (n_features == 0 || n_features >= header.size() || header[n_features] != "y")
        throw FormatError(path + ": header must be x0,...,x{n-1},y[,conf]");
    bool has_conf = false;
    if (header.size() == n_features + 2) {
        if (header[n_features + 1] != "conf")
            throw FormatError(path + ": unexpected trailing column '" + header[n_features + 1] +
                              "'");
        has_conf = true;
    } else if (header.size() != n_features + 1) {
        throw FormatError(path + ": unexpected columns after label");
    }

    Dataset ds;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (strip(line).empty()) continue;
        std::vector<std::string> cells = split_csv_line(line);
        const std::size_t expect = n_features + 1 + (has_conf ? 1 : 0);
        if (cells.size() != expect)
            throw FormatError("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(expect) + " cells, got " +
                              std::to_string(cells.size()));
        Vec x(n_features);
        for (std::size_t k = 0; k < n_features; ++k) {
            x[k] = parse_number(cells[k], line_no, "x" + std::to_string(k));
            if (!std::isfinite(x[k]))
                throw FormatError("line " + std::to_string(line_no) + ": non-finite feature");
        }
        const double yv = parse_number(cells[n_features], line_no, "y");
        if (yv != 1.0 && yv != -1.0)
            throw FormatError("line " + std::to_string(line_no) + ": label must be -1 or 1, got " +
                              strip(cells[n_features]));
        ds.points.push_back(std::move(x));
        ds.labels.push_back(yv > 0 ? 1 : -1);
        if (has_conf) {
            const double c = parse_number(cells[n_features + 1], line_no, "conf");
            if (!(c > 0.0) || c > 1.0)
                throw FormatError("line " + std::to_string(line_no) +
                                  ": confidence outside (0,1]");
            ds.confidences.push_back(c);
        }
    }
    if (ds.size() == 0) throw FormatError(path + ": no data rows");
    return ds;
}

void save_dataset_csv(const Dataset& dataset, const std::string& path) {
    dataset.validate();
    std::ofstream out(path);
    if (!out) throw InputError("cannot write dataset file: " + path);
    const std::size_t n = dataset.dim();
    for (std::size_t k = 0; k < n; ++k) out << "x" << k << ",";
    out << "y";
    if (dataset.has_confidences()) out << ",conf";
    out << "\n";
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        for (std::size_t k = 0; k < n; ++k) out << format_double(dataset.points[i][k]) << ",";
        out << dataset.labels[i];
        if (dataset.has_confidences()) out << "," << format_double(dataset.confidences[i]);
        out << "\n";
    }
    if (!out) throw InputError("failed writing dataset file: " + path);
}

}  // namespace utilisvm
