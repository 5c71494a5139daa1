#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "kanbench/matrix.hpp"

namespace kanbench {

struct Normalization {
    std::vector<double> mean;
    std::vector<double> stddev;
    friend bool operator==(const Normalization&, const Normalization&) = default;
};

struct Dataset {
    Matrix features;
    std::vector<int> labels;
    int class_count = 0;
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;
    std::optional<Normalization> normalization;

    std::size_t size() const noexcept { return labels.size(); }
    std::vector<std::size_t> class_sizes() const;

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// A column is addressed by header name or by zero-based index.
using ColumnRef = std::variant<std::size_t, std::string>;

struct CsvSchema {
    ColumnRef label_column = std::size_t{0};
    std::vector<ColumnRef> categorical_columns;
    /// Feature columns to keep, in order; empty keeps every non-label column.
    std::vector<ColumnRef> feature_columns;
    char delimiter = ',';
    bool has_header = true;
};

/// Two interleaving half circles: ceil(n/2) points with label 0 on
/// (cos t, sin t) and floor(n/2) with label 1 on (1 - cos t, 0.5 - sin t),
/// t evenly spaced over [0, π], plus isotropic Gaussian noise.
Dataset make_moons(std::size_t n, double noise, std::uint64_t seed);

/// Splits CSV text into records (RFC-4180 quoting, "" escapes, quoted
/// delimiters and newlines).
std::vector<std::vector<std::string>> parse_csv(const std::string& text, char delimiter);

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema);
Dataset load_csv_text(const std::string& text, const CsvSchema& schema);

/// Upsamples every minority class to the majority count by interpolating
/// between a sample and one of its k nearest same-class neighbours.
Dataset smote(const Dataset& data, std::size_t k_neighbors, std::uint64_t seed);

std::pair<Dataset, Dataset> split_stratified(const Dataset& data, double test_fraction, std::uint64_t seed);

struct Standardized {
    Dataset train;
    Dataset test;
    Normalization stats;
};

/// Z-scores both partitions with statistics from `train` only.
Standardized standardize(const Dataset& train, const Dataset& test);
Matrix apply_normalization(const Matrix& features, const Normalization& stats);
Matrix invert_normalization(const Matrix& features, const Normalization& stats);

/// One-hot matrix for multiclass outputs, or a single 0/1 column when
/// `width` is 1.
Matrix encode_targets(const std::vector<int>& labels, std::size_t width);

Dataset subset(const Dataset& data, const std::vector<std::size_t>& rows);

}  // namespace kanbench
