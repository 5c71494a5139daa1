#include "kanbench/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "kanbench/error.hpp"

namespace kanbench {

std::vector<std::size_t> Dataset::class_sizes() const {
    std::vector<std::size_t> sizes(static_cast<std::size_t>(class_count), 0);
    for (int y : labels) ++sizes[static_cast<std::size_t>(y)];
    return sizes;
}

Dataset make_moons(std::size_t n, double noise, std::uint64_t seed) {
    if (n < 2) throw Error(ErrorCode::invalid_n, "make_moons needs n >= 2");
    if (noise < 0.0) throw Error(ErrorCode::invalid_n, "noise must be non-negative");
    const std::size_t upper = (n + 1) / 2;
    const std::size_t lower = n / 2;
    Dataset d;
    d.features = Matrix(n, 2);
    d.labels.resize(n);
    d.class_count = 2;
    d.feature_names = {"x0", "x1"};
    d.class_names = {"0", "1"};
    auto angle = [](std::size_t i, std::size_t count) {
        return count > 1 ? std::numbers::pi * static_cast<double>(i) / static_cast<double>(count - 1) : 0.0;
    };
    for (std::size_t i = 0; i < upper; ++i) {
        const double t = angle(i, upper);
        d.features(i, 0) = std::cos(t);
        d.features(i, 1) = std::sin(t);
        d.labels[i] = 0;
    }
    for (std::size_t i = 0; i < lower; ++i) {
        const double t = angle(i, lower);
        d.features(upper + i, 0) = 1.0 - std::cos(t);
        d.features(upper + i, 1) = 0.5 - std::sin(t);
        d.labels[upper + i] = 1;
    }
    if (noise > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, noise);
        for (double& v : d.features.data()) v += gauss(rng);
    }
    return d;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text, char delimiter) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    auto end_record = [&] {
        record.push_back(std::move(field));
        field.clear();
        const bool blank = record.size() == 1 && record[0].empty() && !field_started;
        if (!blank) records.push_back(std::move(record));
        record.clear();
        field_started = false;
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
            field_started = true;
        } else if (ch == delimiter) {
            record.push_back(std::move(field));
            field.clear();
            field_started = true;
        } else if (ch == '\n' || ch == '\r') {
            if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            end_record();
        } else {
            field.push_back(ch);
            field_started = true;
        }
    }
    if (field_started || !field.empty() || !record.empty()) end_record();
    return records;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::optional<double> parse_real(const std::string& raw) {
    const std::string s = trim(raw);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const char* begin = s.data();
    if (*begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::size_t resolve(const ColumnRef& ref, const std::vector<std::string>& header, std::size_t width) {
    if (const auto* idx = std::get_if<std::size_t>(&ref)) {
        if (*idx >= width) throw Error(ErrorCode::missing_column, "column index " + std::to_string(*idx) + " out of range");
        return *idx;
    }
    const auto& name = std::get<std::string>(ref);
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (trim(header[c]) == name) return c;
    }
    throw Error(ErrorCode::missing_column, "no column named '" + name + "'");
}

// Stable code assignment: numeric-looking categories sort numerically,
// everything else lexicographically.
std::map<std::string, int> encode_categories(const std::set<std::string>& values) {
    std::vector<std::string> order(values.begin(), values.end());
    const bool numeric = std::all_of(order.begin(), order.end(), [](const std::string& v) { return parse_real(v).has_value(); });
    if (numeric) {
        std::stable_sort(order.begin(), order.end(),
                         [](const std::string& a, const std::string& b) { return *parse_real(a) < *parse_real(b); });
    }
    std::map<std::string, int> codes;
    for (std::size_t i = 0; i < order.size(); ++i) codes[order[i]] = static_cast<int>(i);
    return codes;
}

}  // namespace

Dataset load_csv_text(const std::string& text, const CsvSchema& schema) {
    auto records = parse_csv(text, schema.delimiter);
    std::vector<std::string> header;
    if (schema.has_header && !records.empty()) {
        header = records.front();
        records.erase(records.begin());
    }
    if (records.empty()) throw Error(ErrorCode::empty_file, "CSV contains no data rows");
    const std::size_t width = header.empty() ? records.front().size() : header.size();
    for (std::size_t r = 0; r < records.size(); ++r) {
        if (records[r].size() != width) {
            throw Error(ErrorCode::unparsable_cell, "row " + std::to_string(r) + " has " +
                                                        std::to_string(records[r].size()) + " cells, expected " +
                                                        std::to_string(width));
        }
    }

    const std::size_t label_col = resolve(schema.label_column, header, width);
    std::vector<std::size_t> feature_cols;
    if (schema.feature_columns.empty()) {
        for (std::size_t c = 0; c < width; ++c) {
            if (c != label_col) feature_cols.push_back(c);
        }
    } else {
        for (const auto& ref : schema.feature_columns) feature_cols.push_back(resolve(ref, header, width));
    }
    std::set<std::size_t> categorical;
    for (const auto& ref : schema.categorical_columns) categorical.insert(resolve(ref, header, width));

    std::map<std::size_t, std::map<std::string, int>> codes;
    for (std::size_t c : feature_cols) {
        if (!categorical.count(c)) continue;
        std::set<std::string> values;
        for (const auto& rec : records) values.insert(trim(rec[c]));
        codes[c] = encode_categories(values);
    }
    std::set<std::string> label_values;
    for (const auto& rec : records) label_values.insert(trim(rec[label_col]));
    const auto label_codes = encode_categories(label_values);

    Dataset d;
    d.features = Matrix(records.size(), feature_cols.size());
    d.labels.resize(records.size());
    d.class_count = static_cast<int>(label_codes.size());
    d.class_names.resize(label_codes.size());
    for (const auto& [name, code] : label_codes) d.class_names[static_cast<std::size_t>(code)] = name;
    for (std::size_t f = 0; f < feature_cols.size(); ++f) {
        const std::size_t c = feature_cols[f];
        d.feature_names.push_back(header.empty() ? "col" + std::to_string(c) : trim(header[c]));
    }
    for (std::size_t r = 0; r < records.size(); ++r) {
        d.labels[r] = label_codes.at(trim(records[r][label_col]));
        for (std::size_t f = 0; f < feature_cols.size(); ++f) {
            const std::size_t c = feature_cols[f];
            if (categorical.count(c)) {
                d.features(r, f) = codes[c].at(trim(records[r][c]));
                continue;
            }
            const auto v = parse_real(records[r][c]);
            if (!v) {
                throw Error(ErrorCode::unparsable_cell, "row " + std::to_string(r) + ", column " + std::to_string(c) +
                                                            " ('" + records[r][c] + "') is not a finite number");
            }
            d.features(r, f) = *v;
        }
    }
    return d;
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_failure, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    if (text.empty()) throw Error(ErrorCode::empty_file, path.string() + " is empty");
    return load_csv_text(text, schema);
}

Dataset subset(const Dataset& data, const std::vector<std::size_t>& rows) {
    Dataset out;
    out.features = Matrix(rows.size(), data.features.cols());
    out.labels.reserve(rows.size());
    out.class_count = data.class_count;
    out.feature_names = data.feature_names;
    out.class_names = data.class_names;
    out.normalization = data.normalization;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        auto src = data.features.row(rows[r]);
        std::copy(src.begin(), src.end(), out.features.row(r).begin());
        out.labels.push_back(data.labels[rows[r]]);
    }
    return out;
}

Dataset smote(const Dataset& data, std::size_t k_neighbors, std::uint64_t seed) {
    const auto sizes = data.class_sizes();
    const std::size_t majority = sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
    const std::size_t dims = data.features.cols();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Dataset out = data;
    std::vector<std::vector<double>> synthetic;
    std::vector<int> synthetic_labels;
    for (int cls = 0; cls < data.class_count; ++cls) {
        const std::size_t have = sizes[static_cast<std::size_t>(cls)];
        if (have == majority) continue;
        if (have < k_neighbors + 1) {
            throw Error(ErrorCode::class_too_small, "class " + std::to_string(cls) + " has " + std::to_string(have) +
                                                        " samples, SMOTE needs at least " +
                                                        std::to_string(k_neighbors + 1));
        }
        std::vector<std::size_t> members;
        for (std::size_t r = 0; r < data.size(); ++r) {
            if (data.labels[r] == cls) members.push_back(r);
        }
        // k nearest same-class neighbours of every member (brute force).
        std::vector<std::vector<std::size_t>> neighbours(members.size());
        for (std::size_t a = 0; a < members.size(); ++a) {
            std::vector<std::pair<double, std::size_t>> dist;
            for (std::size_t b = 0; b < members.size(); ++b) {
                if (a == b) continue;
                double d2 = 0.0;
                for (std::size_t c = 0; c < dims; ++c) {
                    const double diff = data.features(members[a], c) - data.features(members[b], c);
                    d2 += diff * diff;
                }
                dist.emplace_back(d2, b);
            }
            std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_neighbors), dist.end());
            for (std::size_t q = 0; q < k_neighbors; ++q) neighbours[a].push_back(dist[q].second);
        }
        std::uniform_int_distribution<std::size_t> pick(0, k_neighbors - 1);
        for (std::size_t t = 0; t < majority - have; ++t) {
            const std::size_t a = t % members.size();
            const std::size_t b = neighbours[a][pick(rng)];
            const double u = unit(rng);
            std::vector<double> x(dims);
            for (std::size_t c = 0; c < dims; ++c) {
                const double base = data.features(members[a], c);
                x[c] = base + u * (data.features(members[b], c) - base);
            }
            synthetic.push_back(std::move(x));
            synthetic_labels.push_back(cls);
        }
    }
    if (synthetic.empty()) return out;
    Matrix grown(data.size() + synthetic.size(), dims);
    std::copy(data.features.data().begin(), data.features.data().end(), grown.data().begin());
    for (std::size_t s = 0; s < synthetic.size(); ++s) {
        std::copy(synthetic[s].begin(), synthetic[s].end(), grown.row(data.size() + s).begin());
    }
    out.features = std::move(grown);
    out.labels.insert(out.labels.end(), synthetic_labels.begin(), synthetic_labels.end());
    return out;
}

std::pair<Dataset, Dataset> split_stratified(const Dataset& data, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw Error(ErrorCode::fraction_out_of_range, "test_fraction must lie in (0, 1)");
    }
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    for (int cls = 0; cls < data.class_count; ++cls) {
        std::vector<std::size_t> members;
        for (std::size_t r = 0; r < data.size(); ++r) {
            if (data.labels[r] == cls) members.push_back(r);
        }
        std::shuffle(members.begin(), members.end(), rng);
        const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(members.size())));
        test_rows.insert(test_rows.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_test));
        train_rows.insert(train_rows.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test), members.end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());
    return {subset(data, train_rows), subset(data, test_rows)};
}

Matrix apply_normalization(const Matrix& features, const Normalization& stats) {
    Matrix out = features;
    for (std::size_t r = 0; r < out.rows(); ++r) {
        for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) = (out(r, c) - stats.mean[c]) / stats.stddev[c];
    }
    return out;
}

Matrix invert_normalization(const Matrix& features, const Normalization& stats) {
    Matrix out = features;
    for (std::size_t r = 0; r < out.rows(); ++r) {
        for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) = out(r, c) * stats.stddev[c] + stats.mean[c];
    }
    return out;
}

Standardized standardize(const Dataset& train, const Dataset& test) {
    if (train.size() == 0) throw Error(ErrorCode::empty_input, "cannot standardize an empty training set");
    const std::size_t dims = train.features.cols();
    Normalization stats{std::vector<double>(dims, 0.0), std::vector<double>(dims, 0.0)};
    const auto n = static_cast<double>(train.size());
    for (std::size_t c = 0; c < dims; ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < train.size(); ++r) mean += train.features(r, c);
        mean /= n;
        const double first = train.features(0, c);
        bool constant = true;
        for (std::size_t r = 0; r < train.size() && constant; ++r) constant = train.features(r, c) == first;
        if (constant) mean = first;
        double var = 0.0;
        for (std::size_t r = 0; r < train.size(); ++r) {
            const double d = train.features(r, c) - mean;
            var += d * d;
        }
        stats.mean[c] = mean;
        stats.stddev[c] = std::max(std::sqrt(var / n), 1e-8);
    }
    Standardized out{train, test, stats};
    out.train.features = apply_normalization(train.features, stats);
    out.test.features = apply_normalization(test.features, stats);
    out.train.normalization = stats;
    out.test.normalization = stats;
    return out;
}

Matrix encode_targets(const std::vector<int>& labels, std::size_t width) {
    Matrix t(labels.size(), width, 0.0);
    for (std::size_t r = 0; r < labels.size(); ++r) {
        if (width == 1) {
            t(r, 0) = labels[r];
        } else {
            t(r, static_cast<std::size_t>(labels[r])) = 1.0;
        }
    }
    return t;
}

}  // namespace kanbench
