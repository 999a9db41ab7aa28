// data.hpp — datasets (synthetic and CSV-loaded), standardization, and
// random equal partitioning across agents.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "dsgld/errors.hpp"
#include "dsgld/io.hpp"
#include "dsgld/rng.hpp"

namespace dsgld {

enum class TaskKind { Regression, BinaryClassification };

// Feature matrix is intercept-augmented: the last column is all ones, so a
// parameter vector has length d+1 for d raw features.
struct Dataset {
    Eigen::MatrixXd features;
    Eigen::VectorXd targets;
    TaskKind kind = TaskKind::Regression;

    int rows() const { return static_cast<int>(features.rows()); }
    int param_dim() const { return static_cast<int>(features.cols()); }

    void validate() const {
        if (features.rows() != targets.size())
            throw DataError("feature/target row mismatch");
        if (kind == TaskKind::BinaryClassification)
            for (Eigen::Index i = 0; i < targets.size(); ++i)
                if (targets[i] != 0.0 && targets[i] != 1.0)
                    throw DataError("non-binary label at row " + std::to_string(i));
    }
};

struct Partition {
    std::vector<std::vector<int>> agent_rows;

    int num_agents() const { return static_cast<int>(agent_rows.size()); }
    int rows_per_agent() const {
        return agent_rows.empty() ? 0 : static_cast<int>(agent_rows.front().size());
    }
};

namespace detail {
inline std::vector<int> shuffled_indices(int n, CounterRng& rng) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = n - 1; i > 0; --i) {
        const auto j = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(i) + 1));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    return idx;
}

inline Eigen::MatrixXd take_rows(const Eigen::MatrixXd& m, const std::vector<int>& idx) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), m.cols());
    for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = m.row(idx[r]);
    return out;
}

inline Eigen::VectorXd take_rows(const Eigen::VectorXd& v, const std::vector<int>& idx) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t r = 0; r < idx.size(); ++r) out[static_cast<Eigen::Index>(r)] = v[idx[r]];
    return out;
}

inline Eigen::MatrixXd append_intercept(const Eigen::MatrixXd& raw) {
    Eigen::MatrixXd out(raw.rows(), raw.cols() + 1);
    out.leftCols(raw.cols()) = raw;
    out.col(raw.cols()).setOnes();
    return out;
}
} // namespace detail

// Column-wise standardization statistics. Columns with zero spread get unit
// scale so standardization stays defined (the column becomes all zeros).
struct ColumnStats {
    Eigen::VectorXd mean;
    Eigen::VectorXd std_dev;
};

inline ColumnStats column_stats(const Eigen::MatrixXd& m) {
    ColumnStats s;
    s.mean = m.colwise().mean();
    Eigen::MatrixXd centered = m.rowwise() - s.mean.transpose();
    s.std_dev = (centered.array().square().colwise().sum() /
                 std::max<double>(1.0, static_cast<double>(m.rows()) - 1.0))
                    .sqrt()
                    .transpose();
    for (Eigen::Index j = 0; j < s.std_dev.size(); ++j)
        if (s.std_dev[j] == 0.0) s.std_dev[j] = 1.0;
    return s;
}

inline Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& m, const ColumnStats& s) {
    return (m.rowwise() - s.mean.transpose()).array().rowwise() /
           s.std_dev.transpose().array();
}

// ---------------------------------------------------------------------------
// Synthetic regression data: true parameter drawn from the model prior
// N(0, lam^{-1} I), Gaussian features with intercept, Gaussian target noise.
struct LinearSynthesis {
    Dataset data;
    Eigen::VectorXd true_param;
};

inline LinearSynthesis synth_linear(int n, int d, double lam, double noise_var,
                                    std::uint64_t seed) {
    if (n < 1 || d < 1) throw DataError("need n >= 1 and d >= 1");
    if (!(lam > 0.0)) throw DataError("prior precision lam must be positive");
    if (noise_var < 0.0) throw DataError("noise variance must be nonnegative");
    CounterRng rng(StreamKey{seed, 0, 0, 0, Purpose::DataGen});
    LinearSynthesis out;
    out.true_param.resize(d + 1);
    for (int j = 0; j <= d; ++j) out.true_param[j] = rng.normal() / std::sqrt(lam);
    Eigen::MatrixXd raw(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) raw(i, j) = rng.normal();
    out.data.features = detail::append_intercept(raw);
    out.data.targets.resize(n);
    const double noise_sd = std::sqrt(noise_var);
    for (int i = 0; i < n; ++i)
        out.data.targets[i] = out.data.features.row(i).dot(out.true_param) +
                              noise_sd * rng.normal();
    out.data.kind = TaskKind::Regression;
    return out;
}

// ---------------------------------------------------------------------------
// Synthetic binary classification data: Bernoulli labels through the logistic
// link, split into train/test, train class-balanced by discarding surplus
// majority rows (uniformly at random) down to the minority count.
struct LogisticSynthesis {
    Dataset train;
    Dataset test;
    Eigen::VectorXd true_param;
};

namespace detail {
inline Dataset balance_binary(const Dataset& in, CounterRng& rng) {
    std::vector<int> zeros, ones;
    for (int i = 0; i < in.rows(); ++i)
        (in.targets[i] == 1.0 ? ones : zeros).push_back(i);
    if (zeros.empty() || ones.empty())
        throw DataError("a class is absent; cannot balance");
    const auto keep = static_cast<std::size_t>(std::min(zeros.size(), ones.size()));
    auto subsample = [&](std::vector<int>& v) {
        for (std::size_t i = 0; i < keep; ++i) {
            const auto j =
                i + static_cast<std::size_t>(rng.uniform_index(v.size() - i));
            std::swap(v[i], v[j]);
        }
        v.resize(keep);
    };
    subsample(zeros);
    subsample(ones);
    std::vector<int> rows;
    rows.reserve(2 * keep);
    rows.insert(rows.end(), zeros.begin(), zeros.end());
    rows.insert(rows.end(), ones.begin(), ones.end());
    std::sort(rows.begin(), rows.end());
    Dataset out;
    out.features = take_rows(in.features, rows);
    out.targets = take_rows(in.targets, rows);
    out.kind = in.kind;
    return out;
}
} // namespace detail

inline LogisticSynthesis synth_logistic(int total, int d, double lam, double train_ratio,
                                        std::uint64_t seed) {
    if (total < 4 || d < 1) throw DataError("need total >= 4 and d >= 1");
    if (!(lam > 0.0)) throw DataError("prior precision lam must be positive");
    if (!(train_ratio > 0.0 && train_ratio < 1.0))
        throw DataError("train_ratio must lie in (0, 1)");
    CounterRng rng(StreamKey{seed, 0, 0, 0, Purpose::DataGen});
    LogisticSynthesis out;
    out.true_param.resize(d + 1);
    for (int j = 0; j <= d; ++j) out.true_param[j] = rng.normal() / std::sqrt(lam);
    Eigen::MatrixXd raw(total, d);
    for (int i = 0; i < total; ++i)
        for (int j = 0; j < d; ++j) raw(i, j) = rng.normal();
    Eigen::MatrixXd feat = detail::append_intercept(raw);
    Eigen::VectorXd lab(total);
    for (int i = 0; i < total; ++i) {
        const double p = 1.0 / (1.0 + std::exp(-feat.row(i).dot(out.true_param)));
        lab[i] = rng.uniform01() <= p ? 1.0 : 0.0;
    }
    const auto order = detail::shuffled_indices(total, rng);
    const int n_train = static_cast<int>(std::floor(train_ratio * total));
    if (n_train < 2 || n_train >= total) throw DataError("degenerate train/test split");
    std::vector<int> train_idx(order.begin(), order.begin() + n_train);
    std::vector<int> test_idx(order.begin() + n_train, order.end());
    Dataset train_all{detail::take_rows(feat, train_idx), detail::take_rows(lab, train_idx),
                      TaskKind::BinaryClassification};
    out.test = Dataset{detail::take_rows(feat, test_idx), detail::take_rows(lab, test_idx),
                       TaskKind::BinaryClassification};
    out.train = detail::balance_binary(train_all, rng);
    return out;
}

// ---------------------------------------------------------------------------
// CSV loader for diagnostic-style tables: column 0 an id (ignored), column 1 a
// label in {B, M} (benign -> 1, malignant -> 0) or {0, 1}, remaining columns
// numeric features. Rows are shuffled, split into train = floor(ratio * rows),
// features standardized with train statistics only, the train side balanced
// down to target_train rows (target_train/2 per class), and both sides
// intercept-augmented.
struct CsvSplit {
    Dataset train;
    Dataset test;
};

inline CsvSplit load_real_csv(const std::string& path, double train_ratio,
                              int target_train, std::uint64_t seed,
                              bool has_header = false) {
    if (!(train_ratio > 0.0 && train_ratio < 1.0))
        throw DataError("train_ratio must lie in (0, 1)");
    if (target_train < 2 || target_train % 2 != 0)
        throw DataError("target_train must be a positive even count");
    auto rows = read_csv_rows(path);
    if (has_header && !rows.empty()) rows.erase(rows.begin());
    if (rows.size() < 4) throw DataError("too few rows in '" + path + "'");
    const std::size_t n_cols = rows.front().size();
    if (n_cols < 3) throw DataError("expected id, label, and at least one feature column");
    const int n = static_cast<int>(rows.size());
    const int d = static_cast<int>(n_cols) - 2;
    Eigen::MatrixXd raw(n, d);
    Eigen::VectorXd lab(n);
    for (int i = 0; i < n; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        if (r.size() != n_cols)
            throw DataError("row " + std::to_string(i) + " has " +
                            std::to_string(r.size()) + " fields, expected " +
                            std::to_string(n_cols));
        const std::string& l = r[1];
        if (l == "B" || l == "b" || l == "1")
            lab[i] = 1.0;
        else if (l == "M" || l == "m" || l == "0")
            lab[i] = 0.0;
        else
            throw DataError("row " + std::to_string(i) + ": unrecognized label '" + l + "'");
        for (int j = 0; j < d; ++j) {
            double v;
            if (!parse_double(r[static_cast<std::size_t>(j) + 2], v))
                throw DataError("row " + std::to_string(i) + ", column " +
                                std::to_string(j + 2) + ": not numeric");
            raw(i, j) = v;
        }
    }
    CounterRng rng(StreamKey{seed, 0, 0, 1, Purpose::DataGen});
    const auto order = detail::shuffled_indices(n, rng);
    const int n_train = static_cast<int>(std::floor(train_ratio * n));
    if (n_train < 2 || n_train >= n) throw DataError("degenerate train/test split");
    std::vector<int> train_idx(order.begin(), order.begin() + n_train);
    std::vector<int> test_idx(order.begin() + n_train, order.end());
    Eigen::MatrixXd train_raw = detail::take_rows(raw, train_idx);
    Eigen::MatrixXd test_raw = detail::take_rows(raw, test_idx);
    const ColumnStats stats = column_stats(train_raw);
    Dataset train_all{detail::append_intercept(standardize_columns(train_raw, stats)),
                      detail::take_rows(lab, train_idx), TaskKind::BinaryClassification};
    CsvSplit out;
    out.test = Dataset{detail::append_intercept(standardize_columns(test_raw, stats)),
                       detail::take_rows(lab, test_idx), TaskKind::BinaryClassification};
    // Balance down to exactly target_train: first equalize classes, then trim
    // both classes evenly if still above target.
    Dataset balanced = detail::balance_binary(train_all, rng);
    const int per_class = target_train / 2;
    std::vector<int> zeros, ones;
    for (int i = 0; i < balanced.rows(); ++i)
        (balanced.targets[i] == 1.0 ? ones : zeros).push_back(i);
    if (static_cast<int>(zeros.size()) < per_class)
        throw DataError("not enough rows per class to reach target_train");
    auto trim = [&](std::vector<int>& v) {
        for (int i = 0; i < per_class; ++i) {
            const auto j = static_cast<std::size_t>(i) +
                           static_cast<std::size_t>(rng.uniform_index(v.size() - static_cast<std::size_t>(i)));
            std::swap(v[static_cast<std::size_t>(i)], v[j]);
        }
        v.resize(static_cast<std::size_t>(per_class));
    };
    trim(zeros);
    trim(ones);
    std::vector<int> keep;
    keep.insert(keep.end(), zeros.begin(), zeros.end());
    keep.insert(keep.end(), ones.begin(), ones.end());
    std::sort(keep.begin(), keep.end());
    out.train = Dataset{detail::take_rows(balanced.features, keep),
                        detail::take_rows(balanced.targets, keep),
                        TaskKind::BinaryClassification};
    return out;
}

// ---------------------------------------------------------------------------
// Random equal split of dataset rows across agents.
inline Partition partition(const Dataset& data, int num_agents, std::uint64_t seed) {
    if (num_agents < 1) throw DataError("need at least one agent");
    const int n = data.rows();
    if (n % num_agents != 0)
        throw DataError("row count " + std::to_string(n) +
                        " not divisible by agent count " + std::to_string(num_agents));
    CounterRng rng(StreamKey{seed, 0, 0, 2, Purpose::DataGen});
    const auto order = detail::shuffled_indices(n, rng);
    const int per = n / num_agents;
    Partition p;
    p.agent_rows.resize(static_cast<std::size_t>(num_agents));
    for (int a = 0; a < num_agents; ++a)
        p.agent_rows[static_cast<std::size_t>(a)] =
            std::vector<int>(order.begin() + static_cast<std::ptrdiff_t>(a) * per,
                             order.begin() + static_cast<std::ptrdiff_t>(a + 1) * per);
    return p;
}

// CSV export for audit: label column first, then features (incl. intercept).
inline void dataset_to_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    for (int i = 0; i < data.rows(); ++i) {
        out << format_double(data.targets[i]);
        for (int j = 0; j < data.param_dim(); ++j)
            out << ',' << format_double(data.features(i, j));
        out << '\n';
    }
}

} // namespace dsgld
