#include "eqa/dataset.hpp"

#include "eqa/csv.hpp"
#include "eqa/error.hpp"
#include "eqa/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

namespace eqa {

void ExpressionDataset::validate() const {
    const auto rows = static_cast<std::size_t>(values.rows());
    const auto cols = static_cast<std::size_t>(values.cols());
    if (labels.size() != rows || sample_ids.size() != rows) {
        throw Error("dataset: row count does not match labels/sample_ids");
    }
    if (feature_ids.size() != cols) {
        throw Error("dataset: column count does not match feature_ids");
    }
    for (int l : labels) {
        if (l != 0 && l != 1) throw Error("dataset: labels must be 0 or 1");
    }
    std::set<std::string> seen(feature_ids.begin(), feature_ids.end());
    if (seen.size() != feature_ids.size()) {
        throw Error("dataset: duplicate feature ids");
    }
}

namespace {

bool parse_label_token(const std::string& raw, int& out) {
    std::string t = trim(raw);
    std::transform(t.begin(), t.end(), t.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    if (t == "ALL" || t == "0") {
        out = 0;
        return true;
    }
    if (t == "AML" || t == "1") {
        out = 1;
        return true;
    }
    return false;
}

bool is_call_header(const std::string& h) {
    std::string t = trim(h);
    std::transform(t.begin(), t.end(), t.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return t.rfind("call", 0) == 0;
}

std::map<std::string, int> load_label_map(const std::string& labels_path) {
    auto rows = read_csv(labels_path);
    if (rows.empty()) throw Error("label file is empty: " + labels_path);
    std::map<std::string, int> labels;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() < 2) {
            throw Error("label file row " + std::to_string(r + 1) + " needs id,label columns");
        }
        int lab = 0;
        if (!parse_label_token(rows[r][1], lab)) {
            if (r == 0) continue; // header row
            throw Error("label file: unrecognized label '" + trim(rows[r][1]) + "' at row " +
                        std::to_string(r + 1));
        }
        labels[trim(rows[r][0])] = lab;
    }
    if (labels.empty()) throw Error("label file has no usable rows: " + labels_path);
    return labels;
}

ExpressionDataset load_golub_wide(const std::string& path, const std::string& labels_path) {
    if (labels_path.empty()) {
        throw Error("golub-wide format requires a companion label file");
    }
    auto rows = read_csv(path);
    if (rows.size() < 2) throw Error("expression file has no data rows: " + path);
    const auto& header = rows[0];

    int acc_col = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (trim(header[c]) == "Gene Accession Number") {
            acc_col = static_cast<int>(c);
            break;
        }
    }
    if (acc_col < 0) throw Error("golub-wide header lacks a 'Gene Accession Number' column");

    std::vector<int> sample_cols;
    std::vector<std::string> sample_ids;
    for (std::size_t c = static_cast<std::size_t>(acc_col) + 1; c < header.size(); ++c) {
        if (is_call_header(header[c]) || trim(header[c]).empty()) continue;
        sample_cols.push_back(static_cast<int>(c));
        sample_ids.push_back(trim(header[c]));
    }
    if (sample_cols.empty()) throw Error("golub-wide file has no sample columns");

    const int n_genes = static_cast<int>(rows.size()) - 1;
    const int n_samples = static_cast<int>(sample_cols.size());

    ExpressionDataset ds;
    ds.values.resize(n_samples, n_genes);
    ds.sample_ids = sample_ids;
    ds.feature_ids.reserve(n_genes);

    std::set<std::string> seen;
    for (int g = 0; g < n_genes; ++g) {
        const auto& row = rows[g + 1];
        if (static_cast<int>(row.size()) <= acc_col) {
            throw Error("row " + std::to_string(g + 2) + " is too short in " + path);
        }
        std::string id = trim(row[acc_col]);
        if (!seen.insert(id).second) {
            throw Error("duplicate feature id '" + id + "' at row " + std::to_string(g + 2));
        }
        ds.feature_ids.push_back(id);
        for (int s = 0; s < n_samples; ++s) {
            if (sample_cols[s] >= static_cast<int>(row.size())) {
                throw Error("row " + std::to_string(g + 2) + " lacks column '" + sample_ids[s] +
                            "'");
            }
            double v = 0.0;
            if (!parse_double(row[sample_cols[s]], v)) {
                throw Error("non-numeric expression cell at row " + std::to_string(g + 2) +
                            ", column '" + sample_ids[s] + "'");
            }
            ds.values(s, g) = v;
        }
    }

    auto label_map = load_label_map(labels_path);
    ds.labels.reserve(n_samples);
    for (const auto& id : ds.sample_ids) {
        auto it = label_map.find(id);
        if (it == label_map.end()) {
            throw Error("missing label for sample '" + id + "'");
        }
        ds.labels.push_back(it->second);
    }
    ds.validate();
    return ds;
}

ExpressionDataset load_tidy(const std::string& path) {
    auto rows = read_csv(path);
    if (rows.size() < 2) throw Error("tidy file has no data rows: " + path);
    const auto& header = rows[0];
    if (header.size() < 2) throw Error("tidy file needs at least one feature and a label column");
    const int p = static_cast<int>(header.size()) - 1;
    const int m = static_cast<int>(rows.size()) - 1;

    ExpressionDataset ds;
    ds.values.resize(m, p);
    for (int c = 0; c < p; ++c) ds.feature_ids.push_back(trim(header[c]));
    std::set<std::string> seen(ds.feature_ids.begin(), ds.feature_ids.end());
    if (seen.size() != ds.feature_ids.size()) throw Error("duplicate feature id in tidy header");

    for (int r = 0; r < m; ++r) {
        const auto& row = rows[r + 1];
        if (static_cast<int>(row.size()) != p + 1) {
            throw Error("tidy row " + std::to_string(r + 2) + " has " +
                        std::to_string(row.size()) + " cells, expected " + std::to_string(p + 1));
        }
        for (int c = 0; c < p; ++c) {
            double v = 0.0;
            if (!parse_double(row[c], v)) {
                throw Error("non-numeric expression cell at row " + std::to_string(r + 2) +
                            ", column '" + ds.feature_ids[c] + "'");
            }
            ds.values(r, c) = v;
        }
        int lab = 0;
        if (!parse_label_token(row[p], lab)) {
            throw Error("missing or invalid label '" + trim(row[p]) + "' at row " +
                        std::to_string(r + 2));
        }
        ds.labels.push_back(lab);
        ds.sample_ids.push_back("s" + std::to_string(r));
    }
    ds.validate();
    return ds;
}

} // namespace

ExpressionDataset load_expression_csv(const std::string& path, CsvFormat format,
                                      const std::string& labels_path) {
    return format == CsvFormat::golub_wide ? load_golub_wide(path, labels_path) : load_tidy(path);
}

ExpressionDataset concat_samples(const ExpressionDataset& a, const ExpressionDataset& b) {
    if (a.feature_ids != b.feature_ids) {
        throw Error("concat_samples: feature id lists differ");
    }
    ExpressionDataset out;
    out.feature_ids = a.feature_ids;
    out.values.resize(a.n_samples() + b.n_samples(), a.n_features());
    out.values.topRows(a.n_samples()) = a.values;
    out.values.bottomRows(b.n_samples()) = b.values;
    out.labels = a.labels;
    out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
    out.sample_ids = a.sample_ids;
    out.sample_ids.insert(out.sample_ids.end(), b.sample_ids.begin(), b.sample_ids.end());
    std::set<std::string> seen(out.sample_ids.begin(), out.sample_ids.end());
    if (seen.size() != out.sample_ids.size()) {
        throw Error("concat_samples: duplicate sample ids");
    }
    out.validate();
    return out;
}

void write_tidy_csv(const ExpressionDataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    for (int c = 0; c < ds.n_features(); ++c) {
        out << csv_escape(ds.feature_ids[c]) << ',';
    }
    out << "label\n";
    for (int r = 0; r < ds.n_samples(); ++r) {
        for (int c = 0; c < ds.n_features(); ++c) {
            out << format_double(ds.values(r, c)) << ',';
        }
        out << ds.labels[r] << '\n';
    }
}

Eigen::MatrixXd quantile_normalize(const Eigen::MatrixXd& values) {
    const int m = static_cast<int>(values.rows());
    const int p = static_cast<int>(values.cols());
    if (m == 0 || p == 0) throw Error("quantile_normalize: empty matrix");

    // Mean distribution: mean over rows of each row's k-th order statistic.
    std::vector<std::vector<int>> order(m, std::vector<int>(p));
    Eigen::VectorXd mean_dist = Eigen::VectorXd::Zero(p);
    for (int r = 0; r < m; ++r) {
        auto& idx = order[r];
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](int a, int b) { return values(r, a) < values(r, b); });
        for (int k = 0; k < p; ++k) mean_dist[k] += values(r, idx[k]);
    }
    mean_dist /= static_cast<double>(m);

    Eigen::MatrixXd out(m, p);
    for (int r = 0; r < m; ++r) {
        const auto& idx = order[r];
        int k = 0;
        while (k < p) {
            // Tied run [k, j): identical source values share the average of
            // their rank means.
            int j = k + 1;
            while (j < p && values(r, idx[j]) == values(r, idx[k])) ++j;
            double avg = 0.0;
            for (int t = k; t < j; ++t) avg += mean_dist[t];
            avg /= static_cast<double>(j - k);
            for (int t = k; t < j; ++t) out(r, idx[t]) = avg;
            k = j;
        }
    }
    return out;
}

ScalingParams fit_minmax(const Eigen::MatrixXd& train_values, double target_lo, double target_hi) {
    if (train_values.rows() == 0 || train_values.cols() == 0) {
        throw Error("fit_minmax: empty training matrix");
    }
    if (!(target_lo < target_hi)) throw Error("fit_minmax: target_lo must be < target_hi");
    ScalingParams params;
    params.target_lo = target_lo;
    params.target_hi = target_hi;
    params.per_feature_min = train_values.colwise().minCoeff();
    params.per_feature_max = train_values.colwise().maxCoeff();
    params.degenerate.resize(train_values.cols());
    for (int c = 0; c < train_values.cols(); ++c) {
        params.degenerate[c] = params.per_feature_min[c] == params.per_feature_max[c];
    }
    return params;
}

Eigen::MatrixXd apply_minmax(const Eigen::MatrixXd& values, const ScalingParams& params) {
    if (values.cols() != params.per_feature_min.size()) {
        throw Error("apply_minmax: column count does not match scaling params");
    }
    const double lo = params.target_lo;
    const double hi = params.target_hi;
    Eigen::MatrixXd out(values.rows(), values.cols());
    for (int c = 0; c < values.cols(); ++c) {
        const double mn = params.per_feature_min[c];
        const double mx = params.per_feature_max[c];
        if (params.degenerate[c]) {
            out.col(c).setConstant(0.5 * (lo + hi));
            continue;
        }
        const double scale = (hi - lo) / (mx - mn);
        for (int r = 0; r < values.rows(); ++r) {
            double v = lo + (values(r, c) - mn) * scale;
            out(r, c) = std::clamp(v, lo, hi);
        }
    }
    return out;
}

namespace {

// Indices of each class, in dataset order.
std::map<int, std::vector<int>> group_by_label(const std::vector<int>& labels) {
    std::map<int, std::vector<int>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        groups[labels[i]].push_back(static_cast<int>(i));
    }
    return groups;
}

// Allocates `total` slots across classes proportionally to `quota` (largest
// remainder), capping each class at `cap`.
std::map<int, int> allocate(const std::map<int, double>& quota, int total,
                            const std::map<int, int>& cap) {
    std::map<int, int> alloc;
    int assigned = 0;
    std::vector<std::pair<double, int>> remainders;
    for (const auto& [cls, q] : quota) {
        int base = static_cast<int>(std::floor(q));
        base = std::min(base, cap.at(cls));
        alloc[cls] = base;
        assigned += base;
        remainders.push_back({q - std::floor(q), cls});
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    int extras = total - assigned;
    while (extras > 0) {
        bool placed = false;
        for (const auto& [rem, cls] : remainders) {
            (void)rem;
            if (extras == 0) break;
            if (alloc[cls] < cap.at(cls)) {
                ++alloc[cls];
                --extras;
                placed = true;
            }
        }
        if (!placed) break;
    }
    return alloc;
}

} // namespace

std::pair<std::vector<int>, std::vector<int>>
stratified_split_indices(const std::vector<int>& labels, double test_fraction,
                         std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw Error("train_test_split: test_fraction must be in (0, 1)");
    }
    auto groups = group_by_label(labels);
    for (const auto& [cls, idx] : groups) {
        if (idx.size() < 2) {
            throw Error("train_test_split: class " + std::to_string(cls) +
                        " has fewer than 2 samples");
        }
    }
    const int m = static_cast<int>(labels.size());
    const int n_train = static_cast<int>(std::floor((1.0 - test_fraction) * m));

    std::map<int, double> quota;
    std::map<int, int> cap;
    for (const auto& [cls, idx] : groups) {
        quota[cls] = (1.0 - test_fraction) * static_cast<double>(idx.size());
        cap[cls] = static_cast<int>(idx.size()) - 1; // every class keeps a test sample
    }
    auto alloc = allocate(quota, n_train, cap);

    std::vector<int> train, test;
    for (auto& [cls, idx] : groups) {
        Rng rng(Rng::mix(seed, static_cast<std::uint64_t>(cls) + 1));
        shuffle(idx, rng);
        const int take = alloc[cls];
        train.insert(train.end(), idx.begin(), idx.begin() + take);
        test.insert(test.end(), idx.begin() + take, idx.end());
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {train, test};
}

std::vector<int> stratified_subsample_indices(const std::vector<int>& labels, int m,
                                              std::uint64_t seed) {
    const int total = static_cast<int>(labels.size());
    if (m < 2) throw Error("stratified_subsample: m must be >= 2");
    if (m > total) throw Error("stratified_subsample: m exceeds sample count");
    auto groups = group_by_label(labels);
    if (groups.size() < 2) throw Error("stratified_subsample: both classes must be present");

    std::map<int, double> quota;
    std::map<int, int> cap;
    for (const auto& [cls, idx] : groups) {
        quota[cls] = static_cast<double>(m) * static_cast<double>(idx.size()) / total;
        cap[cls] = static_cast<int>(idx.size());
    }
    auto alloc = allocate(quota, m, cap);
    for (const auto& [cls, n] : alloc) {
        if (n == 0) {
            throw Error("stratified_subsample: m=" + std::to_string(m) + " empties class " +
                        std::to_string(cls));
        }
    }

    std::vector<int> picked;
    for (auto& [cls, idx] : groups) {
        Rng rng(Rng::mix(seed, static_cast<std::uint64_t>(cls) + 1));
        shuffle(idx, rng);
        picked.insert(picked.end(), idx.begin(), idx.begin() + alloc[cls]);
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

ExpressionDataset take_rows(const ExpressionDataset& ds, const std::vector<int>& rows) {
    ExpressionDataset out;
    out.feature_ids = ds.feature_ids;
    out.values.resize(static_cast<int>(rows.size()), ds.n_features());
    out.labels.reserve(rows.size());
    out.sample_ids.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const int r = rows[i];
        if (r < 0 || r >= ds.n_samples()) throw Error("take_rows: index out of range");
        out.values.row(static_cast<int>(i)) = ds.values.row(r);
        out.labels.push_back(ds.labels[r]);
        out.sample_ids.push_back(ds.sample_ids[r]);
    }
    return out;
}

std::pair<ExpressionDataset, ExpressionDataset>
train_test_split(const ExpressionDataset& ds, double test_fraction, std::uint64_t seed) {
    auto [train_idx, test_idx] = stratified_split_indices(ds.labels, test_fraction, seed);
    return {take_rows(ds, train_idx), take_rows(ds, test_idx)};
}

ExpressionDataset stratified_subsample(const ExpressionDataset& ds, int m, std::uint64_t seed) {
    return take_rows(ds, stratified_subsample_indices(ds.labels, m, seed));
}

} // namespace eqa
