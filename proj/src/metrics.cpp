#include "eqa/metrics.hpp"

#include "eqa/csv.hpp"
#include "eqa/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

namespace eqa {

double f1_score(const std::vector<int>& y_true, const std::vector<int>& y_pred, int positive) {
    if (y_true.size() != y_pred.size()) throw Error("f1_score: length mismatch");
    if (y_true.empty()) throw Error("f1_score: empty inputs");
    int tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const bool t = y_true[i] == positive;
        const bool p = y_pred[i] == positive;
        if (t && p) ++tp;
        if (!t && p) ++fp;
        if (t && !p) ++fn;
    }
    const int denom = 2 * tp + fp + fn;
    return denom == 0 ? 0.0 : 2.0 * tp / static_cast<double>(denom);
}

double balanced_accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size()) throw Error("balanced_accuracy: length mismatch");
    std::set<int> classes(y_true.begin(), y_true.end());
    if (classes.size() != 2) {
        throw Error("balanced_accuracy: y_true must contain exactly two classes");
    }
    const int pos = *classes.rbegin();
    const int neg = *classes.begin();
    int tp = 0, fn = 0, tn = 0, fp = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] == pos) {
            (y_pred[i] == pos ? tp : fn)++;
        } else {
            (y_pred[i] == neg ? tn : fp)++;
        }
    }
    const double tpr = tp / static_cast<double>(tp + fn);
    const double tnr = tn / static_cast<double>(tn + fp);
    return 0.5 * (tpr + tnr);
}

double geometric_difference(const KernelMatrix& k_classical, const KernelMatrix& k_quantum,
                            double reg) {
    const Eigen::MatrixXd& c_raw = k_classical.values;
    const Eigen::MatrixXd& q_raw = k_quantum.values;
    if (c_raw.rows() != c_raw.cols() || q_raw.rows() != q_raw.cols() ||
        c_raw.rows() != q_raw.rows()) {
        throw Error("geometric_difference: kernels must be square and the same size");
    }
    const int m = static_cast<int>(c_raw.rows());

    Eigen::MatrixXd kc = 0.5 * (c_raw + c_raw.transpose());
    Eigen::MatrixXd kq = 0.5 * (q_raw + q_raw.transpose());
    const double tc = kc.trace();
    const double tq = kq.trace();
    if (!(tc > 0.0) || !(tq > 0.0)) {
        throw Error("geometric_difference: kernel trace must be positive");
    }
    kc *= static_cast<double>(m) / tc;
    kq *= static_cast<double>(m) / tq;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kq);
    const Eigen::VectorXd roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd sqrt_q =
        es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();

    const Eigen::MatrixXd regularized = kc + reg * Eigen::MatrixXd::Identity(m, m);
    const Eigen::MatrixXd middle = regularized.ldlt().solve(sqrt_q);
    Eigen::MatrixXd inner = sqrt_q * middle;
    inner = 0.5 * (inner + inner.transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(inner, Eigen::EigenvaluesOnly);
    const double spectral = es2.eigenvalues().cwiseAbs().maxCoeff();
    const double g = std::sqrt(spectral);
    if (!std::isfinite(g)) throw Error("geometric_difference: non-finite result");
    return g;
}

namespace {

void check_grid(const MetricSurface& s) {
    if (static_cast<int>(s.feature_axis.size()) != s.values.rows() ||
        static_cast<int>(s.sample_axis.size()) != s.values.cols()) {
        throw Error("surface: grid dimensions do not match axes");
    }
}

} // namespace

MetricSurface tri_surface(const MetricSurface& surface) {
    check_grid(surface);
    const int nf = static_cast<int>(surface.values.rows());
    const int ns = static_cast<int>(surface.values.cols());
    if (nf < 2 || ns < 2) throw Error("tri_surface: grid too small (need at least 2x2)");

    MetricSurface out = surface;
    out.metric_name = surface.metric_name + "_tri";
    for (int i = 0; i < nf; ++i) {
        for (int j = 0; j < ns; ++j) {
            double acc = 0.0;
            for (int di = -1; di <= 1; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    const int ni = i + di;
                    const int nj = j + dj;
                    if (ni < 0 || ni >= nf || nj < 0 || nj >= ns) continue;
                    const double d = surface.values(ni, nj) - surface.values(i, j);
                    acc += d * d;
                }
            }
            out.values(i, j) = std::sqrt(acc);
        }
    }
    return out;
}

std::tuple<MetricSurface, MetricSurface, MetricSurface>
ptri_comparison(const MetricSurface& classical, const MetricSurface& quantum) {
    if (classical.feature_axis != quantum.feature_axis ||
        classical.sample_axis != quantum.sample_axis) {
        throw Error("ptri_comparison: surface axes differ");
    }
    MetricSurface tri_c = tri_surface(classical);
    MetricSurface tri_q = tri_surface(quantum);
    MetricSurface diff = tri_q;
    diff.values = tri_q.values - tri_c.values;
    diff.kernel_name = "difference";
    return {std::move(tri_c), std::move(tri_q), std::move(diff)};
}

void write_surface_csv(const MetricSurface& surface, const std::string& path) {
    check_grid(surface);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << "feature_count,sample_count,value\n";
    for (std::size_t i = 0; i < surface.feature_axis.size(); ++i) {
        for (std::size_t j = 0; j < surface.sample_axis.size(); ++j) {
            out << surface.feature_axis[i] << ',' << surface.sample_axis[j] << ','
                << format_double(surface.values(static_cast<int>(i), static_cast<int>(j)))
                << '\n';
        }
    }
}

MetricSurface read_surface_csv(const std::string& path) {
    const auto rows = read_csv(path);
    if (rows.size() < 2) throw Error("surface CSV has no data rows: " + path);
    std::map<std::pair<int, int>, double> cells;
    std::set<int> features, samples;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 3) {
            throw Error("surface CSV row " + std::to_string(r + 1) + " needs 3 cells");
        }
        const int f = std::stoi(trim(rows[r][0]));
        const int s = std::stoi(trim(rows[r][1]));
        double v = 0.0;
        if (!parse_double(rows[r][2], v)) {
            throw Error("surface CSV: non-numeric value at row " + std::to_string(r + 1));
        }
        cells[{f, s}] = v;
        features.insert(f);
        samples.insert(s);
    }
    MetricSurface surface;
    surface.feature_axis.assign(features.begin(), features.end());
    surface.sample_axis.assign(samples.begin(), samples.end());
    surface.values.resize(static_cast<int>(features.size()), static_cast<int>(samples.size()));
    for (std::size_t i = 0; i < surface.feature_axis.size(); ++i) {
        for (std::size_t j = 0; j < surface.sample_axis.size(); ++j) {
            const auto it = cells.find({surface.feature_axis[i], surface.sample_axis[j]});
            if (it == cells.end()) {
                throw Error("surface CSV: missing cell for feature_count=" +
                            std::to_string(surface.feature_axis[i]) +
                            " sample_count=" + std::to_string(surface.sample_axis[j]));
            }
            surface.values(static_cast<int>(i), static_cast<int>(j)) = it->second;
        }
    }
    return surface;
}

} // namespace eqa
