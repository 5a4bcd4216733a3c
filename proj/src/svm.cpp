#include "eqa/svm.hpp"

#include "eqa/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace eqa {

namespace {

constexpr double kTau = 1e-12;

std::vector<int> normalize_labels(const std::vector<int>& labels) {
    std::vector<int> y;
    y.reserve(labels.size());
    bool has_pos = false, has_neg = false;
    for (int l : labels) {
        int v;
        if (l == 1) {
            v = 1;
        } else if (l == 0 || l == -1) {
            v = -1;
        } else {
            throw Error("svm: labels must be in {-1,+1} or {0,1}");
        }
        y.push_back(v);
        (v == 1 ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) throw Error("svm: both classes must be present");
    return y;
}

} // namespace

SvmModel smo_train(const KernelMatrix& kernel, const std::vector<int>& labels, double c,
                   double tol, SmoTrace* trace) {
    const Eigen::MatrixXd& k = kernel.values;
    const int m = static_cast<int>(k.rows());
    if (k.rows() != k.cols()) throw Error("smo_train: kernel must be square");
    if (static_cast<int>(labels.size()) != m) throw Error("smo_train: label count mismatch");
    if (c <= 0.0) throw Error("smo_train: c must be > 0");
    const std::vector<int> y = normalize_labels(labels);
    if (min_eigenvalue(k) < -1e-6) {
        throw Error("smo_train: kernel is not positive semidefinite (eigenvalue below -1e-6)");
    }

    // Q_ij = y_i y_j K_ij; gradient of (1/2) a'Qa - e'a is G = Qa - e.
    Eigen::MatrixXd q(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            q(i, j) = y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)] * k(i, j);
        }
    }

    std::vector<double> alpha(static_cast<std::size_t>(m), 0.0);
    Eigen::VectorXd grad = Eigen::VectorXd::Constant(m, -1.0);

    const auto in_up = [&](int t) {
        return (y[static_cast<std::size_t>(t)] == 1 && alpha[static_cast<std::size_t>(t)] < c) ||
               (y[static_cast<std::size_t>(t)] == -1 && alpha[static_cast<std::size_t>(t)] > 0);
    };
    const auto in_low = [&](int t) {
        return (y[static_cast<std::size_t>(t)] == -1 && alpha[static_cast<std::size_t>(t)] < c) ||
               (y[static_cast<std::size_t>(t)] == 1 && alpha[static_cast<std::size_t>(t)] > 0);
    };

    const int max_iter = std::max(10000, 200 * m);
    bool converged = false;
    double m_val = 0.0, big_m_val = 0.0;

    for (int iter = 0; iter < max_iter; ++iter) {
        // i: maximal -y*G over the "up" set.
        int i = -1;
        m_val = -std::numeric_limits<double>::infinity();
        for (int t = 0; t < m; ++t) {
            if (!in_up(t)) continue;
            const double v = -y[static_cast<std::size_t>(t)] * grad[t];
            if (v > m_val) {
                m_val = v;
                i = t;
            }
        }
        big_m_val = std::numeric_limits<double>::infinity();
        for (int t = 0; t < m; ++t) {
            if (!in_low(t)) continue;
            big_m_val = std::min(big_m_val, -y[static_cast<std::size_t>(t)] * grad[t]);
        }
        if (i < 0 || m_val - big_m_val <= tol) {
            converged = true;
            break;
        }

        // j: second-order working-set partner (largest decrease estimate).
        int j = -1;
        double best_gain = 0.0;
        for (int t = 0; t < m; ++t) {
            if (!in_low(t)) continue;
            const double vt = -y[static_cast<std::size_t>(t)] * grad[t];
            const double b = m_val - vt;
            if (b <= 0.0) continue;
            double a = k(i, i) + k(t, t) - 2.0 * k(i, t);
            if (a <= 0.0) a = kTau;
            const double gain = b * b / a;
            if (gain > best_gain) {
                best_gain = gain;
                j = t;
            }
        }
        if (j < 0) {
            converged = true;
            break;
        }

        // Exact two-variable subproblem (LIBSVM update), then clip to the box.
        const double old_ai = alpha[static_cast<std::size_t>(i)];
        const double old_aj = alpha[static_cast<std::size_t>(j)];
        if (y[static_cast<std::size_t>(i)] != y[static_cast<std::size_t>(j)]) {
            double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = old_ai - old_aj;
            alpha[static_cast<std::size_t>(i)] += delta;
            alpha[static_cast<std::size_t>(j)] += delta;
            if (diff > 0.0) {
                if (alpha[static_cast<std::size_t>(j)] < 0.0) {
                    alpha[static_cast<std::size_t>(j)] = 0.0;
                    alpha[static_cast<std::size_t>(i)] = diff;
                }
                if (alpha[static_cast<std::size_t>(i)] > c) {
                    alpha[static_cast<std::size_t>(i)] = c;
                    alpha[static_cast<std::size_t>(j)] = c - diff;
                }
            } else {
                if (alpha[static_cast<std::size_t>(i)] < 0.0) {
                    alpha[static_cast<std::size_t>(i)] = 0.0;
                    alpha[static_cast<std::size_t>(j)] = -diff;
                }
                if (alpha[static_cast<std::size_t>(j)] > c) {
                    alpha[static_cast<std::size_t>(j)] = c;
                    alpha[static_cast<std::size_t>(i)] = c + diff;
                }
            }
        } else {
            double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = old_ai + old_aj;
            alpha[static_cast<std::size_t>(i)] -= delta;
            alpha[static_cast<std::size_t>(j)] += delta;
            if (alpha[static_cast<std::size_t>(i)] > c) {
                alpha[static_cast<std::size_t>(i)] = c;
                alpha[static_cast<std::size_t>(j)] = sum - c;
            }
            if (alpha[static_cast<std::size_t>(j)] < 0.0) {
                alpha[static_cast<std::size_t>(j)] = 0.0;
                alpha[static_cast<std::size_t>(i)] = sum;
            }
            if (alpha[static_cast<std::size_t>(j)] > c) {
                alpha[static_cast<std::size_t>(j)] = c;
                alpha[static_cast<std::size_t>(i)] = sum - c;
            }
            if (alpha[static_cast<std::size_t>(i)] < 0.0) {
                alpha[static_cast<std::size_t>(i)] = 0.0;
                alpha[static_cast<std::size_t>(j)] = sum;
            }
        }

        const double di = alpha[static_cast<std::size_t>(i)] - old_ai;
        const double dj = alpha[static_cast<std::size_t>(j)] - old_aj;
        grad += q.col(i) * di + q.col(j) * dj;

        if (trace) {
            // D(a) = sum(a) - (1/2) a'Qa = (1/2) sum_i a_i (1 - G_i).
            double obj = 0.0;
            for (int t = 0; t < m; ++t) {
                obj += alpha[static_cast<std::size_t>(t)] * (1.0 - grad[t]);
            }
            trace->dual_objective.push_back(0.5 * obj);
            trace->iterations = iter + 1;
        }
    }
    if (trace) trace->converged = converged;

    SvmModel model;
    model.alphas = alpha;
    model.labels = y;
    model.c = c;
    for (int t = 0; t < m; ++t) {
        if (alpha[static_cast<std::size_t>(t)] > 0.0) model.support_indices.push_back(t);
    }

    // Bias from free support vectors: y_i - f0(x_i) = -y_i G_i there.
    double bias_sum = 0.0;
    int n_free = 0;
    const double margin = 1e-9 * c;
    for (int t = 0; t < m; ++t) {
        const double a = alpha[static_cast<std::size_t>(t)];
        if (a > margin && a < c - margin) {
            bias_sum += -y[static_cast<std::size_t>(t)] * grad[t];
            ++n_free;
        }
    }
    if (n_free > 0) {
        model.bias = bias_sum / n_free;
    } else {
        model.bias = -0.5 * (m_val + big_m_val);
    }
    return model;
}

std::pair<std::vector<int>, std::vector<double>> predict(const SvmModel& model,
                                                         const KernelMatrix& kernel_cross) {
    const Eigen::MatrixXd& k = kernel_cross.values;
    const int n_train = static_cast<int>(model.alphas.size());
    if (k.cols() != n_train) {
        throw Error("predict: cross-kernel column count does not match training size");
    }
    std::vector<int> labels;
    std::vector<double> decision;
    labels.reserve(static_cast<std::size_t>(k.rows()));
    decision.reserve(static_cast<std::size_t>(k.rows()));
    for (int t = 0; t < k.rows(); ++t) {
        double f = model.bias;
        for (int i = 0; i < n_train; ++i) {
            f += model.alphas[static_cast<std::size_t>(i)] *
                 model.labels[static_cast<std::size_t>(i)] * k(t, i);
        }
        decision.push_back(f);
        labels.push_back(f >= 0.0 ? 1 : -1);
    }
    return {labels, decision};
}

double dual_objective(const SvmModel& model, const KernelMatrix& kernel) {
    const int m = static_cast<int>(model.alphas.size());
    double sum_a = 0.0, quad = 0.0;
    for (int i = 0; i < m; ++i) {
        sum_a += model.alphas[static_cast<std::size_t>(i)];
        for (int j = 0; j < m; ++j) {
            quad += model.alphas[static_cast<std::size_t>(i)] *
                    model.alphas[static_cast<std::size_t>(j)] *
                    model.labels[static_cast<std::size_t>(i)] *
                    model.labels[static_cast<std::size_t>(j)] * kernel.values(i, j);
        }
    }
    return sum_a - 0.5 * quad;
}

std::string model_to_json(const SvmModel& model) {
    nlohmann::json j;
    j["alphas"] = model.alphas;
    j["bias"] = model.bias;
    j["support_indices"] = model.support_indices;
    j["labels"] = model.labels;
    j["c"] = model.c;
    return j.dump(2);
}

SvmModel model_from_json(const std::string& text) {
    SvmModel model;
    try {
        const auto j = nlohmann::json::parse(text);
        model.alphas = j.at("alphas").get<std::vector<double>>();
        model.bias = j.at("bias").get<double>();
        model.support_indices = j.at("support_indices").get<std::vector<int>>();
        model.labels = j.at("labels").get<std::vector<int>>();
        model.c = j.at("c").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("svm model JSON: ") + e.what());
    }
    return model;
}

} // namespace eqa
