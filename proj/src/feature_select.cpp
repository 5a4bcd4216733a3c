#include "eqa/feature_select.hpp"

#include "eqa/error.hpp"
#include "eqa/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

namespace eqa {

std::string to_string(SelectionMethod m) {
    return m == SelectionMethod::lasso ? "lasso" : "qubo";
}

SelectionMethod selection_method_from_string(const std::string& s) {
    if (s == "lasso") return SelectionMethod::lasso;
    if (s == "qubo") return SelectionMethod::qubo;
    throw Error("unknown selection method '" + s + "' (expected lasso or qubo)");
}

Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& x) {
    const int m = static_cast<int>(x.rows());
    Eigen::MatrixXd z = x;
    for (int c = 0; c < z.cols(); ++c) {
        const double mean = z.col(c).mean();
        z.col(c).array() -= mean;
        const double var = z.col(c).squaredNorm() / static_cast<double>(m);
        const double sd = std::sqrt(var);
        if (sd > 0.0) {
            z.col(c) /= sd;
        } else {
            z.col(c).setZero();
        }
    }
    return z;
}

namespace {

constexpr double kCdTol = 1e-7;
constexpr int kCdMaxCycles = 10000;

double soft_threshold(double v, double lambda) {
    if (v > lambda) return v - lambda;
    if (v < -lambda) return v + lambda;
    return 0.0;
}

void check_finite(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    if (!x.allFinite() || !y.allFinite()) {
        throw Error("lasso: input contains non-finite entries");
    }
}

// Coordinate descent on already-standardized columns. `beta` doubles as the
// warm start.
void cd_fit(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, double lambda,
            Eigen::VectorXd& beta) {
    const int m = static_cast<int>(z.rows());
    const int p = static_cast<int>(z.cols());
    const double inv_m = 1.0 / static_cast<double>(m);
    Eigen::VectorXd residual = y - z * beta;
    for (int cycle = 0; cycle < kCdMaxCycles; ++cycle) {
        double max_change = 0.0;
        for (int j = 0; j < p; ++j) {
            const double old = beta[j];
            // Unit-variance column makes the coordinate minimizer a plain
            // soft threshold of rho_j.
            const double rho = inv_m * z.col(j).dot(residual) + old;
            const double updated = soft_threshold(rho, lambda);
            if (updated != old) {
                residual += z.col(j) * (old - updated);
                beta[j] = updated;
                max_change = std::max(max_change, std::abs(updated - old));
            }
        }
        if (max_change < kCdTol) break;
    }
}

} // namespace

Eigen::VectorXd lasso_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda) {
    if (x.rows() != y.size()) throw Error("lasso_fit: row count does not match labels");
    if (lambda < 0.0) throw Error("lasso_fit: lambda must be >= 0");
    check_finite(x, y);
    const Eigen::MatrixXd z = standardize_columns(x);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
    cd_fit(z, y, lambda, beta);
    return beta;
}

FeatureSelection lasso_select_k(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int k) {
    const int p = static_cast<int>(x.cols());
    if (k < 1 || k >= p) throw Error("lasso_select_k: k must satisfy 1 <= k < feature count");
    check_finite(x, y);

    const Eigen::MatrixXd z = standardize_columns(x);
    const double inv_m = 1.0 / static_cast<double>(x.rows());
    const double lambda_max = (z.transpose() * y * inv_m).cwiseAbs().maxCoeff();
    const double lambda_min = 1e-6;

    const auto nonzero_count = [](const Eigen::VectorXd& beta) {
        int n = 0;
        for (int j = 0; j < beta.size(); ++j) {
            if (beta[j] != 0.0) ++n;
        }
        return n;
    };

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd best_beta = beta;
    double best_lambda = lambda_max;
    int best_count = 0;

    double lo = lambda_min;
    double hi = std::max(lambda_max, lambda_min);
    for (int step = 0; step < 60; ++step) {
        const double mid = 0.5 * (lo + hi);
        cd_fit(z, y, mid, beta);
        const int count = nonzero_count(beta);
        if (std::abs(count - k) < std::abs(best_count - k) ||
            (std::abs(count - k) == std::abs(best_count - k) && count > best_count)) {
            best_beta = beta;
            best_lambda = mid;
            best_count = count;
        }
        if (count == k) break;
        if (count > k) {
            lo = mid; // too many survivors, raise the penalty
        } else {
            hi = mid;
        }
    }

    FeatureSelection sel;
    sel.method = SelectionMethod::lasso;
    sel.requested_k = k;
    sel.exact_count = best_count == k;
    sel.lasso_lambda = best_lambda;
    std::vector<int> idx;
    for (int j = 0; j < p; ++j) {
        if (best_beta[j] != 0.0) idx.push_back(j);
    }
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        const double sa = std::abs(best_beta[a]);
        const double sb = std::abs(best_beta[b]);
        if (sa != sb) return sa > sb;
        return a < b;
    });
    for (int j : idx) {
        sel.indices.push_back(j);
        sel.scores.push_back(std::abs(best_beta[j]));
    }
    return sel;
}

QuboProblem::QuboProblem(int n, int cardinality, double penalty_weight, double redundancy_weight)
    : n_(n), cardinality_(cardinality), penalty_weight_(penalty_weight),
      redundancy_weight_(redundancy_weight) {
    if (n < 1) throw Error("QuboProblem: n must be >= 1");
    if (cardinality < 1 || cardinality > n) {
        throw Error("QuboProblem: cardinality must be in [1, n]");
    }
    upper_.assign(static_cast<std::size_t>(n) * (n + 1) / 2, 0.0);
}

std::size_t QuboProblem::flat_index(int i, int j) const {
    // Row-major upper triangle: row i starts after n + (n-1) + ... + (n-i+1).
    const auto ni = static_cast<std::size_t>(n_ - i);
    const auto total = static_cast<std::size_t>(n_) * (n_ + 1) / 2;
    return total - ni * (ni + 1) / 2 + static_cast<std::size_t>(j - i);
}

double QuboProblem::coeff(int i, int j) const {
    if (i < 0 || j < 0 || i >= n_ || j >= n_) throw Error("QuboProblem: index out of range");
    if (i > j) return 0.0;
    return upper_[flat_index(i, j)];
}

void QuboProblem::set_coeff(int i, int j, double v) {
    if (i < 0 || j < 0 || i >= n_ || j >= n_ || i > j) {
        throw Error("QuboProblem: set_coeff requires i <= j within range");
    }
    upper_[flat_index(i, j)] = v;
}

QuboProblem build_qubo(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int k, double alpha,
                       double penalty_weight) {
    if (x.rows() != y.size()) throw Error("build_qubo: row count does not match labels");
    if (k < 1) throw Error("build_qubo: k must be >= 1");
    if (alpha <= 0.0 || penalty_weight <= 0.0) {
        throw Error("build_qubo: alpha and penalty_weight must be > 0");
    }
    const int n = static_cast<int>(x.cols());
    const int m = static_cast<int>(x.rows());
    const double inv_m = 1.0 / static_cast<double>(m);

    // Standardized columns turn every Pearson correlation into a plain dot
    // product; zero-variance columns are zeroed, so their correlations are 0.
    const Eigen::MatrixXd z = standardize_columns(x);
    const Eigen::MatrixXd zy = standardize_columns(y);
    const Eigen::VectorXd relevance = (z.transpose() * zy * inv_m).cwiseAbs();

    QuboProblem p(n, k, penalty_weight, alpha);
    const double diag_shift = penalty_weight * (1.0 - 2.0 * static_cast<double>(k));
    for (int i = 0; i < n; ++i) {
        p.set_coeff(i, i, -relevance[i] + diag_shift);
    }

    // Pairwise |r_ij| in column blocks: keeps the working product near
    // O(block * n) memory instead of a full n x n intermediate.
    const int block = 256;
    const double off_shift = 2.0 * penalty_weight;
    for (int i0 = 0; i0 < n; i0 += block) {
        const int w = std::min(block, n - i0);
        const Eigen::MatrixXd r_block = z.middleCols(i0, w).transpose() * z * inv_m;
        for (int bi = 0; bi < w; ++bi) {
            const int i = i0 + bi;
            for (int j = i + 1; j < n; ++j) {
                p.set_coeff(i, j, alpha * std::abs(r_block(bi, j)) + off_shift);
            }
        }
    }
    return p;
}

double qubo_energy(const QuboProblem& p, const std::vector<std::uint8_t>& bits) {
    if (static_cast<int>(bits.size()) != p.size()) {
        throw Error("qubo_energy: bit vector length does not match problem size");
    }
    double e = 0.0;
    for (int i = 0; i < p.size(); ++i) {
        if (!bits[static_cast<std::size_t>(i)]) continue;
        for (int j = i; j < p.size(); ++j) {
            if (bits[static_cast<std::size_t>(j)]) e += p.coeff(i, j);
        }
    }
    return e;
}

namespace {

// q(i,j) with symmetric lookup into the upper triangle.
inline double coupling(const QuboProblem& p, int i, int j) {
    return i <= j ? p.coeff(i, j) : p.coeff(j, i);
}

// field[i] = q_ii + sum_{j != i} q(i,j) * b_j; flipping bit i changes the
// energy by +field[i] (0 -> 1) or -field[i] (1 -> 0).
std::vector<double> init_fields(const QuboProblem& p, const std::vector<std::uint8_t>& bits) {
    const int n = p.size();
    std::vector<double> field(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) field[static_cast<std::size_t>(i)] = p.coeff(i, i);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double q = p.coeff(i, j);
            if (q == 0.0) continue;
            if (bits[static_cast<std::size_t>(j)]) field[static_cast<std::size_t>(i)] += q;
            if (bits[static_cast<std::size_t>(i)]) field[static_cast<std::size_t>(j)] += q;
        }
    }
    return field;
}

} // namespace

QuboSolution anneal(const QuboProblem& p, const AnnealSchedule& schedule) {
    if (!(schedule.t_start > schedule.t_end && schedule.t_end > 0.0)) {
        throw Error("anneal: schedule requires t_start > t_end > 0");
    }
    if (schedule.sweeps < 1 || schedule.restarts < 1) {
        throw Error("anneal: sweeps and restarts must be >= 1");
    }
    const int n = p.size();
    const double decay_base = schedule.t_end / schedule.t_start;

    std::vector<std::uint8_t> best_bits(static_cast<std::size_t>(n), 0);
    double best_energy = std::numeric_limits<double>::infinity();

    for (int restart = 0; restart < schedule.restarts; ++restart) {
        Rng rng(Rng::mix(schedule.seed, static_cast<std::uint64_t>(restart)));
        std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
        for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next_u64() & 1);

        std::vector<double> field = init_fields(p, bits);
        double energy = qubo_energy(p, bits);
        std::vector<std::uint8_t> run_best = bits;
        double run_best_energy = energy;

        for (int sweep = 0; sweep < schedule.sweeps; ++sweep) {
            const double frac =
                schedule.sweeps == 1 ? 1.0
                                     : static_cast<double>(sweep) / (schedule.sweeps - 1.0);
            const double temp = schedule.t_start * std::pow(decay_base, frac);
            for (int step = 0; step < n; ++step) {
                const int i = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
                const double delta = bits[static_cast<std::size_t>(i)]
                                         ? -field[static_cast<std::size_t>(i)]
                                         : field[static_cast<std::size_t>(i)];
                if (delta > 0.0 && rng.next_unit() >= std::exp(-delta / temp)) continue;
                bits[static_cast<std::size_t>(i)] ^= 1;
                energy += delta;
                const double sign = bits[static_cast<std::size_t>(i)] ? 1.0 : -1.0;
                for (int j = 0; j < n; ++j) {
                    if (j == i) continue;
                    const double q = coupling(p, i, j);
                    if (q != 0.0) field[static_cast<std::size_t>(j)] += sign * q;
                }
                if (energy < run_best_energy) {
                    run_best_energy = energy;
                    run_best = bits;
                }
            }
        }
        if (run_best_energy < best_energy) {
            best_energy = run_best_energy;
            best_bits = run_best;
        }
    }

    QuboSolution sol;
    sol.bits = std::move(best_bits);
    sol.energy = qubo_energy(p, sol.bits); // exact, not the drifted running sum
    return sol;
}

QuboSolution exhaustive_solve(const QuboProblem& p) {
    const int n = p.size();
    if (n > 24) {
        throw Error("exhaustive_solve: refusing n > 24 (2^" + std::to_string(n) + " states)");
    }
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n), 0);
    double energy = 0.0;
    std::uint64_t best_value = 0;
    double best_energy = 0.0;
    std::vector<std::uint8_t> best_bits = bits;

    // Gray-code walk: step x flips bit ctz(x), visiting every state once.
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t x = 1; x < total; ++x) {
        const int i = std::countr_zero(x);
        double delta = p.coeff(i, i);
        for (int j = 0; j < n; ++j) {
            if (j != i && bits[static_cast<std::size_t>(j)]) delta += coupling(p, i, j);
        }
        if (bits[static_cast<std::size_t>(i)]) delta = -delta;
        bits[static_cast<std::size_t>(i)] ^= 1;
        energy += delta;
        const std::uint64_t value = x ^ (x >> 1); // == current bits as an integer
        if (energy < best_energy || (energy == best_energy && value < best_value)) {
            best_energy = energy;
            best_value = value;
            best_bits = bits;
        }
    }

    QuboSolution sol;
    sol.bits = std::move(best_bits);
    sol.energy = qubo_energy(p, sol.bits);
    return sol;
}

double default_penalty_weight(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    const Eigen::MatrixXd z = standardize_columns(x);
    const Eigen::MatrixXd zy = standardize_columns(y);
    const double max_rel =
        (z.transpose() * zy / static_cast<double>(x.rows())).cwiseAbs().maxCoeff();
    return max_rel > 0.0 ? 2.0 * max_rel : 1.0;
}

FeatureSelection qubo_select_k(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int k,
                               const AnnealSchedule& schedule, double alpha,
                               double penalty_weight) {
    const int n = static_cast<int>(x.cols());
    if (k < 1 || k > n) throw Error("qubo_select_k: k must be in [1, feature count]");
    if (penalty_weight <= 0.0) penalty_weight = default_penalty_weight(x, y);

    const QuboProblem problem = build_qubo(x, y, k, alpha, penalty_weight);
    const QuboSolution sol = anneal(problem, schedule);

    // Relevance magnitude per feature: |q_ii| minus the uniform penalty shift.
    const double diag_shift = penalty_weight * (1.0 - 2.0 * static_cast<double>(k));
    std::vector<double> relevance(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        relevance[static_cast<std::size_t>(i)] = std::abs(problem.coeff(i, i) - diag_shift);
    }

    std::vector<int> selected, unselected;
    for (int i = 0; i < n; ++i) {
        (sol.bits[static_cast<std::size_t>(i)] ? selected : unselected).push_back(i);
    }
    const auto by_relevance = [&](int a, int b) {
        const double ra = relevance[static_cast<std::size_t>(a)];
        const double rb = relevance[static_cast<std::size_t>(b)];
        if (ra != rb) return ra > rb;
        return a < b;
    };
    std::sort(selected.begin(), selected.end(), by_relevance);
    std::sort(unselected.begin(), unselected.end(), by_relevance);

    if (static_cast<int>(selected.size()) > k) {
        selected.resize(static_cast<std::size_t>(k));
    } else {
        for (int i : unselected) {
            if (static_cast<int>(selected.size()) == k) break;
            selected.push_back(i);
        }
        std::sort(selected.begin(), selected.end(), by_relevance);
    }

    FeatureSelection sel;
    sel.method = SelectionMethod::qubo;
    sel.requested_k = k;
    sel.exact_count = true;
    sel.indices = selected;
    for (int i : selected) sel.scores.push_back(relevance[static_cast<std::size_t>(i)]);
    return sel;
}

std::string selection_to_json(const FeatureSelection& sel,
                              const std::vector<std::string>& feature_ids) {
    nlohmann::json j;
    j["method"] = to_string(sel.method);
    j["requested_k"] = sel.requested_k;
    j["exact_count"] = sel.exact_count;
    j["indices"] = sel.indices;
    j["scores"] = sel.scores;
    std::vector<std::string> ids;
    for (int i : sel.indices) {
        if (i < 0 || i >= static_cast<int>(feature_ids.size())) {
            throw Error("selection_to_json: index out of range of feature ids");
        }
        ids.push_back(feature_ids[static_cast<std::size_t>(i)]);
    }
    j["feature_ids"] = ids;
    if (sel.method == SelectionMethod::lasso) {
        j["parameters"] = {{"lambda", sel.lasso_lambda}};
    }
    return j.dump(2);
}

} // namespace eqa
