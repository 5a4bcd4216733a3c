#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace eqa {

enum class SelectionMethod { lasso, qubo };

std::string to_string(SelectionMethod m);
SelectionMethod selection_method_from_string(const std::string& s);

/// Selected feature columns, ordered by descending importance score.
struct FeatureSelection {
    std::vector<int> indices;
    std::vector<double> scores; // non-increasing, same length as indices
    SelectionMethod method = SelectionMethod::lasso;
    int requested_k = 0;
    bool exact_count = true; // false when requested_k could not be hit
    double lasso_lambda = 0.0;
};

/// Centers each column and scales it to unit population variance.
/// Zero-variance columns become all-zero.
Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& x);

/// Minimizes (1/2m)*||y - X*beta||^2 + lambda*||beta||_1 by cyclic coordinate
/// descent with soft thresholding. Columns are standardized internally;
/// converged when the largest coefficient change drops below 1e-7 (at most
/// 10000 cycles).
Eigen::VectorXd lasso_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda);

/// Bisects lambda over [1e-6, lambda_max] until exactly k coefficients are
/// nonzero, or returns the closest achievable count with exact_count=false.
FeatureSelection lasso_select_k(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int k);

/// Upper-triangular QUBO coefficients stored as a flat triangle so that
/// full-genome instances (n ~ 7000) fit in memory.
class QuboProblem {
public:
    QuboProblem(int n, int cardinality, double penalty_weight, double redundancy_weight);

    int size() const { return n_; }
    int cardinality() const { return cardinality_; }
    double penalty_weight() const { return penalty_weight_; }
    double redundancy_weight() const { return redundancy_weight_; }

    /// q[i][j] for i <= j; entries below the diagonal are identically zero.
    double coeff(int i, int j) const;
    void set_coeff(int i, int j, double v);

private:
    std::size_t flat_index(int i, int j) const;

    int n_;
    int cardinality_;
    double penalty_weight_;
    double redundancy_weight_;
    std::vector<double> upper_; // row-major flattened upper triangle
};

/// Relevance/redundancy construction: expanding
///   -sum_i |r_iy| x_i + alpha * sum_{i<j} |r_ij| x_i x_j
///   + penalty_weight * (sum_i x_i - k)^2
/// and dropping the constant k^2 gives
///   q[i][i] = -|r_iy| + penalty_weight*(1 - 2k),
///   q[i][j] = alpha*|r_ij| + 2*penalty_weight  (i < j),
/// with r the Pearson correlations (0 for zero-variance features).
QuboProblem build_qubo(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int k, double alpha,
                       double penalty_weight);

/// E = sum_{i<=j} q[i][j]*bits[i]*bits[j].
double qubo_energy(const QuboProblem& p, const std::vector<std::uint8_t>& bits);

struct AnnealSchedule {
    double t_start = 10.0;
    double t_end = 0.01;
    int sweeps = 2000;
    int restarts = 8;
    std::uint64_t seed = 0;
};

struct QuboSolution {
    std::vector<std::uint8_t> bits;
    double energy = 0.0;
};

/// Single-bit-flip Metropolis annealing, geometric temperature decay over
/// `sweeps` passes, best state over `restarts` independent runs. Each restart
/// derives its own RNG stream from (seed, restart index). The returned energy
/// is recomputed with qubo_energy, so it matches the bits exactly.
QuboSolution anneal(const QuboProblem& p, const AnnealSchedule& schedule);

/// Global minimum by Gray-code enumeration; refuses n > 24. Ties break toward
/// the lowest binary value (bit i weighted 2^i).
QuboSolution exhaustive_solve(const QuboProblem& p);

/// Default penalty that makes the cardinality term dominate any single-bit
/// relevance gain: 2 * max_i |r_iy|.
double default_penalty_weight(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// Builds the QUBO, anneals it, and coerces the result to exactly k features
/// (trim or pad by relevance). Scores are the relevance magnitudes |r_iy|.
FeatureSelection qubo_select_k(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int k,
                               const AnnealSchedule& schedule, double alpha = 0.5,
                               double penalty_weight = 0.0 /* 0 = auto */);

/// JSON document for a selection (External interface).
std::string selection_to_json(const FeatureSelection& sel,
                              const std::vector<std::string>& feature_ids);

} // namespace eqa
