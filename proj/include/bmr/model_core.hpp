#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace bmr {

// Regression sample: response y (length n) and full-column-rank design X
// (n x p). When the design carries an intercept it is the first column,
// named "intercept".
struct Dataset {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  std::vector<std::string> column_names;

  Eigen::Index n() const { return y.size(); }
  Eigen::Index p() const { return X.cols(); }
};

// Validates n >= p >= 1, finite entries and full column rank.
// Throws std::invalid_argument naming the violated condition.
Dataset make_dataset(Eigen::VectorXd y, Eigen::MatrixXd X,
                     std::vector<std::string> column_names);

// Returns a copy with a leading all-ones "intercept" column.
Dataset with_intercept(const Dataset& data);

// CSV with a header row, comma separated, no quoting. The response column
// is selected by name; remaining columns become covariates in file order.
Dataset load_dataset_csv(const std::string& path, const std::string& response,
                         bool add_intercept);

// Writes `y,<covariates...>` rows; an intercept column is not written.
void save_dataset_csv(const Dataset& data, const std::string& path);

struct ModeParams {
  Eigen::VectorXd beta;
  double sigma = 0.0;  // window half-width, > 0
};

// Step loss I[|z - mu| / sigma >= 1]; the boundary counts as loss.
int step_loss(double z, double mu, double sigma);

// #{i : |y_i - x_i'beta| <= sigma}; the boundary counts as captured.
int indicator_count(const ModeParams& params, const Dataset& data);

// Working log likelihood  count(beta, sigma) - n log(2 sigma).
// Maximizing over beta at fixed sigma recovers the max-captures estimator.
double mode_working_loglik(const ModeParams& params, const Dataset& data);

struct GridAxis {
  double lo;
  double hi;
  double step;
};

struct GridSpec {
  std::vector<GridAxis> axes;             // one per coefficient
  std::size_t max_points = 20'000'000;    // total Cartesian size cap
};

// Exhaustive capture-count maximization over the Cartesian grid. Ties are
// broken by the lexicographically smallest coordinate vector. Throws when
// the grid exceeds grid.max_points (the message names the cap).
Eigen::VectorXd lee_grid_estimate(const Dataset& data, double sigma,
                                  const GridSpec& grid);

// (1/n) sum_i I(|y_i - x_i'beta| <= sigma) x_i x_i'.
Eigen::MatrixXd fisher_info_estimate(const ModeParams& params,
                                     const Dataset& data);

// Least squares via a column-pivoted QR solve; used for chain
// initialization and proposal scaling only.
Eigen::VectorXd ols_init(const Dataset& data);

}  // namespace bmr
