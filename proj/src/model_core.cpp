#include "bmr/model_core.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bmr/format.hpp"

namespace bmr {

namespace {

void check_dims(const ModeParams& params, const Dataset& data,
                const char* who) {
  if (params.beta.size() != data.X.cols())
    throw std::invalid_argument(std::string(who) +
                                ": beta length does not match design columns");
  if (data.y.size() != data.X.rows())
    throw std::invalid_argument(std::string(who) +
                                ": y length does not match design rows");
}

void check_sigma(double sigma, const char* who) {
  if (!(sigma > 0.0))
    throw std::domain_error(std::string(who) + ": sigma must be > 0");
}

}  // namespace

Dataset make_dataset(Eigen::VectorXd y, Eigen::MatrixXd X,
                     std::vector<std::string> column_names) {
  const Eigen::Index n = y.size();
  const Eigen::Index p = X.cols();
  if (X.rows() != n)
    throw std::invalid_argument("dataset: y length differs from design rows");
  if (p < 1) throw std::invalid_argument("dataset: design needs p >= 1");
  if (n < p) throw std::invalid_argument("dataset: needs n >= p");
  if (static_cast<Eigen::Index>(column_names.size()) != p)
    throw std::invalid_argument("dataset: column_names length differs from p");
  if (!y.allFinite() || !X.allFinite())
    throw std::invalid_argument("dataset: non-finite entries");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < p)
    throw std::invalid_argument("dataset: design matrix is rank deficient");
  return Dataset{std::move(y), std::move(X), std::move(column_names)};
}

Dataset with_intercept(const Dataset& data) {
  Eigen::MatrixXd X(data.X.rows(), data.X.cols() + 1);
  X.col(0).setOnes();
  X.rightCols(data.X.cols()) = data.X;
  std::vector<std::string> names;
  names.reserve(data.column_names.size() + 1);
  names.emplace_back("intercept");
  names.insert(names.end(), data.column_names.begin(),
               data.column_names.end());
  return make_dataset(data.y, std::move(X), std::move(names));
}

Dataset load_dataset_csv(const std::string& path, const std::string& response,
                         bool add_intercept) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) header.push_back(tok);
  }
  int y_col = -1;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == response) y_col = static_cast<int>(j);
  if (y_col < 0)
    throw std::runtime_error(path + ": no column named '" + response + "'");

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      std::size_t used = 0;
      double v;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        throw std::runtime_error(path + ": cannot parse value '" + tok + "'");
      }
      if (used != tok.size())
        throw std::runtime_error(path + ": cannot parse value '" + tok + "'");
      row.push_back(v);
    }
    if (row.size() != header.size())
      throw std::runtime_error(path + ": row with wrong field count");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path + ": no data rows");

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index k = static_cast<Eigen::Index>(header.size()) - 1;
  Eigen::VectorXd y(n);
  Eigen::MatrixXd X(n, k);
  std::vector<std::string> names;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (static_cast<int>(j) != y_col) names.push_back(header[j]);
  for (Eigen::Index i = 0; i < n; ++i) {
    y[i] = rows[i][y_col];
    Eigen::Index c = 0;
    for (std::size_t j = 0; j < header.size(); ++j)
      if (static_cast<int>(j) != y_col) X(i, c++) = rows[i][j];
  }
  Dataset ds = (k == 0 && add_intercept)
                   ? Dataset{std::move(y), Eigen::MatrixXd(n, 0), {}}
                   : make_dataset(std::move(y), std::move(X), std::move(names));
  if (k == 0 && add_intercept) {
    // response-only file: the design is just the intercept
    Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(n, 1);
    return make_dataset(std::move(ds.y), std::move(ones), {"intercept"});
  }
  if (k == 0)
    throw std::runtime_error(path + ": no covariate columns and no intercept");
  return add_intercept ? with_intercept(ds) : ds;
}

void save_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "y";
  for (Eigen::Index j = 0; j < data.p(); ++j) {
    if (data.column_names[j] == "intercept") continue;
    out << ',' << data.column_names[j];
  }
  out << '\n';
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out << format_double(data.y[i]);
    for (Eigen::Index j = 0; j < data.p(); ++j) {
      if (data.column_names[j] == "intercept") continue;
      out << ',' << format_double(data.X(i, j));
    }
    out << '\n';
  }
}

int step_loss(double z, double mu, double sigma) {
  check_sigma(sigma, "step_loss");
  return std::abs(z - mu) / sigma >= 1.0 ? 1 : 0;
}

int indicator_count(const ModeParams& params, const Dataset& data) {
  check_dims(params, data, "indicator_count");
  check_sigma(params.sigma, "indicator_count");
  const Eigen::VectorXd r = data.y - data.X * params.beta;
  int count = 0;
  for (Eigen::Index i = 0; i < r.size(); ++i)
    if (std::abs(r[i]) <= params.sigma) ++count;
  return count;
}

double mode_working_loglik(const ModeParams& params, const Dataset& data) {
  check_sigma(params.sigma, "mode_working_loglik");
  const int count = indicator_count(params, data);
  return static_cast<double>(count) -
         static_cast<double>(data.n()) * std::log(2.0 * params.sigma);
}

Eigen::VectorXd lee_grid_estimate(const Dataset& data, double sigma,
                                  const GridSpec& grid) {
  check_sigma(sigma, "lee_grid_estimate");
  const std::size_t p = static_cast<std::size_t>(data.p());
  if (grid.axes.size() != p)
    throw std::invalid_argument("lee_grid_estimate: one axis per coefficient");

  std::vector<std::size_t> npts(p);
  std::size_t total = 1;
  for (std::size_t j = 0; j < p; ++j) {
    const GridAxis& a = grid.axes[j];
    if (!std::isfinite(a.lo) || !std::isfinite(a.hi) || !(a.step > 0.0) ||
        a.hi < a.lo)
      throw std::invalid_argument("lee_grid_estimate: bad axis bounds");
    npts[j] = static_cast<std::size_t>(
                  std::floor((a.hi - a.lo) / a.step + 1e-9)) +
              1;
    if (npts[j] > grid.max_points / total)
      throw std::invalid_argument(
          "lee_grid_estimate: grid size exceeds cap of " +
          std::to_string(grid.max_points) + " points");
    total *= npts[j];
  }

  std::vector<std::size_t> idx(p, 0);
  Eigen::VectorXd beta(p);
  for (std::size_t j = 0; j < p; ++j) beta[j] = grid.axes[j].lo;

  Eigen::VectorXd best_beta = beta;
  int best_count = -1;
  ModeParams params{beta, sigma};
  for (std::size_t t = 0; t < total; ++t) {
    params.beta = beta;
    const int c = indicator_count(params, data);
    if (c > best_count) {
      best_count = c;
      best_beta = beta;
    }
    // lexicographic odometer, last axis fastest: the first maximum seen is
    // the lexicographically smallest maximizer
    for (std::size_t j = p; j-- > 0;) {
      if (++idx[j] < npts[j]) {
        beta[j] = grid.axes[j].lo +
                  static_cast<double>(idx[j]) * grid.axes[j].step;
        break;
      }
      idx[j] = 0;
      beta[j] = grid.axes[j].lo;
    }
  }
  return best_beta;
}

Eigen::MatrixXd fisher_info_estimate(const ModeParams& params,
                                     const Dataset& data) {
  check_dims(params, data, "fisher_info_estimate");
  check_sigma(params.sigma, "fisher_info_estimate");
  const Eigen::VectorXd r = data.y - data.X * params.beta;
  const Eigen::Index p = data.p();
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < data.n(); ++i)
    if (std::abs(r[i]) <= params.sigma)
      info += data.X.row(i).transpose() * data.X.row(i);
  return info / static_cast<double>(data.n());
}

Eigen::VectorXd ols_init(const Dataset& data) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(data.X);
  if (qr.rank() < data.p())
    throw std::runtime_error("ols_init: design matrix is rank deficient");
  return qr.solve(data.y);
}

}  // namespace bmr
