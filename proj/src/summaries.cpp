#include "bmr/summaries.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace bmr {

namespace {

void check_pool(const std::vector<Chain>& chains, const char* who) {
  if (chains.empty())
    throw std::invalid_argument(std::string(who) + ": no chains");
  for (const auto& c : chains) {
    if (c.draws.empty())
      throw std::invalid_argument(std::string(who) + ": empty chain");
    if (c.param_names != chains.front().param_names)
      throw std::invalid_argument(std::string(who) +
                                  ": chains have different parameter layouts");
  }
}

std::vector<double> pooled_component(const std::vector<Chain>& chains,
                                     std::size_t j) {
  std::vector<double> x;
  for (const auto& c : chains)
    for (const auto& d : c.draws) x.push_back(d[static_cast<Eigen::Index>(j)]);
  return x;
}

// best window plus the ambiguity probe over far-away start indices
struct HpdScan {
  double lo, hi;
  bool ambiguous;
};

HpdScan hpd_scan(std::vector<double>& x, double prob) {
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  std::size_t m = static_cast<std::size_t>(
      std::ceil(prob * static_cast<double>(n)));
  m = std::min(std::max<std::size_t>(m, 1), n);
  const std::size_t slack = n - m;
  std::size_t best = 0;
  double best_w = x[m - 1] - x[0];
  for (std::size_t i = 1; i <= slack; ++i) {
    const double w = x[i + m - 1] - x[i];
    if (w < best_w) {
      best_w = w;
      best = i;
    }
  }
  bool ambiguous = false;
  if (slack > 0 && best_w > 0.0) {
    for (std::size_t i = 0; i <= slack; ++i) {
      if ((i > best ? i - best : best - i) < (slack + 1) / 2) continue;
      if (x[i + m - 1] - x[i] <= 1.1 * best_w) {
        ambiguous = true;
        break;
      }
    }
  }
  return {x[best], x[best + m - 1], ambiguous};
}

}  // namespace

std::pair<double, double> hpd_interval(std::vector<double> draws,
                                       double prob) {
  if (draws.empty()) throw std::invalid_argument("hpd_interval: no draws");
  const HpdScan scan = hpd_scan(draws, prob);
  return {scan.lo, scan.hi};
}

std::vector<ParamSummary> posterior_summary(const std::vector<Chain>& chains) {
  check_pool(chains, "posterior_summary");
  const auto& names = chains.front().param_names;
  std::vector<ParamSummary> out(names.size());
  for (std::size_t j = 0; j < names.size(); ++j) {
    std::vector<double> x = pooled_component(chains, j);
    // moments over the sorted pool so concatenation order cannot perturb
    // the summation
    std::sort(x.begin(), x.end());
    ParamSummary& s = out[j];
    s.name = names[j];
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    s.mean = mean;
    s.sd = x.size() > 1
               ? std::sqrt(ss / static_cast<double>(x.size() - 1))
               : 0.0;
    const HpdScan scan = hpd_scan(x, 0.95);
    s.hpd_lo = scan.lo;
    s.hpd_hi = scan.hi;
    s.hpd_ambiguous = scan.ambiguous;
  }
  return out;
}

Eigen::MatrixXd chain_covariance(const std::vector<Chain>& chains) {
  check_pool(chains, "chain_covariance");
  const std::size_t p = chains.front().param_names.size();
  std::size_t n = 0;
  for (const auto& c : chains) n += c.draws.size();
  if (n < 2) throw std::invalid_argument("chain_covariance: needs >= 2 draws");

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
  for (const auto& c : chains)
    for (const auto& d : c.draws) mean += d;
  mean /= static_cast<double>(n);

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p, p);
  for (const auto& c : chains)
    for (const auto& d : c.draws) {
      const Eigen::VectorXd z = d - mean;
      cov += z * z.transpose();
    }
  return cov / static_cast<double>(n - 1);
}

Eigen::MatrixXd scaled_inverse_cov(const std::vector<Chain>& chains) {
  std::size_t n = 0;
  for (const auto& c : chains) n += c.draws.size();
  return static_cast<double>(n) * chain_covariance(chains);
}

SummaryReport summarize_chains(const std::vector<Chain>& chains,
                               const std::string& method, std::uint64_t seed) {
  check_pool(chains, "summarize_chains");
  SummaryReport rep;
  rep.params = posterior_summary(chains);
  rep.method = method;
  rep.seed = seed;
  rep.n_chains = chains.size();
  for (const auto& c : chains) rep.acceptance.push_back(move_rate(c));

  rep.diagnostics_valid = true;
  for (const auto& c : chains)
    if (c.draws.size() < 100) rep.diagnostics_valid = false;
  const std::size_t p = chains.front().param_names.size();
  if (rep.diagnostics_valid) {
    rep.ess.resize(p, 0.0);
    rep.geweke.resize(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
      for (const auto& c : chains) {
        rep.ess[j] += effective_sample_size(c, j);
        rep.geweke[j] = std::max(rep.geweke[j], std::abs(geweke_z(c, j)));
      }
    }
  }
  return rep;
}

std::string summary_json(const SummaryReport& report) {
  nlohmann::ordered_json j;
  j["params"] = nlohmann::ordered_json::array();
  for (const auto& s : report.params) {
    nlohmann::ordered_json p;
    p["name"] = s.name;
    p["mean"] = s.mean;
    p["sd"] = s.sd;
    p["hpd95"] = {s.hpd_lo, s.hpd_hi};
    j["params"].push_back(std::move(p));
  }
  j["acceptance"] = report.acceptance;
  if (report.diagnostics_valid) {
    j["ess"] = report.ess;
    j["geweke_z"] = report.geweke;
  } else {
    j["ess"] = nullptr;
    j["geweke_z"] = nullptr;
  }
  j["seed"] = report.seed;
  j["method"] = report.method;
  j["n_chains"] = report.n_chains;
  return j.dump(2) + "\n";
}

std::string summary_table(const SummaryReport& report) {
  std::ostringstream out;
  out << "method: " << report.method << "   chains: " << report.n_chains
      << "   seed: " << report.seed << "\n";
  out << std::left << std::setw(16) << "param" << std::right << std::setw(12)
      << "mean" << std::setw(12) << "sd" << std::setw(22) << "95% HPD"
      << "\n";
  for (const auto& s : report.params) {
    std::ostringstream hpd;
    hpd << "(" << std::setprecision(4) << s.hpd_lo << ", " << s.hpd_hi << ")";
    out << std::left << std::setw(16) << s.name << std::right << std::fixed
        << std::setprecision(4) << std::setw(12) << s.mean << std::setw(12)
        << s.sd << std::setw(22) << hpd.str();
    out.unsetf(std::ios_base::floatfield);
    if (s.hpd_ambiguous) out << "  [ambiguous]";
    out << "\n";
  }
  return out.str();
}

}  // namespace bmr
