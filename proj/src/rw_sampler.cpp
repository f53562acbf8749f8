#include "bmr/rw_sampler.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "bmr/format.hpp"

namespace bmr {

namespace {

std::uint64_t hash_mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::uint64_t hash_config(const SamplerConfig& c) {
  std::uint64_t h = 0x811c9dc5;
  h = hash_mix(h, c.n_burnin);
  h = hash_mix(h, c.n_keep);
  h = hash_mix(h, static_cast<std::uint64_t>(c.init.size()));
  auto mix_d = [&h](double x) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(x));
    std::memcpy(&bits, &x, sizeof(bits));
    h = hash_mix(h, bits);
  };
  for (Eigen::Index i = 0; i < c.init.size(); ++i) mix_d(c.init[i]);
  for (Eigen::Index i = 0; i < c.initial_scales.size(); ++i)
    mix_d(c.initial_scales[i]);
  mix_d(c.target_acceptance);
  h = hash_mix(h, c.adapt_interval);
  mix_d(c.adapt_factor);
  h = hash_mix(h, c.joint_update ? 1 : 0);
  return h;
}

bool mh_accept(double delta, Rng& rng) {
  if (!std::isfinite(delta)) return false;  // -inf or nan proposal: reject
  if (delta >= 0.0) return true;
  return std::log(1.0 - rng.uniform()) < delta;
}

}  // namespace

Chain run_chain(const LogTarget& log_target, const SamplerConfig& config,
                Rng& rng) {
  const Eigen::Index dim = config.init.size();
  if (dim < 1) throw std::invalid_argument("run_chain: empty init");
  if (config.initial_scales.size() != dim)
    throw std::invalid_argument("run_chain: scales length differs from init");
  if (config.n_keep < 1)
    throw std::invalid_argument("run_chain: n_keep must be >= 1");

  Eigen::VectorXd state = config.init;
  double lt = log_target(state);
  if (!std::isfinite(lt))
    throw std::runtime_error(
        "run_chain: log target is not finite at the initial state");

  const std::size_t n_comp = config.joint_update ? 1 : dim;
  std::vector<AdaptiveScale> tuner(n_comp);
  for (std::size_t j = 0; j < n_comp; ++j) {
    tuner[j].scale = config.initial_scales[config.joint_update ? 0 : j];
    tuner[j].target = config.target_acceptance;
    tuner[j].factor = config.adapt_factor;
    tuner[j].interval = config.adapt_interval;
  }

  Chain chain;
  chain.seed = rng.seed();
  chain.config_hash = hash_config(config);
  chain.n_burnin = config.n_burnin;
  chain.n_keep = config.n_keep;
  chain.draws.reserve(config.n_keep);
  chain.log_target.reserve(config.n_keep);

  std::vector<std::size_t> kept_props(n_comp, 0), kept_accs(n_comp, 0);
  Eigen::VectorXd proposal = state;

  const std::size_t total = config.n_burnin + config.n_keep;
  for (std::size_t iter = 0; iter < total; ++iter) {
    const bool burnin = iter < config.n_burnin;
    if (config.joint_update) {
      proposal = state;
      for (Eigen::Index j = 0; j < dim; ++j)
        proposal[j] += config.initial_scales[j] / config.initial_scales[0] *
                       tuner[0].scale * rng.normal();
      const double lt_prop = log_target(proposal);
      const bool acc = mh_accept(lt_prop - lt, rng);
      if (acc) {
        state = proposal;
        lt = lt_prop;
      }
      if (burnin)
        tuner[0].record(acc);
      else {
        ++kept_props[0];
        if (acc) ++kept_accs[0];
      }
    } else {
      for (Eigen::Index j = 0; j < dim; ++j) {
        proposal = state;
        proposal[j] += tuner[j].scale * rng.normal();
        const double lt_prop = log_target(proposal);
        const bool acc = mh_accept(lt_prop - lt, rng);
        if (acc) {
          state = proposal;
          lt = lt_prop;
        }
        if (burnin)
          tuner[j].record(acc);
        else {
          ++kept_props[j];
          if (acc) ++kept_accs[j];
        }
      }
    }
    if (!burnin) {
      chain.draws.push_back(state);
      chain.log_target.push_back(lt);
    }
  }

  chain.acceptance_rates.resize(n_comp);
  chain.proposal_scales.resize(n_comp);
  for (std::size_t j = 0; j < n_comp; ++j) {
    chain.acceptance_rates[j] =
        kept_props[j] == 0 ? 0.0
                           : static_cast<double>(kept_accs[j]) /
                                 static_cast<double>(kept_props[j]);
    chain.proposal_scales[j] = tuner[j].scale;
  }
  chain.param_names.resize(dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    chain.param_names[j] = "p" + std::to_string(j);
  return chain;
}

namespace {

void check_series(const Chain& chain, std::size_t component, const char* who) {
  if (chain.draws.size() < 100)
    throw std::invalid_argument(std::string(who) +
                                ": needs at least 100 kept draws");
  if (component >= static_cast<std::size_t>(chain.draws.front().size()))
    throw std::invalid_argument(std::string(who) + ": component out of range");
}

std::vector<double> component_series(const Chain& chain,
                                     std::size_t component) {
  std::vector<double> x(chain.draws.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = chain.draws[i][static_cast<Eigen::Index>(component)];
  return x;
}

void mean_var(const double* x, std::size_t n, double& mean, double& var) {
  mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += x[i];
  mean /= static_cast<double>(n);
  var = 0.0;
  for (std::size_t i = 0; i < n; ++i) var += (x[i] - mean) * (x[i] - mean);
  var = n > 1 ? var / static_cast<double>(n - 1) : 0.0;
}

}  // namespace

double geweke_z(const Chain& chain, std::size_t component) {
  check_series(chain, component, "geweke_z");
  const std::vector<double> x = component_series(chain, component);
  const std::size_t n = x.size();
  const std::size_t na = std::max<std::size_t>(1, n / 10);
  const std::size_t nb = n / 2;
  double ma, va, mb, vb;
  mean_var(x.data(), na, ma, va);
  mean_var(x.data() + (n - nb), nb, mb, vb);
  const double denom = va / static_cast<double>(na) +
                       vb / static_cast<double>(nb);
  if (denom <= 0.0) return 0.0;
  return (ma - mb) / std::sqrt(denom);
}

double effective_sample_size(const Chain& chain, std::size_t component) {
  check_series(chain, component, "effective_sample_size");
  const std::vector<double> x = component_series(chain, component);
  const std::size_t n = x.size();
  double mean, var;
  mean_var(x.data(), n, mean, var);
  if (var <= 0.0) return static_cast<double>(n);

  auto gamma_at = [&](std::size_t t) {
    double s = 0.0;
    for (std::size_t i = 0; i + t < n; ++i)
      s += (x[i] - mean) * (x[i + t] - mean);
    return s / static_cast<double>(n);
  };
  const double g0 = gamma_at(0);
  double tau = 1.0;
  for (std::size_t t = 1; t + 1 < n; t += 2) {
    const double pair = (gamma_at(t) + gamma_at(t + 1)) / g0;
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  const double ess = static_cast<double>(n) / tau;
  return std::min(std::max(ess, 1e-12), static_cast<double>(n));
}

double move_rate(const Chain& chain) {
  if (chain.draws.size() < 2) return 0.0;
  std::size_t moved = 0;
  for (std::size_t i = 1; i < chain.draws.size(); ++i)
    if (chain.draws[i] != chain.draws[i - 1]) ++moved;
  return static_cast<double>(moved) /
         static_cast<double>(chain.draws.size() - 1);
}

void write_chain_csv(const Chain& chain, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "iter";
  for (const auto& name : chain.param_names) out << ',' << name;
  out << ",log_target\n";
  for (std::size_t i = 0; i < chain.draws.size(); ++i) {
    out << i;
    for (Eigen::Index j = 0; j < chain.draws[i].size(); ++j)
      out << ',' << format_double(chain.draws[i][j]);
    out << ',' << format_double(chain.log_target[i]) << '\n';
  }
}

Chain read_chain_csv(const std::string& path) {
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
  if (header.size() < 3 || header.front() != "iter" ||
      header.back() != "log_target")
    throw std::runtime_error(path + ": not a chain dump (bad header)");

  Chain chain;
  chain.param_names.assign(header.begin() + 1, header.end() - 1);
  const std::size_t dim = chain.param_names.size();
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    if (vals.size() != dim + 2)
      throw std::runtime_error(path + ": row with wrong field count");
    Eigen::VectorXd draw(dim);
    for (std::size_t j = 0; j < dim; ++j)
      draw[static_cast<Eigen::Index>(j)] = vals[j + 1];
    chain.draws.push_back(std::move(draw));
    chain.log_target.push_back(vals.back());
  }
  if (chain.draws.empty())
    throw std::runtime_error(path + ": chain dump has no rows");
  chain.n_keep = chain.draws.size();
  return chain;
}

}  // namespace bmr
