#include "merkle_falsify/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <string>
#include <thread>

#include "merkle_falsify/errors.hpp"
#include "merkle_falsify/merkle.hpp"

namespace merkle_falsify {

namespace mp = boost::multiprecision;

namespace {

// Per-experiment state: siblings, base datum and (ideal oracle) one oracle
// for the leaf level plus one per path level.
class PathDraw {
 public:
  PathDraw(const ExperimentConfig& config, SimulationRng& rng)
      : config_(config), spec_(config.hash_spec()), rng_(rng) {
    if (config.oracle_kind == HashAlgorithm::kIdealOracle) oracles_.resize(config.path_len + 1);
  }

  void redraw() {
    siblings_.clear();
    for (std::uint64_t j = 0; j < config_.path_len; ++j) {
      siblings_.push_back(random_digest(rng_, config_.bits));
    }
    base_ = random_alphanumeric(rng_, config_.data_length);
    for (OracleState& oracle : oracles_) oracle.reseed(rng_());
  }

  const Bytes& base() const { return base_; }

  Digest root_for(const Bytes& data) {
    if (oracles_.empty()) return fold_path(hash_bytes(data, spec_), siblings_, spec_);
    const std::span<OracleState> levels(oracles_);
    return fold_path(hash_bytes(data, spec_, &levels[0]), siblings_, spec_, levels.subspan(1));
  }

  Bytes substitute() {
    Bytes data;
    do {
      data = random_alphanumeric(rng_, config_.data_length);
    } while (data == base_);
    return data;
  }

 private:
  const ExperimentConfig& config_;
  HashSpec spec_;
  SimulationRng& rng_;
  std::vector<Digest> siblings_;
  Bytes base_;
  std::vector<OracleState> oracles_;
};

template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

}  // namespace

std::string_view to_string(PathScope scope) {
  return scope == PathScope::kPerTrial ? "trial" : "experiment";
}

void ExperimentConfig::validate() const {
  (void)hash_spec();
  if (trials_per_experiment < 1) throw ConfigError("trials per experiment must be at least 1");
  if (num_experiments < 1) throw ConfigError("number of experiments must be at least 1");
  if (data_length < 1) throw ConfigError("data length must be at least 1");
}

std::uint64_t derive_cell_seed(std::uint64_t master_seed, unsigned bits, std::uint64_t path_len,
                               std::uint64_t experiment_index) {
  const std::string label = "seed:" + std::to_string(master_seed) + ":" + std::to_string(bits) +
                            ":" + std::to_string(path_len) + ":" +
                            std::to_string(experiment_index);
  const auto digest = sha256(as_bytes(label));
  std::uint64_t seed = 0;
  for (std::size_t i = 24; i < 32; ++i) seed = seed << 8 | digest[i];
  return seed;
}

std::uint64_t uniform_below(SimulationRng& rng, std::uint64_t bound) {
  // 2^64 mod bound: values below it would bias the modulo.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = rng();
    if (x >= threshold) return x % bound;
  }
}

Digest random_digest(SimulationRng& rng, unsigned bits) {
  Bytes bytes((bits + 7) / 8);
  for (std::size_t i = 0; i < bytes.size(); i += 8) {
    const std::uint64_t word = rng();
    for (std::size_t k = 0; k < 8 && i + k < bytes.size(); ++k) {
      bytes[i + k] = static_cast<std::uint8_t>(word >> (56 - 8 * k));
    }
  }
  return Digest::Truncate(bytes, bits);
}

Bytes random_alphanumeric(SimulationRng& rng, std::size_t length) {
  Bytes out(length);
  for (auto& c : out) c = static_cast<std::uint8_t>(kAlphanumeric[uniform_below(rng, kAlphanumeric.size())]);
  return out;
}

std::uint64_t run_experiment(const ExperimentConfig& config, std::uint64_t experiment_index) {
  config.validate();
  SimulationRng rng(
      derive_cell_seed(config.master_seed, config.bits, config.path_len, experiment_index));
  PathDraw path(config, rng);

  std::uint64_t matches = 0;
  if (config.path_scope == PathScope::kPerExperiment) {
    path.redraw();
    const Digest original = path.root_for(path.base());
    for (std::uint64_t t = 0; t < config.trials_per_experiment; ++t) {
      if (path.root_for(path.substitute()) == original) ++matches;
    }
  } else {
    for (std::uint64_t t = 0; t < config.trials_per_experiment; ++t) {
      path.redraw();
      const Digest original = path.root_for(path.base());
      if (path.root_for(path.substitute()) == original) ++matches;
    }
  }
  return matches;
}

CellResult summarize_cell(const ExperimentConfig& config, std::uint64_t matches) {
  CellResult cell;
  cell.config = config;
  cell.matches = matches;
  cell.total_trials = config.total_trials();

  const PathParams params(config.bits, config.path_len);
  const Real n(cell.total_trials);
  cell.exact_p = exact_falsification_prob(params).value;
  cell.empirical_p = Real(matches) / n;
  // 1 - exact_p without cancellation when exact_p is within 1e-100 of 1.
  const Real survival = exact_complement_prob(params);
  cell.std_error = mp::sqrt(cell.exact_p * survival / n);
  const Real empirical_miss = Real(cell.total_trials - matches) / n;
  cell.z_score = cell.std_error == 0 ? Real(0) : (survival - empirical_miss) / cell.std_error;
  return cell;
}

CellResult run_cell(const ExperimentConfig& config, unsigned workers) {
  return run_grid(std::span(&config, 1), workers).cells.front();
}

SimulationReport run_grid(std::span<const ExperimentConfig> configs, unsigned workers) {
  if (configs.empty()) throw UsageError("simulation grid is empty");
  for (const auto& config : configs) config.validate();
  const auto start = std::chrono::steady_clock::now();

  struct Task {
    std::size_t cell;
    std::uint64_t experiment;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    for (std::uint64_t e = 0; e < configs[c].num_experiments; ++e) tasks.push_back({c, e});
  }
  std::vector<std::uint64_t> counts(tasks.size());
  parallel_for(tasks.size(), workers, [&](std::size_t i) {
    counts[i] = run_experiment(configs[tasks[i].cell], tasks[i].experiment);
  });

  SimulationReport report;
  report.master_seed = configs.front().master_seed;
  std::vector<std::uint64_t> matches(configs.size(), 0);
  for (std::size_t i = 0; i < tasks.size(); ++i) matches[tasks[i].cell] += counts[i];
  for (std::size_t c = 0; c < configs.size(); ++c) {
    report.cells.push_back(summarize_cell(configs[c], matches[c]));
  }
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace merkle_falsify
