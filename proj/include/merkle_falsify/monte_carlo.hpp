#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "merkle_falsify/falsification.hpp"
#include "merkle_falsify/hashing.hpp"

namespace merkle_falsify {

// ASCII letters followed by digits (62 symbols).
inline constexpr std::string_view kAlphanumeric =
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

// Generator behind every simulated draw. Golden match counts in the tests
// depend on it; changing it means regenerating them.
using SimulationRng = std::mt19937_64;

// How long a drawn path (siblings + base datum) lives.
//   kPerTrial:      every trial draws its own path, base datum and (for the
//                   ideal oracle) fresh oracles, so trials are i.i.d. and the
//                   binomial standard error applies.
//   kPerExperiment: one path and base datum shared by all trials of an
//                   experiment. Trials are then correlated and the reported
//                   z-score understates the real spread.
enum class PathScope { kPerTrial, kPerExperiment };

std::string_view to_string(PathScope scope);

struct ExperimentConfig {
  unsigned bits = 8;
  std::uint64_t path_len = 10;
  std::uint64_t trials_per_experiment = 1000;
  std::uint64_t num_experiments = 100;
  std::size_t data_length = 16;
  HashAlgorithm oracle_kind = HashAlgorithm::kSha256Truncated;
  std::uint64_t master_seed = 0;
  PathScope path_scope = PathScope::kPerTrial;

  // Throws ConfigError.
  void validate() const;
  HashSpec hash_spec() const { return {oracle_kind, bits}; }
  std::uint64_t total_trials() const { return trials_per_experiment * num_experiments; }
};

struct CellResult {
  ExperimentConfig config;
  std::uint64_t matches = 0;
  std::uint64_t total_trials = 0;
  Real empirical_p;
  Real exact_p;
  // sqrt(exact_p (1 - exact_p) / total_trials)
  Real std_error;
  // (empirical_p - exact_p) / std_error, or 0 when std_error == 0.
  Real z_score;

  bool within_sigmas(double sigmas) const { return boost::multiprecision::abs(z_score) <= sigmas; }
};

struct SimulationReport {
  std::vector<CellResult> cells;
  std::uint64_t master_seed = 0;
  double wall_clock_seconds = 0;
};

// Low 64 bits (last eight bytes, big-endian) of
// SHA-256("seed:<master>:<bits>:<path_len>:<experiment_index>").
std::uint64_t derive_cell_seed(std::uint64_t master_seed, unsigned bits, std::uint64_t path_len,
                               std::uint64_t experiment_index);

// Uniform integer in [0, bound) by rejection; bound > 0.
std::uint64_t uniform_below(SimulationRng& rng, std::uint64_t bound);
// Uniform b-bit digest.
Digest random_digest(SimulationRng& rng, unsigned bits);
// `length` characters drawn uniformly from kAlphanumeric.
Bytes random_alphanumeric(SimulationRng& rng, std::size_t length);

// Number of trials in experiment `experiment_index` whose substituted datum
// reproduced the original root.
std::uint64_t run_experiment(const ExperimentConfig& config, std::uint64_t experiment_index);

// Sums all experiments of one cell and attaches the statistics.
CellResult run_cell(const ExperimentConfig& config, unsigned workers = 1);

// Runs every cell. Work is spread over `workers` threads per experiment;
// results depend only on the configs, never on scheduling.
SimulationReport run_grid(std::span<const ExperimentConfig> configs, unsigned workers = 1);

// Builds the statistics for an already-counted cell.
CellResult summarize_cell(const ExperimentConfig& config, std::uint64_t matches);

}  // namespace merkle_falsify
