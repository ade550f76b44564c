#include "merkle_falsify/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <system_error>

#include "merkle_falsify/errors.hpp"
#include "merkle_falsify/falsification.hpp"
#include "merkle_falsify/merkle.hpp"
#include "merkle_falsify/monte_carlo.hpp"
#include "merkle_falsify/report.hpp"

namespace merkle_falsify {

namespace {

constexpr double kAcceptSigmas = 5.0;
constexpr const char* kSeedEnv = "MERKLE_FALSIFY_SEED";

// Output that cannot be written; maps to kExitFailure.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file || !(file << text) || !file.flush()) throw IoError("cannot write " + path);
}

// Each line (without its '\n') is one block; a final empty line is ignored.
std::vector<Bytes> read_blocks(const std::string& path) {
  const std::string text = read_file(path);
  std::vector<Bytes> blocks;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    blocks.emplace_back(text.begin() + static_cast<std::ptrdiff_t>(start),
                        text.begin() + static_cast<std::ptrdiff_t>(end));
    start = end + 1;
  }
  if (blocks.empty()) throw UsageError(path + " contains no data blocks");
  return blocks;
}

std::uint64_t default_seed() {
  const char* env = std::getenv(kSeedEnv);
  if (env == nullptr || *env == '\0') return 0;
  std::uint64_t seed = 0;
  const std::string_view s(env);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw UsageError(std::string(kSeedEnv) + " is not an unsigned 64-bit integer");
  }
  return seed;
}

struct ProbOptions {
  std::string kind;
  unsigned bits = 0;
  std::uint64_t path_len = 0;
};

struct TableOptions {
  std::vector<unsigned> bits{std::begin(kDefaultTableBits), std::end(kDefaultTableBits)};
  std::vector<std::uint64_t> path_lens{std::begin(kDefaultTablePathLens),
                                       std::end(kDefaultTablePathLens)};
  std::string format = "csv";
  std::string output;
  std::string empirical;
};

struct SimulateOptions {
  std::vector<unsigned> bits{2, 4, 6, 8, 10};
  std::vector<std::uint64_t> path_lens{10, 100, 1000};
  std::uint64_t trials = 1000;
  std::uint64_t experiments = 100;
  std::optional<std::uint64_t> seed;
  std::string oracle = "sha256";
  unsigned workers = 1;
  std::size_t data_length = 16;
  std::string path_scope = "trial";
  std::string output;
};

struct MerkleOptions {
  std::string input;
  unsigned bits = 256;
  std::size_t index = 0;
  std::string output;
  std::string proof;
  std::string root;
  std::optional<std::string> data;
};

struct FigureCmdOptions {
  std::string input;
  std::string output;
};

int cmd_prob(const ProbOptions& o, std::ostream& out) {
  const PathParams params(o.bits, o.path_len);
  if (o.kind == "exact") {
    out << format_real(exact_falsification_prob(params).value) << "\n";
  } else if (o.kind == "approx") {
    out << format_real(approx_falsification_prob(params).value) << "\n";
  } else {
    out << format_real(approximation_error(params).abs_diff) << "\n";
  }
  return kExitOk;
}

int cmd_table(const TableOptions& o, std::ostream& out) {
  auto table = ReportTable::FromEstimates(diff_table(o.bits, o.path_lens));
  if (!o.empirical.empty()) table.attach_simulation(parse_simulation_csv(read_file(o.empirical)));
  write_output(o.output, o.format == "md" ? table.to_markdown() : table.to_csv(), out);
  return kExitOk;
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  const std::uint64_t seed = o.seed ? *o.seed : default_seed();
  std::vector<ExperimentConfig> configs;
  for (unsigned b : o.bits) {
    for (std::uint64_t m : o.path_lens) {
      ExperimentConfig c;
      c.bits = b;
      c.path_len = m;
      c.trials_per_experiment = o.trials;
      c.num_experiments = o.experiments;
      c.data_length = o.data_length;
      c.oracle_kind = o.oracle == "ideal" ? HashAlgorithm::kIdealOracle : HashAlgorithm::kSha256Truncated;
      c.master_seed = seed;
      c.path_scope = o.path_scope == "experiment" ? PathScope::kPerExperiment : PathScope::kPerTrial;
      configs.push_back(c);
    }
  }
  const SimulationReport report = run_grid(configs, o.workers);
  write_output(o.output, simulation_csv(report), out);

  // Keep stdout clean for the CSV when no output file was given.
  std::ostream& summary = o.output.empty() ? err : out;
  bool all_pass = true;
  for (const CellResult& c : report.cells) {
    const bool pass = c.within_sigmas(kAcceptSigmas);
    all_pass = all_pass && pass;
    summary << (pass ? "PASS" : "FAIL") << " b=" << c.config.bits << " m=" << c.config.path_len
            << " empirical=" << format_real(c.empirical_p, 8) << " exact=" << format_real(c.exact_p, 8)
            << " z=" << format_real(c.z_score, 4) << "\n";
  }
  summary << (all_pass ? "all cells" : "some cells") << (all_pass ? " within " : " outside ")
          << kAcceptSigmas << " sigma (seed " << seed << ", " << report.cells.size() << " cells, "
          << format_real(Real(report.wall_clock_seconds), 3) << " s)\n";
  return all_pass ? kExitOk : kExitFailure;
}

int cmd_merkle_build(const MerkleOptions& o, std::ostream& out) {
  const auto tree = build_tree(read_blocks(o.input), HashSpec::Sha256(o.bits));
  out << tree.root().hex() << "\n";
  return kExitOk;
}

int cmd_merkle_prove(const MerkleOptions& o, std::ostream& out) {
  const auto tree = build_tree(read_blocks(o.input), HashSpec::Sha256(o.bits));
  write_output(o.output, proof_to_json(generate_proof(tree, o.index)) + "\n", out);
  return kExitOk;
}

int cmd_merkle_verify(const MerkleOptions& o, std::ostream& out) {
  const MerkleProof proof = proof_from_json(read_file(o.proof));
  const HashSpec spec = HashSpec::Sha256(proof.bits);
  const Digest expected = Digest::FromHex(o.root, proof.bits);
  Bytes data;
  if (o.data) {
    data.assign(o.data->begin(), o.data->end());
  } else {
    const auto blocks = read_blocks(o.input);
    if (proof.leaf_index >= blocks.size()) {
      throw UsageError("proof leaf index " + std::to_string(proof.leaf_index) + " is beyond " + o.input);
    }
    data = blocks[proof.leaf_index];
  }
  const bool ok = verify_proof(data, proof, expected, spec);
  out << (ok ? "OK" : "MISMATCH") << "\n";
  return ok ? kExitOk : kExitFailure;
}

int cmd_figure(const FigureCmdOptions& o, std::ostream& out) {
  const auto rows = parse_simulation_csv(read_file(o.input));
  write_output(o.output, render_figure_svg(rows), out);
  return kExitOk;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Merkle-path falsification probabilities: exact and approximate formulas, "
               "Monte Carlo replay, and Merkle tree tooling"};
  app.name("merkle-falsify");
  app.require_subcommand(1);

  const auto positive = CLI::PositiveNumber;

  ProbOptions prob;
  auto* prob_cmd = app.add_subcommand("prob", "Print one probability at 17 significant digits");
  prob_cmd->add_option("kind", prob.kind, "exact | approx | diff")
      ->required()
      ->check(CLI::IsMember({"exact", "approx", "diff"}));
  prob_cmd->add_option("--bits", prob.bits, "hash length b in bits")->required()->check(positive);
  prob_cmd->add_option("--path-len", prob.path_len, "Merkle path length m")->required();

  TableOptions table;
  auto* table_cmd = app.add_subcommand("table", "Absolute difference between exact and approximate values");
  table_cmd->add_option("--bits", table.bits, "comma-separated b values")->delimiter(',')->check(positive);
  table_cmd->add_option("--path-lens", table.path_lens, "comma-separated m values")->delimiter(',');
  table_cmd->add_option("--format", table.format)->check(CLI::IsMember({"csv", "md"}));
  table_cmd->add_option("--output", table.output, "write here instead of stdout");
  table_cmd->add_option("--empirical", table.empirical, "simulation CSV to merge as extra columns");

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo replay of random leaf substitution");
  sim_cmd->add_option("--bits", sim.bits)->delimiter(',')->check(positive);
  sim_cmd->add_option("--path-lens", sim.path_lens)->delimiter(',');
  sim_cmd->add_option("--trials", sim.trials, "trials per experiment")->check(positive);
  sim_cmd->add_option("--experiments", sim.experiments, "experiments per cell")->check(positive);
  sim_cmd->add_option("--seed", sim.seed, std::string("master seed (default: $") + kSeedEnv + " or 0)");
  sim_cmd->add_option("--oracle", sim.oracle)->check(CLI::IsMember({"sha256", "ideal"}));
  sim_cmd->add_option("--workers", sim.workers)->check(positive);
  sim_cmd->add_option("--data-length", sim.data_length, "characters per random datum")->check(positive);
  sim_cmd->add_option("--path-scope", sim.path_scope, "redraw the path per trial or per experiment")
      ->check(CLI::IsMember({"trial", "experiment"}));
  sim_cmd->add_option("--output", sim.output, "CSV path (default stdout)");

  MerkleOptions merkle;
  auto* merkle_cmd = app.add_subcommand("merkle", "Build trees, produce and check inclusion proofs");
  merkle_cmd->require_subcommand(1);
  auto* build_cmd = merkle_cmd->add_subcommand("build", "Print the root of a line-per-block file");
  build_cmd->add_option("--input", merkle.input)->required();
  build_cmd->add_option("--bits", merkle.bits)->check(CLI::Range(1u, 256u));
  auto* prove_cmd = merkle_cmd->add_subcommand("prove", "Write the inclusion proof of one block");
  prove_cmd->add_option("--input", merkle.input)->required();
  prove_cmd->add_option("--index", merkle.index)->required();
  prove_cmd->add_option("--bits", merkle.bits)->check(CLI::Range(1u, 256u));
  prove_cmd->add_option("--output", merkle.output);
  auto* verify_cmd = merkle_cmd->add_subcommand("verify", "Check a block against a proof and root");
  verify_cmd->add_option("--proof", merkle.proof)->required();
  verify_cmd->add_option("--root", merkle.root, "expected root, hex")->required();
  auto* data_opt = verify_cmd->add_option("--data", merkle.data, "the data block itself");
  auto* input_opt = verify_cmd->add_option("--input", merkle.input, "line file; uses the proof's leaf index");
  data_opt->excludes(input_opt);
  verify_cmd->callback([&] {
    if (!merkle.data && merkle.input.empty()) throw CLI::ValidationError("verify needs --data or --input");
  });

  FigureCmdOptions figure;
  auto* figure_cmd = app.add_subcommand("figure", "Render a simulation CSV as an SVG chart");
  figure_cmd->add_option("--input", figure.input)->required();
  figure_cmd->add_option("--output", figure.output, "SVG path (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (prob_cmd->parsed()) return cmd_prob(prob, out);
    if (table_cmd->parsed()) return cmd_table(table, out);
    if (sim_cmd->parsed()) return cmd_simulate(sim, out, err);
    if (build_cmd->parsed()) return cmd_merkle_build(merkle, out);
    if (prove_cmd->parsed()) return cmd_merkle_prove(merkle, out);
    if (verify_cmd->parsed()) return cmd_merkle_verify(merkle, out);
    if (figure_cmd->parsed()) return cmd_figure(figure, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace merkle_falsify
