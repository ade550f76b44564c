// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. `--full-grid` additionally runs the complete 5x5
// truncated-SHA grid at 100,000 trials per cell (long-running, not in CI).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "merkle_falsify/cli.hpp"
#include "merkle_falsify/falsification.hpp"
#include "merkle_falsify/merkle.hpp"
#include "merkle_falsify/monte_carlo.hpp"
#include "merkle_falsify/report.hpp"

namespace mf = merkle_falsify;
namespace mp = boost::multiprecision;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

struct Criterion {
  const char* id;
  const char* title;
  double time_limit_s;
  std::function<Outcome()> body;
};

std::string cli(std::vector<std::string> args, int* code = nullptr) {
  std::ostringstream out, err;
  const int rc = mf::run_cli(args, out, err);
  if (code) *code = rc;
  return out.str();
}

// Published abs_diff grid: absolute difference between the exact and approximate formulas.
struct TableEntry {
  unsigned b;
  std::uint64_t m;
  const char* diff;
};
constexpr TableEntry kPublishedGrid[] = {
    {2, 10, "0.00710805789680180"},      {2, 50, "0.0287983054922386"},
    {2, 100, "0.0288007830608296"},      {2, 500, "0.0288007830714048"},
    {2, 1000, "0.0288007830714048"},     {4, 10, "0.00923681979928365"},
    {4, 50, "0.00216253840990199"},      {4, 100, "0.00157561166419240"},
    {4, 500, "0.00191306281345960"},     {4, 1000, "0.00191306281347581"},
    {6, 10, "0.00102043490152098"},      {6, 50, "0.00270533021104558"},
    {6, 100, "0.00243368381652498"},     {6, 500, "0.0000975622497489947"},
    {6, 1000, "0.000121418280353613"},   {8, 10, "0.0000729807479756192"},
    {8, 50, "0.000311967273480596"},     {8, 100, "0.000512896153700371"},
    {8, 500, "0.000532762483821725"},    {8, 1000, "0.000145220188735085"},
    {10, 10, "0.00000471585051471136"},  {10, 50, "0.0000226752874874780"},
    {10, 100, "0.0000431877859932567"},  {10, 500, "0.000146063524593065"},
    {10, 1000, "0.000179180050212557"},
};

Outcome table_reproduction() {
  Outcome o;
  int code = 0;
  const std::string csv = cli({"table"}, &code);
  o.require(code == 0, "table exit code " + std::to_string(code));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  o.require(line == "b,m,exact,approx,abs_diff", "header");
  std::size_t i = 0;
  double worst = 0;
  while (std::getline(in, line)) {
    if (i >= std::size(kPublishedGrid)) {
      o.require(false, "extra row");
      break;
    }
    const auto& want = kPublishedGrid[i++];
    const std::string prefix = std::to_string(want.b) + "," + std::to_string(want.m) + ",";
    o.require(line.rfind(prefix, 0) == 0, "row order at " + prefix);
    const mf::Real got(line.substr(line.rfind(',') + 1));
    const mf::Real rel = mp::abs(got - mf::Real(want.diff)) / mf::Real(want.diff);
    worst = std::max(worst, rel.convert_to<double>());
  }
  o.require(i == 25, "expected 25 rows, got " + std::to_string(i));
  o.require(worst <= 1e-10, "max relative error " + std::to_string(worst));
  char buf[80];
  std::snprintf(buf, sizeof buf, "25 rows, max rel err %.2e", worst);
  if (o.pass) o.detail = buf;
  return o;
}

Outcome saturation() {
  Outcome o;
  const mf::Real target("0.0288007830714048");
  const auto d500 = mf::approximation_error({2, 500});
  const auto d1000 = mf::approximation_error({2, 1000});
  o.require(mp::abs(d500.abs_diff - target) <= 1e-12, "abs_diff(2,500)");
  o.require(mp::abs(d1000.abs_diff - target) <= 1e-12, "abs_diff(2,1000)");
  o.require(mp::abs(d500.abs_diff - d1000.abs_diff) <= 1e-12, "abs_diff(2,500) != abs_diff(2,1000)");
  const mf::Real limit = mf::Real(1) / 4 + mp::exp(-mf::Real(1) / 4);
  o.require(mp::abs(d1000.approx.value - limit) <= 1e-12, "approx(2,1000) != 0.25 + e^-1/4");
  o.require(mp::abs(1 - d1000.exact.value) <= 1e-12, "exact(2,1000) != 1");
  if (o.pass) o.detail = "abs_diff = " + mf::format_real(d1000.abs_diff);
  return o;
}

Outcome identity_suite() {
  Outcome o;
  int checked = 0;
  for (unsigned b = 1; b <= 16; ++b) {
    for (std::uint64_t m : {0, 1, 2, 3, 7, 64, 1000}) {
      const mf::PathParams p(b, m);
      const bool eq = *mf::exact_falsification_prob_termsum(p).exact_rational == mf::exact_falsification_rational(p);
      o.require(eq, "b=" + std::to_string(b) + " m=" + std::to_string(m));
      ++checked;
    }
  }
  if (o.pass) o.detail = std::to_string(checked) + " (b, m) pairs equal as exact rationals";
  return o;
}

mf::ExperimentConfig cell(unsigned b, std::uint64_t m, std::uint64_t trials, std::uint64_t experiments,
                          mf::HashAlgorithm kind) {
  mf::ExperimentConfig c;
  c.bits = b;
  c.path_len = m;
  c.trials_per_experiment = trials;
  c.num_experiments = experiments;
  c.oracle_kind = kind;
  c.master_seed = 0;  // shipped default seed
  return c;
}

std::string describe(const mf::CellResult& c) {
  return "b=" + std::to_string(c.config.bits) + ",m=" + std::to_string(c.config.path_len) +
         " z=" + mf::format_real(c.z_score, 4);
}

void check_trends(Outcome& o, const std::vector<mf::CellResult>& cells) {
  for (const auto& c : cells) {
    for (const auto& d : cells) {
      if (c.config.path_len == d.config.path_len && c.config.bits < d.config.bits) {
        o.require(c.empirical_p > d.empirical_p || (c.empirical_p == 1 && d.empirical_p == 1),
                  "not decreasing in b at m=" + std::to_string(c.config.path_len));
      }
      if (c.config.bits == d.config.bits && c.config.path_len < d.config.path_len) {
        o.require(c.empirical_p < d.empirical_p || c.empirical_p == 1,
                  "not increasing in m at b=" + std::to_string(c.config.bits));
      }
    }
  }
}

Outcome replay(const std::vector<mf::ExperimentConfig>& grid, unsigned workers) {
  Outcome o;
  const auto report = mf::run_grid(grid, workers);
  std::string zs;
  for (const auto& c : report.cells) {
    o.require(c.within_sigmas(5), describe(c) + " beyond 5 sigma");
    zs += (zs.empty() ? "" : " ") + describe(c);
  }
  check_trends(o, report.cells);
  o.detail = (o.pass ? "" : o.detail + " | ") + zs;
  return o;
}

Outcome sha_replay(unsigned workers) {
  std::vector<mf::ExperimentConfig> grid;
  for (unsigned b : {2, 4, 6, 8}) {
    for (std::uint64_t m : {10, 50}) grid.push_back(cell(b, m, 1000, 100, mf::HashAlgorithm::kSha256Truncated));
  }
  grid.push_back(cell(2, 1000, 1000, 10, mf::HashAlgorithm::kSha256Truncated));
  return replay(grid, workers);
}

Outcome sha_full_grid(unsigned workers) {
  std::vector<mf::ExperimentConfig> grid;
  for (unsigned b : {2, 4, 6, 8, 10}) {
    for (std::uint64_t m : {10, 50, 100, 500, 1000}) {
      grid.push_back(cell(b, m, 1000, 100, mf::HashAlgorithm::kSha256Truncated));
    }
  }
  return replay(grid, workers);
}

Outcome ideal_replay(unsigned workers) {
  Outcome o;
  std::vector<mf::ExperimentConfig> grid;
  for (unsigned b : {1, 2, 4}) {
    for (std::uint64_t m : {0, 1, 10}) grid.push_back(cell(b, m, 1000, 100, mf::HashAlgorithm::kIdealOracle));
  }
  const auto report = mf::run_grid(grid, workers);
  double worst = 0;
  for (const auto& c : report.cells) {
    o.require(c.within_sigmas(5), describe(c) + " beyond 5 sigma");
    worst = std::max(worst, std::abs(c.z_score.convert_to<double>()));
  }
  if (o.pass) o.detail = "9 cells, max |z| = " + std::to_string(worst);
  return o;
}

Outcome merkle_suite() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::size_t proofs = 0;
  for (unsigned bits : {8u, 64u, 256u}) {
    const auto spec = mf::HashSpec::Sha256(bits);
    for (std::size_t n = 1; n <= 33; ++n) {
      std::vector<mf::Bytes> leaves(n);
      for (auto& leaf : leaves) {
        leaf.resize(1 + rng() % 32);
        for (auto& byte : leaf) byte = static_cast<std::uint8_t>(rng());
      }
      const auto tree = mf::build_tree(leaves, spec);
      for (std::size_t i = 0; i < n; ++i) {
        const auto proof = mf::generate_proof(tree, i);
        ++proofs;
        if (!mf::verify_proof(leaves[i], proof, tree.root(), spec)) {
          o.require(false, "round trip b=" + std::to_string(bits) + " n=" + std::to_string(n));
        }
      }
    }
  }

  // Frozen 4-leaf SHA-256 vector ("alpha","beta","gamma","delta"), leaf 1.
  const auto spec = mf::HashSpec::Sha256(256);
  const auto root =
      mf::Digest::FromHex("206e554a749c0e66f726a4d09737ce1c90167f8df6e7c0c3e41f21f41315876f", 256);
  const mf::MerkleProof proof{
      256,
      1,
      {{mf::Digest::FromHex("8ed3f6ad685b959ead7022518e1af76cd816f8e8ec7ccdda1ed4018e8f2223f8", 256),
        mf::Side::kLeft},
       {mf::Digest::FromHex("08089e7d7153fd764ffe6e8d95969ffe2cde2b64e871b3eb27c596cde6065312", 256),
        mf::Side::kRight}}};
  const mf::Bytes beta{'b', 'e', 't', 'a'};
  o.require(mf::verify_proof(beta, proof, root, spec), "frozen vector does not verify");
  mf::Bytes flipped = beta;
  flipped[2] ^= 0x04;
  o.require(!mf::verify_proof(flipped, proof, root, spec), "bit-flipped data verified");
  auto zeroed = proof;
  zeroed.steps[1].sibling = mf::Digest(mf::Bytes(32, 0), 256);
  o.require(!mf::verify_proof(beta, zeroed, root, spec), "zeroed sibling verified");
  auto wrong = root.bytes();
  wrong[0] ^= 0x01;
  o.require(!mf::verify_proof(beta, proof, mf::Digest(wrong, 256), spec), "wrong root verified");

  // Three leaves: the tail is paired with a copy of itself.
  const auto spec8 = mf::HashSpec::Sha256(8);
  const std::vector<mf::Bytes> three{{'a'}, {'b'}, {'c'}};
  const auto tree3 = mf::build_tree(three, spec8);
  const auto h = [&](const mf::Bytes& b) { return mf::hash_bytes(b, spec8); };
  const auto n12 = mf::hash_concat(h(three[0]), h(three[1]), spec8);
  const auto n33 = mf::hash_concat(h(three[2]), h(three[2]), spec8);
  o.require(tree3.levels().size() == 3 && tree3.levels()[1] == std::vector<mf::Digest>{n12, n33},
            "3-leaf level structure");
  o.require(tree3.root() == mf::hash_concat(n12, n33, spec8), "3-leaf root");
  const auto p3 = mf::generate_proof(tree3, 2);
  o.require(p3.steps.size() == 2 && p3.steps[0] == mf::ProofStep{h(three[2]), mf::Side::kRight} &&
                p3.steps[1] == mf::ProofStep{n12, mf::Side::kLeft},
            "3-leaf proof for index 2");
  if (o.pass) o.detail = std::to_string(proofs) + " proofs round-tripped, 3 tamper vectors rejected";
  return o;
}

Outcome determinism() {
  Outcome o;
  const std::vector<std::string> base{"simulate", "--bits", "2,5,8", "--path-lens", "0,10,40", "--trials", "400",
                                      "--experiments", "6", "--oracle", "sha256", "--seed", "31337"};
  std::string first;
  for (const char* workers : {"1", "1", "2", "4"}) {
    auto args = base;
    args.insert(args.end(), {"--workers", workers});
    const std::string csv = cli(args);
    if (first.empty()) {
      first = csv;
    } else {
      o.require(csv == first, std::string("CSV differs with --workers ") + workers);
    }
  }
  auto ideal = base;
  ideal[10] = "ideal";
  o.require(cli(ideal) == cli(ideal), "ideal-oracle rerun differs");
  if (o.pass) o.detail = "byte-identical CSV across 4 runs (1, 1, 2, 4 workers)";
  return o;
}

Outcome precision_stress() {
  Outcome o;
  const mf::Real p = mf::exact_falsification_prob({256, 1'000'000}).value;
  const mf::Real first_order = mf::Real(1'000'001) * mp::ldexp(mf::Real(1), -256);
  const mf::Real rel = mp::abs(p - first_order) / first_order;
  o.require(p > 0, "underflow to zero");
  o.require(rel <= mf::Real("1e-9"), "relative error " + mf::format_real(rel, 3));
  if (o.pass) o.detail = "exact = " + mf::format_real(p) + ", rel diff from (m+1)2^-b " + mf::format_real(rel, 3);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  bool full_grid = false;
  unsigned workers = 1;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--full-grid") {
      full_grid = true;
    } else if (arg == "--workers" && i + 1 < argc) {
      workers = static_cast<unsigned>(std::stoul(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--full-grid] [--workers N]\n";
      return 2;
    }
  }

  std::vector<Criterion> criteria{
      {"C1", "abs_diff grid reproduction", 1.0, table_reproduction},
      {"C2", "constant-diff saturation at b=2", 1.0, saturation},
      {"C3", "term-sum / closed-form identity", 5.0, identity_suite},
      {"C4", "truncated SHA-256 statistical replay (desk scale)", 180.0, [=] { return sha_replay(workers); }},
      {"C5", "ideal-oracle exactness", 30.0, [=] { return ideal_replay(workers); }},
      {"C6", "Merkle property suite", 10.0, merkle_suite},
      {"C7", "simulate determinism", 60.0, determinism},
      {"C8", "precision stress b=256, m=1e6", 1.0, precision_stress},
  };
  if (full_grid) {
    criteria.push_back({"FULL", "full 5x5 truncated SHA-256 grid, 100,000 trials per cell", 1e9,
                        [=] { return sha_full_grid(workers); }});
  }

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o = c.body();
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed > c.time_limit_s) {
      o.pass = false;
      o.detail += " | runtime " + std::to_string(elapsed) + " s exceeds " + std::to_string(c.time_limit_s) + " s";
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %s %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, elapsed, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
