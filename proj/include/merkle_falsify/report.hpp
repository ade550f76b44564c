#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "merkle_falsify/falsification.hpp"
#include "merkle_falsify/monte_carlo.hpp"

namespace merkle_falsify {

// printf("%.*g")-style rendering computed from the full-precision value:
// `significant` digits, trailing zeros dropped, '.' as decimal separator.
std::string format_real(const Real& value, int significant = 17);

struct ReportRow {
  unsigned bits = 0;
  std::uint64_t path_len = 0;
  Real exact;
  Real approx;
  Real abs_diff;
  std::optional<Real> empirical;
  std::optional<Real> z_score;
};

struct SimulationRow;

// Exact vs. approximate falsification probabilities, sorted by (b, m).
class ReportTable {
 public:
  static constexpr std::string_view kCsvHeader = "b,m,exact,approx,abs_diff";

  static ReportTable FromEstimates(std::span<const FalsificationEstimate> estimates);

  // Copies empirical_p and z_score from matching (b, m) simulation rows.
  void attach_simulation(std::span<const SimulationRow> rows);

  const std::vector<ReportRow>& rows() const { return rows_; }
  bool has_empirical() const;

  // kCsvHeader, plus ",empirical_p,z_score" when simulation data is attached.
  std::string to_csv() const;
  std::string to_markdown() const;

 private:
  std::vector<ReportRow> rows_;
};

inline constexpr std::string_view kSimulationCsvHeader =
    "bits,path_len,total_trials,matches,empirical_p,exact_p,std_error,z_score,seed";

// One parsed line of the simulation CSV.
struct SimulationRow {
  unsigned bits = 0;
  std::uint64_t path_len = 0;
  std::uint64_t total_trials = 0;
  std::uint64_t matches = 0;
  double empirical_p = 0;
  double exact_p = 0;
  double std_error = 0;
  double z_score = 0;
  std::uint64_t seed = 0;
};

std::string simulation_csv(const SimulationReport& report);
// Accepts exactly what simulation_csv writes. Throws UsageError.
std::vector<SimulationRow> parse_simulation_csv(std::string_view text);

struct FigureOptions {
  int width = 820;
  int height = 580;
  double band_sigmas = 5.0;
};

// Log-log chart of empirical falsification rates (markers) against the exact
// curve for each hash width b, with a shaded +-band_sigmas band. The x axis
// is m + 1 so that m = 0 cells stay on a log scale.
std::string render_figure_svg(std::span<const SimulationRow> rows, const FigureOptions& options = {});

}  // namespace merkle_falsify
