#include "merkle_falsify/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "merkle_falsify/errors.hpp"

namespace merkle_falsify {

namespace {

std::string format_double(double v, int digits = 6) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
  return std::string(buf, res.ptr);
}

void strip_fraction_zeros(std::string& s) {
  if (s.find('.') == std::string::npos) return;
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_field(std::string_view field, std::string_view name, std::size_t line_no) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw UsageError("line " + std::to_string(line_no) + ": bad " + std::string(name) + " '" +
                     std::string(field) + "'");
  }
  return value;
}

}  // namespace

std::string format_real(const Real& value, int significant) {
  if (value == 0) return "0";
  // d.ddd...e[+-]XX with `significant` digits, correctly rounded by MPFR.
  const std::string sci = value.str(significant - 1, std::ios_base::scientific);
  const bool negative = sci.front() == '-';
  const std::size_t e_pos = sci.find('e');
  std::string digits;
  for (char c : sci.substr(negative ? 1 : 0, e_pos - (negative ? 1 : 0))) {
    if (c != '.') digits.push_back(c);
  }
  const int exponent = std::stoi(sci.substr(e_pos + 1));

  std::string out = negative ? "-" : "";
  if (exponent >= -4 && exponent < significant) {
    if (exponent >= 0) {
      std::string body = digits.substr(0, exponent + 1) + "." + digits.substr(exponent + 1);
      strip_fraction_zeros(body);
      out += body;
    } else {
      std::string body = "0." + std::string(-exponent - 1, '0') + digits;
      strip_fraction_zeros(body);
      out += body;
    }
  } else {
    std::string mantissa = digits.substr(0, 1) + "." + digits.substr(1);
    strip_fraction_zeros(mantissa);
    char exp_buf[16];
    std::snprintf(exp_buf, sizeof exp_buf, "e%c%02d", exponent < 0 ? '-' : '+', std::abs(exponent));
    out += mantissa + exp_buf;
  }
  return out;
}

ReportTable ReportTable::FromEstimates(std::span<const FalsificationEstimate> estimates) {
  ReportTable table;
  for (const auto& e : estimates) {
    table.rows_.push_back({e.params.bits, e.params.path_len, e.exact.value, e.approx.value,
                           e.abs_diff, std::nullopt, std::nullopt});
  }
  std::stable_sort(table.rows_.begin(), table.rows_.end(), [](const auto& a, const auto& b) {
    return std::tie(a.bits, a.path_len) < std::tie(b.bits, b.path_len);
  });
  return table;
}

void ReportTable::attach_simulation(std::span<const SimulationRow> rows) {
  for (ReportRow& row : rows_) {
    for (const SimulationRow& sim : rows) {
      if (sim.bits == row.bits && sim.path_len == row.path_len) {
        row.empirical = Real(sim.matches) / Real(sim.total_trials);
        row.z_score = Real(sim.z_score);
      }
    }
  }
}

bool ReportTable::has_empirical() const {
  return std::any_of(rows_.begin(), rows_.end(), [](const auto& r) { return r.empirical.has_value(); });
}

std::string ReportTable::to_csv() const {
  const bool empirical = has_empirical();
  std::string out(kCsvHeader);
  if (empirical) out += ",empirical_p,z_score";
  out += '\n';
  for (const ReportRow& r : rows_) {
    out += std::to_string(r.bits) + "," + std::to_string(r.path_len) + "," + format_real(r.exact) +
           "," + format_real(r.approx) + "," + format_real(r.abs_diff);
    if (empirical) {
      out += "," + (r.empirical ? format_real(*r.empirical) : std::string()) + "," +
             (r.z_score ? format_real(*r.z_score) : std::string());
    }
    out += '\n';
  }
  return out;
}

std::string ReportTable::to_markdown() const {
  const bool empirical = has_empirical();
  std::string out = "| b | m | exact | approx | abs_diff |";
  std::string rule = "|---:|---:|---:|---:|---:|";
  if (empirical) {
    out += " empirical_p | z_score |";
    rule += "---:|---:|";
  }
  out += "\n" + rule + "\n";
  for (const ReportRow& r : rows_) {
    out += "| " + std::to_string(r.bits) + " | " + std::to_string(r.path_len) + " | " +
           format_real(r.exact) + " | " + format_real(r.approx) + " | " + format_real(r.abs_diff) +
           " |";
    if (empirical) {
      out += " " + (r.empirical ? format_real(*r.empirical) : std::string("-")) + " | " +
             (r.z_score ? format_real(*r.z_score) : std::string("-")) + " |";
    }
    out += '\n';
  }
  return out;
}

std::string simulation_csv(const SimulationReport& report) {
  std::string out(kSimulationCsvHeader);
  out += '\n';
  for (const CellResult& c : report.cells) {
    out += std::to_string(c.config.bits) + "," + std::to_string(c.config.path_len) + "," +
           std::to_string(c.total_trials) + "," + std::to_string(c.matches) + "," +
           format_real(c.empirical_p) + "," + format_real(c.exact_p) + "," +
           format_real(c.std_error) + "," + format_real(c.z_score) + "," +
           std::to_string(c.config.master_seed) + "\n";
  }
  return out;
}

std::vector<SimulationRow> parse_simulation_csv(std::string_view text) {
  std::vector<SimulationRow> rows;
  std::size_t line_no = 0;
  bool saw_header = false;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != kSimulationCsvHeader) {
        throw UsageError("simulation CSV header must be '" + std::string(kSimulationCsvHeader) + "'");
      }
      saw_header = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 9) {
      throw UsageError("line " + std::to_string(line_no) + ": expected 9 fields, got " +
                       std::to_string(f.size()));
    }
    SimulationRow row;
    row.bits = parse_field<unsigned>(f[0], "bits", line_no);
    row.path_len = parse_field<std::uint64_t>(f[1], "path_len", line_no);
    row.total_trials = parse_field<std::uint64_t>(f[2], "total_trials", line_no);
    row.matches = parse_field<std::uint64_t>(f[3], "matches", line_no);
    row.empirical_p = parse_field<double>(f[4], "empirical_p", line_no);
    row.exact_p = parse_field<double>(f[5], "exact_p", line_no);
    row.std_error = parse_field<double>(f[6], "std_error", line_no);
    row.z_score = parse_field<double>(f[7], "z_score", line_no);
    row.seed = parse_field<std::uint64_t>(f[8], "seed", line_no);
    if (row.bits == 0 || row.total_trials == 0 || row.matches > row.total_trials) {
      throw UsageError("line " + std::to_string(line_no) + ": inconsistent cell");
    }
    rows.push_back(row);
  }
  if (!saw_header) throw UsageError("simulation CSV is empty");
  return rows;
}

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

double exact_curve(unsigned bits, double m_plus_one) {
  return -std::expm1(m_plus_one * std::log1p(-std::ldexp(1.0, -static_cast<int>(bits))));
}

struct Axis {
  double lo_log;  // log10 of the axis minimum
  double hi_log;
  double pixel_lo;
  double pixel_hi;

  double map(double v) const {
    const double t = (std::log10(v) - lo_log) / (hi_log - lo_log);
    return pixel_lo + t * (pixel_hi - pixel_lo);
  }
};

std::string fmt(double v) { return format_double(v, 6); }

std::string decade_label(int e) {
  if (e >= 0 && e <= 4) return std::to_string(static_cast<long>(std::lround(std::pow(10.0, e))));
  return "1e" + std::to_string(e);
}

}  // namespace

std::string render_figure_svg(std::span<const SimulationRow> rows, const FigureOptions& options) {
  if (rows.empty()) throw UsageError("no simulation cells to plot");

  std::map<unsigned, std::vector<SimulationRow>> series;
  for (const auto& r : rows) series[r.bits].push_back(r);
  for (auto& [bits, cells] : series) {
    std::sort(cells.begin(), cells.end(),
              [](const auto& a, const auto& b) { return a.path_len < b.path_len; });
  }

  double x_min = std::numeric_limits<double>::max(), x_max = 0;
  double y_min = 1.0;
  for (const auto& r : rows) {
    const double x = static_cast<double>(r.path_len) + 1;
    x_min = std::min(x_min, x);
    x_max = std::max(x_max, x);
    if (r.empirical_p > 0) y_min = std::min(y_min, r.empirical_p);
    y_min = std::min(y_min, exact_curve(r.bits, x));
  }
  const double x_lo = std::floor(std::log10(x_min));
  double x_hi = std::ceil(std::log10(x_max));
  if (x_hi <= x_lo) x_hi = x_lo + 1;
  double y_lo = std::floor(std::log10(y_min)) - (y_min > 0.5 ? 1 : 0);
  y_lo = std::max(y_lo, -300.0);
  const double y_hi = 0;  // probability 1

  const double left = 90, right = options.width - 150, top = 50, bottom = options.height - 70;
  const Axis xa{x_lo, x_hi, left, right};
  const Axis ya{y_lo, y_hi, bottom, top};
  const double y_floor = std::pow(10.0, y_lo);
  auto clamp_y = [&](double p) { return std::clamp(p, y_floor, 1.0); };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
      << options.height << "\" viewBox=\"0 0 " << options.width << " " << options.height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << fmt((left + right) / 2) << "\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">"
      << "Falsification probability: empirical vs exact</text>\n";

  // Grid and ticks.
  svg << "<g class=\"axes\" stroke=\"#ccc\" stroke-width=\"1\">\n";
  for (int e = static_cast<int>(x_lo); e <= static_cast<int>(x_hi); ++e) {
    const double x = xa.map(std::pow(10.0, e));
    svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(x) << "\" y2=\""
        << fmt(bottom) << "\"/>\n"
        << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(bottom + 18)
        << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"black\">" << decade_label(e) << "</text>\n";
  }
  const int y_step = std::max(1, static_cast<int>(std::ceil((y_hi - y_lo) / 12)));
  for (int e = static_cast<int>(y_lo); e <= 0; e += y_step) {
    const double y = ya.map(std::pow(10.0, e));
    svg << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(right) << "\" y2=\""
        << fmt(y) << "\"/>\n"
        << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(y + 4)
        << "\" text-anchor=\"end\" stroke=\"none\" fill=\"black\">" << decade_label(e) << "</text>\n";
  }
  svg << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(right - left)
      << "\" height=\"" << fmt(bottom - top) << "\" fill=\"none\" stroke=\"black\"/>\n"
      << "</g>\n"
      << "<text x=\"" << fmt((left + right) / 2) << "\" y=\"" << fmt(bottom + 45)
      << "\" text-anchor=\"middle\">m + 1 (Merkle path length plus one, log scale)</text>\n"
      << "<text transform=\"translate(24," << fmt((top + bottom) / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">falsification probability (log scale)</text>\n";

  constexpr int kCurvePoints = 160;
  std::size_t index = 0;
  for (const auto& [bits, cells] : series) {
    const char* color = kPalette[index % std::size(kPalette)];
    std::uint64_t n = cells.front().total_trials;
    for (const auto& c : cells) n = std::min(n, c.total_trials);

    svg << "<g class=\"series\" data-bits=\"" << bits << "\">\n";

    // Band: upper edge left-to-right, lower edge back.
    std::vector<double> xs;
    for (int i = 0; i <= kCurvePoints; ++i) {
      xs.push_back(std::pow(10.0, x_lo + (x_hi - x_lo) * i / kCurvePoints));
    }
    std::ostringstream band;
    std::ostringstream curve;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double p = exact_curve(bits, xs[i]);
      const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(n));
      band << (i == 0 ? "M" : "L") << fmt(xa.map(xs[i])) << "," << fmt(ya.map(clamp_y(p + options.band_sigmas * sigma))) << " ";
      curve << fmt(xa.map(xs[i])) << "," << fmt(ya.map(clamp_y(p))) << " ";
    }
    for (std::size_t i = xs.size(); i-- > 0;) {
      const double p = exact_curve(bits, xs[i]);
      const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(n));
      band << "L" << fmt(xa.map(xs[i])) << "," << fmt(ya.map(clamp_y(p - options.band_sigmas * sigma))) << " ";
    }
    svg << "<path class=\"band\" d=\"" << band.str() << "Z\" fill=\"" << color
        << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n"
        << "<polyline class=\"curve\" points=\"" << curve.str() << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"/>\n";

    for (const auto& c : cells) {
      const double x = static_cast<double>(c.path_len) + 1;
      const double p = exact_curve(bits, x);
      const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(c.total_trials));
      const bool in_band = std::abs(c.empirical_p - p) <= options.band_sigmas * sigma;
      svg << "<circle class=\"marker\" cx=\"" << fmt(xa.map(x)) << "\" cy=\""
          << fmt(ya.map(clamp_y(c.empirical_p))) << "\" r=\"4\" fill=\"" << color
          << "\" stroke=\"black\" stroke-width=\"0.5\" data-m=\"" << c.path_len
          << "\" data-empirical=\"" << format_double(c.empirical_p, 17) << "\" data-in-band=\""
          << (in_band ? "true" : "false") << "\"><title>b=" << bits << ", m=" << c.path_len
          << ": empirical " << fmt(c.empirical_p) << ", exact " << fmt(p) << "</title></circle>\n";
    }

    const double ly = top + 20 + 22 * static_cast<double>(index);
    svg << "<line x1=\"" << fmt(right + 18) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(right + 44)
        << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n"
        << "<circle cx=\"" << fmt(right + 31) << "\" cy=\"" << fmt(ly) << "\" r=\"4\" fill=\"" << color
        << "\"/>\n"
        << "<text class=\"legend\" x=\"" << fmt(right + 52) << "\" y=\"" << fmt(ly + 4) << "\">b=" << bits
        << "</text>\n"
        << "</g>\n";
    ++index;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace merkle_falsify
