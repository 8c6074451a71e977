#ifndef PBANDIT_HARNESS_RESULT_HPP
#define PBANDIT_HARNESS_RESULT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pbandit/format.hpp"

namespace pbandit::harness {

/// Mean of R(t)/t over episodes for one (policy, parameter, checkpoint).
struct AggregateRow {
  std::string policy;
  double param = 0.0;
  std::int64_t t = 0;
  double mean_avg_regret = 0.0;
  double stderr_ = 0.0; // sample std / √episodes
  std::int64_t episodes = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const AggregateRow&, const AggregateRow&) = default;
};

/// Rows grouped by series in input order, checkpoints ascending within a series.
struct AggregateResult {
  std::vector<AggregateRow> rows;

  friend bool operator==(const AggregateResult&, const AggregateResult&) = default;

  /// Distinct (policy, param) series in first-appearance order.
  std::vector<std::pair<std::string, double>> series() const
  {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& r : rows) {
      const std::pair<std::string, double> key{r.policy, r.param};
      if (std::find(out.begin(), out.end(), key) == out.end()) {
        out.push_back(key);
      }
    }
    return out;
  }

  std::vector<AggregateRow> series_rows(const std::string& policy, double param) const
  {
    std::vector<AggregateRow> out;
    for (const auto& r : rows) {
      if (r.policy == policy && r.param == param) {
        out.push_back(r);
      }
    }
    return out;
  }

  /// Row at the largest checkpoint of a series.
  const AggregateRow& final_row(const std::string& policy, double param) const
  {
    const AggregateRow* best = nullptr;
    for (const auto& r : rows) {
      if (r.policy == policy && r.param == param && (best == nullptr || r.t > best->t)) {
        best = &r;
      }
    }
    if (best == nullptr) {
      throw std::out_of_range("no series " + policy + " / " + format_double(param));
    }
    return *best;
  }
};

/// Mean and standard error of a sample, accumulated in index order.
inline std::pair<double, double> mean_and_stderr(const std::vector<double>& xs)
{
  const double n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) {
    sum += x;
  }
  const double mean = sum / n;
  if (xs.size() < 2) {
    return {mean, 0.0};
  }
  double ss = 0.0;
  for (double x : xs) {
    ss += (x - mean) * (x - mean);
  }
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

inline constexpr const char* aggregate_csv_header = "policy,param,t,mean_avg_regret,stderr,episodes,seed";

inline void emit_csv(const AggregateResult& result, std::ostream& os)
{
  os << aggregate_csv_header << '\n';
  for (const auto& r : result.rows) {
    os << r.policy << ',' << format_double(r.param) << ',' << r.t << ',' << format_double(r.mean_avg_regret) << ','
       << format_double(r.stderr_) << ',' << r.episodes << ',' << r.seed << '\n';
  }
}

inline void emit_csv(const AggregateResult& result, const std::string& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write '" + path + "'");
  }
  emit_csv(result, out);
  if (!out) {
    throw std::runtime_error("write failed for '" + path + "'");
  }
}

inline AggregateResult parse_csv(std::istream& in)
{
  AggregateResult result;
  std::string line;
  if (!std::getline(in, line) || line != aggregate_csv_header) {
    throw std::runtime_error("aggregate CSV: missing or unexpected header");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cells.push_back(cell);
    }
    if (cells.size() != 7) {
      throw std::runtime_error("aggregate CSV line " + std::to_string(line_no) + ": expected 7 fields");
    }
    AggregateRow r;
    r.policy = cells[0];
    r.param = parse_double(cells[1]);
    r.t = std::stoll(cells[2]);
    r.mean_avg_regret = parse_double(cells[3]);
    r.stderr_ = parse_double(cells[4]);
    r.episodes = std::stoll(cells[5]);
    r.seed = std::stoull(cells[6]);
    result.rows.push_back(std::move(r));
  }
  return result;
}

namespace detail {

inline std::string xml_escape(const std::string& s)
{
  std::string out;
  for (char c : s) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    default: out += c;
    }
  }
  return out;
}

inline std::string fixed(double v)
{
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

} // namespace detail

/// Line plot of R(t)/t against t (log-scaled t axis), one polyline per series.
inline void emit_svg_lineplot(const AggregateResult& result, std::ostream& os, const std::string& title = "")
{
  if (result.rows.empty()) {
    throw std::invalid_argument("emit_svg_lineplot: empty result");
  }
  constexpr double width = 720, height = 480, left = 80, right = 200, top = 40, bottom = 60;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double t_min = 1e300, t_max = -1e300, y_max = 0.0;
  for (const auto& r : result.rows) {
    t_min = std::min(t_min, static_cast<double>(r.t));
    t_max = std::max(t_max, static_cast<double>(r.t));
    y_max = std::max(y_max, r.mean_avg_regret);
  }
  if (y_max <= 0.0) {
    y_max = 1.0;
  }
  const double lx0 = std::log10(std::max(t_min, 1.0));
  const double lx1 = std::max(std::log10(std::max(t_max, 1.0)), lx0 + 1e-9);
  auto px = [&](double t) { return left + (std::log10(std::max(t, 1.0)) - lx0) / (lx1 - lx0) * plot_w; };
  auto py = [&](double y) { return top + plot_h - y / (y_max * 1.05) * plot_h; };

  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  if (!title.empty()) {
    os << "<text x=\"" << left << "\" y=\"24\" font-size=\"16\">" << detail::xml_escape(title) << "</text>\n";
  }
  // Axes.
  os << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
     << top + plot_h << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">t</text>\n";
  os << "<text x=\"20\" y=\"" << top + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
     << top + plot_h / 2 << ")\">R(t)/t</text>\n";
  for (int decade = static_cast<int>(std::ceil(lx0 - 1e-9)); decade <= static_cast<int>(std::floor(lx1 + 1e-9));
       ++decade) {
    const double x = px(std::pow(10.0, decade));
    os << "<text x=\"" << detail::fixed(x) << "\" y=\"" << top + plot_h + 18
       << "\" font-size=\"11\" text-anchor=\"middle\">1e" << decade << "</text>\n";
  }
  for (int tick = 0; tick <= 4; ++tick) {
    const double y = y_max * tick / 4.0;
    os << "<text x=\"" << left - 6 << "\" y=\"" << detail::fixed(py(y) + 4)
       << "\" font-size=\"11\" text-anchor=\"end\">" << format_double(std::round(y * 1000.0) / 1000.0) << "</text>\n";
  }

  const auto all_series = result.series();
  for (std::size_t s = 0; s < all_series.size(); ++s) {
    const auto& [policy, param] = all_series[s];
    const char* colour = palette[s % 10];
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const auto& r : result.series_rows(policy, param)) {
      os << (first ? "" : " ") << detail::fixed(px(static_cast<double>(r.t))) << ','
         << detail::fixed(py(r.mean_avg_regret));
      first = false;
    }
    os << "\"/>\n";
    const double ly = top + 14.0 * static_cast<double>(s + 1);
    os << "<text x=\"" << left + plot_w + 10 << "\" y=\"" << detail::fixed(ly) << "\" font-size=\"11\" fill=\""
       << colour << "\">" << detail::xml_escape(policy + " (" + format_double(param) + ")") << "</text>\n";
  }
  os << "</svg>\n";
}

inline void emit_svg_lineplot(const AggregateResult& result, const std::string& path, const std::string& title = "")
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write '" + path + "'");
  }
  emit_svg_lineplot(result, out, title);
}

} // namespace pbandit::harness

#endif // PBANDIT_HARNESS_RESULT_HPP
