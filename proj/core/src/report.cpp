#include "tripboost/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>

#include "tripboost/csv.hpp"

namespace tripboost {

void write_results_csv(std::ostream& out, const std::vector<RunResult>& results) {
  out << kResultsHeader << '\n';
  for (const auto& r : results) {
    write_csv_row(out, {std::to_string(r.scenario), r.model, to_string(r.target),
                        std::to_string(r.fold), std::to_string(r.n_train), std::to_string(r.n_test),
                        format_double(r.mae), format_double(r.rmse), format_double(r.fit_time)});
  }
}

void write_aggregates_csv(std::ostream& out, const std::vector<Aggregate>& aggregates) {
  out << kAggregatesHeader << '\n';
  for (const auto& a : aggregates) {
    write_csv_row(out, {std::to_string(a.scenario), a.model, to_string(a.target),
                        std::to_string(a.folds), format_double(a.mean_mae),
                        format_double(a.mean_rmse), format_double(a.mean_fit_time)});
  }
}

void write_scale_csv(std::ostream& out, const std::vector<ScaleRow>& rows) {
  out << kScaleHeader << '\n';
  for (const auto& r : rows) {
    write_csv_row(out, {r.model, std::to_string(r.n), format_double(r.fit_time)});
  }
}

void print_aggregates(std::ostream& out, const std::vector<Aggregate>& aggregates) {
  char line[160];
  std::snprintf(line, sizeof line, "%-8s %-6s %-9s %5s %14s %14s %12s\n", "scenario", "model",
                "target", "folds", "mean_mae_s", "mean_rmse_s", "fit_time_s");
  out << line;
  for (const auto& a : aggregates) {
    std::snprintf(line, sizeof line, "%-8d %-6s %-9s %5zu %14.3f %14.3f %12.4f\n", a.scenario,
                  a.model.c_str(), to_string(a.target), a.folds, a.mean_mae, a.mean_rmse,
                  a.mean_fit_time);
    out << line;
  }
}

namespace {

std::string xml_escape(const std::string& s) {
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

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#17becf", "#bcbd22"};

}  // namespace

void write_scale_svg(std::ostream& out, const std::vector<ScaleRow>& rows) {
  constexpr double W = 720, H = 460, left = 80, right = 150, top = 30, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;

  std::map<std::string, std::vector<const ScaleRow*>> series;
  std::vector<std::string> order;
  double n_min = 1e300, n_max = 0, t_min = 1e300, t_max = 0;
  for (const auto& r : rows) {
    if (!series.count(r.model)) order.push_back(r.model);
    series[r.model].push_back(&r);
    n_min = std::min(n_min, double(r.n));
    n_max = std::max(n_max, double(r.n));
    const double t = std::max(r.fit_time, 1e-9);
    t_min = std::min(t_min, t);
    t_max = std::max(t_max, t);
  }
  if (rows.empty()) n_min = 0, n_max = 1, t_min = 1e-3, t_max = 1;
  if (n_max <= n_min) n_max = n_min + 1;
  double lo = std::floor(std::log10(t_min)), hi = std::ceil(std::log10(t_max));
  if (hi <= lo) hi = lo + 1;

  auto x_of = [&](double n) { return left + pw * (n - n_min) / (n_max - n_min); };
  auto y_of = [&](double t) {
    return top + ph * (1.0 - (std::log10(std::max(t, 1e-9)) - lo) / (hi - lo));
  };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<g stroke=\"black\" fill=\"none\">\n"
      << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\""
      << top + ph << "\"/>\n"
      << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
      << "\"/>\n</g>\n";

  for (int e = int(lo); e <= int(hi); ++e) {
    const double y = y_of(std::pow(10.0, e));
    out << "<line x1=\"" << left << "\" y1=\"" << fmt(y) << "\" x2=\"" << left + pw << "\" y2=\""
        << fmt(y) << "\" stroke=\"#dddddd\"/>\n"
        << "<text x=\"" << left - 8 << "\" y=\"" << fmt(y + 4)
        << "\" text-anchor=\"end\">1e" << e << "</text>\n";
  }
  for (int k = 0; k <= 5; ++k) {
    const double n = n_min + (n_max - n_min) * k / 5.0;
    out << "<text x=\"" << fmt(x_of(n)) << "\" y=\"" << top + ph + 18
        << "\" text-anchor=\"middle\">" << static_cast<long long>(std::llround(n)) << "</text>\n";
  }
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 15
      << "\" text-anchor=\"middle\">training samples</text>\n"
      << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << top + ph / 2 << ")\">fit time (s, log scale)</text>\n";

  for (std::size_t i = 0; i < order.size(); ++i) {
    auto pts = series[order[i]];
    std::sort(pts.begin(), pts.end(), [](auto* a, auto* b) { return a->n < b->n; });
    const char* colour = kPalette[i % std::size(kPalette)];
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
    for (std::size_t j = 0; j < pts.size(); ++j) {
      out << (j ? " " : "") << fmt(x_of(double(pts[j]->n))) << ',' << fmt(y_of(pts[j]->fit_time));
    }
    out << "\"/>\n";
    const double ly = top + 10 + 20.0 * double(i);
    out << "<line x1=\"" << left + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 40
        << "\" y2=\"" << ly << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << left + pw + 46 << "\" y=\"" << ly + 4 << "\">" << xml_escape(order[i])
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace tripboost
