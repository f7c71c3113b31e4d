// Copyright 2026 The SSA Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "ssa/error.hpp"
#include "ssa/harness.hpp"
#include "ssa/io.hpp"

namespace ssa {

namespace {

using Getter = double (*)(const ResultRow&);

const std::map<std::string, Getter>& numeric_fields() {
  static const std::map<std::string, Getter> m{
      {"seed", [](const ResultRow& r) { return double(r.seed); }},
      {"E", [](const ResultRow& r) { return double(r.E); }},
      {"n1", [](const ResultRow& r) { return double(r.n1); }},
      {"n2", [](const ResultRow& r) { return double(r.n2); }},
      {"d", [](const ResultRow& r) { return double(r.d); }},
      {"k", [](const ResultRow& r) { return double(r.k); }},
      {"sigma", [](const ResultRow& r) { return r.sigma; }},
      {"lambda1", [](const ResultRow& r) { return r.lambda1; }},
      {"lambda2", [](const ResultRow& r) { return r.lambda2; }},
      {"target_mse", [](const ResultRow& r) { return r.target_mse; }},
      {"excess_risk", [](const ResultRow& r) { return r.excess_risk; }},
      {"sin_theta", [](const ResultRow& r) { return r.sin_theta; }},
      {"procrustes_err", [](const ResultRow& r) { return r.procrustes_err; }},
      {"wall_ms", [](const ResultRow& r) { return r.wall_ms; }},
  };
  return m;
}

Getter numeric_field(const std::string& name, const char* role) {
  const auto it = numeric_fields().find(name);
  if (it == numeric_fields().end()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(role) + " field '" + name + "' is not a numeric result field");
  }
  return it->second;
}

std::string group_value(const ResultRow& r, const std::string& field) {
  if (field == "method") return r.method;
  if (field == "dk_holds") return r.dk_holds;
  if (field == "error") return r.error;
  if (field == "lambda_point") return std::to_string(r.lambda_point);
  const Getter g = numeric_field(field, "group");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", g(r));
  return buf;
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::string escape(const std::string& s) {
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

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct SeriesPoint {
  double x, q1, med, q3;
};

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

}  // namespace

std::string render_svg(const std::vector<ResultRow>& rows,
                       const std::string& x_field, const std::string& y_field,
                       const std::string& group_field,
                       const PlotOptions& opts) {
  const Getter gx = numeric_field(x_field, "x");
  const Getter gy = numeric_field(y_field, "y");
  (void)group_value(ResultRow{}, group_field);
  if (rows.empty()) throw Error(ErrorCode::kInvalidArgument, "no rows to plot");

  const auto tx = [&](double v) { return opts.log_x ? std::log10(v) : v; };
  const auto ty = [&](double v) { return opts.log_y ? std::log10(v) : v; };
  const auto usable = [](double v, bool log) {
    return std::isfinite(v) && (!log || v > 0.0);
  };

  // group -> x -> y samples; std::map keeps groups and x ascending.
  std::map<std::string, std::map<double, std::vector<double>>> data;
  for (const auto& r : rows) {
    const double x = gx(r), y = gy(r);
    if (!usable(x, opts.log_x) || !usable(y, opts.log_y)) continue;
    data[group_value(r, group_field)][x].push_back(y);
  }
  if (data.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no finite values to plot");
  }

  std::map<std::string, std::vector<SeriesPoint>> series;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& [g, xs] : data) {
    for (const auto& [x, ys] : xs) {
      SeriesPoint p{tx(x), ty(quantile(ys, 0.25)), ty(quantile(ys, 0.5)),
                    ty(quantile(ys, 0.75))};
      series[g].push_back(p);
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.q1);
      y1 = std::max(y1, p.q3);
    }
  }
  if (x1 == x0) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  if (y1 == y0) {
    const double pad = y0 == 0.0 ? 1.0 : 0.05 * std::abs(y0);
    y0 -= pad;
    y1 += pad;
  }

  const double W = 720, H = 480, L = 80, R = 160, T = 40, B = 60;
  const auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  const auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
    << H << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opts.title.empty()) {
    s << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << escape(opts.title) << "</text>\n";
  }
  s << "<g stroke=\"black\" fill=\"none\"><line x1=\"" << L << "\" y1=\"" << H - B
    << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\"/><line x1=\"" << L
    << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\"/></g>\n";
  s << "<g font-size=\"11\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0;
    const double yv = y0 + (y1 - y0) * i / 4.0;
    s << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << H - B + 16
      << "\" text-anchor=\"middle\">"
      << tick_label(opts.log_x ? std::pow(10.0, xv) : xv) << "</text>\n";
    s << "<text x=\"" << L - 6 << "\" y=\"" << fmt(py(yv) + 4)
      << "\" text-anchor=\"end\">"
      << tick_label(opts.log_y ? std::pow(10.0, yv) : yv) << "</text>\n";
  }
  s << "</g>\n";
  s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 16
    << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(x_field)
    << (opts.log_x ? " (log)" : "") << "</text>\n";
  s << "<text x=\"18\" y=\"" << (T + H - B) / 2
    << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
    << (T + H - B) / 2 << ")\">" << escape(y_field)
    << (opts.log_y ? " (log)" : "") << "</text>\n";

  std::size_t idx = 0;
  for (const auto& [g, pts] : series) {
    const char* color = kPalette[idx % std::size(kPalette)];
    std::string band, line;
    for (const auto& p : pts) band += fmt(px(p.x)) + "," + fmt(py(p.q3)) + " ";
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
      band += fmt(px(it->x)) + "," + fmt(py(it->q1)) + " ";
    }
    for (const auto& p : pts) {
      if (!line.empty()) line += ' ';
      line += fmt(px(p.x)) + "," + fmt(py(p.med));
    }
    band.pop_back();
    s << "<g class=\"series\" data-group=\"" << escape(g) << "\">\n";
    s << "<polygon class=\"iqr\" points=\"" << band << "\" fill=\"" << color
      << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    s << "<polyline points=\"" << line << "\" fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"2\"/>\n";
    const double ly = T + 20 + 18.0 * static_cast<double>(idx);
    s << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 32
      << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << W - R + 38 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">"
      << escape(g) << "</text>\n";
    s << "</g>\n";
    ++idx;
  }
  s << "</svg>\n";
  return s.str();
}

void emit_plot(const std::vector<ResultRow>& rows, const std::string& x_field,
               const std::string& y_field, const std::string& group_field,
               const std::string& path, const PlotOptions& opts) {
  write_text_file(path, render_svg(rows, x_field, y_field, group_field, opts));
}

}  // namespace ssa
