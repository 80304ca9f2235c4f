#include "pmlab/plot.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "pmlab/error.hpp"

namespace pmlab {

namespace {

constexpr double kWidth = 780, kHeight = 460;
constexpr double kLeft = 85, kRight = 230, kTop = 40, kBottom = 50;
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

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

std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!std::isfinite(lo)) lo = 0, hi = 1;
    if (hi - lo < 1e-12 * (1 + std::fabs(hi))) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

}  // namespace

std::string render_svg(const Chart& chart) {
  auto tx = [&](double v) { return chart.log_x ? std::log10(v) : v; };
  Range rx, ry;
  for (const auto& s : chart.series) {
    for (double v : s.x)
      if (!chart.log_x || v > 0) rx.add(tx(v));
    for (double v : s.y) ry.add(v);
  }
  for (const auto& h : chart.hlines) ry.add(h.second);
  rx.finish();
  ry.finish();
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (tx(v) - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto py = [&](double v) { return kTop + (ry.hi - v) / (ry.hi - ry.lo) * ph; };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"15\">"
    << escape(chart.title) << "</text>\n"
    << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int k = 0; k <= 4; ++k) {
    const double fx = rx.lo + (rx.hi - rx.lo) * k / 4.0;
    const double fy = ry.lo + (ry.hi - ry.lo) * k / 4.0;
    const double xv = chart.log_x ? std::pow(10.0, fx) : fx;
    const double gx = kLeft + pw * k / 4.0, gy = kTop + ph - ph * k / 4.0;
    o << "<text x=\"" << gx << "\" y=\"" << kTop + ph + 16
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << num(xv)
      << "</text>\n"
      << "<text x=\"" << kLeft - 6 << "\" y=\"" << gy + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(fy)
      << "</text>\n";
  }
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
    << escape(chart.x_label) << "</text>\n"
    << "<text x=\"16\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" "
    << "font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 " << kTop + ph / 2
    << ")\">" << escape(chart.y_label) << "</text>\n";

  int legend = 0;
  auto legend_entry = [&](const std::string& label, const char* color, bool dashed) {
    const double ly = kTop + 14 + 18 * legend++;
    o << "<line x1=\"" << kLeft + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + pw + 34
      << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\""
      << (dashed ? " stroke-dasharray=\"5,4\"" : "") << "/>\n"
      << "<text x=\"" << kLeft + pw + 40 << "\" y=\"" << ly + 4
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(label) << "</text>\n";
  };

  std::size_t idx = 0;
  for (const auto& h : chart.hlines) {
    const char* color = kColors[(idx++) % 6];
    o << "<line x1=\"" << kLeft << "\" y1=\"" << py(h.second) << "\" x2=\"" << kLeft + pw
      << "\" y2=\"" << py(h.second) << "\" stroke=\"" << color
      << "\" stroke-dasharray=\"5,4\"/>\n";
    legend_entry(h.first, color, true);
  }
  for (const auto& s : chart.series) {
    const char* color = kColors[(idx++) % 6];
    std::ostringstream pts;
    // thin out long series to roughly one point per half pixel
    const std::size_t n = std::min(s.x.size(), s.y.size());
    const std::size_t stride = std::max<std::size_t>(1, n / 2000);
    double prev_y = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < n; i += (i + stride < n || i == n - 1) ? stride : n - 1 - i) {
      if (!std::isfinite(s.y[i]) || (chart.log_x && s.x[i] <= 0)) continue;
      if (s.steps && std::isfinite(prev_y)) pts << px(s.x[i]) << ',' << py(prev_y) << ' ';
      pts << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
      prev_y = s.y[i];
      if (i == n - 1) break;
    }
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\""
      << pts.str() << "\"/>\n";
    if (s.markers)
      for (std::size_t i = 0; i < n; ++i)
        if (std::isfinite(s.y[i]))
          o << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i])
            << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    legend_entry(s.label, color, false);
  }
  o << "</svg>\n";
  return o.str();
}

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  require(bool(out), ErrorKind::io, "cannot write '" + path + "'");
  out << text;
}

}  // namespace

std::vector<std::string> emit_plots(const ExperimentConfig& cfg,
                                    const std::vector<SweepRecord>& records,
                                    const std::vector<SampledFunction>& minimizers,
                                    const std::string& dir) {
  require(!records.empty(), ErrorKind::usage, "no records to plot");
  std::filesystem::create_directories(dir);
  const Forcing forcing(cfg.forcing);
  const bool jump = forcing.is_jump();
  std::vector<std::string> written;

  Chart a;
  a.title = jump ? "rescaled minimum energy, jump forcing" : "rescaled minimum energy";
  a.x_label = "eps";
  a.y_label = jump ? "m / omega^(5/2)" : "m / omega^2";
  a.log_x = true;
  Series s{"computed", {}, {}, true, false};
  for (const auto& r : records) {
    s.x.push_back(r.eps);
    s.y.push_back(jump ? r.m_over_omega52 : r.m_over_omega2);
  }
  a.series.push_back(std::move(s));
  a.hlines.push_back({"predicted limit", records.front().predicted_limit});
  write_file(dir + "/energy.svg", render_svg(a));
  written.push_back(dir + "/energy.svg");

  if (minimizers.empty()) return written;
  // minimizers are only kept for successful solves, so the last one belongs
  // to the last record without an error
  const SampledFunction& u = minimizers.back();
  double eps = records.back().eps;
  for (auto it = records.rbegin(); it != records.rend(); ++it)
    if (it->error.empty()) {
      eps = it->eps;
      break;
    }

  Chart b;
  b.title = "minimizer and forcing, eps = " + format_double(eps);
  b.x_label = "x";
  b.y_label = "u";
  const SampledFunction f = forcing.sample(u.size());
  Series fs{"forcing f", {}, {}, false, false}, us{"minimizer u", {}, {}, false, false};
  for (std::size_t i = 0; i < u.size(); ++i) {
    fs.x.push_back(u.x(i));
    fs.y.push_back(f[i]);
    us.x.push_back(u.x(i));
    us.y.push_back(u[i]);
  }
  b.series.push_back(std::move(fs));
  b.series.push_back(std::move(us));
  write_file(dir + "/minimizer.svg", render_svg(b));
  written.push_back(dir + "/minimizer.svg");

  if (!cfg.centers.empty()) {
    const double c = cfg.centers.front();
    const double w = omega(eps);
    const double W = std::min(cfg.halfwidth, 0.95 * std::min(c, 1.0 - c) / w);
    const BlowUp bu = extract_blowup(u, f, c, eps, W, BlowUpKind::fake);
    const StaircaseFit fit = fit_staircase(bu, cfg.beta, forcing.derivative(c));
    const Staircase st = translate(fit.H, fit.V, fit.best_kind, fit.tau0);
    Chart ch;
    ch.title = "fake blow-up at x = " + format_double(c) + ", eps = " + format_double(eps);
    ch.x_label = "y";
    ch.y_label = "(u(c + omega y) - f(c)) / omega";
    Series ps{"blow-up", {}, {}, false, false};
    Series ss{"fitted staircase (" + to_string(fit.best_kind) + ")", {}, {}, false, true};
    const SampledFunction& p = bu.profile;
    for (std::size_t i = 0; i < p.size(); ++i) {
      ps.x.push_back(p.x(i));
      ps.y.push_back(p[i]);
    }
    const std::size_t m = 800;
    for (std::size_t i = 0; i <= m; ++i) {
      const double y = p.left() + p.length() * double(i) / double(m);
      ss.x.push_back(y);
      ss.y.push_back(st.value(y));
    }
    ch.series.push_back(std::move(ps));
    ch.series.push_back(std::move(ss));
    write_file(dir + "/blowup.svg", render_svg(ch));
    written.push_back(dir + "/blowup.svg");
  }
  return written;
}

}  // namespace pmlab
