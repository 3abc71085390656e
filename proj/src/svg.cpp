#include "alcoint/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "alcoint/errors.hpp"

namespace alcoint::svg {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 52, kRight = 16, kTop = 34, kBottom = 40;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// round tick step to 1/2/5 * 10^m
double tick_step(double span) {
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double frac = raw / mag;
  if (frac < 1.5) return mag;
  if (frac < 3.5) return 2.0 * mag;
  if (frac < 7.5) return 5.0 * mag;
  return 10.0 * mag;
}

}  // namespace

std::string render_density_figure(const DensityFigure& fig) {
  if (fig.series.empty() && !fig.has_atom)
    throw ConfigError("figure needs at least one curve or an atom");

  double xmin = 0.0, xmax = 0.0, ymax = 0.0;
  bool have_range = false;
  for (const auto& s : fig.series) {
    if (s.curve.x.size() == 0) continue;
    const double lo = s.curve.x.minCoeff(), hi = s.curve.x.maxCoeff();
    xmin = have_range ? std::min(xmin, lo) : lo;
    xmax = have_range ? std::max(xmax, hi) : hi;
    ymax = std::max(ymax, s.curve.density.maxCoeff());
    have_range = true;
  }
  double atom_x = fig.atom_location;
  bool clipped = false;
  if (fig.has_atom) {
    if (atom_x < fig.clip_left) {
      atom_x = fig.clip_left;
      clipped = true;
    }
    xmin = have_range ? std::min(xmin, atom_x) : atom_x - 1.0;
    xmax = have_range ? std::max(xmax, atom_x) : atom_x + 1.0;
    ymax = std::max(ymax, fig.atom_prob);
    have_range = true;
  }
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  if (!(ymax > 0.0)) ymax = 1.0;
  ymax *= 1.08;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return kTop + ph - y / ymax * ph; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";

  // axes
  out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop + ph) << "\" x2=\""
      << num(kLeft + pw) << "\" y2=\"" << num(kTop + ph)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft)
      << "\" y2=\"" << num(kTop + ph) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

  const double xstep = tick_step(xmax - xmin);
  for (double t = std::ceil(xmin / xstep) * xstep; t <= xmax + 1e-12 * xstep; t += xstep) {
    out << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(kTop + ph) << "\" x2=\""
        << num(px(t)) << "\" y2=\"" << num(kTop + ph + 4)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << num(px(t)) << "\" y=\"" << num(kTop + ph + 16)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << num(t)
        << "</text>\n";
  }
  const double ystep = tick_step(ymax);
  for (double t = 0.0; t <= ymax + 1e-12 * ystep; t += ystep) {
    out << "<line x1=\"" << num(kLeft - 4) << "\" y1=\"" << num(py(t)) << "\" x2=\""
        << num(kLeft) << "\" y2=\"" << num(py(t))
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << num(kLeft - 7) << "\" y=\"" << num(py(t) + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << num(t)
        << "</text>\n";
  }

  for (const auto& s : fig.series) {
    if (s.curve.x.size() == 0) continue;
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
    if (!s.dash.empty()) out << " stroke-dasharray=\"" << s.dash << "\"";
    out << " points=\"";
    for (int i = 0; i < s.curve.x.size(); ++i) {
      if (i) out << ' ';
      out << num(px(s.curve.x(i))) << ',' << num(py(s.curve.density(i)));
    }
    out << "\"/>\n";
  }

  if (fig.has_atom && fig.atom_prob > 0.0) {
    const double ax = px(atom_x);
    out << "<line x1=\"" << num(ax) << "\" y1=\"" << num(py(0)) << "\" x2=\"" << num(ax)
        << "\" y2=\"" << num(py(fig.atom_prob))
        << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    out << "<circle cx=\"" << num(ax) << "\" cy=\"" << num(py(fig.atom_prob))
        << "\" r=\"3\" fill=\"black\"/>\n";
    if (clipped) {
      const double ay = py(fig.atom_prob);
      out << "<path d=\"M " << num(ax - 14) << ' ' << num(ay) << " L " << num(ax - 4) << ' '
          << num(ay - 5) << " L " << num(ax - 4) << ' ' << num(ay + 5)
          << " Z\" fill=\"black\"/>\n";
    }
  }

  double ly = kTop + 6;
  for (const auto& s : fig.series) {
    out << "<line x1=\"" << num(kLeft + pw - 120) << "\" y1=\"" << num(ly) << "\" x2=\""
        << num(kLeft + pw - 96) << "\" y2=\"" << num(ly) << "\" stroke=\"" << s.color
        << "\" stroke-width=\"1.5\"";
    if (!s.dash.empty()) out << " stroke-dasharray=\"" << s.dash << "\"";
    out << "/>\n";
    out << "<text x=\"" << num(kLeft + pw - 90) << "\" y=\"" << num(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
    ly += 15;
  }

  if (!fig.title.empty()) {
    out << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kTop - 12)
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">"
        << fig.title << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace alcoint::svg
