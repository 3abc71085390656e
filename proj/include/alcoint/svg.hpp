#pragma once

#include <string>
#include <vector>

#include "alcoint/montecarlo.hpp"

namespace alcoint::svg {

struct Series {
  std::string label;
  mc::KdeCurve curve;
  std::string color;
  std::string dash;  // empty = solid
};

// Density figure for one experiment cell: continuous curves plus an atom
// spike drawn at height atom_prob. Atom locations beyond the left edge are
// clipped to -4 and flagged with an arrow glyph (plot only; data files keep
// the exact value). Output bytes are deterministic for fixed inputs.
struct DensityFigure {
  std::vector<Series> series;
  double atom_prob = 0.0;
  double atom_location = 0.0;
  bool has_atom = false;
  std::string title;
  double clip_left = -4.0;
};

std::string render_density_figure(const DensityFigure& fig);

}  // namespace alcoint::svg
