#pragma once

#include <string>

#include "afem/estimator.hpp"

namespace afem {

/// Deterministic SVG rendering of a triangulation: one polygon per leaf in
/// handle order, one line per edge in endpoint order. When indicators are
/// given, edge stroke widths scale with the squared indicator value.
std::string render_svg(const Forest& forest, const Triangulation& t, const EdgeSet& es,
                       const IndicatorField* indicators = nullptr);

void emit_svg(const Forest& forest, const Triangulation& t, const EdgeSet& es,
              const IndicatorField* indicators, const std::string& path);

}  // namespace afem
