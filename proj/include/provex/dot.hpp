#pragma once

#include <string>

#include "provex/analysis.hpp"

namespace provex {

// Graphviz rendering with nodes and edges emitted in sorted order. Nodes that
// are not IN under the overlay are dashed; IN nodes are filled by confidence
// bucket (>= 0.7, >= 0.3, below). Edges keep their PROV direction but are laid
// out backwards so sources sit on the left and goals on the right.
std::string export_dot(const Analysis& analysis, const Overlay& overlay);

}  // namespace provex
