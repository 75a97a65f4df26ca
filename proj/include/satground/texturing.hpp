#pragma once

#include <vector>

#include "satground/geometry.hpp"

namespace satground::geom {

// Assigns every face the satellite view that sees it with the largest
// projected area, among views where all three vertices project in-bounds and
// pass a z-buffer visibility test. UVs are the normalized projected
// coordinates mapped into that view's tile of a shelf-packed atlas. Faces no
// view can see sample a mid-gray fallback texel (a strip appended to the
// atlas only when such faces exist).
TriangleMesh compute_texture_coords(const TriangleMesh& mesh, const std::vector<SatelliteView>& views);

}  // namespace satground::geom
