#pragma once

#include <span>
#include <vector>

namespace pirk {

/// Finite-difference weights at offset 0 for the given derivative of the
/// Lagrange interpolation polynomial through the integer offsets. The
/// caller scales by spacing^(-derivative). Exact for polynomials of
/// degree <= offsets.size() - 1; for centered stencils |offsets| must be
/// accuracy + 1.
std::vector<double> fd_stencil(int derivative, int accuracy,
                               std::span<const int> offsets);

/// Centered stencil of the given even accuracy: offsets -p/2 .. p/2.
std::vector<double> centered_stencil(int derivative, int accuracy);

}  // namespace pirk
