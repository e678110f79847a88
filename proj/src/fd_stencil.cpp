#include "pirk/fd_stencil.hpp"

#include <cmath>
#include <numeric>

#include "pirk/tableau.hpp"

namespace pirk {

std::vector<double> fd_stencil(int derivative, int accuracy,
                               std::span<const int> offsets) {
  const int n = static_cast<int>(offsets.size());
  if (derivative < 1 || derivative > 2)
    throw ConfigError("stencil derivative must be 1 or 2");
  if (accuracy < 1 || n != accuracy + 1)
    throw ConfigError("stencil needs accuracy + 1 offsets");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (offsets[i] == offsets[j])
        throw ConfigError("stencil offsets must be distinct");

  // Fornberg's recurrence, expansion point 0.
  const int m = derivative;
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  c[0][0] = 1.0;
  double c1 = 1.0;
  double c4 = static_cast<double>(offsets[0]);
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = static_cast<double>(offsets[i]);
    for (int j = 0; j < i; ++j) {
      const double c3 = static_cast<double>(offsets[i] - offsets[j]);
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k)
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }

  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][m];
  return w;
}

std::vector<double> centered_stencil(int derivative, int accuracy) {
  if (accuracy < 2 || accuracy > 12 || accuracy % 2 != 0)
    throw ConfigError("centered stencil accuracy must be even, 2..12");
  std::vector<int> offsets(accuracy + 1);
  std::iota(offsets.begin(), offsets.end(), -accuracy / 2);
  return fd_stencil(derivative, accuracy, offsets);
}

}  // namespace pirk
