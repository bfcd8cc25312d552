#include "mta/rng.hpp"

#include <cmath>

namespace mta {

double KeyedRng::next_normal() {
  // Box-Muller; u1 is kept away from zero so the log stays finite.
  double u1 = next_unit();
  const double u2 = next_unit();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  return r * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace mta
