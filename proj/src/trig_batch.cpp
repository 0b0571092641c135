// Compiled with -ffast-math (see CMakeLists.txt) so the loop maps onto the
// SIMD sin/cos entry points of libmvec. Keep anything else out of this file.
#include "bkl/trig_batch.hpp"

#include <cmath>

namespace bkl {

void sincos_batch(const double* x, double* s, double* c, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    s[k] = std::sin(x[k]);
    c[k] = std::cos(x[k]);
  }
}

}  // namespace bkl
