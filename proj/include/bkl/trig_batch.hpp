#pragma once

#include <cstddef>

namespace bkl {

/// s[k] = sin(x[k]), c[k] = cos(x[k]) for k < n. Built with vectorised libm
/// variants; results may differ from std::sin/std::cos in the last few ulps.
void sincos_batch(const double* x, double* s, double* c, std::size_t n);

}  // namespace bkl
