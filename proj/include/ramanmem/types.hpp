#pragma once

#include <complex>

namespace ramanmem {

using cdouble = std::complex<double>;

} // namespace ramanmem
