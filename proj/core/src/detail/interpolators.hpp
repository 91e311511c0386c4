#pragma once

// Boost 1.74's pchip/makima headers call isnan unqualified.
#include <cmath>
using std::isnan;

#include <boost/math/interpolators/makima.hpp>
#include <boost/math/interpolators/pchip.hpp>
