#include "atomgate/exact_sum.hpp"

#include <cmath>

namespace atomgate {

void ExactSum::add(double x) noexcept {
  const double scaled = x * 0x1p20;
  const double whole = std::trunc(scaled);
  const double frac = scaled - whole;  // exact: the fractional part of a double
  coarse_ += static_cast<__int128>(whole);
  fine_ += static_cast<__int128>(frac * 0x1p80);
}

long double ExactSum::value() const noexcept {
  return static_cast<long double>(coarse_) * 0x1p-20L + static_cast<long double>(fine_) * 0x1p-100L;
}

}  // namespace atomgate
