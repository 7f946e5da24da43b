#pragma once

namespace atomgate {

/// Order-independent sum of doubles.
///
/// Each addend is split at 2^-20 into an integer part (in units of 2^-20) and
/// a remainder (in units of 2^-100); both go into 128-bit integers. Addition is
/// therefore exact, associative and commutative, so any partition of the
/// addends merged in any order yields bit-identical results. Bits below
/// 2^-100 are truncated deterministically. Addends must satisfy |x| < 2^80;
/// at that magnitude up to 2^26 of them fit before the integer part overflows.
class ExactSum {
 public:
  void add(double x) noexcept;
  ExactSum& operator+=(const ExactSum& other) noexcept {
    coarse_ += other.coarse_;
    fine_ += other.fine_;
    return *this;
  }
  long double value() const noexcept;

  friend bool operator==(const ExactSum&, const ExactSum&) = default;

 private:
  __int128 coarse_ = 0;
  __int128 fine_ = 0;
};

}  // namespace atomgate
