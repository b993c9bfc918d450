#pragma once

#include <cmath>

namespace memdecay {

// Neumaier compensated summation. Keeps long accumulations (means over
// 10^4+ records, metric sums) deterministic at the oracle tolerances.
class CompensatedSum {
 public:
  void add(double v) {
    double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

namespace dd {

// Double-double arithmetic via error-free transformations. Used where a
// plain-double evaluation would be noisier than the quantity being tracked
// (per-pass residual decrements near a fit's fixed point).
struct Dd {
  double hi = 0.0;
  double lo = 0.0;
};

inline Dd two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline Dd two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline Dd add(Dd a, Dd b) {
  Dd s = two_sum(a.hi, b.hi);
  double lo = s.lo + a.lo + b.lo;
  Dd r = two_sum(s.hi, lo);
  return r;
}

inline Dd sub(Dd a, Dd b) { return add(a, {-b.hi, -b.lo}); }

inline Dd mul(Dd a, Dd b) {
  Dd p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return two_sum(p.hi, p.lo);
}

inline double to_double(Dd a) { return a.hi + a.lo; }

}  // namespace dd

}  // namespace memdecay
