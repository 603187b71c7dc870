#pragma once

#include <span>

namespace spinorbit::numerics {

/// Compensated (Kahan) running sum. Terms are added in the order given.
template <class T>
class KahanAccumulator {
 public:
  KahanAccumulator() : sum_(0), compensation_(0) {}

  void add(const T& value) {
    T y = value - compensation_;
    T t = sum_ + y;
    compensation_ = (t - sum_) - y;
    sum_ = t;
  }

  KahanAccumulator& operator+=(const T& value) {
    add(value);
    return *this;
  }

  const T& sum() const { return sum_; }

 private:
  T sum_;
  T compensation_;
};

template <class T>
T kahan_sum(std::span<const T> values) {
  KahanAccumulator<T> acc;
  for (const auto& v : values) acc.add(v);
  return acc.sum();
}

}  // namespace spinorbit::numerics
