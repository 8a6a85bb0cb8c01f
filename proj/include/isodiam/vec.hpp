#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>

#include "isodiam/errors.hpp"

namespace isodiam {

/// Largest supported ambient dimension (so n <= 8 for the curved models).
inline constexpr int kMaxAmbientDim = 9;

/// Fixed-capacity real vector used for ambient coordinates. Lives on the stack;
/// the hot membership loops never allocate.
class Vec {
 public:
  Vec() = default;
  explicit Vec(int size) : size_(checked_size(size)) {}
  Vec(std::initializer_list<double> values) : size_(checked_size(static_cast<int>(values.size()))) {
    std::copy(values.begin(), values.end(), data_.begin());
  }
  static Vec from(std::span<const double> values) {
    Vec v(static_cast<int>(values.size()));
    std::copy(values.begin(), values.end(), v.data_.begin());
    return v;
  }
  static Vec unit(int size, int axis) {
    Vec v(size);
    v[axis] = 1.0;
    return v;
  }

  int size() const noexcept { return size_; }
  double operator[](int i) const noexcept { return data_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) noexcept { return data_[static_cast<std::size_t>(i)]; }
  double back() const noexcept { return data_[static_cast<std::size_t>(size_ - 1)]; }

  const double* begin() const noexcept { return data_.data(); }
  const double* end() const noexcept { return data_.data() + size_; }
  double* begin() noexcept { return data_.data(); }
  double* end() noexcept { return data_.data() + size_; }
  std::span<const double> values() const noexcept { return {data_.data(), static_cast<std::size_t>(size_)}; }

  Vec& operator+=(const Vec& o) {
    require_same(o);
    for (int i = 0; i < size_; ++i) (*this)[i] += o[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    require_same(o);
    for (int i = 0; i < size_; ++i) (*this)[i] -= o[i];
    return *this;
  }
  Vec& operator*=(double s) noexcept {
    for (int i = 0; i < size_; ++i) (*this)[i] *= s;
    return *this;
  }
  Vec& operator/=(double s) noexcept {
    for (int i = 0; i < size_; ++i) (*this)[i] /= s;
    return *this;
  }

  friend bool operator==(const Vec& a, const Vec& b) noexcept {
    return a.size_ == b.size_ && std::equal(a.begin(), a.end(), b.begin());
  }

  void require_same(const Vec& o) const {
    if (o.size_ != size_) throw DimensionMismatch("vector length mismatch");
  }

 private:
  static int checked_size(int size) {
    if (size < 0 || size > kMaxAmbientDim) throw DimensionMismatch("vector length out of supported range");
    return size;
  }

  std::array<double, kMaxAmbientDim> data_{};
  int size_ = 0;
};

inline Vec operator+(Vec a, const Vec& b) { return a += b; }
inline Vec operator-(Vec a, const Vec& b) { return a -= b; }
inline Vec operator-(Vec a) { return a *= -1.0; }
inline Vec operator*(Vec a, double s) { return a *= s; }
inline Vec operator*(double s, Vec a) { return a *= s; }
inline Vec operator/(Vec a, double s) { return a /= s; }

inline double dot(const Vec& a, const Vec& b) {
  a.require_same(b);
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double max_abs_diff(const Vec& a, const Vec& b) {
  a.require_same(b);
  double m = 0.0;
  for (int i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace isodiam
