#pragma once

#include <array>
#include <cstddef>

namespace ccbif {

// Truncated Taylor polynomial c₀ + c₁t + … + c_{N−1}t^{N−1}. Evaluating a
// polynomial F on x + t·v gives c_k = D^kF(x)(v,…,v)/k!.
template <class T, std::size_t N>
struct Jet {
  std::array<T, N> c;

  Jet() { c.fill(T(0)); }
  explicit Jet(const T& value) {
    c.fill(T(0));
    c[0] = value;
  }
  Jet(const T& value, const T& slope) : Jet(value) {
    if constexpr (N > 1) c[1] = slope;
  }

  friend Jet operator+(const Jet& a, const Jet& b) {
    Jet r;
    for (std::size_t k = 0; k < N; ++k) r.c[k] = a.c[k] + b.c[k];
    return r;
  }
  friend Jet operator-(const Jet& a, const Jet& b) {
    Jet r;
    for (std::size_t k = 0; k < N; ++k) r.c[k] = a.c[k] - b.c[k];
    return r;
  }
  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; i + j < N; ++j) r.c[i + j] = r.c[i + j] + a.c[i] * b.c[j];
    return r;
  }
};

}  // namespace ccbif
