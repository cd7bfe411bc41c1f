#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace salesmine {

inline constexpr std::size_t kDefaultEmbeddingDim = 256;

// Dense sentence vector. Unit length for non-empty text, all zeros for
// empty text.
struct EmbeddingVector {
  std::vector<double> values;

  std::size_t dim() const noexcept { return values.size(); }
  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  const std::size_t n = a.size() < b.size() ? a.size() : b.size();
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

inline double l2_norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// Zero vectors have cosine 0 with everything.
inline double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  const double na = l2_norm(a.values);
  const double nb = l2_norm(b.values);
  if (na == 0.0 || nb == 0.0) return 0.0;
  double c = dot(a.values, b.values) / (na * nb);
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  return c;
}

inline void normalize_in_place(EmbeddingVector& v) {
  const double n = l2_norm(v.values);
  if (n == 0.0) return;
  for (double& x : v.values) x /= n;
}

}  // namespace salesmine
