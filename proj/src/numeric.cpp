#include "opg/numeric.hpp"

#include <cmath>
#include <cstdlib>

namespace opg {

double compensated_sum(const double* xs, std::size_t n) {
  double sum = 0.0;
  double comp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = xs[i];
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

double compensated_sum(const std::vector<double>& xs) {
  return compensated_sum(xs.data(), xs.size());
}

double compensated_dot(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double sum = 0.0;
  double comp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = a[i] * b[i];
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

double max_abs(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) {
    const double a = std::abs(x);
    if (a > m) m = a;
  }
  return m;
}

std::size_t argmax_index(const std::vector<double>& xs) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (xs[i] > xs[best]) best = i;
  }
  return best;
}

}  // namespace opg
