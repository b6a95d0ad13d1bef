#pragma once

#include <cstddef>
#include <vector>

namespace opg {

// Neumaier-compensated sum. Keeps probability bookkeeping near machine
// precision for arm counts up to ~1e4, where a naive sum would drift past
// the 1e-12 simplex tolerance.
double compensated_sum(const double* xs, std::size_t n);
double compensated_sum(const std::vector<double>& xs);

double compensated_dot(const std::vector<double>& a, const std::vector<double>& b);

double max_abs(const std::vector<double>& xs);

// Lowest index wins on ties.
std::size_t argmax_index(const std::vector<double>& xs);

}  // namespace opg
