#pragma once

#include <span>

namespace stowardrop {

// Euclidean projection of `values` onto the probability simplex, in place.
void project_to_simplex(std::span<double> values);

}  // namespace stowardrop
