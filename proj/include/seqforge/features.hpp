#pragma once

// Per-residue conditioning features derived from the target backbone.
// All entries are rigid-transform invariant (distances, counts, angles).

#include <vector>

#include "seqforge/geometry.hpp"

namespace seqforge::model {

inline constexpr int kFeatureDim = 12;
inline constexpr int kFeatureSpecVersion = 1;

// Row i holds, in order:
//   [0..7]  |x_i - x_{i-k}| and |x_i - x_{i+k}| for k = 1..4, each divided
//           by 3.8*k, zero when i +- k falls off the chain
//   [8]     #{j : |x_i - x_j| < 8 A, |i-j| >= 3} / L
//   [9]     (i+1) / L
//   [10]    cos angle of (x_{i+1}-x_i, x_i-x_{i-1}), zero at the termini
//   [11]    constant 1 bias
struct FeatureMatrix {
    int length = 0;
    std::vector<double> data;  // length x kFeatureDim, row-major

    const double* row(int i) const { return data.data() + static_cast<std::size_t>(i) * kFeatureDim; }
};

FeatureMatrix compute_features(const geom::Structure& s);

}  // namespace seqforge::model
