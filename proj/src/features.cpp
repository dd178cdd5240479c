#include "seqforge/features.hpp"

#include <cmath>

namespace seqforge::model {

FeatureMatrix compute_features(const geom::Structure& s) {
    const int L = s.length();
    FeatureMatrix f;
    f.length = L;
    f.data.assign(static_cast<std::size_t>(L) * kFeatureDim, 0.0);

    const auto& x = s.coords;
    for (int i = 0; i < L; ++i) {
        double* row = f.data.data() + static_cast<std::size_t>(i) * kFeatureDim;
        for (int k = 1; k <= 4; ++k) {
            const double norm = 1.0 / (3.8 * k);
            if (i - k >= 0)
                row[2 * (k - 1)] = (x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i - k)]).norm() * norm;
            if (i + k < L)
                row[2 * (k - 1) + 1] =
                    (x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i + k)]).norm() * norm;
        }
        int contacts = 0;
        for (int j = 0; j < L; ++j) {
            if (std::abs(i - j) < 3) continue;
            if ((x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)]).norm2() < 64.0) ++contacts;
        }
        row[8] = static_cast<double>(contacts) / L;
        row[9] = static_cast<double>(i + 1) / L;
        if (i > 0 && i + 1 < L) {
            const geom::Vec3 u = x[static_cast<std::size_t>(i + 1)] - x[static_cast<std::size_t>(i)];
            const geom::Vec3 v = x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i - 1)];
            row[10] = u.dot(v) / (u.norm() * v.norm());
        }
        row[11] = 1.0;
    }
    return f;
}

}  // namespace seqforge::model
