#pragma once

// Shared helpers for the test suites: deterministic random structures,
// rigid transforms, and the independent search oracles the module tests
// compare against.

#include <cmath>
#include <numeric>
#include <vector>

#include "seqforge/fold_oracle.hpp"
#include "seqforge/geometry.hpp"
#include "seqforge/rng.hpp"

namespace seqforge::testsup {

inline geom::Structure random_cloud(int n, Rng& rng, double box = 10.0) {
    geom::Structure s;
    s.id = "cloud";
    for (int i = 0; i < n; ++i)
        s.coords.push_back(geom::Vec3{rng.uniform(-box, box), rng.uniform(-box, box), rng.uniform(-box, box)});
    return s;
}

inline geom::Mat3 random_rotation(Rng& rng) {
    return geom::Mat3::euler(rng.uniform(0.0, 6.283185307179586), rng.uniform(0.0, 6.283185307179586),
                             rng.uniform(0.0, 6.283185307179586));
}

inline geom::Vec3 random_translation(Rng& rng, double box = 20.0) {
    return geom::Vec3{rng.uniform(-box, box), rng.uniform(-box, box), rng.uniform(-box, box)};
}

inline double rmsd_given(const geom::Structure& mobile, const geom::Structure& target, const geom::Mat3& rot,
                         const geom::Vec3& trans) {
    double ss = 0.0;
    for (int i = 0; i < mobile.length(); ++i) {
        const geom::Vec3 moved = rot.apply(mobile.coords[static_cast<std::size_t>(i)]) + trans;
        ss += (moved - target.coords[static_cast<std::size_t>(i)]).norm2();
    }
    return std::sqrt(ss / mobile.length());
}

// Brute-force optimal-superposition RMSD: coarse Euler-angle grid with the
// centroid-matching translation, then shrinking coordinate-descent
// refinement on the angles. Independent of the Kabsch code path.
inline double brute_force_rmsd(const geom::Structure& mobile, const geom::Structure& target) {
    const double two_pi = 6.283185307179586;
    double best = 1e300;
    double best_a = 0, best_b = 0, best_c = 0;

    geom::Vec3 cm{0, 0, 0}, ct{0, 0, 0};
    for (const auto& p : mobile.coords) cm = cm + p;
    for (const auto& p : target.coords) ct = ct + p;
    cm = cm * (1.0 / mobile.length());
    ct = ct * (1.0 / target.length());

    auto eval = [&](double a, double b, double c) {
        const geom::Mat3 r = geom::Mat3::euler(a, b, c);
        const geom::Vec3 t = ct - r.apply(cm);
        return rmsd_given(mobile, target, r, t);
    };

    const int n = 24;
    for (int ia = 0; ia < n; ++ia)
        for (int ib = 0; ib < n; ++ib)
            for (int ic = 0; ic < n / 2; ++ic) {
                const double a = two_pi * ia / n, b = two_pi * ib / n, c = two_pi * ic / n;
                const double v = eval(a, b, c);
                if (v < best) {
                    best = v;
                    best_a = a;
                    best_b = b;
                    best_c = c;
                }
            }

    double step = two_pi / n;
    while (step > 1e-9) {
        bool improved = false;
        for (int axis = 0; axis < 3; ++axis)
            for (double sign : {-1.0, 1.0}) {
                double a = best_a + (axis == 0 ? sign * step : 0.0);
                double b = best_b + (axis == 1 ? sign * step : 0.0);
                double c = best_c + (axis == 2 ? sign * step : 0.0);
                const double v = eval(a, b, c);
                if (v < best - 1e-15) {
                    best = v;
                    best_a = a;
                    best_b = b;
                    best_c = c;
                    improved = true;
                }
            }
        if (!improved) step *= 0.5;
    }
    return best;
}

// Exhaustive TM-score oracle for tiny structures: Kabsch fits on every
// contiguous fragment (all starts, all lengths >= 3), each followed by
// close-pair refinement, plus a dense rotation/translation perturbation
// grid around every fragment fit. Superset of the implementation's
// candidate set.
double tm_oracle(const geom::Structure& predicted, const geom::Structure& native);

// Reference pair construction used against prefs::build_pairs: explicit
// sort-and-slice on (tm, index) keys.
struct RefPair {
    int chosen_index;
    int rejected_index;
};
std::vector<RefPair> reference_pairs(const std::vector<double>& tms);

}  // namespace seqforge::testsup
