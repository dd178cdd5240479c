#include "test_support.hpp"

#include <algorithm>

namespace seqforge::testsup {

namespace {

double tm_with(const geom::Structure& predicted, const geom::Structure& native, const geom::Mat3& rot,
               const geom::Vec3& trans, double d0) {
    return geom::tm_score_given_transform(predicted, native, rot, trans, d0);
}

// Same refinement loop as the implementation but written against the
// subset-fit primitive directly; kept here so the oracle's candidate
// enumeration stays independent.
double oracle_refine(const geom::Structure& predicted, const geom::Structure& native, std::vector<int> subset,
                     double d0) {
    const int L = predicted.length();
    const int need = std::min(3, L);
    double best = 0.0;
    for (int iter = 0; iter < 20; ++iter) {
        const geom::Superposition sp = geom::kabsch_superpose_subset(predicted.coords, native.coords, subset);
        best = std::max(best, tm_with(predicted, native, sp.rotation, sp.translation, d0));
        std::vector<int> sel;
        double d_cut = std::clamp(d0, 4.5, 8.0);
        for (;;) {
            sel.clear();
            for (int i = 0; i < L; ++i) {
                const geom::Vec3 moved = sp.apply(predicted.coords[static_cast<std::size_t>(i)]);
                if ((moved - native.coords[static_cast<std::size_t>(i)]).norm() < d_cut) sel.push_back(i);
            }
            if (static_cast<int>(sel.size()) >= need) break;
            d_cut += 0.5;
        }
        if (sel == subset) break;
        subset = std::move(sel);
    }
    return best;
}

}  // namespace

double tm_oracle(const geom::Structure& predicted, const geom::Structure& native) {
    const int L = predicted.length();
    const double d0 = geom::compute_d0(L);
    double best = 0.0;

    const double angles[] = {0.0, -0.02, 0.02, -0.06, 0.06, -0.15, 0.15, -0.35, 0.35};
    const double shifts[] = {0.0, -0.4, 0.4};

    for (int len = 3; len <= L; ++len) {
        for (int start = 0; start + len <= L; ++start) {
            std::vector<int> subset(static_cast<std::size_t>(len));
            std::iota(subset.begin(), subset.end(), start);
            best = std::max(best, oracle_refine(predicted, native, subset, d0));

            // dense perturbation grid around the raw fragment fit
            const geom::Superposition sp = geom::kabsch_superpose_subset(predicted.coords, native.coords, subset);
            for (double ax : angles)
                for (double ay : angles)
                    for (double az : angles) {
                        const geom::Mat3 r = geom::Mat3::euler(ax, ay, az).mul(sp.rotation);
                        for (double sx : shifts)
                            for (double sy : shifts)
                                for (double sz : shifts) {
                                    const geom::Vec3 t = sp.translation + geom::Vec3{sx, sy, sz};
                                    best = std::max(best, tm_with(predicted, native, r, t, d0));
                                }
                    }
        }
    }
    return best;
}

std::vector<RefPair> reference_pairs(const std::vector<double>& tms) {
    std::vector<int> order(tms.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (tms[static_cast<std::size_t>(a)] != tms[static_cast<std::size_t>(b)])
            return tms[static_cast<std::size_t>(a)] > tms[static_cast<std::size_t>(b)];
        return a < b;
    });
    if (order.size() % 2 != 0) order.pop_back();
    std::vector<RefPair> pairs;
    const std::size_t half = order.size() / 2;
    for (std::size_t j = 0; j < half; ++j) pairs.push_back(RefPair{order[j], order[j + half]});
    return pairs;
}

}  // namespace seqforge::testsup
