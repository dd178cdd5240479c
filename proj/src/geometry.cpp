#include "seqforge/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace seqforge::geom {

double Vec3::norm() const { return std::sqrt(norm2()); }

Mat3 Mat3::transpose() const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
    return r;
}

Mat3 Mat3::mul(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += m[i][k] * o.m[k][j];
            r.m[i][j] = s;
        }
    return r;
}

double Mat3::det() const {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Mat3 Mat3::rot_x(double a) {
    Mat3 r;
    const double c = std::cos(a), s = std::sin(a);
    r.m[0][0] = 1; r.m[0][1] = 0; r.m[0][2] = 0;
    r.m[1][0] = 0; r.m[1][1] = c; r.m[1][2] = -s;
    r.m[2][0] = 0; r.m[2][1] = s; r.m[2][2] = c;
    return r;
}

Mat3 Mat3::rot_y(double a) {
    Mat3 r;
    const double c = std::cos(a), s = std::sin(a);
    r.m[0][0] = c;  r.m[0][1] = 0; r.m[0][2] = s;
    r.m[1][0] = 0;  r.m[1][1] = 1; r.m[1][2] = 0;
    r.m[2][0] = -s; r.m[2][1] = 0; r.m[2][2] = c;
    return r;
}

Mat3 Mat3::rot_z(double a) {
    Mat3 r;
    const double c = std::cos(a), s = std::sin(a);
    r.m[0][0] = c; r.m[0][1] = -s; r.m[0][2] = 0;
    r.m[1][0] = s; r.m[1][1] = c;  r.m[1][2] = 0;
    r.m[2][0] = 0; r.m[2][1] = 0;  r.m[2][2] = 1;
    return r;
}

Mat3 Mat3::euler(double a, double b, double c) { return rot_z(c).mul(rot_y(b)).mul(rot_x(a)); }

void Structure::validate(bool check_bonds) const {
    if (length() < 2) throw Error("structure '" + id + "': length must be >= 2");
    for (const Vec3& p : coords) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
            throw Error("structure '" + id + "': non-finite coordinate");
    }
    if (check_bonds) {
        for (int i = 1; i < length(); ++i) {
            const double d = (coords[static_cast<std::size_t>(i)] - coords[static_cast<std::size_t>(i - 1)]).norm();
            if (d < 2.0 || d > 6.0)
                throw Error("structure '" + id + "': consecutive CA distance " + std::to_string(d) +
                            " outside [2.0, 6.0] A");
        }
    }
}

Structure Structure::transformed(const Mat3& rot, const Vec3& trans) const {
    Structure out = *this;
    for (Vec3& p : out.coords) p = rot.apply(p) + trans;
    return out;
}

namespace {

Vec3 centroid(const std::vector<Vec3>& pts, const std::vector<int>& subset) {
    Vec3 c;
    for (int i : subset) c = c + pts[static_cast<std::size_t>(i)];
    const double inv = 1.0 / static_cast<double>(subset.size());
    return c * inv;
}

}  // namespace

Superposition kabsch_superpose_subset(const std::vector<Vec3>& mobile, const std::vector<Vec3>& target,
                                      const std::vector<int>& subset) {
    const Vec3 cm = centroid(mobile, subset);
    const Vec3 ct = centroid(target, subset);

    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    for (int i : subset) {
        const Vec3 m = mobile[static_cast<std::size_t>(i)] - cm;
        const Vec3 t = target[static_cast<std::size_t>(i)] - ct;
        h(0, 0) += m.x * t.x; h(0, 1) += m.x * t.y; h(0, 2) += m.x * t.z;
        h(1, 0) += m.y * t.x; h(1, 1) += m.y * t.y; h(1, 2) += m.y * t.z;
        h(2, 0) += m.z * t.x; h(2, 1) += m.z * t.y; h(2, 2) += m.z * t.z;
    }

    Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Matrix3d u = svd.matrixU();
    const Eigen::Matrix3d v = svd.matrixV();
    const Eigen::Vector3d sv = svd.singularValues();

    Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
    if ((v * u.transpose()).determinant() < 0.0) d(2, 2) = -1.0;
    const Eigen::Matrix3d r = v * d * u.transpose();

    Superposition sp;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) sp.rotation.m[i][j] = r(i, j);
    const Vec3 rcm = sp.rotation.apply(cm);
    sp.translation = ct - rcm;
    // rank <= 1 (coincident or collinear points): transform is a valid
    // optimum but not unique
    sp.degenerate = sv(1) <= 1e-9 * std::max(1.0, sv(0));

    double ss = 0.0;
    for (int i : subset) {
        const Vec3 moved = sp.apply(mobile[static_cast<std::size_t>(i)]);
        ss += (moved - target[static_cast<std::size_t>(i)]).norm2();
    }
    sp.rmsd = std::sqrt(ss / static_cast<double>(subset.size()));
    return sp;
}

Superposition kabsch_superpose(const Structure& mobile, const Structure& target) {
    if (mobile.length() != target.length())
        throw CorrespondenceError("kabsch: length mismatch (" + std::to_string(mobile.length()) + " vs " +
                                  std::to_string(target.length()) + ")");
    std::vector<int> all(static_cast<std::size_t>(mobile.length()));
    std::iota(all.begin(), all.end(), 0);
    return kabsch_superpose_subset(mobile.coords, target.coords, all);
}

double compute_d0(int L) {
    const double raw = 1.24 * std::cbrt(static_cast<double>(L) - 15.0) - 1.8;
    return std::max(0.5, raw);
}

double tm_score_given_transform(const Structure& predicted, const Structure& native, const Mat3& rot,
                                const Vec3& trans, double d0) {
    const int L = predicted.length();
    const double inv_d0_sq = 1.0 / (d0 * d0);
    double sum = 0.0;
    for (int i = 0; i < L; ++i) {
        const Vec3 moved = rot.apply(predicted.coords[static_cast<std::size_t>(i)]) + trans;
        const double dsq = (moved - native.coords[static_cast<std::size_t>(i)]).norm2();
        sum += 1.0 / (1.0 + dsq * inv_d0_sq);
    }
    return sum / static_cast<double>(L);
}

namespace {

// One fragment seed followed by close-pair refinement. Returns the best
// score over all iterations; the refit subset is pairs with d < d_cut,
// where d_cut starts at d0 clamped to [4.5, 8] and grows by 0.5 until at
// least min(3, L) pairs are kept.
double refine_from_subset(const Structure& predicted, const Structure& native, std::vector<int> subset,
                          double d0) {
    const int L = predicted.length();
    const int need = std::min(3, L);
    const double d_cut0 = std::clamp(d0, 4.5, 8.0);
    double best = 0.0;
    std::vector<double> dist(static_cast<std::size_t>(L));
    for (int iter = 0; iter < 20; ++iter) {
        const Superposition sp = kabsch_superpose_subset(predicted.coords, native.coords, subset);
        const double inv_d0_sq = 1.0 / (d0 * d0);
        double sum = 0.0;
        for (int i = 0; i < L; ++i) {
            const Vec3 moved = sp.apply(predicted.coords[static_cast<std::size_t>(i)]);
            const double dsq = (moved - native.coords[static_cast<std::size_t>(i)]).norm2();
            dist[static_cast<std::size_t>(i)] = std::sqrt(dsq);
            sum += 1.0 / (1.0 + dsq * inv_d0_sq);
        }
        best = std::max(best, sum / static_cast<double>(L));

        double d_cut = d_cut0;
        std::vector<int> sel;
        for (;;) {
            sel.clear();
            for (int i = 0; i < L; ++i)
                if (dist[static_cast<std::size_t>(i)] < d_cut) sel.push_back(i);
            if (static_cast<int>(sel.size()) >= need) break;
            d_cut += 0.5;
        }
        if (sel == subset) break;
        subset = std::move(sel);
    }
    return best;
}

}  // namespace

TmScore tm_score(const Structure& predicted, const Structure& native) {
    if (predicted.length() != native.length())
        throw CorrespondenceError("tm_score: length mismatch (" + std::to_string(predicted.length()) + " vs " +
                                  std::to_string(native.length()) + ")");
    const int L = predicted.length();
    const double d0 = compute_d0(L);

    // fragment lengths L, L/2, L/4, ...; the last halving is clamped up to
    // a 4-residue minimum
    std::vector<int> lens{L};
    for (int len = L / 2; len >= 1 && lens.back() > 4; len /= 2) {
        lens.push_back(std::max(len, 4));
    }

    const int stride = std::max(1, L / 10);
    double best = 0.0;
    std::vector<int> subset;
    for (int len : lens) {
        for (int start = 0;; start += stride) {
            if (start + len > L) start = L - len;  // always include the final fragment
            subset.resize(static_cast<std::size_t>(len));
            std::iota(subset.begin(), subset.end(), start);
            best = std::max(best, refine_from_subset(predicted, native, subset, d0));
            if (start == L - len) break;
        }
    }
    return TmScore{best, L, d0};
}

double rmsd(const Structure& predicted, const Structure& native) {
    if (predicted.length() != native.length())
        throw CorrespondenceError("rmsd: length mismatch (" + std::to_string(predicted.length()) + " vs " +
                                  std::to_string(native.length()) + ")");
    return kabsch_superpose(predicted, native).rmsd;
}

}  // namespace seqforge::geom
