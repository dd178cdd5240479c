#pragma once

// Dense row-major matrix/vector helpers for the small model weights.
// Shapes here are tiny (tens of rows), so everything is plain loops.

#include <cassert>
#include <cstddef>
#include <vector>

namespace seqforge {

using Vec = std::vector<double>;

struct Mat {
    int rows = 0;
    int cols = 0;
    Vec a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }

    const double* row(int r) const { return a.data() + static_cast<std::size_t>(r) * cols; }
    double* row(int r) { return a.data() + static_cast<std::size_t>(r) * cols; }

    std::size_t size() const { return a.size(); }
    void fill(double v) { a.assign(a.size(), v); }

    bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }
};

// y += M * x
inline void matvec_acc(const Mat& m, const double* x, double* y) {
    for (int r = 0; r < m.rows; ++r) {
        const double* mr = m.row(r);
        double s = 0.0;
        for (int c = 0; c < m.cols; ++c) s += mr[c] * x[c];
        y[r] += s;
    }
}

// y += M^T * x  (x has m.rows entries, y has m.cols entries)
inline void matvec_t_acc(const Mat& m, const double* x, double* y) {
    for (int r = 0; r < m.rows; ++r) {
        const double* mr = m.row(r);
        const double xr = x[r];
        for (int c = 0; c < m.cols; ++c) y[c] += xr * mr[c];
    }
}

// M += w * u * v^T
inline void outer_acc(Mat& m, double w, const double* u, const double* v) {
    for (int r = 0; r < m.rows; ++r) {
        double* mr = m.row(r);
        const double wu = w * u[r];
        for (int c = 0; c < m.cols; ++c) mr[c] += wu * v[c];
    }
}

inline void axpy(double alpha, const Vec& x, Vec& y) {
    assert(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace seqforge
