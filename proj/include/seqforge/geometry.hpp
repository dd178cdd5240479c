#pragma once

// Geometry kernel: alpha-carbon structures, optimal rigid superposition
// (Kabsch), RMSD and TM-score. Residue correspondence is always i <-> i;
// both chains must have equal length.

#include <string>
#include <vector>

#include "seqforge/common.hpp"

namespace seqforge::geom {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm2() const { return dot(*this); }
    double norm() const;
};

struct Mat3 {
    // m[r][c]
    double m[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

    Vec3 apply(const Vec3& v) const {
        return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
                m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
                m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
    }
    Mat3 transpose() const;
    Mat3 mul(const Mat3& o) const;
    double det() const;

    static Mat3 rot_x(double a);
    static Mat3 rot_y(double a);
    static Mat3 rot_z(double a);
    // Rotation from deterministic uniform-ish angles; proper (det +1).
    static Mat3 euler(double a, double b, double c);
};

enum class StructureSource { SyntheticNative, OraclePredicted };

// Ordered alpha-carbon trace. Coordinates in Angstrom.
struct Structure {
    std::vector<Vec3> coords;
    std::string id;
    bool single_chain = true;
    StructureSource source = StructureSource::SyntheticNative;

    int length() const { return static_cast<int>(coords.size()); }

    // Checks finiteness, L >= 2, and (when check_bonds) the consecutive
    // CA-CA virtual-bond distance bound [2.0, 6.0] Angstrom.
    void validate(bool check_bonds = true) const;

    Structure transformed(const Mat3& rot, const Vec3& trans) const;
};

struct Superposition {
    Mat3 rotation;        // proper, det +1
    Vec3 translation;
    double rmsd = 0.0;
    // Set when the point sets are rank-deficient (coincident or collinear);
    // the transform is still the best-effort optimum.
    bool degenerate = false;

    Vec3 apply(const Vec3& p) const { return rotation.apply(p) + translation; }
};

struct TmScore {
    double value = 0.0;
    int aligned_length = 0;
    double d0 = 0.0;
};

// Optimal rigid superposition of mobile onto target (minimum RMSD over
// proper rotations + translations). Lengths must match.
Superposition kabsch_superpose(const Structure& mobile, const Structure& target);

// Same, restricted to an index subset (used by the TM-score search).
Superposition kabsch_superpose_subset(const std::vector<Vec3>& mobile, const std::vector<Vec3>& target,
                                      const std::vector<int>& subset);

// TM-score normalization length: max(0.5, 1.24*(L-15)^(1/3) - 1.8).
double compute_d0(int L);

// Sum_i 1/(1 + (d_i/d0)^2) / L for a fixed transform of `predicted`.
double tm_score_given_transform(const Structure& predicted, const Structure& native, const Mat3& rot,
                                const Vec3& trans, double d0);

// TM-score with fixed i<->i correspondence: fragment-seeded superposition
// search (lengths L, L/2, L/4, ... >= 4 at stride max(1, L/10)) followed by
// iterative refinement on the close-pair subset, max over all candidates.
TmScore tm_score(const Structure& predicted, const Structure& native);

// RMSD after optimal superposition.
double rmsd(const Structure& predicted, const Structure& native);

}  // namespace seqforge::geom
