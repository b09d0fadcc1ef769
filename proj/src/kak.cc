// Copyright 2026 The cqedsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cqed/kak.h"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cqed {

namespace {

constexpr double kQuarterPi = std::numbers::pi / 4;
constexpr double kHalfPi = std::numbers::pi / 2;

Mat4 pauli_pair(int axis) {
    Mat2 p = pauli_matrix(axis + 1);
    return kron(p, p);
}

Mat2 s_gate() {
    Mat2 m;
    m << 1, 0, 0, cdouble(0, 1);
    return m;
}

Mat2 h_gate() {
    Mat2 m;
    m << 1, 1, 1, -1;
    return m / std::sqrt(2.0);
}

// Real orthogonal P (det +1) diagonalizing the complex symmetric unitary m.
// Re(m) and Im(m) commute, so a generic real combination shares their
// eigenvectors; near-degenerate clusters of the combination are re-split using
// a second combination restricted to the cluster.
Eigen::Matrix4d simultaneous_eigenbasis(const Mat4 &m) {
    const Eigen::Matrix4d re = m.real();
    const Eigen::Matrix4d im = m.imag();
    const double c1 = 0.7390851332151607;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(re + c1 * im);
    Eigen::Matrix4d p = solver.eigenvectors();
    Eigen::Vector4d vals = solver.eigenvalues();

    int start = 0;
    while (start < 4) {
        int end = start + 1;
        while (end < 4 && vals[end] - vals[end - 1] < 1e-6) {
            end++;
        }
        int size = end - start;
        if (size > 1) {
            Eigen::MatrixXd q = p.middleCols(start, size);
            const double c2 = -1.6180339887498949;
            Eigen::MatrixXd sub = q.transpose() * (im + c2 * re) * q;
            sub = (sub + sub.transpose()) / 2;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> inner(sub);
            p.middleCols(start, size) = q * inner.eigenvectors();
        }
        start = end;
    }
    if (p.determinant() < 0) {
        p.col(0) *= -1;
    }
    return p;
}

// Tracks u = phase * k1 * CAN(t) * k2 while the coordinates are canonicalized.
struct Decomposition {
    Mat4 k1, k2;
    double t[3];
    cdouble phase;

    // CAN(t) = CAN(t - k pi/2 e_j) * exp(-i k pi/2 P_j P_j).
    void shift(int axis, int k) {
        if (k == 0) {
            return;
        }
        double a = k * kHalfPi;
        Mat4 f = std::cos(a) * Mat4::Identity() + cdouble(0, -std::sin(a)) * pauli_pair(axis);
        k2 = f * k2;
        t[axis] -= a;
    }

    // With CAN(t) = L CAN(t') L^dag, absorb L into the outer locals.
    void conjugate(const Mat4 &l, double nx, double ny, double nz) {
        k1 = k1 * l;
        k2 = l.adjoint() * k2;
        t[0] = nx;
        t[1] = ny;
        t[2] = nz;
    }

    void swap_axes(int i, int j) {
        if (i > j) {
            std::swap(i, j);
        }
        double x = t[0], y = t[1], z = t[2];
        if (i == 0 && j == 1) {
            Mat2 s = s_gate();
            conjugate(kron(s, s), y, x, z);
        } else if (i == 1 && j == 2) {
            Mat2 r = rx_matrix(kHalfPi);
            conjugate(kron(r, r), x, z, y);
        } else {
            Mat2 h = h_gate();
            conjugate(kron(h, h), z, y, x);
        }
    }

    // Negates the two axes other than `keep` (conjugation by P_keep (x) I).
    void negate_pair(int keep) {
        Mat4 l = kron(pauli_matrix(keep + 1), Mat2::Identity());
        double n[3] = {-t[0], -t[1], -t[2]};
        n[keep] = t[keep];
        conjugate(l, n[0], n[1], n[2]);
    }
};

}  // namespace

Mat4 canonical_gate(double tx, double ty, double tz) {
    // XX, YY, ZZ commute, and each squares to I.
    Mat4 out = Mat4::Identity();
    const double ts[3] = {tx, ty, tz};
    for (int a = 0; a < 3; a++) {
        out = out * (std::cos(ts[a]) * Mat4::Identity() + cdouble(0, -std::sin(ts[a])) * pauli_pair(a));
    }
    return out;
}

const Mat4 &magic_basis() {
    static const Mat4 b = [] {
        const double r = 1 / std::sqrt(2.0);
        const cdouble i(0, 1);
        Mat4 m;
        // Columns: (|00>+|11>), i(|00>-|11>), i(|01>+|10>), (|01>-|10>), all / sqrt(2).
        m << r, i * r, 0, 0,
             0, 0, i * r, r,
             0, 0, i * r, -r,
             r, -i * r, 0, 0;
        return m;
    }();
    return b;
}

Mat4 CanonicalCoords::reassemble() const {
    return phase * kron(k1a, k1b) * canonical_gate(tx, ty, tz) * kron(k2a, k2b);
}

bool CanonicalCoords::in_weyl_chamber(double tol) const {
    return tx <= kQuarterPi + tol && tx >= ty - tol && ty >= std::abs(tz) - tol;
}

std::pair<Mat2, Mat2> factor_tensor_product(const Mat4 &k) {
    int bi = 0, bj = 0;
    double best = -1;
    for (int i = 0; i < 2; i++) {
        for (int j = 0; j < 2; j++) {
            double nrm = k.block<2, 2>(2 * i, 2 * j).norm();
            if (nrm > best) {
                best = nrm;
                bi = i;
                bj = j;
            }
        }
    }
    Mat2 blk = k.block<2, 2>(2 * bi, 2 * bj);
    Mat2 b = blk / std::sqrt(blk.determinant());
    Mat2 a;
    for (int i = 0; i < 2; i++) {
        for (int j = 0; j < 2; j++) {
            a(i, j) = (b.adjoint() * k.block<2, 2>(2 * i, 2 * j)).trace() / 2.0;
        }
    }
    return {a, b};
}

CanonicalCoords kak_decompose(const Mat4 &u) {
    if (!is_unitary(u, 1e-9)) {
        throw std::invalid_argument("kak_decompose: input is not unitary");
    }
    const Mat4 &b = magic_basis();
    cdouble det = u.determinant();
    cdouble root = std::pow(det, 0.25);
    Mat4 us = u / root;
    Mat4 ub = b.adjoint() * us * b;
    Mat4 m = ub.transpose() * ub;

    Eigen::Matrix4d p = simultaneous_eigenbasis(m);
    Mat4 pc = p.cast<cdouble>();
    Mat4 d = pc.transpose() * m * pc;
    double phi[4];
    for (int k = 0; k < 4; k++) {
        phi[k] = std::arg(d(k, k)) / 2;
    }
    auto left_factor = [&] {
        Eigen::Vector4cd inv;
        for (int k = 0; k < 4; k++) {
            inv[k] = std::polar(1.0, -phi[k]);
        }
        return Mat4(ub * pc * inv.asDiagonal());
    };
    Mat4 k1b = left_factor();
    if (k1b.determinant().real() < 0) {
        phi[0] += std::numbers::pi;
        k1b = left_factor();
    }

    // Solve phi_k = g - (tx xx_k + ty yy_k + tz zz_k) using the magic basis eigenvalues.
    Eigen::Matrix4d sys;
    for (int k = 0; k < 4; k++) {
        Eigen::Vector4cd col = b.col(k);
        sys(k, 0) = 1;
        for (int a = 0; a < 3; a++) {
            sys(k, a + 1) = -(col.adjoint() * pauli_pair(a) * col)(0, 0).real();
        }
    }
    Eigen::Vector4d rhs(phi[0], phi[1], phi[2], phi[3]);
    Eigen::Vector4d sol = sys.partialPivLu().solve(rhs);

    Decomposition dec;
    dec.k1 = b * k1b * b.adjoint();
    dec.k2 = b * pc.transpose() * b.adjoint();
    dec.t[0] = sol[1];
    dec.t[1] = sol[2];
    dec.t[2] = sol[3];
    dec.phase = root * std::polar(1.0, sol[0]);

    // Fold each coordinate into [-pi/4, pi/4].
    for (int a = 0; a < 3; a++) {
        dec.shift(a, (int)std::lround(dec.t[a] / kHalfPi));
    }
    // Order by magnitude, largest first.
    for (int pass = 0; pass < 2; pass++) {
        for (int a = 0; a < 2; a++) {
            if (std::abs(dec.t[a]) < std::abs(dec.t[a + 1])) {
                dec.swap_axes(a, a + 1);
            }
        }
    }
    // Make tx, ty nonnegative.
    if (dec.t[0] < 0 && dec.t[1] < 0) {
        dec.negate_pair(2);
    } else if (dec.t[0] < 0) {
        dec.negate_pair(1);
    } else if (dec.t[1] < 0) {
        dec.negate_pair(0);
    }
    // On the tx = pi/4 face, (pi/4, ty, tz) ~ (pi/4, ty, -tz); prefer tz >= 0.
    if (std::abs(dec.t[0] - kQuarterPi) < 1e-10 && dec.t[2] < 0) {
        dec.shift(0, 1);
        dec.negate_pair(1);
    }

    CanonicalCoords out;
    out.tx = dec.t[0];
    out.ty = dec.t[1];
    out.tz = dec.t[2];
    auto [k1a, k1b_] = factor_tensor_product(dec.k1);
    auto [k2a, k2b] = factor_tensor_product(dec.k2);
    out.k1a = k1a;
    out.k1b = k1b_;
    out.k2a = k2a;
    out.k2b = k2b;
    Mat4 v = kron(k1a, k1b_) * canonical_gate(out.tx, out.ty, out.tz) * kron(k2a, k2b);
    cdouble overlap = (v.adjoint() * u).trace() / 4.0;
    out.phase = overlap / std::abs(overlap);
    return out;
}

}  // namespace cqed
