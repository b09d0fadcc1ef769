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

#ifndef CQED_KAK_H
#define CQED_KAK_H

#include "cqed/gates.h"

namespace cqed {

/// CAN(tx, ty, tz) = exp(-i (tx XX + ty YY + tz ZZ)).
Mat4 canonical_gate(double tx, double ty, double tz);

/// u = phase * (k1a (x) k1b) * CAN(tx, ty, tz) * (k2a (x) k2b), with the
/// coordinates in the Weyl chamber pi/4 >= tx >= ty >= |tz|.
struct CanonicalCoords {
    double tx = 0, ty = 0, tz = 0;
    Mat2 k1a = Mat2::Identity(), k1b = Mat2::Identity();
    Mat2 k2a = Mat2::Identity(), k2b = Mat2::Identity();
    cdouble phase = 1;

    Mat4 reassemble() const;
    /// tx + ty + |tz|; proportional to the total two-qubit rotation needed.
    double total_angle() const {
        return tx + ty + std::abs(tz);
    }
    bool in_weyl_chamber(double tol = 1e-9) const;
};

/// Magic (Bell-like) basis in which local gates SU(2) (x) SU(2) become real
/// orthogonal matrices and CAN is diagonal.
const Mat4 &magic_basis();

/// Cartan (KAK) decomposition of a two-qubit unitary. Throws
/// std::invalid_argument if `u` is not unitary within 1e-9.
CanonicalCoords kak_decompose(const Mat4 &u);

/// Splits a 4x4 matrix that is (numerically) a tensor product into its factors.
std::pair<Mat2, Mat2> factor_tensor_product(const Mat4 &k);

}  // namespace cqed

#endif
