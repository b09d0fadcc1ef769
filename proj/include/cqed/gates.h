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

#ifndef CQED_GATES_H
#define CQED_GATES_H

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <optional>
#include <string>
#include <string_view>

namespace cqed {

using cdouble = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

enum class GateKind { X, H, RX, RY, RZ, CRY, CNOT, CZ, ZZ, MS_XX, SWAP, U1q };

std::string_view gate_name(GateKind kind);
std::optional<GateKind> parse_gate_kind(std::string_view name);
int gate_arity(GateKind kind);
int gate_param_count(GateKind kind);

/// A gate applied to one or two qubits.
///
/// Conventions (angles in radians):
///   RX/RY/RZ(t)   = exp(-i t/2 P)
///   CRY(t)        = |0><0| (x) I + |1><1| (x) RY(t), control = q0
///   CNOT          control = q0, target = q1
///   ZZ(t)         = exp(-i t/2 Z(x)Z)
///   MS_XX(t)      = exp(-i t/2 X(x)X)
///   U1q(t, p, l)  = [[cos(t/2), -e^{il} sin(t/2)], [e^{ip} sin(t/2), e^{i(p+l)} cos(t/2)]]
///
/// Two-qubit matrices are indexed by 2 * bit(q0) + bit(q1).
struct Gate {
    GateKind kind = GateKind::X;
    std::array<int, 2> qubits{0, -1};
    std::array<double, 3> params{0, 0, 0};

    int arity() const {
        return gate_arity(kind);
    }
    bool is_two_qubit() const {
        return arity() == 2;
    }
    /// 2x2 or 4x4 unitary.
    Eigen::MatrixXcd matrix() const;
    Gate inverse() const;
    bool operator==(const Gate &other) const = default;

    static Gate x(int q);
    static Gate h(int q);
    static Gate rx(int q, double theta);
    static Gate ry(int q, double theta);
    static Gate rz(int q, double theta);
    static Gate u1q(int q, double theta, double phi, double lambda);
    static Gate cry(int control, int target, double theta);
    static Gate cnot(int control, int target);
    static Gate cz(int a, int b);
    static Gate zz(int a, int b, double theta);
    static Gate ms_xx(int a, int b, double theta);
    static Gate swap(int a, int b);
};

Mat2 rx_matrix(double theta);
Mat2 ry_matrix(double theta);
Mat2 rz_matrix(double theta);
Mat2 u1q_matrix(double theta, double phi, double lambda);
Mat2 pauli_matrix(int which);  // 0 = I, 1 = X, 2 = Y, 3 = Z

/// Angles (theta, phi, lambda) with u = e^{i alpha} U1q(theta, phi, lambda).
std::array<double, 3> u1q_angles(const Mat2 &u);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double theta);

/// Max-abs distance between a and b after removing the best global phase.
double phase_insensitive_distance(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b);

bool is_unitary(const Eigen::MatrixXcd &u, double tol = 1e-9);

Mat4 kron(const Mat2 &a, const Mat2 &b);

}  // namespace cqed

#endif
