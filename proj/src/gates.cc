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

#include "cqed/gates.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cqed {

namespace {

constexpr std::array<std::string_view, 12> kNames = {
    "X", "H", "RX", "RY", "RZ", "CRY", "CNOT", "CZ", "ZZ", "MS_XX", "SWAP", "U1q"};

}  // namespace

std::string_view gate_name(GateKind kind) {
    return kNames[(size_t)kind];
}

std::optional<GateKind> parse_gate_kind(std::string_view name) {
    for (size_t k = 0; k < kNames.size(); k++) {
        if (kNames[k] == name) {
            return (GateKind)k;
        }
    }
    return std::nullopt;
}

int gate_arity(GateKind kind) {
    switch (kind) {
        case GateKind::CRY:
        case GateKind::CNOT:
        case GateKind::CZ:
        case GateKind::ZZ:
        case GateKind::MS_XX:
        case GateKind::SWAP:
            return 2;
        default:
            return 1;
    }
}

int gate_param_count(GateKind kind) {
    switch (kind) {
        case GateKind::RX:
        case GateKind::RY:
        case GateKind::RZ:
        case GateKind::CRY:
        case GateKind::ZZ:
        case GateKind::MS_XX:
            return 1;
        case GateKind::U1q:
            return 3;
        default:
            return 0;
    }
}

Mat2 rx_matrix(double t) {
    Mat2 m;
    m << std::cos(t / 2), cdouble(0, -std::sin(t / 2)), cdouble(0, -std::sin(t / 2)), std::cos(t / 2);
    return m;
}

Mat2 ry_matrix(double t) {
    Mat2 m;
    m << std::cos(t / 2), -std::sin(t / 2), std::sin(t / 2), std::cos(t / 2);
    return m;
}

Mat2 rz_matrix(double t) {
    Mat2 m;
    m << std::polar(1.0, -t / 2), 0, 0, std::polar(1.0, t / 2);
    return m;
}

Mat2 u1q_matrix(double theta, double phi, double lambda) {
    double c = std::cos(theta / 2), s = std::sin(theta / 2);
    Mat2 m;
    m << c, -std::polar(s, lambda), std::polar(s, phi), std::polar(c, phi + lambda);
    return m;
}

Mat2 pauli_matrix(int which) {
    Mat2 m;
    switch (which) {
        case 0:
            m << 1, 0, 0, 1;
            break;
        case 1:
            m << 0, 1, 1, 0;
            break;
        case 2:
            m << 0, cdouble(0, -1), cdouble(0, 1), 0;
            break;
        case 3:
            m << 1, 0, 0, -1;
            break;
        default:
            throw std::invalid_argument("pauli index out of range");
    }
    return m;
}

Mat4 kron(const Mat2 &a, const Mat2 &b) {
    Mat4 out;
    for (int i = 0; i < 2; i++) {
        for (int j = 0; j < 2; j++) {
            out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
        }
    }
    return out;
}

Eigen::MatrixXcd Gate::matrix() const {
    const double t = params[0];
    switch (kind) {
        case GateKind::X:
            return pauli_matrix(1);
        case GateKind::H: {
            Mat2 m;
            m << 1, 1, 1, -1;
            return m / std::sqrt(2.0);
        }
        case GateKind::RX:
            return rx_matrix(t);
        case GateKind::RY:
            return ry_matrix(t);
        case GateKind::RZ:
            return rz_matrix(t);
        case GateKind::U1q:
            return u1q_matrix(params[0], params[1], params[2]);
        case GateKind::CRY: {
            Mat4 m = Mat4::Identity();
            m.block<2, 2>(2, 2) = ry_matrix(t);
            return m;
        }
        case GateKind::CNOT: {
            Mat4 m = Mat4::Zero();
            m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
            return m;
        }
        case GateKind::CZ: {
            Mat4 m = Mat4::Identity();
            m(3, 3) = -1;
            return m;
        }
        case GateKind::ZZ: {
            Mat4 m = Mat4::Zero();
            m(0, 0) = m(3, 3) = std::polar(1.0, -t / 2);
            m(1, 1) = m(2, 2) = std::polar(1.0, t / 2);
            return m;
        }
        case GateKind::MS_XX: {
            Mat4 xx = kron(pauli_matrix(1), pauli_matrix(1));
            return std::cos(t / 2) * Mat4::Identity() + cdouble(0, -std::sin(t / 2)) * xx;
        }
        case GateKind::SWAP: {
            Mat4 m = Mat4::Zero();
            m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1;
            return m;
        }
    }
    throw std::invalid_argument("unsupported gate kind");
}

Gate Gate::inverse() const {
    Gate g = *this;
    switch (kind) {
        case GateKind::RX:
        case GateKind::RY:
        case GateKind::RZ:
        case GateKind::CRY:
        case GateKind::ZZ:
        case GateKind::MS_XX:
            g.params[0] = -params[0];
            return g;
        case GateKind::U1q:
            // U1q(t, p, l)^dag = U1q(-t, -l, -p).
            g.params = {-params[0], -params[2], -params[1]};
            return g;
        default:
            return g;  // self-inverse
    }
}

Gate Gate::x(int q) {
    return Gate{GateKind::X, {q, -1}, {}};
}
Gate Gate::h(int q) {
    return Gate{GateKind::H, {q, -1}, {}};
}
Gate Gate::rx(int q, double theta) {
    return Gate{GateKind::RX, {q, -1}, {theta, 0, 0}};
}
Gate Gate::ry(int q, double theta) {
    return Gate{GateKind::RY, {q, -1}, {theta, 0, 0}};
}
Gate Gate::rz(int q, double theta) {
    return Gate{GateKind::RZ, {q, -1}, {theta, 0, 0}};
}
Gate Gate::u1q(int q, double theta, double phi, double lambda) {
    return Gate{GateKind::U1q, {q, -1}, {theta, phi, lambda}};
}
Gate Gate::cry(int control, int target, double theta) {
    return Gate{GateKind::CRY, {control, target}, {theta, 0, 0}};
}
Gate Gate::cnot(int control, int target) {
    return Gate{GateKind::CNOT, {control, target}, {}};
}
Gate Gate::cz(int a, int b) {
    return Gate{GateKind::CZ, {a, b}, {}};
}
Gate Gate::zz(int a, int b, double theta) {
    return Gate{GateKind::ZZ, {a, b}, {theta, 0, 0}};
}
Gate Gate::ms_xx(int a, int b, double theta) {
    return Gate{GateKind::MS_XX, {a, b}, {theta, 0, 0}};
}
Gate Gate::swap(int a, int b) {
    return Gate{GateKind::SWAP, {a, b}, {}};
}

double wrap_angle(double theta) {
    constexpr double two_pi = 2 * std::numbers::pi;
    double r = std::remainder(theta, two_pi);
    if (r <= -std::numbers::pi) {
        r += two_pi;
    }
    return r;
}

std::array<double, 3> u1q_angles(const Mat2 &u) {
    cdouble det = u.determinant();
    Mat2 v = u / std::sqrt(det);
    // v = Rz(phi) Ry(theta) Rz(lambda) = [[e^{-i(p+l)/2} c, ...], [e^{i(p-l)/2} s, ...]].
    double c = std::abs(v(0, 0));
    double s = std::abs(v(1, 0));
    double theta = 2 * std::atan2(s, c);
    double sum, diff;
    if (s < 1e-14) {
        sum = -2 * std::arg(v(0, 0));
        diff = 0;
    } else if (c < 1e-14) {
        sum = 0;
        diff = 2 * std::arg(v(1, 0));
    } else {
        sum = -2 * std::arg(v(0, 0));
        diff = 2 * std::arg(v(1, 0));
    }
    double phi = (sum + diff) / 2;
    double lambda = (sum - diff) / 2;
    return {theta, wrap_angle(phi), wrap_angle(lambda)};
}

double phase_insensitive_distance(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("phase_insensitive_distance: shape mismatch");
    }
    cdouble overlap = (b.adjoint() * a).trace();
    cdouble phase = std::abs(overlap) > 1e-300 ? overlap / std::abs(overlap) : cdouble(1);
    return (a - phase * b).cwiseAbs().maxCoeff();
}

bool is_unitary(const Eigen::MatrixXcd &u, double tol) {
    if (u.rows() != u.cols()) {
        return false;
    }
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(u.rows(), u.cols());
    return (u.adjoint() * u - id).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace cqed
