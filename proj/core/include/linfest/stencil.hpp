#pragma once

#include <cstdint>

#include "linfest/mesh.hpp"
#include "linfest/small_matrix.hpp"

namespace linfest::geom {

// Axis neighbours of one node; diagonal neighbours are plus[a] + plus[b] - center etc.
struct NodeStencil {
    int d = 0;
    std::int64_t center = 0;
    std::int64_t plus[kMaxRealDim]{};
    std::int64_t minus[kMaxRealDim]{};
};

inline NodeStencil node_stencil(const Mesh& mesh, std::int64_t idx) {
    NodeStencil s;
    s.d = mesh.dim();
    s.center = idx;
    if (mesh.is_torus()) {
        int mi[kMaxRealDim];
        mesh.multi_index(idx, mi);
        const int M = mesh.axis_size();
        for (int a = 0; a < s.d; ++a) {
            const std::int64_t st = mesh.stride(a);
            s.plus[a] = idx + (mi[a] + 1 == M ? -(M - 1) * st : st);
            s.minus[a] = idx + (mi[a] == 0 ? (M - 1) * st : -st);
        }
    } else {
        for (int a = 0; a < s.d; ++a) {
            s.plus[a] = idx + mesh.stride(a);
            s.minus[a] = idx - mesh.stride(a);
        }
    }
    return s;
}

// Second-order central-difference real Hessian.
inline void real_hessian(const NodeStencil& s, const double* v, double h, RMat& H) {
    const double ih2 = 1.0 / (h * h);
    const double iq = 0.25 * ih2;
    const double vc = v[s.center];
    H.resize(s.d, s.d);
    for (int a = 0; a < s.d; ++a) {
        H(a, a) = (v[s.plus[a]] - 2.0 * vc + v[s.minus[a]]) * ih2;
        for (int b = a + 1; b < s.d; ++b) {
            const std::int64_t pa = s.plus[a] - s.center, ma = s.minus[a] - s.center;
            const double x = v[s.plus[b] + pa] - v[s.minus[b] + pa] - v[s.plus[b] + ma] +
                             v[s.minus[b] + ma];
            H(a, b) = H(b, a) = x * iq;
        }
    }
}

}  // namespace linfest::geom

namespace linfest::geom {

// Visits every torus node in index order with its periodic stencil.
template <class Fn>
void torus_sweep(const Mesh& mesh, Fn&& fn) {
    const int d = mesh.dim();
    const int M = mesh.axis_size();
    int mi[kMaxRealDim] = {};
    std::int64_t st[kMaxRealDim];
    for (int a = 0; a < d; ++a) st[a] = mesh.stride(a);
    NodeStencil s;
    s.d = d;
    for (std::int64_t idx = 0; idx < mesh.size(); ++idx) {
        s.center = idx;
        for (int a = 0; a < d; ++a) {
            s.plus[a] = idx + (mi[a] + 1 == M ? -(M - 1) * st[a] : st[a]);
            s.minus[a] = idx + (mi[a] == 0 ? (M - 1) * st[a] : -st[a]);
        }
        fn(s);
        for (int a = d - 1; a >= 0; --a) {
            if (++mi[a] < M) break;
            mi[a] = 0;
        }
    }
}

// sum_jk conj(A_jk) v_{j kbar} at one node, A packed; result scaled by 1/h^2.
inline double complex_operator_node(const double* A, int n, const double* x, const NodeStencil& s,
                                    double ih2) {
    const double xc = x[s.center];
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        const int a = 2 * j, b = 2 * j + 1;
        acc += 0.25 * A[j] * (x[s.plus[a]] + x[s.minus[a]] + x[s.plus[b]] + x[s.minus[b]] - 4.0 * xc);
    }
    int off = n;
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            auto mixed = [&](int a, int b) {
                const std::int64_t pa = s.plus[a] - s.center, ma = s.minus[a] - s.center;
                return 0.25 * (x[s.plus[b] + pa] - x[s.minus[b] + pa] - x[s.plus[b] + ma] +
                               x[s.minus[b] + ma]);
            };
            const double re = mixed(2 * j, 2 * k) + mixed(2 * j + 1, 2 * k + 1);
            const double im = mixed(2 * j, 2 * k + 1) - mixed(2 * j + 1, 2 * k);
            acc += 0.5 * (A[off] * re + A[off + 1] * im);
            off += 2;
        }
    return acc * ih2;
}

}  // namespace linfest::geom
