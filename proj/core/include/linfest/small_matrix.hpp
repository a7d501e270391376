#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "linfest/mesh.hpp"

namespace linfest::geom {

using cplx = std::complex<double>;
using HMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxComplexDim,
                           kMaxComplexDim>;
using RMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxRealDim,
                           kMaxRealDim>;
using RVec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxRealDim, 1>;

// Packed Hermitian layout: n diagonal reals, then (re, im) of entry (j,k) for j < k.
inline int packed_size(int n) { return n * n; }

inline HMat unpack(const double* p, int n) {
    HMat a(n, n);
    for (int j = 0; j < n; ++j) a(j, j) = p[j];
    int off = n;
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            a(j, k) = cplx(p[off], p[off + 1]);
            a(k, j) = std::conj(a(j, k));
            off += 2;
        }
    return a;
}

inline void pack(const HMat& a, double* p) {
    const int n = static_cast<int>(a.rows());
    for (int j = 0; j < n; ++j) p[j] = a(j, j).real();
    int off = n;
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            const cplx v = 0.5 * (a(j, k) + std::conj(a(k, j)));
            p[off] = v.real();
            p[off + 1] = v.imag();
            off += 2;
        }
}

// Eigen-decomposition of a 2x2 Hermitian matrix, ascending, closed form.
inline void eig2_hermitian(double a, double d, cplx c, double* lam, HMat* vec) {
    const double t = 0.5 * (a - d);
    const double r = std::hypot(t, std::abs(c));
    const double mean = 0.5 * (a + d);
    lam[0] = mean - r;
    lam[1] = mean + r;
    if (!vec) return;
    vec->resize(2, 2);
    if (r == 0.0) {
        vec->setIdentity();
        return;
    }
    cplx v0, v1;
    if (t >= 0.0) {
        v0 = t + r;
        v1 = std::conj(c);
    } else {
        v0 = c;
        v1 = r - t;
    }
    const double nv = std::sqrt(std::norm(v0) + std::norm(v1));
    v0 /= nv;
    v1 /= nv;
    (*vec)(0, 1) = v0;
    (*vec)(1, 1) = v1;
    (*vec)(0, 0) = -std::conj(v1);
    (*vec)(1, 0) = std::conj(v0);
}

// Generalized eigenproblem G v = lambda g v with g positive definite.
// Eigenvalues ascending; columns of vec are g-orthonormal. Returns false if g is not PD.
inline bool pencil_eigen(const HMat& G, const HMat& g, double* lam, HMat* vec) {
    const int n = static_cast<int>(g.rows());
    if (n == 1) {
        const double g0 = g(0, 0).real();
        if (!(g0 > 0.0)) return false;
        lam[0] = G(0, 0).real() / g0;
        if (vec) {
            vec->resize(1, 1);
            (*vec)(0, 0) = 1.0 / std::sqrt(g0);
        }
        return true;
    }
    if (n == 2) {
        const double l11 = g(0, 0).real();
        if (!(l11 > 0.0)) return false;
        const double s11 = std::sqrt(l11);
        const cplx l21 = g(1, 0) / s11;
        const double rem = g(1, 1).real() - std::norm(l21);
        if (!(rem > 0.0)) return false;
        const double l22 = std::sqrt(rem);
        // M = L^{-1} G L^{-*} with L = [[s11, 0], [l21, l22]].
        const double m00 = G(0, 0).real() / l11;
        const cplx y10 = (G(1, 0) - l21 * G(0, 0).real() / s11) / l22;
        const cplx m10 = y10 / s11;
        // row 1 of L^{-1} G: (G(1,:) - l21 * G(0,:)/s11) / l22
        const cplx y11 = (G(1, 1) - l21 * G(0, 1) / s11) / l22;
        const double m11 = (y11 - std::conj(l21) * y10 / s11).real() / l22;
        double tmp[2];
        HMat w;
        eig2_hermitian(m00, m11, std::conj(m10), tmp, vec ? &w : nullptr);
        lam[0] = tmp[0];
        lam[1] = tmp[1];
        if (vec) {
            // v = L^{-*} w
            vec->resize(2, 2);
            for (int c = 0; c < 2; ++c) {
                const cplx x1 = w(1, c) / l22;
                const cplx x0 = (w(0, c) - std::conj(l21) * x1) / s11;
                (*vec)(0, c) = x0;
                (*vec)(1, c) = x1;
            }
        }
        return true;
    }
    Eigen::LLT<HMat> llt(g);
    if (llt.info() != Eigen::Success) return false;
    HMat L = llt.matrixL();
    HMat Linv = L.triangularView<Eigen::Lower>().solve(HMat::Identity(n, n));
    HMat M = Linv * G * Linv.adjoint();
    M = 0.5 * (M + M.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<HMat> es(M, vec ? Eigen::ComputeEigenvectors
                                                : Eigen::EigenvaluesOnly);
    for (int i = 0; i < n; ++i) lam[i] = es.eigenvalues()(i);
    if (vec) *vec = Linv.adjoint() * es.eigenvectors();
    return true;
}

// Real 2n x 2n coefficient C with sum_ab C_ab D_ab v == sum_jk conj(A_jk) v_{j kbar}
// where v_{j kbar} = (v_xjxk + v_yjyk)/4 + i (v_xjyk - v_yjxk)/4.
inline RMat complex_to_real_coeff(const HMat& A) {
    const int n = static_cast<int>(A.rows());
    RMat C(2 * n, 2 * n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            const double re = 0.25 * A(j, k).real();
            const double im = 0.25 * A(j, k).imag();
            C(2 * j, 2 * k) = re;
            C(2 * j + 1, 2 * k + 1) = re;
            C(2 * j, 2 * k + 1) = im;
            C(2 * k + 1, 2 * j) = im;
        }
    return C;
}

// Complex Hessian from the real 2n x 2n Hessian H.
inline HMat complex_hessian(const RMat& H) {
    const int n = static_cast<int>(H.rows()) / 2;
    HMat a(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            a(j, k) = cplx(0.25 * (H(2 * j, 2 * k) + H(2 * j + 1, 2 * k + 1)),
                           0.25 * (H(2 * j, 2 * k + 1) - H(2 * j + 1, 2 * k)));
    return a;
}

}  // namespace linfest::geom
