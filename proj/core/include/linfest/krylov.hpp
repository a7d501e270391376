#pragma once

#include <functional>

#include <Eigen/Core>
#include <Eigen/IterativeLinearSolvers>

namespace linfest::pde {

using Vec = Eigen::VectorXd;
using LinearMap = std::function<void(const Vec& x, Vec& y)>;

// Matrix-free operator usable by Eigen's iterative solvers.
class LinearOperator;

}  // namespace linfest::pde

namespace Eigen::internal {
template <>
struct traits<linfest::pde::LinearOperator> : public traits<Eigen::SparseMatrix<double>> {};
}  // namespace Eigen::internal

namespace linfest::pde {

class LinearOperator : public Eigen::EigenBase<LinearOperator> {
public:
    using Scalar = double;
    using RealScalar = double;
    using StorageIndex = int;
    enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic, IsRowMajor = false };

    LinearOperator(Eigen::Index n, LinearMap apply) : n_(n), apply_(std::move(apply)) {}

    Eigen::Index rows() const { return n_; }
    Eigen::Index cols() const { return n_; }

    template <typename Rhs>
    Eigen::Product<LinearOperator, Rhs, Eigen::AliasFreeProduct> operator*(
        const Eigen::MatrixBase<Rhs>& x) const {
        return Eigen::Product<LinearOperator, Rhs, Eigen::AliasFreeProduct>(*this, x.derived());
    }

    void apply(const Vec& x, Vec& y) const { apply_(x, y); }
    Vec& scratch() const { return scratch_; }

private:
    Eigen::Index n_;
    LinearMap apply_;
    mutable Vec scratch_;
};

// Preconditioner wrapping an arbitrary linear map.
class FunctionPreconditioner {
public:
    FunctionPreconditioner() = default;
    template <typename M>
    explicit FunctionPreconditioner(const M&) {}
    void set(LinearMap m) { map_ = std::move(m); }
    template <typename M>
    FunctionPreconditioner& analyzePattern(const M&) { return *this; }
    template <typename M>
    FunctionPreconditioner& factorize(const M&) { return *this; }
    template <typename M>
    FunctionPreconditioner& compute(const M&) { return *this; }
    Vec solve(const Vec& b) const {
        if (!map_) return b;
        Vec y(b.size());
        map_(b, y);
        return y;
    }
    Eigen::ComputationInfo info() { return Eigen::Success; }

private:
    LinearMap map_;
};

struct KrylovResult {
    long iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

// BiCGSTAB with x as initial guess; stops when |b - Ax| <= tol |b|.
KrylovResult bicgstab(const LinearOperator& A, const LinearMap& precond, const Vec& b, Vec& x,
                      double tol, long max_iterations);

}  // namespace linfest::pde

namespace Eigen::internal {

template <typename Rhs>
struct generic_product_impl<linfest::pde::LinearOperator, Rhs, SparseShape, DenseShape, GemvProduct>
    : generic_product_impl_base<linfest::pde::LinearOperator, Rhs,
                                generic_product_impl<linfest::pde::LinearOperator, Rhs>> {
    using Scalar = typename Product<linfest::pde::LinearOperator, Rhs>::Scalar;

    template <typename Dest>
    static void scaleAndAddTo(Dest& dst, const linfest::pde::LinearOperator& lhs, const Rhs& rhs,
                              const Scalar& alpha) {
        linfest::pde::Vec& tmp = lhs.scratch();
        tmp.resize(lhs.rows());
        lhs.apply(rhs, tmp);
        dst.noalias() += alpha * tmp;
    }
};

}  // namespace Eigen::internal
