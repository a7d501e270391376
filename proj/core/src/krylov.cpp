#include "linfest/krylov.hpp"

namespace linfest::pde {

KrylovResult bicgstab(const LinearOperator& A, const LinearMap& precond, const Vec& b, Vec& x,
                      double tol, long max_iterations) {
    Eigen::BiCGSTAB<LinearOperator, FunctionPreconditioner> solver;
    solver.preconditioner().set(precond);
    solver.compute(A);
    solver.setTolerance(tol);
    solver.setMaxIterations(max_iterations);
    x = solver.solveWithGuess(b, x);
    KrylovResult r;
    r.iterations = solver.iterations();
    r.relative_residual = solver.error();
    r.converged = solver.error() <= tol;
    return r;
}

}  // namespace linfest::pde
