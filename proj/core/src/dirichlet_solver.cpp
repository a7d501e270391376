#include "linfest/dirichlet_solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "linfest/ball_multigrid.hpp"
#include "linfest/error.hpp"
#include "linfest/krylov.hpp"
#include "linfest/stencil.hpp"

namespace linfest::pde {

using geom::HermitianField;
using geom::HMat;
using geom::Mesh;
using geom::MeshPtr;
using geom::RMat;
using geom::ScalarField;

DirichletProblem::DirichletProblem(ScalarField d, ScalarField b)
    : density(std::move(d)), boundary(std::move(b)) {
    if (!density.mesh || density.mesh->is_torus())
        throw ParameterError("Dirichlet problem needs a ball mesh");
    if (!boundary.mesh || !boundary.mesh->same_as(*density.mesh))
        throw ParameterError("density and boundary data live on different meshes");
    for (std::int64_t i : density.mesh->interior())
        if (!(density[i] >= 0.0) || !std::isfinite(density[i]))
            throw DomainError("density must be finite and nonnegative");
    for (std::int64_t i : density.mesh->boundary())
        if (!std::isfinite(boundary[i])) throw DomainError("boundary data must be finite");
}

DirichletProblem::DirichletProblem(ScalarField d)
    : DirichletProblem(d, ScalarField(d.mesh, 0.0)) {}

namespace {

// Node-level evaluation of the Monge-Ampere form.
struct NodeEval {
    bool ok = false;
    double logdet = 0.0;
    double det = 0.0;
};

class MaForm {
public:
    MaForm(const Mesh& mesh, bool real) : mesh_(mesh), real_(real), n_(mesh.n()), d_(mesh.dim()) {
        for (int a = 0; a < d_; ++a) stride_[a] = mesh.stride(a);
        ih2_ = 1.0 / (mesh.spacing() * mesh.spacing());
    }

    // Real Hessian at an interior ball node into H (row-major d x d).
    void hessian(const double* u, std::int64_t c, double* H) const {
        const double uc = u[c];
        for (int a = 0; a < d_; ++a) {
            const std::int64_t sa = stride_[a];
            H[a * d_ + a] = (u[c + sa] - 2.0 * uc + u[c - sa]) * ih2_;
            for (int b = a + 1; b < d_; ++b) {
                const std::int64_t sb = stride_[b];
                const double v =
                    0.25 * ih2_ * (u[c + sa + sb] - u[c + sa - sb] - u[c - sa + sb] + u[c - sa - sb]);
                H[a * d_ + b] = H[b * d_ + a] = v;
            }
        }
    }

    // Packed symmetric coefficient (upper triangle) of the linearization, when requested.
    NodeEval eval(const double* ubox, std::int64_t box, double* coeff) const {
        double H[geom::kMaxRealDim * geom::kMaxRealDim];
        hessian(ubox, box, H);
        NodeEval e;
        if (!real_ && n_ == 1) {
            const double t = 0.25 * (H[0] + H[3]);
            if (!(t > 0.0)) return e;
            e.ok = true;
            e.det = t;
            e.logdet = std::log(t);
            if (coeff) {
                const double c = 0.25 / t;
                coeff[0] = c;
                coeff[1] = 0.0;
                coeff[2] = c;
            }
            return e;
        }
        if (!real_ && n_ == 2) {
            // h = [[a, c], [conj c, b]] in the (x1, y1, x2, y2) ordering.
            const double a = 0.25 * (H[0] + H[5]);
            const double b = 0.25 * (H[10] + H[15]);
            const double cr = 0.25 * (H[2] + H[7]);
            const double ci = 0.25 * (H[3] - H[6]);
            const double det = a * b - cr * cr - ci * ci;
            if (!(a > 0.0) || !(det > 0.0)) return e;
            e.ok = true;
            e.det = det;
            e.logdet = std::log(det);
            if (coeff) {
                // A = h^{-1} = [[b, -c], [-conj c, a]] / det, mapped to real coefficients.
                const double q = 0.25 / det;
                const double Ar = -cr * q, Ai = -ci * q;
                // packed order: (0,0) (0,1) (0,2) (0,3) (1,1) (1,2) (1,3) (2,2) (2,3) (3,3)
                coeff[0] = b * q;
                coeff[1] = 0.0;
                coeff[2] = Ar;
                coeff[3] = Ai;
                coeff[4] = b * q;
                coeff[5] = -Ai;
                coeff[6] = Ar;
                coeff[7] = a * q;
                coeff[8] = 0.0;
                coeff[9] = a * q;
            }
            return e;
        }
        if (real_ && d_ == 2) {
            const double det = H[0] * H[3] - H[1] * H[1];
            if (!(H[0] > 0.0) || !(det > 0.0)) return e;
            e.ok = true;
            e.det = det;
            e.logdet = std::log(det);
            if (coeff) {
                coeff[0] = H[3] / det;
                coeff[1] = -H[1] / det;
                coeff[2] = H[0] / det;
            }
            return e;
        }
        RMat R = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(H, d_, d_);
        if (real_) {
            Eigen::LLT<RMat> llt(R);
            if (llt.info() != Eigen::Success) return e;
            double ld = 0.0;
            for (int a = 0; a < d_; ++a) {
                const double v = llt.matrixLLT()(a, a);
                if (!(v > 0.0)) return e;
                ld += 2.0 * std::log(v);
            }
            e.ok = true;
            e.logdet = ld;
            e.det = std::exp(ld);
            if (coeff) BallSystem::pack_sym(llt.solve(RMat::Identity(d_, d_)), coeff);
            return e;
        }
        const HMat Hc = geom::complex_hessian(R);
        Eigen::LLT<HMat> llt(Hc);
        if (llt.info() != Eigen::Success) return e;
        double ld = 0.0;
        for (int j = 0; j < n_; ++j) {
            const double v = llt.matrixLLT()(j, j).real();
            if (!(v > 0.0)) return e;
            ld += 2.0 * std::log(v);
        }
        e.ok = true;
        e.logdet = ld;
        e.det = std::exp(ld);
        if (coeff) BallSystem::pack_sym(geom::complex_to_real_coeff(llt.solve(HMat::Identity(n_, n_))), coeff);
        return e;
    }

    double min_eigenvalue(const double* ubox, std::int64_t box) const {
        double H[geom::kMaxRealDim * geom::kMaxRealDim];
        hessian(ubox, box, H);
        RMat R = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(H, d_, d_);
        if (real_) return Eigen::SelfAdjointEigenSolver<RMat>(R, Eigen::EigenvaluesOnly).eigenvalues()(0);
        const HMat Hc = geom::complex_hessian(R);
        return Eigen::SelfAdjointEigenSolver<HMat>(Hc, Eigen::EigenvaluesOnly).eigenvalues()(0);
    }

private:
    const Mesh& mesh_;
    bool real_;
    int n_, d_;
    std::int64_t stride_[geom::kMaxRealDim]{};
    double ih2_ = 0.0;
};

struct Residual {
    Vec r;
    bool cone_ok = true;
    int violations = 0;
    double log_inf = 0.0;
    double rel_inf = 0.0;
    double bnd_inf = 0.0;
};

class DirichletNewton {
public:
    DirichletNewton(const DirichletProblem& p, bool real, double tol, const DirichletOptions& opt)
        : p_(p), mesh_(*p.mesh()), sys_(p.mesh()), form_(mesh_, real), real_(real), tol_(tol),
          opt_(opt) {
        n_int_ = sys_.interior();
        n_act_ = sys_.active();
        ubox_.assign(mesh_.size(), 0.0);
        logrho_.resize(n_int_);
        for (std::int64_t i = 0; i < n_int_; ++i) {
            const double rho = p.density[sys_.box_of(i)];
            if (!(rho > 0.0)) throw DomainError("density must be positive at interior nodes");
            logrho_[i] = std::log(rho);
        }
        gb_.resize(n_act_ - n_int_);
        for (std::int64_t k = 0; k < n_act_ - n_int_; ++k) gb_[k] = p.boundary[sys_.box_of(n_int_ + k)];
    }

    Residual evaluate(const Vec& x, bool store_coeff) {
        sys_.scatter(x.data(), ubox_.data());
        Residual res;
        res.r.resize(n_act_);
        const int d = sys_.dim();
        const int ps = BallSystem::packed_size(d);
        double* coeff = store_coeff ? sys_.coefficients().data() : nullptr;
        for (std::int64_t i = 0; i < n_int_; ++i) {
            const NodeEval e = form_.eval(ubox_.data(), sys_.box_of(i), coeff ? coeff + i * ps : nullptr);
            if (!e.ok) {
                res.cone_ok = false;
                ++res.violations;
                res.r[i] = std::numeric_limits<double>::infinity();
                continue;
            }
            const double lr = e.logdet - logrho_[i];
            res.r[i] = lr;
            res.log_inf = std::max(res.log_inf, std::abs(lr));
            res.rel_inf = std::max(res.rel_inf, std::abs(std::expm1(lr)));
        }
        for (std::int64_t k = 0; k < n_act_ - n_int_; ++k) {
            const double th = sys_.theta(k);
            const double v = x[n_int_ + k] + th * sys_.closure_interp(k, ubox_.data()) - (1.0 + th) * gb_[k];
            res.r[n_int_ + k] = v;
            res.bnd_inf = std::max(res.bnd_inf, std::abs(v));
        }
        if (!res.cone_ok) res.log_inf = res.rel_inf = std::numeric_limits<double>::infinity();
        return res;
    }

    double merit(const Residual& r) const { return std::max(r.log_inf, r.bnd_inf); }
    bool done(const Residual& r) const { return r.cone_ok && r.rel_inf <= tol_ && r.bnd_inf <= tol_; }

    // Linear solve of sum C_ab D_ab u = rhs with the closure rows, C = c * identity.
    Vec initial_guess() {
        const int d = sys_.dim();
        const int ps = BallSystem::packed_size(d);
        auto& co = sys_.coefficients();
        std::fill(co.begin(), co.end(), 0.0);
        for (std::int64_t i = 0; i < n_int_; ++i) {
            int p = 0;
            for (int a = 0; a < d; ++a)
                for (int b = a; b < d; ++b, ++p) co[i * ps + p] = a == b ? 1.0 : 0.0;
        }
        sys_.update();
        // Laplacian target: tr H_c = n rho^{1/n}  <=>  Delta = 4 n rho^{1/n}; real case Delta = d rho^{1/d}.
        Vec rhs(n_act_);
        const int n = mesh_.n();
        for (std::int64_t i = 0; i < n_int_; ++i) {
            rhs[i] = real_ ? d * std::exp(logrho_[i] / d) : 4.0 * n * std::exp(logrho_[i] / n);
        }
        for (std::int64_t k = 0; k < n_act_ - n_int_; ++k) rhs[n_int_ + k] = (1.0 + sys_.theta(k)) * gb_[k];
        Vec x = Vec::Zero(n_act_);
        const KrylovResult kr = solve_linear(rhs, x, 1e-6);
        if (opt_.verbose) std::fprintf(stderr, "dirichlet start krylov %ld\n", kr.iterations);
        return x;
    }

    KrylovResult solve_linear(const Vec& rhs, Vec& x, double eta) {
        LinearOperator J(n_act_, [this](const Vec& in, Vec& out) {
            out.resize(in.size());
            sys_.apply(in.data(), out.data());
        });
        LinearMap P = [this](const Vec& in, Vec& out) {
            out.resize(in.size());
            sys_.precondition(in.data(), out.data());
        };
        return bicgstab(J, P, rhs, x, eta, opt_.max_krylov);
    }

    // Adds eps (|x - c|^2 - R^2) to every active node.
    void add_bowl(Vec& x, double eps) const {
        const double R2 = mesh_.radius() * mesh_.radius();
        std::vector<double> c(mesh_.dim());
        for (std::int64_t i = 0; i < n_act_; ++i) {
            mesh_.coordinates(sys_.box_of(i), c.data());
            double r2 = 0.0;
            for (int a = 0; a < mesh_.dim(); ++a) {
                const double t = c[a] - mesh_.center()[a];
                r2 += t * t;
            }
            x[i] += eps * (r2 - R2);
        }
    }

    double bowl_scale() const {
        double mx = 0.0;
        for (std::int64_t i = 0; i < n_int_; ++i) mx = std::max(mx, logrho_[i]);
        const int k = real_ ? sys_.dim() : mesh_.n();
        return std::exp(mx / k) * (real_ ? 0.5 : 1.0);
    }

    // Damped Newton from x towards the current density; false when the line search stalls.
    bool newton(Vec& x, Residual& cur, double tol, SolveReport& rep) {
        const double saved = tol_;
        tol_ = tol;
        bool barrier_used = false;
        double prev = merit(cur);
        int it = 0;
        while (!done(cur)) {
            if (it >= opt_.max_newton) {
                tol_ = saved;
                return false;
            }
            sys_.update();
            Vec rhs = -cur.r;
            double eta = it == 0 ? 1e-2 : std::min(1e-2, 0.5 * std::pow(merit(cur) / prev, 2));
            eta = std::max({eta, 0.05 * tol_ / std::max(merit(cur), 1e-300), 1e-12});
            Vec dx = Vec::Zero(n_act_);
            const KrylovResult kr = solve_linear(rhs, dx, eta);
            rep.krylov_iterations += kr.iterations;
            double t = 1.0;
            Residual trial;
            bool accepted = false;
            for (int hv = 0; hv <= opt_.max_halvings; ++hv, t *= 0.5) {
                trial = evaluate(x + t * dx, false);
                if (!trial.cone_ok) {
                    ++rep.cone_rejections;
                    continue;
                }
                if (merit(trial) < merit(cur) || done(trial)) {
                    accepted = true;
                    break;
                }
            }
            // Steps this short mean the iterate is far from the Newton basin.
            if (accepted && t < 1.0 / 256 && !done(trial)) accepted = false;
            if (!accepted) {
                if (barrier_used) {
                    tol_ = saved;
                    return false;
                }
                barrier_used = true;
                add_bowl(x, 0.05 * bowl_scale());
                cur = evaluate(x, true);
                ++it;
                continue;
            }
            x += t * dx;
            prev = merit(cur);
            cur = evaluate(x, true);
            ++it;
            ++rep.iterations;
            rep.history.push_back(merit(cur));
            if (opt_.verbose)
                std::fprintf(stderr, "dirichlet it %d rel %.3e bnd %.3e step %.3g krylov %ld\n", it,
                             cur.rel_inf, cur.bnd_inf, t, kr.iterations);
        }
        tol_ = saved;
        return true;
    }

    Residual admissible_start(Vec& x) {
        Residual cur = evaluate(x, true);
        for (double eps = 0.05 * bowl_scale(); !cur.cone_ok && eps < 1e6; eps *= 2.0) {
            add_bowl(x, eps);
            cur = evaluate(x, true);
        }
        if (!cur.cone_ok) cone_failure("no admissible starting iterate");
        return cur;
    }

    // log rho_t = mean + t (log rho - mean)
    void blend(double t) {
        for (std::int64_t i = 0; i < n_int_; ++i) logrho_[i] = mean_ + t * (target_[i] - mean_);
    }

    SolveReport run() {
        const auto t0 = std::chrono::steady_clock::now();
        SolveReport rep;
        target_ = logrho_;
        mean_ = logrho_.mean();
        Vec x(n_act_);
        if (opt_.psi0) {
            if (!opt_.psi0->mesh->same_as(mesh_)) throw ParameterError("psi0 lives on a different mesh");
            sys_.gather(opt_.psi0->data.data(), x.data());
        } else {
            x = initial_guess();
        }
        Residual cur = admissible_start(x);
        rep.history.push_back(merit(cur));
        if (!newton(x, cur, tol_, rep)) {
            // Continuation in the density from its log-mean.
            if (opt_.verbose) std::fprintf(stderr, "dirichlet continuation\n");
            blend(0.0);
            x = initial_guess();
            cur = admissible_start(x);
            const double loose = std::max(tol_, 1e-3);
            if (!newton(x, cur, loose, rep)) throw NonconvergenceError("Dirichlet continuation failed at t = 0", cur.rel_inf);
            double t = 0.0, dt = 0.25;
            while (t < 1.0) {
                const double next = std::min(1.0, t + dt);
                blend(next);
                Vec trial_x = x;
                Residual trial = evaluate(trial_x, true);
                const bool ok = trial.cone_ok && newton(trial_x, trial, next < 1.0 ? loose : tol_, rep);
                if (ok) {
                    x = std::move(trial_x);
                    cur = trial;
                    t = next;
                    dt = std::min(0.5, 2.0 * dt);
                } else {
                    dt *= 0.5;
                    if (dt < 1e-4) {
                        blend(t);
                        throw NonconvergenceError("Dirichlet continuation stalled", cur.rel_inf);
                    }
                }
            }
            blend(1.0);
            if (!done(cur)) throw NonconvergenceError("Dirichlet continuation did not converge", cur.rel_inf);
        }
        rep.residual_inf = cur.rel_inf;
        rep.cone_violations = cur.violations;
        rep.converged = true;
        rep.solution = ScalarField(p_.mesh(), 0.0);
        sys_.scatter(x.data(), rep.solution.data.data());
        const double cell = std::pow(mesh_.spacing(), mesh_.dim());
        long double mass = 0.0L;
        double mn = std::numeric_limits<double>::infinity();
        sys_.scatter(x.data(), ubox_.data());
        for (std::int64_t i = 0; i < n_int_; ++i) {
            mass += std::exp(static_cast<long double>(cur.r[i] + logrho_[i]));
            mn = std::min(mn, form_.min_eigenvalue(ubox_.data(), sys_.box_of(i)));
        }
        rep.mass = static_cast<double>(mass) * cell;
        rep.min_eigenvalue = mn;
        rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return rep;
    }

private:
    [[noreturn]] void cone_failure(const char* what) const {
        if (real_) throw ConvexityError(what);
        throw ConeError(what);
    }

    const DirichletProblem& p_;
    const Mesh& mesh_;
    BallSystem sys_;
    MaForm form_;
    bool real_;
    double tol_;
    const DirichletOptions& opt_;
    std::int64_t n_int_ = 0, n_act_ = 0;
    std::vector<double> ubox_;
    Vec logrho_;
    Vec target_;
    double mean_ = 0.0;
    std::vector<double> gb_;
};

}  // namespace

SolveReport solve_dirichlet_cma(const DirichletProblem& problem, double tol, const DirichletOptions& opt) {
    if (!(tol > 0.0)) throw ParameterError("tolerance must be positive");
    DirichletNewton nw(problem, false, tol, opt);
    return nw.run();
}

SolveReport solve_dirichlet_rma(const DirichletProblem& problem, double tol, const DirichletOptions& opt) {
    if (!(tol > 0.0)) throw ParameterError("tolerance must be positive");
    DirichletNewton nw(problem, true, tol, opt);
    return nw.run();
}

ScalarField solve_dirichlet_linear(const HermitianField& omega, const ScalarField& rhs,
                                   const ScalarField& boundary, double tol) {
    const MeshPtr& mesh = rhs.mesh;
    if (!mesh || mesh->is_torus()) throw ParameterError("linear Dirichlet solve needs a ball mesh");
    if (!omega.mesh()->same_as(*mesh) || !boundary.mesh->same_as(*mesh))
        throw ParameterError("fields live on different meshes");
    if (!(tol > 0.0)) throw ParameterError("tolerance must be positive");
    BallSystem sys(mesh);
    const std::int64_t ni = sys.interior(), na = sys.active();
    const int d = sys.dim(), n = mesh->n(), ps = BallSystem::packed_size(d);
    auto& co = sys.coefficients();
    for (std::int64_t i = 0; i < ni; ++i) {
        const std::int64_t b = sys.box_of(i);
        Eigen::LLT<HMat> llt(omega.at(b));
        if (llt.info() != Eigen::Success) throw DomainError("omega is not positive definite");
        BallSystem::pack_sym(geom::complex_to_real_coeff(llt.solve(HMat::Identity(n, n))), co.data() + i * ps);
    }
    sys.update();
    Vec f(na);
    double scale = 1.0;
    for (std::int64_t i = 0; i < ni; ++i) {
        f[i] = rhs[sys.box_of(i)];
        if (!std::isfinite(f[i])) throw DomainError("right-hand side must be finite");
        scale = std::max(scale, std::abs(f[i]));
    }
    for (std::int64_t k = 0; k < na - ni; ++k) f[ni + k] = (1.0 + sys.theta(k)) * boundary[sys.box_of(ni + k)];

    LinearOperator A(na, [&sys](const Vec& in, Vec& out) {
        out.resize(in.size());
        sys.apply(in.data(), out.data());
    });
    LinearMap P = [&sys](const Vec& in, Vec& out) {
        out.resize(in.size());
        sys.precondition(in.data(), out.data());
    };
    Vec x = Vec::Zero(na), r(na), dx(na);
    if (f.lpNorm<Eigen::Infinity>() > 0.0) {
        for (int pass = 0;; ++pass) {
            sys.apply(x.data(), r.data());
            r = f - r;
            const double rinf = r.lpNorm<Eigen::Infinity>();
            if (rinf <= tol * scale) break;
            if (pass == 8) throw NumericError("linear Dirichlet solve stalled");
            dx.setZero();
            const KrylovResult kr = bicgstab(A, P, r, dx, 1e-10, 2000);
            if (!kr.converged && kr.relative_residual > 1e-3) throw NumericError("linear Dirichlet solve breakdown");
            x += dx;
        }
    }
    ScalarField out(mesh, 0.0);
    sys.scatter(x.data(), out.data.data());
    return out;
}

ScalarField solve_dirichlet_linear(const HermitianField& omega, double rhs, const MeshPtr& mesh, double tol) {
    return solve_dirichlet_linear(omega, ScalarField(mesh, rhs), ScalarField(mesh, 0.0), tol);
}

double dirichlet_residual(const DirichletProblem& problem, const ScalarField& psi, bool real, int* violations) {
    const Mesh& mesh = *problem.mesh();
    if (!psi.mesh->same_as(mesh)) throw ParameterError("psi lives on a different mesh");
    MaForm form(mesh, real);
    double mx = 0.0;
    int bad = 0;
    for (std::int64_t b : mesh.interior()) {
        const NodeEval e = form.eval(psi.data.data(), b, nullptr);
        if (!e.ok) {
            ++bad;
            continue;
        }
        const double rho = problem.density[b];
        mx = std::max(mx, std::abs(e.det - rho) / rho);
    }
    if (violations) *violations = bad;
    return bad ? std::numeric_limits<double>::infinity() : mx;
}

}  // namespace linfest::pde
