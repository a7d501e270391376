#include "linfest/periodic_solver.hpp"

#include <fftw3.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numbers>

#include "linfest/error.hpp"
#include "linfest/hermitian_ops.hpp"
#include "linfest/krylov.hpp"
#include "linfest/stencil.hpp"

namespace linfest::pde {

using geom::HermitianField;
using geom::HMat;
using geom::Mesh;
using geom::MeshPtr;
using geom::NodeStencil;
using geom::RMat;
using geom::ScalarField;

namespace {

// FFTW planning is not thread safe.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

// Inverse of a constant-coefficient operator sum_ab C_ab D_ab on the torus.
class FftInverse {
public:
    explicit FftInverse(const Mesh& mesh) : d_(mesh.dim()), m_(mesh.m()), h_(mesh.spacing()) {
        n_real_ = mesh.size();
        n_spec_ = n_real_ / m_ * (m_ / 2 + 1);
        real_ = static_cast<double*>(fftw_malloc(sizeof(double) * n_real_));
        spec_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n_spec_));
        std::vector<int> dims(d_, m_);
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fwd_ = fftw_plan_dft_r2c(d_, dims.data(), real_, spec_, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r(d_, dims.data(), spec_, real_, FFTW_ESTIMATE);
    }
    ~FftInverse() {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(real_);
        fftw_free(spec_);
    }
    FftInverse(const FftInverse&) = delete;
    FftInverse& operator=(const FftInverse&) = delete;

    void set_coefficients(const RMat& C) {
        inv_.assign(n_spec_, 0.0);
        const int last = m_ / 2 + 1;
        std::vector<double> s2(d_), sn(d_);
        std::vector<int> k(d_, 0);
        for (std::int64_t i = 0; i < n_spec_; ++i) {
            for (int a = 0; a < d_; ++a) {
                const double th = 2.0 * std::numbers::pi * k[a] / m_;
                const double hs = std::sin(0.5 * th);
                s2[a] = 4.0 * hs * hs;
                sn[a] = std::sin(th);
            }
            double q = 0.0;
            for (int a = 0; a < d_; ++a) {
                q += C(a, a) * s2[a];
                for (int b = a + 1; b < d_; ++b) q += 2.0 * C(a, b) * sn[a] * sn[b];
            }
            inv_[i] = (i == 0 || q <= 0.0) ? 0.0 : -(h_ * h_) / (q * n_real_);
            for (int a = d_ - 1; a >= 0; --a) {
                if (++k[a] < (a == d_ - 1 ? last : m_)) break;
                k[a] = 0;
            }
        }
    }

    // out = L^{-1} r on the zero-mean subspace.
    void apply(const double* r, double* out) {
        std::copy(r, r + n_real_, real_);
        fftw_execute(fwd_);
        for (std::int64_t i = 0; i < n_spec_; ++i) {
            spec_[i][0] *= inv_[i];
            spec_[i][1] *= inv_[i];
        }
        fftw_execute(bwd_);
        std::copy(real_, real_ + n_real_, out);
    }

private:
    int d_, m_;
    double h_;
    std::int64_t n_real_ = 0, n_spec_ = 0;
    double* real_ = nullptr;
    fftw_complex* spec_ = nullptr;
    fftw_plan fwd_{}, bwd_{};
    std::vector<double> inv_;
};

struct EvalResult {
    double log_inf = 0.0;
    double f_inf = 0.0;
    int violations = 0;
};

class TorusNewton {
public:
    TorusNewton(const cone::OperatorSpec& op, const HermitianField& omega, const ScalarField& F)
        : op_(op), omega_(omega), F_(F), mesh_(*F.mesh), n_(mesh_.n()), N_(mesh_.size()) {}

    // R (log residual) and packed A = sum mu_i v_i v_i^* are optional outputs.
    EvalResult evaluate(const double* phi, double b, double* R, double* A) const {
        EvalResult out;
        const double h = mesh_.spacing();
        const int n = n_;
        const int nn = n * n;
        HMat g = omega_.at(0), V;
        RMat H;
        double lam[cone::kMaxDim], grad[cone::kMaxDim];
        geom::torus_sweep(mesh_, [&](const NodeStencil& s) {
            const std::int64_t i = s.center;
            if (!omega_.uniform()) g = omega_.at(i);
            geom::real_hessian(s, phi, h, H);
            const HMat G = g + geom::complex_hessian(H);
            if (!geom::pencil_eigen(G, g, lam, A ? &V : nullptr))
                throw GeometryError("metric is not positive definite at node " + std::to_string(i));
            double nl = 0.0;
            for (int j = 0; j < n; ++j) nl += lam[j] * lam[j];
            if (!(cone::cone_margin(lam, op_.cone) > 1e-10 * (1.0 + std::sqrt(nl)))) {
                ++out.violations;
                if (R) R[i] = 0.0;
                return;
            }
            const double f = cone::evaluate(op_, lam, A ? grad : nullptr);
            const double rhs = F_.data[i] + b;
            const double r = std::log(f) - rhs;
            out.log_inf = std::max(out.log_inf, std::abs(r));
            out.f_inf = std::max(out.f_inf, std::abs(f - std::exp(rhs)));
            if (R) R[i] = r;
            if (A) {
                HMat M = HMat::Zero(n, n);
                for (int k = 0; k < n; ++k) M += (grad[k] / f) * V.col(k) * V.col(k).adjoint();
                geom::pack(M, A + i * nn);
            }
        });
        return out;
    }

    void jacobian(const double* A, const double* x, double* y) const {
        const double ih2 = 1.0 / (mesh_.spacing() * mesh_.spacing());
        const int nn = n_ * n_;
        geom::torus_sweep(mesh_, [&](const NodeStencil& s) {
            y[s.center] = geom::complex_operator_node(A + s.center * nn, n_, x, s, ih2);
        });
    }

    const Mesh& mesh() const { return mesh_; }
    std::int64_t size() const { return N_; }
    int n() const { return n_; }

private:
    const cone::OperatorSpec& op_;
    const HermitianField& omega_;
    const ScalarField& F_;
    const Mesh& mesh_;
    int n_;
    std::int64_t N_;
};

void check_inputs(const cone::OperatorSpec& op, const HermitianField& omega, const ScalarField& F,
                  double tol) {
    if (!F.mesh || !F.mesh->is_torus()) throw ParameterError("periodic solve needs a torus mesh");
    if (!omega.mesh()->same_as(*F.mesh)) throw ParameterError("omega and F live on different meshes");
    if (op.n != F.mesh->n()) throw ParameterError("operator dimension differs from mesh dimension");
    if (!(tol > 0.0)) throw ParameterError("tolerance must be positive");
    for (double v : F.data)
        if (!std::isfinite(v)) throw ParameterError("F has a non-finite value");
}

SolveReport newton(const cone::OperatorSpec& op, const HermitianField& omega, const ScalarField& F,
                   double tol, const PeriodicOptions& opt, ScalarField phi, double b) {
    TorusNewton prob(op, omega, F);
    const Mesh& mesh = prob.mesh();
    const std::int64_t N = prob.size();
    const int nn = prob.n() * prob.n();
    SolveReport rep;
    std::vector<double> R(N), A(N * nn), trial(N);
    FftInverse fft(mesh);
    Vec rhs(N + 1), x(N + 1);
    std::vector<double> tmp(N);

    EvalResult ev = prob.evaluate(phi.data.data(), b, R.data(), A.data());
    if (ev.violations > 0)
        throw ConeError("initial iterate leaves the cone at " + std::to_string(ev.violations) +
                        " nodes");
    double prev_log = ev.log_inf;
    for (int it = 0;; ++it) {
        rep.history.push_back(ev.f_inf);
        if (opt.verbose)
            std::fprintf(stderr, "  [torus m=%d] newton %d  |f-e^F|=%.3e  b=%.6g\n", mesh.m(), it,
                         ev.f_inf, b);
        if (ev.f_inf <= tol) {
            rep.converged = true;
            rep.iterations = it;
            break;
        }
        if (it >= opt.max_newton)
            throw NonconvergenceError("periodic Newton did not converge", ev.f_inf);

        HMat Abar = HMat::Zero(prob.n(), prob.n());
        {
            std::vector<long double> acc(nn, 0.0L);
            for (std::int64_t i = 0; i < N; ++i)
                for (int c = 0; c < nn; ++c) acc[c] += A[i * nn + c];
            std::vector<double> mean(nn);
            for (int c = 0; c < nn; ++c) mean[c] = static_cast<double>(acc[c] / N);
            Abar = geom::unpack(mean.data(), prob.n());
        }
        fft.set_coefficients(geom::complex_to_real_coeff(Abar));

        LinearOperator J(N + 1, [&](const Vec& in, Vec& out) {
            prob.jacobian(A.data(), in.data(), out.data());
            long double s = 0.0L;
            for (std::int64_t i = 0; i < N; ++i) {
                out[i] -= in[N];
                s += in[i];
            }
            out[N] = static_cast<double>(s / N);
        });
        LinearMap P = [&](const Vec& in, Vec& out) {
            long double s = 0.0L;
            for (std::int64_t i = 0; i < N; ++i) s += in[i];
            const double mean = static_cast<double>(s / N);
            for (std::int64_t i = 0; i < N; ++i) tmp[i] = in[i] - mean;
            fft.apply(tmp.data(), out.data());
            for (std::int64_t i = 0; i < N; ++i) out[i] += in[N];
            out[N] = -mean;
        };
        for (std::int64_t i = 0; i < N; ++i) rhs[i] = -R[i];
        rhs[N] = 0.0;
        x.setZero();
        double eta = it == 0 ? 1e-2 : 0.5 * (ev.log_inf / prev_log) * (ev.log_inf / prev_log);
        eta = std::min(1e-2, std::max(eta, 0.05 * tol / std::max(ev.log_inf, 1e-300)));
        eta = std::max(eta, 1e-12);
        const KrylovResult kr = bicgstab(J, P, rhs, x, eta, opt.max_krylov);
        rep.krylov_iterations += kr.iterations;

        double t = 1.0;
        bool accepted = false;
        int last_violations = 0;
        EvalResult trial_ev;
        for (int k = 0; k <= opt.max_halvings; ++k, t *= 0.5) {
            for (std::int64_t i = 0; i < N; ++i) trial[i] = phi.data[i] + t * x[i];
            trial_ev = prob.evaluate(trial.data(), b + t * x[N], nullptr, nullptr);
            last_violations = trial_ev.violations;
            if (trial_ev.violations > 0) {
                ++rep.cone_rejections;
                continue;
            }
            if (trial_ev.log_inf < (1.0 - 1e-4 * t) * ev.log_inf || trial_ev.f_inf <= tol) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (last_violations > 0)
                throw ConeError("damping could not keep the iterate inside the cone (" +
                                std::to_string(last_violations) + " nodes)");
            throw NonconvergenceError("periodic line search failed", ev.f_inf);
        }
        std::copy(trial.begin(), trial.end(), phi.data.begin());
        b += t * x[N];
        prev_log = ev.log_inf;
        ev = prob.evaluate(phi.data.data(), b, R.data(), A.data());
    }
    rep.residual_inf = ev.f_inf;
    rep.cone_violations = ev.violations;
    rep.b_constant = b;
    rep.solution = geom::sup_normalize(phi);
    return rep;
}

}  // namespace

ScalarField restrict_torus(const ScalarField& f, MeshPtr coarse) {
    const Mesh& fine = *f.mesh;
    if (coarse->m() * 2 != fine.m() || coarse->n() != fine.n())
        throw ParameterError("restriction needs a half-resolution torus");
    ScalarField out(coarse);
    const int d = fine.dim();
    int mi[geom::kMaxRealDim];
    for (std::int64_t i = 0; i < coarse->size(); ++i) {
        coarse->multi_index(i, mi);
        for (int a = 0; a < d; ++a) mi[a] *= 2;
        out.data[i] = f.data[fine.linear_index(mi)];
    }
    return out;
}

HermitianField restrict_torus(const HermitianField& f, MeshPtr coarse) {
    const Mesh& fine = *f.mesh();
    if (coarse->m() * 2 != fine.m() || coarse->n() != fine.n())
        throw ParameterError("restriction needs a half-resolution torus");
    if (f.uniform()) return HermitianField::constant(coarse, f.at(0));
    HermitianField out(coarse, false);
    const int d = fine.dim();
    int mi[geom::kMaxRealDim];
    for (std::int64_t i = 0; i < coarse->size(); ++i) {
        coarse->multi_index(i, mi);
        for (int a = 0; a < d; ++a) mi[a] *= 2;
        out.set(i, f.at(fine.linear_index(mi)));
    }
    return out;
}

ScalarField prolong_torus(const ScalarField& coarse, MeshPtr fine) {
    const Mesh& cm = *coarse.mesh;
    if (cm.m() * 2 != fine->m() || cm.n() != fine->n())
        throw ParameterError("prolongation needs a double-resolution torus");
    // Separable 4-point cubic interpolation, one axis at a time.
    const int d = fine->dim();
    const int mc = cm.m(), mf = fine->m();
    std::vector<int> ext(d, mc);
    std::vector<double> cur = coarse.data, next;
    for (int a = 0; a < d; ++a) {
        std::int64_t inner = 1, outer = 1;
        for (int b = a + 1; b < d; ++b) inner *= ext[b];
        for (int b = 0; b < a; ++b) outer *= ext[b];
        next.assign(outer * mf * inner, 0.0);
        for (std::int64_t o = 0; o < outer; ++o)
            for (int j = 0; j < mf; ++j) {
                double* dst = next.data() + (o * mf + j) * inner;
                if (j % 2 == 0) {
                    const double* src = cur.data() + (o * mc + j / 2) * inner;
                    std::copy(src, src + inner, dst);
                    continue;
                }
                const int c0 = j / 2;
                const double* s0 = cur.data() + (o * mc + (c0 + mc - 1) % mc) * inner;
                const double* s1 = cur.data() + (o * mc + c0) * inner;
                const double* s2 = cur.data() + (o * mc + (c0 + 1) % mc) * inner;
                const double* s3 = cur.data() + (o * mc + (c0 + 2) % mc) * inner;
                for (std::int64_t q = 0; q < inner; ++q)
                    dst[q] = (-s0[q] + 9.0 * s1[q] + 9.0 * s2[q] - s3[q]) / 16.0;
            }
        cur.swap(next);
        ext[a] = mf;
    }
    return ScalarField(fine, std::move(cur));
}

double periodic_residual(const cone::OperatorSpec& op, const HermitianField& omega,
                         const ScalarField& F, const ScalarField& phi, double b, int* violations) {
    check_inputs(op, omega, F, 1.0);
    TorusNewton prob(op, omega, F);
    const EvalResult ev = prob.evaluate(phi.data.data(), b, nullptr, nullptr);
    if (violations) *violations = ev.violations;
    return ev.f_inf;
}

SolveReport solve_periodic_fnl(const cone::OperatorSpec& op, const HermitianField& omega,
                               const ScalarField& F, double tol, const PeriodicOptions& opt) {
    check_inputs(op, omega, F, tol);
    const auto t0 = std::chrono::steady_clock::now();
    const MeshPtr& mesh = F.mesh;
    ScalarField phi(mesh, 0.0);
    double b = opt.b0;
    long coarse_krylov = 0;
    bool warm = false;
    if (opt.phi0) {
        if (!opt.phi0->mesh->same_as(*mesh)) throw ParameterError("initial iterate on a different mesh");
        phi = *opt.phi0;
    } else if (opt.nested && mesh->m() % 2 == 0 && mesh->m() / 2 >= opt.nested_min_m) {
        auto cmesh = Mesh::torus(mesh->n(), mesh->m() / 2, mesh->period());
        const ScalarField cF = restrict_torus(F, cmesh);
        const HermitianField comega = restrict_torus(omega, cmesh);
        try {
            const SolveReport coarse = solve_periodic_fnl(op, comega, cF, tol, opt);
            phi = prolong_torus(coarse.solution, mesh);
            b = coarse.b_constant;
            coarse_krylov = coarse.krylov_iterations;
            warm = true;
        } catch (const Error&) {
            phi = ScalarField(mesh, 0.0);
            b = opt.b0;
        }
    }
    SolveReport rep;
    try {
        rep = newton(op, omega, F, tol, opt, phi, b);
    } catch (const Error&) {
        if (!warm) throw;
        coarse_krylov = 0;
        rep = newton(op, omega, F, tol, opt, ScalarField(mesh, 0.0), opt.b0);
    }
    rep.krylov_iterations += coarse_krylov;
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace linfest::pde
