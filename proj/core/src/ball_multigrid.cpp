#include "linfest/ball_multigrid.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>

#include "linfest/error.hpp"

namespace linfest::pde {

using geom::Mesh;
using geom::MeshPtr;
using geom::NodeKind;

constexpr int kCoarseSweeps = 30;

struct BallSystem::Level {
    MeshPtr mesh;
    int d = 0;
    double h = 0.0;
    int ncorner = 0;
    std::int64_t n_int = 0, n_act = 0;
    std::vector<std::int64_t> box;
    std::vector<std::int32_t> compact;
    std::vector<double> theta;
    std::vector<std::int32_t> corner;
    std::vector<double> weight;
    std::vector<double> coeff;
    std::vector<std::int64_t> stride;
    std::int64_t st[geom::kMaxRealDim]{};
    double ih2 = 0.0;
    mutable std::vector<double> ub, xb, res, rhs;
    // Transfer data: fine box index of each coarse interior node (coarse side),
    // coarse base node and odd-axis mask of each active node (fine side), 3^d weights.
    std::vector<std::int64_t> fine_box;
    std::vector<std::int64_t> prol_base;
    std::vector<std::uint8_t> prol_odd;
    std::vector<std::int64_t> fw_off;
    std::vector<double> fw_weight;

    explicit Level(MeshPtr m) : mesh(std::move(m)) {
        const Mesh& M = *mesh;
        d = M.dim();
        h = M.spacing();
        ncorner = 1 << d;
        for (int a = 0; a < d; ++a) stride.push_back(M.stride(a));
        std::copy(stride.begin(), stride.end(), st);
        ih2 = 1.0 / (h * h);
        compact.assign(M.size(), -1);
        for (std::int64_t b : M.interior()) {
            compact[b] = static_cast<std::int32_t>(box.size());
            box.push_back(b);
        }
        n_int = static_cast<std::int64_t>(box.size());
        for (std::int64_t b : M.boundary()) {
            compact[b] = static_cast<std::int32_t>(box.size());
            box.push_back(b);
        }
        n_act = static_cast<std::int64_t>(box.size());
        build_closure();
        coeff.assign(n_int * packed_size(d), 0.0);
        ub.assign(M.size(), 0.0);
        xb.assign(M.size(), 0.0);
        res.assign(n_act, 0.0);
        rhs.assign(n_act, 0.0);
    }

    void build_closure() {
        const Mesh& M = *mesh;
        const int mid = M.mid();
        const double half = 0.5 * M.m();
        const double kappa = std::sqrt(static_cast<double>(d)) + 0.5;
        const std::int64_t nb = n_act - n_int;
        theta.resize(nb);
        corner.resize(nb * ncorner);
        weight.resize(nb * ncorner);
        int mi[geom::kMaxRealDim], base[geom::kMaxRealDim];
        double frac[geom::kMaxRealDim];
        for (std::int64_t k = 0; k < nb; ++k) {
            M.multi_index(box[n_int + k], mi);
            double r = 0.0;
            for (int a = 0; a < d; ++a) r += double(mi[a] - mid) * (mi[a] - mid);
            r = std::sqrt(r);
            theta[k] = (r - half) / kappa;
            const double scale = (half - kappa) / r;
            for (int a = 0; a < d; ++a) {
                const double y = (mi[a] - mid) * scale;
                const double fl = std::floor(y);
                base[a] = static_cast<int>(fl) + mid;
                frac[a] = y - fl;
            }
            for (int c = 0; c < ncorner; ++c) {
                std::int64_t b = 0;
                double w = 1.0;
                for (int a = 0; a < d; ++a) {
                    const int bit = (c >> a) & 1;
                    b += (base[a] + bit) * stride[a];
                    w *= bit ? frac[a] : 1.0 - frac[a];
                }
                const std::int32_t ci = compact[b];
                if (ci < 0 || ci >= n_int)
                    throw GeometryError("boundary closure stencil leaves the interior");
                corner[k * ncorner + c] = ci;
                weight[k * ncorner + c] = w;
            }
        }
    }

    double interp(std::int64_t k, const double* u_box) const {
        double s = 0.0;
        for (int c = 0; c < ncorner; ++c)
            s += weight[k * ncorner + c] * u_box[box[corner[k * ncorner + c]]];
        return s;
    }

    // Interior row without the centre term, and the centre coefficient.
    template <int D>
    double interior_row(std::int64_t i, const double* u, double& diag) const {
        const int dd = D ? D : d;
        const double* C = coeff.data() + i * packed_size(dd);
        const std::int64_t c = box[i];
        double acc = 0.0, dg = 0.0;
        int p = 0;
        for (int a = 0; a < dd; ++a) {
            const std::int64_t sa = st[a];
            acc += C[p] * (u[c + sa] + u[c - sa]);
            dg -= 2.0 * C[p];
            ++p;
            for (int b = a + 1; b < dd; ++b, ++p) {
                if (C[p] == 0.0) continue;
                const std::int64_t sb = st[b];
                acc += 0.5 * C[p] *
                       (u[c + sa + sb] - u[c + sa - sb] - u[c - sa + sb] + u[c - sa - sb]);
            }
        }
        diag = dg * ih2;
        return acc * ih2;
    }

    template <class Fn>
    void dispatch(Fn&& fn) const {
        if (d == 2) fn(std::integral_constant<int, 2>{});
        else if (d == 4) fn(std::integral_constant<int, 4>{});
        else fn(std::integral_constant<int, 0>{});
    }

    void apply_box(const double* u, double* y) const {
        dispatch([&](auto D) {
            double dg;
            for (std::int64_t i = 0; i < n_int; ++i)
                y[i] = interior_row<decltype(D)::value>(i, u, dg) + dg * u[box[i]];
        });
        for (std::int64_t k = 0; k < n_act - n_int; ++k)
            y[n_int + k] = u[box[n_int + k]] + theta[k] * interp(k, u);
    }

    void smooth(const double* f, double* u, bool forward) const {
        auto boundary_update = [&](std::int64_t k) {
            u[box[n_int + k]] = f[n_int + k] - theta[k] * interp(k, u);
        };
        const std::int64_t nb = n_act - n_int;
        dispatch([&](auto D) {
            constexpr int DV = decltype(D)::value;
            auto interior_update = [&](std::int64_t i) {
                double dg;
                const double off = interior_row<DV>(i, u, dg);
                u[box[i]] = (f[i] - off) / dg;
            };
            if (forward) {
                for (std::int64_t i = 0; i < n_int; ++i) interior_update(i);
                for (std::int64_t k = 0; k < nb; ++k) boundary_update(k);
            } else {
                for (std::int64_t k = nb - 1; k >= 0; --k) boundary_update(k);
                for (std::int64_t i = n_int - 1; i >= 0; --i) interior_update(i);
            }
        });
    }
};

BallSystem::BallSystem(MeshPtr mesh) {
    if (!mesh || mesh->is_torus()) throw ParameterError("ball system needs a ball mesh");
    levels_.push_back(std::make_unique<Level>(mesh));
    int m = mesh->m();
    while (m % 4 == 0 && m / 2 >= 8) {
        m /= 2;
        levels_.push_back(std::make_unique<Level>(
            Mesh::ball(mesh->n(), m, mesh->radius(), mesh->center())));
    }
    for (std::size_t l = 1; l < levels_.size(); ++l) link(*levels_[l - 1], *levels_[l]);
}

void BallSystem::link(Level& F, Level& C) {
    const int d = F.d;
    const int midc = C.mesh->mid(), midf = F.mesh->mid();
    int mi[geom::kMaxRealDim];
    C.fine_box.resize(C.n_int);
    for (std::int64_t i = 0; i < C.n_int; ++i) {
        C.mesh->multi_index(C.box[i], mi);
        std::int64_t fb = 0;
        for (int a = 0; a < d; ++a) fb += (2 * (mi[a] - midc) + midf) * F.stride[a];
        const std::int32_t fc = F.compact[fb];
        if (fc < 0 || fc >= F.n_int) throw GeometryError("coarse interior node not interior on fine grid");
        C.fine_box[i] = fb;
    }
    int npts = 1;
    for (int a = 0; a < d; ++a) npts *= 3;
    F.fw_off.resize(npts);
    F.fw_weight.resize(npts);
    for (int q = 0; q < npts; ++q) {
        int code = q;
        std::int64_t off = 0;
        double w = 1.0;
        for (int a = 0; a < d; ++a) {
            const int o = code % 3 - 1;
            code /= 3;
            off += o * F.stride[a];
            w *= o == 0 ? 0.5 : 0.25;
        }
        F.fw_off[q] = off;
        F.fw_weight[q] = w;
    }
    F.prol_base.resize(F.n_act);
    F.prol_odd.resize(F.n_act);
    for (std::int64_t i = 0; i < F.n_act; ++i) {
        F.mesh->multi_index(F.box[i], mi);
        std::int64_t b0 = 0;
        std::uint8_t odd = 0;
        for (int a = 0; a < d; ++a) {
            const int q = mi[a] - midf;
            const int fl = q >= 0 ? q / 2 : -((-q + 1) / 2);
            b0 += (fl + midc) * C.stride[a];
            if (q - 2 * fl) odd |= static_cast<std::uint8_t>(1u << a);
        }
        F.prol_base[i] = b0;
        F.prol_odd[i] = odd;
    }
}

BallSystem::~BallSystem() = default;

const Mesh& BallSystem::mesh() const { return *levels_.front()->mesh; }
int BallSystem::dim() const { return levels_.front()->d; }
std::int64_t BallSystem::active() const { return levels_.front()->n_act; }
std::int64_t BallSystem::interior() const { return levels_.front()->n_int; }
std::int64_t BallSystem::box_of(std::int64_t c) const { return levels_.front()->box[c]; }
std::int32_t BallSystem::compact_of(std::int64_t b) const { return levels_.front()->compact[b]; }
double BallSystem::theta(std::int64_t k) const { return levels_.front()->theta[k]; }
int BallSystem::levels() const { return static_cast<int>(levels_.size()); }
std::vector<double>& BallSystem::coefficients() { return levels_.front()->coeff; }

geom::NodeStencil BallSystem::stencil(std::int64_t c) const {
    const Level& L = *levels_.front();
    geom::NodeStencil s;
    s.d = L.d;
    s.center = L.box[c];
    for (int a = 0; a < L.d; ++a) {
        s.plus[a] = s.center + L.stride[a];
        s.minus[a] = s.center - L.stride[a];
    }
    return s;
}

void BallSystem::pack_sym(const geom::RMat& C, double* p) {
    const int d = static_cast<int>(C.rows());
    for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b) *p++ = 0.5 * (C(a, b) + C(b, a));
}

void BallSystem::update() {
    const int ps = packed_size(dim());
    for (std::size_t l = 1; l < levels_.size(); ++l) {
        const Level& F = *levels_[l - 1];
        Level& C = *levels_[l];
        for (std::int64_t i = 0; i < C.n_int; ++i) {
            const std::int32_t fc = F.compact[C.fine_box[i]];
            std::copy_n(F.coeff.data() + fc * ps, ps, C.coeff.data() + i * ps);
        }
    }
}

void BallSystem::scatter(const double* x, double* xbox) const {
    const Level& L = *levels_.front();
    for (std::int64_t i = 0; i < L.n_act; ++i) xbox[L.box[i]] = x[i];
}

void BallSystem::gather(const double* xbox, double* x) const {
    const Level& L = *levels_.front();
    for (std::int64_t i = 0; i < L.n_act; ++i) x[i] = xbox[L.box[i]];
}

double BallSystem::closure_interp(std::int64_t k, const double* ubox) const {
    return levels_.front()->interp(k, ubox);
}

void BallSystem::apply(const double* x, double* y) const {
    const Level& L = *levels_.front();
    scatter(x, L.xb.data());
    L.apply_box(L.xb.data(), y);
}

void BallSystem::vcycle(std::size_t l, const double* f, double* u) const {
    const Level& L = *levels_[l];
    if (l + 1 == levels_.size()) {
        for (int sweep = 0; sweep < kCoarseSweeps; ++sweep) {
            L.smooth(f, u, true);
            L.smooth(f, u, false);
        }
        return;
    }
    L.smooth(f, u, true);
    // Residual in box layout (interior rows only feed the coarse grid).
    L.apply_box(u, L.res.data());
    std::fill(L.xb.begin(), L.xb.end(), 0.0);
    for (std::int64_t i = 0; i < L.n_int; ++i) L.xb[L.box[i]] = f[i] - L.res[i];

    const Level& C = *levels_[l + 1];
    const std::size_t npts = L.fw_off.size();
    for (std::int64_t i = 0; i < C.n_int; ++i) {
        const double* r = L.xb.data() + C.fine_box[i];
        double s = 0.0;
        for (std::size_t q = 0; q < npts; ++q) s += L.fw_weight[q] * r[L.fw_off[q]];
        C.rhs[i] = s;
    }
    std::fill(C.rhs.begin() + C.n_int, C.rhs.end(), 0.0);
    std::fill(C.ub.begin(), C.ub.end(), 0.0);
    vcycle(l + 1, C.rhs.data(), C.ub.data());

    const int d = L.d;
    std::int64_t corner_off[1 << geom::kMaxRealDim];
    for (std::int64_t i = 0; i < L.n_act; ++i) {
        const std::uint8_t odd = L.prol_odd[i];
        const double* cu = C.ub.data() + L.prol_base[i];
        if (odd == 0) {
            u[L.box[i]] += cu[0];
            continue;
        }
        int nodd = 0;
        corner_off[0] = 0;
        for (int a = 0; a < d; ++a)
            if (odd & (1u << a)) {
                const int cnt = 1 << nodd;
                for (int c = 0; c < cnt; ++c) corner_off[cnt + c] = corner_off[c] + C.stride[a];
                ++nodd;
            }
        double s = 0.0;
        for (int c = 0; c < (1 << nodd); ++c) s += cu[corner_off[c]];
        u[L.box[i]] += s / (1 << nodd);
    }
    L.smooth(f, u, false);
}

void BallSystem::precondition(const double* r, double* z) const {
    const Level& L = *levels_.front();
    std::fill(L.ub.begin(), L.ub.end(), 0.0);
    vcycle(0, r, L.ub.data());
    gather(L.ub.data(), z);
}

}  // namespace linfest::pde
