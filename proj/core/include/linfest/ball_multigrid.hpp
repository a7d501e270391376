#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "linfest/mesh.hpp"
#include "linfest/small_matrix.hpp"
#include "linfest/stencil.hpp"

namespace linfest::pde {

// Discrete Dirichlet operator on a ball mesh and its multigrid preconditioner.
//
// Unknowns are the active nodes (interior first, then boundary, each in box order).
// Interior rows: sum_ab C_ab D_ab u with a per-node symmetric C.
// Boundary rows close the system along the ray from the centre: the ghost value u_b is the
// linear extrapolation through the sphere point (data g) and the interpolated interior value
// at radius R - kappa*h, i.e. u_b + theta * I(u)(y) = (1 + theta) g.
class BallSystem {
public:
    explicit BallSystem(geom::MeshPtr mesh);
    ~BallSystem();
    BallSystem(const BallSystem&) = delete;
    BallSystem& operator=(const BallSystem&) = delete;

    const geom::Mesh& mesh() const;
    int dim() const;
    std::int64_t active() const;
    std::int64_t interior() const;
    std::int64_t box_of(std::int64_t compact) const;
    // -1 for exterior nodes.
    std::int32_t compact_of(std::int64_t box) const;
    double theta(std::int64_t boundary_row) const;
    // Stencil of an interior unknown in box indices.
    geom::NodeStencil stencil(std::int64_t compact) const;

    // Interior coefficients, packed upper triangle (a <= b), d(d+1)/2 per interior node.
    std::vector<double>& coefficients();
    static int packed_size(int d) { return d * (d + 1) / 2; }
    static void pack_sym(const geom::RMat& C, double* p);
    // Push finest coefficients down the hierarchy.
    void update();

    void scatter(const double* compact, double* box) const;
    void gather(const double* box, double* compact) const;
    // Closure value I(u)(y) for boundary row k, u given in box layout.
    double closure_interp(std::int64_t boundary_row, const double* ubox) const;

    void apply(const double* x, double* y) const;
    // One V-cycle with zero initial guess.
    void precondition(const double* r, double* z) const;
    int levels() const;

private:
    struct Level;
    std::vector<std::unique_ptr<Level>> levels_;
    void vcycle(std::size_t l, const double* f, double* ubox) const;
    static void link(Level& fine, Level& coarse);
};

}  // namespace linfest::pde
