#pragma once

#include <cstdint>
#include <vector>

#include "linfest/mesh.hpp"
#include "linfest/small_matrix.hpp"

namespace linfest::geom {

// One real value per mesh node. On balls, exterior nodes are stored but carry no meaning.
struct ScalarField {
    MeshPtr mesh;
    std::vector<double> data;

    ScalarField() = default;
    explicit ScalarField(MeshPtr m, double value = 0.0);
    ScalarField(MeshPtr m, std::vector<double> values);

    double& operator[](std::int64_t i) { return data[i]; }
    double operator[](std::int64_t i) const { return data[i]; }
    std::int64_t size() const { return static_cast<std::int64_t>(data.size()); }

    template <class Fn>
    static ScalarField from_function(MeshPtr m, Fn&& fn) {
        ScalarField f(m);
        std::vector<double> x(m->dim());
        for (std::int64_t i = 0; i < m->size(); ++i) {
            m->coordinates(i, x.data());
            f.data[i] = fn(x.data());
        }
        return f;
    }
};

// n x n Hermitian matrix per node, packed (see pack/unpack). A uniform field stores one matrix.
class HermitianField {
public:
    HermitianField() = default;
    HermitianField(MeshPtr mesh, bool uniform);

    static HermitianField identity(MeshPtr mesh);
    static HermitianField constant(MeshPtr mesh, const HMat& value);
    // omega = I + delta * S(z), S smooth, periodic in the torus period, |S| <= 1.
    static HermitianField perturbed(MeshPtr mesh, double delta);

    const MeshPtr& mesh() const { return mesh_; }
    int n() const { return n_; }
    bool uniform() const { return uniform_; }
    const double* packed(std::int64_t i) const { return data_.data() + (uniform_ ? 0 : i * n_ * n_); }
    double* packed(std::int64_t i) { return data_.data() + (uniform_ ? 0 : i * n_ * n_); }
    HMat at(std::int64_t i) const { return unpack(packed(i), n_); }
    void set(std::int64_t i, const HMat& a) { pack(a, packed(i)); }
    const std::vector<double>& raw() const { return data_; }
    std::vector<double>& raw() { return data_; }

private:
    MeshPtr mesh_;
    int n_ = 0;
    bool uniform_ = false;
    std::vector<double> data_;
};

// Per-node eigenvalues, ascending.
struct EigenField {
    MeshPtr mesh;
    int n = 0;
    std::vector<double> data;
    const double* at(std::int64_t i) const { return data.data() + i * n; }
};

}  // namespace linfest::geom
