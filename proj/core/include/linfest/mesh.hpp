#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

namespace linfest::geom {

inline constexpr int kMaxComplexDim = 4;
inline constexpr int kMaxRealDim = 2 * kMaxComplexDim;

enum class Geometry { Torus, Ball };
enum class NodeKind : std::uint8_t { Exterior = 0, Interior = 1, Boundary = 2 };

// Regular grid in 2n real coordinates ordered (x_1, y_1, ..., x_n, y_n).
// Torus: m points per axis, x_i = -period/2 + i*h.
// Ball: box of m + 1 + 2*pad points per axis centred on the ball centre, h = 2r/m.
class Mesh {
public:
    static constexpr int kBallPad = 2;

    static std::shared_ptr<const Mesh> torus(int n, int m, double period = 1.0);
    static std::shared_ptr<const Mesh> ball(int n, int m, double radius,
                                            std::vector<double> center = {});

    Geometry geometry() const { return geometry_; }
    bool is_torus() const { return geometry_ == Geometry::Torus; }
    int n() const { return n_; }
    int dim() const { return 2 * n_; }
    int m() const { return m_; }
    double spacing() const { return h_; }
    double period() const { return period_; }
    double radius() const { return radius_; }
    const std::vector<double>& center() const { return center_; }

    int axis_size() const { return axis_; }
    std::int64_t size() const { return size_; }
    std::int64_t stride(int axis) const { return stride_[axis]; }
    // Axis index of the ball centre.
    int mid() const { return mid_; }

    void multi_index(std::int64_t idx, int* out) const;
    std::int64_t linear_index(const int* mi) const;
    double coordinate(int axis, int i) const;
    void coordinates(std::int64_t idx, double* x) const;
    // Node offset by `delta` steps along `axis`; periodic on tori.
    std::int64_t shift(std::int64_t idx, int axis, int delta) const;

    NodeKind kind(std::int64_t idx) const {
        return is_torus() ? NodeKind::Interior : static_cast<NodeKind>(kinds_[idx]);
    }
    const std::vector<std::uint8_t>& kinds() const { return kinds_; }
    // Ball only: interior and boundary node lists in increasing index order.
    const std::vector<std::int64_t>& interior() const { return interior_; }
    const std::vector<std::int64_t>& boundary() const { return boundary_; }

    double cell_volume() const;
    bool same_as(const Mesh& other) const;

private:
    Mesh() = default;
    void init_strides();
    void classify_ball();

    Geometry geometry_ = Geometry::Torus;
    int n_ = 1;
    int m_ = 8;
    int axis_ = 8;
    int mid_ = 0;
    double h_ = 0.0;
    double period_ = 0.0;
    double radius_ = 0.0;
    std::vector<double> center_;
    std::int64_t size_ = 0;
    std::array<std::int64_t, kMaxRealDim> stride_{};
    std::vector<std::uint8_t> kinds_;
    std::vector<std::int64_t> interior_;
    std::vector<std::int64_t> boundary_;
};

using MeshPtr = std::shared_ptr<const Mesh>;

}  // namespace linfest::geom
