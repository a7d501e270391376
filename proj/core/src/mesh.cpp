#include "linfest/mesh.hpp"

#include <cmath>

#include "linfest/error.hpp"

namespace linfest::geom {

std::shared_ptr<const Mesh> Mesh::torus(int n, int m, double period) {
    if (n < 1 || n > kMaxComplexDim) throw ParameterError("torus dimension out of range");
    if (m < 8) throw ParameterError("mesh needs m >= 8");
    if (!(period > 0.0) || !std::isfinite(period)) throw ParameterError("period must be positive");
    std::shared_ptr<Mesh> mesh(new Mesh());
    mesh->geometry_ = Geometry::Torus;
    mesh->n_ = n;
    mesh->m_ = m;
    mesh->axis_ = m;
    mesh->period_ = period;
    mesh->h_ = period / m;
    mesh->mid_ = m / 2;
    mesh->center_.assign(2 * n, 0.0);
    mesh->init_strides();
    return mesh;
}

std::shared_ptr<const Mesh> Mesh::ball(int n, int m, double radius, std::vector<double> center) {
    if (n < 1 || n > kMaxComplexDim) throw ParameterError("ball dimension out of range");
    if (m < 8 || m % 2 != 0) throw ParameterError("ball mesh needs even m >= 8");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw ParameterError("radius must be positive");
    if (center.empty()) center.assign(2 * n, 0.0);
    if (static_cast<int>(center.size()) != 2 * n)
        throw ParameterError("ball centre must have 2n coordinates");
    std::shared_ptr<Mesh> mesh(new Mesh());
    mesh->geometry_ = Geometry::Ball;
    mesh->n_ = n;
    mesh->m_ = m;
    mesh->axis_ = m + 1 + 2 * kBallPad;
    mesh->radius_ = radius;
    mesh->h_ = 2.0 * radius / m;
    mesh->mid_ = m / 2 + kBallPad;
    mesh->center_ = std::move(center);
    mesh->init_strides();
    mesh->classify_ball();
    return mesh;
}

void Mesh::init_strides() {
    const int d = dim();
    std::int64_t s = 1;
    for (int a = d - 1; a >= 0; --a) {
        stride_[a] = s;
        s *= axis_;
    }
    size_ = s;
}

void Mesh::classify_ball() {
    const int d = dim();
    const std::int64_t r2 = static_cast<std::int64_t>(m_ / 2) * (m_ / 2);
    kinds_.assign(size_, static_cast<std::uint8_t>(NodeKind::Exterior));
    std::array<int, kMaxRealDim> mi{};
    for (std::int64_t idx = 0; idx < size_; ++idx) {
        multi_index(idx, mi.data());
        std::int64_t q = 0;
        for (int a = 0; a < d; ++a) q += static_cast<std::int64_t>(mi[a] - mid_) * (mi[a] - mid_);
        if (q < r2) kinds_[idx] = static_cast<std::uint8_t>(NodeKind::Interior);
    }
    // Boundary: non-interior nodes reached by the axis or diagonal stencil of an interior node.
    for (std::int64_t idx = 0; idx < size_; ++idx) {
        if (kinds_[idx] != static_cast<std::uint8_t>(NodeKind::Interior)) continue;
        auto mark = [&](std::int64_t j) {
            if (kinds_[j] == static_cast<std::uint8_t>(NodeKind::Exterior))
                kinds_[j] = static_cast<std::uint8_t>(NodeKind::Boundary);
        };
        for (int a = 0; a < d; ++a) {
            mark(idx + stride_[a]);
            mark(idx - stride_[a]);
            for (int b = a + 1; b < d; ++b) {
                mark(idx + stride_[a] + stride_[b]);
                mark(idx + stride_[a] - stride_[b]);
                mark(idx - stride_[a] + stride_[b]);
                mark(idx - stride_[a] - stride_[b]);
            }
        }
    }
    for (std::int64_t idx = 0; idx < size_; ++idx) {
        if (kinds_[idx] == static_cast<std::uint8_t>(NodeKind::Interior)) interior_.push_back(idx);
        if (kinds_[idx] == static_cast<std::uint8_t>(NodeKind::Boundary)) boundary_.push_back(idx);
    }
}

void Mesh::multi_index(std::int64_t idx, int* out) const {
    for (int a = 0; a < dim(); ++a) {
        out[a] = static_cast<int>(idx / stride_[a]);
        idx -= out[a] * stride_[a];
    }
}

std::int64_t Mesh::linear_index(const int* mi) const {
    std::int64_t idx = 0;
    for (int a = 0; a < dim(); ++a) {
        int i = mi[a];
        if (is_torus()) {
            i %= axis_;
            if (i < 0) i += axis_;
        } else if (i < 0 || i >= axis_) {
            throw IndexError("multi-index outside the ball box");
        }
        idx += i * stride_[a];
    }
    return idx;
}

double Mesh::coordinate(int axis, int i) const {
    if (is_torus()) return -0.5 * period_ + i * h_;
    return center_[axis] + (i - mid_) * h_;
}

void Mesh::coordinates(std::int64_t idx, double* x) const {
    std::array<int, kMaxRealDim> mi{};
    multi_index(idx, mi.data());
    for (int a = 0; a < dim(); ++a) x[a] = coordinate(a, mi[a]);
}

std::int64_t Mesh::shift(std::int64_t idx, int axis, int delta) const {
    const std::int64_t s = stride_[axis];
    const int i = static_cast<int>((idx / s) % axis_);
    int j = i + delta;
    if (is_torus()) {
        j %= axis_;
        if (j < 0) j += axis_;
    } else if (j < 0 || j >= axis_) {
        throw IndexError("shift leaves the ball box");
    }
    return idx + (j - i) * s;
}

double Mesh::cell_volume() const { return std::pow(h_, dim()); }

bool Mesh::same_as(const Mesh& o) const {
    return this == &o || (geometry_ == o.geometry_ && n_ == o.n_ && m_ == o.m_ && h_ == o.h_ &&
                          period_ == o.period_ && radius_ == o.radius_ && center_ == o.center_);
}

}  // namespace linfest::geom
