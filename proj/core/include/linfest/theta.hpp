#pragma once

#include <span>

#include "linfest/cone.hpp"
#include "linfest/field.hpp"

namespace linfest::lab {

struct ThetaResult {
    // Theta^{i jbar} per node
    geom::HermitianField theta;
    // min over nodes of det Theta - gamma e^{-nF} det(g)^{-1}, e^{nF} := f(lambda)^n
    double residual = 0.0;
    // min of f^n det(g) det Theta - gamma, the same inequality without the f^{-n} scale
    double scaled_residual = 0.0;
    double min_eigenvalue = 0.0;
    // max |F - log f(lambda)|; zero when F is the log of the operator value
    double F_mismatch = 0.0;
};

struct ThetaPoint {
    geom::HMat theta;
    double det = 0.0;
    double bound = 0.0;
    double residual = 0.0;
    double scaled_residual = 0.0;
    double min_eigenvalue = 0.0;
};

// Frame: columns of L^{-*} with g = L L^*, which are g-orthonormal.
ThetaPoint theta_point(const cone::OperatorSpec& op, std::span<const double> lambda, const geom::HMat& g);

ThetaResult theta_tensor(const cone::OperatorSpec& op, const geom::EigenField& lambda,
                         const geom::HermitianField& omega, const geom::ScalarField& F);

}  // namespace linfest::lab
