#pragma once

#include "gnp/common.hpp"

#include <initializer_list>
#include <vector>

namespace gnp::nn {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Dense tensor, row-major, rank 1..3. Rank-1 tensors behave as a single
/// row in matrix contexts.
struct Tensor {
    std::vector<int> shape;
    Eigen::VectorXd data;

    Tensor() = default;

    static Tensor zeros(std::vector<int> shape);
    static Tensor scalar(double v);
    static Tensor vec(const Eigen::VectorXd& v);
    static Tensor vec2(const Vec2& v);
    static Tensor from_matrix(const Eigen::MatrixXd& m);  // shape {rows, cols}

    int size() const { return static_cast<int>(data.size()); }
    int ndim() const { return static_cast<int>(shape.size()); }
    int rows() const { return ndim() >= 2 ? shape[0] : 1; }
    int cols() const { return ndim() >= 2 ? shape[ndim() - 1] : (ndim() == 1 ? shape[0] : 1); }

    Eigen::Map<RowMatrixXd> mat();
    Eigen::Map<const RowMatrixXd> mat() const;

    double& at(int i, int j);
    double at(int i, int j) const;

    bool same_shape(const Tensor& other) const { return shape == other.shape; }
    std::string shape_str() const;
    void check_finite(const char* context) const;
};

}  // namespace gnp::nn
