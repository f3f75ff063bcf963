#include "gnp/nn/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace gnp::nn {

Tensor Tensor::zeros(std::vector<int> shape) {
    Tensor t;
    t.shape = std::move(shape);
    long n = 1;
    for (int d : t.shape) {
        if (d <= 0) throw ShapeError("tensor dimensions must be positive");
        n *= d;
    }
    t.data = Eigen::VectorXd::Zero(n);
    return t;
}

Tensor Tensor::scalar(double v) {
    Tensor t = zeros({1});
    t.data(0) = v;
    return t;
}

Tensor Tensor::vec(const Eigen::VectorXd& v) {
    Tensor t;
    t.shape = {static_cast<int>(v.size())};
    t.data = v;
    return t;
}

Tensor Tensor::vec2(const Vec2& v) {
    Tensor t = zeros({2});
    t.data(0) = v.x();
    t.data(1) = v.y();
    return t;
}

Tensor Tensor::from_matrix(const Eigen::MatrixXd& m) {
    Tensor t = zeros({static_cast<int>(m.rows()), static_cast<int>(m.cols())});
    t.mat() = m;
    return t;
}

Eigen::Map<RowMatrixXd> Tensor::mat() { return {data.data(), rows(), cols()}; }

Eigen::Map<const RowMatrixXd> Tensor::mat() const { return {data.data(), rows(), cols()}; }

double& Tensor::at(int i, int j) { return data(static_cast<long>(i) * cols() + j); }

double Tensor::at(int i, int j) const { return data(static_cast<long>(i) * cols() + j); }

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ", ";
        os << shape[i];
    }
    os << ')';
    return os.str();
}

void Tensor::check_finite(const char* context) const {
    if (!data.allFinite())
        throw NumericsError(std::string("non-finite value produced by ") + context);
}

}  // namespace gnp::nn
