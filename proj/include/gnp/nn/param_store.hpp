#pragma once

#include "gnp/nn/tensor.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace gnp::nn {

/// Named parameter tensors with paired gradient slots and Adam moments.
/// Iteration follows insertion order so updates are deterministic.
class ParamStore {
public:
    Tensor& create(const std::string& name, std::vector<int> shape);
    void init_uniform(const std::string& name, std::vector<int> shape, double bound,
                      std::mt19937_64& rng);
    /// fan-in scaled uniform: U(-1/sqrt(fan_in), 1/sqrt(fan_in))
    void init_fan_in(const std::string& name, std::vector<int> shape, int fan_in,
                     std::mt19937_64& rng);

    bool has(const std::string& name) const;
    Tensor& value(const std::string& name);
    const Tensor& value(const std::string& name) const;
    Tensor& grad(const std::string& name);
    const Tensor& grad(const std::string& name) const;
    Tensor& moment1(const std::string& name);
    Tensor& moment2(const std::string& name);

    void zero_grads();
    const std::vector<std::string>& names() const { return order_; }
    std::size_t count() const { return order_.size(); }
    long& step() { return step_; }
    long step() const { return step_; }

    /// Binary checkpoint container; layout documented in the README.
    void save(const std::string& path) const;
    static ParamStore load(const std::string& path);

    bool operator==(const ParamStore& other) const;

private:
    struct Entry {
        Tensor value, grad, m1, m2;
    };
    Entry& entry(const std::string& name);
    const Entry& entry(const std::string& name) const;

    std::vector<std::string> order_;
    std::map<std::string, Entry> entries_;
    long step_ = 0;
};

}  // namespace gnp::nn
