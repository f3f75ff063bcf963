#pragma once

#include "gnp/nn/param_store.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gnp::nn {

struct AdamConfig {
    double rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// One adaptive-moment update over the populated gradients. When `subset`
/// is given, only parameters whose name starts with one of the prefixes
/// are updated (their moments included). Throws NumericsError on a
/// non-finite gradient, naming the parameter.
void adam_step(ParamStore& ps, const AdamConfig& cfg,
               const std::vector<std::string>* prefixes = nullptr);

}  // namespace gnp::nn
