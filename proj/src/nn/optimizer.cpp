#include "gnp/nn/optimizer.hpp"

#include <cmath>

namespace gnp::nn {

void adam_step(ParamStore& ps, const AdamConfig& cfg, const std::vector<std::string>* prefixes) {
    const long t = ++ps.step();
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));

    for (const auto& name : ps.names()) {
        if (prefixes) {
            bool match = false;
            for (const auto& p : *prefixes) match = match || name.rfind(p, 0) == 0;
            if (!match) continue;
        }
        const Tensor& g = ps.grad(name);
        if (!g.data.allFinite()) throw NumericsError("non-finite gradient for parameter " + name);
        Tensor& m1 = ps.moment1(name);
        Tensor& m2 = ps.moment2(name);
        Tensor& v = ps.value(name);
        m1.data = cfg.beta1 * m1.data + (1.0 - cfg.beta1) * g.data;
        m2.data = cfg.beta2 * m2.data.array().matrix() + (1.0 - cfg.beta2) * g.data.array().square().matrix();
        for (int i = 0; i < v.size(); ++i) {
            const double mhat = m1.data(i) / bc1;
            const double vhat = m2.data(i) / bc2;
            v.data(i) -= cfg.rate * mhat / (std::sqrt(vhat) + cfg.eps);
        }
    }
}

}  // namespace gnp::nn
