#include "gnp/nn/graph.hpp"

#include <cmath>

namespace gnp::nn {

namespace {
void require(bool cond, const std::string& msg) {
    if (!cond) throw ShapeError(msg);
}
}  // namespace

Graph::NodeId Graph::push(Tensor value, bool requires_grad,
                          std::function<void(Graph&, NodeId)> backward, const char* context) {
    value.check_finite(context);
    Node n;
    n.value = std::move(value);
    n.requires_grad = requires_grad;
    n.backward = std::move(backward);
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size()) - 1;
}

Graph::NodeId Graph::leaf(Tensor value, bool requires_grad) {
    return push(std::move(value), requires_grad, nullptr, "leaf");
}

Graph::NodeId Graph::param(ParamStore& store, const std::string& name) {
    NodeId id = push(store.value(name), true, nullptr, "param");
    nodes_.back().store = &store;
    nodes_.back().param_name = name;
    return id;
}

const Tensor& Graph::grad(NodeId id) const {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.grad.size() == 0) throw NumericsError("gradient not computed; run backward() first");
    return n.grad;
}

void Graph::backward(NodeId root) {
    require(value(root).size() == 1, "backward root must be a single element");
    for (auto& n : nodes_) {
        n.grad = Tensor::zeros(n.value.shape);
    }
    nodes_[static_cast<std::size_t>(root)].grad.data(0) = 1.0;
    for (NodeId id = root; id >= 0; --id) {
        Node& n = nodes_[static_cast<std::size_t>(id)];
        if (!n.requires_grad) continue;
        if (n.backward) n.backward(*this, id);
        if (n.store) {
            n.store->grad(n.param_name).data += n.grad.data;
        }
    }
}

// ---------- arithmetic ----------

Graph::NodeId Graph::matmul(NodeId a, NodeId b) {
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    require(A.cols() == B.rows(), "matmul: inner dimensions disagree: " + A.shape_str() + " vs " +
                                      B.shape_str());
    Tensor out = Tensor::zeros({A.rows(), B.cols()});
    out.mat() = A.mat() * B.mat();
    if (value(a).ndim() == 1 && B.cols() >= 1) out.shape = {B.cols()};  // keep vectors rank-1
    bool rg = needs(a) || needs(b);
    return push(std::move(out), rg, [a, b](Graph& g, NodeId id) {
        const Tensor& G = g.grad_mut(id);
        const Tensor& A = g.value(a);
        const Tensor& B = g.value(b);
        Eigen::Map<const RowMatrixXd> Gm(G.data.data(), A.rows(), B.cols());
        if (g.needs(a)) g.grad_mut(a).mat() += Gm * B.mat().transpose();
        if (g.needs(b)) g.grad_mut(b).mat() += A.mat().transpose() * Gm;
    }, "matmul");
}

Graph::NodeId Graph::add(NodeId a, NodeId b) {
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    bool rg = needs(a) || needs(b);
    if (A.same_shape(B)) {
        Tensor out = A;
        out.data += B.data;
        return push(std::move(out), rg, [a, b](Graph& g, NodeId id) {
            const Tensor& G = g.grad_mut(id);
            if (g.needs(a)) g.grad_mut(a).data += G.data;
            if (g.needs(b)) g.grad_mut(b).data += G.data;
        }, "add");
    }
    // row broadcast: [m,n] + {n}
    require(A.ndim() == 2 && B.ndim() == 1 && A.cols() == B.cols(),
            "add: shapes incompatible: " + A.shape_str() + " vs " + B.shape_str());
    Tensor out = A;
    out.mat().rowwise() += B.mat().row(0);
    return push(std::move(out), rg, [a, b](Graph& g, NodeId id) {
        const Tensor& G = g.grad_mut(id);
        if (g.needs(a)) g.grad_mut(a).data += G.data;
        if (g.needs(b)) g.grad_mut(b).mat().row(0) += G.mat().colwise().sum();
    }, "add");
}

Graph::NodeId Graph::sub(NodeId a, NodeId b) {
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    require(A.same_shape(B), "sub: shapes differ: " + A.shape_str() + " vs " + B.shape_str());
    Tensor out = A;
    out.data -= B.data;
    bool rg = needs(a) || needs(b);
    return push(std::move(out), rg, [a, b](Graph& g, NodeId id) {
        const Tensor& G = g.grad_mut(id);
        if (g.needs(a)) g.grad_mut(a).data += G.data;
        if (g.needs(b)) g.grad_mut(b).data -= G.data;
    }, "sub");
}

Graph::NodeId Graph::mul(NodeId a, NodeId b) {
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    require(A.same_shape(B), "mul: shapes differ: " + A.shape_str() + " vs " + B.shape_str());
    Tensor out = A;
    out.data = A.data.cwiseProduct(B.data);
    bool rg = needs(a) || needs(b);
    return push(std::move(out), rg, [a, b](Graph& g, NodeId id) {
        const Tensor& G = g.grad_mut(id);
        if (g.needs(a)) g.grad_mut(a).data += G.data.cwiseProduct(g.value(b).data);
        if (g.needs(b)) g.grad_mut(b).data += G.data.cwiseProduct(g.value(a).data);
    }, "mul");
}

Graph::NodeId Graph::addn(const std::vector<NodeId>& xs) {
    require(!xs.empty(), "addn: empty list");
    Tensor out = value(xs[0]);
    bool rg = needs(xs[0]);
    for (std::size_t i = 1; i < xs.size(); ++i) {
        require(value(xs[i]).same_shape(out), "addn: shapes differ");
        out.data += value(xs[i]).data;
        rg = rg || needs(xs[i]);
    }
    auto list = xs;
    return push(std::move(out), rg, [list](Graph& g, NodeId id) {
        const Tensor& G = g.grad_mut(id);
        for (NodeId x : list)
            if (g.needs(x)) g.grad_mut(x).data += G.data;
    }, "addn");
}

Graph::NodeId Graph::scale(NodeId a, double c) {
    Tensor out = value(a);
    out.data *= c;
    return push(std::move(out), needs(a), [a, c](Graph& g, NodeId id) {
        if (g.needs(a)) g.grad_mut(a).data += c * g.grad_mut(id).data;
    }, "scale");
}

Graph::NodeId Graph::smul(NodeId a, NodeId s) {
    require(value(s).size() == 1, "smul: scalar operand must have one element");
    const double sv = value(s).data(0);
    Tensor out = value(a);
    out.data *= sv;
    bool rg = needs(a) || needs(s);
    return push(std::move(out), rg, [a, s](Graph& g, NodeId id) {
        const Tensor& G = g.grad_mut(id);
        const double sv = g.value(s).data(0);
        if (g.needs(a)) g.grad_mut(a).data += sv * G.data;
        if (g.needs(s)) g.grad_mut(s).data(0) += G.data.dot(g.value(a).data);
    }, "smul");
}

Graph::NodeId Graph::sdiv(NodeId a, NodeId s) {
    require(value(s).size() == 1, "sdiv: scalar operand must have one element");
    const double sv = value(s).data(0);
    Tensor out = value(a);
    out.data /= sv;
    bool rg = needs(a) || needs(s);
    return push(std::move(out), rg, [a, s](Graph& g, NodeId id) {
        const Tensor& G = g.grad_mut(id);
        const double sv = g.value(s).data(0);
        if (g.needs(a)) g.grad_mut(a).data += G.data / sv;
        if (g.needs(s))
            g.grad_mut(s).data(0) -= G.data.dot(g.value(a).data) / (sv * sv);
    }, "sdiv");
}

Graph::NodeId Graph::adds(NodeId a, NodeId s) {
    require(value(s).size() == 1, "adds: scalar operand must have one element");
    Tensor out = value(a);
    out.data.array() += value(s).data(0);
    bool rg = needs(a) || needs(s);
    return push(std::move(out), rg, [a, s](Graph& g, NodeId id) {
        const Tensor& G = g.grad_mut(id);
        if (g.needs(a)) g.grad_mut(a).data += G.data;
        if (g.needs(s)) g.grad_mut(s).data(0) += G.data.sum();
    }, "adds");
}

// ---------- activations ----------

Graph::NodeId Graph::relu(NodeId a) {
    Tensor out = value(a);
    out.data = out.data.cwiseMax(0.0);
    return push(std::move(out), needs(a), [a](Graph& g, NodeId id) {
        if (!g.needs(a)) return;
        const Tensor& G = g.grad_mut(id);
        const Tensor& A = g.value(a);
        for (int i = 0; i < A.size(); ++i)
            if (A.data(i) > 0.0) g.grad_mut(a).data(i) += G.data(i);
    }, "relu");
}

Graph::NodeId Graph::tanh_op(NodeId a) {
    Tensor out = value(a);
    out.data = out.data.array().tanh();
    return push(std::move(out), needs(a), [a](Graph& g, NodeId id) {
        if (!g.needs(a)) return;
        const Tensor& Y = g.value(id);
        g.grad_mut(a).data.array() += g.grad_mut(id).data.array() * (1.0 - Y.data.array().square());
    }, "tanh");
}

Graph::NodeId Graph::sigmoid(NodeId a) {
    Tensor out = value(a);
    out.data = (1.0 + (-out.data.array()).exp()).inverse();
    return push(std::move(out), needs(a), [a](Graph& g, NodeId id) {
        if (!g.needs(a)) return;
        const Tensor& Y = g.value(id);
        g.grad_mut(a).data.array() +=
            g.grad_mut(id).data.array() * Y.data.array() * (1.0 - Y.data.array());
    }, "sigmoid");
}

Graph::NodeId Graph::softplus(NodeId a) {
    Tensor out = value(a);
    // numerically stable: max(x,0) + log1p(exp(-|x|))
    out.data = out.data.unaryExpr(
        [](double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); });
    return push(std::move(out), needs(a), [a](Graph& g, NodeId id) {
        if (!g.needs(a)) return;
        const Tensor& A = g.value(a);
        g.grad_mut(a).data.array() +=
            g.grad_mut(id).data.array() * (1.0 + (-A.data.array()).exp()).inverse();
    }, "softplus");
}

Graph::NodeId Graph::exp_op(NodeId a) {
    Tensor out = value(a);
    out.data = out.data.array().exp();
    return push(std::move(out), needs(a), [a](Graph& g, NodeId id) {
        if (!g.needs(a)) return;
        g.grad_mut(a).data.array() += g.grad_mut(id).data.array() * g.value(id).data.array();
    }, "exp");
}

// ---------- structure ----------

Graph::NodeId Graph::transpose(NodeId a) {
    const Tensor& A = value(a);
    require(A.ndim() <= 2, "transpose expects rank <= 2");
    Tensor out = Tensor::zeros({A.cols(), A.rows()});
    out.mat() = A.mat().transpose();
    return push(std::move(out), needs(a), [a](Graph& g, NodeId id) {
        if (!g.needs(a)) return;
        g.grad_mut(a).mat() += g.grad_mut(id).mat().transpose();
    }, "transpose");
}

Graph::NodeId Graph::concat_cols(NodeId a, NodeId b) {
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    require(A.rows() == B.rows(), "concat_cols: row counts differ");
    const bool vec_out = A.ndim() == 1 && B.ndim() == 1;
    Tensor out = Tensor::zeros(vec_out ? std::vector<int>{A.cols() + B.cols()}
                                       : std::vector<int>{A.rows(), A.cols() + B.cols()});
    out.mat().leftCols(A.cols()) = A.mat();
    out.mat().rightCols(B.cols()) = B.mat();
    bool rg = needs(a) || needs(b);
    return push(std::move(out), rg, [a, b](Graph& g, NodeId id) {
        const Tensor& A = g.value(a);
        const Tensor& B = g.value(b);
        Eigen::Map<const RowMatrixXd> Gm(g.grad_mut(id).data.data(), A.rows(), A.cols() + B.cols());
        if (g.needs(a)) g.grad_mut(a).mat() += Gm.leftCols(A.cols());
        if (g.needs(b)) g.grad_mut(b).mat() += Gm.rightCols(B.cols());
    }, "concat_cols");
}

Graph::NodeId Graph::concat_vec(const std::vector<NodeId>& xs) {
    require(!xs.empty(), "concat_vec: empty list");
    int total = 0;
    bool rg = false;
    for (NodeId x : xs) {
        require(value(x).ndim() == 1, "concat_vec expects rank-1 inputs");
        total += value(x).size();
        rg = rg || needs(x);
    }
    Tensor out = Tensor::zeros({total});
    int off = 0;
    for (NodeId x : xs) {
        out.data.segment(off, value(x).size()) = value(x).data;
        off += value(x).size();
    }
    auto list = xs;
    return push(std::move(out), rg, [list](Graph& g, NodeId id) {
        const Tensor& G = g.grad_mut(id);
        int off = 0;
        for (NodeId x : list) {
            const int n = g.value(x).size();
            if (g.needs(x)) g.grad_mut(x).data += G.data.segment(off, n);
            off += n;
        }
    }, "concat_vec");
}

Graph::NodeId Graph::slice_cols(NodeId a, int c0, int len) {
    const Tensor& A = value(a);
    require(c0 >= 0 && len > 0 && c0 + len <= A.cols(), "slice_cols out of range");
    Tensor out = Tensor::zeros(A.ndim() == 1 ? std::vector<int>{len}
                                             : std::vector<int>{A.rows(), len});
    out.mat() = A.mat().middleCols(c0, len);
    return push(std::move(out), needs(a), [a, c0, len](Graph& g, NodeId id) {
        if (!g.needs(a)) return;
        g.grad_mut(a).mat().middleCols(c0, len) += g.grad_mut(id).mat();
    }, "slice_cols");
}

Graph::NodeId Graph::row(NodeId a, int r) {
    const Tensor& A = value(a);
    require(A.ndim() == 2 && r >= 0 && r < A.rows(), "row index out of range");
    Tensor out = Tensor::zeros({A.cols()});
    out.mat() = A.mat().row(r);
    return push(std::move(out), needs(a), [a, r](Graph& g, NodeId id) {
        if (!g.needs(a)) return;
        g.grad_mut(a).mat().row(r) += g.grad_mut(id).mat();
    }, "row");
}

Graph::NodeId Graph::stack_rows(const std::vector<NodeId>& xs) {
    require(!xs.empty(), "stack_rows: empty list");
    const int n = value(xs[0]).size();
    bool rg = false;
    for (NodeId x : xs) {
        require(value(x).ndim() == 1 && value(x).size() == n, "stack_rows expects equal rank-1 inputs");
        rg = rg || needs(x);
    }
    Tensor out = Tensor::zeros({static_cast<int>(xs.size()), n});
    for (std::size_t i = 0; i < xs.size(); ++i) out.mat().row(static_cast<int>(i)) = value(xs[i]).mat();
    auto list = xs;
    return push(std::move(out), rg, [list](Graph& g, NodeId id) {
        const Tensor& G = g.grad_mut(id);
        for (std::size_t i = 0; i < list.size(); ++i)
            if (g.needs(list[i])) g.grad_mut(list[i]).mat() += G.mat().row(static_cast<int>(i));
    }, "stack_rows");
}

Graph::NodeId Graph::elem(NodeId a, int i) {
    const Tensor& A = value(a);
    require(i >= 0 && i < A.size(), "elem index out of range");
    Tensor out = Tensor::scalar(A.data(i));
    return push(std::move(out), needs(a), [a, i](Graph& g, NodeId id) {
        if (g.needs(a)) g.grad_mut(a).data(i) += g.grad_mut(id).data(0);
    }, "elem");
}

// ---------- reductions ----------

Graph::NodeId Graph::sum(NodeId a) {
    Tensor out = Tensor::scalar(value(a).data.sum());
    return push(std::move(out), needs(a), [a](Graph& g, NodeId id) {
        if (g.needs(a)) g.grad_mut(a).data.array() += g.grad_mut(id).data(0);
    }, "sum");
}

Graph::NodeId Graph::mean(NodeId a) {
    const int n = value(a).size();
    Tensor out = Tensor::scalar(value(a).data.mean());
    return push(std::move(out), needs(a), [a, n](Graph& g, NodeId id) {
        if (g.needs(a)) g.grad_mut(a).data.array() += g.grad_mut(id).data(0) / n;
    }, "mean");
}

Graph::NodeId Graph::mean_cols(NodeId a) {
    const Tensor& A = value(a);
    require(A.ndim() == 2, "mean_cols expects rank-2");
    Tensor out = Tensor::zeros({A.rows()});
    out.mat() = A.mat().rowwise().mean().transpose();
    const int n = A.cols();
    return push(std::move(out), needs(a), [a, n](Graph& g, NodeId id) {
        if (!g.needs(a)) return;
        const Tensor& G = g.grad_mut(id);
        for (int r = 0; r < g.value(a).rows(); ++r)
            g.grad_mut(a).mat().row(r).array() += G.data(r) / n;
    }, "mean_cols");
}

Graph::NodeId Graph::vnorm(NodeId a) {
    require(value(a).ndim() == 1, "vnorm expects rank-1");
    const double n = value(a).data.norm();
    Tensor out = Tensor::scalar(n);
    return push(std::move(out), needs(a), [a](Graph& g, NodeId id) {
        if (!g.needs(a)) return;
        const double n = g.value(id).data(0);
        if (n > 0.0) g.grad_mut(a).data += g.grad_mut(id).data(0) * g.value(a).data / n;
    }, "vnorm");
}

// ---------- softmax / layer norm ----------

Graph::NodeId Graph::row_softmax(NodeId a) {
    const Tensor& A = value(a);
    Tensor out = A;
    auto M = out.mat();
    for (int r = 0; r < M.rows(); ++r) {
        const double mx = M.row(r).maxCoeff();
        M.row(r) = (M.row(r).array() - mx).exp();
        M.row(r) /= M.row(r).sum();
    }
    return push(std::move(out), needs(a), [a](Graph& g, NodeId id) {
        if (!g.needs(a)) return;
        const Tensor& Y = g.value(id);
        const Tensor& G = g.grad_mut(id);
        auto Ym = Y.mat();
        auto Gm = G.mat();
        for (int r = 0; r < Ym.rows(); ++r) {
            const double dot = (Gm.row(r).array() * Ym.row(r).array()).sum();
            g.grad_mut(a).mat().row(r).array() += Ym.row(r).array() * (Gm.row(r).array() - dot);
        }
    }, "row_softmax");
}

Graph::NodeId Graph::masked_row_softmax(NodeId a, const std::vector<bool>& key_mask) {
    const Tensor& A = value(a);
    require(static_cast<int>(key_mask.size()) == A.cols(), "mask length != key count");
    bool any = false;
    for (bool m : key_mask) any = any || m;
    if (!any) throw NumericsError("attention is degenerate: every key slot is masked");
    Tensor out = A;
    auto M = out.mat();
    for (int r = 0; r < M.rows(); ++r) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < M.cols(); ++c)
            if (key_mask[static_cast<std::size_t>(c)]) mx = std::max(mx, M(r, c));
        double s = 0.0;
        for (int c = 0; c < M.cols(); ++c) {
            if (key_mask[static_cast<std::size_t>(c)]) {
                M(r, c) = std::exp(M(r, c) - mx);
                s += M(r, c);
            } else {
                M(r, c) = 0.0;
            }
        }
        M.row(r) /= s;
    }
    return push(std::move(out), needs(a), [a](Graph& g, NodeId id) {
        if (!g.needs(a)) return;
        // masked entries have y=0, so the plain softmax jacobian applies
        const Tensor& Y = g.value(id);
        const Tensor& G = g.grad_mut(id);
        auto Ym = Y.mat();
        auto Gm = G.mat();
        for (int r = 0; r < Ym.rows(); ++r) {
            const double dot = (Gm.row(r).array() * Ym.row(r).array()).sum();
            g.grad_mut(a).mat().row(r).array() += Ym.row(r).array() * (Gm.row(r).array() - dot);
        }
    }, "masked_row_softmax");
}

Graph::NodeId Graph::layer_norm(NodeId x, NodeId gain, NodeId bias, double eps) {
    const Tensor& X = value(x);
    require(value(gain).size() == X.cols() && value(bias).size() == X.cols(),
            "layer_norm: gain/bias must match feature dimension");
    Tensor out = X;
    auto M = out.mat();
    auto Gn = value(gain).mat();
    auto Bs = value(bias).mat();
    for (int r = 0; r < M.rows(); ++r) {
        const double mu = M.row(r).mean();
        const double var = (M.row(r).array() - mu).square().mean();
        M.row(r) = ((M.row(r).array() - mu) / std::sqrt(var + eps)) * Gn.row(0).array() +
                   Bs.row(0).array();
    }
    bool rg = needs(x) || needs(gain) || needs(bias);
    return push(std::move(out), rg, [x, gain, bias, eps](Graph& g, NodeId id) {
        const Tensor& X = g.value(x);
        const Tensor& G = g.grad_mut(id);
        auto Xm = X.mat();
        auto Gm = G.mat();
        Eigen::ArrayXd gainarr = g.value(gain).data.array();
        for (int r = 0; r < Xm.rows(); ++r) {
            Eigen::ArrayXd xrow = Xm.row(r).transpose().array();
            Eigen::ArrayXd grow = Gm.row(r).transpose().array();
            const double mu = xrow.mean();
            const double var = (xrow - mu).square().mean();
            const double inv = 1.0 / std::sqrt(var + eps);
            Eigen::ArrayXd xhat = (xrow - mu) * inv;
            Eigen::ArrayXd gy = grow * gainarr;  // d/d xhat
            if (g.needs(gain)) g.grad_mut(gain).data.array() += grow * xhat;
            if (g.needs(bias)) g.grad_mut(bias).data.array() += grow;
            if (g.needs(x)) {
                const double mean_gy = gy.mean();
                const double mean_gyx = (gy * xhat).mean();
                g.grad_mut(x).mat().row(r).transpose().array() +=
                    inv * (gy - mean_gy - xhat * mean_gyx);
            }
        }
    }, "layer_norm");
}

Graph::NodeId Graph::clamp_abs_min(NodeId a, double floor, bool* clamped) {
    const Tensor& A = value(a);
    Tensor out = A;
    bool did = false;
    for (int i = 0; i < out.size(); ++i) {
        const double v = out.data(i);
        if (std::abs(v) < floor) {
            out.data(i) = (v < 0.0) ? -floor : floor;
            did = true;
        }
    }
    if (clamped) *clamped = did;
    return push(std::move(out), needs(a), [a, floor](Graph& g, NodeId id) {
        if (!g.needs(a)) return;
        const Tensor& A = g.value(a);
        const Tensor& G = g.grad_mut(id);
        for (int i = 0; i < A.size(); ++i)
            if (std::abs(A.data(i)) >= floor) g.grad_mut(a).data(i) += G.data(i);
    }, "clamp_abs_min");
}

// ---------- losses ----------

Graph::NodeId Graph::huber(NodeId pred, const Tensor& target, double delta) {
    const Tensor& P = value(pred);
    require(P.same_shape(target) || P.size() == target.size(), "huber: shape mismatch");
    double loss = 0.0;
    for (int i = 0; i < P.size(); ++i) {
        const double d = P.data(i) - target.data(i);
        loss += (std::abs(d) <= delta) ? 0.5 * d * d : delta * (std::abs(d) - 0.5 * delta);
    }
    Tensor t = target;
    return push(Tensor::scalar(loss), needs(pred), [pred, t, delta](Graph& g, NodeId id) {
        if (!g.needs(pred)) return;
        const double go = g.grad_mut(id).data(0);
        const Tensor& P = g.value(pred);
        for (int i = 0; i < P.size(); ++i) {
            const double d = P.data(i) - t.data(i);
            const double dd = (std::abs(d) <= delta) ? d : delta * (d > 0 ? 1.0 : -1.0);
            g.grad_mut(pred).data(i) += go * dd;
        }
    }, "huber");
}

Graph::NodeId Graph::cross_entropy_soft(NodeId logits, const Tensor& soft_target) {
    const Tensor& Z = value(logits);
    require(Z.size() == soft_target.size(), "cross_entropy: size mismatch");
    const double zmax = Z.data.maxCoeff();
    const double lse = zmax + std::log((Z.data.array() - zmax).exp().sum());
    const double tsum = soft_target.data.sum();
    double loss = tsum * lse - soft_target.data.dot(Z.data);
    Tensor t = soft_target;
    return push(Tensor::scalar(loss), needs(logits), [logits, t](Graph& g, NodeId id) {
        if (!g.needs(logits)) return;
        const double go = g.grad_mut(id).data(0);
        const Tensor& Z = g.value(logits);
        const double zmax = Z.data.maxCoeff();
        Eigen::ArrayXd e = (Z.data.array() - zmax).exp();
        Eigen::ArrayXd y = e / e.sum();
        const double tsum = t.data.sum();
        g.grad_mut(logits).data.array() += go * (tsum * y - t.data.array());
    }, "cross_entropy_soft");
}

Graph::NodeId Graph::mse(NodeId pred, const Tensor& target) {
    const Tensor& P = value(pred);
    require(P.size() == target.size(), "mse: size mismatch");
    const double n = static_cast<double>(P.size());
    const double loss = (P.data - target.data).squaredNorm() / n;
    Tensor t = target;
    return push(Tensor::scalar(loss), needs(pred), [pred, t, n](Graph& g, NodeId id) {
        if (!g.needs(pred)) return;
        const double go = g.grad_mut(id).data(0);
        g.grad_mut(pred).data += go * 2.0 / n * (g.value(pred).data - t.data);
    }, "mse");
}

}  // namespace gnp::nn
