#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mincam/errors.hpp"
#include "mincam/tensor.hpp"

namespace mincam {

// Trainable parameter with storage that persists across graphs. A Graph
// binds a Param as a leaf node; Graph::backward fills Param::grad.
struct Param {
    std::string name;
    Tensor value;
    Tensor grad;

    Param() = default;
    Param(std::string n, Tensor v)
        : name(std::move(n)), value(std::move(v)), grad(Tensor::zeros(value.shape())) {}
};

class Graph;

// Lightweight handle to a node owned by a Graph.
class Value {
public:
    Value() = default;
    const Tensor& tensor() const;
    const Tensor& grad() const;
    const Shape& shape() const { return tensor().shape(); }
    std::size_t id() const { return id_; }

private:
    friend class Graph;
    Value(Graph* g, std::size_t id) : graph_(g), id_(id) {}
    Graph* graph_ = nullptr;
    std::size_t id_ = 0;
};

// Reverse-mode differentiation tape. Nodes are appended in construction
// order, which is a topological order by definition; backward walks the
// tape once in reverse, so every evaluation order is fixed and two runs
// with identical inputs produce bit-identical gradients.
//
// The op set is exactly what the sensor model and inference head need:
// matmul, elementwise arithmetic, reductions, sigmoid/leaky activations,
// a fixed-kernel convolution, and the two losses. Graphs are rebuilt per
// batch and are cheap (tens of nodes).
class Graph {
public:
    Graph() = default;
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;

    // ---- leaves ----

    // Constant leaf; no gradient flows into it.
    Value input(Tensor t) {
        return push(std::move(t), {}, nullptr, false);
    }

    // Trainable leaf bound to external storage. backward() accumulates the
    // node gradient into p.grad.
    Value param(Param& p) {
        Value v = push(p.value, {}, nullptr, true);
        nodes_[v.id_].bound = &p;
        params_.push_back(&p);
        return v;
    }

    // ---- ops ----

    Value matmul(Value a, Value b) {
        own(a); own(b);
        const Tensor& ta = val(a);
        const Tensor& tb = val(b);
        if (ta.rank() != 2 || tb.rank() != 2 || ta.dim(1) != tb.dim(0)) {
            throw DimensionError("matmul: incompatible shapes " + shape_str(ta.shape()) +
                                 " and " + shape_str(tb.shape()));
        }
        const std::size_t m = ta.dim(0), k = ta.dim(1), n = tb.dim(1);
        Tensor out({m, n});
        {
            const double* A = ta.data().data();
            const double* B = tb.data().data();
            double* C = out.data().data();
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t kk = 0; kk < k; ++kk) {
                    const double aik = A[i * k + kk];
                    if (aik == 0.0) continue;
                    const double* Brow = B + kk * n;
                    double* Crow = C + i * n;
                    for (std::size_t j = 0; j < n; ++j) Crow[j] += aik * Brow[j];
                }
        }
        auto back = [m, k, n](Graph& g, std::size_t self) {
            const Node& node = g.nodes_[self];
            const double* G = node.grad.data().data();
            const std::size_t ia = node.inputs[0], ib = node.inputs[1];
            if (g.nodes_[ia].needs_grad) {
                const double* B = g.nodes_[ib].value.data().data();
                double* dA = g.nodes_[ia].grad.data().data();
                // dA = G . B^T
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t kk = 0; kk < k; ++kk) {
                        const double* Grow = G + i * n;
                        const double* Brow = B + kk * n;
                        double acc = 0.0;
                        for (std::size_t j = 0; j < n; ++j) acc += Grow[j] * Brow[j];
                        dA[i * k + kk] += acc;
                    }
            }
            if (g.nodes_[ib].needs_grad) {
                const double* A = g.nodes_[ia].value.data().data();
                double* dB = g.nodes_[ib].grad.data().data();
                // dB = A^T . G
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t kk = 0; kk < k; ++kk) {
                        const double aik = A[i * k + kk];
                        if (aik == 0.0) continue;
                        const double* Grow = G + i * n;
                        double* Drow = dB + kk * n;
                        for (std::size_t j = 0; j < n; ++j) Drow[j] += aik * Grow[j];
                    }
            }
        };
        return push(std::move(out), {a.id_, b.id_}, back, needs(a) || needs(b));
    }

    // Elementwise add; equal shapes, or scalar broadcast on either side.
    Value add(Value a, Value b) { return binary(a, b, /*is_mul=*/false); }

    // Elementwise multiply; equal shapes, or scalar broadcast on either side.
    Value mul(Value a, Value b) { return binary(a, b, /*is_mul=*/true); }

    // [m,n] + row vector of n elements, broadcast over rows (affine bias).
    Value add_bias(Value m, Value bias) {
        own(m); own(bias);
        const Tensor& tm = val(m);
        const Tensor& tb = val(bias);
        if (tm.rank() != 2 || tb.size() != tm.dim(1)) {
            throw DimensionError("add_bias: " + shape_str(tm.shape()) + " with bias " +
                                 shape_str(tb.shape()));
        }
        const std::size_t rows = tm.dim(0), cols = tm.dim(1);
        Tensor out({rows, cols});
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) out[i * cols + j] = tm[i * cols + j] + tb[j];
        auto back = [rows, cols](Graph& g, std::size_t self) {
            const Node& node = g.nodes_[self];
            const double* G = node.grad.data().data();
            if (g.nodes_[node.inputs[0]].needs_grad) {
                double* dM = g.nodes_[node.inputs[0]].grad.data().data();
                for (std::size_t i = 0; i < rows * cols; ++i) dM[i] += G[i];
            }
            if (g.nodes_[node.inputs[1]].needs_grad) {
                double* dB = g.nodes_[node.inputs[1]].grad.data().data();
                for (std::size_t i = 0; i < rows; ++i)
                    for (std::size_t j = 0; j < cols; ++j) dB[j] += G[i * cols + j];
            }
        };
        return push(std::move(out), {m.id_, bias.id_}, back, needs(m) || needs(bias));
    }

    Value scale(Value x, double s) {
        own(x);
        Tensor out = val(x);
        for (double& v : out.data()) v *= s;
        auto back = [s](Graph& g, std::size_t self) {
            const Node& node = g.nodes_[self];
            if (!g.nodes_[node.inputs[0]].needs_grad) return;
            const double* G = node.grad.data().data();
            double* dX = g.nodes_[node.inputs[0]].grad.data().data();
            for (std::size_t i = 0; i < node.grad.size(); ++i) dX[i] += s * G[i];
        };
        return push(std::move(out), {x.id_}, back, needs(x));
    }

    // Reduce all elements to a scalar.
    Value sum(Value x) {
        own(x);
        double acc = 0.0;
        for (double v : val(x).data()) acc += v;
        auto back = [](Graph& g, std::size_t self) {
            const Node& node = g.nodes_[self];
            if (!g.nodes_[node.inputs[0]].needs_grad) return;
            const double g0 = node.grad[0];
            for (double& d : g.nodes_[node.inputs[0]].grad.data()) d += g0;
        };
        return push(Tensor::scalar(acc), {x.id_}, back, needs(x));
    }

    Value mean(Value x) {
        own(x);
        const double inv = 1.0 / static_cast<double>(val(x).size());
        return scale(sum(x), inv);
    }

    // Axis reduction over a 2-D tensor; axis 0 sums rows out (result [cols]),
    // axis 1 sums columns out (result [rows]).
    Value sum(Value x, std::size_t axis) {
        own(x);
        const Tensor& t = val(x);
        if (t.rank() != 2 || axis > 1) {
            throw DimensionError("sum: axis reduction needs a 2-D input, got " +
                                 shape_str(t.shape()));
        }
        const std::size_t rows = t.dim(0), cols = t.dim(1);
        Tensor out({axis == 0 ? cols : rows});
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) out[axis == 0 ? j : i] += t[i * cols + j];
        auto back = [rows, cols, axis](Graph& g, std::size_t self) {
            const Node& node = g.nodes_[self];
            if (!g.nodes_[node.inputs[0]].needs_grad) return;
            const double* G = node.grad.data().data();
            double* dX = g.nodes_[node.inputs[0]].grad.data().data();
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < cols; ++j) dX[i * cols + j] += G[axis == 0 ? j : i];
        };
        return push(std::move(out), {x.id_}, back, needs(x));
    }

    Value mean(Value x, std::size_t axis) {
        own(x);
        const Tensor& t = val(x);
        if (t.rank() != 2 || axis > 1) {
            throw DimensionError("mean: axis reduction needs a 2-D input, got " +
                                 shape_str(t.shape()));
        }
        const double inv = 1.0 / static_cast<double>(axis == 0 ? t.dim(0) : t.dim(1));
        return scale(sum(x, axis), inv);
    }

    Value sigmoid(Value x) {
        own(x);
        Tensor out = val(x);
        for (double& v : out.data()) v = stable_sigmoid(v);
        auto back = [](Graph& g, std::size_t self) {
            const Node& node = g.nodes_[self];
            if (!g.nodes_[node.inputs[0]].needs_grad) return;
            const double* Y = node.value.data().data();
            const double* G = node.grad.data().data();
            double* dX = g.nodes_[node.inputs[0]].grad.data().data();
            for (std::size_t i = 0; i < node.value.size(); ++i)
                dX[i] += G[i] * Y[i] * (1.0 - Y[i]);
        };
        return push(std::move(out), {x.id_}, back, needs(x));
    }

    // lo + (hi-lo)*sigmoid(x), clamped to [lo, hi] against rounding spill.
    // The clamp only ever binds within a few ulp of the bounds, where the
    // sigmoid derivative already vanishes.
    Value bounded_sigmoid(Value x, double lo, double hi) {
        own(x);
        if (!(lo < hi)) throw ConfigError("bounded_sigmoid: need lo < hi");
        Tensor out = val(x);
        for (double& v : out.data()) {
            double s = stable_sigmoid(v);
            v = std::min(std::max(lo + (hi - lo) * s, lo), hi);
        }
        auto back = [lo, hi](Graph& g, std::size_t self) {
            const Node& node = g.nodes_[self];
            if (!g.nodes_[node.inputs[0]].needs_grad) return;
            const double* Y = node.value.data().data();
            const double* G = node.grad.data().data();
            double* dX = g.nodes_[node.inputs[0]].grad.data().data();
            const double range = hi - lo;
            for (std::size_t i = 0; i < node.value.size(); ++i) {
                const double s = (Y[i] - lo) / range;
                dX[i] += G[i] * range * s * (1.0 - s);
            }
        };
        return push(std::move(out), {x.id_}, back, needs(x));
    }

    // x for x >= 0 else slope*x; subgradient at 0 is 1.
    Value leaky_relu(Value x, double slope) {
        own(x);
        Tensor out = val(x);
        for (double& v : out.data())
            if (v < 0.0) v *= slope;
        auto back = [slope](Graph& g, std::size_t self) {
            const Node& node = g.nodes_[self];
            if (!g.nodes_[node.inputs[0]].needs_grad) return;
            const double* X = g.nodes_[node.inputs[0]].value.data().data();
            const double* G = node.grad.data().data();
            double* dX = g.nodes_[node.inputs[0]].grad.data().data();
            for (std::size_t i = 0; i < node.value.size(); ++i)
                dX[i] += G[i] * (X[i] >= 0.0 ? 1.0 : slope);
        };
        return push(std::move(out), {x.id_}, back, needs(x));
    }

    // Identity below limit, slope*(x-limit)+limit above; the gradient never
    // vanishes at saturation.
    Value leaky_clip(Value x, double limit, double slope) {
        own(x);
        Tensor out = val(x);
        for (double& v : out.data())
            if (v > limit) v = slope * (v - limit) + limit;
        auto back = [limit, slope](Graph& g, std::size_t self) {
            const Node& node = g.nodes_[self];
            if (!g.nodes_[node.inputs[0]].needs_grad) return;
            const double* X = g.nodes_[node.inputs[0]].value.data().data();
            const double* G = node.grad.data().data();
            double* dX = g.nodes_[node.inputs[0]].grad.data().data();
            for (std::size_t i = 0; i < node.value.size(); ++i)
                dX[i] += G[i] * (X[i] <= limit ? 1.0 : slope);
        };
        return push(std::move(out), {x.id_}, back, needs(x));
    }

    // Same-size correlation with an odd, normalized, non-negative kernel and
    // zero padding. The kernel is a constant; gradients flow to the image
    // only. Accepts [h,w] or a batch [b,h,w].
    Value conv2d_fixed(Value image, const Tensor& kernel) {
        own(image);
        if (kernel.rank() != 2 || kernel.dim(0) != kernel.dim(1) || kernel.dim(0) % 2 == 0) {
            throw ConfigError("conv2d_fixed: kernel must be square with odd width, got " +
                              shape_str(kernel.shape()));
        }
        double ksum = 0.0;
        for (double v : kernel.data()) {
            if (v < 0.0) throw ConfigError("conv2d_fixed: kernel must be non-negative");
            ksum += v;
        }
        if (std::abs(ksum - 1.0) > 1e-9)
            throw ConfigError("conv2d_fixed: kernel must sum to 1, sums to " + std::to_string(ksum));

        const Tensor& img = val(image);
        if (img.rank() != 2 && img.rank() != 3)
            throw DimensionError("conv2d_fixed: image must be [h,w] or [b,h,w], got " +
                                 shape_str(img.shape()));
        const std::size_t b = img.rank() == 3 ? img.dim(0) : 1;
        const std::size_t h = img.dim(img.rank() - 2), w = img.dim(img.rank() - 1);
        const std::size_t r = kernel.dim(0);
        const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(r / 2);

        Tensor out(img.shape());
        correlate(img.data().data(), out.data().data(), b, h, w, kernel, half, /*adjoint=*/false);
        Tensor ker = kernel;
        auto back = [b, h, w, ker = std::move(ker), half](Graph& g, std::size_t self) {
            const Node& node = g.nodes_[self];
            if (!g.nodes_[node.inputs[0]].needs_grad) return;
            correlate(node.grad.data().data(), g.nodes_[node.inputs[0]].grad.data().data(),
                      b, h, w, ker, half, /*adjoint=*/true);
        };
        return push(std::move(out), {image.id_}, back, needs(image));
    }

    // Row-major reinterpretation; element count must match.
    Value reshape(Value x, Shape shape) {
        own(x);
        if (shape_numel(shape) != val(x).size()) {
            throw DimensionError("reshape: cannot view " + shape_str(val(x).shape()) + " as " +
                                 shape_str(shape));
        }
        Tensor out(std::move(shape), std::vector<double>(val(x).data().begin(), val(x).data().end()));
        auto back = [](Graph& g, std::size_t self) {
            const Node& node = g.nodes_[self];
            if (!g.nodes_[node.inputs[0]].needs_grad) return;
            const double* G = node.grad.data().data();
            double* dX = g.nodes_[node.inputs[0]].grad.data().data();
            for (std::size_t i = 0; i < node.grad.size(); ++i) dX[i] += G[i];
        };
        return push(std::move(out), {x.id_}, back, needs(x));
    }

    // Mean over the batch of -log softmax(logits)[label].
    Value softmax_cross_entropy(Value logits, std::vector<int> labels) {
        own(logits);
        const Tensor& t = val(logits);
        if (t.rank() != 2 || labels.size() != t.dim(0)) {
            throw DimensionError("softmax_cross_entropy: logits " + shape_str(t.shape()) +
                                 " with " + std::to_string(labels.size()) + " labels");
        }
        const std::size_t batch = t.dim(0), classes = t.dim(1);
        for (int y : labels) {
            if (y < 0 || static_cast<std::size_t>(y) >= classes)
                throw std::out_of_range("softmax_cross_entropy: label " + std::to_string(y) +
                                        " outside [0, " + std::to_string(classes) + ")");
        }
        Tensor probs({batch, classes});
        double loss = 0.0;
        for (std::size_t i = 0; i < batch; ++i) {
            const double* row = t.data().data() + i * classes;
            double m = row[0];
            for (std::size_t j = 1; j < classes; ++j) m = std::max(m, row[j]);
            double z = 0.0;
            for (std::size_t j = 0; j < classes; ++j) {
                const double e = std::exp(row[j] - m);
                probs[i * classes + j] = e;
                z += e;
            }
            const double inv = 1.0 / z;
            for (std::size_t j = 0; j < classes; ++j) probs[i * classes + j] *= inv;
            loss -= std::log(probs[i * classes + static_cast<std::size_t>(labels[i])]);
        }
        loss /= static_cast<double>(batch);
        auto back = [batch, classes, probs = std::move(probs),
                     labels = std::move(labels)](Graph& g, std::size_t self) {
            const Node& node = g.nodes_[self];
            if (!g.nodes_[node.inputs[0]].needs_grad) return;
            const double g0 = node.grad[0] / static_cast<double>(batch);
            double* dL = g.nodes_[node.inputs[0]].grad.data().data();
            for (std::size_t i = 0; i < batch; ++i)
                for (std::size_t j = 0; j < classes; ++j) {
                    const double onehot =
                        (j == static_cast<std::size_t>(labels[i])) ? 1.0 : 0.0;
                    dL[i * classes + j] += g0 * (probs[i * classes + j] - onehot);
                }
        };
        return push(Tensor::scalar(loss), {logits.id_}, back, needs(logits));
    }

    // Mean squared difference against a constant target.
    Value mse_loss(Value pred, const Tensor& target) {
        own(pred);
        const Tensor& p = val(pred);
        if (!p.same_shape(target)) {
            throw DimensionError("mse_loss: prediction " + shape_str(p.shape()) +
                                 " vs target " + shape_str(target.shape()));
        }
        const std::size_t n = p.size();
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = p[i] - target[i];
            acc += d * d;
        }
        acc /= static_cast<double>(n);
        Tensor tgt = target;
        auto back = [n, tgt = std::move(tgt)](Graph& g, std::size_t self) {
            const Node& node = g.nodes_[self];
            if (!g.nodes_[node.inputs[0]].needs_grad) return;
            const double g0 = node.grad[0] * 2.0 / static_cast<double>(n);
            const double* P = g.nodes_[node.inputs[0]].value.data().data();
            double* dP = g.nodes_[node.inputs[0]].grad.data().data();
            for (std::size_t i = 0; i < n; ++i) dP[i] += g0 * (P[i] - tgt[i]);
        };
        return push(Tensor::scalar(acc), {pred.id_}, back, needs(pred));
    }

    // ---- differentiation ----

    // Reverse pass from a scalar loss. Sets (not accumulates) the grad of
    // every bound Param; params the loss does not reach are left at zero.
    void backward(Value loss) {
        own(loss);
        if (!is_scalar(val(loss)))
            throw DimensionError("backward: loss must be scalar, got " +
                                 shape_str(val(loss).shape()));
        for (Param* p : params_) p->grad.fill(0.0);
        for (Node& n : nodes_)
            if (n.needs_grad) n.grad = Tensor::zeros(n.value.shape());

        const std::size_t root = loss.id_;
        std::vector<char> live(root + 1, 0);
        live[root] = 1;
        if (nodes_[root].needs_grad) nodes_[root].grad[0] = 1.0;
        for (std::size_t id = root;; --id) {
            Node& n = nodes_[id];
            if (live[id] && n.needs_grad) {
                for (std::size_t in : n.inputs) live[in] = 1;
                if (n.back) n.back(*this, id);
                if (n.bound) {
                    double* dst = n.bound->grad.data().data();
                    const double* src = n.grad.data().data();
                    for (std::size_t i = 0; i < n.grad.size(); ++i) dst[i] += src[i];
                }
            }
            if (id == 0) break;
        }
    }

    const Tensor& value_of(Value v) const { return val(v); }
    const Tensor& grad_of(Value v) const {
        const Node& n = nodes_[v.id_];
        if (n.grad.empty()) throw std::logic_error("grad_of: no gradient on this node");
        return n.grad;
    }
    std::size_t node_count() const { return nodes_.size(); }

private:
    friend class Value;

    using BackFn = std::function<void(Graph&, std::size_t)>;

    struct Node {
        Tensor value;
        Tensor grad;
        BackFn back;
        Param* bound = nullptr;
        bool needs_grad = false;
        std::vector<std::size_t> inputs;
    };

    Value push(Tensor value, std::vector<std::size_t> inputs, BackFn back, bool needs_grad) {
        Node n;
        n.value = std::move(value);
        n.inputs = std::move(inputs);
        n.back = std::move(back);
        n.needs_grad = needs_grad;
        nodes_.push_back(std::move(n));
        return Value(this, nodes_.size() - 1);
    }

    void own(Value v) const {
        if (v.graph_ != this) throw std::logic_error("value belongs to a different graph");
    }

    const Tensor& val(Value v) const { return nodes_[v.id_].value; }
    bool needs(Value v) const { return nodes_[v.id_].needs_grad; }

    static double stable_sigmoid(double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
    }

    // out += correlation taps when adjoint, else out = correlation. Forward
    // reads src at shifted positions; the adjoint scatters back through the
    // same taps, which is exactly conv with the flipped kernel.
    static void correlate(const double* src, double* dst, std::size_t b, std::size_t h,
                          std::size_t w, const Tensor& ker, std::ptrdiff_t half, bool adjoint) {
        const std::size_t r = ker.dim(0);
        for (std::size_t img = 0; img < b; ++img) {
            const double* S = src + img * h * w;
            double* D = dst + img * h * w;
            for (std::size_t y = 0; y < h; ++y)
                for (std::size_t x = 0; x < w; ++x) {
                    if (!adjoint) {
                        double acc = 0.0;
                        for (std::size_t ky = 0; ky < r; ++ky) {
                            const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(y) + ky - half;
                            if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(h)) continue;
                            for (std::size_t kx = 0; kx < r; ++kx) {
                                const std::ptrdiff_t sx =
                                    static_cast<std::ptrdiff_t>(x) + kx - half;
                                if (sx < 0 || sx >= static_cast<std::ptrdiff_t>(w)) continue;
                                acc += S[sy * w + sx] * ker[ky * r + kx];
                            }
                        }
                        D[y * w + x] = acc;
                    } else {
                        const double g = S[y * w + x];
                        if (g == 0.0) continue;
                        for (std::size_t ky = 0; ky < r; ++ky) {
                            const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(y) + ky - half;
                            if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(h)) continue;
                            for (std::size_t kx = 0; kx < r; ++kx) {
                                const std::ptrdiff_t sx =
                                    static_cast<std::ptrdiff_t>(x) + kx - half;
                                if (sx < 0 || sx >= static_cast<std::ptrdiff_t>(w)) continue;
                                D[sy * w + sx] += g * ker[ky * r + kx];
                            }
                        }
                    }
                }
        }
    }

    Value binary(Value a, Value b, bool is_mul) {
        own(a); own(b);
        const Tensor& ta = val(a);
        const Tensor& tb = val(b);
        const bool a_scalar = is_scalar(ta), b_scalar = is_scalar(tb);
        if (!ta.same_shape(tb) && !a_scalar && !b_scalar) {
            throw DimensionError(std::string(is_mul ? "mul" : "add") + ": incompatible shapes " +
                                 shape_str(ta.shape()) + " and " + shape_str(tb.shape()));
        }
        const Tensor& big = a_scalar ? tb : ta;
        Tensor out(big.shape());
        const std::size_t n = big.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double x = ta[a_scalar ? 0 : i];
            const double y = tb[b_scalar ? 0 : i];
            out[i] = is_mul ? x * y : x + y;
        }
        auto back = [n, a_scalar, b_scalar, is_mul](Graph& g, std::size_t self) {
            const Node& node = g.nodes_[self];
            const double* G = node.grad.data().data();
            const std::size_t ia = node.inputs[0], ib = node.inputs[1];
            const Tensor& ta = g.nodes_[ia].value;
            const Tensor& tb = g.nodes_[ib].value;
            if (g.nodes_[ia].needs_grad) {
                double* dA = g.nodes_[ia].grad.data().data();
                for (std::size_t i = 0; i < n; ++i) {
                    const double gi = is_mul ? G[i] * tb[b_scalar ? 0 : i] : G[i];
                    dA[a_scalar ? 0 : i] += gi;
                }
            }
            if (g.nodes_[ib].needs_grad) {
                double* dB = g.nodes_[ib].grad.data().data();
                for (std::size_t i = 0; i < n; ++i) {
                    const double gi = is_mul ? G[i] * ta[a_scalar ? 0 : i] : G[i];
                    dB[b_scalar ? 0 : i] += gi;
                }
            }
        };
        return push(std::move(out), {a.id_, b.id_}, back, needs(a) || needs(b));
    }

    std::vector<Node> nodes_;
    std::vector<Param*> params_;
};

inline const Tensor& Value::tensor() const { return graph_->value_of(*this); }
inline const Tensor& Value::grad() const { return graph_->grad_of(*this); }

}  // namespace mincam
