// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wiser/errors.hpp"
#include "wiser/tensor.hpp"

namespace wiser::ad {

// Tape-based reverse-mode engine. Every forward call appends a node; the
// backward pass is itself expressed through the same forward calls, so
// gradients can be re-differentiated (double backprop) when kept on the
// tape. All reductions run in a fixed order: results are bit-reproducible.

enum class Op {
    Leaf,
    Constant,
    Add,
    Sub,
    Mul,
    Div,
    MatMul,
    Transpose,
    ScalarMul,
    ScalarAdd,
    Relu,
    Sigmoid,
    Sqrt,
    Log,
    SoftmaxRows,
    RowSum,
    ColSum,
    Sum,
    Mean,
    ConcatCols,
    SliceCols,
    PadCols,
    StopGradient,
};

struct Node {
    Op op = Op::Leaf;
    int in0 = -1;
    int in1 = -1;
    Tensor value;
    double scalar = 0.0;       // ScalarMul / ScalarAdd operand
    std::size_t col_lo = 0;    // SliceCols / PadCols column range
    std::size_t col_hi = 0;
    std::size_t pad_total = 0; // PadCols target width
    bool requires_grad = false;
};

class Tape;

/// Lightweight handle to a node on a tape.
struct Var {
    Tape* tape = nullptr;
    int id = -1;

    bool valid() const { return tape != nullptr && id >= 0; }
    const Tensor& value() const;
};

class Tape {
public:
    Tape() { nodes_.reserve(256); }

    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var leaf(Tensor t) {
        const bool rg = t.requires_grad;
        return push(Op::Leaf, -1, -1, std::move(t), rg);
    }

    Var leaf(Tensor t, bool requires_grad) {
        t.requires_grad = requires_grad;
        return leaf(std::move(t));
    }

    Var constant(Tensor t) {
        t.requires_grad = false;
        return push(Op::Constant, -1, -1, std::move(t), false);
    }

    Var constant(double v) { return constant(Tensor::scalar(v)); }

    Var push(Op op, int in0, int in1, Tensor value, bool requires_grad) {
        Node n;
        n.op = op;
        n.in0 = in0;
        n.in1 = in1;
        n.value = std::move(value);
        n.requires_grad = requires_grad;
        nodes_.push_back(std::move(n));
        return Var{this, int(nodes_.size()) - 1};
    }

    Node& node(int id) { return nodes_[std::size_t(id)]; }
    const Node& node(int id) const { return nodes_[std::size_t(id)]; }

    std::size_t size() const { return nodes_.size(); }

    /// Discards nodes appended after `mark`. Used to reclaim the VJP
    /// subgraph once plain (non-differentiable) gradients are read out.
    void truncate(std::size_t mark) { nodes_.resize(mark); }

private:
    std::vector<Node> nodes_;
};

inline const Tensor& Var::value() const { return tape->node(id).value; }

namespace detail {

inline void check_same_tape(Var a, Var b, const char* op) {
    if (a.tape != b.tape) throw ContractError(std::string(op) + ": operands on different tapes");
}

// Elementwise broadcasting: shapes equal, or one operand is 1x1, 1xC or Rx1.
inline bool broadcast_shape(const Tensor& a, const Tensor& b, std::size_t& r, std::size_t& c) {
    r = std::max(a.rows(), b.rows());
    c = std::max(a.cols(), b.cols());
    auto ok = [&](const Tensor& t) {
        return (t.rows() == r || t.rows() == 1) && (t.cols() == c || t.cols() == 1);
    };
    return ok(a) && ok(b);
}

template <typename F>
Tensor elementwise(const Tensor& a, const Tensor& b, const char* name, F&& f) {
    std::size_t r = 0, c = 0;
    if (!broadcast_shape(a, b, r, c)) {
        throw ShapeError(std::string(name) + ": shapes " + a.shape_str() + " vs " + b.shape_str());
    }
    Tensor out(r, c);
    const std::size_t ar_stride = a.rows() == 1 ? 0 : a.cols();
    const std::size_t br_stride = b.rows() == 1 ? 0 : b.cols();
    const std::size_t ac_stride = a.cols() == 1 ? 0 : 1;
    const std::size_t bc_stride = b.cols() == 1 ? 0 : 1;
    for (std::size_t i = 0; i < r; ++i) {
        const double* pa = a.data.data() + i * ar_stride;
        const double* pb = b.data.data() + i * br_stride;
        double* po = out.data.data() + i * c;
        for (std::size_t j = 0; j < c; ++j) {
            po[j] = f(pa[j * ac_stride], pb[j * bc_stride]);
        }
    }
    return out;
}

} // namespace detail

inline bool grad_of(Var a, Var b) {
    const bool ga = a.tape->node(a.id).requires_grad;
    const bool gb = b.tape->node(b.id).requires_grad;
    return ga || gb;
}

inline Var add(Var a, Var b) {
    detail::check_same_tape(a, b, "add");
    Tensor v = detail::elementwise(a.value(), b.value(), "add", [](double x, double y) { return x + y; });
    return a.tape->push(Op::Add, a.id, b.id, std::move(v), grad_of(a, b));
}

inline Var sub(Var a, Var b) {
    detail::check_same_tape(a, b, "sub");
    Tensor v = detail::elementwise(a.value(), b.value(), "sub", [](double x, double y) { return x - y; });
    return a.tape->push(Op::Sub, a.id, b.id, std::move(v), grad_of(a, b));
}

inline Var mul(Var a, Var b) {
    detail::check_same_tape(a, b, "mul");
    Tensor v = detail::elementwise(a.value(), b.value(), "mul", [](double x, double y) { return x * y; });
    return a.tape->push(Op::Mul, a.id, b.id, std::move(v), grad_of(a, b));
}

inline Var div(Var a, Var b) {
    detail::check_same_tape(a, b, "div");
    Tensor v = detail::elementwise(a.value(), b.value(), "div", [](double x, double y) { return x / y; });
    return a.tape->push(Op::Div, a.id, b.id, std::move(v), grad_of(a, b));
}

inline Var matmul(Var a, Var b) {
    detail::check_same_tape(a, b, "matmul");
    Tensor v = wiser::matmul(a.value(), b.value());
    return a.tape->push(Op::MatMul, a.id, b.id, std::move(v), grad_of(a, b));
}

inline Var transpose(Var a) {
    const Tensor& x = a.value();
    Tensor v(x.cols(), x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) v.at(j, i) = x.at(i, j);
    return a.tape->push(Op::Transpose, a.id, -1, std::move(v), a.tape->node(a.id).requires_grad);
}

inline Var scalar_mul(Var a, double c) {
    Tensor v = a.value();
    for (double& x : v.data) x *= c;
    Var out = a.tape->push(Op::ScalarMul, a.id, -1, std::move(v), a.tape->node(a.id).requires_grad);
    out.tape->node(out.id).scalar = c;
    return out;
}

inline Var scalar_add(Var a, double c) {
    Tensor v = a.value();
    for (double& x : v.data) x += c;
    Var out = a.tape->push(Op::ScalarAdd, a.id, -1, std::move(v), a.tape->node(a.id).requires_grad);
    out.tape->node(out.id).scalar = c;
    return out;
}

inline Var relu(Var a) {
    Tensor v = a.value();
    for (double& x : v.data) x = x > 0.0 ? x : 0.0;
    return a.tape->push(Op::Relu, a.id, -1, std::move(v), a.tape->node(a.id).requires_grad);
}

inline Var sigmoid(Var a) {
    Tensor v = a.value();
    for (double& x : v.data) {
        x = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    }
    return a.tape->push(Op::Sigmoid, a.id, -1, std::move(v), a.tape->node(a.id).requires_grad);
}

inline Var sqrt(Var a) {
    Tensor v = a.value();
    for (double& x : v.data) x = std::sqrt(x);
    return a.tape->push(Op::Sqrt, a.id, -1, std::move(v), a.tape->node(a.id).requires_grad);
}

inline Var log(Var a) {
    Tensor v = a.value();
    for (double& x : v.data) x = std::log(x);
    return a.tape->push(Op::Log, a.id, -1, std::move(v), a.tape->node(a.id).requires_grad);
}

/// Row-stabilized softmax (max subtraction per row).
inline Var softmax_rows(Var a) {
    const Tensor& x = a.value();
    Tensor v(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double mx = x.at(i, 0);
        for (std::size_t j = 1; j < x.cols(); ++j) mx = std::max(mx, x.at(i, j));
        double denom = 0.0;
        for (std::size_t j = 0; j < x.cols(); ++j) {
            const double e = std::exp(x.at(i, j) - mx);
            v.at(i, j) = e;
            denom += e;
        }
        for (std::size_t j = 0; j < x.cols(); ++j) v.at(i, j) /= denom;
    }
    return a.tape->push(Op::SoftmaxRows, a.id, -1, std::move(v), a.tape->node(a.id).requires_grad);
}

inline Var row_sum(Var a) {
    const Tensor& x = a.value();
    Tensor v(x.rows(), 1);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.cols(); ++j) s += x.at(i, j);
        v.at(i, 0) = s;
    }
    return a.tape->push(Op::RowSum, a.id, -1, std::move(v), a.tape->node(a.id).requires_grad);
}

inline Var col_sum(Var a) {
    const Tensor& x = a.value();
    Tensor v(1, x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) v.at(0, j) += x.at(i, j);
    return a.tape->push(Op::ColSum, a.id, -1, std::move(v), a.tape->node(a.id).requires_grad);
}

inline Var sum(Var a) {
    double s = 0.0;
    for (double x : a.value().data) s += x;
    return a.tape->push(Op::Sum, a.id, -1, Tensor::scalar(s), a.tape->node(a.id).requires_grad);
}

inline Var mean(Var a) {
    const std::size_t n = a.value().numel();
    if (n == 0) throw ContractError("mean of empty tensor");
    double s = 0.0;
    for (double x : a.value().data) s += x;
    return a.tape->push(Op::Mean, a.id, -1, Tensor::scalar(s / double(n)),
                        a.tape->node(a.id).requires_grad);
}

inline Var concat_cols(Var a, Var b) {
    detail::check_same_tape(a, b, "concat_cols");
    const Tensor& x = a.value();
    const Tensor& y = b.value();
    if (x.rows() != y.rows()) {
        throw ShapeError("concat_cols: shapes " + x.shape_str() + " vs " + y.shape_str());
    }
    Tensor v(x.rows(), x.cols() + y.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) v.at(i, j) = x.at(i, j);
        for (std::size_t j = 0; j < y.cols(); ++j) v.at(i, x.cols() + j) = y.at(i, j);
    }
    Var out = a.tape->push(Op::ConcatCols, a.id, b.id, std::move(v), grad_of(a, b));
    out.tape->node(out.id).col_lo = x.cols(); // split point, used by the VJP
    return out;
}

/// Columns [lo, hi) of a.
inline Var slice_cols(Var a, std::size_t lo, std::size_t hi) {
    const Tensor& x = a.value();
    if (lo >= hi || hi > x.cols()) {
        throw ShapeError("slice_cols: range [" + std::to_string(lo) + "," + std::to_string(hi) +
                         ") on " + x.shape_str());
    }
    Tensor v(x.rows(), hi - lo);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = lo; j < hi; ++j) v.at(i, j - lo) = x.at(i, j);
    Var out = a.tape->push(Op::SliceCols, a.id, -1, std::move(v), a.tape->node(a.id).requires_grad);
    out.tape->node(out.id).col_lo = lo;
    out.tape->node(out.id).col_hi = hi;
    return out;
}

/// Embeds a into a zero matrix of `total` columns, starting at column lo.
inline Var pad_cols(Var a, std::size_t lo, std::size_t total) {
    const Tensor& x = a.value();
    if (lo + x.cols() > total) {
        throw ShapeError("pad_cols: " + x.shape_str() + " at offset " + std::to_string(lo) +
                         " into " + std::to_string(total) + " columns");
    }
    Tensor v(x.rows(), total);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) v.at(i, lo + j) = x.at(i, j);
    Var out = a.tape->push(Op::PadCols, a.id, -1, std::move(v), a.tape->node(a.id).requires_grad);
    out.tape->node(out.id).col_lo = lo;
    out.tape->node(out.id).col_hi = lo + x.cols();
    out.tape->node(out.id).pad_total = total;
    return out;
}

/// Identity forward; blocks all gradient flow.
inline Var stop_gradient(Var a) {
    return a.tape->push(Op::StopGradient, a.id, -1, a.value(), false);
}

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }
inline Var operator/(Var a, Var b) { return div(a, b); }

// ---- Compositions ----------------------------------------------------

inline Var square(Var a) { return mul(a, a); }

/// Sum of squares over all elements.
inline Var l2_norm_sq(Var a) { return sum(square(a)); }

/// Per-row L2 norms as an Rx1 column, with eps inside the sqrt.
inline Var row_norm(Var a, double eps = 0.0) {
    return sqrt(scalar_add(row_sum(square(a)), eps));
}

/// Cosine similarity of corresponding rows of a and b (Rx1 output).
/// The denominator is guarded with +1e-8.
inline Var cosine_sim_rows(Var a, Var b) {
    if (!(a.value().rows() == b.value().rows() && a.value().cols() == b.value().cols())) {
        throw ShapeError("cosine_sim_rows: shapes " + a.value().shape_str() + " vs " +
                         b.value().shape_str());
    }
    Var num = row_sum(mul(a, b));
    Var den = scalar_add(mul(row_norm(a), row_norm(b)), 1e-8);
    return div(num, den);
}

/// All-pairs cosine similarity: rows of a (MxD) against rows of b (NxD),
/// giving MxN. Denominator guarded with +1e-8.
inline Var cosine_sim_pairs(Var a, Var b) {
    if (a.value().cols() != b.value().cols()) {
        throw ShapeError("cosine_sim_pairs: shapes " + a.value().shape_str() + " vs " +
                         b.value().shape_str());
    }
    Var num = matmul(a, transpose(b));
    Var den = scalar_add(matmul(row_norm(a), transpose(row_norm(b))), 1e-8);
    return div(num, den);
}

/// x @ w + bias (bias is 1xH, broadcast over rows).
inline Var dense(Var x, Var w, Var bias) { return add(matmul(x, w), bias); }

/// Mean over rows of the squared L2 norm of each row.
inline Var mean_row_sq_norm(Var a) { return mean(row_sum(square(a))); }

// ---- Backward --------------------------------------------------------

namespace detail {

/// Reduces g (the adjoint, in broadcast shape) back to `shape` by summing
/// over the broadcast dimensions.
inline Var reduce_to(Var g, std::size_t rows, std::size_t cols) {
    const Tensor& gv = g.value();
    if (gv.rows() == rows && gv.cols() == cols) return g;
    if (rows == 1 && cols == 1) return sum(g);
    if (rows == 1) return col_sum(g);
    if (cols == 1) return row_sum(g);
    throw ShapeError("reduce_to: cannot reduce " + gv.shape_str() + " to " +
                     std::to_string(rows) + "x" + std::to_string(cols));
}

/// Broadcasts g up to rows x cols by adding a zero constant of that shape.
inline Var broadcast_to(Var g, std::size_t rows, std::size_t cols) {
    const Tensor& gv = g.value();
    if (gv.rows() == rows && gv.cols() == cols) return g;
    return add(g.tape->constant(Tensor::zeros(rows, cols)), g);
}

struct BackwardScope {
    Tape& tape;
    std::vector<Var> adjoint; // indexed by node id, sized at entry

    void accumulate(int id, Var g) {
        if (id < 0 || !tape.node(id).requires_grad) return;
        const std::size_t rows = tape.node(id).value.rows();
        const std::size_t cols = tape.node(id).value.cols();
        Var gr = reduce_to(g, rows, cols);
        adjoint[std::size_t(id)] =
            adjoint[std::size_t(id)].valid() ? add(adjoint[std::size_t(id)], gr) : gr;
    }
};

inline void propagate(BackwardScope& s, int id) {
    Tape& tape = s.tape;
    // Copy the node's POD fields up front: emitting VJP ops below appends
    // to the tape and may invalidate references into it.
    const Op op = tape.node(id).op;
    const int in0 = tape.node(id).in0;
    const int in1 = tape.node(id).in1;
    const double scalar = tape.node(id).scalar;
    const std::size_t col_lo = tape.node(id).col_lo;
    const std::size_t col_hi = tape.node(id).col_hi;
    const std::size_t out_cols = tape.node(id).value.cols();
    const std::size_t in0_rows = in0 >= 0 ? tape.node(in0).value.rows() : 0;
    const std::size_t in0_cols = in0 >= 0 ? tape.node(in0).value.cols() : 0;
    const std::size_t in0_numel = in0 >= 0 ? tape.node(in0).value.numel() : 0;

    Var g = s.adjoint[std::size_t(id)];
    Var self{&tape, id};
    Var a{&tape, in0};
    Var b{&tape, in1};
    switch (op) {
        case Op::Leaf:
        case Op::Constant:
        case Op::StopGradient:
            break;
        case Op::Add:
            s.accumulate(in0, g);
            s.accumulate(in1, g);
            break;
        case Op::Sub:
            s.accumulate(in0, g);
            s.accumulate(in1, scalar_mul(g, -1.0));
            break;
        case Op::Mul:
            s.accumulate(in0, mul(g, b));
            s.accumulate(in1, mul(g, a));
            break;
        case Op::Div:
            s.accumulate(in0, div(g, b));
            s.accumulate(in1, scalar_mul(mul(g, div(self, b)), -1.0));
            break;
        case Op::MatMul:
            s.accumulate(in0, matmul(g, transpose(b)));
            s.accumulate(in1, matmul(transpose(a), g));
            break;
        case Op::Transpose:
            s.accumulate(in0, transpose(g));
            break;
        case Op::ScalarMul:
            s.accumulate(in0, scalar_mul(g, scalar));
            break;
        case Op::ScalarAdd:
            s.accumulate(in0, g);
            break;
        case Op::Relu: {
            Tensor mask(in0_rows, in0_cols);
            {
                const Tensor& x = tape.node(in0).value;
                for (std::size_t i = 0; i < x.data.size(); ++i)
                    mask.data[i] = x.data[i] > 0.0 ? 1.0 : 0.0;
            }
            s.accumulate(in0, mul(g, tape.constant(std::move(mask))));
            break;
        }
        case Op::Sigmoid: {
            // g * y * (1 - y), expressed through the recorded output y.
            Var one_minus = scalar_add(scalar_mul(self, -1.0), 1.0);
            s.accumulate(in0, mul(g, mul(self, one_minus)));
            break;
        }
        case Op::Sqrt:
            s.accumulate(in0, div(scalar_mul(g, 0.5), self));
            break;
        case Op::Log:
            s.accumulate(in0, div(g, a));
            break;
        case Op::SoftmaxRows: {
            // y * (g - rowsum(g*y)) with row broadcast.
            Var gy = mul(g, self);
            s.accumulate(in0, mul(self, sub(g, row_sum(gy))));
            break;
        }
        case Op::RowSum:
        case Op::ColSum:
        case Op::Sum:
            s.accumulate(in0, broadcast_to(g, in0_rows, in0_cols));
            break;
        case Op::Mean:
            s.accumulate(in0, broadcast_to(scalar_mul(g, 1.0 / double(in0_numel)), in0_rows, in0_cols));
            break;
        case Op::ConcatCols:
            s.accumulate(in0, slice_cols(g, 0, col_lo));
            s.accumulate(in1, slice_cols(g, col_lo, out_cols));
            break;
        case Op::SliceCols:
            s.accumulate(in0, pad_cols(g, col_lo, in0_cols));
            break;
        case Op::PadCols:
            s.accumulate(in0, slice_cols(g, col_lo, col_hi));
            break;
    }
}

inline std::vector<Var> backward_vars(Var loss, std::span<const Var> wrt) {
    if (!loss.valid()) throw ContractError("backward: invalid loss node");
    Tape& tape = *loss.tape;
    if (!loss.value().is_scalar()) {
        throw ContractError("backward: loss must be scalar, got " + loss.value().shape_str());
    }
    BackwardScope scope{tape, std::vector<Var>(tape.size())};
    scope.adjoint[std::size_t(loss.id)] = tape.constant(Tensor::scalar(1.0));
    for (int id = loss.id; id >= 0; --id) {
        if (!scope.adjoint[std::size_t(id)].valid()) continue;
        if (!tape.node(id).requires_grad) continue;
        propagate(scope, id);
    }
    std::vector<Var> grads;
    grads.reserve(wrt.size());
    for (Var v : wrt) {
        if (v.tape != &tape) throw ContractError("backward: wrt variable on a different tape");
        Var g = scope.adjoint[std::size_t(v.id)];
        if (!g.valid()) {
            g = tape.constant(Tensor::zeros(v.value().rows(), v.value().cols()));
        } else {
            const Tensor& tv = v.value();
            g = detail::broadcast_to(g, tv.rows(), tv.cols());
        }
        grads.push_back(g);
    }
    return grads;
}

} // namespace detail

/// d(loss)/d(w) for each w in wrt, as plain tensors. The VJP subgraph is
/// discarded before returning; the tape is left exactly as it was.
inline std::vector<Tensor> gradients(Var loss, std::span<const Var> wrt) {
    Tape& tape = *loss.tape;
    const std::size_t mark = tape.size();
    std::vector<Var> gvars = detail::backward_vars(loss, wrt);
    std::vector<Tensor> out;
    out.reserve(gvars.size());
    for (Var g : gvars) out.push_back(g.value());
    tape.truncate(mark);
    return out;
}

inline std::vector<Tensor> gradients(Var loss, std::initializer_list<Var> wrt) {
    return gradients(loss, std::span<const Var>(wrt.begin(), wrt.size()));
}

/// Same as gradients() but the results stay on the tape as differentiable
/// nodes (create_graph semantics), enabling double backprop.
inline std::vector<Var> gradient_graph(Var loss, std::span<const Var> wrt) {
    return detail::backward_vars(loss, wrt);
}

inline std::vector<Var> gradient_graph(Var loss, std::initializer_list<Var> wrt) {
    return gradient_graph(loss, std::span<const Var>(wrt.begin(), wrt.size()));
}

// ---- Generic op dispatch (used by op-level property tests) ------------

inline Var forward_op(const std::string& kind, std::span<const Var> inputs) {
    auto unary = [&]() {
        if (inputs.size() != 1) throw ContractError(kind + ": expects 1 input");
        return inputs[0];
    };
    auto binary = [&](Var& a, Var& b) {
        if (inputs.size() != 2) throw ContractError(kind + ": expects 2 inputs");
        a = inputs[0];
        b = inputs[1];
    };
    Var a, b;
    if (kind == "matmul") { binary(a, b); return matmul(a, b); }
    if (kind == "add") { binary(a, b); return add(a, b); }
    if (kind == "sub") { binary(a, b); return sub(a, b); }
    if (kind == "scalar_mul") { return scalar_mul(unary(), 2.0); }
    if (kind == "relu") { return relu(unary()); }
    if (kind == "sigmoid") { return sigmoid(unary()); }
    if (kind == "softmax_rows") { return softmax_rows(unary()); }
    if (kind == "concat_cols") { binary(a, b); return concat_cols(a, b); }
    if (kind == "l2_norm_sq") { return l2_norm_sq(unary()); }
    if (kind == "cosine_sim_rows") { binary(a, b); return cosine_sim_rows(a, b); }
    if (kind == "mean") { return mean(unary()); }
    if (kind == "stop_gradient") { return stop_gradient(unary()); }
    throw ContractError("forward_op: unknown kind " + kind);
}

// ---- Finite differences (gradient oracle) -----------------------------

/// Central-difference gradient estimate of a scalar function, coordinate
/// by coordinate. Test oracle; independent of the tape machinery.
inline Tensor finite_difference_gradient(const std::function<double(const Tensor&)>& f,
                                         const Tensor& x, double step) {
    if (step <= 0.0) throw ContractError("finite_difference_gradient: step must be positive");
    Tensor grad(x.rows(), x.cols());
    Tensor probe = x;
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        const double orig = probe.data[i];
        probe.data[i] = orig + step;
        const double fp = f(probe);
        probe.data[i] = orig - step;
        const double fm = f(probe);
        probe.data[i] = orig;
        grad.data[i] = (fp - fm) / (2.0 * step);
    }
    return grad;
}

} // namespace wiser::ad
