#include "gsdyn/tape.hpp"

#include <cmath>

namespace gsdyn {

const char* op_name(Op op) {
    switch (op) {
        case Op::Add: return "add";
        case Op::Sub: return "sub";
        case Op::Mul: return "mul";
        case Op::Div: return "div";
        case Op::Matmul: return "matmul";
        case Op::Concat: return "concat";
        case Op::Sum: return "sum";
        case Op::Mean: return "mean";
        case Op::Abs: return "abs";
        case Op::Exp: return "exp";
        case Op::Log: return "log";
        case Op::Sin: return "sin";
        case Op::Cos: return "cos";
        case Op::Relu: return "relu";
        case Op::Sigmoid: return "sigmoid";
        case Op::Softmax: return "softmax";
        case Op::Gather: return "gather";
        case Op::Slice: return "slice";
        case Op::Sqrt: return "square_root";
        case Op::Pow: return "power";
    }
    return "?";
}

namespace {

Tape* g_active = nullptr;

[[noreturn]] void shape_fail(Op op, const Tensor& a, const Tensor& b) {
    throw ShapeError(std::string(op_name(op)) + ": incompatible shapes " + shape_str(a.shape()) +
                     " and " + shape_str(b.shape()));
}

// Broadcast patterns for elementwise binary ops. Out takes the larger
// operand's shape; the smaller one repeats per scalar / row [1,D] / col [N,1].
enum class Bc { None, ScalLhs, ScalRhs, RowLhs, RowRhs, ColLhs, ColRhs };

Bc broadcast_kind(Op op, const Tensor& a, const Tensor& b) {
    if (a.shape() == b.shape()) return Bc::None;
    if (b.size() == 1) return Bc::ScalRhs;
    if (a.size() == 1) return Bc::ScalLhs;
    if (a.shape().size() == 2 && b.shape().size() == 2) {
        if (b.rows() == 1 && b.cols() == a.cols()) return Bc::RowRhs;
        if (a.rows() == 1 && a.cols() == b.cols()) return Bc::RowLhs;
        if (b.cols() == 1 && b.rows() == a.rows()) return Bc::ColRhs;
        if (a.cols() == 1 && a.rows() == b.rows()) return Bc::ColLhs;
    }
    shape_fail(op, a, b);
}

// Maps a flat output index to operand indices under the broadcast pattern.
struct BcIndex {
    Bc bc;
    int64_t cols;
    int64_t a_index(int64_t i) const {
        switch (bc) {
            case Bc::ScalLhs: return 0;
            case Bc::RowLhs: return i % cols;
            case Bc::ColLhs: return i / cols;
            default: return i;
        }
    }
    int64_t b_index(int64_t i) const {
        switch (bc) {
            case Bc::ScalRhs: return 0;
            case Bc::RowRhs: return i % cols;
            case Bc::ColRhs: return i / cols;
            default: return i;
        }
    }
};

struct BinarySetup {
    Shape out_shape;
    BcIndex idx;
};

BinarySetup binary_setup(Op op, const Tensor& a, const Tensor& b) {
    Bc bc = broadcast_kind(op, a, b);
    const bool lhs_small = bc == Bc::ScalLhs || bc == Bc::RowLhs || bc == Bc::ColLhs;
    Shape out = lhs_small ? b.shape() : a.shape();
    int64_t cols = out.size() > 1 ? out[1] : 1;
    return {std::move(out), {bc, cols}};
}

void validate_output(Op op, const std::vector<double>& data) {
    if (!checked_mode()) return;
    for (size_t i = 0; i < data.size(); ++i) {
        if (!std::isfinite(data[i])) {
            throw CheckedModeError(std::string(op_name(op)) + ": non-finite output at flat index " +
                                   std::to_string(i));
        }
    }
}

Tensor forward(Op kind, const std::vector<Tensor>& in, const OpArgs& args) {
    switch (kind) {
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div: {
            const Tensor& a = in[0];
            const Tensor& b = in[1];
            auto setup = binary_setup(kind, a, b);
            std::vector<double> out(static_cast<size_t>(numel(setup.out_shape)));
            const auto& ad = a.data();
            const auto& bd = b.data();
            for (int64_t i = 0; i < static_cast<int64_t>(out.size()); ++i) {
                double x = ad[setup.idx.a_index(i)];
                double y = bd[setup.idx.b_index(i)];
                switch (kind) {
                    case Op::Add: out[i] = x + y; break;
                    case Op::Sub: out[i] = x - y; break;
                    case Op::Mul: out[i] = x * y; break;
                    default: out[i] = x / y; break;
                }
            }
            validate_output(kind, out);
            return Tensor::values(setup.out_shape, std::move(out));
        }
        case Op::Matmul: {
            const Tensor& a = in[0];
            const Tensor& b = in[1];
            if (a.shape().size() != 2 || b.shape().size() != 2 || a.cols() != b.rows()) {
                shape_fail(kind, a, b);
            }
            const int m = a.rows(), k = a.cols(), n = b.cols();
            std::vector<double> out(static_cast<size_t>(m) * n, 0.0);
            const auto& ad = a.data();
            const auto& bd = b.data();
            for (int i = 0; i < m; ++i) {
                for (int p = 0; p < k; ++p) {
                    const double av = ad[static_cast<size_t>(i) * k + p];
                    if (av == 0.0) continue;
                    const double* brow = &bd[static_cast<size_t>(p) * n];
                    double* orow = &out[static_cast<size_t>(i) * n];
                    for (int j = 0; j < n; ++j) orow[j] += av * brow[j];
                }
            }
            validate_output(kind, out);
            return Tensor::values({m, n}, std::move(out));
        }
        case Op::Concat: {
            const Tensor& a = in[0];
            const Tensor& b = in[1];
            if (args.axis == 0) {
                bool ok_1d = a.shape().size() == 1 && b.shape().size() == 1;
                bool ok_2d = a.shape().size() == 2 && b.shape().size() == 2 && a.cols() == b.cols();
                if (!ok_1d && !ok_2d) shape_fail(kind, a, b);
                std::vector<double> out;
                out.reserve(a.data().size() + b.data().size());
                out.insert(out.end(), a.data().begin(), a.data().end());
                out.insert(out.end(), b.data().begin(), b.data().end());
                Shape s = ok_1d ? Shape{a.rows() + b.rows()} : Shape{a.rows() + b.rows(), a.cols()};
                return Tensor::values(std::move(s), std::move(out));
            }
            if (a.shape().size() != 2 || b.shape().size() != 2 || a.rows() != b.rows()) {
                shape_fail(kind, a, b);
            }
            const int n = a.rows(), ca = a.cols(), cb = b.cols();
            std::vector<double> out(static_cast<size_t>(n) * (ca + cb));
            for (int r = 0; r < n; ++r) {
                for (int c = 0; c < ca; ++c) out[static_cast<size_t>(r) * (ca + cb) + c] = a.at(r, c);
                for (int c = 0; c < cb; ++c) out[static_cast<size_t>(r) * (ca + cb) + ca + c] = b.at(r, c);
            }
            return Tensor::values({n, ca + cb}, std::move(out));
        }
        case Op::Sum:
        case Op::Mean: {
            const auto& d = in[0].data();
            double acc = 0.0;
            for (double v : d) acc += v;
            if (kind == Op::Mean) acc /= static_cast<double>(d.size());
            validate_output(kind, {acc});
            return Tensor::scalar(acc);
        }
        case Op::Softmax: {
            const Tensor& a = in[0];
            const int n = a.shape().size() == 2 ? a.rows() : 1;
            const int c = a.shape().size() == 2 ? a.cols() : static_cast<int>(a.size());
            std::vector<double> out(a.data().size());
            for (int r = 0; r < n; ++r) {
                const double* row = &a.data()[static_cast<size_t>(r) * c];
                double mx = row[0];
                for (int j = 1; j < c; ++j) mx = std::max(mx, row[j]);
                double z = 0.0;
                for (int j = 0; j < c; ++j) z += std::exp(row[j] - mx);
                for (int j = 0; j < c; ++j) out[static_cast<size_t>(r) * c + j] = std::exp(row[j] - mx) / z;
            }
            validate_output(kind, out);
            return Tensor::values(a.shape(), std::move(out));
        }
        case Op::Gather: {
            const Tensor& a = in[0];
            const auto& idx = args.indices;
            if (a.shape().size() == 2) {
                const int c = a.cols();
                std::vector<double> out(idx.size() * static_cast<size_t>(c));
                for (size_t i = 0; i < idx.size(); ++i) {
                    if (idx[i] < 0 || idx[i] >= a.rows()) {
                        throw ShapeError("gather: row index " + std::to_string(idx[i]) +
                                         " out of range for shape " + shape_str(a.shape()));
                    }
                    const double* src = &a.data()[static_cast<size_t>(idx[i]) * c];
                    std::copy(src, src + c, &out[i * static_cast<size_t>(c)]);
                }
                return Tensor::values({static_cast<int>(idx.size()), c}, std::move(out));
            }
            std::vector<double> out(idx.size());
            for (size_t i = 0; i < idx.size(); ++i) {
                if (idx[i] < 0 || idx[i] >= static_cast<int64_t>(a.size())) {
                    throw ShapeError("gather: index " + std::to_string(idx[i]) +
                                     " out of range for shape " + shape_str(a.shape()));
                }
                out[i] = a.at(idx[i]);
            }
            return Tensor::values({static_cast<int>(idx.size())}, std::move(out));
        }
        case Op::Slice: {
            const Tensor& a = in[0];
            const int64_t len = numel(args.out_shape);
            if (args.offset < 0 || args.offset + len > a.size()) {
                throw ShapeError("slice: range [" + std::to_string(args.offset) + "," +
                                 std::to_string(args.offset + len) + ") out of bounds for shape " +
                                 shape_str(a.shape()));
            }
            std::vector<double> out(a.data().begin() + args.offset,
                                    a.data().begin() + args.offset + len);
            return Tensor::values(args.out_shape, std::move(out));
        }
        default: {  // unary elementwise
            const Tensor& a = in[0];
            std::vector<double> out(a.data().size());
            const auto& d = a.data();
            for (size_t i = 0; i < d.size(); ++i) {
                switch (kind) {
                    case Op::Abs: out[i] = std::abs(d[i]); break;
                    case Op::Exp: out[i] = std::exp(d[i]); break;
                    case Op::Log: out[i] = std::log(d[i]); break;
                    case Op::Sin: out[i] = std::sin(d[i]); break;
                    case Op::Cos: out[i] = std::cos(d[i]); break;
                    case Op::Relu: out[i] = d[i] > 0.0 ? d[i] : 0.0; break;
                    case Op::Sigmoid: out[i] = 1.0 / (1.0 + std::exp(-d[i])); break;
                    case Op::Sqrt: out[i] = std::sqrt(d[i]); break;
                    case Op::Pow: out[i] = std::pow(d[i], args.exponent); break;
                    default: throw ShapeError("unsupported op");
                }
            }
            validate_output(kind, out);
            return Tensor::values(a.shape(), std::move(out));
        }
    }
}

void backward_node(const TapeNode& n) {
    const auto& go = n.out.impl()->grad;
    if (go.empty()) return;  // output not on any path to the loss

    auto needs = [](const Tensor& t) { return t.requires_grad(); };

    switch (n.kind) {
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div: {
            const Tensor& a = n.in[0];
            const Tensor& b = n.in[1];
            auto setup = binary_setup(n.kind, a, b);
            const auto& ad = a.data();
            const auto& bd = b.data();
            const bool na = needs(a), nb = needs(b);
            std::vector<double>* ga = na ? &n.in[0].grad_buffer() : nullptr;
            std::vector<double>* gb = nb ? &n.in[1].grad_buffer() : nullptr;
            for (int64_t i = 0; i < static_cast<int64_t>(go.size()); ++i) {
                const double g = go[i];
                if (g == 0.0) continue;
                const int64_t ia = setup.idx.a_index(i);
                const int64_t ib = setup.idx.b_index(i);
                switch (n.kind) {
                    case Op::Add:
                        if (na) (*ga)[ia] += g;
                        if (nb) (*gb)[ib] += g;
                        break;
                    case Op::Sub:
                        if (na) (*ga)[ia] += g;
                        if (nb) (*gb)[ib] -= g;
                        break;
                    case Op::Mul:
                        if (na) (*ga)[ia] += g * bd[ib];
                        if (nb) (*gb)[ib] += g * ad[ia];
                        break;
                    default: {
                        const double inv = 1.0 / bd[ib];
                        if (na) (*ga)[ia] += g * inv;
                        if (nb) (*gb)[ib] -= g * ad[ia] * inv * inv;
                        break;
                    }
                }
            }
            break;
        }
        case Op::Matmul: {
            const Tensor& a = n.in[0];
            const Tensor& b = n.in[1];
            const int m = a.rows(), k = a.cols(), c = b.cols();
            if (needs(a)) {
                auto& ga = n.in[0].grad_buffer();
                const auto& bd = b.data();
                for (int i = 0; i < m; ++i) {
                    for (int j = 0; j < c; ++j) {
                        const double g = go[static_cast<size_t>(i) * c + j];
                        if (g == 0.0) continue;
                        for (int p = 0; p < k; ++p) {
                            ga[static_cast<size_t>(i) * k + p] += g * bd[static_cast<size_t>(p) * c + j];
                        }
                    }
                }
            }
            if (needs(b)) {
                auto& gb = n.in[1].grad_buffer();
                const auto& ad = a.data();
                for (int i = 0; i < m; ++i) {
                    for (int p = 0; p < k; ++p) {
                        const double av = ad[static_cast<size_t>(i) * k + p];
                        if (av == 0.0) continue;
                        for (int j = 0; j < c; ++j) {
                            gb[static_cast<size_t>(p) * c + j] += av * go[static_cast<size_t>(i) * c + j];
                        }
                    }
                }
            }
            break;
        }
        case Op::Concat: {
            const Tensor& a = n.in[0];
            const Tensor& b = n.in[1];
            if (n.args.axis == 0) {
                if (needs(a)) {
                    auto& ga = n.in[0].grad_buffer();
                    for (size_t i = 0; i < ga.size(); ++i) ga[i] += go[i];
                }
                if (needs(b)) {
                    auto& gb = n.in[1].grad_buffer();
                    const size_t off = a.data().size();
                    for (size_t i = 0; i < gb.size(); ++i) gb[i] += go[off + i];
                }
            } else {
                const int rows = a.rows(), ca = a.cols(), cb = b.cols();
                if (needs(a)) {
                    auto& ga = n.in[0].grad_buffer();
                    for (int r = 0; r < rows; ++r)
                        for (int cc = 0; cc < ca; ++cc)
                            ga[static_cast<size_t>(r) * ca + cc] += go[static_cast<size_t>(r) * (ca + cb) + cc];
                }
                if (needs(b)) {
                    auto& gb = n.in[1].grad_buffer();
                    for (int r = 0; r < rows; ++r)
                        for (int cc = 0; cc < cb; ++cc)
                            gb[static_cast<size_t>(r) * cb + cc] += go[static_cast<size_t>(r) * (ca + cb) + ca + cc];
                }
            }
            break;
        }
        case Op::Sum:
        case Op::Mean: {
            if (!needs(n.in[0])) break;
            auto& ga = n.in[0].grad_buffer();
            const double g = n.kind == Op::Sum ? go[0] : go[0] / static_cast<double>(ga.size());
            for (auto& v : ga) v += g;
            break;
        }
        case Op::Softmax: {
            if (!needs(n.in[0])) break;
            auto& ga = n.in[0].grad_buffer();
            const auto& od = n.out.data();
            const int rows = n.in[0].shape().size() == 2 ? n.in[0].rows() : 1;
            const int c = static_cast<int>(od.size()) / rows;
            for (int r = 0; r < rows; ++r) {
                const double* orow = &od[static_cast<size_t>(r) * c];
                const double* grow = &go[static_cast<size_t>(r) * c];
                double dot = 0.0;
                for (int j = 0; j < c; ++j) dot += grow[j] * orow[j];
                for (int j = 0; j < c; ++j) ga[static_cast<size_t>(r) * c + j] += orow[j] * (grow[j] - dot);
            }
            break;
        }
        case Op::Gather: {
            if (!needs(n.in[0])) break;
            auto& ga = n.in[0].grad_buffer();
            const auto& idx = n.args.indices;
            if (n.in[0].shape().size() == 2) {
                const int c = n.in[0].cols();
                for (size_t i = 0; i < idx.size(); ++i)
                    for (int j = 0; j < c; ++j)
                        ga[static_cast<size_t>(idx[i]) * c + j] += go[i * static_cast<size_t>(c) + j];
            } else {
                for (size_t i = 0; i < idx.size(); ++i) ga[static_cast<size_t>(idx[i])] += go[i];
            }
            break;
        }
        case Op::Slice: {
            if (!needs(n.in[0])) break;
            auto& ga = n.in[0].grad_buffer();
            for (size_t i = 0; i < go.size(); ++i) ga[static_cast<size_t>(n.args.offset) + i] += go[i];
            break;
        }
        default: {  // unary elementwise
            if (!needs(n.in[0])) break;
            auto& ga = n.in[0].grad_buffer();
            const auto& xd = n.in[0].data();
            const auto& od = n.out.data();
            for (size_t i = 0; i < go.size(); ++i) {
                const double g = go[i];
                if (g == 0.0) continue;
                switch (n.kind) {
                    case Op::Abs: ga[i] += xd[i] > 0.0 ? g : (xd[i] < 0.0 ? -g : 0.0); break;
                    case Op::Exp: ga[i] += g * od[i]; break;
                    case Op::Log: ga[i] += g / xd[i]; break;
                    case Op::Sin: ga[i] += g * std::cos(xd[i]); break;
                    case Op::Cos: ga[i] -= g * std::sin(xd[i]); break;
                    case Op::Relu: ga[i] += xd[i] > 0.0 ? g : 0.0; break;
                    case Op::Sigmoid: ga[i] += g * od[i] * (1.0 - od[i]); break;
                    case Op::Sqrt: ga[i] += g * 0.5 / od[i]; break;
                    case Op::Pow: ga[i] += g * n.args.exponent * std::pow(xd[i], n.args.exponent - 1.0); break;
                    default: break;
                }
            }
            break;
        }
    }
}

}  // namespace

Tape::Scope::Scope(Tape& tape) : prev_(g_active) { g_active = &tape; }
Tape::Scope::~Scope() { g_active = prev_; }

Tape* Tape::active() { return g_active; }

int Tape::append(TapeNode node) {
    nodes_.push_back(std::move(node));
    return static_cast<int>(nodes_.size()) - 1;
}

void Tape::backward(const Tensor& loss) {
    if (loss.size() != 1) {
        throw ShapeError("backward: loss must be scalar, got shape " + shape_str(loss.shape()));
    }
    for (auto& n : nodes_) {
        n.out.zero_grad();
        for (auto& t : n.in) t.zero_grad();
    }
    loss.zero_grad();
    loss.grad_buffer()[0] = 1.0;
    for (size_t i = nodes_.size(); i-- > 0;) backward_node(nodes_[i]);
}

Tensor record(Op kind, const std::vector<Tensor>& inputs, OpArgs args) {
    Tensor out = forward(kind, inputs, args);
    bool rg = false;
    for (const auto& t : inputs) rg = rg || t.requires_grad();
    if (rg) {
        out.set_requires_grad(true);
        if (Tape* tape = Tape::active()) {
            out.impl()->producer = tape->append({kind, inputs, out, std::move(args)});
        }
    }
    return out;
}

Tensor add(const Tensor& a, const Tensor& b) { return record(Op::Add, {a, b}); }
Tensor sub(const Tensor& a, const Tensor& b) { return record(Op::Sub, {a, b}); }
Tensor mul(const Tensor& a, const Tensor& b) { return record(Op::Mul, {a, b}); }
Tensor div(const Tensor& a, const Tensor& b) { return record(Op::Div, {a, b}); }
Tensor matmul(const Tensor& a, const Tensor& b) { return record(Op::Matmul, {a, b}); }

Tensor concat(const Tensor& a, const Tensor& b, int axis) {
    OpArgs args;
    args.axis = axis;
    return record(Op::Concat, {a, b}, std::move(args));
}

Tensor sum(const Tensor& a) { return record(Op::Sum, {a}); }
Tensor mean(const Tensor& a) { return record(Op::Mean, {a}); }
Tensor abs(const Tensor& a) { return record(Op::Abs, {a}); }
Tensor exp(const Tensor& a) { return record(Op::Exp, {a}); }
Tensor log(const Tensor& a) { return record(Op::Log, {a}); }
Tensor sin(const Tensor& a) { return record(Op::Sin, {a}); }
Tensor cos(const Tensor& a) { return record(Op::Cos, {a}); }
Tensor relu(const Tensor& a) { return record(Op::Relu, {a}); }
Tensor sigmoid(const Tensor& a) { return record(Op::Sigmoid, {a}); }
Tensor softmax(const Tensor& a) { return record(Op::Softmax, {a}); }

Tensor gather(const Tensor& a, std::vector<int64_t> indices) {
    OpArgs args;
    args.indices = std::move(indices);
    return record(Op::Gather, {a}, std::move(args));
}

Tensor slice(const Tensor& a, int64_t offset, Shape out_shape) {
    OpArgs args;
    args.offset = offset;
    args.out_shape = std::move(out_shape);
    return record(Op::Slice, {a}, std::move(args));
}

Tensor sqrt(const Tensor& a) { return record(Op::Sqrt, {a}); }

Tensor pow(const Tensor& a, double exponent) {
    OpArgs args;
    args.exponent = exponent;
    return record(Op::Pow, {a}, std::move(args));
}

Tensor reshape(const Tensor& a, Shape shape) {
    if (numel(shape) != a.size()) {
        throw ShapeError("reshape: cannot view " + shape_str(a.shape()) + " as " + shape_str(shape));
    }
    return slice(a, 0, std::move(shape));
}

Tensor column(const Tensor& a, int col) {
    const int n = a.rows(), c = a.cols();
    std::vector<int64_t> idx(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) idx[i] = static_cast<int64_t>(i) * c + col;
    return gather(reshape(a, {n * c}), std::move(idx));
}

Tensor mul_scalar(const Tensor& a, double s) { return mul(a, Tensor::scalar(s)); }
Tensor add_scalar(const Tensor& a, double s) { return add(a, Tensor::scalar(s)); }

Tensor minimum(const Tensor& a, double cap) {
    // min(a, c) = c - relu(c - a)
    Tensor c = Tensor::full(a.shape(), cap);
    return sub(c, relu(sub(c, a)));
}

}  // namespace gsdyn
