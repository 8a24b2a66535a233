#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gsdyn/tensor.hpp"

namespace gsdyn {

enum class Op {
    Add,
    Sub,
    Mul,
    Div,
    Matmul,
    Concat,
    Sum,
    Mean,
    Abs,
    Exp,
    Log,
    Sin,
    Cos,
    Relu,
    Sigmoid,
    Softmax,
    Gather,
    Slice,
    Sqrt,
    Pow,
};

const char* op_name(Op op);

// Extra operands that are not differentiable tensor inputs.
struct OpArgs {
    std::vector<int64_t> indices;  // gather
    int64_t offset = 0;            // slice: flat element offset
    Shape out_shape;               // slice: view shape (doubles as reshape)
    int axis = 0;                  // concat: 0 = rows, 1 = cols
    double exponent = 1.0;         // pow
};

struct TapeNode {
    Op kind;
    std::vector<Tensor> in;
    Tensor out;
    OpArgs args;
};

// Reverse-mode tape. Recording is single-threaded; ops append in execution
// order, so reverse iteration is a valid topological order for backward.
// Calling backward twice on the same tape re-zeros every gradient first and
// therefore produces identical results.
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    // Activates a tape for the current scope; ops record into the innermost
    // active scope. No active scope means pure forward evaluation.
    class Scope {
    public:
        explicit Scope(Tape& tape);
        ~Scope();
        Scope(const Scope&) = delete;
        Scope& operator=(const Scope&) = delete;

    private:
        Tape* prev_;
    };

    static Tape* active();

    size_t size() const { return nodes_.size(); }
    const TapeNode& node(size_t i) const { return nodes_[i]; }

    int append(TapeNode node);

    // Seeds d(loss)/d(loss) = 1 and accumulates gradients into every
    // requires_grad tensor reachable backward from the loss. Gradients of
    // all tensors touched by this tape are zeroed first.
    void backward(const Tensor& loss);

private:
    std::vector<TapeNode> nodes_;
};

// Records one operation: validates shapes, computes the forward value, and
// appends a node when recording is active and any input requires grad.
Tensor record(Op kind, const std::vector<Tensor>& inputs, OpArgs args = {});

// Convenience wrappers over record().
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor concat(const Tensor& a, const Tensor& b, int axis = 0);
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
Tensor abs(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor sin(const Tensor& a);
Tensor cos(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor softmax(const Tensor& a);
Tensor gather(const Tensor& a, std::vector<int64_t> indices);
Tensor slice(const Tensor& a, int64_t offset, Shape out_shape);
Tensor sqrt(const Tensor& a);
Tensor pow(const Tensor& a, double exponent);

// Derived helpers built from the primitive ops.
Tensor reshape(const Tensor& a, Shape shape);
Tensor column(const Tensor& a, int col);      // [N,C] -> [N]
Tensor mul_scalar(const Tensor& a, double s);
Tensor add_scalar(const Tensor& a, double s);
Tensor minimum(const Tensor& a, double cap);  // elementwise min(a, cap)

}  // namespace gsdyn
