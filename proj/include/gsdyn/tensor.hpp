#pragma once

#include <memory>
#include <vector>

#include "gsdyn/common.hpp"

namespace gsdyn {

struct TensorImpl {
    Shape shape;
    std::vector<double> data;
    std::vector<double> grad;  // empty until backward touches it
    bool requires_grad = false;
    int producer = -1;  // index of the tape node that produced this tensor
};

// Dense real-valued array with shared storage. Copies are handles to the
// same buffer; the tape records ops on these handles.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::shared_ptr<TensorImpl> impl) : impl_(std::move(impl)) {}

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor full(Shape shape, double value, bool requires_grad = false);
    static Tensor values(Shape shape, std::vector<double> data, bool requires_grad = false);
    static Tensor scalar(double value, bool requires_grad = false);

    bool defined() const { return impl_ != nullptr; }
    const Shape& shape() const { return impl_->shape; }
    int64_t size() const { return static_cast<int64_t>(impl_->data.size()); }
    int rows() const { return impl_->shape[0]; }
    int cols() const { return impl_->shape.size() > 1 ? impl_->shape[1] : 1; }

    std::vector<double>& data() { return impl_->data; }
    const std::vector<double>& data() const { return impl_->data; }
    double item() const;
    double at(int64_t i) const { return impl_->data[static_cast<size_t>(i)]; }
    double at(int r, int c) const { return impl_->data[static_cast<size_t>(r) * cols() + c]; }

    bool requires_grad() const { return impl_->requires_grad; }
    void set_requires_grad(bool rg) { impl_->requires_grad = rg; }
    bool is_leaf() const { return impl_->producer < 0; }

    // Gradient accumulated by the last backward pass; zeros if this tensor
    // was not on any path to the loss. Mutators are const on the handle:
    // they touch the shared impl, not the handle itself.
    const std::vector<double>& grad() const;
    std::vector<double>& grad_buffer() const;
    void zero_grad() const;

    // Same data viewed as a constant (no recording through this handle).
    Tensor detach() const;

    TensorImpl* impl() const { return impl_.get(); }
    const std::shared_ptr<TensorImpl>& impl_ptr() const { return impl_; }

private:
    std::shared_ptr<TensorImpl> impl_;
};

}  // namespace gsdyn
