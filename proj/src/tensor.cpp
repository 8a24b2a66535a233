#include "gsdyn/tensor.hpp"

#include <cmath>

namespace gsdyn {

namespace {
void check_finite(const Shape& shape, const std::vector<double>& data) {
    if (!checked_mode()) return;
    for (size_t i = 0; i < data.size(); ++i) {
        if (!std::isfinite(data[i])) {
            throw CheckedModeError("tensor creation: non-finite value at flat index " +
                                   std::to_string(i) + " in tensor of shape " + shape_str(shape));
        }
    }
}
}  // namespace

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
    auto impl = std::make_shared<TensorImpl>();
    impl->data.assign(static_cast<size_t>(numel(shape)), 0.0);
    impl->shape = std::move(shape);
    impl->requires_grad = requires_grad;
    return Tensor(std::move(impl));
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
    auto impl = std::make_shared<TensorImpl>();
    impl->data.assign(static_cast<size_t>(numel(shape)), value);
    check_finite(shape, impl->data);
    impl->shape = std::move(shape);
    impl->requires_grad = requires_grad;
    return Tensor(std::move(impl));
}

Tensor Tensor::values(Shape shape, std::vector<double> data, bool requires_grad) {
    if (static_cast<int64_t>(data.size()) != numel(shape)) {
        throw ShapeError("tensor creation: " + std::to_string(data.size()) +
                         " values for shape " + shape_str(shape));
    }
    check_finite(shape, data);
    auto impl = std::make_shared<TensorImpl>();
    impl->shape = std::move(shape);
    impl->data = std::move(data);
    impl->requires_grad = requires_grad;
    return Tensor(std::move(impl));
}

Tensor Tensor::scalar(double value, bool requires_grad) {
    return values({1}, {value}, requires_grad);
}

double Tensor::item() const {
    if (impl_->data.size() != 1) {
        throw ShapeError("item(): tensor of shape " + shape_str(impl_->shape) + " is not scalar");
    }
    return impl_->data[0];
}

const std::vector<double>& Tensor::grad() const {
    if (impl_->grad.empty()) impl_->grad.assign(impl_->data.size(), 0.0);
    return impl_->grad;
}

std::vector<double>& Tensor::grad_buffer() const {
    if (impl_->grad.empty()) impl_->grad.assign(impl_->data.size(), 0.0);
    return impl_->grad;
}

void Tensor::zero_grad() const { impl_->grad.clear(); }

Tensor Tensor::detach() const {
    auto impl = std::make_shared<TensorImpl>();
    impl->shape = impl_->shape;
    impl->data = impl_->data;
    impl->requires_grad = false;
    return Tensor(std::move(impl));
}

}  // namespace gsdyn
