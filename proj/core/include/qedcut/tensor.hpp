#ifndef QEDCUT_TENSOR_HPP
#define QEDCUT_TENSOR_HPP

#include <complex>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace qedcut {

// Dense row-major complex tensor with a runtime shape. Interchange layout
// matches the kernel archive format (complex128, row-major).
class Tensor {
public:
    using value_type = std::complex<double>;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
        std::size_t n = 1;
        for (std::size_t d : shape_) n *= d;
        data_.assign(n, value_type(0.0, 0.0));
        strides_.assign(shape_.size(), 1);
        for (std::size_t i = shape_.size(); i-- > 1;)
            strides_[i - 1] = strides_[i] * shape_[i];
    }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    std::vector<value_type>& data() { return data_; }
    const std::vector<value_type>& data() const { return data_; }

    template <typename... Ix>
    value_type& operator()(Ix... ix) {
        return data_[offset({static_cast<std::size_t>(ix)...})];
    }
    template <typename... Ix>
    const value_type& operator()(Ix... ix) const {
        return data_[offset({static_cast<std::size_t>(ix)...})];
    }

    std::size_t offset(std::initializer_list<std::size_t> ix) const {
        if (ix.size() != shape_.size()) throw std::out_of_range("Tensor: rank mismatch");
        std::size_t o = 0;
        std::size_t slot = 0;
        for (std::size_t i : ix) {
            if (i >= shape_[slot]) throw std::out_of_range("Tensor: index out of range");
            o += i * strides_[slot++];
        }
        return o;
    }

    std::size_t stride(std::size_t slot) const { return strides_[slot]; }

private:
    std::vector<std::size_t> shape_;
    std::vector<std::size_t> strides_;
    std::vector<value_type> data_;
};

} // namespace qedcut

#endif
