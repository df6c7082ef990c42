#include "sgporo/tensor.hpp"

#include <string>

#include "sgporo/errors.hpp"

namespace sgporo {

namespace {

std::size_t pow3(int r) {
    std::size_t n = 1;
    for (int i = 0; i < r; ++i) n *= 3;
    return n;
}

}  // namespace

DynTensor::DynTensor(int r, std::vector<double> d) : rank(r), data(std::move(d)) {
    if (r < 0 || data.size() != pow3(r))
        throw InvalidArgument("DynTensor: component count does not match rank " + std::to_string(r));
}

DynTensor DynTensor::zeros(int r) { return DynTensor(r, std::vector<double>(pow3(r), 0.0)); }

double DynTensor::scalar() const {
    if (rank != 0) throw InvalidArgument("DynTensor: not a scalar");
    return data[0];
}

Vec3 DynTensor::vec() const {
    if (rank != 1) throw InvalidArgument("DynTensor: not a vector");
    Vec3 r;
    std::copy(data.begin(), data.end(), r.c.begin());
    return r;
}

Tensor2 DynTensor::tensor2() const {
    if (rank != 2) throw InvalidArgument("DynTensor: not a second-order tensor");
    Tensor2 r;
    std::copy(data.begin(), data.end(), r.c.begin());
    return r;
}

Tensor3 DynTensor::tensor3() const {
    if (rank != 3) throw InvalidArgument("DynTensor: not a third-order tensor");
    Tensor3 r;
    std::copy(data.begin(), data.end(), r.c.begin());
    return r;
}

DynTensor contract(const DynTensor& a, const DynTensor& b, int order) {
    if (order < 1 || order > 3)
        throw InvalidArgument("contract: order must be 1, 2 or 3");
    if (order > a.rank || order > b.rank)
        throw InvalidArgument("contract: order " + std::to_string(order) + " exceeds operand ranks " +
                              std::to_string(a.rank) + ", " + std::to_string(b.rank));
    // Row-major layout: a = [free_a | summed], b = [summed | free_b].
    const std::size_t na = pow3(a.rank - order);
    const std::size_t ns = pow3(order);
    const std::size_t nb = pow3(b.rank - order);
    DynTensor r = DynTensor::zeros(a.rank + b.rank - 2 * order);
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < ns; ++k) s += a.data[i * ns + k] * b.data[k * nb + j];
            r.data[i * nb + j] = s;
        }
    return r;
}

}  // namespace sgporo
