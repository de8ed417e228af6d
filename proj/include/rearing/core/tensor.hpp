#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace rearing {

/// Dense row-major float tensor (NCHW for images). Small by design: shape +
/// flat storage, no views, no broadcasting.
struct Tensor {
    std::vector<int> shape;
    std::vector<float> v;

    Tensor() = default;
    explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
        v.assign(static_cast<std::size_t>(numel_of(shape)), 0.0f);
    }

    static std::int64_t numel_of(const std::vector<int>& s) {
        std::int64_t n = 1;
        for (int d : s) {
            if (d < 0) throw std::invalid_argument("tensor: negative dimension");
            n *= d;
        }
        return n;
    }

    std::int64_t numel() const { return static_cast<std::int64_t>(v.size()); }
    int ndim() const { return static_cast<int>(shape.size()); }
    int dim(int i) const { return shape.at(static_cast<std::size_t>(i)); }

    float* data() { return v.data(); }
    const float* data() const { return v.data(); }

    float& operator[](std::int64_t i) { return v[static_cast<std::size_t>(i)]; }
    float operator[](std::int64_t i) const { return v[static_cast<std::size_t>(i)]; }

    /// 4-d accessor, NCHW.
    float& at(int n, int c, int h, int w) {
        return v[static_cast<std::size_t>(((static_cast<std::int64_t>(n) * shape[1] + c) * shape[2] + h) * shape[3] + w)];
    }
    float at(int n, int c, int h, int w) const {
        return v[static_cast<std::size_t>(((static_cast<std::int64_t>(n) * shape[1] + c) * shape[2] + h) * shape[3] + w)];
    }

    void fill(float x) { std::fill(v.begin(), v.end(), x); }
    void zero() { fill(0.0f); }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }

    std::string shape_str() const {
        std::string s = "[";
        for (std::size_t i = 0; i < shape.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(shape[i]);
        }
        return s + "]";
    }
};

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(what) + ": shape mismatch " + a.shape_str() + " vs " + b.shape_str());
}

/// FNV-1a over the raw float bytes; used for parameter checksums in tests and
/// the frozen-encoder contract.
inline std::uint64_t tensor_checksum(const Tensor& t) {
    std::uint64_t h = 1469598103934665603ULL;
    const unsigned char* p = reinterpret_cast<const unsigned char*>(t.v.data());
    std::size_t n = t.v.size() * sizeof(float);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace rearing
