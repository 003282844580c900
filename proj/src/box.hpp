#pragma once

#include <algorithm>
#include <cassert>
#include <span>
#include <stdexcept>
#include <vector>

namespace bsde {

inline constexpr int kMaxDim = 8;

// Axis-aligned compact box, the support of the forward coefficients and the
// domain of every spatial grid.
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    Box() = default;
    Box(std::vector<double> lo_, std::vector<double> hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
        if (lo.size() != hi.size() || lo.empty()) throw std::invalid_argument("box: bad bounds");
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (!(lo[i] < hi[i])) throw std::invalid_argument("box: lo >= hi");
    }
    static Box interval(double a, double b) { return Box({a}, {b}); }
    static Box cube(int dim, double a, double b) {
        return Box(std::vector<double>(dim, a), std::vector<double>(dim, b));
    }

    int dim() const { return static_cast<int>(lo.size()); }

    void clamp(double* x) const {
        for (int i = 0; i < dim(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
    }
    bool contains(const double* x, double tol = 0.0) const {
        for (int i = 0; i < dim(); ++i)
            if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
        return true;
    }
};

using Vec = std::vector<double>;

}  // namespace bsde
