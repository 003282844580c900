#include "value_grid.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <stdexcept>

namespace bsde {

ValueGrid::ValueGrid(const Box& box, double max_step, InterpMode mode) : box_(box), mode_(mode) {
    if (box.dim() > 3) throw std::invalid_argument("value grid: tensor grids support 1 to 3 axes");
    if (!(max_step > 0.0)) throw std::invalid_argument("value grid: step must be > 0");
    const int d = box.dim();
    axes_.resize(d);
    long total = 1;
    for (int a = 0; a < d; ++a) {
        const double extent = box.hi[a] - box.lo[a];
        const long cells = std::max<long>(1, static_cast<long>(std::ceil(extent / max_step - 1e-12)));
        axes_[a].resize(cells + 1);
        for (long k = 0; k <= cells; ++k)
            axes_[a][k] = (k == cells) ? box.hi[a] : box.lo[a] + extent * k / cells;
        total *= cells + 1;
    }
    strides_.assign(d, 1);
    for (int a = d - 2; a >= 0; --a)
        strides_[a] = strides_[a + 1] * static_cast<long>(axes_[a + 1].size());
    values_.assign(total, 0.0);
}

void ValueGrid::node_coords(long i, double* out) const {
    for (int a = 0; a < dim(); ++a) {
        const long idx = (i / strides_[a]) % static_cast<long>(axes_[a].size());
        out[a] = axes_[a][idx];
    }
}

namespace {

double one_d(double vm, bool has_vm, double v0, double v1, double vp, bool has_vp, double u,
             InterpMode mode) {
    double r = v0 + (v1 - v0) * u;
    if (mode == InterpMode::MonotoneQuadratic) {
        const double d2_in = v0 - 2.0 * v1 + vp;
        const double d2_out = vm - 2.0 * v0 + v1;
        double d2_left = 0.0, d2_right = 0.0;
        if (has_vm && has_vp) {
            d2_left = d2_out;
            d2_right = d2_in;
        } else if (has_vm) {
            d2_left = d2_right = d2_out;
        } else if (has_vp) {
            d2_left = d2_right = d2_in;
        }
        r += -0.25 * (d2_left + d2_right) * u * (1.0 - u);
        r = std::clamp(r, std::min(v0, v1), std::max(v0, v1));
    }
    return r;
}

}  // namespace

double ValueGrid::interp_axis(int a, const std::vector<long>& cell, const double* frac,
                              long offset) const {
    const long n = static_cast<long>(axes_[a].size());
    const long i = cell[a];
    auto fetch = [&](long k) -> double {
        const long child = offset + k * strides_[a];
        if (a + 1 == dim()) return values_[child];
        return interp_axis(a + 1, cell, frac, child);
    };
    const double v0 = fetch(i);
    const double v1 = fetch(i + 1);
    if (mode_ == InterpMode::Linear) return v0 + (v1 - v0) * frac[a];
    const bool has_vm = i > 0;
    const bool has_vp = i + 2 < n;
    const double vm = has_vm ? fetch(i - 1) : 0.0;
    const double vp = has_vp ? fetch(i + 2) : 0.0;
    return one_d(vm, has_vm, v0, v1, vp, has_vp, frac[a], mode_);
}

double ValueGrid::interpolate(const double* x) const {
    const int d = dim();
    double q[3];
    for (int a = 0; a < d; ++a) {
        q[a] = x[a];
        if (q[a] < box_.lo[a] || q[a] > box_.hi[a]) {
            if (q[a] < box_.lo[a] - 1e-9 || q[a] > box_.hi[a] + 1e-9)
                throw std::out_of_range("value grid: query outside the box");
            q[a] = std::clamp(q[a], box_.lo[a], box_.hi[a]);
        }
    }
    std::vector<long> cell(d);
    double frac[3];
    for (int a = 0; a < d; ++a) {
        const auto& ax = axes_[a];
        const long n_cells = static_cast<long>(ax.size()) - 1;
        const double h = (ax.back() - ax.front()) / n_cells;
        long i = static_cast<long>(std::floor((q[a] - ax.front()) / h));
        i = std::clamp<long>(i, 0, n_cells - 1);
        cell[a] = i;
        frac[a] = std::clamp((q[a] - ax[i]) / (ax[i + 1] - ax[i]), 0.0, 1.0);
    }
    return interp_axis(0, cell, frac, 0);
}

void ValueGrid::set_from(const std::function<double(const double*)>& f) {
    double coords[3];
    for (long i = 0; i < num_nodes(); ++i) {
        node_coords(i, coords);
        values_[i] = f(coords);
    }
}

void ValueGrid::map_nodes(const std::function<double(double)>& op) {
    for (auto& v : values_) v = op(v);
}

void ValueGrid::write_csv(std::ostream& os) const {
    os << std::setprecision(17);
    for (int a = 0; a < dim(); ++a) os << "x" << a + 1 << ",";
    os << "value\n";
    double coords[3];
    for (long i = 0; i < num_nodes(); ++i) {
        node_coords(i, coords);
        for (int a = 0; a < dim(); ++a) os << coords[a] << ",";
        os << values_[i] << "\n";
    }
}

}  // namespace bsde
