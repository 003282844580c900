#pragma once

#include <functional>
#include <ostream>
#include <vector>

#include "box.hpp"

namespace bsde {

enum class InterpMode { Linear, MonotoneQuadratic };

// Uniform tensor grid on a box (1 to 3 axes) with one stored value per node.
//
// Linear mode is plain multilinear interpolation. Monotone-quadratic mode
// adds, per 1-d sweep on the cell [x_i, x_{i+1}] with local coordinate u, a
// correction  c * u(1-u)  with  c = -(d2_i + d2_{i+1})/4  built from second
// differences (copied inward at the boundary), then clamps the result into
// [min(v_i, v_{i+1}), max(v_i, v_{i+1})]. This reproduces quadratics exactly
// where the limiter is slack, is exact on nodes and for affine data, and can
// never leave the envelope of the surrounding node values.
class ValueGrid {
  public:
    ValueGrid() = default;
    // Axes are split into ceil(extent / max_step) equal cells.
    ValueGrid(const Box& box, double max_step, InterpMode mode);

    int dim() const { return static_cast<int>(axes_.size()); }
    const Box& box() const { return box_; }
    InterpMode mode() const { return mode_; }
    void set_mode(InterpMode m) { mode_ = m; }

    long num_nodes() const { return static_cast<long>(values_.size()); }
    const std::vector<double>& axis(int a) const { return axes_[a]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    // Coordinates of flat node index i (row-major over axes).
    void node_coords(long i, double* out) const;
    double node_value(long i) const { return values_[i]; }
    void set_node_value(long i, double v) { values_[i] = v; }

    // Tensor interpolation; x must lie in the box up to a 1e-9 clamp.
    double interpolate(const double* x) const;

    void set_from(const std::function<double(const double*)>& f);
    void map_nodes(const std::function<double(double)>& op);

    // One row per node: coordinates then value.
    void write_csv(std::ostream& os) const;

  private:
    double interp_axis(int axis, const std::vector<long>& base, const double* frac,
                       long offset) const;

    Box box_;
    std::vector<std::vector<double>> axes_;
    std::vector<long> strides_;
    std::vector<double> values_;
    InterpMode mode_ = InterpMode::Linear;
};

}  // namespace bsde
