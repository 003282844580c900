#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "box.hpp"

namespace bsde {

// Partition-of-unity kernel layout over an interval [lo, hi]: n_pieces equal
// cells, piecewise-linear ramps of width `band` centered at the interior
// knots. At most two kernels are positive at any point, their sum is exactly
// one on all of R (the first and last kernels extend flat beyond the
// interval), and each kernel is 1/band-Lipschitz.
struct KernelLayout {
    double lo = -1.0;
    double hi = 1.0;
    int n_pieces = 1;
    double band = 0.1;

    KernelLayout() = default;
    KernelLayout(double lo_, double hi_, int n_pieces_, double band_fraction);

    double cell_width() const { return (hi - lo) / n_pieces; }
    double knot(int j) const { return lo + j * cell_width(); }  // j in [0, n_pieces]
    double lipschitz() const { return 1.0 / band; }

    // Value of kernel j (0-based) at y.
    double phi(int j, double y) const;
    // The one or two kernels positive at y; returns count, fills idx/weight.
    int active(double y, int idx[2], double weight[2]) const;
};

// One table of per-piece monomial coefficients in y: coeff(j, l) multiplies
// y^l on piece j.
struct PolyTable {
    int n_pieces = 0;
    int degree = 0;
    std::vector<double> c;  // n_pieces * (degree + 1)

    PolyTable() = default;
    PolyTable(int pieces, int deg) : n_pieces(pieces), degree(deg), c(pieces * (deg + 1), 0.0) {}
    double& at(int j, int l) { return c[j * (degree + 1) + l]; }
    double at(int j, int l) const { return c[j * (degree + 1) + l]; }
};

using SpaceTimeFn = std::function<double(double t, const double* x)>;

// f_loc(t, x, y, y') = sum_j sum_l a_{j,l}(t, x) y^l phi_j(y'), where the
// coefficient functions a_{j,l} are assembled from additive terms. A term is
// a coefficient table (possibly sliced on a uniform time grid, the nearest
// slice is used) scaled by an optional space-time weight. Benchmarks whose
// drivers split as w(t,x) * f1(y) + f2(t,x) are represented exactly this way.
class LocalPolynomialDriver {
  public:
    struct Term {
        SpaceTimeFn weight;             // null means constant 1
        std::vector<PolyTable> slices;  // >= 1, all with the layout's n_pieces
        double t_lo = 0.0, t_hi = 0.0;  // slice time range (ignored for 1 slice)

        const PolyTable& at_time(double t) const;
    };

    LocalPolynomialDriver() = default;
    LocalPolynomialDriver(KernelLayout layout, int ell_max)
        : layout_(layout), ell_max_(ell_max) {}

    void add_term(Term term);
    // Table with coeff(j, ell) = 1 for every piece: by partition of unity this
    // adds weight(t,x) * y^ell exactly.
    void add_monomial_term(int ell, SpaceTimeFn weight);

    // sum_j a_{j,ell}(t,x) phi_j(y_prior); the branch-weight numerator.
    double branch_coeff(double t, const double* x, int ell, double y_prior) const;
    // Full driver value at (t, x, y, y_prior).
    double eval(double t, const double* x, double y, double y_prior) const;
    double eval(const double* x, double y, double y_prior) const { return eval(0.0, x, y, y_prior); }
    // a_{j,ell}(t,x) for one piece.
    double coeff(double t, const double* x, int j, int ell) const;

    const KernelLayout& layout() const { return layout_; }
    int ell_max() const { return ell_max_; }
    int n_pieces() const { return layout_.n_pieces; }
    double domain_lo() const { return layout_.lo; }
    double domain_hi() const { return layout_.hi; }
    double kernel_lipschitz() const { return layout_.lipschitz(); }

    double coeff_bound() const { return coeff_bound_; }       // C_{ell_max}
    double fit_residual() const { return fit_residual_; }     // sup |f - fit| reported by the fitter
    double diagonal_lipschitz() const { return diag_lip_; }   // Lipschitz bound of y -> eval(x,y,y)
    void set_coeff_bound(double c) { coeff_bound_ = c; }
    void set_fit_residual(double r) { fit_residual_ = r; }
    void set_diagonal_lipschitz(double l) { diag_lip_ = l; }

    // Recomputes coeff_bound as the max of |a_{j,l}| over all pieces, degrees,
    // the given x sample and n_t uniform times in [t0, t1].
    void extract_coeff_bound(const std::vector<Vec>& x_samples, double t0 = 0.0, double t1 = 0.0,
                             int n_t = 1);

    bool serializable() const;  // only weight-free terms can be saved
    std::string to_json() const;
    static LocalPolynomialDriver from_json(const std::string& text);

    static LocalPolynomialDriver zero(int ell_max, double lo, double hi);

    const std::vector<Term>& terms() const { return terms_; }

  private:
    KernelLayout layout_;
    int ell_max_ = 2;
    std::vector<Term> terms_;
    double coeff_bound_ = 0.0;
    double fit_residual_ = 0.0;
    double diag_lip_ = 0.0;
};

// (L1, L2): Lipschitz constants of the localized driver in y and in the
// prior argument, at growth level grown_bound >= 1:
//   L1 = 2 C sum_{l=1..l0} l * grown_bound^(l-1)
//   L2 = L_phi sum_{l=0..l0} 2 C grown_bound^l
std::pair<double, double> lipschitz_constants(const LocalPolynomialDriver& d, double grown_bound);

// Least-squares fit of y -> f(x, y) on each cell, per x sample. One sample
// yields constant coefficients; several samples (1-d x only) are blended with
// piecewise-linear weights in x. Rejects degree > 3 and empty domains.
LocalPolynomialDriver fit_local_polynomial(
    const std::function<double(const double*, double)>& f, double domain_lo, double domain_hi,
    int n_pieces, int degree, const std::vector<Vec>& x_samples, double band_fraction = 0.05);

// Same fit applied independently on n_slices uniform times in [t0, t1],
// producing one time-sliced term. x-independent.
LocalPolynomialDriver fit_time_sliced(const std::function<double(double, double)>& f, double t0,
                                      double t1, int n_slices, double domain_lo, double domain_hi,
                                      int n_pieces, int degree, double band_fraction = 0.05);

// max over samples of |f(x, y) - d(x, y, y)|; the empirical driver
// approximation error.
double driver_error(const std::function<double(const double*, double)>& f,
                    const LocalPolynomialDriver& d,
                    const std::vector<std::pair<Vec, double>>& samples);

}  // namespace bsde
