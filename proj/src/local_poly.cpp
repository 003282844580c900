#include "local_poly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace bsde {

KernelLayout::KernelLayout(double lo_, double hi_, int n_pieces_, double band_fraction)
    : lo(lo_), hi(hi_), n_pieces(n_pieces_) {
    if (!(lo < hi)) throw std::invalid_argument("kernel layout: empty domain");
    if (n_pieces < 1) throw std::invalid_argument("kernel layout: need at least one piece");
    if (!(band_fraction > 0.0) || band_fraction >= 1.0)
        throw std::invalid_argument("kernel layout: band fraction must be in (0, 1)");
    band = band_fraction * cell_width();
}

double KernelLayout::phi(int j, double y) const {
    const double w = cell_width();
    const double half = 0.5 * band;
    // Ramp up across the left knot (none for j = 0), down across the right
    // knot (none for j = n_pieces - 1).
    double up = 1.0;
    if (j > 0) {
        const double k = lo + j * w;
        up = std::clamp((y - (k - half)) / band, 0.0, 1.0);
    }
    double down = 1.0;
    if (j < n_pieces - 1) {
        const double k = lo + (j + 1) * w;
        down = std::clamp(((k + half) - y) / band, 0.0, 1.0);
    }
    return std::min(up, down);
}

int KernelLayout::active(double y, int idx[2], double weight[2]) const {
    if (n_pieces == 1) {
        idx[0] = 0;
        weight[0] = 1.0;
        return 1;
    }
    const double w = cell_width();
    const double half = 0.5 * band;
    int j = static_cast<int>(std::floor((y - lo) / w));
    j = std::clamp(j, 0, n_pieces - 1);
    // Inside a transition band two kernels are positive.
    const double left_knot = lo + j * w;
    const double right_knot = lo + (j + 1) * w;
    if (j > 0 && y < left_knot + half) {
        const double up = std::clamp((y - (left_knot - half)) / band, 0.0, 1.0);
        idx[0] = j - 1;
        weight[0] = 1.0 - up;
        idx[1] = j;
        weight[1] = up;
        return 2;
    }
    if (j < n_pieces - 1 && y > right_knot - half) {
        const double down = std::clamp(((right_knot + half) - y) / band, 0.0, 1.0);
        idx[0] = j;
        weight[0] = down;
        idx[1] = j + 1;
        weight[1] = 1.0 - down;
        return 2;
    }
    idx[0] = j;
    weight[0] = 1.0;
    return 1;
}

const PolyTable& LocalPolynomialDriver::Term::at_time(double t) const {
    if (slices.size() == 1) return slices.front();
    const double span = t_hi - t_lo;
    if (!(span > 0.0)) return slices.front();
    const double u = (t - t_lo) / span * static_cast<double>(slices.size() - 1);
    long i = std::lround(u);
    i = std::clamp<long>(i, 0, static_cast<long>(slices.size()) - 1);
    return slices[static_cast<std::size_t>(i)];
}

void LocalPolynomialDriver::add_term(Term term) {
    if (term.slices.empty()) throw std::invalid_argument("driver term: no slices");
    for (const auto& s : term.slices) {
        if (s.n_pieces != layout_.n_pieces)
            throw std::invalid_argument("driver term: piece count mismatch");
        if (s.degree > ell_max_) throw std::invalid_argument("driver term: degree above ell_max");
    }
    terms_.push_back(std::move(term));
}

void LocalPolynomialDriver::add_monomial_term(int ell, SpaceTimeFn weight) {
    if (ell > ell_max_) throw std::invalid_argument("monomial term: degree above ell_max");
    PolyTable table(layout_.n_pieces, ell);
    for (int j = 0; j < layout_.n_pieces; ++j) table.at(j, ell) = 1.0;
    Term term;
    term.weight = std::move(weight);
    term.slices.push_back(std::move(table));
    terms_.push_back(std::move(term));
}

double LocalPolynomialDriver::coeff(double t, const double* x, int j, int ell) const {
    double acc = 0.0;
    for (const auto& term : terms_) {
        const PolyTable& tab = term.at_time(t);
        if (ell > tab.degree) continue;
        const double c = tab.at(j, ell);
        if (c == 0.0) continue;
        acc += term.weight ? term.weight(t, x) * c : c;
    }
    return acc;
}

double LocalPolynomialDriver::branch_coeff(double t, const double* x, int ell,
                                           double y_prior) const {
    int idx[2];
    double wgt[2];
    const int n = layout_.active(y_prior, idx, wgt);
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
        if (wgt[k] == 0.0) continue;
        acc += wgt[k] * coeff(t, x, idx[k], ell);
    }
    return acc;
}

double LocalPolynomialDriver::eval(double t, const double* x, double y, double y_prior) const {
    int idx[2];
    double wgt[2];
    const int n = layout_.active(y_prior, idx, wgt);
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
        if (wgt[k] == 0.0) continue;
        // Horner over the summed coefficient functions of piece idx[k].
        double p = 0.0;
        for (int l = ell_max_; l >= 0; --l) p = p * y + coeff(t, x, idx[k], l);
        acc += wgt[k] * p;
    }
    return acc;
}

void LocalPolynomialDriver::extract_coeff_bound(const std::vector<Vec>& x_samples, double t0,
                                                double t1, int n_t) {
    double c_max = 0.0;
    for (int it = 0; it < std::max(1, n_t); ++it) {
        const double t = (n_t <= 1) ? t0 : t0 + (t1 - t0) * it / (n_t - 1);
        for (const auto& xs : x_samples) {
            for (int j = 0; j < layout_.n_pieces; ++j)
                for (int l = 0; l <= ell_max_; ++l)
                    c_max = std::max(c_max, std::abs(coeff(t, xs.data(), j, l)));
        }
    }
    coeff_bound_ = c_max;
}

LocalPolynomialDriver LocalPolynomialDriver::zero(int ell_max, double lo, double hi) {
    LocalPolynomialDriver d(KernelLayout(lo, hi, 1, 0.05), ell_max);
    Term term;
    term.slices.emplace_back(1, 0);  // single piece, all coefficients zero
    d.add_term(std::move(term));
    d.set_coeff_bound(0.0);
    return d;
}

std::pair<double, double> lipschitz_constants(const LocalPolynomialDriver& d, double grown_bound) {
    if (grown_bound < 1.0) throw std::invalid_argument("lipschitz_constants: bound must be >= 1");
    const double c = d.coeff_bound();
    const int l0 = d.ell_max();
    double l1 = 0.0;
    for (int l = 1; l <= l0; ++l) l1 += l * std::pow(grown_bound, l - 1);
    l1 *= 2.0 * c;
    double l2 = 0.0;
    for (int l = 0; l <= l0; ++l) l2 += 2.0 * c * std::pow(grown_bound, l);
    l2 *= d.kernel_lipschitz();
    return {l1, l2};
}

namespace {

// Least-squares polynomial fit on one cell in the normalized coordinate
// u = (y - center) / halfwidth, then expanded to global monomials in y.
// Normal equations on a uniform sample; sizes are at most 4x4.
void fit_cell(const std::function<double(double)>& f, double a, double b, int degree,
              double* out_monomial) {
    const int m = degree + 1;
    const int n_samples = 8 * m;
    const double center = 0.5 * (a + b);
    const double halfw = 0.5 * (b - a);

    double ata[16] = {0};
    double atb[4] = {0};
    for (int s = 0; s < n_samples; ++s) {
        const double u = -1.0 + 2.0 * s / (n_samples - 1);
        const double y = center + halfw * u;
        double basis[4];
        basis[0] = 1.0;
        for (int k = 1; k < m; ++k) basis[k] = basis[k - 1] * u;
        const double fy = f(y);
        for (int r = 0; r < m; ++r) {
            atb[r] += basis[r] * fy;
            for (int cc = 0; cc < m; ++cc) ata[r * m + cc] += basis[r] * basis[cc];
        }
    }
    // Gaussian elimination with partial pivoting.
    double mat[4][5];
    for (int r = 0; r < m; ++r) {
        for (int cc = 0; cc < m; ++cc) mat[r][cc] = ata[r * m + cc];
        mat[r][m] = atb[r];
    }
    for (int col = 0; col < m; ++col) {
        int piv = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(mat[r][col]) > std::abs(mat[piv][col])) piv = r;
        for (int cc = col; cc <= m; ++cc) std::swap(mat[col][cc], mat[piv][cc]);
        const double d = mat[col][col];
        for (int cc = col; cc <= m; ++cc) mat[col][cc] /= d;
        for (int r = 0; r < m; ++r) {
            if (r == col) continue;
            const double factor = mat[r][col];
            for (int cc = col; cc <= m; ++cc) mat[r][cc] -= factor * mat[col][cc];
        }
    }
    double local[4];
    for (int k = 0; k < m; ++k) local[k] = mat[k][m];

    // local coefficients of u^k -> monomials of y via u = (y - center)/halfw.
    for (int k = 0; k < m; ++k) out_monomial[k] = 0.0;
    for (int k = 0; k < m; ++k) {
        // (y - center)^k / halfw^k expanded binomially.
        double binom = 1.0;
        for (int r = 0; r <= k; ++r) {
            const double coeff =
                local[k] * binom * std::pow(-center, k - r) / std::pow(halfw, k);
            out_monomial[r] += coeff;
            binom = binom * (k - r) / (r + 1.0);
        }
    }
}

PolyTable fit_table(const std::function<double(double)>& f, const KernelLayout& layout,
                    int degree) {
    PolyTable table(layout.n_pieces, degree);
    for (int j = 0; j < layout.n_pieces; ++j) {
        double mono[4];
        fit_cell(f, layout.knot(j), layout.knot(j + 1), degree, mono);
        for (int l = 0; l <= degree; ++l) table.at(j, l) = mono[l];
    }
    return table;
}

double table_sup_residual(const std::function<double(double)>& f, const LocalPolynomialDriver& d,
                          double t, const double* x, int n_samples = 4000) {
    double worst = 0.0;
    const double lo = d.domain_lo(), hi = d.domain_hi();
    for (int s = 0; s <= n_samples; ++s) {
        const double y = lo + (hi - lo) * s / n_samples;
        worst = std::max(worst, std::abs(f(y) - d.eval(t, x, y, y)));
    }
    return worst;
}

double diag_lipschitz_estimate(const LocalPolynomialDriver& d, double t, const double* x,
                               int n_samples = 4000) {
    double worst = 0.0;
    const double lo = d.domain_lo(), hi = d.domain_hi();
    double prev = d.eval(t, x, lo, lo);
    const double step = (hi - lo) / n_samples;
    for (int s = 1; s <= n_samples; ++s) {
        const double y = lo + step * s;
        const double cur = d.eval(t, x, y, y);
        worst = std::max(worst, std::abs(cur - prev) / step);
        prev = cur;
    }
    return worst;
}

}  // namespace

LocalPolynomialDriver fit_local_polynomial(
    const std::function<double(const double*, double)>& f, double domain_lo, double domain_hi,
    int n_pieces, int degree, const std::vector<Vec>& x_samples, double band_fraction) {
    if (degree < 0 || degree > 3) throw std::invalid_argument("fit: degree must be in [0, 3]");
    if (!(domain_lo < domain_hi)) throw std::invalid_argument("fit: empty domain");
    if (n_pieces < 1) throw std::invalid_argument("fit: need at least one piece");
    if (x_samples.empty()) throw std::invalid_argument("fit: need at least one x sample");

    KernelLayout layout(domain_lo, domain_hi, n_pieces, band_fraction);
    const int ell_max = std::max(2, degree);
    LocalPolynomialDriver d(layout, ell_max);

    if (x_samples.size() == 1) {
        const Vec xref = x_samples.front();
        LocalPolynomialDriver::Term term;
        term.slices.push_back(
            fit_table([&](double y) { return f(xref.data(), y); }, layout, degree));
        d.add_term(std::move(term));
    } else {
        // Piecewise-linear blend over sorted 1-d sample points; the hat
        // weights sum to one so exact polynomials stay exact.
        for (const auto& xs : x_samples)
            if (xs.size() != 1)
                throw std::invalid_argument("fit: several x samples supported in 1-d x only");
        std::vector<Vec> pts = x_samples;
        std::sort(pts.begin(), pts.end(),
                  [](const Vec& a, const Vec& b) { return a[0] < b[0]; });
        for (std::size_t s = 0; s < pts.size(); ++s) {
            const Vec xs = pts[s];
            const double left = (s == 0) ? -1e300 : pts[s - 1][0];
            const double mid = xs[0];
            const double right = (s + 1 == pts.size()) ? 1e300 : pts[s + 1][0];
            LocalPolynomialDriver::Term term;
            term.weight = [left, mid, right](double, const double* x) {
                const double v = x[0];
                if (v <= mid)
                    return left < -1e299 ? 1.0 : std::clamp((v - left) / (mid - left), 0.0, 1.0);
                return right > 1e299 ? 1.0 : std::clamp((right - v) / (right - mid), 0.0, 1.0);
            };
            term.slices.push_back(
                fit_table([&](double y) { return f(xs.data(), y); }, layout, degree));
            d.add_term(std::move(term));
        }
    }

    double resid = 0.0, lip = 0.0;
    for (const auto& xs : x_samples) {
        resid = std::max(resid, table_sup_residual([&](double y) { return f(xs.data(), y); }, d,
                                                   0.0, xs.data()));
        lip = std::max(lip, diag_lipschitz_estimate(d, 0.0, xs.data()));
    }
    d.set_fit_residual(resid);
    d.set_diagonal_lipschitz(lip);
    d.extract_coeff_bound(x_samples);
    return d;
}

LocalPolynomialDriver fit_time_sliced(const std::function<double(double, double)>& f, double t0,
                                      double t1, int n_slices, double domain_lo, double domain_hi,
                                      int n_pieces, int degree, double band_fraction) {
    if (degree < 0 || degree > 3) throw std::invalid_argument("fit: degree must be in [0, 3]");
    if (!(domain_lo < domain_hi)) throw std::invalid_argument("fit: empty domain");
    if (n_slices < 1) throw std::invalid_argument("fit: need at least one time slice");

    KernelLayout layout(domain_lo, domain_hi, n_pieces, band_fraction);
    const int ell_max = std::max(2, degree);
    LocalPolynomialDriver d(layout, ell_max);

    LocalPolynomialDriver::Term term;
    term.t_lo = t0;
    term.t_hi = t1;
    term.slices.reserve(n_slices);
    for (int s = 0; s < n_slices; ++s) {
        const double t = (n_slices == 1) ? t0 : t0 + (t1 - t0) * s / (n_slices - 1);
        term.slices.push_back(fit_table([&](double y) { return f(t, y); }, layout, degree));
    }
    d.add_term(std::move(term));

    double resid = 0.0;
    double c_max = 0.0, lip = 0.0;
    const int nt_check = std::min(n_slices, 24);
    for (int s = 0; s < nt_check; ++s) {
        const double t = (nt_check == 1) ? t0 : t0 + (t1 - t0) * s / (nt_check - 1);
        resid = std::max(resid,
                         table_sup_residual([&](double y) { return f(t, y); }, d, t, nullptr));
        lip = std::max(lip, diag_lipschitz_estimate(d, t, nullptr));
    }
    for (const auto& s : d.terms().front().slices)
        for (double v : s.c) c_max = std::max(c_max, std::abs(v));
    d.set_fit_residual(resid);
    d.set_diagonal_lipschitz(lip);
    d.set_coeff_bound(c_max);
    return d;
}

double driver_error(const std::function<double(const double*, double)>& f,
                    const LocalPolynomialDriver& d,
                    const std::vector<std::pair<Vec, double>>& samples) {
    if (samples.empty()) throw std::invalid_argument("driver_error: no samples");
    double worst = 0.0;
    for (const auto& [x, y] : samples)
        worst = std::max(worst, std::abs(f(x.data(), y) - d.eval(0.0, x.data(), y, y)));
    return worst;
}

bool LocalPolynomialDriver::serializable() const {
    for (const auto& term : terms_)
        if (term.weight) return false;
    return true;
}

std::string LocalPolynomialDriver::to_json() const {
    if (!serializable())
        throw std::runtime_error("driver: terms with coefficient callbacks cannot be serialized");
    nlohmann::json j;
    j["format"] = "local-polynomial-driver/1";
    j["domain"] = {layout_.lo, layout_.hi};
    j["n_pieces"] = layout_.n_pieces;
    j["band"] = layout_.band;
    j["ell_max"] = ell_max_;
    j["coeff_bound"] = coeff_bound_;
    j["fit_residual"] = fit_residual_;
    j["diagonal_lipschitz"] = diag_lip_;
    auto& terms = j["terms"];
    terms = nlohmann::json::array();
    for (const auto& term : terms_) {
        nlohmann::json tj;
        tj["t_range"] = {term.t_lo, term.t_hi};
        tj["degree"] = term.slices.front().degree;
        auto& slices = tj["slices"];
        slices = nlohmann::json::array();
        for (const auto& s : term.slices) slices.push_back(s.c);
        terms.push_back(std::move(tj));
    }
    return j.dump(2);
}

LocalPolynomialDriver LocalPolynomialDriver::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != "local-polynomial-driver/1")
        throw std::runtime_error("driver: unknown serialization format");
    KernelLayout layout;
    layout.lo = j.at("domain")[0].get<double>();
    layout.hi = j.at("domain")[1].get<double>();
    layout.n_pieces = j.at("n_pieces").get<int>();
    layout.band = j.at("band").get<double>();
    LocalPolynomialDriver d(layout, j.at("ell_max").get<int>());
    for (const auto& tj : j.at("terms")) {
        Term term;
        term.t_lo = tj.at("t_range")[0].get<double>();
        term.t_hi = tj.at("t_range")[1].get<double>();
        const int degree = tj.at("degree").get<int>();
        for (const auto& sj : tj.at("slices")) {
            PolyTable table(layout.n_pieces, degree);
            table.c = sj.get<std::vector<double>>();
            if (table.c.size() != static_cast<std::size_t>(layout.n_pieces * (degree + 1)))
                throw std::runtime_error("driver: malformed coefficient table");
            term.slices.push_back(std::move(table));
        }
        d.add_term(std::move(term));
    }
    d.set_coeff_bound(j.at("coeff_bound").get<double>());
    d.set_fit_residual(j.at("fit_residual").get<double>());
    d.set_diagonal_lipschitz(j.at("diagonal_lipschitz").get<double>());
    return d;
}

}  // namespace bsde
