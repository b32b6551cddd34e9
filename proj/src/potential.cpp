#include "canex/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "canex/format.hpp"

namespace canex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& message) {
    if (!ok) throw DomainError(message);
}

double lj_unshifted(double epsilon, double sigma, double r) {
    const double s6 = std::pow(sigma / r, 6);
    return 4.0 * epsilon * (s6 * s6 - s6);
}

// Number of other particles that fit within distance `reach` of one particle when
// all pairwise distances are at least `spacing`.
double neighbour_bound(double reach, double spacing, int d) {
    if (d == 1) return 2.0 * (std::ceil(reach / spacing) - 1.0);
    return std::pow(2.0 * reach / spacing + 1.0, d) - 1.0;
}

double unit_sphere_area(int d) {
    switch (d) {
        case 1: return 2.0;
        case 2: return 2.0 * M_PI;
        case 3: return 4.0 * M_PI;
    }
    throw DomainError("dimension must be 1, 2 or 3");
}

}  // namespace

PairPotential PairPotential::zero() {
    PairPotential p;
    p.kind_ = PotentialKind::zero;
    return p;
}

PairPotential PairPotential::hard_core(double sigma) {
    require(sigma > 0 && std::isfinite(sigma), "hard-core diameter must be positive");
    PairPotential p;
    p.kind_ = PotentialKind::hard_core;
    p.params_ = {{"sigma", sigma}};
    p.hard_core_radius_ = sigma;
    p.range_ = sigma;
    p.jumps_ = {sigma};
    return p;
}

PairPotential PairPotential::square_well(double sigma, double epsilon, double lambda) {
    require(sigma > 0, "square-well sigma must be positive");
    require(epsilon >= 0, "square-well depth epsilon must be non-negative");
    require(lambda > 1, "square-well lambda must exceed 1");
    PairPotential p;
    p.kind_ = PotentialKind::square_well;
    p.params_ = {{"sigma", sigma}, {"epsilon", epsilon}, {"lambda", lambda}};
    p.hard_core_radius_ = sigma;
    p.range_ = lambda * sigma;
    p.jumps_ = {sigma, lambda * sigma};
    return p;
}

PairPotential PairPotential::gaussian(double epsilon, double alpha) {
    require(std::isfinite(epsilon), "Gaussian amplitude must be finite");
    require(alpha > 0, "Gaussian alpha must be positive");
    PairPotential p;
    p.kind_ = PotentialKind::gaussian;
    p.params_ = {{"epsilon", epsilon}, {"alpha", alpha}};
    p.range_ = kInf;
    return p;
}

PairPotential PairPotential::lennard_jones(double epsilon, double sigma, double rc, double r_min) {
    require(epsilon >= 0 && sigma > 0, "Lennard-Jones epsilon must be non-negative and sigma positive");
    require(r_min > 0 && rc > r_min, "Lennard-Jones needs 0 < r_min < rc");
    PairPotential p;
    p.kind_ = PotentialKind::lennard_jones;
    p.params_ = {{"epsilon", epsilon}, {"sigma", sigma}, {"rc", rc}, {"r_min", r_min}};
    p.hard_core_radius_ = r_min;
    p.range_ = rc;
    p.jumps_ = {r_min};
    p.shift_ = lj_unshifted(epsilon, sigma, rc);
    return p;
}

PairPotential PairPotential::from_params(const std::string& kind, const std::map<std::string, double>& params) {
    std::set<std::string> used;
    auto get = [&](const std::string& key, std::optional<double> fallback = std::nullopt) {
        used.insert(key);
        auto it = params.find(key);
        if (it != params.end()) return it->second;
        if (fallback) return *fallback;
        throw DomainError("potential '" + kind + "' needs parameter '" + key + "'");
    };
    PairPotential p;
    if (kind == "zero") {
        p = zero();
    } else if (kind == "hard_rod" || kind == "hard_sphere" || kind == "hard_core") {
        p = hard_core(get("sigma"));
    } else if (kind == "square_well") {
        p = square_well(get("sigma"), get("epsilon"), get("lambda"));
    } else if (kind == "gaussian") {
        p = gaussian(get("epsilon"), get("alpha", 1.0));
    } else if (kind == "lennard_jones" || kind == "lj") {
        const double sigma = get("sigma", 1.0);
        p = lennard_jones(get("epsilon"), sigma, get("rc", 2.5 * sigma), get("r_min", 0.8 * sigma));
    } else {
        throw DomainError("unknown potential kind '" + kind + "'");
    }
    if (params.count("B")) {
        used.insert("B");
        p = p.with_stability_B(params.at("B"));
    }
    for (const auto& [key, value] : params)
        if (!used.count(key)) throw DomainError("potential '" + kind + "' has no parameter '" + key + "'");
    return p;
}

std::string PairPotential::name() const {
    std::string out;
    switch (kind_) {
        case PotentialKind::zero: out = "zero"; break;
        case PotentialKind::hard_core: out = "hard_core"; break;
        case PotentialKind::square_well: out = "square_well"; break;
        case PotentialKind::gaussian: out = "gaussian"; break;
        case PotentialKind::lennard_jones: out = "lennard_jones"; break;
    }
    if (params_.empty()) return out;
    out += "(";
    bool first = true;
    for (const auto& [k, v] : params_) {
        if (!first) out += ",";
        first = false;
        out += k + "=" + format_number(v);
    }
    return out + ")";
}

double PairPotential::energy(double r) const {
    r = std::abs(r);
    if (r < hard_core_radius_) return kInf;
    switch (kind_) {
        case PotentialKind::zero:
        case PotentialKind::hard_core: return 0.0;
        case PotentialKind::square_well: return r < range_ ? -params_.at("epsilon") : 0.0;
        case PotentialKind::gaussian: return params_.at("epsilon") * std::exp(-params_.at("alpha") * r * r);
        case PotentialKind::lennard_jones:
            return r < range_ ? lj_unshifted(params_.at("epsilon"), params_.at("sigma"), r) - shift_ : 0.0;
    }
    return 0.0;
}

bool PairPotential::finite_range() const { return std::isfinite(range_); }

bool PairPotential::nonnegative() const {
    switch (kind_) {
        case PotentialKind::zero:
        case PotentialKind::hard_core: return true;
        case PotentialKind::square_well: return params_.at("epsilon") == 0.0;
        case PotentialKind::gaussian: return params_.at("epsilon") >= 0.0;
        case PotentialKind::lennard_jones: return params_.at("epsilon") == 0.0;
    }
    return false;
}

double PairPotential::min_energy() const {
    switch (kind_) {
        case PotentialKind::zero:
        case PotentialKind::hard_core: return 0.0;
        case PotentialKind::square_well: return -params_.at("epsilon");
        case PotentialKind::gaussian: return std::min(0.0, params_.at("epsilon"));
        case PotentialKind::lennard_jones: {
            const double eps = params_.at("epsilon"), sigma = params_.at("sigma");
            const double r_star = std::min(std::max(std::pow(2.0, 1.0 / 6.0) * sigma, hard_core_radius_), range_);
            return std::min(0.0, lj_unshifted(eps, sigma, r_star) - shift_);
        }
    }
    return 0.0;
}

double PairPotential::mayer_sup(double beta) const { return std::max(1.0, std::expm1(-beta * min_energy())); }

double PairPotential::envelope_radius() const { return finite_range() ? range_ : 0.0; }

double PairPotential::envelope(double s) const {
    if (finite_range()) return s >= range_ ? 0.0 : kInf;
    // Gaussian: |V| itself is decreasing in r
    return std::abs(params_.at("epsilon")) * std::exp(-params_.at("alpha") * s * s);
}

bool PairPotential::has_stability_B() const {
    if (declared_B_) return true;
    return !(kind_ == PotentialKind::gaussian && params_.at("epsilon") < 0);
}

double PairPotential::stability_B(int d) const {
    require(d >= 1 && d <= 3, "dimension must be 1, 2 or 3");
    if (declared_B_) return *declared_B_;
    switch (kind_) {
        case PotentialKind::zero:
        case PotentialKind::hard_core: return 0.0;
        case PotentialKind::square_well:
            return 0.5 * params_.at("epsilon") * neighbour_bound(range_, hard_core_radius_, d);
        case PotentialKind::gaussian:
            // positive-definite kernel: sum_{i,j} V(q_i - q_j) >= 0
            if (params_.at("epsilon") >= 0) return 0.5 * params_.at("epsilon");
            throw DomainError("a Gaussian well has no stability constant unless one is declared");
        case PotentialKind::lennard_jones:
            return 0.5 * -min_energy() * neighbour_bound(range_, hard_core_radius_, d);
    }
    return 0.0;
}

PairPotential PairPotential::with_stability_B(double B) const {
    require(B >= 0 && std::isfinite(B), "stability constant must be finite and non-negative");
    PairPotential p = *this;
    p.declared_B_ = B;
    return p;
}

double PairPotential::mayer_f(double beta, double r) const {
    if (is_hard_core_at(std::abs(r))) return -1.0;
    return std::expm1(-beta * energy(r));
}

BoxGeometry::BoxGeometry(int dimension, double side) : d(dimension), L(side) {
    require(d >= 1 && d <= 3, "box dimension must be 1, 2 or 3");
    require(L > 0 && std::isfinite(L), "box side must be positive");
}

double BoxGeometry::volume() const { return std::pow(L, d); }

Point wrap_into_box(const Point& x, const BoxGeometry& box) {
    Point out{0.0, 0.0, 0.0};
    for (int i = 0; i < box.d; ++i) {
        double y = x[i] - box.L * std::round(x[i] / box.L);
        if (y <= -box.L / 2) y += box.L;
        if (y > box.L / 2) y -= box.L;
        out[i] = y;
    }
    return out;
}

double norm(const Point& x, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += x[i] * x[i];
    return std::sqrt(s);
}

double periodization_tail_bound(const PairPotential& v, const BoxGeometry& box, int lattice_cutoff) {
    require(lattice_cutoff >= 1, "lattice cutoff must be at least 1");
    const double half_diag = box.L * std::sqrt(double(box.d)) / 2.0;
    double total = 0.0;
    for (int s = lattice_cutoff + 1; s < lattice_cutoff + 100000; ++s) {
        const double r = s * box.L - half_diag;
        if (r < v.envelope_radius())
            throw ConvergenceError("lattice cutoff " + std::to_string(lattice_cutoff) +
                                   " leaves images inside the envelope radius");
        const double shell = std::pow(2.0 * s + 1, box.d) - std::pow(2.0 * s - 1, box.d);
        const double term = shell * v.envelope(r);
        if (!std::isfinite(term)) throw ConvergenceError("periodization tail bound is not finite");
        total += term;
        if (term == 0.0 || term <= 1e-17 * total) return total;
    }
    throw ConvergenceError("periodization tail bound did not converge");
}

PeriodicPotential::PeriodicPotential(PairPotential v, BoxGeometry box, int lattice_cutoff)
    : v_(std::move(v)), box_(box), cutoff_(lattice_cutoff) {
    require(lattice_cutoff >= 1, "lattice cutoff must be at least 1");
    require(box_.L > 2.0 * v_.hard_core_radius(), "box side must exceed twice the hard-core radius");
    nearest_image_ = v_.finite_range() && v_.range() <= box_.L / 2.0;
    if (nearest_image_) {
        shifts_ = {Point{0.0, 0.0, 0.0}};
        tail_bound_ = 0.0;
        return;
    }
    tail_bound_ = periodization_tail_bound(v_, box_, cutoff_);
    const int k = cutoff_;
    for (int a = -k; a <= k; ++a)
        for (int b = (box_.d >= 2 ? -k : 0); b <= (box_.d >= 2 ? k : 0); ++b)
            for (int c = (box_.d >= 3 ? -k : 0); c <= (box_.d >= 3 ? k : 0); ++c)
                shifts_.push_back(Point{a * box_.L, b * box_.L, c * box_.L});
}

double PeriodicPotential::energy(const Point& x) const {
    const Point y = wrap_into_box(x, box_);
    double total = 0.0;
    for (const Point& s : shifts_) {
        Point z{y[0] + s[0], y[1] + s[1], y[2] + s[2]};
        const double e = v_.energy(norm(z, box_.d));
        if (std::isinf(e)) return kInf;
        total += e;
    }
    return total;
}

double PeriodicPotential::mayer_f(double beta, const Point& x) const {
    const double e = energy(x);
    if (std::isinf(e)) return -1.0;
    return std::expm1(-beta * e);
}

double PeriodicPotential::mayer_f_1d(double beta, double x) const {
    require(box_.d == 1, "scalar displacement requires a one-dimensional box");
    if (nearest_image_) {
        double y = x - box_.L * std::round(x / box_.L);
        return v_.mayer_f(beta, std::abs(y));
    }
    return mayer_f(beta, Point{x, 0.0, 0.0});
}

PeriodicPotential periodize(const PairPotential& v, const BoxGeometry& box, int lattice_cutoff) {
    return PeriodicPotential(v, box, lattice_cutoff);
}

namespace {

QuadratureValue integrate_piece(const std::function<double(double)>& f, double a, double b) {
    QuadratureValue out;
    if (!(b > a)) return out;
    double err = 0.0;
    out.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-13, &err);
    out.error = err;
    return out;
}

}  // namespace

QuadratureValue mayer_radial_integral(const PairPotential& v, double beta, int d, bool absolute, double r_from) {
    require(beta > 0, "beta must be positive");
    require(r_from >= 0, "radial integral must start at a non-negative radius");
    const double area = unit_sphere_area(d);
    auto integrand = [&](double r) {
        const double f = v.mayer_f(beta, r);
        return (absolute ? std::abs(f) : f) * std::pow(r, d - 1);
    };
    std::vector<double> cuts{r_from};
    for (double j : v.discontinuities())
        if (j > r_from) cuts.push_back(j);
    if (v.finite_range() && v.range() > r_from) cuts.push_back(v.range());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    QuadratureValue total;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const auto piece = integrate_piece(integrand, cuts[k], cuts[k + 1]);
        total.value += piece.value;
        total.error += piece.error;
    }
    if (!v.finite_range()) {
        boost::math::quadrature::exp_sinh<double> integrator;
        double err = 0.0, l1 = 0.0;
        const double tail = integrator.integrate(integrand, cuts.back(), kInf, 1e-13, &err, &l1);
        if (!std::isfinite(tail) || !std::isfinite(err) || err > 1e-6 * std::max(1.0, std::abs(tail)))
            throw ConvergenceError("Mayer tail integral failed to converge");
        total.value += tail;
        total.error += err;
    }
    total.value *= area;
    total.error *= area;
    if (!std::isfinite(total.value)) throw ConvergenceError("Mayer integral is not finite");
    return total;
}

QuadratureValue c_beta(const PairPotential& v, double beta, int d) { return mayer_radial_integral(v, beta, d, true); }

QuadratureValue mayer_box_integral(const PeriodicPotential& vper, double beta, bool absolute) {
    require(beta > 0, "beta must be positive");
    const BoxGeometry& box = vper.box();
    if (vper.nearest_image()) return mayer_radial_integral(vper.base(), beta, box.d, absolute);
    const double half = box.L / 2.0;
    auto g = [&](const Point& x) {
        const double f = vper.mayer_f(beta, x);
        return absolute ? std::abs(f) : f;
    };
    if (box.d == 1) {
        // V^per is even; integrate over [0, L/2] with breakpoints at every image jump
        std::vector<double> cuts{0.0, half};
        for (int n = -vper.lattice_cutoff(); n <= vper.lattice_cutoff(); ++n)
            for (double j : vper.base().discontinuities())
                for (double x : {j - n * box.L, -j - n * box.L})
                    if (x > 0 && x < half) cuts.push_back(x);
        std::sort(cuts.begin(), cuts.end());
        auto f = [&](double x) { return g(Point{x, 0.0, 0.0}); };
        QuadratureValue total;
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const auto piece = integrate_piece(f, cuts[k], cuts[k + 1]);
            total.value += 2.0 * piece.value;
            total.error += 2.0 * piece.error;
        }
        return total;
    }
    // Tensor Gauss-Legendre over [0, L/2]^d using the reflection symmetry of V^per.
    using GL = boost::math::quadrature::gauss<double, 10>;
    auto tensor = [&](int panels) {
        std::vector<double> nodes, weights;
        const double h = half / panels;
        const auto& absc = GL::abscissa();
        const auto& wts = GL::weights();
        for (int p = 0; p < panels; ++p) {
            const double mid = (p + 0.5) * h;
            for (std::size_t k = 0; k < absc.size(); ++k) {
                for (int sgn : {1, -1}) {
                    if (absc[k] == 0.0 && sgn < 0) continue;
                    nodes.push_back(mid + sgn * absc[k] * h / 2.0);
                    weights.push_back(wts[k] * h / 2.0);
                }
            }
        }
        double total = 0.0;
        const std::size_t m = nodes.size();
        if (box.d == 2) {
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j) total += weights[i] * weights[j] * g(Point{nodes[i], nodes[j], 0.0});
        } else {
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j)
                    for (std::size_t k = 0; k < m; ++k)
                        total += weights[i] * weights[j] * weights[k] * g(Point{nodes[i], nodes[j], nodes[k]});
        }
        return total * std::pow(2.0, box.d);
    };
    const int fine = box.d == 2 ? 16 : 6;
    const double coarse_value = tensor(fine / 2);
    QuadratureValue out;
    out.value = tensor(fine);
    out.error = std::abs(out.value - coarse_value);
    return out;
}

QuadratureValue c_beta_box(const PeriodicPotential& vper, double beta) { return mayer_box_integral(vper, beta, true); }

StabilityReport stability_check(const PairPotential& v, int d, int N, int trials, std::uint64_t seed) {
    require(d >= 1 && d <= 3, "dimension must be 1, 2 or 3");
    require(N >= 2 && N <= 10, "stability check supports 2 <= N <= 10");
    require(trials >= 1, "at least one trial required");
    const double B = v.stability_B(d);
    double scale = 1.0;
    if (v.finite_range() && v.range() > 0)
        scale = v.range();
    else if (v.kind() == PotentialKind::gaussian)
        scale = 2.0 / std::sqrt(v.params().at("alpha"));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    StabilityReport report;
    report.trials = trials;
    report.N = N;
    report.B = B;
    report.min_energy_per_particle = kInf;
    for (int t = 0; t < trials; ++t) {
        const double side = scale * std::pow(double(N), 1.0 / d) * (0.3 + 1.7 * unit(rng));
        std::vector<Point> config(N, Point{0.0, 0.0, 0.0});
        for (auto& q : config)
            for (int i = 0; i < d; ++i) q[i] = side * unit(rng);
        double energy = 0.0;
        for (int i = 0; i < N && std::isfinite(energy); ++i)
            for (int j = i + 1; j < N; ++j) {
                Point diff{config[i][0] - config[j][0], config[i][1] - config[j][1], config[i][2] - config[j][2]};
                energy += v.energy(norm(diff, d));
            }
        report.min_energy_per_particle = std::min(report.min_energy_per_particle, energy / N);
        if (energy < -B * N - 1e-12 * (1.0 + std::abs(energy)))
            throw StabilityError("configuration with energy " + format_number(energy) + " below -B N = " +
                                     format_number(-B * N),
                                 config, energy);
    }
    return report;
}

}  // namespace canex
