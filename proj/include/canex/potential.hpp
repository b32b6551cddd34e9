#pragma once

// Radial pair potentials, their periodic images in a cubic box, Mayer functions
// and the absolute Mayer integrals C(beta) and C_Lambda(beta).

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "canex/errors.hpp"

namespace canex {

enum class PotentialKind { zero, hard_core, square_well, gaussian, lennard_jones };

/// A radial pair potential V(|x|). Hard cores evaluate to +infinity.
class PairPotential {
public:
    static PairPotential zero();
    /// Hard rod (d = 1) or hard sphere (d >= 2) of diameter sigma.
    static PairPotential hard_core(double sigma);
    /// +inf below sigma, -epsilon on [sigma, lambda*sigma), 0 beyond. epsilon >= 0, lambda > 1.
    static PairPotential square_well(double sigma, double epsilon, double lambda);
    /// epsilon * exp(-alpha r^2), alpha > 0. A negative epsilon needs an explicitly declared B.
    static PairPotential gaussian(double epsilon, double alpha);
    /// 4 epsilon ((sigma/r)^12 - (sigma/r)^6) shifted to vanish at rc, zero beyond rc and
    /// +inf below r_min.
    static PairPotential lennard_jones(double epsilon, double sigma, double rc, double r_min);
    /// Builds a potential from a kind name ("zero", "hard_rod", "hard_sphere", "hard_core",
    /// "square_well", "gaussian", "lennard_jones") and its numeric parameters. An optional
    /// "B" entry overrides the declared stability constant.
    static PairPotential from_params(const std::string& kind, const std::map<std::string, double>& params);

    [[nodiscard]] PotentialKind kind() const { return kind_; }
    [[nodiscard]] std::string name() const;
    [[nodiscard]] const std::map<std::string, double>& params() const { return params_; }

    /// V(r); +infinity inside a hard core.
    [[nodiscard]] double energy(double r) const;
    [[nodiscard]] bool is_hard_core_at(double r) const { return r < hard_core_radius_; }
    [[nodiscard]] double hard_core_radius() const { return hard_core_radius_; }
    /// Support radius of V: V(r) = 0 for r >= range(). Infinite for the Gaussian.
    [[nodiscard]] double range() const { return range_; }
    [[nodiscard]] bool finite_range() const;
    /// Radii where V jumps (hard-core edge, well edge, LJ floor), ascending.
    [[nodiscard]] const std::vector<double>& discontinuities() const { return jumps_; }
    [[nodiscard]] bool nonnegative() const;
    /// Smallest finite value of V (0 when V is never negative).
    [[nodiscard]] double min_energy() const;
    /// Upper bound on |e^{-beta V} - 1| over all distances.
    [[nodiscard]] double mayer_sup(double beta) const;
    /// psi(s): decreasing envelope with |V(r)| <= psi(s) for all r >= s >= envelope_radius().
    [[nodiscard]] double envelope(double s) const;
    [[nodiscard]] double envelope_radius() const;

    /// Declared stability constant for dimension d: sum_{i<j} V >= -B N.
    /// Throws DomainError when none is known and none was declared.
    [[nodiscard]] double stability_B(int d) const;
    [[nodiscard]] bool has_stability_B() const;
    [[nodiscard]] PairPotential with_stability_B(double B) const;

    /// e^{-beta V(r)} - 1, exactly -1 inside a hard core.
    [[nodiscard]] double mayer_f(double beta, double r) const;

private:
    PotentialKind kind_ = PotentialKind::zero;
    std::map<std::string, double> params_;
    double hard_core_radius_ = 0.0;
    double range_ = 0.0;
    std::vector<double> jumps_;
    std::optional<double> declared_B_;
    double shift_ = 0.0;
};

inline double mayer_f(const PairPotential& v, double beta, double r) { return v.mayer_f(beta, r); }

/// Cubic box (-L/2, L/2]^d with d in {1, 2, 3}.
struct BoxGeometry {
    int d = 1;
    double L = 1.0;

    BoxGeometry() = default;
    BoxGeometry(int dimension, double side);
    [[nodiscard]] double volume() const;
};

using Point = std::array<double, 3>;

/// Wraps each coordinate of x into (-L/2, L/2].
Point wrap_into_box(const Point& x, const BoxGeometry& box);
double norm(const Point& x, int d);

/// V^per(x) = sum over lattice images n with ||n||_inf <= cutoff of V(x + nL).
class PeriodicPotential {
public:
    PeriodicPotential(PairPotential v, BoxGeometry box, int lattice_cutoff);

    [[nodiscard]] const PairPotential& base() const { return v_; }
    [[nodiscard]] const BoxGeometry& box() const { return box_; }
    [[nodiscard]] int lattice_cutoff() const { return cutoff_; }
    /// True when only the nearest image can interact (range <= L/2); evaluation is then exact.
    [[nodiscard]] bool nearest_image() const { return nearest_image_; }
    /// Upper bound on sum_{||n||_inf > cutoff} |V(x + nL)| for x in the box.
    [[nodiscard]] double tail_bound() const { return tail_bound_; }

    /// V^per at a displacement (wrapped into the box first). +infinity when any image is in a hard core.
    [[nodiscard]] double energy(const Point& x) const;
    [[nodiscard]] double mayer_f(double beta, const Point& x) const;
    /// One-dimensional shortcut: x is a scalar displacement. Requires d = 1.
    [[nodiscard]] double mayer_f_1d(double beta, double x) const;

private:
    PairPotential v_;
    BoxGeometry box_;
    int cutoff_;
    bool nearest_image_ = false;
    double tail_bound_ = 0.0;
    std::vector<Point> shifts_;
};

PeriodicPotential periodize(const PairPotential& v, const BoxGeometry& box, int lattice_cutoff);

/// Tail bound sum_{s > cutoff} ((2s+1)^d - (2s-1)^d) psi(sL - L sqrt(d)/2).
double periodization_tail_bound(const PairPotential& v, const BoxGeometry& box, int lattice_cutoff);

struct QuadratureValue {
    double value = 0.0;
    double error = 0.0;
};

/// Integral of f = e^{-beta V} - 1 (or |f| when `absolute`) over {|x| >= r_from} in R^d,
/// reduced to a radial integral. Throws ConvergenceError when the tail does not converge.
QuadratureValue mayer_radial_integral(const PairPotential& v, double beta, int d, bool absolute, double r_from = 0.0);
/// Integral of f^per (or |f^per|) over the box.
QuadratureValue mayer_box_integral(const PeriodicPotential& vper, double beta, bool absolute);

/// C(beta) = integral over R^d of |e^{-beta V} - 1|, reduced to a radial integral.
QuadratureValue c_beta(const PairPotential& v, double beta, int d);
/// C_Lambda(beta) = integral over the box of |e^{-beta V^per} - 1|. Equals c_beta exactly
/// (same evaluation) when the nearest-image condition holds.
QuadratureValue c_beta_box(const PeriodicPotential& vper, double beta);

/// Raised by stability_check; carries the configuration that violates the declared B.
class StabilityError : public Error {
public:
    StabilityError(const std::string& what, std::vector<Point> configuration, double energy)
        : Error(what), configuration_(std::move(configuration)), energy_(energy) {}
    [[nodiscard]] const std::vector<Point>& configuration() const { return configuration_; }
    [[nodiscard]] double energy() const { return energy_; }

private:
    std::vector<Point> configuration_;
    double energy_;
};

struct StabilityReport {
    int trials = 0;
    int N = 0;
    double B = 0.0;
    /// Smallest sampled value of energy / N (may be +infinity for hard cores).
    double min_energy_per_particle = 0.0;
};

/// Samples configurations of N <= 10 particles in free space and checks
/// sum_{i<j} V >= -B N for each. Throws StabilityError on a counterexample.
StabilityReport stability_check(const PairPotential& v, int d, int N, int trials, std::uint64_t seed);

}  // namespace canex
