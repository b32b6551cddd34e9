#pragma once

// Canonical-ensemble expansion of log Z for a periodic box: the coefficients
// F^M(n) = P(n) B^M(n) / (n+1), the graph-polymer cluster sums behind B^M, and the
// activity / virial series of the grand-canonical picture.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "canex/integrals.hpp"
#include "canex/polymer.hpp"
#include "canex/rational.hpp"

namespace canex {

/// Connected graphs with at least two vertices on subsets of {1..vertices}, as a polymer
/// space (incompatible iff they share a vertex). Cost of a graph = its vertex count.
struct GraphPolymerTable {
    int vertices = 0;
    PolymerSpace space;
    std::vector<LabeledGraph> graphs;
    std::vector<IsoKey> classes;
    std::vector<int> cost;
};
inline constexpr int kMaxGraphPolymerVertices = 5;
const GraphPolymerTable& graph_polymer_table(int vertices);

/// A multi-index on the graph polymers over {1..n+1} whose supports cover every label.
struct CoveringCluster {
    MultiIndex index;
    Rational coefficient;
    /// Exponent of |Lambda| carried by |Lambda|^n zeta~^I: n - sum I(g)(|g|-1).
    int volume_power = 0;
    /// All multiplicities one and volume_power zero.
    bool tree_like = false;
};
/// Covering clusters with ||I|| <= M, cached per (n, M). 1 <= n <= 4, M <= 8.
const std::vector<CoveringCluster>& covering_clusters(int n, int M);

template <class W>
struct GraphClusterSum {
    W value{};
    /// Contributions grouped by volume power.
    std::map<int, W> by_volume_power;
    std::size_t terms = 0;
};

/// sum over covering clusters of c_I prod zeta~(g)^I(g), with zeta~ supplied per isomorphism class.
template <class W>
GraphClusterSum<W> covering_cluster_sum(int n, int M, const std::function<W(const IsoKey&)>& weight);

/// (N-1)...(N-n) / |Lambda|^n. Zero (with `vanishes` set) when n >= N.
struct PFactor {
    double value = 0.0;
    bool vanishes = false;
};
PFactor p_factor(int N, double volume, int n);

struct BFactor {
    double value = 0.0;
    /// Linear propagation of the activity integration errors.
    double error = 0.0;
    std::map<int, double> by_volume_power;
    std::size_t terms = 0;
    std::vector<std::string> provenance;
};
/// B^M(n) = |Lambda|^n / n! * covering_cluster_sum(n, M) with zeta~ from the integrator.
BFactor b_factor(int n, int M, ClusterIntegrator& integrator);

/// F^M(n) through label-1 vertex polymers on {1..N}: (1/(n+1)) sum over vertex
/// multi-indices I with 1 in the union, |union| = n+1 and ||I|| <= M of c_I zeta^I,
/// where zeta(V) is the sum of the class weights over connected graphs on V. N <= 6.
template <class W>
W vertex_route_f(int N, int n, int M, const std::function<W(const IsoKey&)>& weight);
/// The same coefficient from graph polymers: C(N-1, n)/(n+1) * covering_cluster_sum(n, M).
template <class W>
W graph_route_f(int N, int n, int M, const std::function<W(const IsoKey&)>& weight);

/// Cluster sum over the unions of incompatible block sets of a connected g, each union
/// weighted by the product of its block weights, restricted to multi-indices whose
/// union is g and truncated at sum over blocks of (degree * block size) <= M.
/// Empty block_weights selects distinct default rationals. Vanishes when g has an
/// articulation point.
Rational restricted_cluster_sum(const LabeledGraph& g, int M, const std::vector<Rational>& block_weights = {});

struct ExpansionParams {
    int N = 2;
    BoxGeometry box;
    double beta = 1.0;
    PairPotential potential = PairPotential::zero();
    int lattice_cutoff = 2;
    int n_max = 1;
    int M = 2;
    /// Convergence parameters: a(V) = a|V|, c(V) = c|V|, alpha = a + c.
    double a = 0.5;
    double c = 0.1;
    IntegrationOptions integration;

    [[nodiscard]] double rho() const { return N / box.volume(); }
    [[nodiscard]] double alpha() const { return a + c; }
    /// Throws DomainError naming the offending field.
    void validate() const;
    /// "key=value" lines describing every input.
    [[nodiscard]] std::vector<std::string> describe() const;
};

/// Convergence data for the vertex polymer system.
struct ExpansionCertificate {
    // Analytic route from the tree-graph bound with C(beta) in free space.
    double delta = 0.0;
    double delta_prime = 0.0;
    /// 1 - rho e^{2 beta B + alpha + 1} C(beta); positive when the density condition holds.
    double density_margin = 0.0;
    double analytic_L = 0.0;
    bool analytic_holds = false;
    // Direct check of the polymer conditions, each |zeta(V)| replaced by its tree-graph bound.
    double numeric_delta = 0.0;
    double numeric_L = 0.0;
    /// sum over V containing label 1 of bound(|zeta(V)|) e^{alpha |V|}, against a / L.
    double neighbour_sum = 0.0;
    double neighbour_limit = 0.0;
    bool numeric_holds = false;

    [[nodiscard]] bool holds() const { return analytic_holds || numeric_holds; }
    /// L of the certificate in use (analytic first).
    [[nodiscard]] double L() const;
    [[nodiscard]] std::string source() const;
};
ExpansionCertificate expansion_certificate(const ExpansionParams& params, const ClusterIntegrator& integrator);

struct SeriesRow {
    int n = 0;
    double P = 0.0;
    bool P_vanishes = false;
    double B = 0.0;
    double B_error = 0.0;
    double F = 0.0;
    double F_error = 0.0;
    /// Truncation bound e^{-c(n+M)/2} L e^alpha.
    double truncation_bound = 0.0;
    /// Decay envelope L e^alpha e^{-cn}.
    double decay_bound = 0.0;
    std::size_t terms = 0;
};

struct SeriesReport {
    std::vector<std::string> header;
    std::vector<SeriesRow> rows;
    ExpansionCertificate certificate;
    /// Present when no certificate holds; the numbers are computed regardless.
    bool uncertified = false;
    double ideal_term = 0.0;
    double series_sum = 0.0;  // rho * sum F
    double log_Z_per_volume = 0.0;
    /// rho * sum |F error|
    double integration_error = 0.0;
    /// rho * sum over rows of truncation_bound
    double truncation_bound = 0.0;
    /// Bound on orders above n_max (exactly zero once n_max >= N-1).
    double order_tail_bound = 0.0;
    std::vector<std::string> provenance;

    [[nodiscard]] std::string to_csv() const;
    [[nodiscard]] std::string to_records() const;
};

/// F^M(n) = P(n) B^M(n) / (n+1) with its tail data, from an existing integrator.
SeriesRow f_coefficient(const ExpansionParams& params, int n, ClusterIntegrator& integrator,
                        const ExpansionCertificate& certificate);
/// (1/|Lambda|) log Z ~ (1/|Lambda|) log(|Lambda|^N / N!) + rho sum_{n <= n_max} F^M(n).
SeriesReport log_Z_canonical(const ExpansionParams& params);

/// beta p = sum_{n <= orders} b_n(Lambda) z^n, orders <= 5.
IntegralResult pressure_activity_series(double z, int orders, ClusterIntegrator& integrator);
/// z(rho) = rho exp(-sum_{m <= orders} beta_m rho^m); beta_coeffs[m-1] = beta_m.
double activity_inversion(double rho, const std::vector<double>& beta_coeffs, int orders);
/// beta p = rho - sum_{m <= m_max} m/(m+1) beta_m rho^{m+1}.
double virial_pressure(double rho, const std::vector<double>& beta_coeffs, int m_max);
/// beta f = rho (log rho - 1) - sum_{m <= m_max} beta_m rho^{m+1} / (m+1).
double free_energy_density(double rho, const std::vector<double>& beta_coeffs, int m_max);
/// Virial coefficients B_{m+1} = -m/(m+1) beta_m.
std::vector<double> virial_coefficients(const std::vector<double>& beta_coeffs);

struct SweepRow {
    double L = 0.0;
    double B = 0.0;
    double B_error = 0.0;
    double reference = 0.0;
    double abs_error = 0.0;
    /// abs_error of the previous row divided by this one (0 on the first row).
    double ratio = 0.0;
};
/// B^M(n) across box sides against the free-space beta_n.
std::vector<SweepRow> thermo_limit_sweep(int n, const std::vector<double>& L_list, const PairPotential& v, double beta,
                                         int d, int M, const IntegrationOptions& options = {});

}  // namespace canex
