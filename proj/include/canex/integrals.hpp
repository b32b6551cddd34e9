#pragma once

// Graph activities zeta~(g), polymer activities zeta(V), connected-sum coefficients
// b_n and irreducible coefficients beta_n, with quadrature and Monte Carlo backends.

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "canex/graph.hpp"
#include "canex/potential.hpp"

namespace canex {

enum class Method { automatic, quadrature, monte_carlo, importance };

std::string to_string(Method m);
Method parse_method(const std::string& text);

struct IntegralResult {
    double value = 0.0;
    /// Quadrature: difference between two rules plus any certified tail. MC: standard error.
    double error = 0.0;
    Method method = Method::quadrature;
    /// Quadrature nodes or MC samples actually used.
    std::int64_t samples = 0;
    std::uint64_t seed = 0;

    /// "value=...;error=...;method=...;samples=...;seed=..."
    [[nodiscard]] std::string record() const;
};

struct IntegrationOptions {
    Method method = Method::automatic;
    std::int64_t samples = 400000;
    std::uint64_t seed = 1;
    int workers = 1;
    /// MC batches; results are reduced in batch order, so they do not depend on `workers`.
    int batches = 16;
    /// Quadrature is abandoned (automatic mode falls back to MC) beyond this many integrand nodes.
    std::int64_t max_quadrature_nodes = 40'000'000;
    /// Gauss points and sub-panels per interval for smooth integrands.
    int smooth_points = 10;
    int smooth_panels = 3;
};

/// Largest graph handled by the activity integrals.
inline constexpr int kMaxActivityOrder = 6;

/// Graph integrals in a periodic box for one (potential, beta). Results are cached by
/// isomorphism class, since the translation-invariant integrand only sees the class.
class ClusterIntegrator {
public:
    ClusterIntegrator(PeriodicPotential vper, double beta, IntegrationOptions options = {});

    [[nodiscard]] const PeriodicPotential& potential() const { return vper_; }
    [[nodiscard]] const BoxGeometry& box() const { return vper_.box(); }
    [[nodiscard]] double beta() const { return beta_; }
    [[nodiscard]] const IntegrationOptions& options() const { return options_; }

    /// zeta~(g) = integral over Lambda^{|g|} of prod_i dq_i/|Lambda| prod_{ij in E(g)} f_ij, with the
    /// first vertex pinned at the origin. Requires a connected g with 2 <= |g| <= 6.
    IntegralResult zeta_tilde(const LabeledGraph& g);
    /// Same integral with an explicit method, bypassing the cache.
    IntegralResult zeta_tilde_with(const LabeledGraph& g, Method method);

    /// Integral of f^per over the box.
    [[nodiscard]] IntegralResult single_edge_integral() const;
    /// |Lambda|^{-(|T|-1)} (integral of f^per)^{|T|-1} for a tree T.
    [[nodiscard]] double tree_weight_closed_form(const LabeledGraph& tree) const;

    enum class VertexRoute { graph_sum, inclusion_exclusion };
    /// zeta(V) for |V| = n (2 <= n <= 6): sum over connected graphs on n labels of zeta~.
    IntegralResult zeta_vertex(int n, VertexRoute route = VertexRoute::graph_sum);

    /// n^{n-2} |Lambda|^{-(n-1)} e^{(2 beta B + a) n} C_Lambda(beta)^{n-1}.
    [[nodiscard]] double tree_graph_bound(int n, double a) const;

    /// b_n(Lambda) = |Lambda|^{n-1}/n! zeta(V) with |V| = n; b_1 = 1. n <= 5.
    IntegralResult b_n_connected(int n);

    /// Number of cached isomorphism classes.
    [[nodiscard]] std::size_t cache_size() const;

private:
    IntegralResult compute(const LabeledGraph& g, Method method) const;

    PeriodicPotential vper_;
    double beta_;
    IntegrationOptions options_;
    mutable std::mutex mutex_;
    std::map<IsoKey, IntegralResult> cache_;
};

/// Counts of labeled connected graphs on {1..n} per isomorphism class (n <= 6).
const std::map<IsoKey, std::int64_t>& connected_class_counts(int n);
/// Counts of labeled 2-connected graphs on {1..n} per isomorphism class (2 <= n <= 6).
const std::map<IsoKey, std::int64_t>& two_connected_class_counts(int n);

/// beta_n = (1/n!) sum over 2-connected g on n+1 labels of the free-space integral of
/// prod f over q_2..q_{n+1} with q_1 = 0, truncated to |q_i| <= domain_radius.
/// n <= 4. A non-positive domain_radius selects n * range for finite-range potentials and a
/// radius with a negligible certified tail otherwise. The certified truncation tail is added
/// to the error; a tail that cannot be certified raises ConvergenceError.
IntegralResult beta_n(int n, const PairPotential& v, double beta, int d, const IntegrationOptions& options = {},
                      double domain_radius = 0.0);

}  // namespace canex
