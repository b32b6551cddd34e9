#pragma once

// Abstract polymer models: compatible-collection partition functions, Ursell
// coefficients of multi-indices, truncated cluster sums, the convergence
// certificate for the cluster expansion and the product-structure identity.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "canex/graph.hpp"
#include "canex/rational.hpp"

namespace canex {

/// Polymer identities plus the symmetric incompatibility relation (every polymer
/// is incompatible with itself). Optional per-polymer data: a size |gamma| used by
/// weighted norms, and a vertex support for polymers that are vertex sets or graphs.
class PolymerSpace {
public:
    PolymerSpace() = default;
    PolymerSpace(std::vector<std::string> names, const std::vector<std::pair<std::size_t, std::size_t>>& incompatible);

    /// Polymers carrying vertex supports; two polymers are incompatible iff their supports intersect.
    static PolymerSpace from_supports(std::vector<std::string> names, std::vector<std::uint64_t> supports);

    [[nodiscard]] std::size_t size() const { return names_.size(); }
    [[nodiscard]] const std::string& name(std::size_t i) const { return names_.at(i); }
    [[nodiscard]] std::size_t index_of(const std::string& name) const;
    [[nodiscard]] bool incompatible(std::size_t i, std::size_t j) const { return rows_[i][j]; }
    /// Incompatible polymers other than i itself, ascending.
    [[nodiscard]] const std::vector<std::size_t>& neighbours(std::size_t i) const { return neighbours_[i]; }

    [[nodiscard]] int polymer_size(std::size_t i) const { return sizes_[i]; }
    void set_sizes(std::vector<int> sizes);
    [[nodiscard]] bool has_supports() const { return !supports_.empty(); }
    [[nodiscard]] std::uint64_t support(std::size_t i) const { return supports_.at(i); }

private:
    std::vector<std::string> names_;
    std::vector<boost::dynamic_bitset<>> rows_;
    std::vector<std::vector<std::size_t>> neighbours_;
    std::vector<int> sizes_;
    std::vector<std::uint64_t> supports_;
};

/// A polymer space with weights. W is double (integral-backed weights) or Rational
/// (exact identities); the mode is fixed by the type.
template <class W>
struct PolymerSystem {
    PolymerSpace space;
    std::vector<W> weights;

    PolymerSystem() = default;
    PolymerSystem(PolymerSpace s, std::vector<W> w);
    [[nodiscard]] std::size_t size() const { return space.size(); }
    [[nodiscard]] const W& weight(std::size_t i) const { return weights[i]; }
};

/// Polymer -> positive multiplicity, stored sorted by polymer index.
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<std::pair<std::size_t, int>> entries);

    [[nodiscard]] const std::vector<std::pair<std::size_t, int>>& entries() const { return entries_; }
    [[nodiscard]] bool empty() const { return entries_.empty(); }
    [[nodiscard]] int multiplicity(std::size_t polymer) const;
    [[nodiscard]] std::vector<std::size_t> support() const;
    /// Sum of multiplicities: number of vertices of the expanded incompatibility graph.
    [[nodiscard]] int total_multiplicity() const;
    /// I! = prod I(gamma)!
    [[nodiscard]] std::int64_t factorial() const;
    /// ||I|| = sum I(gamma) |gamma| using the space's polymer sizes.
    [[nodiscard]] int norm(const PolymerSpace& space) const;
    /// |I|: cardinality of the union of vertex supports. Requires a space with supports.
    [[nodiscard]] int union_size(const PolymerSpace& space) const;
    [[nodiscard]] std::uint64_t union_support(const PolymerSpace& space) const;

    friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

private:
    std::vector<std::pair<std::size_t, int>> entries_;
};

/// Weight monomial omega^I.
template <class W>
W weight_power(const PolymerSystem<W>& system, const MultiIndex& index);

inline constexpr int kMaxUrsellOrder = 8;

/// The graph G_I on sum I(gamma) vertices: each polymer becomes a complete graph on
/// its copies, and copies of incompatible polymers are all joined.
LabeledGraph expanded_incompatibility_graph(const MultiIndex& index, const PolymerSpace& space);
BitGraph expanded_incompatibility_bits(const MultiIndex& index, const PolymerSpace& space);

/// c_I = (1/I!) sum over connected spanning subgraphs G of G_I of (-1)^|E(G)|.
/// Zero on compatible supports. Total multiplicity at most `max_order`.
Rational ursell_coefficient(const MultiIndex& index, const PolymerSpace& space, int max_order = kMaxUrsellOrder);

/// Visits every multi-index whose support is connected in the incompatibility graph
/// and whose cost sum I(gamma) cost(gamma) is at most `budget`. Costs must be positive.
/// `allowed` (optional) restricts the support. Enumeration is depth-first from each root
/// polymer, roots in ascending order; the order of visits is deterministic.
void for_each_cluster(const PolymerSpace& space, std::span<const int> cost, int budget,
                      const std::function<void(const MultiIndex&)>& visit,
                      const std::vector<bool>* allowed = nullptr);
/// Same enumeration restricted to one root: supports whose smallest polymer is `root`.
void for_each_cluster_rooted(const PolymerSpace& space, std::span<const int> cost, int budget, std::size_t root,
                             const std::function<void(const MultiIndex&)>& visit,
                             const std::vector<bool>* allowed = nullptr);

inline constexpr std::size_t kMaxDirectPolymers = 20;

/// Sum over pairwise-compatible collections (the empty one included) of the
/// product of weights. At most 20 polymers.
template <class W>
W partition_function_direct(const PolymerSystem<W>& system);

template <class W>
struct ClusterLogSum {
    W total{};
    /// by_order[k] = sum over I with total multiplicity k (index 0 unused).
    std::vector<W> by_order;
};

/// Sum of c_I omega^I over multi-indices with total multiplicity <= max_total (<= 8),
/// split by total multiplicity.
template <class W>
ClusterLogSum<W> cluster_log_sum(const PolymerSystem<W>& system, int max_total);

/// L(delta) = -log(1 - delta) / delta, delta in (0, 1).
double kp_constant(double delta);

struct KpCertificate {
    bool holds = false;
    bool smallness_holds = false;  // |w| e^a <= delta for every polymer
    bool sum_holds = false;        // neighbour sums bounded by a / L
    double delta = 0.0;
    double L = 0.0;
    std::vector<double> smallness_margin;  // delta - |w| e^a
    std::vector<double> sum_margin;        // a / L - sum_{gamma incompatible} |w| e^{a + c}
    std::size_t worst_polymer = 0;
    double worst_margin = 0.0;
    std::string failed_hypothesis;  // empty when both hold
};

/// Evaluates both hypotheses of the cluster-expansion convergence theorem for the
/// caller's a, c (one value per polymer) and delta in (0, 1).
template <class W>
KpCertificate kp_condition_check(const PolymerSystem<W>& system, std::span<const double> a, std::span<const double> c,
                                 double delta);

/// Right-hand side L |w(gamma')| e^{a(gamma') + c(gamma')} of the pinned bound.
/// Throws DomainError unless the certificate for (a, c, delta) holds.
template <class W>
double pinned_cluster_bound(const PolymerSystem<W>& system, std::size_t pinned, std::span<const double> a,
                            std::span<const double> c, double delta);

/// Truncated left-hand side: sum over I with I(pinned) >= 1 and total multiplicity <= max_total
/// of |c_I w^I| e^{sum I(gamma) c(gamma)}.
template <class W>
double pinned_cluster_sum(const PolymerSystem<W>& system, std::size_t pinned, std::span<const double> c,
                          int max_total);

/// Bound on sum over I with total multiplicity > max_total of |c_I w^I|, from the pinned
/// bound summed over polymers: sum_g e^{-c_min (max_total+1)} L |w(g)| e^{a(g)+c(g)}.
/// Throws DomainError unless the certificate holds.
template <class W>
double cluster_tail_bound(const PolymerSystem<W>& system, std::span<const double> a, std::span<const double> c,
                          double delta, int max_total);

/// Base polymers and an injective map from their incompatible subsets to polymers.
struct ProductStructure {
    std::vector<std::size_t> base;
    /// Sorted subset of base polymer indices -> image polymer.
    std::map<std::vector<std::size_t>, std::size_t> phi;
};

/// Incompatible subsets (connected in the incompatibility graph) of the given polymers, singletons included.
std::vector<std::vector<std::size_t>> incompatible_subsets(const PolymerSpace& space,
                                                           const std::vector<std::size_t>& polymers);

/// Checks the product-structure invariants: phi defined exactly on the incompatible
/// subsets of the base, identity on singletons, injective, image compatibility matching
/// the base, and weight factorization. Throws DomainError naming the failing subset.
template <class W>
void verify_product_structure(const PolymerSystem<W>& system, const ProductStructure& ps);

template <class W>
struct CancellationRow {
    int order = 0;  // degree in the base weights
    W lhs{};        // sum over I supported in the range of phi
    W rhs{};        // sum over I supported on one base polymer
    W residual{};
};

/// Both sides of the product-structure identity, graded by degree in the base weights
/// (an image phi(A) has degree |A|), for degrees 1..max_degree (<= 8).
template <class W>
std::vector<CancellationRow<W>> product_structure_cancellation(const PolymerSystem<W>& system,
                                                               const ProductStructure& ps, int max_degree);

}  // namespace canex
