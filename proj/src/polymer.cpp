#include "canex/polymer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "canex/errors.hpp"

namespace canex {

namespace {

template <class W>
W from_rational(const Rational& r);
template <>
double from_rational<double>(const Rational& r) {
    return r.convert_to<double>();
}
template <>
Rational from_rational<Rational>(const Rational& r) {
    return r;
}

template <class W>
W integer_power(const W& base, int k) {
    W out(1);
    for (int i = 0; i < k; ++i) out *= base;
    return out;
}

std::string subset_text(const PolymerSpace& space, const std::vector<std::size_t>& subset) {
    std::string out = "{";
    for (std::size_t k = 0; k < subset.size(); ++k) {
        if (k) out += ",";
        out += space.name(subset[k]);
    }
    return out + "}";
}

bool weights_equal(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }
bool weights_equal(const Rational& a, const Rational& b) { return a == b; }

void check_weights(const std::vector<double>& w) {
    for (double x : w)
        if (!std::isfinite(x)) throw DomainError("polymer weights must be finite");
}
void check_weights(const std::vector<Rational>&) {}

}  // namespace

PolymerSpace::PolymerSpace(std::vector<std::string> names,
                           const std::vector<std::pair<std::size_t, std::size_t>>& incompatible)
    : names_(std::move(names)) {
    const std::size_t n = names_.size();
    {
        std::set<std::string> unique(names_.begin(), names_.end());
        if (unique.size() != n) throw DomainError("polymer names must be unique");
    }
    rows_.assign(n, boost::dynamic_bitset<>(n));
    for (std::size_t i = 0; i < n; ++i) rows_[i][i] = true;
    for (auto [i, j] : incompatible) {
        if (i >= n || j >= n) throw DomainError("incompatibility pair references an unknown polymer");
        rows_[i][j] = rows_[j][i] = true;
    }
    neighbours_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (j != i && rows_[i][j]) neighbours_[i].push_back(j);
    sizes_.assign(n, 1);
}

PolymerSpace PolymerSpace::from_supports(std::vector<std::string> names, std::vector<std::uint64_t> supports) {
    if (names.size() != supports.size()) throw DomainError("one support per polymer required");
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < supports.size(); ++i) {
        if (supports[i] == 0) throw DomainError("polymer supports must be nonempty");
        for (std::size_t j = i + 1; j < supports.size(); ++j)
            if (supports[i] & supports[j]) pairs.emplace_back(i, j);
    }
    PolymerSpace space(std::move(names), pairs);
    std::vector<int> sizes;
    for (auto s : supports) sizes.push_back(std::popcount(s));
    space.sizes_ = std::move(sizes);
    space.supports_ = std::move(supports);
    return space;
}

std::size_t PolymerSpace::index_of(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw DomainError("unknown polymer '" + name + "'");
    return static_cast<std::size_t>(it - names_.begin());
}

void PolymerSpace::set_sizes(std::vector<int> sizes) {
    if (sizes.size() != names_.size()) throw DomainError("one size per polymer required");
    for (int s : sizes)
        if (s < 1) throw DomainError("polymer sizes must be positive");
    sizes_ = std::move(sizes);
}

template <class W>
PolymerSystem<W>::PolymerSystem(PolymerSpace s, std::vector<W> w) : space(std::move(s)), weights(std::move(w)) {
    if (weights.size() != space.size()) throw DomainError("one weight per polymer required");
    check_weights(weights);
}

MultiIndex::MultiIndex(std::vector<std::pair<std::size_t, int>> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end());
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        if (entries_[k].second < 1) throw DomainError("multiplicities must be positive");
        if (k && entries_[k].first == entries_[k - 1].first) throw DomainError("polymer repeated in multi-index");
    }
}

int MultiIndex::multiplicity(std::size_t polymer) const {
    for (auto [p, m] : entries_)
        if (p == polymer) return m;
    return 0;
}

std::vector<std::size_t> MultiIndex::support() const {
    std::vector<std::size_t> out;
    for (auto [p, m] : entries_) out.push_back(p);
    return out;
}

int MultiIndex::total_multiplicity() const {
    int total = 0;
    for (auto [p, m] : entries_) total += m;
    return total;
}

std::int64_t MultiIndex::factorial() const {
    std::int64_t out = 1;
    for (auto [p, m] : entries_)
        for (int k = 2; k <= m; ++k) out *= k;
    return out;
}

int MultiIndex::norm(const PolymerSpace& space) const {
    int total = 0;
    for (auto [p, m] : entries_) total += m * space.polymer_size(p);
    return total;
}

std::uint64_t MultiIndex::union_support(const PolymerSpace& space) const {
    if (!space.has_supports()) throw DomainError("|I| is undefined for polymers without vertex supports");
    std::uint64_t u = 0;
    for (auto [p, m] : entries_) u |= space.support(p);
    return u;
}

int MultiIndex::union_size(const PolymerSpace& space) const { return std::popcount(union_support(space)); }

template <class W>
W weight_power(const PolymerSystem<W>& system, const MultiIndex& index) {
    W out(1);
    for (auto [p, m] : index.entries()) out *= integer_power(system.weight(p), m);
    return out;
}

BitGraph expanded_incompatibility_bits(const MultiIndex& index, const PolymerSpace& space) {
    const int total = index.total_multiplicity();
    if (total > 32) throw SizeLimitError("expanded incompatibility graph limited to 32 vertices");
    std::vector<std::size_t> owner;
    for (auto [p, m] : index.entries()) {
        if (p >= space.size()) throw DomainError("multi-index references an unknown polymer");
        owner.insert(owner.end(), m, p);
    }
    BitGraph g;
    g.order = total;
    for (int i = 0; i < total; ++i)
        for (int j = i + 1; j < total; ++j)
            if (space.incompatible(owner[i], owner[j])) g.add_edge(i, j);
    return g;
}

LabeledGraph expanded_incompatibility_graph(const MultiIndex& index, const PolymerSpace& space) {
    const BitGraph g = expanded_incompatibility_bits(index, space);
    std::vector<Label> vs(g.order);
    std::iota(vs.begin(), vs.end(), 1);
    std::vector<Edge> es;
    for (int i = 0; i < g.order; ++i)
        for (int j = i + 1; j < g.order; ++j)
            if (g.has_edge(i, j)) es.emplace_back(i + 1, j + 1);
    return LabeledGraph(std::move(vs), std::move(es));
}

Rational ursell_coefficient(const MultiIndex& index, const PolymerSpace& space, int max_order) {
    if (index.empty()) throw DomainError("Ursell coefficient of the empty multi-index");
    if (index.total_multiplicity() > max_order)
        throw SizeLimitError("total multiplicity " + std::to_string(index.total_multiplicity()) + " exceeds cap " +
                             std::to_string(max_order));
    const BitGraph g = expanded_incompatibility_bits(index, space);
    return Rational(bits::signed_connected_spanning_sum(g), index.factorial());
}

namespace {

struct ClusterWalker {
    const PolymerSpace& space;
    std::span<const int> cost;
    int budget;
    const std::function<void(const MultiIndex&)>& visit;
    const std::vector<bool>* allowed;
    std::size_t root = 0;
    std::vector<int> closed;  // > 0 when in S or adjacent to S
    std::vector<std::size_t> support;

    bool is_allowed(std::size_t u) const { return allowed == nullptr || (*allowed)[u]; }

    void close(std::size_t w, int delta) {
        closed[w] += delta;
        for (std::size_t u : space.neighbours(w)) closed[u] += delta;
    }

    void emit_multiplicities() {
        std::vector<std::size_t> sorted = support;
        std::sort(sorted.begin(), sorted.end());
        int base = 0;
        for (std::size_t p : sorted) base += cost[p];
        std::vector<std::pair<std::size_t, int>> entries;
        for (std::size_t p : sorted) entries.emplace_back(p, 1);
        // distribute the remaining budget over extra copies
        std::function<void(std::size_t, int)> rec = [&](std::size_t k, int spent) {
            if (k == entries.size()) {
                visit(MultiIndex(entries));
                return;
            }
            const std::size_t p = entries[k].first;
            for (int extra = 0; spent + extra * cost[p] <= budget; ++extra) {
                entries[k].second = 1 + extra;
                rec(k + 1, spent + extra * cost[p]);
            }
            entries[k].second = 1;
        };
        rec(0, base);
    }

    void extend(std::vector<std::size_t> ext, int spent) {
        emit_multiplicities();
        while (!ext.empty()) {
            const std::size_t w = ext.back();
            ext.pop_back();
            const int next_spent = spent + cost[w];
            if (next_spent > budget) continue;
            std::vector<std::size_t> next_ext = ext;
            for (std::size_t u : space.neighbours(w))
                if (u > root && closed[u] == 0 && is_allowed(u) && next_spent + cost[u] <= budget)
                    next_ext.push_back(u);
            close(w, +1);
            support.push_back(w);
            extend(std::move(next_ext), next_spent);
            support.pop_back();
            close(w, -1);
        }
    }

    void run(std::size_t r) {
        root = r;
        if (!is_allowed(r) || cost[r] > budget) return;
        closed.assign(space.size(), 0);
        support = {r};
        close(r, +1);
        std::vector<std::size_t> ext;
        for (std::size_t u : space.neighbours(r))
            if (u > r && is_allowed(u) && cost[r] + cost[u] <= budget) ext.push_back(u);
        extend(std::move(ext), cost[r]);
        close(r, -1);
    }
};

void check_costs(const PolymerSpace& space, std::span<const int> cost) {
    if (cost.size() != space.size()) throw DomainError("one cost per polymer required");
    for (int c : cost)
        if (c < 1) throw DomainError("cluster costs must be positive");
}

}  // namespace

void for_each_cluster_rooted(const PolymerSpace& space, std::span<const int> cost, int budget, std::size_t root,
                             const std::function<void(const MultiIndex&)>& visit, const std::vector<bool>* allowed) {
    check_costs(space, cost);
    ClusterWalker walker{space, cost, budget, visit, allowed, 0, {}, {}};
    walker.run(root);
}

void for_each_cluster(const PolymerSpace& space, std::span<const int> cost, int budget,
                      const std::function<void(const MultiIndex&)>& visit, const std::vector<bool>* allowed) {
    check_costs(space, cost);
    ClusterWalker walker{space, cost, budget, visit, allowed, 0, {}, {}};
    for (std::size_t r = 0; r < space.size(); ++r) walker.run(r);
}

template <class W>
W partition_function_direct(const PolymerSystem<W>& system) {
    const std::size_t n = system.size();
    if (n > kMaxDirectPolymers)
        throw SizeLimitError("direct partition function limited to " + std::to_string(kMaxDirectPolymers) +
                             " polymers");
    std::vector<std::uint32_t> incompat(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (system.space.incompatible(i, j)) incompat[i] |= 1u << j;
    W total(0);
    std::function<void(std::size_t, std::uint32_t, const W&)> rec = [&](std::size_t k, std::uint32_t blocked,
                                                                         const W& product) {
        if (k == n) {
            total += product;
            return;
        }
        rec(k + 1, blocked, product);
        if (!((blocked >> k) & 1u)) rec(k + 1, blocked | incompat[k], product * system.weight(k));
    };
    rec(0, 0, W(1));
    return total;
}

template <class W>
ClusterLogSum<W> cluster_log_sum(const PolymerSystem<W>& system, int max_total) {
    if (max_total < 1 || max_total > kMaxUrsellOrder)
        throw SizeLimitError("cluster sums use total multiplicity in [1, " + std::to_string(kMaxUrsellOrder) + "]");
    ClusterLogSum<W> out;
    out.by_order.assign(max_total + 1, W(0));
    std::vector<int> cost(system.size(), 1);
    for_each_cluster(system.space, cost, max_total, [&](const MultiIndex& index) {
        const W term = from_rational<W>(ursell_coefficient(index, system.space)) * weight_power(system, index);
        out.by_order[index.total_multiplicity()] += term;
    });
    for (int k = 1; k <= max_total; ++k) out.total += out.by_order[k];
    return out;
}

double kp_constant(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
    return -std::log1p(-delta) / delta;
}

template <class W>
KpCertificate kp_condition_check(const PolymerSystem<W>& system, std::span<const double> a, std::span<const double> c,
                                 double delta) {
    const std::size_t n = system.size();
    if (a.size() != n || c.size() != n) throw DomainError("a and c need one value per polymer");
    for (std::size_t i = 0; i < n; ++i)
        if (a[i] < 0 || c[i] < 0) throw DomainError("a and c must be non-negative");
    KpCertificate cert;
    cert.delta = delta;
    cert.L = kp_constant(delta);
    cert.smallness_margin.resize(n);
    cert.sum_margin.resize(n);
    cert.smallness_holds = cert.sum_holds = true;
    cert.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double w = std::abs(to_double(system.weight(i)));
        cert.smallness_margin[i] = delta - w * std::exp(a[i]);
        if (cert.smallness_margin[i] < 0) cert.smallness_holds = false;
    }
    for (std::size_t j = 0; j < n; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (system.space.incompatible(i, j)) sum += std::abs(to_double(system.weight(i))) * std::exp(a[i] + c[i]);
        cert.sum_margin[j] = a[j] / cert.L - sum;
        if (cert.sum_margin[j] < 0) cert.sum_holds = false;
        const double margin = std::min(cert.sum_margin[j], cert.smallness_margin[j]);
        if (margin < cert.worst_margin) {
            cert.worst_margin = margin;
            cert.worst_polymer = j;
        }
    }
    cert.holds = cert.smallness_holds && cert.sum_holds;
    if (!cert.smallness_holds)
        cert.failed_hypothesis = "smallness";
    else if (!cert.sum_holds)
        cert.failed_hypothesis = "neighbour-sum";
    return cert;
}

template <class W>
double pinned_cluster_bound(const PolymerSystem<W>& system, std::size_t pinned, std::span<const double> a,
                            std::span<const double> c, double delta) {
    if (pinned >= system.size()) throw DomainError("unknown pinned polymer");
    const auto cert = kp_condition_check(system, a, c, delta);
    if (!cert.holds) throw DomainError("convergence condition not verified (" + cert.failed_hypothesis + ")");
    return cert.L * std::abs(to_double(system.weight(pinned))) * std::exp(a[pinned] + c[pinned]);
}

template <class W>
double pinned_cluster_sum(const PolymerSystem<W>& system, std::size_t pinned, std::span<const double> c,
                          int max_total) {
    if (pinned >= system.size()) throw DomainError("unknown pinned polymer");
    if (c.size() != system.size()) throw DomainError("c needs one value per polymer");
    if (max_total < 1 || max_total > kMaxUrsellOrder) throw SizeLimitError("total multiplicity cap exceeded");
    std::vector<int> cost(system.size(), 1);
    double total = 0.0;
    for_each_cluster(system.space, cost, max_total, [&](const MultiIndex& index) {
        if (index.multiplicity(pinned) == 0) return;
        double exponent = 0.0;
        for (auto [p, m] : index.entries()) exponent += m * c[p];
        const double term = std::abs(to_double(ursell_coefficient(index, system.space)) *
                                     to_double(weight_power(system, index)));
        total += term * std::exp(exponent);
    });
    return total;
}

template <class W>
double cluster_tail_bound(const PolymerSystem<W>& system, std::span<const double> a, std::span<const double> c,
                          double delta, int max_total) {
    const auto cert = kp_condition_check(system, a, c, delta);
    if (!cert.holds) throw DomainError("convergence condition not verified (" + cert.failed_hypothesis + ")");
    const double c_min = c.empty() ? 0.0 : *std::min_element(c.begin(), c.end());
    double total = 0.0;
    for (std::size_t g = 0; g < system.size(); ++g)
        total += cert.L * std::abs(to_double(system.weight(g))) * std::exp(a[g] + c[g]);
    return std::exp(-c_min * (max_total + 1)) * total;
}

std::vector<std::vector<std::size_t>> incompatible_subsets(const PolymerSpace& space,
                                                           const std::vector<std::size_t>& polymers) {
    const std::size_t k = polymers.size();
    if (k > 20) throw SizeLimitError("incompatible subsets limited to 20 base polymers");
    BitGraph g;
    g.order = static_cast<int>(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
            if (space.incompatible(polymers[i], polymers[j])) g.add_edge(int(i), int(j));
    std::vector<std::vector<std::size_t>> out;
    for (std::uint32_t s = 1; s < (1u << k); ++s) {
        if (!bits::connected(g, s)) continue;
        std::vector<std::size_t> subset;
        for (std::size_t i = 0; i < k; ++i)
            if ((s >> i) & 1u) subset.push_back(polymers[i]);
        std::sort(subset.begin(), subset.end());
        out.push_back(std::move(subset));
    }
    return out;
}

template <class W>
void verify_product_structure(const PolymerSystem<W>& system, const ProductStructure& ps) {
    const auto& space = system.space;
    std::vector<std::size_t> base = ps.base;
    std::sort(base.begin(), base.end());
    if (std::adjacent_find(base.begin(), base.end()) != base.end()) throw DomainError("base polymers repeated");
    for (std::size_t b : base)
        if (b >= space.size()) throw DomainError("base references an unknown polymer");
    const auto subsets = incompatible_subsets(space, base);
    if (ps.phi.size() != subsets.size())
        throw DomainError("phi must be defined exactly on the incompatible subsets of the base");
    std::set<std::size_t> images;
    for (const auto& subset : subsets) {
        auto it = ps.phi.find(subset);
        if (it == ps.phi.end()) throw DomainError("phi undefined on incompatible subset " + subset_text(space, subset));
        if (it->second >= space.size()) throw DomainError("phi maps to an unknown polymer");
        if (subset.size() == 1 && it->second != subset.front())
            throw DomainError("phi is not the identity on " + subset_text(space, subset));
        if (!images.insert(it->second).second)
            throw DomainError("phi is not one-to-one at " + subset_text(space, subset));
        W product(1);
        for (std::size_t b : subset) product *= system.weight(b);
        if (!weights_equal(system.weight(it->second), product))
            throw DomainError("factorization violated on subset " + subset_text(space, subset));
    }
    auto connected_union = [&](const std::vector<std::size_t>& x, const std::vector<std::size_t>& y) {
        for (std::size_t u : x)
            for (std::size_t v : y)
                if (space.incompatible(u, v)) return true;
        return false;
    };
    for (const auto& x : subsets)
        for (const auto& y : subsets) {
            const bool expected = connected_union(x, y);
            if (space.incompatible(ps.phi.at(x), ps.phi.at(y)) != expected)
                throw DomainError("image compatibility of " + subset_text(space, x) + " and " +
                                  subset_text(space, y) + " does not match the base");
        }
}

template <class W>
std::vector<CancellationRow<W>> product_structure_cancellation(const PolymerSystem<W>& system,
                                                               const ProductStructure& ps, int max_degree) {
    if (max_degree < 1 || max_degree > kMaxUrsellOrder)
        throw SizeLimitError("cancellation degree must lie in [1, " + std::to_string(kMaxUrsellOrder) + "]");
    verify_product_structure(system, ps);
    std::vector<bool> allowed(system.size(), false);
    std::vector<int> cost(system.size(), 1);
    for (const auto& [subset, image] : ps.phi) {
        allowed[image] = true;
        cost[image] = static_cast<int>(subset.size());
    }
    std::vector<CancellationRow<W>> rows(max_degree);
    for (int k = 0; k < max_degree; ++k) rows[k].order = k + 1;
    for_each_cluster(
        system.space, cost, max_degree,
        [&](const MultiIndex& index) {
            int degree = 0;
            for (auto [p, m] : index.entries()) degree += m * cost[p];
            rows[degree - 1].lhs +=
                from_rational<W>(ursell_coefficient(index, system.space)) * weight_power(system, index);
        },
        &allowed);
    for (std::size_t b : ps.base)
        for (int k = 1; k <= max_degree; ++k) {
            const Rational coeff(k % 2 == 1 ? 1 : -1, k);
            rows[k - 1].rhs += from_rational<W>(coeff) * integer_power(system.weight(b), k);
        }
    for (auto& row : rows) row.residual = row.lhs - row.rhs;
    return rows;
}

#define CANEX_INSTANTIATE_POLYMER(W)                                                                              \
    template struct PolymerSystem<W>;                                                                             \
    template W weight_power(const PolymerSystem<W>&, const MultiIndex&);                                          \
    template W partition_function_direct(const PolymerSystem<W>&);                                                \
    template ClusterLogSum<W> cluster_log_sum(const PolymerSystem<W>&, int);                                      \
    template KpCertificate kp_condition_check(const PolymerSystem<W>&, std::span<const double>,                   \
                                              std::span<const double>, double);                                   \
    template double pinned_cluster_bound(const PolymerSystem<W>&, std::size_t, std::span<const double>,           \
                                         std::span<const double>, double);                                        \
    template double pinned_cluster_sum(const PolymerSystem<W>&, std::size_t, std::span<const double>, int);       \
    template double cluster_tail_bound(const PolymerSystem<W>&, std::span<const double>, std::span<const double>, \
                                       double, int);                                                              \
    template void verify_product_structure(const PolymerSystem<W>&, const ProductStructure&);                     \
    template std::vector<CancellationRow<W>> product_structure_cancellation(const PolymerSystem<W>&,              \
                                                                            const ProductStructure&, int);

CANEX_INSTANTIATE_POLYMER(double)
CANEX_INSTANTIATE_POLYMER(Rational)

}  // namespace canex
