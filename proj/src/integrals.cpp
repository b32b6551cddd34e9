#include "canex/integrals.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <tuple>
#include <limits>
#include <random>
#include <thread>

#include <boost/math/special_functions/legendre.hpp>

#include "canex/format.hpp"

namespace canex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct BudgetExceeded {};

// ---------------------------------------------------------------------------
// Gauss-Legendre rules on [-1, 1], built once per order.

struct GaussRule {
    std::vector<double> nodes, weights;
};

const GaussRule& gauss_rule(int p) {
    static std::vector<GaussRule> rules = [] {
        std::vector<GaussRule> out(33);
        for (int n = 1; n <= 32; ++n) {
            GaussRule r;
            for (double z : boost::math::legendre_p_zeros<double>(n)) {
                const double dp = boost::math::legendre_p_prime(n, z);
                const double w = 2.0 / ((1.0 - z * z) * dp * dp);
                r.nodes.push_back(z);
                r.weights.push_back(w);
                if (z != 0.0) {
                    r.nodes.push_back(-z);
                    r.weights.push_back(w);
                }
            }
            out[n] = std::move(r);
        }
        return out;
    }();
    if (p < 1 || p > 32) throw DomainError("Gauss-Legendre order out of range");
    return rules[p];
}

// Signed sums of up to t radii, t = 0..depth, each list sorted and deduplicated.
std::vector<std::vector<double>> radius_combinations(const std::vector<double>& radii, int depth) {
    std::vector<std::vector<double>> out(depth + 1);
    out[0] = {0.0};
    for (int t = 1; t <= depth; ++t) {
        std::vector<double> next = out[t - 1];
        for (double o : out[t - 1])
            for (double r : radii) {
                next.push_back(o + r);
                next.push_back(o - r);
            }
        std::sort(next.begin(), next.end());
        std::vector<double> uniq;
        for (double v : next)
            if (uniq.empty() || v - uniq.back() > 1e-12 * std::max(1.0, std::abs(v))) uniq.push_back(v);
        out[t] = std::move(uniq);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Iterated one-dimensional quadrature with x_0 = 0 pinned. Variable l (1..m) ranges over a
// window centred at an earlier variable, split at every point where the integrand or an
// inner integral can change its functional form.

struct Iterated {
    int m = 0;
    std::vector<int> centre;  // centre[l] < l
    double half_width = kInf;
    double lo = -kInf, hi = kInf;
    std::vector<std::vector<double>> offsets;
    double period = 0.0;
    bool exact_pieces = false;
    int smooth_points = 10;
    int smooth_panels = 3;
    std::function<double(int, const double*)> level_factor;
    std::function<double(const double*)> leaf;
    std::int64_t max_nodes = 0;
    std::int64_t nodes = 0;

    double level(int l, double* x, int delta) {
        if (l > m) {
            if (++nodes > max_nodes) throw BudgetExceeded{};
            return leaf ? leaf(x) : 1.0;
        }
        const double c = x[centre[l]];
        const double a = std::max(lo, c - half_width), b = std::min(hi, c + half_width);
        if (!(b > a)) return 0.0;
        std::vector<double> cuts{a, b};
        const auto& offs = offsets[std::min<std::size_t>(m - l + 1, offsets.size() - 1)];
        for (int u = 0; u < l; ++u)
            for (double o : offs) {
                const double base = x[u] + o;
                if (period > 0.0) {
                    const double k0 = std::ceil((a - base) / period), k1 = std::floor((b - base) / period);
                    for (double k = k0; k <= k1; k += 1.0) {
                        const double t = base + k * period;
                        if (t > a && t < b) cuts.push_back(t);
                    }
                } else if (base > a && base < b) {
                    cuts.push_back(base);
                }
            }
        std::sort(cuts.begin(), cuts.end());
        const double tol = 1e-13 * std::max(1.0, b - a);
        const int p = exact_pieces ? (m - l) / 2 + 1 + delta : smooth_points + delta;
        const int panels = exact_pieces ? 1 : smooth_panels;
        const GaussRule& rule = gauss_rule(p);
        double total = 0.0;
        double prev = cuts.front();
        for (std::size_t k = 1; k < cuts.size(); ++k) {
            if (cuts[k] - prev <= tol) continue;
            const double seg_a = prev, seg_b = cuts[k];
            prev = cuts[k];
            const double h = (seg_b - seg_a) / panels;
            for (int q = 0; q < panels; ++q) {
                const double mid = seg_a + (q + 0.5) * h;
                for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                    x[l] = mid + rule.nodes[i] * h / 2.0;
                    const double factor = level_factor ? level_factor(l, x) : 1.0;
                    if (factor == 0.0) continue;
                    total += rule.weights[i] * h / 2.0 * factor * level(l + 1, x, delta);
                }
            }
        }
        return total;
    }

    // Runs two rules and returns (value, |difference|, nodes).
    std::tuple<double, double, std::int64_t> run() {
        std::vector<double> x(m + 1, 0.0);
        nodes = 0;
        const double v0 = level(1, x.data(), 0);
        const std::int64_t used = nodes;
        nodes = 0;
        const double v1 = level(1, x.data(), exact_pieces ? 1 : -4);
        return {v0, std::abs(v0 - v1), used + nodes};
    }
};

// ---------------------------------------------------------------------------
// Radial importance kernel: piecewise-constant density on shells of [0, reach].

class RadialKernel {
public:
    RadialKernel(const std::function<double(double)>& abs_f, double reach, int d, std::vector<double> jumps) : d_(d) {
        const int bins = 48;
        std::vector<double> edges;
        for (int i = 0; i <= bins; ++i) edges.push_back(reach * i / bins);
        for (double j : jumps)
            if (j > 0 && j < reach) edges.push_back(j);
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        std::vector<double> height;
        double peak = 0.0;
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            double h = 0.0;
            for (int s = 0; s <= 8; ++s) h = std::max(h, abs_f(edges[i] + (edges[i + 1] - edges[i]) * (s + 0.5) / 9.5));
            height.push_back(h);
            peak = std::max(peak, h);
        }
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            const double vol = shell_volume(edges[i], edges[i + 1]);
            const double mass = std::max(height[i], 1e-3 * peak) * vol;
            lo_.push_back(edges[i]);
            hi_.push_back(edges[i + 1]);
            mass_.push_back(mass);
            total += mass;
        }
        for (std::size_t i = 0; i < mass_.size(); ++i) {
            prob_.push_back(mass_[i] / total);
            density_.push_back(prob_.back() / shell_volume(lo_[i], hi_[i]));
        }
        cumulative_.resize(prob_.size());
        std::partial_sum(prob_.begin(), prob_.end(), cumulative_.begin());
        cumulative_.back() = 1.0;
    }

    // Draws a displacement and returns its density.
    double sample(std::mt19937_64& rng, Point& y) const {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double u = unit(rng);
        std::size_t bin = std::lower_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin();
        bin = std::min(bin, prob_.size() - 1);
        const double a = std::pow(lo_[bin], d_), b = std::pow(hi_[bin], d_);
        const double r = std::pow(a + unit(rng) * (b - a), 1.0 / d_);
        y = Point{0.0, 0.0, 0.0};
        if (d_ == 1) {
            y[0] = unit(rng) < 0.5 ? -r : r;
        } else if (d_ == 2) {
            const double phi = 2.0 * M_PI * unit(rng);
            y[0] = r * std::cos(phi);
            y[1] = r * std::sin(phi);
        } else {
            const double z = 2.0 * unit(rng) - 1.0, phi = 2.0 * M_PI * unit(rng);
            const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
            y[0] = r * s * std::cos(phi);
            y[1] = r * s * std::sin(phi);
            y[2] = r * z;
        }
        return density_[bin];
    }

private:
    double shell_volume(double a, double b) const {
        switch (d_) {
            case 1: return 2.0 * (b - a);
            case 2: return M_PI * (b * b - a * a);
            default: return 4.0 * M_PI / 3.0 * (b * b * b - a * a * a);
        }
    }

    int d_;
    std::vector<double> lo_, hi_, mass_, prob_, density_, cumulative_;
};

// ---------------------------------------------------------------------------
// Monte Carlo over k points with x_0 = 0 pinned.

struct McSpec {
    int k = 0;
    int d = 1;
    bool ball = false;  // free space: all points inside |x| <= R; otherwise the periodic box
    double L = 1.0, R = 1.0;
    const RadialKernel* kernel = nullptr;  // importance sampling along a spanning tree
    std::vector<int> order, parent;        // sampling order and tree parent per vertex
    std::function<double(const std::vector<Point>&)> integrand;
    double scale = 1.0;
    std::vector<std::uint64_t> key;  // mixed into per-batch seeds
};

IntegralResult run_monte_carlo(const McSpec& spec, const IntegrationOptions& opt) {
    if (opt.samples < 2) throw DomainError("Monte Carlo needs at least two samples");
    const int batches = std::max(1, opt.batches);
    const std::int64_t per_batch = (opt.samples + batches - 1) / batches;
    std::vector<double> sums(batches, 0.0), squares(batches, 0.0);
    auto run_batch = [&](int b) {
        std::vector<std::uint32_t> words{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                                         static_cast<std::uint32_t>(b)};
        for (auto k : spec.key) {
            words.push_back(static_cast<std::uint32_t>(k));
            words.push_back(static_cast<std::uint32_t>(k >> 32));
        }
        std::seed_seq seq(words.begin(), words.end());
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<Point> x(spec.k, Point{0.0, 0.0, 0.0});
        double s = 0.0, s2 = 0.0;
        for (std::int64_t i = 0; i < per_batch; ++i) {
            double weight = 1.0;
            bool inside = true;
            for (int idx = 1; idx < spec.k; ++idx) {
                const int v = spec.order[idx];
                Point& q = x[v];
                if (spec.kernel) {
                    Point y;
                    weight /= spec.kernel->sample(rng, y);
                    for (int c = 0; c < 3; ++c) q[c] = x[spec.parent[v]][c] + y[c];
                    if (spec.ball && norm(q, spec.d) > spec.R) inside = false;
                } else if (spec.ball) {
                    do {
                        for (int c = 0; c < spec.d; ++c) q[c] = spec.R * (2.0 * unit(rng) - 1.0);
                    } while (norm(q, spec.d) > spec.R);
                } else {
                    for (int c = 0; c < spec.d; ++c) q[c] = spec.L * (unit(rng) - 0.5);
                }
            }
            const double value = inside ? weight * spec.integrand(x) : 0.0;
            s += value;
            s2 += value * value;
        }
        sums[b] = s;
        squares[b] = s2;
    };
    const int workers = std::max(1, std::min(opt.workers, batches));
    if (workers == 1) {
        for (int b = 0; b < batches; ++b) run_batch(b);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int b = next++; b < batches; b = next++) run_batch(b);
            });
        for (auto& t : pool) t.join();
    }
    double s = 0.0, s2 = 0.0;
    for (int b = 0; b < batches; ++b) {
        s += sums[b];
        s2 += squares[b];
    }
    const double n = double(per_batch) * batches;
    const double mean = s / n;
    const double var = std::max(0.0, s2 / n - mean * mean);
    IntegralResult out;
    out.value = spec.scale * mean;
    out.error = std::abs(spec.scale) * std::sqrt(var / (n - 1));
    out.method = spec.kernel ? Method::importance : Method::monte_carlo;
    out.samples = per_batch * batches;
    out.seed = opt.seed;
    return out;
}

// ---------------------------------------------------------------------------

// Sum over connected graphs on all k vertices of prod f, from the matrix f by
// inclusion-exclusion over vertex subsets.
double connected_part(int k, const double f[8][8]) {
    const std::uint32_t full = (1u << k) - 1u;
    std::vector<double> w(full + 1, 1.0), c(full + 1, 0.0);
    for (std::uint32_t s = 1; s <= full; ++s) {
        const int top = 31 - __builtin_clz(s);
        const std::uint32_t rest = s & ~(1u << top);
        double prod = w[rest];
        for (int j = 0; j < top; ++j)
            if ((rest >> j) & 1u) prod *= 1.0 + f[top][j];
        w[s] = prod;
    }
    for (std::uint32_t s = 1; s <= full; ++s) {
        const std::uint32_t low = s & (~s + 1u);
        double value = w[s];
        const std::uint32_t others = s & ~low;
        for (std::uint32_t t = (others - 1) & others;; t = (t - 1) & others) {
            const std::uint32_t part = t | low;
            if (part != s) value -= c[part] * w[s & ~part];
            if (t == 0) break;
        }
        c[s] = value;
    }
    return c[full];
}

std::vector<int> bfs_order(const LabeledGraph& g, std::vector<int>& parent) {
    const int k = int(g.order());
    const BitGraph b = g.dense();
    std::vector<int> order{0};
    parent.assign(k, -1);
    std::vector<bool> seen(k, false);
    seen[0] = true;
    for (std::size_t head = 0; head < order.size(); ++head) {
        const int v = order[head];
        for (int u = 0; u < k; ++u)
            if (!seen[u] && b.has_edge(v, u)) {
                seen[u] = true;
                parent[u] = v;
                order.push_back(u);
            }
    }
    return order;
}

std::vector<double> radii_of(const PairPotential& v) {
    std::vector<double> r = v.discontinuities();
    if (v.finite_range()) r.push_back(v.range());
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    return r;
}

bool piecewise_constant(const PairPotential& v) {
    return v.kind() == PotentialKind::hard_core || v.kind() == PotentialKind::square_well ||
           v.kind() == PotentialKind::zero;
}

double factorial(int n) {
    double out = 1.0;
    for (int k = 2; k <= n; ++k) out *= k;
    return out;
}

IntegralResult exact_zero() {
    IntegralResult r;
    r.method = Method::quadrature;
    return r;
}

// Graph route on the line: level factor multiplies the bonds to earlier levels.
Iterated graph_iterated(const LabeledGraph& g, const std::function<double(double)>& f, std::vector<int>& order) {
    std::vector<int> parent;
    order = bfs_order(g, parent);
    const int k = int(g.order());
    std::vector<int> level_of(k);
    for (int l = 0; l < k; ++l) level_of[order[l]] = l;
    const BitGraph b = g.dense();
    std::vector<std::vector<int>> back(k);
    for (int l = 1; l < k; ++l)
        for (int u = 0; u < l; ++u)
            if (b.has_edge(order[l], order[u])) back[l].push_back(u);
    Iterated it;
    it.m = k - 1;
    it.centre.assign(k, 0);
    for (int l = 1; l < k; ++l) it.centre[l] = level_of[parent[order[l]]];
    it.level_factor = [back, f](int l, const double* x) {
        double prod = 1.0;
        for (int u : back[l]) {
            prod *= f(x[l] - x[u]);
            if (prod == 0.0) break;
        }
        return prod;
    };
    return it;
}

}  // namespace

std::string to_string(Method m) {
    switch (m) {
        case Method::automatic: return "auto";
        case Method::quadrature: return "quadrature";
        case Method::monte_carlo: return "monte-carlo";
        case Method::importance: return "importance";
    }
    return "?";
}

Method parse_method(const std::string& text) {
    if (text == "auto" || text == "automatic") return Method::automatic;
    if (text == "quadrature") return Method::quadrature;
    if (text == "mc" || text == "monte-carlo" || text == "monte_carlo") return Method::monte_carlo;
    if (text == "importance") return Method::importance;
    throw DomainError("unknown integration method '" + text + "'");
}

std::string IntegralResult::record() const {
    return "value=" + format_number(value) + ";error=" + format_number(error) + ";method=" + to_string(method) +
           ";samples=" + std::to_string(samples) + ";seed=" + std::to_string(seed);
}

const std::map<IsoKey, std::int64_t>& connected_class_counts(int n) {
    if (n < 1 || n > kMaxActivityOrder) throw SizeLimitError("class tables cover 1 <= n <= 6");
    static std::array<std::map<IsoKey, std::int64_t>, kMaxActivityOrder + 1> tables;
    static std::array<std::once_flag, kMaxActivityOrder + 1> flags;
    std::call_once(flags[n], [n] {
        for_each_graph(n, [&](const LabeledGraph& g) {
            if (is_connected(g)) ++tables[n][canonical_form(g)];
        });
    });
    return tables[n];
}

const std::map<IsoKey, std::int64_t>& two_connected_class_counts(int n) {
    if (n < 2 || n > kMaxActivityOrder) throw SizeLimitError("class tables cover 2 <= n <= 6");
    static std::array<std::map<IsoKey, std::int64_t>, kMaxActivityOrder + 1> tables;
    static std::array<std::once_flag, kMaxActivityOrder + 1> flags;
    std::call_once(flags[n], [n] {
        for (const auto& [key, count] : connected_class_counts(n))
            if (is_two_connected(from_iso_key(key))) tables[n][key] = count;
    });
    return tables[n];
}

ClusterIntegrator::ClusterIntegrator(PeriodicPotential vper, double beta, IntegrationOptions options)
    : vper_(std::move(vper)), beta_(beta), options_(options) {
    if (!(beta > 0)) throw DomainError("beta must be positive");
}

std::size_t ClusterIntegrator::cache_size() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
}

IntegralResult ClusterIntegrator::zeta_tilde(const LabeledGraph& g) {
    if (!is_connected(g)) throw DomainError("zeta~ needs a connected graph");
    if (g.order() < 2 || g.order() > kMaxActivityOrder) throw SizeLimitError("zeta~ covers 2 <= |g| <= 6");
    const IsoKey key = canonical_form(g);
    {
        std::lock_guard lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    IntegralResult r = compute(from_iso_key(key), options_.method);
    std::lock_guard lock(mutex_);
    return cache_.emplace(key, r).first->second;
}

IntegralResult ClusterIntegrator::zeta_tilde_with(const LabeledGraph& g, Method method) {
    if (!is_connected(g)) throw DomainError("zeta~ needs a connected graph");
    if (g.order() < 2 || g.order() > kMaxActivityOrder) throw SizeLimitError("zeta~ covers 2 <= |g| <= 6");
    return compute(g, method);
}

IntegralResult ClusterIntegrator::single_edge_integral() const {
    const auto q = mayer_box_integral(vper_, beta_, false);
    IntegralResult r;
    r.value = q.value;
    r.error = q.error;
    r.method = Method::quadrature;
    return r;
}

double ClusterIntegrator::tree_weight_closed_form(const LabeledGraph& tree) const {
    if (!is_tree(tree)) throw DomainError("closed form applies to trees only");
    if (tree.order() == 1) return 1.0;
    const double edge = single_edge_integral().value / box().volume();
    return std::pow(edge, double(tree.order() - 1));
}

IntegralResult ClusterIntegrator::compute(const LabeledGraph& g, Method method) const {
    const PairPotential& v = vper_.base();
    const BoxGeometry& bx = box();
    const int k = int(g.order());
    if (v.kind() == PotentialKind::zero) return exact_zero();

    const bool finite_reach = v.finite_range() && vper_.nearest_image();
    const bool tree = is_tree(g);

    auto closed_form = [&] {
        IntegralResult r = single_edge_integral();
        const double e = r.value / bx.volume();
        const double m = k - 1;
        IntegralResult out;
        out.value = std::pow(e, m);
        out.error = m * std::pow(std::abs(e), m - 1) * r.error / bx.volume();
        out.method = Method::quadrature;
        out.samples = 1;
        return out;
    };

    auto quadrature_1d = [&]() -> IntegralResult {
        std::vector<int> order;
        auto f = [this](double x) { return vper_.mayer_f_1d(beta_, x); };
        Iterated it = graph_iterated(g, f, order);
        it.half_width = finite_reach ? v.range() : bx.L / 2.0;
        it.period = bx.L;
        it.offsets = radius_combinations(radii_of(v), k);
        it.exact_pieces = piecewise_constant(v);
        it.smooth_points = options_.smooth_points;
        it.smooth_panels = options_.smooth_panels;
        it.max_nodes = options_.max_quadrature_nodes;
        const auto [value, diff, nodes] = it.run();
        IntegralResult out;
        const double norm = std::pow(bx.L, k - 1);
        out.value = value / norm;
        out.error = diff / norm;
        out.method = Method::quadrature;
        out.samples = nodes;
        return out;
    };

    auto monte_carlo = [&](bool importance) {
        McSpec spec;
        spec.k = k;
        spec.d = bx.d;
        spec.L = bx.L;
        spec.order = bfs_order(g, spec.parent);
        const BitGraph b = g.dense();
        const IsoKey key = canonical_form(g);
        spec.key = {0x7a657461u, std::uint64_t(key.order), key.edges};
        const PeriodicPotential& vp = vper_;
        const double beta = beta_;
        spec.integrand = [&, k](const std::vector<Point>& x) {
            double prod = 1.0;
            for (int i = 0; i < k && prod != 0.0; ++i)
                for (int j = i + 1; j < k; ++j)
                    if (b.has_edge(i, j)) {
                        const Point diff{x[i][0] - x[j][0], x[i][1] - x[j][1], x[i][2] - x[j][2]};
                        prod *= vp.mayer_f(beta, diff);
                        if (prod == 0.0) break;
                    }
            return prod;
        };
        std::optional<RadialKernel> kernel;
        if (importance) {
            if (!finite_reach) throw DomainError("importance sampling needs a finite range within half the box");
            kernel.emplace([&](double r) { return std::abs(v.mayer_f(beta, r)); }, v.range(), bx.d, radii_of(v));
            spec.kernel = &*kernel;
            spec.scale = std::pow(bx.volume(), -(k - 1));
        }
        return run_monte_carlo(spec, options_);
    };

    switch (method) {
        case Method::monte_carlo: return monte_carlo(false);
        case Method::importance: return monte_carlo(true);
        case Method::quadrature:
            if (bx.d == 1) {
                try {
                    return quadrature_1d();
                } catch (const BudgetExceeded&) {
                    throw SizeLimitError("quadrature node budget exceeded");
                }
            }
            if (tree) return closed_form();
            return monte_carlo(finite_reach);
        case Method::automatic:
            if (tree) return closed_form();
            if (bx.d == 1) {
                try {
                    return quadrature_1d();
                } catch (const BudgetExceeded&) {
                    return monte_carlo(finite_reach);
                }
            }
            return monte_carlo(finite_reach);
    }
    return exact_zero();
}

IntegralResult ClusterIntegrator::zeta_vertex(int n, VertexRoute route) {
    if (n < 2 || n > kMaxActivityOrder) throw SizeLimitError("zeta(V) covers 2 <= |V| <= 6");
    const PairPotential& v = vper_.base();
    const BoxGeometry& bx = box();
    if (v.kind() == PotentialKind::zero) return exact_zero();
    if (route == VertexRoute::graph_sum) {
        IntegralResult out;
        out.method = Method::quadrature;
        out.seed = options_.seed;
        for (const auto& [key, count] : connected_class_counts(n)) {
            const IntegralResult r = zeta_tilde(from_iso_key(key));
            out.value += double(count) * r.value;
            out.error += double(count) * r.error;
            out.samples += r.samples;
            if (r.method != Method::quadrature) out.method = r.method;
        }
        return out;
    }

    const PeriodicPotential& vp = vper_;
    const double beta = beta_;
    auto mc = [&] {
        McSpec spec;
        spec.k = n;
        spec.d = bx.d;
        spec.L = bx.L;
        spec.order.resize(n);
        std::iota(spec.order.begin(), spec.order.end(), 0);
        spec.parent.assign(n, 0);
        spec.key = {0x76657274u, std::uint64_t(n)};
        spec.integrand = [&, n](const std::vector<Point>& x) {
            double f[8][8];
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < i; ++j) {
                    const Point diff{x[i][0] - x[j][0], x[i][1] - x[j][1], x[i][2] - x[j][2]};
                    f[i][j] = f[j][i] = vp.mayer_f(beta, diff);
                }
            return connected_part(n, f);
        };
        return run_monte_carlo(spec, options_);
    };
    if (bx.d != 1 || options_.method == Method::monte_carlo || options_.method == Method::importance) return mc();

    const bool finite_reach = v.finite_range() && vper_.nearest_image();
    Iterated it;
    it.m = n - 1;
    it.centre.assign(n, 0);
    it.half_width = finite_reach ? std::min(bx.L / 2.0, (n - 1) * v.range()) : bx.L / 2.0;
    it.period = bx.L;
    it.offsets = radius_combinations(radii_of(v), n);
    it.exact_pieces = piecewise_constant(v);
    it.smooth_points = options_.smooth_points;
    it.smooth_panels = options_.smooth_panels;
    it.max_nodes = options_.max_quadrature_nodes;
    it.leaf = [&, n](const double* x) {
        double f[8][8];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < i; ++j) f[i][j] = f[j][i] = vp.mayer_f_1d(beta, x[i] - x[j]);
        return connected_part(n, f);
    };
    try {
        const auto [value, diff, nodes] = it.run();
        IntegralResult out;
        const double norm = std::pow(bx.L, n - 1);
        out.value = value / norm;
        out.error = diff / norm;
        out.samples = nodes;
        out.method = Method::quadrature;
        return out;
    } catch (const BudgetExceeded&) {
        if (options_.method == Method::quadrature) throw SizeLimitError("quadrature node budget exceeded");
        return mc();
    }
}

double ClusterIntegrator::tree_graph_bound(int n, double a) const {
    if (n < 1) throw DomainError("tree-graph bound needs n >= 1");
    const BoxGeometry& bx = box();
    const double c = c_beta_box(vper_, beta_).value;
    const double B = vper_.base().stability_B(bx.d);
    return std::pow(double(n), n - 2) * std::pow(bx.volume(), -(n - 1)) * std::exp((2.0 * beta_ * B + a) * n) *
           std::pow(c, n - 1);
}

IntegralResult ClusterIntegrator::b_n_connected(int n) {
    if (n < 1 || n > 5) throw SizeLimitError("b_n covers 1 <= n <= 5");
    if (n == 1) {
        IntegralResult one;
        one.value = 1.0;
        return one;
    }
    IntegralResult z = zeta_vertex(n);
    const double scale = std::pow(box().volume(), n - 1) / factorial(n);
    z.value *= scale;
    z.error *= scale;
    return z;
}

IntegralResult beta_n(int n, const PairPotential& v, double beta, int d, const IntegrationOptions& options,
                      double domain_radius) {
    if (n < 1 || n > 4) throw SizeLimitError("beta_n covers 1 <= n <= 4");
    if (!(beta > 0)) throw DomainError("beta must be positive");
    if (d < 1 || d > 3) throw DomainError("dimension must be 1, 2 or 3");
    if (v.kind() == PotentialKind::zero) return exact_zero();

    const double sup = v.mayer_sup(beta);
    const double c = c_beta(v, beta, d).value;
    const auto& classes = two_connected_class_counts(n + 1);
    // If some point leaves the ball, a spanning-tree edge is longer than R / n.
    auto tail_bound = [&](double R) {
        const double far = mayer_radial_integral(v, beta, d, true, R / n).value;
        double total = 0.0;
        for (const auto& [key, count] : classes) {
            const int extra = __builtin_popcountll(key.edges) - n;
            total += double(count) * n * far * std::pow(c, n - 1) * std::pow(sup, extra);
        }
        return total / factorial(n);
    };
    double R = domain_radius;
    if (R <= 0.0) {
        if (v.finite_range()) {
            R = n * v.range();
        } else {
            const double scale = 1.0 / std::sqrt(v.params().at("alpha"));
            R = n * scale;
            while (tail_bound(R) > 1e-14 && R < 1e3 * n * scale) R *= 1.25;
        }
    }
    const double tail = tail_bound(R);
    if (!(tail <= 1e-8)) throw ConvergenceError("beta_n truncation tail not certified at radius " + format_number(R));

    const bool finite = v.finite_range();
    const Method method = options.method;
    IntegralResult out;
    out.method = Method::quadrature;
    out.seed = options.seed;
    for (const auto& [key, count] : classes) {
        const LabeledGraph g = from_iso_key(key);
        IntegralResult r;
        const bool use_quadrature =
            method == Method::quadrature || (method == Method::automatic && (d == 1 || n == 1));
        if (use_quadrature && n == 1) {
            const auto q = mayer_radial_integral(v, beta, d, false);
            const double outside = mayer_radial_integral(v, beta, d, false, R).value;
            r.value = q.value - outside;
            r.error = q.error;
            r.method = Method::quadrature;
        } else if (use_quadrature && d == 1) {
            std::vector<int> order;
            auto f = [&](double x) { return v.mayer_f(beta, x); };
            Iterated it = graph_iterated(g, f, order);
            it.half_width = finite ? v.range() : 2.0 * R;
            it.lo = -R;
            it.hi = R;
            it.offsets = radius_combinations(radii_of(v), n + 1);
            it.exact_pieces = piecewise_constant(v);
            it.smooth_points = options.smooth_points;
            it.smooth_panels = options.smooth_panels;
            it.max_nodes = options.max_quadrature_nodes;
            try {
                const auto [value, diff, nodes] = it.run();
                r.value = value;
                r.error = diff;
                r.samples = nodes;
            } catch (const BudgetExceeded&) {
                throw SizeLimitError("quadrature node budget exceeded");
            }
        } else {
            McSpec spec;
            spec.k = n + 1;
            spec.d = d;
            spec.ball = true;
            spec.R = R;
            spec.order = bfs_order(g, spec.parent);
            spec.key = {0x62657461u, std::uint64_t(n), key.edges};
            const BitGraph b = g.dense();
            const int k = n + 1;
            spec.integrand = [&, k](const std::vector<Point>& x) {
                double prod = 1.0;
                for (int i = 0; i < k && prod != 0.0; ++i)
                    for (int j = i + 1; j < k; ++j)
                        if (b.has_edge(i, j)) {
                            const Point diff{x[i][0] - x[j][0], x[i][1] - x[j][1], x[i][2] - x[j][2]};
                            prod *= v.mayer_f(beta, norm(diff, d));
                            if (prod == 0.0) break;
                        }
                return prod;
            };
            std::optional<RadialKernel> kernel;
            if (method == Method::importance) {
                if (!finite) throw DomainError("importance sampling needs a finite-range potential");
                kernel.emplace([&](double r0) { return std::abs(v.mayer_f(beta, r0)); }, v.range(), d, radii_of(v));
                spec.kernel = &*kernel;
            } else {
                const double unit_ball = d == 1 ? 2.0 : d == 2 ? M_PI : 4.0 * M_PI / 3.0;
                spec.scale = std::pow(unit_ball * std::pow(R, d), n);
            }
            r = run_monte_carlo(spec, options);
        }
        out.value += double(count) * r.value;
        out.error += double(count) * r.error;
        out.samples += r.samples;
        if (r.method != Method::quadrature) out.method = r.method;
    }
    out.value /= factorial(n);
    out.error = out.error / factorial(n) + tail;
    return out;
}

}  // namespace canex
