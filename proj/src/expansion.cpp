#include "canex/expansion.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "canex/format.hpp"

namespace canex {

namespace {

constexpr double kInfinity() { return std::numeric_limits<double>::infinity(); }

template <class W>
W from_rational(const Rational& r) {
    if constexpr (std::is_same_v<W, double>)
        return to_double(r);
    else
        return r;
}

template <class W>
W power(const W& base, int k) {
    W out(1);
    for (int i = 0; i < k; ++i) out *= base;
    return out;
}

double log_binomial(int n, int k) { return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0); }

std::int64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::int64_t out = 1;
    for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
    return out;
}

double kp_L(double delta) {
    if (delta == 0.0) return 1.0;
    return delta > 0.0 && delta < 1.0 ? -std::log1p(-delta) / delta : kInfinity();
}

LabeledGraph relabel(const LabeledGraph& g, const std::vector<Label>& labels) {
    std::vector<Label> vertices;
    for (Label v : g.vertices()) vertices.push_back(labels[v - 1]);
    std::vector<Edge> edges;
    for (auto [i, j] : g.edges()) edges.emplace_back(labels[i - 1], labels[j - 1]);
    return LabeledGraph(std::move(vertices), std::move(edges));
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
    return out;
}

}  // namespace

const GraphPolymerTable& graph_polymer_table(int vertices) {
    if (vertices < 2 || vertices > kMaxGraphPolymerVertices) throw SizeLimitError("graph polymers cover 2..5 labels");
    static std::array<GraphPolymerTable, kMaxGraphPolymerVertices + 1> tables;
    static std::array<std::once_flag, kMaxGraphPolymerVertices + 1> flags;
    std::call_once(flags[vertices], [vertices] {
        GraphPolymerTable& t = tables[vertices];
        t.vertices = vertices;
        std::vector<std::string> names;
        std::vector<std::uint64_t> supports;
        for (std::uint32_t mask = 1; mask < (1u << vertices); ++mask) {
            const int k = std::popcount(mask);
            if (k < 2) continue;
            std::vector<Label> labels;
            for (int b = 0; b < vertices; ++b)
                if ((mask >> b) & 1u) labels.push_back(b + 1);
            for_each_graph(k, [&](const LabeledGraph& g) {
                if (!is_connected(g)) return;
                LabeledGraph h = relabel(g, labels);
                names.push_back(h.to_string());
                supports.push_back(h.support_mask());
                t.classes.push_back(canonical_form(h));
                t.cost.push_back(k);
                t.graphs.push_back(std::move(h));
            });
        }
        t.space = PolymerSpace::from_supports(std::move(names), std::move(supports));
    });
    return tables[vertices];
}

const std::vector<CoveringCluster>& covering_clusters(int n, int M) {
    if (n < 1 || n + 1 > kMaxGraphPolymerVertices) throw SizeLimitError("covering clusters cover 1 <= n <= 4");
    if (M < n + 1 || M > kMaxUrsellOrder) throw DomainError("truncation M must satisfy n+1 <= M <= 8");
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::vector<CoveringCluster>> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find({n, M});
    if (it != cache.end()) return it->second;
    const GraphPolymerTable& table = graph_polymer_table(n + 1);
    const std::uint64_t full = (std::uint64_t{1} << (n + 1)) - 1;
    std::vector<CoveringCluster> out;
    for_each_cluster(table.space, table.cost, M, [&](const MultiIndex& index) {
        if (index.union_support(table.space) != full) return;
        CoveringCluster cl;
        cl.index = index;
        cl.coefficient = ursell_coefficient(index, table.space);
        int spent = 0;
        bool single = true;
        for (auto [p, m] : index.entries()) {
            spent += m * (table.cost[p] - 1);
            if (m > 1) single = false;
        }
        cl.volume_power = n - spent;
        cl.tree_like = single && cl.volume_power == 0;
        out.push_back(std::move(cl));
    });
    return cache.emplace(std::make_pair(n, M), std::move(out)).first->second;
}

template <class W>
GraphClusterSum<W> covering_cluster_sum(int n, int M, const std::function<W(const IsoKey&)>& weight) {
    const auto& clusters = covering_clusters(n, M);
    const GraphPolymerTable& table = graph_polymer_table(n + 1);
    std::map<IsoKey, W> by_class;
    std::vector<W> w(table.graphs.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        auto it = by_class.find(table.classes[i]);
        if (it == by_class.end()) it = by_class.emplace(table.classes[i], weight(table.classes[i])).first;
        w[i] = it->second;
    }
    GraphClusterSum<W> out;
    for (const auto& cl : clusters) {
        W term = from_rational<W>(cl.coefficient);
        for (auto [p, m] : cl.index.entries()) term *= power(w[p], m);
        out.value += term;
        out.by_volume_power[cl.volume_power] += term;
        ++out.terms;
    }
    return out;
}

PFactor p_factor(int N, double volume, int n) {
    if (N < 1 || n < 0) throw DomainError("p_factor needs N >= 1 and n >= 0");
    if (!(volume > 0)) throw DomainError("volume must be positive");
    PFactor out;
    if (n >= N) {
        out.vanishes = true;
        return out;
    }
    double value = 1.0;
    for (int k = 1; k <= n; ++k) value *= (N - k) / volume;
    out.value = value;
    return out;
}

BFactor b_factor(int n, int M, ClusterIntegrator& integrator) {
    const auto& clusters = covering_clusters(n, M);
    const GraphPolymerTable& table = graph_polymer_table(n + 1);
    std::map<IsoKey, IntegralResult> results;
    for (const auto& key : table.classes)
        if (!results.count(key)) results.emplace(key, integrator.zeta_tilde(from_iso_key(key)));
    BFactor out;
    double sum = 0.0, error = 0.0;
    for (const auto& cl : clusters) {
        const double c = to_double(cl.coefficient);
        double term = c;
        for (auto [p, m] : cl.index.entries()) term *= std::pow(results.at(table.classes[p]).value, m);
        double d_term = 0.0;
        for (auto [p, m] : cl.index.entries()) {
            double partial = std::abs(c) * m * results.at(table.classes[p]).error *
                             std::pow(std::abs(results.at(table.classes[p]).value), m - 1);
            for (auto [q, k] : cl.index.entries())
                if (q != p) partial *= std::pow(std::abs(results.at(table.classes[q]).value), k);
            d_term += partial;
        }
        sum += term;
        error += d_term;
        out.by_volume_power[cl.volume_power] += term;
    }
    double scale = 1.0;
    for (int k = 1; k <= n; ++k) scale *= integrator.box().volume() / k;
    out.value = scale * sum;
    out.error = scale * error;
    for (auto& [power, value] : out.by_volume_power) value *= scale;
    out.terms = clusters.size();
    for (const auto& [key, r] : results)
        out.provenance.push_back("class=" + from_iso_key(key).to_string() + ";" + r.record());
    return out;
}

template <class W>
W vertex_route_f(int N, int n, int M, const std::function<W(const IsoKey&)>& weight) {
    if (N < 2 || N > kMaxActivityOrder) throw SizeLimitError("vertex route covers 2 <= N <= 6");
    if (n < 1 || n >= N) throw DomainError("vertex route needs 1 <= n < N");
    if (M < n + 1 || M > kMaxUrsellOrder) throw DomainError("truncation M must satisfy n+1 <= M <= 8");
    std::vector<std::string> names;
    std::vector<std::uint64_t> supports;
    std::vector<W> zeta;
    std::vector<int> cost;
    std::map<int, W> zeta_by_size;
    for (int k = 2; k <= N; ++k) {
        W total{};
        for (const auto& [key, count] : connected_class_counts(k)) total += W(count) * weight(key);
        zeta_by_size[k] = total;
    }
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << N); ++mask) {
        const int k = std::popcount(mask);
        if (k < 2) continue;
        names.push_back(std::to_string(mask));
        supports.push_back(mask);
        zeta.push_back(zeta_by_size[k]);
        cost.push_back(k);
    }
    const auto space = PolymerSpace::from_supports(names, supports);
    W total{};
    for_each_cluster(space, cost, M, [&](const MultiIndex& index) {
        const std::uint64_t u = index.union_support(space);
        if (!(u & 1u) || std::popcount(u) != n + 1) return;
        W term = from_rational<W>(ursell_coefficient(index, space));
        for (auto [p, m] : index.entries()) term *= power(zeta[p], m);
        total += term;
    });
    return total / W(n + 1);
}

template <class W>
W graph_route_f(int N, int n, int M, const std::function<W(const IsoKey&)>& weight) {
    if (n >= N) return W{};
    const W sum = covering_cluster_sum<W>(n, M, weight).value;
    return W(binomial(N - 1, n)) * sum / W(n + 1);
}

Rational restricted_cluster_sum(const LabeledGraph& g, int M, const std::vector<Rational>& block_weights) {
    if (!is_connected(g) || g.order() < 2) throw DomainError("restricted cluster sum needs a connected graph");
    if (M < 1 || M > kMaxUrsellOrder) throw DomainError("truncation must lie in 1..8");
    const BlockTree bt = block_decomposition(g);
    const std::size_t k = bt.blocks.size();
    std::vector<Rational> w = block_weights;
    if (w.empty())
        for (std::size_t i = 0; i < k; ++i) w.push_back(Rational(int(i) + 2, 3 * int(i) + 7));
    if (w.size() != k) throw DomainError("one weight per block required");

    std::vector<std::string> block_names;
    std::vector<std::uint64_t> block_supports;
    for (std::size_t i = 0; i < k; ++i) {
        block_names.push_back("b" + std::to_string(i + 1));
        block_supports.push_back(bt.blocks[i].support_mask());
    }
    const auto blocks = PolymerSpace::from_supports(block_names, block_supports);
    std::vector<std::size_t> all(k);
    for (std::size_t i = 0; i < k; ++i) all[i] = i;

    std::vector<std::string> names;
    std::vector<std::uint64_t> supports, block_sets;
    std::vector<int> cost;
    std::vector<Rational> weight;
    for (const auto& subset : incompatible_subsets(blocks, all)) {
        std::uint64_t support = 0, set = 0;
        int c = 0;
        Rational prod(1);
        std::vector<std::string> parts;
        for (std::size_t b : subset) {
            support |= block_supports[b];
            set |= std::uint64_t{1} << b;
            c += int(bt.blocks[b].order());
            prod *= w[b];
            parts.push_back(block_names[b]);
        }
        names.push_back("{" + join(parts, ",") + "}");
        supports.push_back(support);
        block_sets.push_back(set);
        cost.push_back(c);
        weight.push_back(prod);
    }
    const auto space = PolymerSpace::from_supports(names, supports);
    const std::uint64_t every = (k == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << k) - 1);
    Rational total(0);
    for_each_cluster(space, cost, M, [&](const MultiIndex& index) {
        std::uint64_t covered = 0;
        for (auto [p, m] : index.entries()) covered |= block_sets[p];
        if (covered != every) return;
        Rational term = ursell_coefficient(index, space);
        for (auto [p, m] : index.entries()) term *= power(weight[p], m);
        total += term;
    });
    return total;
}

void ExpansionParams::validate() const {
    if (N < 1) throw DomainError("N must be at least 1");
    if (!(box.L > 0)) throw DomainError("box side L must be positive");
    if (!(beta > 0)) throw DomainError("beta must be positive");
    if (n_max < 1) throw DomainError("n_max must be at least 1");
    if (M < n_max + 1) throw DomainError("M must be at least n_max + 1");
    if (M > kMaxUrsellOrder) throw SizeLimitError("M must be at most 8");
    if (std::min(n_max, N - 1) + 1 > kMaxGraphPolymerVertices)
        throw SizeLimitError("orders below N are limited to n <= 4");
    if (!(a > 0)) throw DomainError("convergence parameter a must be positive");
    if (!(c > 0)) throw DomainError("convergence parameter c must be positive");
    if (lattice_cutoff < 1) throw DomainError("lattice_cutoff must be at least 1");
}

std::vector<std::string> ExpansionParams::describe() const {
    return {"potential=" + potential.name(),
            "d=" + std::to_string(box.d),
            "L=" + format_number(box.L),
            "N=" + std::to_string(N),
            "rho=" + format_number(rho()),
            "beta=" + format_number(beta),
            "lattice_cutoff=" + std::to_string(lattice_cutoff),
            "n_max=" + std::to_string(n_max),
            "M=" + std::to_string(M),
            "a=" + format_number(a),
            "c=" + format_number(c),
            "method=" + to_string(integration.method),
            "samples=" + std::to_string(integration.samples),
            "seed=" + std::to_string(integration.seed),
            "workers=" + std::to_string(integration.workers)};
}

double ExpansionCertificate::L() const {
    if (analytic_holds) return analytic_L;
    return numeric_L;
}

std::string ExpansionCertificate::source() const {
    if (analytic_holds) return "analytic";
    if (numeric_holds) return "numeric";
    return "none";
}

ExpansionCertificate expansion_certificate(const ExpansionParams& params, const ClusterIntegrator& integrator) {
    const PairPotential& v = params.potential;
    const int d = params.box.d;
    const double B = v.stability_B(d);
    const double beta = params.beta;
    const double rho = params.rho();
    const double a = params.a, alpha = params.alpha();
    const double C = c_beta(v, beta, d).value;
    const double C_box = c_beta_box(integrator.potential(), beta).value;
    const double volume = params.box.volume();

    ExpansionCertificate cert;
    cert.delta = 0.5 * rho * C * std::exp(2.0 * (2.0 * beta * B + a));
    cert.delta_prime = rho * std::exp(2.0 * beta * B + alpha + 1.0) * C;
    cert.density_margin = 1.0 - cert.delta_prime;
    cert.analytic_L = kp_L(cert.delta);
    cert.analytic_holds = cert.delta < 1.0 && cert.delta_prime < 1.0 &&
                          rho * std::exp(2.0 * beta * B + a) * C_box < 1.0 &&
                          std::exp(1.0) * cert.delta / (1.0 - cert.delta_prime) <= 1.0 / cert.analytic_L;

    // log of the tree-graph bound on |zeta(V)| for |V| = k
    auto log_bound = [&](int k) {
        if (C_box == 0.0) return -kInfinity();
        return (k - 2) * std::log(double(k)) - (k - 1) * std::log(volume) + 2.0 * beta * B * k +
               (k - 1) * std::log(C_box);
    };
    double max_small = 0.0, neighbours = 0.0;
    for (int k = 2; k <= params.N; ++k) {
        max_small = std::max(max_small, std::exp(log_bound(k) + a * k));
        neighbours += std::exp(log_binomial(params.N - 1, k - 1) + log_bound(k) + alpha * k);
    }
    cert.numeric_delta = max_small;
    cert.numeric_L = max_small == 0.0 ? 1.0 : kp_L(max_small);
    cert.neighbour_sum = neighbours;
    cert.neighbour_limit = a / cert.numeric_L;
    cert.numeric_holds = max_small < 1.0 && neighbours <= cert.neighbour_limit;
    return cert;
}

SeriesRow f_coefficient(const ExpansionParams& params, int n, ClusterIntegrator& integrator,
                        const ExpansionCertificate& certificate) {
    SeriesRow row;
    row.n = n;
    const PFactor P = p_factor(params.N, params.box.volume(), n);
    row.P = P.value;
    row.P_vanishes = P.vanishes;
    const double envelope = certificate.holds() ? certificate.L() * std::exp(params.alpha()) : kInfinity();
    row.decay_bound = envelope * std::exp(-params.c * n);
    row.truncation_bound = envelope * std::exp(-0.5 * params.c * (n + params.M));
    if (P.vanishes) {
        row.truncation_bound = 0.0;
        return row;
    }
    const BFactor B = b_factor(n, params.M, integrator);
    row.B = B.value;
    row.B_error = B.error;
    row.F = P.value * B.value / (n + 1);
    row.F_error = P.value * B.error / (n + 1);
    row.terms = B.terms;
    return row;
}

SeriesReport log_Z_canonical(const ExpansionParams& params) {
    params.validate();
    ClusterIntegrator integrator(periodize(params.potential, params.box, params.lattice_cutoff), params.beta,
                                 params.integration);
    SeriesReport report;
    report.header = params.describe();
    report.certificate = expansion_certificate(params, integrator);
    report.uncertified = !report.certificate.holds();

    // Shared activities first, so the per-order work below is pure arithmetic.
    const int top = std::min(params.n_max, params.N - 1);
    if (top >= 1) {
        for (const auto& key : graph_polymer_table(top + 1).classes) (void)integrator.zeta_tilde(from_iso_key(key));
        for (int n = 1; n <= top; ++n) (void)covering_clusters(n, params.M);
    }

    report.rows.resize(params.n_max);
    const int workers = std::max(1, std::min(params.integration.workers, params.n_max));
    std::atomic<int> next{1};
    auto work = [&] {
        for (int n = next++; n <= params.n_max; n = next++)
            report.rows[n - 1] = f_coefficient(params, n, integrator, report.certificate);
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    const double V = params.box.volume();
    const double rho = params.rho();
    report.ideal_term = (params.N * std::log(V) - std::lgamma(params.N + 1.0)) / V;
    double sum = 0.0, err = 0.0, trunc = 0.0;
    for (const auto& row : report.rows) {
        sum += row.F;
        err += row.F_error;
        trunc += row.truncation_bound;
    }
    report.series_sum = rho * sum;
    report.log_Z_per_volume = report.ideal_term + report.series_sum;
    report.integration_error = rho * err;
    report.truncation_bound = rho * trunc;
    if (params.n_max >= params.N - 1) {
        report.order_tail_bound = 0.0;
    } else if (report.certificate.holds()) {
        const double env = report.certificate.L() * std::exp(params.alpha());
        report.order_tail_bound = rho * env * std::exp(-params.c * (params.n_max + 1)) / (1.0 - std::exp(-params.c));
    } else {
        report.order_tail_bound = kInfinity();
    }
    std::set<std::string> seen;
    for (int n = 1; n <= top; ++n)
        for (const auto& key : graph_polymer_table(n + 1).classes) {
            if (!seen.insert(from_iso_key(key).to_string()).second) continue;
            report.provenance.push_back("class=" + from_iso_key(key).to_string() + ";" +
                                        integrator.zeta_tilde(from_iso_key(key)).record());
        }
    return report;
}

std::string SeriesReport::to_csv() const {
    std::ostringstream out;
    for (const auto& h : header) out << "# " << h << "\n";
    out << "# certificate=" << certificate.source() << "\n";
    out << "n,P,P_vanishes,B,B_error,F,F_error,truncation_bound,decay_bound\n";
    for (const auto& r : rows)
        out << r.n << ',' << format_number(r.P) << ',' << (r.P_vanishes ? 1 : 0) << ',' << format_number(r.B) << ','
            << format_number(r.B_error) << ',' << format_number(r.F) << ',' << format_number(r.F_error) << ','
            << format_number(r.truncation_bound) << ',' << format_number(r.decay_bound) << "\n";
    return out.str();
}

std::string SeriesReport::to_records() const {
    std::ostringstream out;
    out << "input;" << join(header, ";") << "\n";
    const auto& c = certificate;
    out << "certificate;source=" << c.source() << ";delta=" << format_number(c.delta)
        << ";delta_prime=" << format_number(c.delta_prime) << ";density_margin=" << format_number(c.density_margin)
        << ";analytic_L=" << format_number(c.analytic_L) << ";analytic_holds=" << c.analytic_holds
        << ";numeric_delta=" << format_number(c.numeric_delta) << ";numeric_L=" << format_number(c.numeric_L)
        << ";neighbour_sum=" << format_number(c.neighbour_sum) << ";neighbour_limit=" << format_number(c.neighbour_limit)
        << ";numeric_holds=" << c.numeric_holds << "\n";
    for (const auto& r : rows)
        out << "order;n=" << r.n << ";P=" << format_number(r.P) << ";P_vanishes=" << r.P_vanishes
            << ";B=" << format_number(r.B) << ";B_error=" << format_number(r.B_error) << ";F=" << format_number(r.F)
            << ";F_error=" << format_number(r.F_error) << ";truncation_bound=" << format_number(r.truncation_bound)
            << ";decay_bound=" << format_number(r.decay_bound) << ";terms=" << r.terms << "\n";
    out << "summary;ideal_term=" << format_number(ideal_term) << ";series_sum=" << format_number(series_sum)
        << ";log_Z_per_volume=" << format_number(log_Z_per_volume)
        << ";integration_error=" << format_number(integration_error)
        << ";truncation_bound=" << format_number(truncation_bound)
        << ";order_tail_bound=" << format_number(order_tail_bound) << ";uncertified=" << uncertified << "\n";
    for (const auto& p : provenance) out << "provenance;" << p << "\n";
    return out.str();
}

IntegralResult pressure_activity_series(double z, int orders, ClusterIntegrator& integrator) {
    if (orders < 1 || orders > 5) throw SizeLimitError("activity series covers 1..5 orders");
    if (!(z >= 0)) throw DomainError("activity must be non-negative");
    IntegralResult out;
    out.seed = integrator.options().seed;
    double zn = 1.0;
    for (int n = 1; n <= orders; ++n) {
        zn *= z;
        const IntegralResult b = integrator.b_n_connected(n);
        out.value += b.value * zn;
        out.error += b.error * zn;
        out.samples += b.samples;
        if (b.method != Method::quadrature) out.method = b.method;
    }
    return out;
}

namespace {
void check_coefficients(const std::vector<double>& beta_coeffs, int m_max) {
    if (m_max < 0) throw DomainError("series order must be non-negative");
    if (std::size_t(m_max) > beta_coeffs.size()) throw DomainError("not enough irreducible coefficients supplied");
}
}  // namespace

double activity_inversion(double rho, const std::vector<double>& beta_coeffs, int orders) {
    check_coefficients(beta_coeffs, orders);
    if (!(rho > 0)) throw DomainError("density must be positive");
    double exponent = 0.0, rm = 1.0;
    for (int m = 1; m <= orders; ++m) {
        rm *= rho;
        exponent += beta_coeffs[m - 1] * rm;
    }
    return rho * std::exp(-exponent);
}

double virial_pressure(double rho, const std::vector<double>& beta_coeffs, int m_max) {
    check_coefficients(beta_coeffs, m_max);
    double p = rho, rm = rho;
    for (int m = 1; m <= m_max; ++m) {
        rm *= rho;
        p -= double(m) / (m + 1) * beta_coeffs[m - 1] * rm;
    }
    return p;
}

double free_energy_density(double rho, const std::vector<double>& beta_coeffs, int m_max) {
    check_coefficients(beta_coeffs, m_max);
    if (!(rho > 0)) throw DomainError("density must be positive");
    double f = rho * (std::log(rho) - 1.0), rm = rho;
    for (int m = 1; m <= m_max; ++m) {
        rm *= rho;
        f -= beta_coeffs[m - 1] * rm / (m + 1);
    }
    return f;
}

std::vector<double> virial_coefficients(const std::vector<double>& beta_coeffs) {
    std::vector<double> out;
    for (std::size_t m = 1; m <= beta_coeffs.size(); ++m) out.push_back(-double(m) / (m + 1) * beta_coeffs[m - 1]);
    return out;
}

std::vector<SweepRow> thermo_limit_sweep(int n, const std::vector<double>& L_list, const PairPotential& v, double beta,
                                         int d, int M, const IntegrationOptions& options) {
    const double reference = beta_n(n, v, beta, d, options).value;
    std::vector<SweepRow> rows;
    for (double L : L_list) {
        ClusterIntegrator integrator(periodize(v, BoxGeometry(d, L), 2), beta, options);
        const BFactor B = b_factor(n, M, integrator);
        SweepRow row;
        row.L = L;
        row.B = B.value;
        row.B_error = B.error;
        row.reference = reference;
        row.abs_error = std::abs(B.value - reference);
        if (!rows.empty() && row.abs_error > 0) row.ratio = rows.back().abs_error / row.abs_error;
        rows.push_back(row);
    }
    return rows;
}

#define CANEX_INSTANTIATE_EXPANSION(W)                                                                   \
    template GraphClusterSum<W> covering_cluster_sum<W>(int, int, const std::function<W(const IsoKey&)>&); \
    template W vertex_route_f<W>(int, int, int, const std::function<W(const IsoKey&)>&);                  \
    template W graph_route_f<W>(int, int, int, const std::function<W(const IsoKey&)>&);

CANEX_INSTANTIATE_EXPANSION(double)
CANEX_INSTANTIATE_EXPANSION(Rational)

}  // namespace canex
