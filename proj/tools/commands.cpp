#include "commands.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "canex/format.hpp"
#include "canex/graph.hpp"
#include "canex/integrals.hpp"
#include "canex/polymer.hpp"

namespace canex::cli {
namespace {

std::string comment_block(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& l : lines) out += "# " + l + "\n";
    return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
    return out;
}

ClusterIntegrator make_integrator(const ExpansionParams& p) {
    return ClusterIntegrator(periodize(p.potential, p.box, p.lattice_cutoff), p.beta, p.integration);
}

std::vector<double> rho_grid(const RunConfig& config) {
    return config.numbers("virial.rho", {0.1, 0.2, 0.5, 1.0, 2.0});
}

struct VirialData {
    std::vector<IntegralResult> beta;
    std::vector<double> coeffs;
    std::vector<double> B;
};

VirialData virial_data(const RunConfig& config) {
    const auto orders = config.integer("virial.orders", 2);
    if (orders < 1 || orders > 4) throw UsageError("field 'virial.orders' must be between 1 and 4");
    const auto v = config.potential();
    const auto d = config.box().d;
    const double beta = config.number("system.beta", 1.0);
    const auto options = config.integration();
    if (d > 1 && !config.seeded())
        throw UsageError("field 'integration.seed' is required: virial coefficients in d > 1 use Monte Carlo");
    const double radius = config.number("virial.domain_radius", 0.0);
    VirialData out;
    for (int m = 1; m <= orders; ++m) {
        out.beta.push_back(beta_n(m, v, beta, int(d), options, radius));
        out.coeffs.push_back(out.beta.back().value);
    }
    out.B = virial_coefficients(out.coeffs);
    return out;
}

std::string coefficient_table(const VirialData& data, Format format) {
    std::ostringstream out;
    if (format == Format::csv) out << "m,beta_m,beta_error,B_next,method,samples,seed\n";
    for (std::size_t i = 0; i < data.beta.size(); ++i) {
        const auto& b = data.beta[i];
        if (format == Format::csv)
            out << i + 1 << ',' << format_number(b.value) << ',' << format_number(b.error) << ','
                << format_number(data.B[i] + 0.0) << ',' << to_string(b.method) << ',' << b.samples << ',' << b.seed << "\n";
        else
            out << "coefficient;m=" << i + 1 << ";beta_m=" << format_number(b.value)
                << ";beta_error=" << format_number(b.error) << ";B_next=" << format_number(data.B[i] + 0.0) << ";"
                << b.record() << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// validation suites

struct Check {
    std::string suite;
    std::string name;
    std::string detail;
    double value = 0.0;
    double limit = 0.0;
    bool pass = false;
};

class SuiteLog {
public:
    void add(Check c) { checks_.push_back(std::move(c)); }
    void extra(const std::string& line) { extra_.push_back(line); }
    [[nodiscard]] bool ok() const {
        for (const auto& c : checks_)
            if (!c.pass) return false;
        return true;
    }
    [[nodiscard]] std::string render(const std::vector<std::string>& header, Format format) const;
    [[nodiscard]] std::string summary() const;

private:
    std::vector<Check> checks_;
    std::vector<std::string> extra_;
};

std::string SuiteLog::render(const std::vector<std::string>& header, Format format) const {
    std::ostringstream out;
    if (format == Format::csv) {
        out << comment_block(header);
        out << "suite,check,detail,value,limit,result\n";
        for (const auto& c : checks_)
            out << c.suite << ',' << c.name << ',' << c.detail << ',' << format_number(c.value) << ','
                << format_number(c.limit) << ',' << (c.pass ? "PASS" : "FAIL") << "\n";
    } else {
        out << "input;" << join(header, ";") << "\n";
        for (const auto& c : checks_)
            out << "check;suite=" << c.suite << ";name=" << c.name << ";detail=" << c.detail
                << ";value=" << format_number(c.value) << ";limit=" << format_number(c.limit)
                << ";result=" << (c.pass ? "PASS" : "FAIL") << "\n";
        for (const auto& l : extra_) out << l << "\n";
    }
    out << (format == Format::csv ? "# " : "") << "result=" << (ok() ? "PASS" : "FAIL") << "\n";
    return out.str();
}

std::string SuiteLog::summary() const {
    int failed = 0;
    for (const auto& c : checks_) failed += c.pass ? 0 : 1;
    return std::string(ok() ? "PASS" : "FAIL") + " (" + std::to_string(checks_.size() - failed) + "/" +
           std::to_string(checks_.size()) + " checks)";
}

std::string graph_token(const LabeledGraph& g) {
    std::string s;
    for (const auto& [i, j] : g.edges()) s += (s.empty() ? "" : " ") + std::to_string(i) + "-" + std::to_string(j);
    return s;
}

void cancellation_suite(SuiteLog& log) {
    // Ursell coefficients of k pairwise incompatible polymers
    for (int k = 1; k <= 6; ++k) {
        std::vector<std::string> names;
        std::vector<std::pair<std::size_t, std::size_t>> bad;
        std::vector<std::pair<std::size_t, int>> entries;
        for (int i = 0; i < k; ++i) {
            names.push_back("p" + std::to_string(i));
            entries.emplace_back(i, 1);
            for (int j = 0; j < i; ++j) bad.emplace_back(j, i);
        }
        const Rational c = ursell_coefficient(MultiIndex(entries), PolymerSpace(names, bad));
        Rational expected = (k % 2 == 1) ? 1 : -1;
        for (int i = 2; i < k; ++i) expected *= i;
        const Rational residual = c - expected;
        log.add({"cancellation", "ursell_complete", "k=" + std::to_string(k), to_double(residual), 0.0, residual == 0});
    }

    // restricted cluster sums vanish exactly when the graph has an articulation point
    for (int n = 3; n <= 4; ++n) {
        for_each_graph(n, [&](const LabeledGraph& g) {
            if (!is_connected(g)) return;
            const bool irreducible = is_two_connected(g);
            if (!irreducible) {
                Rational worst = 0;
                for (int M = 1; M <= 6; ++M) {
                    const Rational r = abs_value(restricted_cluster_sum(g, M));
                    if (r > worst) worst = r;
                }
                log.add({"cancellation", "restricted_sum_zero", graph_token(g), to_double(worst), 0.0, worst == 0});
            } else {
                const Rational r = restricted_cluster_sum(g, n);
                log.add({"cancellation", "restricted_sum_nonzero", graph_token(g), to_double(r), 0.0, r != 0});
            }
        });
    }

    // the vertex-polymer and graph-polymer routes to F^M(n) agree exactly
    std::function<Rational(const IsoKey&)> weight = [](const IsoKey& key) {
        return Rational(1, 7 + int(key.edges % 29)) - Rational(key.order, 53);
    };
    for (int N = 3; N <= 5; ++N)
        for (int n = 1; n <= 2; ++n)
            for (int M = n + 1; M <= 6; ++M) {
                const Rational gap = vertex_route_f<Rational>(N, n, M, weight) - graph_route_f<Rational>(N, n, M, weight);
                log.add({"cancellation", "route_agreement",
                         "N=" + std::to_string(N) + " n=" + std::to_string(n) + " M=" + std::to_string(M),
                         to_double(gap), 0.0, gap == 0});
            }
}

void oracle_suite(SuiteLog& log, const RunConfig& config) {
    const auto params = config.expansion();
    if (params.box.d > 1 || params.potential.kind() != PotentialKind::hard_core) {
        // Monte Carlo oracles need an explicit seed
        if (params.box.d > 1 && !config.seeded())
            throw UsageError("field 'integration.seed' is required for Monte Carlo oracles");
    }
    const auto audit = compare_expansion_vs_oracle(params, config.oracle());
    std::ostringstream detail;
    detail << "oracle=" << to_string(audit.oracle_method) << " truncation=" << format_number(audit.truncation_budget)
           << " order_tail=" << format_number(audit.order_tail_budget)
           << " integration=" << format_number(audit.integration_budget)
           << " oracle_error=" << format_number(audit.oracle_budget);
    log.add({"oracle", "log_Z_audit", detail.str(), audit.discrepancy, audit.budget, audit.pass});
    std::istringstream lines(audit.to_records());
    for (std::string line; std::getline(lines, line);) log.extra(line);
}

void kp_suite(SuiteLog& log, const RunConfig& config) {
    const auto params = config.expansion();
    auto integrator = make_integrator(params);
    const auto cert = expansion_certificate(params, integrator);
    std::ostringstream detail;
    detail << "source=" << cert.source() << " delta=" << format_number(cert.delta)
           << " delta_prime=" << format_number(cert.delta_prime)
           << " density_margin=" << format_number(cert.density_margin);
    log.add({"kp", "expansion_certificate", detail.str(), cert.neighbour_sum, cert.neighbour_limit, cert.holds()});

    if (cert.holds()) {
        const auto report = log_Z_canonical(params);
        for (const auto& row : report.rows) {
            if (row.P_vanishes) continue;
            log.add({"kp", "decay_bound", "n=" + std::to_string(row.n), std::abs(row.F), row.decay_bound,
                     std::abs(row.F) <= row.decay_bound});
        }
    }

    // an abstract system of mutually incompatible polymers with uniform weight
    const auto k = config.integer("kp.polymers", 3);
    if (k < 1 || k > 20) throw UsageError("field 'kp.polymers' must be between 1 and 20");
    const double w = config.number("kp.weight", 0.01);
    const double delta = config.number("kp.delta", 0.06);
    std::vector<std::string> names;
    std::vector<std::pair<std::size_t, std::size_t>> bad;
    for (std::size_t i = 0; i < std::size_t(k); ++i) {
        names.push_back("p" + std::to_string(i));
        for (std::size_t j = 0; j < i; ++j) bad.emplace_back(j, i);
    }
    PolymerSystem<double> sys(PolymerSpace(names, bad), std::vector<double>(k, w));
    const std::vector<double> a(k, config.number("kp.a", 0.1)), c(k, config.number("kp.c", 0.1));
    KpCertificate kp;
    try {
        kp = kp_condition_check(sys, a, c, delta);
    } catch (const DomainError& e) {
        throw UsageError(std::string("kp: ") + e.what());
    }
    const std::string hypothesis = kp.holds ? "none" : kp.failed_hypothesis;
    log.add({"kp", "abstract_system",
             "polymers=" + std::to_string(k) + " weight=" + format_number(w) + " failed_hypothesis=" + hypothesis,
             kp.worst_margin, 0.0, kp.holds});
}

void limits_suite(SuiteLog& log, const RunConfig& config) {
    const auto params = config.expansion();
    const std::vector<double> scale{1, 2, 4, 8};
    const double L0 = config.number("limits.L", 5.0);
    std::vector<double> Ls;
    for (double s : scale) Ls.push_back(L0 * s);
    const double lo = config.number("limits.ratio_min", 1.5), hi = config.number("limits.ratio_max", 2.5);

    const auto rows = thermo_limit_sweep(1, Ls, params.potential, params.beta, params.box.d, std::max(params.M, 2),
                                         params.integration);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        log.add({"limits", "B1_box_ratio", "L=" + format_number(r.L) + " error=" + format_number(r.abs_error),
                 r.ratio, hi, r.ratio >= lo && r.ratio <= hi});
    }

    // P(n) against rho^n at fixed density
    const double rho = params.N / params.box.volume();
    const int n = 2;
    double previous = 0.0;
    for (double s : scale) {
        const int N = int(std::lround(params.N * std::pow(s, params.box.d)));
        const double volume = params.box.volume() * std::pow(s, params.box.d);
        const double err = std::abs(p_factor(N, volume, n).value - std::pow(rho, n));
        if (previous > 0.0) {
            const double ratio = previous / err;
            log.add({"limits", "P2_density_ratio", "N=" + std::to_string(N) + " error=" + format_number(err), ratio, hi,
                     ratio >= lo && ratio <= hi});
        }
        previous = err;
    }

    if (params.potential.kind() == PotentialKind::hard_core && params.box.d == 1) {
        const double sigma = params.potential.hard_core_radius();
        const auto b2 = beta_n(2, params.potential, params.beta, 1, params.integration);
        const double expected = -1.5 * sigma * sigma;
        const double rel = std::abs(b2.value / expected - 1.0);
        log.add({"limits", "beta2_hard_rod", "beta2=" + format_number(b2.value), rel, 0.01, rel <= 0.01});
        const double B3 = virial_coefficients({-2 * sigma, b2.value})[1];
        const double rel3 = std::abs(B3 / (sigma * sigma) - 1.0);
        log.add({"limits", "B3_hard_rod", "B3=" + format_number(B3), rel3, 0.01, rel3 <= 0.01});
    }
}

}  // namespace

CommandOutput cmd_enumerate(const std::string& kind, int n) {
    if (n < 1 || n > kMaxEnumerationOrder)
        throw UsageError("field 'n' must be between 1 and " + std::to_string(kMaxEnumerationOrder));
    std::function<bool(const LabeledGraph&)> keep;
    if (kind == "graphs")
        keep = [](const LabeledGraph&) { return true; };
    else if (kind == "connected")
        keep = [](const LabeledGraph& g) { return is_connected(g); };
    else if (kind == "two-connected")
        keep = [](const LabeledGraph& g) { return is_two_connected(g); };
    else if (kind != "trees")
        throw UsageError("field 'kind' must be graphs, connected, two-connected or trees");

    CommandOutput out;
    std::int64_t count = 0;
    auto emit = [&](const LabeledGraph& g) {
        if (keep && !keep(g)) return;
        out.body += g.to_string() + "\n";
        ++count;
    };
    if (kind == "trees")
        for_each_tree(n, emit);
    else
        for_each_graph(n, emit);
    out.summary = "count=" + std::to_string(count);
    return out;
}

CommandOutput cmd_coeffs(const RunConfig& config, Format format) {
    const auto report = log_Z_canonical(config.expansion());
    CommandOutput out;
    out.body = format == Format::csv ? report.to_csv() : report.to_records();
    out.summary = "log_Z_per_volume=" + format_number(report.log_Z_per_volume) + " certificate=" +
                  report.certificate.source();
    return out;
}

CommandOutput cmd_virial(const RunConfig& config, Format format) {
    const auto data = virial_data(config);
    const int m_max = int(data.coeffs.size());
    std::ostringstream out;
    if (format == Format::csv) out << comment_block(config.echo());
    else out << "input;" << join(config.echo(), ";") << "\n";
    out << coefficient_table(data, format);
    if (format == Format::csv) out << "\nrho,beta_p\n";
    for (double rho : rho_grid(config)) {
        const double p = virial_pressure(rho, data.coeffs, m_max);
        if (format == Format::csv) out << format_number(rho) << ',' << format_number(p) << "\n";
        else out << "pressure;rho=" << format_number(rho) << ";beta_p=" << format_number(p) << "\n";
    }
    CommandOutput result;
    result.body = out.str();
    result.summary = "B2=" + format_number(data.B[0]);
    return result;
}

CommandOutput cmd_free_energy(const RunConfig& config, Format format) {
    const auto data = virial_data(config);
    const int m_max = int(data.coeffs.size());
    std::ostringstream out;
    if (format == Format::csv) out << comment_block(config.echo());
    else out << "input;" << join(config.echo(), ";") << "\n";
    out << coefficient_table(data, format);
    if (format == Format::csv) out << "\nrho,beta_f,beta_p\n";
    for (double rho : rho_grid(config)) {
        const double f = free_energy_density(rho, data.coeffs, m_max);
        const double p = virial_pressure(rho, data.coeffs, m_max);
        if (format == Format::csv)
            out << format_number(rho) << ',' << format_number(f) << ',' << format_number(p) << "\n";
        else
            out << "free_energy;rho=" << format_number(rho) << ";beta_f=" << format_number(f)
                << ";beta_p=" << format_number(p) << "\n";
    }
    std::string summary = "virial rows=" + std::to_string(rho_grid(config).size());
    if (config.has("system.N")) {
        // finite-box value from the canonical expansion
        const auto report = log_Z_canonical(config.expansion());
        const double rho = config.expansion().rho();
        const double f = -report.log_Z_per_volume;
        if (format == Format::csv)
            out << "\n# canonical\nrho,beta_f,certificate\n"
                << format_number(rho) << ',' << format_number(f) << ',' << report.certificate.source() << "\n";
        else
            out << "canonical;rho=" << format_number(rho) << ";beta_f=" << format_number(f)
                << ";certificate=" << report.certificate.source() << "\n";
        summary += " canonical_beta_f=" + format_number(f);
    }
    CommandOutput result;
    result.body = out.str();
    result.summary = summary;
    return result;
}

CommandOutput cmd_kp_check(const RunConfig& config, Format format) {
    const auto params = config.expansion();
    auto integrator = make_integrator(params);
    const auto c = expansion_certificate(params, integrator);
    std::vector<std::pair<std::string, std::string>> fields{
        {"source", c.source()},
        {"delta", format_number(c.delta)},
        {"delta_prime", format_number(c.delta_prime)},
        {"density_margin", format_number(c.density_margin)},
        {"analytic_L", format_number(c.analytic_L)},
        {"analytic_holds", c.analytic_holds ? "1" : "0"},
        {"numeric_delta", format_number(c.numeric_delta)},
        {"numeric_L", format_number(c.numeric_L)},
        {"neighbour_sum", format_number(c.neighbour_sum)},
        {"neighbour_limit", format_number(c.neighbour_limit)},
        {"numeric_holds", c.numeric_holds ? "1" : "0"},
        {"result", c.holds() ? "PASS" : "FAIL"},
    };
    std::ostringstream out;
    if (format == Format::csv) {
        out << comment_block(params.describe()) << "field,value\n";
        for (const auto& [k, v] : fields) out << k << ',' << v << "\n";
    } else {
        out << "input;" << join(params.describe(), ";") << "\ncertificate";
        for (const auto& [k, v] : fields) out << ';' << k << '=' << v;
        out << "\n";
    }
    CommandOutput result;
    result.body = out.str();
    result.ok = c.holds();
    result.summary = std::string(c.holds() ? "PASS" : "FAIL") + " certificate=" + c.source();
    return result;
}

CommandOutput cmd_validate(const std::string& suite, const RunConfig& config, Format format) {
    const bool all = suite == "all";
    if (!all && suite != "cancellation" && suite != "oracle" && suite != "kp" && suite != "limits")
        throw UsageError("field 'suite' must be all, cancellation, oracle, kp or limits");
    SuiteLog log;
    if (all || suite == "cancellation") cancellation_suite(log);
    if (all || suite == "oracle") oracle_suite(log, config);
    if (all || suite == "kp") kp_suite(log, config);
    if (all || suite == "limits") limits_suite(log, config);
    CommandOutput out;
    auto header = config.echo();
    header.insert(header.begin(), "suite=" + suite);
    out.body = log.render(header, format);
    out.ok = log.ok();
    out.summary = log.summary();
    return out;
}

}  // namespace canex::cli
