#include "canex/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "canex/format.hpp"

namespace canex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Pair energy under periodic boundary conditions, from the raw potential.
class TorusEnergy {
public:
    TorusEnergy(const PairPotential& v, const BoxGeometry& box, int cutoff) : v_(v), box_(box), cutoff_(cutoff) {
        nearest_ = v.finite_range() && v.range() <= box.L / 2;
    }

    double operator()(const Point& dx) const {
        Point w{0, 0, 0};
        for (int c = 0; c < box_.d; ++c) w[c] = dx[c] - box_.L * std::round(dx[c] / box_.L);
        if (nearest_) return v_.energy(norm(w, box_.d));
        double total = 0.0;
        const int span = 2 * cutoff_ + 1;
        int images = 1;
        for (int c = 0; c < box_.d; ++c) images *= span;
        for (int idx = 0; idx < images; ++idx) {
            Point y = w;
            int rest = idx;
            for (int c = 0; c < box_.d; ++c) {
                y[c] += box_.L * (rest % span - cutoff_);
                rest /= span;
            }
            const double e = v_.energy(norm(y, box_.d));
            if (std::isinf(e)) return kInf;
            total += e;
        }
        return total;
    }

private:
    const PairPotential& v_;
    BoxGeometry box_;
    int cutoff_;
    bool nearest_ = false;
};

double boltzmann(const TorusEnergy& pair, double beta, const std::vector<Point>& q) {
    double h = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) {
            const Point dx{q[i][0] - q[j][0], q[i][1] - q[j][1], q[i][2] - q[j][2]};
            const double e = pair(dx);
            if (std::isinf(e)) return 0.0;
            h += e;
        }
    return std::exp(-beta * h);
}

bool piecewise_constant(const PairPotential& v) {
    return v.kind() == PotentialKind::hard_core || v.kind() == PotentialKind::square_well;
}

// Nested integration on the line with q_0 = 0. Pieces are split wherever the integrand,
// or any inner integral, can switch formula: at q_u + (signed sums of radii) mod L.
class LineIntegrator {
public:
    LineIntegrator(int N, double L, const TorusEnergy& pair, double beta, const PairPotential& v, double tol)
        : N_(N), L_(L), pair_(pair), beta_(beta), exact_(piecewise_constant(v)), tol_(tol), q_(N, Point{0, 0, 0}) {
        std::vector<double> radii = v.discontinuities();
        if (v.finite_range()) radii.push_back(v.range());
        sums_.assign(N, {});
        sums_[0] = {0.0};
        for (int t = 1; t < N; ++t) {
            sums_[t] = sums_[t - 1];
            for (double s : sums_[t - 1])
                for (double r : radii) {
                    sums_[t].push_back(s + r);
                    sums_[t].push_back(s - r);
                }
            std::sort(sums_[t].begin(), sums_[t].end());
            sums_[t].erase(std::unique(sums_[t].begin(), sums_[t].end()), sums_[t].end());
        }
    }

    // Integral over q_1..q_{N-1} in [-L/2, L/2) of the Boltzmann factor.
    double run(int rule) {
        rule_ = rule;
        return level(1);
    }

private:
    double level(int l) {
        if (l == N_) return boltzmann(pair_, beta_, q_);
        const double lo = -L_ / 2, hi = L_ / 2;
        std::vector<double> cuts{lo, hi};
        for (int u = 0; u < l; ++u)
            for (double s : sums_[N_ - l]) {
                double t = q_[u][0] + s;
                t -= L_ * std::floor((t - lo) / L_);
                if (t > lo && t < hi) cuts.push_back(t);
            }
        std::sort(cuts.begin(), cuts.end());
        auto inner = [&](double x) {
            q_[l][0] = x;
            return level(l + 1);
        };
        double total = 0.0;
        for (std::size_t k = 1; k < cuts.size(); ++k) {
            const double a = cuts[k - 1], b = cuts[k];
            if (b - a < 1e-14 * L_) continue;
            if (exact_) {
                total += rule_ == 7 ? boost::math::quadrature::gauss<double, 7>::integrate(inner, a, b)
                                    : boost::math::quadrature::gauss<double, 5>::integrate(inner, a, b);
            } else {
                total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(inner, a, b, 6, tol_);
            }
        }
        return total;
    }

    int N_;
    double L_;
    const TorusEnergy& pair_;
    double beta_;
    bool exact_;
    double tol_;
    int rule_ = 7;
    std::vector<Point> q_;
    std::vector<std::vector<double>> sums_;
};

double log_factorial(int n) { return std::lgamma(n + 1.0); }

OracleResult exact(double log_value) {
    OracleResult r;
    r.value = std::exp(log_value);
    r.log_value = log_value;
    r.method = OracleMethod::exact_formula;
    return r;
}

}  // namespace

std::string to_string(OracleMethod m) {
    switch (m) {
        case OracleMethod::exact_formula: return "exact-formula";
        case OracleMethod::quadrature: return "quadrature";
        case OracleMethod::monte_carlo: return "monte-carlo";
    }
    return "?";
}

std::string OracleResult::record() const {
    return "value=" + format_number(value) + ";log_value=" + format_number(log_value) + ";method=" + to_string(method) +
           ";error_estimate=" + format_number(error_estimate) + ";samples=" + std::to_string(samples) +
           ";seed=" + std::to_string(seed);
}

OracleResult brute_force_Z(int N, const BoxGeometry& box, const PairPotential& v, double beta, OracleMethod method,
                           const OracleOptions& options) {
    if (N < 0) throw DomainError("particle number must be non-negative");
    if (!(beta > 0)) throw DomainError("beta must be positive");
    const double volume = box.volume();
    if (N == 0) return exact(0.0);
    if (N == 1) return exact(std::log(volume));
    if (v.kind() == PotentialKind::zero) return exact(N * std::log(volume) - log_factorial(N));
    const double prefactor = volume / std::exp(log_factorial(N));
    const TorusEnergy pair(v, box, options.lattice_cutoff);

    if (method == OracleMethod::quadrature) {
        if (box.d != 1) throw SizeLimitError("quadrature oracle needs d = 1");
        if (N > 5) throw SizeLimitError("quadrature oracle covers N <= 5");
        LineIntegrator line(N, box.L, pair, beta, v, options.tolerance);
        const double fine = line.run(7);
        OracleResult r;
        r.value = prefactor * fine;
        r.log_value = std::log(r.value);
        r.method = OracleMethod::quadrature;
        r.error_estimate = piecewise_constant(v) ? prefactor * std::abs(fine - line.run(5))
                                                 : prefactor * options.tolerance * std::abs(fine) * (N - 1);
        return r;
    }
    if (method != OracleMethod::monte_carlo) throw DomainError("exact formula is only available for special cases");
    if (N > 4) throw SizeLimitError("Monte Carlo oracle covers N <= 4");
    if (options.samples < 2) throw DomainError("Monte Carlo needs at least two samples");

    const int batches = std::max(1, options.batches);
    const std::int64_t per_batch = (options.samples + batches - 1) / batches;
    std::vector<double> s1(batches), s2(batches);
    auto batch = [&](int b) {
        std::seed_seq seq{std::uint32_t(options.seed), std::uint32_t(options.seed >> 32), std::uint32_t(b),
                          std::uint32_t(N), 0x6f72u};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> u(-box.L / 2, box.L / 2);
        std::vector<Point> q(N, Point{0, 0, 0});
        double a = 0.0, a2 = 0.0;
        for (std::int64_t i = 0; i < per_batch; ++i) {
            for (int k = 1; k < N; ++k)
                for (int c = 0; c < box.d; ++c) q[k][c] = u(rng);
            const double w = boltzmann(pair, beta, q);
            a += w;
            a2 += w * w;
        }
        s1[b] = a;
        s2[b] = a2;
    };
    const int workers = std::max(1, std::min(options.workers, batches));
    if (workers == 1) {
        for (int b = 0; b < batches; ++b) batch(b);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int b = next++; b < batches; b = next++) batch(b);
            });
        for (auto& t : pool) t.join();
    }
    double a = 0.0, a2 = 0.0;
    for (int b = 0; b < batches; ++b) {
        a += s1[b];
        a2 += s2[b];
    }
    const double n = double(per_batch) * batches;
    const double mean = a / n;
    const double var = std::max(0.0, a2 / n - mean * mean);
    const double scale = prefactor * std::pow(volume, N - 1);
    OracleResult r;
    r.value = scale * mean;
    r.log_value = std::log(r.value);
    r.method = OracleMethod::monte_carlo;
    r.error_estimate = scale * std::sqrt(var / (n - 1));
    r.samples = per_batch * batches;
    r.seed = options.seed;
    return r;
}

OracleResult tonks_exact_Z(int N, double L, double sigma) {
    if (N < 0) throw DomainError("particle number must be non-negative");
    if (!(L > 0) || !(sigma > 0)) throw DomainError("L and sigma must be positive");
    if (N == 0) return exact(0.0);
    if (!(N * sigma < L)) throw DomainError("jammed: N sigma >= L");
    // On the ring each rod excludes a length sigma on either side of every other rod, so
    // after fixing one rod the remaining N-1 gaps share a free length L - N sigma.
    return exact(std::log(L) + (N - 1) * std::log(L - N * sigma) - log_factorial(N));
}

double GrandCanonicalResult::log_per_volume(double volume) const { return std::log(xi.value) / volume; }

GrandCanonicalResult brute_force_Xi(double z, int N_max, const BoxGeometry& box, const PairPotential& v, double beta,
                                    OracleMethod method, const OracleOptions& options, double remainder_tolerance) {
    if (!(z >= 0)) throw DomainError("activity must be non-negative");
    if (N_max < 0 || N_max > 5) throw SizeLimitError("grand-canonical oracle covers N_max <= 5");
    GrandCanonicalResult out;
    out.xi.method = OracleMethod::exact_formula;
    out.xi.seed = options.seed;
    double zn = 1.0;
    for (int N = 0; N <= N_max; ++N) {
        const OracleResult Z = brute_force_Z(N, box, v, beta, method, options);
        out.xi.value += zn * Z.value;
        out.xi.error_estimate += zn * Z.error_estimate;
        out.xi.samples += Z.samples;
        if (Z.method != OracleMethod::exact_formula) out.xi.method = Z.method;
        zn *= z;
    }
    out.xi.log_value = std::log(out.xi.value);
    const int K = N_max + 1;
    const double B = v.stability_B(box.d);
    out.remainder_bound =
        z == 0.0 ? 0.0 : std::exp(K * std::log(z * box.volume()) + beta * B * K * K - log_factorial(K));
    out.remainder_flagged = out.remainder_bound > remainder_tolerance * out.xi.value;
    return out;
}

GrandCanonicalResult tonks_exact_Xi(double z, int N_max, double L, double sigma) {
    if (!(z >= 0)) throw DomainError("activity must be non-negative");
    GrandCanonicalResult out;
    out.xi.method = OracleMethod::exact_formula;
    int last = 0;
    for (int N = 0; N <= N_max && N * sigma < L; ++N) {
        out.xi.value += N == 0 ? 1.0 : std::exp(N * std::log(z) + tonks_exact_Z(N, L, sigma).log_value);
        last = N;
    }
    out.xi.log_value = std::log(out.xi.value);
    // Z_N <= L^N / N!, so the rest is bounded by an ideal-gas tail.
    const int K = last + 1;
    const double x = z * L;
    if (K * sigma >= L)
        out.remainder_bound = 0.0;
    else if (x < K + 1)
        out.remainder_bound = std::exp(K * std::log(x) - log_factorial(K)) / (1.0 - x / (K + 1));
    else
        out.remainder_bound = kInf;
    out.remainder_flagged = out.remainder_bound > 1e-12 * out.xi.value;
    return out;
}

std::string AuditReport::to_records() const {
    std::ostringstream out;
    out << "audit;result=" << (pass ? "PASS" : "FAIL") << ";expansion=" << format_number(expansion)
        << ";oracle=" << format_number(oracle) << ";oracle_method=" << to_string(oracle_method)
        << ";discrepancy=" << format_number(discrepancy) << ";budget=" << format_number(budget) << "\n";
    out << "budget;truncation=" << format_number(truncation_budget) << ";order_tail=" << format_number(order_tail_budget)
        << ";integration=" << format_number(integration_budget) << ";oracle=" << format_number(oracle_budget) << "\n";
    out << series.to_records();
    return out.str();
}

AuditReport compare_expansion_vs_oracle(const ExpansionParams& params, const OracleOptions& options) {
    AuditReport report;
    report.series = log_Z_canonical(params);
    report.header = report.series.header;
    const double volume = params.box.volume();
    OracleResult Z;
    if (params.potential.kind() == PotentialKind::hard_core && params.box.d == 1)
        Z = tonks_exact_Z(params.N, params.box.L, params.potential.hard_core_radius());
    else if (params.potential.kind() == PotentialKind::zero)
        Z = brute_force_Z(params.N, params.box, params.potential, params.beta);
    else if (params.box.d == 1 && params.N <= 5)
        Z = brute_force_Z(params.N, params.box, params.potential, params.beta, OracleMethod::quadrature, options);
    else
        Z = brute_force_Z(params.N, params.box, params.potential, params.beta, OracleMethod::monte_carlo, options);
    report.expansion = report.series.log_Z_per_volume;
    report.oracle = Z.log_value / volume;
    report.oracle_method = Z.method;
    report.discrepancy = std::abs(report.expansion - report.oracle);
    report.truncation_budget = report.series.truncation_bound;
    report.order_tail_budget = report.series.order_tail_bound;
    report.integration_budget = report.series.integration_error;
    report.oracle_budget = Z.value > 0 ? Z.error_estimate / Z.value / volume : kInf;
    report.budget =
        report.truncation_budget + report.order_tail_budget + report.integration_budget + report.oracle_budget;
    report.pass = std::isfinite(report.budget) && report.discrepancy <= report.budget;
    return report;
}

}  // namespace canex
