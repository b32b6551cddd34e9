#pragma once

// Reference values computed without the expansion: direct canonical and
// grand-canonical partition functions, the exact hard-rod gas, and audits that put
// the expansion next to them.

#include <cstdint>
#include <string>
#include <vector>

#include "canex/expansion.hpp"
#include "canex/potential.hpp"

namespace canex {

enum class OracleMethod { exact_formula, quadrature, monte_carlo };
std::string to_string(OracleMethod m);

struct OracleResult {
    double value = 0.0;
    /// log(value), computed directly in log space for the exact formulas.
    double log_value = 0.0;
    OracleMethod method = OracleMethod::exact_formula;
    double error_estimate = 0.0;
    std::int64_t samples = 0;
    std::uint64_t seed = 0;

    [[nodiscard]] std::string record() const;
};

struct OracleOptions {
    std::int64_t samples = 1'000'000;
    std::uint64_t seed = 1;
    int workers = 1;
    int batches = 16;
    /// Relative tolerance of the adaptive rule used for smooth potentials.
    double tolerance = 1e-10;
    /// Lattice images per direction used by the periodic energy when the range exceeds L/2.
    int lattice_cutoff = 2;
};

/// Z = (1/N!) integral over Lambda^N of exp(-beta H^per). Quadrature needs d = 1 and N <= 5;
/// Monte Carlo needs N <= 4. One coordinate is pinned by translation invariance.
OracleResult brute_force_Z(int N, const BoxGeometry& box, const PairPotential& v, double beta,
                           OracleMethod method = OracleMethod::quadrature, const OracleOptions& options = {});

/// Hard rods of length sigma on a ring of length L: Z = L (L - N sigma)^{N-1} / N!.
OracleResult tonks_exact_Z(int N, double L, double sigma);

struct GrandCanonicalResult {
    OracleResult xi;
    /// z^{K}|Lambda|^{K} e^{beta B K^2} / K! with K = N_max + 1.
    double remainder_bound = 0.0;
    /// Remainder bound relative to the truncated sum exceeds the tolerance.
    bool remainder_flagged = false;
    [[nodiscard]] double log_per_volume(double volume) const;
};

/// Xi = sum_{N <= N_max} z^N Z_N with Z_N from brute_force_Z. N_max <= 5.
GrandCanonicalResult brute_force_Xi(double z, int N_max, const BoxGeometry& box, const PairPotential& v, double beta,
                                    OracleMethod method = OracleMethod::quadrature, const OracleOptions& options = {},
                                    double remainder_tolerance = 1e-6);
/// Xi for hard rods from the exact Z_N, summed while N sigma < L and N <= N_max.
GrandCanonicalResult tonks_exact_Xi(double z, int N_max, double L, double sigma);

struct AuditReport {
    std::vector<std::string> header;
    double expansion = 0.0;
    double oracle = 0.0;
    OracleMethod oracle_method = OracleMethod::exact_formula;
    double discrepancy = 0.0;
    double truncation_budget = 0.0;
    double order_tail_budget = 0.0;
    double integration_budget = 0.0;
    double oracle_budget = 0.0;
    double budget = 0.0;
    bool pass = false;
    SeriesReport series;

    [[nodiscard]] std::string to_records() const;
};

/// (1/|Lambda|) log Z from the expansion against the reference value. Hard rods in d = 1 use
/// the exact formula, other d = 1 runs quadrature, everything else Monte Carlo.
AuditReport compare_expansion_vs_oracle(const ExpansionParams& params, const OracleOptions& options = {});

}  // namespace canex
