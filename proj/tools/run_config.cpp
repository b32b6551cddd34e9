#include "run_config.hpp"

#include <boost/algorithm/string/split.hpp>
#include <boost/algorithm/string/trim.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace canex::cli {

void RunConfig::load_file(const std::string& path) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(path, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw UsageError("cannot read config: " + std::string(e.what()));
    }
    for (const auto& [section, entries] : tree) {
        if (entries.empty()) {
            values_[section] = entries.data();
            continue;
        }
        for (const auto& [key, node] : entries) values_[section + "." + key] = node.data();
    }
}

void RunConfig::assign(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--set expects section.key=value, got '" + assignment + "'");
    values_[boost::algorithm::trim_copy(assignment.substr(0, eq))] =
        boost::algorithm::trim_copy(assignment.substr(eq + 1));
}

std::string RunConfig::text(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double RunConfig::number(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return boost::lexical_cast<double>(it->second);
    } catch (const boost::bad_lexical_cast&) {
        throw UsageError("field '" + key + "' expects a number, got '" + it->second + "'");
    }
}

std::int64_t RunConfig::integer(const std::string& key, std::int64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return boost::lexical_cast<std::int64_t>(it->second);
    } catch (const boost::bad_lexical_cast&) {
        throw UsageError("field '" + key + "' expects an integer, got '" + it->second + "'");
    }
}

std::vector<double> RunConfig::numbers(const std::string& key, const std::vector<double>& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<std::string> parts;
    boost::algorithm::split(parts, it->second, [](char ch) { return ch == ',' || ch == ' '; });
    std::vector<double> out;
    for (auto& p : parts) {
        if (p.empty()) continue;
        try {
            out.push_back(boost::lexical_cast<double>(p));
        } catch (const boost::bad_lexical_cast&) {
            throw UsageError("field '" + key + "' expects a list of numbers, got '" + it->second + "'");
        }
    }
    if (out.empty()) throw UsageError("field '" + key + "' is empty");
    return out;
}

std::vector<std::string> RunConfig::echo() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_) out.push_back(k + "=" + v);
    return out;
}

PairPotential RunConfig::potential() const {
    const std::string prefix = "potential.";
    std::map<std::string, double> params;
    for (const auto& [k, v] : values_) {
        if (k.rfind(prefix, 0) != 0 || k == "potential.kind") continue;
        params[k.substr(prefix.size())] = number(k, 0.0);
    }
    try {
        return PairPotential::from_params(text("potential.kind", "zero"), params);
    } catch (const DomainError& e) {
        throw UsageError(std::string("potential: ") + e.what());
    }
}

BoxGeometry RunConfig::box() const {
    const auto d = integer("system.d", 1);
    const double L = number("system.L", 10.0);
    if (d < 1 || d > 3) throw UsageError("field 'system.d' must be 1, 2 or 3");
    if (!(L > 0)) throw UsageError("field 'system.L' must be positive");
    return BoxGeometry(int(d), L);
}

IntegrationOptions RunConfig::integration() const {
    IntegrationOptions o;
    try {
        o.method = parse_method(text("integration.method", "automatic"));
    } catch (const Error&) {
        throw UsageError("field 'integration.method' must be automatic, quadrature, monte_carlo or importance");
    }
    o.samples = integer("integration.samples", o.samples);
    o.seed = std::uint64_t(integer("integration.seed", std::int64_t(o.seed)));
    o.workers = int(integer("integration.workers", o.workers));
    o.batches = int(integer("integration.batches", o.batches));
    if (o.samples < 1) throw UsageError("field 'integration.samples' must be positive");
    if (o.workers < 1) throw UsageError("field 'integration.workers' must be positive");
    if (o.batches < 1) throw UsageError("field 'integration.batches' must be positive");
    const bool mc = o.method == Method::monte_carlo || o.method == Method::importance;
    if (mc && !seeded()) throw UsageError("field 'integration.seed' is required for Monte Carlo runs");
    return o;
}

OracleOptions RunConfig::oracle() const {
    OracleOptions o;
    o.samples = integer("oracle.samples", o.samples);
    o.seed = std::uint64_t(integer("oracle.seed", integer("integration.seed", std::int64_t(o.seed))));
    o.workers = int(integer("integration.workers", o.workers));
    o.lattice_cutoff = int(integer("system.lattice_cutoff", o.lattice_cutoff));
    if (o.samples < 1) throw UsageError("field 'oracle.samples' must be positive");
    return o;
}

ExpansionParams RunConfig::expansion() const {
    ExpansionParams p;
    p.N = int(integer("system.N", p.N));
    p.box = box();
    p.beta = number("system.beta", p.beta);
    p.lattice_cutoff = int(integer("system.lattice_cutoff", p.lattice_cutoff));
    p.potential = potential();
    p.n_max = int(integer("expansion.n_max", p.n_max));
    p.M = int(integer("expansion.M", p.M));
    p.a = number("expansion.a", p.a);
    p.c = number("expansion.c", p.c);
    p.integration = integration();
    if (p.box.d > 1 && !seeded())
        throw UsageError("field 'integration.seed' is required: cluster integrals in d > 1 use Monte Carlo");
    try {
        p.validate();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    return p;
}

}  // namespace canex::cli
