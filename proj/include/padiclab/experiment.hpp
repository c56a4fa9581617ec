#pragma once

// The projection / kakeya experiment pipeline shared by the CLI and the
// acceptance suite: JSON config in, deterministic CSV artifacts out.

#include "padiclab/constants.hpp"
#include "padiclab/io.hpp"
#include "padiclab/projection.hpp"
#include "padiclab/util.hpp"

#include <filesystem>
#include <fstream>

namespace padiclab {

inline std::string provenance_line(const std::string& config_repr) {
    return "padiclab " + std::string(kVersion) + " config=" +
           std::to_string(fnv1a(config_repr));
}

struct ProjectionExperimentConfig {
    long p = 5;
    int n = 3;
    int m = 1;
    int l0 = 4;
    int b0_exp = 3;  // finest scale b0 = p^{-b0_exp}
    int b1_exp = 0;  // coarsest scale b1 = p^{-b1_exp}
    double alpha = 1.2;
    double eps = 0.01;
    bool use_s_override = false;
    double s_override = 0.0;
    double t_mass_threshold = 0.0;
    std::string generator = "regular";
    std::uint64_t seed = 42;
    std::vector<int> digits{0, 1};
    std::string out_dir = ".";
    int jobs = 1;
    std::string repr;  // canonical config text for the provenance line

    void validate() const {
        if (p <= n - 1)
            throw std::invalid_argument(
                "projection requires p > n - 1 (factorial units in the projection)");
        if (m < 1 || m >= n) throw std::invalid_argument("need 1 <= m < n");
        if (b0_exp < b1_exp || b0_exp > l0)
            throw std::invalid_argument("need b1 <= b0 <= l0 as scale exponents");
        if (alpha <= 0) throw std::invalid_argument("need alpha > 0");
    }
};

inline ProjectionExperimentConfig projection_config_from_json(const nlohmann::json& j) {
    ProjectionExperimentConfig c;
    c.p = j.value("p", c.p);
    c.n = j.value("n", c.n);
    c.m = j.value("m", c.m);
    c.l0 = j.value("l0", c.l0);
    c.b0_exp = j.value("b0", c.b0_exp);
    c.b1_exp = j.value("b1", c.b1_exp);
    c.alpha = j.value("alpha", c.alpha);
    c.eps = j.value("epsilon", c.eps);
    if (j.contains("s_override")) {
        c.use_s_override = true;
        c.s_override = j["s_override"].get<double>();
    }
    c.t_mass_threshold = j.value("t_mass_threshold", c.t_mass_threshold);
    if (j.contains("generator")) {
        const auto& g = j["generator"];
        c.generator = g.value("kind", c.generator);
        c.seed = g.value("seed", c.seed);
        if (g.contains("digits")) c.digits = g["digits"].get<std::vector<int>>();
    }
    c.out_dir = j.value("out_dir", c.out_dir);
    nlohmann::json canon = j;
    canon.erase("out_dir");  // artifacts must not depend on where they land
    c.repr = canon.dump();
    c.validate();
    return c;
}

inline FiniteFractalSet build_experiment_set(const ProjectionExperimentConfig& c) {
    if (c.generator == "grid") return full_grid_set(c.p, c.n, c.l0);
    if (c.generator == "cantor") return cantor_digit_set(c.p, c.n, c.l0, c.digits);
    if (c.generator == "regular") return random_regular_set(c.p, c.n, c.l0, c.alpha, c.seed);
    throw std::invalid_argument("unknown generator kind: " + c.generator);
}

// Writes nu_t_masses.csv, exceptional.csv, kakeya.csv under out_dir.
inline void run_projection_experiment(const ProjectionExperimentConfig& c) {
    namespace fs = std::filesystem;
    fs::create_directories(c.out_dir);
    FiniteFractalSet f = build_experiment_set(c);
    FrostmanReport frost = frostman_constant(f, c.alpha, c.b0_exp, c.b1_exp);

    ExceptionalConfig ecfg;
    ecfg.m = c.m;
    ecfg.alpha = c.alpha;
    ecfg.eps = c.eps;
    ecfg.c_alpha = frost.c_alpha;
    ecfg.use_s_override = c.use_s_override;
    ecfg.s_override = c.s_override;
    ecfg.t_mass_threshold = c.t_mass_threshold;

    std::ofstream massf(fs::path(c.out_dir) / "nu_t_masses.csv");
    CsvWriter masscsv(massf, {"t", "center", "b", "mass"}, provenance_line(c.repr));
    std::ofstream excf(fs::path(c.out_dir) / "exceptional.csv");
    CsvWriter exccsv(excf, {"b", "bad_t_fraction", "worst_t", "bad_w_fraction"},
                     provenance_line(c.repr));

    std::vector<int> kvals;
    for (int k = c.b1_exp; k <= c.b0_exp; ++k) kvals.push_back(k);
    std::vector<ExceptionalReport> reports(kvals.size());
    parallel_for(kvals.size(), c.jobs,
                 [&](size_t i) { reports[i] = exceptional_sets(f, ecfg, kvals[i]); });

    for (size_t i = 0; i < kvals.size(); ++i) {
        int k = kvals[i];
        std::string b = "p^-" + std::to_string(k);
        long long tmod = 1;
        for (int j = 0; j < k; ++j) tmod *= c.p;
        for (long long t = 0; t < tmod; ++t) {
            Projector pr = make_projector(c.p, c.n, c.m, c.l0, t);
            auto masses = pushforward_masses(f, pr, k);
            for (const auto& [center, count] : masses) {
                std::string ctr;
                for (size_t d = 0; d < center.size(); ++d) {
                    if (d) ctr += ";";
                    ctr += std::to_string(center[d]);
                }
                Rational mass(count, static_cast<long>(f.size()));
                mass.canonicalize();
                masscsv.row(t, ctr, b, mass);
            }
        }
        exccsv.row(b, reports[i].bad_t_fraction, reports[i].worst_t,
                   reports[i].worst_bad_mass);
    }

    std::ofstream kakf(fs::path(c.out_dir) / "kakeya.csv");
    CsvWriter kakcsv(kakf, {"delta", "W_count", "incidence_min", "incidence_max", "log_bound"},
                     provenance_line(c.repr));
    for (int k = std::max(1, c.b1_exp); k <= c.b0_exp; ++k) {
        long long tmod = 1;
        for (int j = 0; j < k; ++j) tmod *= c.p;
        std::vector<TubeFamily> fams;
        std::vector<std::set<long long>> sel;
        for (long long theta = 0; theta < tmod; ++theta) {
            fams.push_back(tube_family(c.p, c.n, c.m, k, c.l0, theta));
            std::set<long long> tubes;
            for (const auto& x : f.points) tubes.insert(fams.back().tube_of(x));
            sel.push_back(std::move(tubes));
        }
        size_t wcount = 0;
        for (const auto& s : sel) wcount += s.size();
        long inc_min = std::numeric_limits<long>::max();
        long inc_max = 0;
        for (const auto& x : f.points) {
            long cnt = incidence_count(fams, sel, x);
            inc_min = std::min(inc_min, cnt);
            inc_max = std::max(inc_max, cnt);
        }
        double logp = std::log(static_cast<double>(c.p));
        double log_delta = -k * logp;
        double c0 = std::min(
            1.0, static_cast<double>(inc_min) / std::exp((c.eps - 1.0) * log_delta));
        long double logC = log_kakeya_constant(c.n, c.p, c.eps, std::max(c0, 1e-300));
        double log_bound = static_cast<double>(logC) - std::log(frost.c_alpha) +
                           (-1.0 - c.alpha + std::pow(10.0, 10.0 * c.n) * std::sqrt(c.eps)) *
                               log_delta;
        kakcsv.row("p^-" + std::to_string(k), wcount, inc_min, inc_max, log_bound);
    }
}

}  // namespace padiclab
