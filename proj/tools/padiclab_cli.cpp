// Experiment runner: exact p-adic Fourier / decoupling / Vinogradov /
// projection experiments with deterministic, seeded outputs.
//
// Exit codes: 0 ok, 1 property-test failure (failing instance serialized for
// replay), 2 invalid configuration, 3 budget exceeded.

#include "padiclab/cone.hpp"
#include "padiclab/decoupling.hpp"
#include "padiclab/experiment.hpp"
#include "padiclab/io.hpp"
#include "padiclab/util.hpp"
#include "padiclab/vinogradov.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace padiclab;

namespace {

struct CliError : std::runtime_error {
    int code;
    CliError(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

std::string provenance(const std::string& config_repr) { return provenance_line(config_repr); }

// ---------------------------------------------------------------------------
// selftest

int run_selftest(bool quick, int jobs) {
    (void)jobs;
    int failures = 0;
    auto check = [&](const std::string& name, bool ok) {
        std::cout << (ok ? "ok   " : "FAIL ") << name << "\n";
        if (!ok) ++failures;
    };

    {  // frame inverse
        bool ok = true;
        std::mt19937_64 rng(1);
        for (int n = 2; n <= 4 && ok; ++n) {
            PolyCurve g = PolyCurve::moment(n, 5, 16);
            for (int i = 0; i < (quick ? 25 : 200) && ok; ++i) {
                PadicScalar theta = PadicScalar::from_integer(
                    static_cast<long>(rng() % 10000), 5, 16);
                ok = derivative_frame(g, theta, PadicScalar::one(5, 16), n).matrix *
                         derivative_frame(g, -theta, PadicScalar::one(5, 16), n).matrix ==
                     PadicMatrix::identity(n, 5, 16);
            }
        }
        check("frame inverse identity", ok);
    }
    {  // vandermonde
        bool ok = true;
        std::mt19937_64 rng(2);
        for (int i = 0; i < (quick ? 50 : 500) && ok; ++i) {
            int n = 3 + static_cast<int>(rng() % 2);
            int k = 1 + static_cast<int>(rng() % (n - 1));
            PadicScalar t = PadicScalar::from_integer(static_cast<long>(rng() % 2401), 7, 16);
            PadicScalar s = PadicScalar::from_integer(static_cast<long>(rng() % 2401), 7, 16);
            if ((s - t).is_zero()) continue;
            try {
                vandermonde_valuation(n, k, t, s);
            } catch (const std::exception&) {
                ok = false;
            }
        }
        check("vandermonde valuation identity", ok);
    }
    {  // plancherel round trip
        bool ok = true;
        std::mt19937_64 rng(3);
        std::normal_distribution<double> gauss;
        for (int i = 0; i < (quick ? 30 : 200) && ok; ++i) {
            LatticeFunction f(3, 1, 2, 2);
            for (size_t c = 0; c < f.cell_count(); ++c) f[c] = {gauss(rng), gauss(rng)};
            LatticeFunction fh = f.transform();
            ok = std::abs(fh.l2_norm() - f.l2_norm()) <= 1e-9 * std::max(1.0, f.l2_norm());
            LatticeFunction back = fh.inverse_transform();
            for (size_t c = 0; c < f.cell_count() && ok; ++c)
                ok = std::abs(back[c] - f[c]) < 1e-9;
        }
        check("plancherel + round trip", ok);
    }
    {  // whitney
        auto c2 = whitney_verify(2, quick ? 2 : 3);
        auto c3 = whitney_verify(3, quick ? 2 : 3);
        check("whitney counts and cover", c2.ok() && c3.ok());
    }
    {  // moment identity (corrected Haar constant)
        auto rep = moment_identity_check(3, 1, 2, 2);
        check("fourier-to-counter moment identity", rep.rel_error < 1e-6);
    }
    {  // rescaled curve identity
        bool ok = true;
        std::mt19937_64 rng(4);
        for (int i = 0; i < (quick ? 20 : 100) && ok; ++i) {
            std::vector<int> m{1 + static_cast<int>(rng() % 3)};
            std::vector<long> s{2 * (1 + static_cast<long>(rng() % 3))};
            PadicScalar theta = PadicScalar::from_integer(
                static_cast<long>(rng() % 625), 5, 48);
            ok = rescaled_gamma_identity(4, m, s, theta, 5, 48).holds;
        }
        check("rescaling operator identity", ok);
    }
    std::cout << (failures == 0 ? "selftest passed" : "selftest FAILED") << "\n";
    return failures == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// decoupling

TupleStrategy parse_strategy(const std::string& s) {
    if (s == "single") return TupleStrategy::SingleWavePacket;
    if (s == "constant") return TupleStrategy::ConstantPhase;
    if (s == "gaussian") return TupleStrategy::GaussianCoeffs;
    if (s == "phases") return TupleStrategy::RandomPhases;
    throw CliError(2, "unknown strategy: " + s);
}

int run_decoupling_estimate(long p, int n, int support_exp, int depth, size_t count, double q,
                            double r, int trials, std::uint64_t seed, double eps,
                            const std::string& out) {
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out.empty()) {
        file.open(out);
        os = &file;
    }
    CsvWriter csv(*os, {"strategy", "trials", "best_ratio", "flat_bound", "log_paper_bound"},
                  provenance("estimate"));
    double flat = flat_bound(count, q, r);
    long double paper = log_moment_curve_constant(n, p, eps);
    for (const auto& [name, strat] :
         std::vector<std::pair<std::string, TupleStrategy>>{
             {"single", TupleStrategy::SingleWavePacket},
             {"constant", TupleStrategy::ConstantPhase},
             {"gaussian", TupleStrategy::GaussianCoeffs},
             {"phases", TupleStrategy::RandomPhases}}) {
        double best = 0.0;
        for (int tr = 0; tr < trials; ++tr) {
            CellCapSystem sys = random_cell_system(p, n, support_exp, depth, count,
                                                   seed + 1000 * tr);
            FunctionTuple t = make_tuple(sys, strat, seed + tr, q, r);
            best = std::max(best, decoupling_ratio(t));
        }
        csv.row(name, trials, best, flat, static_cast<double>(paper));
    }
    return 0;
}

int run_decoupling_harness(const std::string& lemma, int trials, std::uint64_t seed,
                           const std::string& out, const std::string& replay_path, int jobs) {
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out.empty()) {
        file.open(out);
        os = &file;
    }
    CsvWriter csv(*os, {"lemma", "instance", "lhs", "rhs", "pass", "seed"},
                  provenance("harness:" + lemma));
    const long p = 3;
    // deterministic worker pool: record slots are keyed by trial index
    std::vector<HarnessRecord> records(static_cast<size_t>(trials));
    std::vector<std::string> errors(static_cast<size_t>(trials));
    auto one_trial = [&](size_t tr) {
        std::uint64_t s = seed + static_cast<std::uint64_t>(tr);
        HarnessRecord rec;
        try {
            if (lemma == "flat") {
                CellCapSystem sys = random_cell_system(p, 1, 1, 1, 3, s);
                FunctionTuple t = make_tuple(sys, TupleStrategy::GaussianCoeffs, s, 2.0, 6.0);
                rec = HarnessRecord{"flat", decoupling_ratio(t), flat_bound(3, 2.0, 6.0),
                                    false, s};
            } else if (lemma == "affine") {
                CellCapSystem sys = random_cell_system(p, 1, 1, 1, 3, s);
                FunctionTuple t = make_tuple(sys, TupleStrategy::GaussianCoeffs, s, 2.0, 4.0);
                RationalAffineMap map;
                map.a = {{Rational(3)}};
                map.shift = {Rational(1, 3)};
                rec = check_affine_invariance(t, map, 3, 3, s);
            } else if (lemma == "tensor") {
                CellCapSystem s1 = random_cell_system(p, 1, 1, 1, 2, s);
                CellCapSystem s2 = random_cell_system(p, 1, 0, 2, 3, s + 1);
                rec = check_tensorization(
                    make_tuple(s1, TupleStrategy::RandomPhases, s, 2.0, 6.0),
                    make_tuple(s2, TupleStrategy::GaussianCoeffs, s + 1, 2.0, 6.0), s);
            } else if (lemma == "cylinder") {
                CellCapSystem s1 = random_cell_system(p, 1, 1, 1, 3, s);
                rec = check_cylindrical(
                    make_tuple(s1, TupleStrategy::GaussianCoeffs, s, 2.0, 4.0),
                    LatticeFunction::indicator_zpn(p, 1, 1, 1), s);
            } else if (lemma == "recoupling") {
                CellCapSystem sys = random_cell_system(p, 1, 1, 1, 3, s);
                rec = check_recoupling(
                    make_tuple(sys, TupleStrategy::RandomPhases, s, 2.0, 6.0), s);
            } else if (lemma == "multiplicativity") {
                CellCapSystem sys = random_cell_system(p, 1, 0, 2, 9, s);
                rec = check_multiplicativity(
                    make_tuple(sys, TupleStrategy::GaussianCoeffs, s, 2.0, 4.0), 3, 3, s);
            } else if (lemma == "interpolation") {
                CellCapSystem sys = random_cell_system(p, 1, 0, 2, 9, s);
                rec = check_interpolation(
                    make_tuple(sys, TupleStrategy::GaussianCoeffs, s, 2.0, 4.0), 2.0, 6.0,
                    0.5, s);
            } else if (lemma == "local") {
                std::mt19937_64 rng(s);
                std::normal_distribution<double> gauss;
                FunctionTuple t;
                t.q = 2.0;
                t.r = 6.0;
                for (long cap = 0; cap < p; ++cap) {
                    LatticeFunction fh(p, 1, 0, 2);
                    for (long sub = 0; sub < p; ++sub)
                        fh[fh.flat_index({cap + p * sub})] = Complex(gauss(rng), gauss(rng));
                    t.parts.push_back(fh.inverse_transform());
                    std::vector<PadicScalar> cc{PadicScalar::from_integer(cap, p, 48)};
                    t.caps.emplace_back(PadicVector(std::move(cc)),
                                        PadicMatrix::identity(1, p, 48),
                                        std::vector<long>{1}, "depth1");
                }
                auto lrec = check_local_decoupling(t, -1);
                rec = HarnessRecord{"local", lrec.minkowski_lhs, lrec.minkowski_rhs, false, s};
                if (lrec.tiling_defect > 1e-9 || lrec.worst_leak > 1e-9)
                    rec.lhs = rec.rhs + 1;  // force a visible failure
            } else if (lemma == "holder") {
                CellCapSystem sf = random_cell_system(p, 2, 1, 1, 3, s);
                CellCapSystem sg = random_cell_system(p, 2, 1, 1, 3, s + 1);
                rec = check_holder_chain(
                    make_tuple(sf, TupleStrategy::GaussianCoeffs, s, 2.0, 6.0),
                    make_tuple(sg, TupleStrategy::RandomPhases, s + 1, 2.0, 6.0), 2, 1, s);
            } else {
                errors[tr] = "unknown lemma id: " + lemma;
                return;
            }
        } catch (const std::exception& e) {
            errors[tr] = std::string("harness instance failed to build: ") + e.what();
            return;
        }
        records[tr] = std::move(rec);
    };
    parallel_for(static_cast<size_t>(trials), jobs, one_trial);

    bool all_pass = true;
    std::uint64_t failing_seed = 0;
    for (size_t tr = 0; tr < records.size(); ++tr) {
        if (!errors[tr].empty()) throw CliError(2, errors[tr]);
        const HarnessRecord& rec = records[tr];
        bool pass = rec.pass(1e-9);
        csv.row(rec.lemma, std::to_string(fnv1a(rec.lemma + std::to_string(rec.lhs))),
                rec.lhs, rec.rhs, pass ? "1" : "0", static_cast<long long>(rec.seed));
        if (!pass) {
            all_pass = false;
            failing_seed = rec.seed;
        }
    }
    if (!all_pass) {
        nlohmann::json replay{{"lemma", lemma}, {"seed", failing_seed}};
        std::ofstream rp(replay_path.empty() ? "harness_replay.json" : replay_path);
        rp << replay.dump(2) << "\n";
        std::cerr << "harness failure; replay written\n";
        return 1;
    }
    return 0;
}

// ---------------------------------------------------------------------------

int dispatch(int argc, char** argv) {
    CLI::App app{"exact p-adic projection / decoupling laboratory"};
    app.require_subcommand(1);
    int jobs = 1;
    app.add_option("--jobs", jobs, "parallel worker cap (results are job-count independent)");

    auto* selftest = app.add_subcommand("selftest", "run the exact-identity suite");
    bool quick = false;
    selftest->add_flag("--quick", quick, "smaller sweeps (< 60 s)");

    auto* fourier = app.add_subcommand("fourier", "fourier transform utilities");
    auto* roundtrip = fourier->add_subcommand("roundtrip", "transform round-trip check");
    long fr_p = 3;
    int fr_n = 1, fr_a = 2, fr_b = 2, fr_trials = 100;
    std::uint64_t fr_seed = 1;
    roundtrip->add_option("--p", fr_p);
    roundtrip->add_option("--n", fr_n);
    roundtrip->add_option("--a", fr_a);
    roundtrip->add_option("--b", fr_b);
    roundtrip->add_option("--trials", fr_trials);
    roundtrip->add_option("--seed", fr_seed);

    auto* dec = app.add_subcommand("decoupling", "decoupling ratios and lemma harness");
    auto* est = dec->add_subcommand("estimate", "lower-bound search");
    long d_p = 3;
    int d_n = 1, d_a = 1, d_depth = 1, d_trials = 100;
    size_t d_count = 3;
    double d_q = 2.0, d_r = 6.0, d_eps = 0.25;
    std::uint64_t d_seed = 7;
    std::string d_out;
    est->add_option("--p", d_p);
    est->add_option("--n", d_n);
    est->add_option("--support-exp", d_a);
    est->add_option("--depth", d_depth);
    est->add_option("--count", d_count);
    est->add_option("--q", d_q);
    est->add_option("--r", d_r);
    est->add_option("--eps", d_eps);
    est->add_option("--trials", d_trials);
    est->add_option("--seed", d_seed);
    est->add_option("--out", d_out);
    auto* har = dec->add_subcommand("harness", "per-lemma randomized sweeps");
    std::string h_lemma = "flat", h_out, h_replay;
    int h_trials = 100;
    std::uint64_t h_seed = 7;
    har->add_option("--lemma", h_lemma,
                    "flat|affine|tensor|cylinder|local|recoupling|multiplicativity|interpolation|holder");
    har->add_option("--trials", h_trials);
    har->add_option("--seed", h_seed);
    har->add_option("--out", h_out);
    har->add_option("--replay", h_replay);

    auto* vino = app.add_subcommand("vinogradov", "exact Vinogradov counting");
    auto* vcount = vino->add_subcommand("count", "exact J_{s,n}(N)");
    long v_s = 2, v_N = 10;
    int v_n = 2;
    double v_budget = 2e9;
    vcount->add_option("--s", v_s)->required();
    vcount->add_option("--n", v_n)->required();
    vcount->add_option("--N", v_N)->required();
    vcount->add_option("--budget", v_budget);
    auto* vbound = vino->add_subcommand("bound", "explicit bound in log space");
    vbound->add_option("--s", v_s)->required();
    vbound->add_option("--n", v_n)->required();
    vbound->add_option("--N", v_N)->required();
    auto* vmoment = vino->add_subcommand("moment", "fourier moment cross-check");
    long m_p = 3, m_s = 2;
    int m_l = 1, m_n = 2;
    vmoment->add_option("--p", m_p)->required();
    vmoment->add_option("--l", m_l)->required();
    vmoment->add_option("--s", m_s)->required();
    vmoment->add_option("--n", m_n)->required();

    auto* proj = app.add_subcommand("projection", "projection experiments");
    auto* prun = proj->add_subcommand("run", "run from a JSON config");
    std::string config_path;
    prun->add_option("--config", config_path)->required();

    auto* kak = app.add_subcommand("kakeya", "tube incidence experiment");
    auto* krun = kak->add_subcommand("run", "run from a JSON config");
    krun->add_option("--config", config_path)->required();

    auto* cst = app.add_subcommand("constants", "explicit constants in log space");
    auto* ceval = cst->add_subcommand("eval", "evaluate one constant");
    std::string which = "decprop";
    int c_n = 3;
    long c_p = 5;
    double c_eps = 0.1, c_c = 1.0, c_alpha = 1.0;
    long c_s = 2, c_N = 1000000;
    ceval->add_option("--which", which, "proj|kakeya|decprop|momentcurve|vino");
    ceval->add_option("--n", c_n);
    ceval->add_option("--p", c_p);
    ceval->add_option("--eps", c_eps);
    ceval->add_option("--c", c_c);
    ceval->add_option("--alpha", c_alpha);
    ceval->add_option("--s", c_s);
    ceval->add_option("--N", c_N);

    CLI11_PARSE(app, argc, argv);

    if (selftest->parsed()) return run_selftest(quick, jobs);

    if (roundtrip->parsed()) {
        std::mt19937_64 rng(fr_seed);
        std::normal_distribution<double> gauss;
        double worst = 0;
        for (int t = 0; t < fr_trials; ++t) {
            LatticeFunction f(fr_p, fr_n, fr_a, fr_b);
            for (size_t i = 0; i < f.cell_count(); ++i) f[i] = {gauss(rng), gauss(rng)};
            LatticeFunction back = f.transform().inverse_transform();
            for (size_t i = 0; i < f.cell_count(); ++i)
                worst = std::max(worst, std::abs(back[i] - f[i]));
        }
        std::cout << "round-trip max error " << worst << "\n";
        return worst < 1e-9 ? 0 : 1;
    }

    if (est->parsed())
        return run_decoupling_estimate(d_p, d_n, d_a, d_depth, d_count, d_q, d_r, d_trials,
                                       d_seed, d_eps, d_out);
    if (har->parsed())
        return run_decoupling_harness(h_lemma, h_trials, h_seed, h_out, h_replay, jobs);

    if (vcount->parsed()) {
        VinoInstance inst{v_s, v_n, v_N};
        std::cerr << "table estimate: " << vino_table_estimate(inst) << " bytes\n";
        BigInt j;
        try {
            j = count_solutions(inst, v_budget);
        } catch (const std::overflow_error& e) {
            throw CliError(3, e.what());
        }
        auto rep = (v_s >= 2 && v_n >= 2) ? bound_value(inst)
                                          : VinoBoundReport{0.0L, true, 0.0L};
        CsvWriter csv(std::cout, {"s", "n", "N", "J", "log_bound", "below_threshold"},
                      provenance("count"));
        csv.row(v_s, v_n, v_N, j.get_str(), static_cast<double>(rep.log_bound),
                rep.below_threshold ? "1" : "0");
        return 0;
    }
    if (vbound->parsed()) {
        auto rep = bound_value({v_s, v_n, v_N});
        CsvWriter csv(std::cout, {"s", "n", "N", "log_bound", "below_threshold"},
                      provenance("bound"));
        csv.row(v_s, v_n, v_N, static_cast<double>(rep.log_bound),
                rep.below_threshold ? "1" : "0");
        return 0;
    }
    if (vmoment->parsed()) {
        MomentIdentityReport rep;
        try {
            rep = moment_identity_check(m_p, m_l, m_s, m_n);
        } catch (const std::overflow_error& e) {
            throw CliError(3, e.what());
        } catch (const std::invalid_argument& e) {
            throw CliError(2, e.what());
        }
        std::cout << "lattice moment = " << rep.lattice_moment << "\n"
                  << "p^{l n^2} * J  = " << rep.exact_side << "  (J = "
                  << rep.exact_count.get_str() << ")\n"
                  << "p^{l n} * J    = " << rep.stated_side
                  << "  (source display; misses the Haar factor)\n"
                  << "rel error      = " << rep.rel_error << "\n";
        return rep.rel_error < 1e-6 ? 0 : 1;
    }

    if (prun->parsed() || krun->parsed()) {
        std::ifstream in(config_path);
        if (!in) throw CliError(2, "config file not found: " + config_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const std::exception& e) {
            throw CliError(2, std::string("config parse error: ") + e.what());
        }
        ProjectionExperimentConfig c;
        try {
            c = projection_config_from_json(j);
        } catch (const std::invalid_argument& e) {
            throw CliError(2, e.what());
        }
        c.jobs = jobs;
        try {
            run_projection_experiment(c);
        } catch (const std::overflow_error& e) {
            throw CliError(3, e.what());
        }
        return 0;
    }

    if (ceval->parsed()) {
        ConstantQuery q;
        if (which == "proj") q.which = NamedConstant::Projection;
        else if (which == "kakeya") q.which = NamedConstant::Kakeya;
        else if (which == "decprop") q.which = NamedConstant::Decoupling;
        else if (which == "momentcurve") q.which = NamedConstant::MomentCurve;
        else if (which == "vino") q.which = NamedConstant::VinogradovBound;
        else throw CliError(2, "unknown constant: " + which);
        q.n = c_n;
        q.p = c_p;
        q.eps = c_eps;
        q.c = c_c;
        q.alpha = c_alpha;
        q.s = c_s;
        q.log_N = std::log(static_cast<double>(c_N));
        long double v;
        try {
            v = evaluate_log_constant(q);
        } catch (const std::invalid_argument& e) {
            throw CliError(2, e.what());
        }
        CsvWriter csv(std::cout, {"which", "n", "p", "eps", "log_value"}, provenance("constants"));
        csv.row(which, c_n, c_p, c_eps, static_cast<double>(v));
        return 0;
    }

    throw CliError(2, "no subcommand executed");
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code;
    } catch (const std::overflow_error& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
