// Acceptance gate: runs every criterion and prints one PASS/FAIL line each.
// Exit status is non-zero if any criterion fails.
//
// Usage: sspmcts_acceptance [artifact-dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "hoo_checks.hpp"
#include "sspmcts/bench/results.hpp"
#include "sspmcts/bench/runner.hpp"
#include "sspmcts/sspmcts.hpp"
#include "test_support.hpp"

#ifndef SSPMCTS_BENCH_PATH
#error "SSPMCTS_BENCH_PATH must name the sspmcts_bench executable"
#endif

using namespace sspmcts;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

fs::path g_artifacts;

bool close_rel(double got, double want, double rel = 1e-9) {
    return std::abs(got - want) <= rel * std::max(1.0, std::abs(want));
}

// 1. Worked values of the scoring and aggregation formulas.
Verdict equation_fixtures() {
    Verdict v;
    int checked = 0;
    const auto expect = [&](const char* what, double got, double want) {
        ++checked;
        const bool ok = std::isinf(want) ? (std::isinf(got) && got > 0) : close_rel(got, want);
        if (!ok) {
            v.pass = false;
            std::ostringstream s;
            s.precision(17);
            s << what << " = " << got << " (want " << want << "); ";
            v.detail += s.str();
        }
    };
    const double inf = hoo::kInfinity;
    expect("ucb1(0.5,1,1,0.7)", ucb1_score(0.5, 1, 1, 0.7), 0.5);
    expect("ucb1(1,5,10,1)", ucb1_score(1.0, 5, 10, 1.0), 1.9597051824376162);
    expect("ucb1(unvisited)", ucb1_score(3.0, 0, 10, 1.0), inf);
    expect("pw_allowance(4,1,0.5)", static_cast<double>(pw_allowance(4, 1.0, 0.5)), 2.0);
    expect("pw_allowance(100,2,0.5)", static_cast<double>(pw_allowance(100, 2.0, 0.5)), 20.0);
    expect("hoo_u(unsampled)", hoo::hoo_u(0.5, 0, 10, 2, 1.0, 0.5), inf);
    expect("hoo_u(0.5,5,10,2,1,0.5)", hoo::hoo_u(0.5, 5, 10, 2, 1.0, 0.5), 1.7097051824376162);
    expect("hoo_b(leaf)", hoo::hoo_b(2.0, {}), 2.0);
    const std::vector<double> kids{1.5, 1.8};
    expect("hoo_b(2,{1.5,1.8})", hoo::hoo_b(2.0, kids), 1.8);
    const std::vector<double> open{1.5, inf};
    expect("hoo_b(2,{1.5,inf})", hoo::hoo_b(2.0, open), 2.0);

    hoo::Region line;
    line.axes[0] = {0.0, 1.0};
    line.dims = 1;
    hoo::HooTree leaf(line, {});
    leaf.record(0, 0.8, 4);
    leaf.refresh();
    expect("refresh(leaf 0.8/4)", leaf.root().r_hat, 0.2);

    Rng rng(0);
    hoo::HooTree internal(line, {});
    internal.query(rng);
    internal.record(0, 1.0, 1);
    internal.record(1, 1.0, 2);
    internal.record(2, 3.0, 3);
    internal.refresh();
    expect("refresh(child n=2)", internal.node(1).r_hat, 0.5);
    expect("refresh(child n=3)", internal.node(2).r_hat, 1.0);
    expect("refresh(internal)", internal.root().r_hat, 0.8333333333333334);

    const envs::Pendulum pendulum;
    const auto p = pendulum.step({0.1, 0.0}, ContinuousControl{0.0});
    expect("pendulum theta_dot'", p.next_state[1], 0.07487506248512112);
    expect("pendulum theta'", p.next_state[0], 0.10374375312425606);
    expect("pendulum hanging reward", pendulum.step({std::numbers::pi, 0.0}, ContinuousControl{0.0}).reward,
           -9.869604401089358);
    const envs::MountainCar car;
    expect("cmc v'", car.step({-0.5, 0.0}, ContinuousControl{0.0}).next_state[1], -0.00017684300416925727);
    if (v.pass) {
        v.detail = std::to_string(checked) + " values within 1e-9 relative";
    }
    return v;
}

// 2. HOO structure under 10^4 seeded queries, 1-D and 2-D.
Verdict hoo_structure() {
    hoo::Region one;
    one.axes[0] = {-2.0, 2.0};
    one.dims = 1;
    hoo::Region two;
    two.axes = {Interval{-1.0, 1.0}, Interval{0.5, 20.5}};
    two.dims = 2;
    Verdict v;
    const std::string a = testing::run_hoo_suite(one, 11);
    const std::string b = testing::run_hoo_suite(two, 12);
    v.pass = a.empty() && b.empty();
    v.detail = v.pass ? "1-D and 2-D trees, 10000 queries each" : "1-D: " + a + " | 2-D: " + b;
    return v;
}

/// Optimal first actions on the corridor by value iteration over all cells.
/// At a wall, moving into it and staying put are both optimal.
std::vector<std::size_t> corridor_oracle(const envs::Corridor& env, int cell, double gamma) {
    std::vector<double> value(static_cast<std::size_t>(env.length()), 0.0);
    const auto q = [&](int c, std::size_t a) {
        const auto o = env.step({static_cast<double>(c)}, DiscreteControl{a});
        return o.reward + (o.terminal ? 0.0 : gamma * value[static_cast<std::size_t>(o.next_state[0])]);
    };
    for (int sweep = 0; sweep < 1000; ++sweep) {
        for (int c = 0; c < env.length(); ++c) {
            if (c != env.target()) {
                value[static_cast<std::size_t>(c)] = std::max({q(c, 0), q(c, 1), q(c, 2)});
            }
        }
    }
    const double best = std::max({q(cell, 0), q(cell, 1), q(cell, 2)});
    std::vector<std::size_t> optimal;
    for (std::size_t a = 0; a < 3; ++a) {
        if (q(cell, a) >= best - 1e-12) {
            optimal.push_back(a);
        }
    }
    return optimal;
}

// 3. With a one-step period and a large budget the search agrees with
// exhaustive enumeration.
Verdict oracle_equivalence() {
    constexpr std::uint64_t kBudget = 20000;
    int corridor_hits = 0;
    const envs::Corridor corridor;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        PlannerConfig cfg = envs::default_config("corridor");
        cfg.tau_min = 1.0;
        cfg.tau_max = 1.0;
        cfg.seed = seed;
        RandomStreams streams(seed);
        const auto start = corridor.initial_state(streams.init);
        SearchBudget budget{kBudget, 0};
        const auto r = search(start, corridor, cfg, PlannerKind::Ssp, streams, budget);
        const auto chosen = std::get<DiscreteControl>(r.decision.control).index;
        const auto optimal = corridor_oracle(corridor, static_cast<int>(start[0]), cfg.gamma);
        corridor_hits += r.decision.period.steps == 1 &&
                         std::find(optimal.begin(), optimal.end(), chosen) != optimal.end();
    }

    int tree_hits = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        PlannerConfig cfg;
        cfg.tau_min = 1.0;
        cfg.tau_max = 1.0;
        cfg.rollout_depth_steps = 3;
        cfg.seed = seed;
        const auto mdp = testing::TreeMdp::random(3, 1000 + seed, cfg.gamma);
        RandomStreams streams(seed);
        SearchBudget budget{kBudget, 0};
        const auto r = search(testing::TreeMdp::State{0.0, 0.0}, mdp, cfg, PlannerKind::Ssp, streams, budget);
        tree_hits += r.decision.period.steps == 1 &&
                     std::get<DiscreteControl>(r.decision.control).index == mdp.optimal_first_action(cfg.gamma);
    }
    Verdict v;
    v.pass = corridor_hits == 100 && tree_hits == 100;
    v.detail = "corridor " + std::to_string(corridor_hits) + "/100, depth-3 tree " + std::to_string(tree_hits) +
               "/100 at " + std::to_string(kBudget) + " simulations";
    return v;
}

// 4. SSP with a fixed one-step period reproduces PW+HOOT decision by decision.
Verdict baseline_identity() {
    const envs::Pendulum env;
    int identical = 0;
    std::string first_mismatch;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        PlannerConfig hoot = envs::default_config("pendulum");
        hoot.seed = seed;
        PlannerConfig fixed = hoot;
        fixed.tau_min = 1.0;
        fixed.tau_max = 1.0;
        const auto a = run_episode(env, env, fixed, PlannerKind::Ssp);
        const auto b = run_episode(env, env, hoot, PlannerKind::PwHoot);
        bool same = a.decisions.size() == b.decisions.size();
        for (std::size_t i = 0; same && i < a.decisions.size(); ++i) {
            same = a.decisions[i].decision == b.decisions[i].decision && a.decisions[i].state == b.decisions[i].state;
        }
        identical += same;
        if (!same && first_mismatch.empty()) {
            first_mismatch = " (first mismatch at seed " + std::to_string(seed) + ")";
        }
    }
    return {identical == 20, std::to_string(identical) + "/20 pendulum episodes identical" + first_mismatch};
}

struct Batch {
    std::string env;
    std::vector<bench::ResultRow> rows;
};

std::vector<double> rewards_of(const Batch& b, const std::string& planner, int sims) {
    std::vector<double> out;
    for (const auto& r : b.rows) {
        if (r.planner == planner && r.sims_per_step == sims) {
            out.push_back(r.accumulated_reward);
        }
    }
    return out;
}

double mean(const std::vector<double>& x) {
    double s = 0.0;
    for (const double v : x) {
        s += v;
    }
    return s / static_cast<double>(x.size());
}

double variance(const std::vector<double>& x) {
    const double m = mean(x);
    double s = 0.0;
    for (const double v : x) {
        s += (v - m) * (v - m);
    }
    return s / static_cast<double>(x.size() - 1);
}

/// One-sided Welch t-test of mean(a) > mean(b); returns the p-value.
double welch_greater(const std::vector<double>& a, const std::vector<double>& b) {
    const double va = variance(a) / static_cast<double>(a.size());
    const double vb = variance(b) / static_cast<double>(b.size());
    const double se = std::sqrt(va + vb);
    if (se == 0.0) {
        return mean(a) > mean(b) ? 0.0 : 1.0;
    }
    const double t = (mean(a) - mean(b)) / se;
    const double df = (va + vb) * (va + vb) /
                      (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
    const boost::math::students_t dist(df);
    return boost::math::cdf(boost::math::complement(dist, t));
}

Batch run_directional_batch(const std::string& env, int episodes, std::uint64_t seed_base) {
    bench::RunSpec spec;
    spec.env = env;
    spec.planners = {PlannerKind::Ssp, PlannerKind::Pw};
    spec.sims_per_step = {10, 20, 40};
    spec.episodes = episodes;
    spec.seed_base = seed_base;
    Batch b{env, bench::run_batch(spec)};
    const PlannerConfig cfg = bench::resolve_config(spec);
    std::ofstream rows(g_artifacts / (env + "_rows.csv"));
    bench::write_rows(rows, b.rows);
    std::ofstream summary(g_artifacts / (env + "_summary.csv"));
    bench::write_summary(summary, bench::summarize(b.rows));
    std::ofstream hist(g_artifacts / (env + "_tau_hist.csv"));
    bench::write_tau_histogram(hist, b.rows, cfg.tau_max_steps());
    return b;
}

// 5. SSP is at least as good as PW at every budget, and strictly better on
// Continuous Mountain Car at the largest budget.
Verdict directional(const Batch& pendulum, const Batch& cmc) {
    Verdict v;
    std::ostringstream s;
    s.precision(4);
    for (const Batch* b : {&pendulum, &cmc}) {
        s << b->env << ":";
        for (const int sims : {10, 20, 40}) {
            const double ssp = mean(rewards_of(*b, "ssp", sims));
            const double pw = mean(rewards_of(*b, "pw", sims));
            s << " " << sims << "[ssp " << ssp << " pw " << pw << "]";
            v.pass = v.pass && ssp >= pw;
        }
        s << "; ";
    }
    const double p = welch_greater(rewards_of(cmc, "ssp", 40), rewards_of(cmc, "pw", 40));
    s << "cmc@40 one-sided Welch p = " << p;
    v.pass = v.pass && p < 0.05;
    v.detail = s.str();
    return v;
}

std::vector<double> ssp_taus(const Batch& b) {
    std::vector<double> taus;
    for (const auto& r : b.rows) {
        if (r.planner == "ssp") {
            taus.insert(taus.end(), r.taus.begin(), r.taus.end());
        }
    }
    return taus;
}

// 6. Short periods on the pendulum, widely spread periods on mountain car.
Verdict period_distribution(const Batch& pendulum, const Batch& cmc) {
    const auto p = ssp_taus(pendulum);
    const auto c = ssp_taus(cmc);
    const double median = bench::quantile(p, 0.5);
    const double q1 = bench::quantile(c, 0.25);
    const double q3 = bench::quantile(c, 0.75);
    std::ostringstream s;
    s << "pendulum median tau " << median << " (need <= 2), cmc IQR " << q3 - q1 << " = [" << q1 << ", " << q3
      << "] (need >= 3); histograms in " << g_artifacts.string();
    return {median <= 2.0 && q3 - q1 >= 3.0, s.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// 7. The CLI writes byte-identical files when invoked twice with the same flags.
Verdict cli_determinism() {
    const fs::path dir = g_artifacts / "determinism";
    fs::create_directories(dir);
    struct Case {
        std::string args;
        std::vector<std::string> files;
    };
    const std::vector<Case> cases{
        {"run --env pendulum --planner ssp,pw,pw-hoot --sims-per-step 10,20 --episodes 3 --seed 5 --out {}/rows.csv "
         "--tau-hist {}/hist.csv",
         {"rows.csv", "hist.csv"}},
        {"sweep --env cmc --planner ssp,pw --sims-per-step 10 --episodes 2 --seed 9 --out {}/rows.csv --summary "
         "{}/summary.csv",
         {"rows.csv", "summary.csv"}},
        {"sweep --env corridor --planner ssp,pw-hoot --sims-per-step 10 --episodes 3 --seed 2 --summary {}/summary.csv "
         "--tau-hist {}/hist.csv --set exploration_c=0.7",
         {"summary.csv", "hist.csv"}},
    };
    Verdict v;
    int compared = 0;
    for (std::size_t k = 0; k < cases.size(); ++k) {
        std::vector<std::string> outputs[2];
        for (int rep = 0; rep < 2; ++rep) {
            const fs::path out = dir / ("case" + std::to_string(k) + "_" + std::to_string(rep));
            fs::create_directories(out);
            std::string args = cases[k].args;
            for (auto pos = args.find("{}"); pos != std::string::npos; pos = args.find("{}")) {
                args.replace(pos, 2, out.string());
            }
            const std::string cmd = std::string("\"") + SSPMCTS_BENCH_PATH + "\" " + args;
            if (std::system(cmd.c_str()) != 0) {
                return {false, "command failed: " + cmd};
            }
            for (const auto& f : cases[k].files) {
                outputs[rep].push_back(slurp(out / f));
            }
        }
        for (std::size_t f = 0; f < outputs[0].size(); ++f) {
            ++compared;
            if (outputs[0][f].empty() || outputs[0][f] != outputs[1][f]) {
                v.pass = false;
                v.detail += "case " + std::to_string(k) + " file " + cases[k].files[f] + " differs; ";
            }
        }
    }
    if (v.pass) {
        v.detail = std::to_string(compared) + " output files byte-identical across reruns";
    }
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    g_artifacts = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_artifacts");
    fs::create_directories(g_artifacts);

    int failures = 0;
    const auto report = [&](int id, const char* name, const std::function<Verdict()>& check) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += !v.pass;
        std::cout << "criterion " << id << " " << (v.pass ? "PASS" : "FAIL") << "  " << name << ": " << v.detail
                  << " [" << static_cast<int>(secs) << "s]" << std::endl;
    };

    report(1, "equation fixtures", equation_fixtures);
    report(2, "HOO structural suite", hoo_structure);
    report(3, "oracle equivalence", oracle_equivalence);
    report(4, "baseline identity", baseline_identity);

    Batch pendulum;
    Batch cmc;
    report(5, "directional reward comparison", [&] {
        pendulum = run_directional_batch("pendulum", 100, 0);
        cmc = run_directional_batch("cmc", 50, 0);
        return directional(pendulum, cmc);
    });
    report(6, "period distributions", [&]() -> Verdict {
        if (pendulum.rows.empty() || cmc.rows.empty()) {
            return {false, "criterion 5 runs unavailable"};
        }
        return period_distribution(pendulum, cmc);
    });
    report(7, "CLI determinism", cli_determinism);

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
