#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <doctest.h>

#include "rwre/errors.hpp"
#include "rwre/experiments.hpp"

using namespace rwre;

TEST_SUITE("experiments") {

TEST_CASE("the experiment catalogue is fixed") {
    const std::vector<std::string> want = {
        "exact-formulas", "formula-vs-mc", "coupling",  "tail",           "point-process",
        "weak-quenched-limit", "stability", "averaged-limit", "time-space", "determinism"};
    CHECK(experiment_ids() == want);
}

TEST_CASE("experiment config survives a json round trip") {
    ExperimentConfig c;
    c.id = "tail";
    c.kappa_target = 1.5;
    c.seed = 99;
    c.threads = 3;
    c.out_dir = "some/dir";
    c.smoke = true;
    c.n_envs = 7;
    c.n_paths = 8;
    c.n_blocks = 9;
    c.eps = 0.125;
    const ExperimentConfig back = ExperimentConfig::from_json(c.to_json());
    CHECK(back.id == c.id);
    CHECK(back.kappa_target == c.kappa_target);
    CHECK(back.seed == c.seed);
    CHECK(back.threads == c.threads);
    CHECK(back.out_dir == c.out_dir);
    CHECK(back.smoke == c.smoke);
    CHECK(back.n_envs == c.n_envs);
    CHECK(back.n_paths == c.n_paths);
    CHECK(back.n_blocks == c.n_blocks);
    CHECK(back.eps == c.eps);
}

TEST_CASE("config hash is deterministic and sensitive to every field") {
    ExperimentConfig a;
    a.id = "tail";
    ExperimentConfig b = a;
    CHECK(config_hash(a) == config_hash(b));
    b.seed += 1;
    CHECK(config_hash(a) != config_hash(b));
    ExperimentConfig c = a;
    c.id = "coupling";
    CHECK(config_hash(a) != config_hash(c));
    ExperimentConfig d = a;
    d.smoke = true;
    CHECK(config_hash(a) != config_hash(d));
}

TEST_CASE("smoke run of the closed-form checks passes and reruns identically") {
    ExperimentConfig c;
    c.id = "exact-formulas";
    c.smoke = true;
    const RunRecord r1 = run_experiment(c);
    CHECK(r1.all_pass);
    CHECK(!r1.reports.empty());
    CHECK(r1.code_version == kCodeVersion);
    CHECK(r1.config_hash == config_hash(c));
    for (const TestReport& r : r1.reports) {
        INFO(r.test, ": ", r.details);
        CHECK(r.pass);
    }
    const RunRecord r2 = run_experiment(c);
    CHECK(r1.to_json() == r2.to_json());
}

TEST_CASE("reports do not depend on the thread count") {
    ExperimentConfig c;
    c.id = "tail";
    c.smoke = true;
    c.threads = 1;
    const RunRecord one = run_experiment(c);
    c.threads = 4;
    const RunRecord four = run_experiment(c);
    CHECK(one.reports_json() == four.reports_json());
}

TEST_CASE("run records serialize and parse") {
    ExperimentConfig c;
    c.id = "exact-formulas";
    c.smoke = true;
    c.seed = 77;
    const RunRecord rec = run_experiment(c);
    const RunRecord back = RunRecord::from_json(rec.to_json());
    CHECK(back.config_hash == rec.config_hash);
    CHECK(back.code_version == rec.code_version);
    CHECK(back.all_pass == rec.all_pass);
    CHECK(back.config.id == "exact-formulas");
    CHECK(back.config.seed == 77);
    REQUIRE(back.reports.size() == rec.reports.size());
    CHECK(back.reports[0].test == rec.reports[0].test);
    CHECK(back.to_json() == rec.to_json());
}

TEST_CASE("runner validates id and thread count") {
    ExperimentConfig c;
    c.id = "no-such-experiment";
    CHECK_THROWS_AS(run_experiment(c), parameter_error);
    c.id = "exact-formulas";
    c.threads = 0;
    CHECK_THROWS_AS(run_experiment(c), parameter_error);
}

TEST_CASE("levels reached by a time bound count recorded passages") {
    PathSummary p;
    p.level_hit_time = {3, 7, 20};
    CHECK(levels_reached_by(p, 2) == 0);
    CHECK(levels_reached_by(p, 3) == 1);
    CHECK(levels_reached_by(p, 19) == 2);
    CHECK(levels_reached_by(p, 20) == 3);
    CHECK(levels_reached_by(p, 1000) == 3);
}

TEST_CASE("normalized positions follow the three regimes") {
    PathSummary p;
    p.final_pos = 100;
    p.steps = 10000;
    const std::vector<PathSummary> paths = {p};

    TimeSpaceParams sub;
    sub.kappa = 0.5;
    const EmpiricalDistribution s = time_space_convert(paths, 10000, WalkLimitCase::sub_ballistic, sub);
    CHECK(s.values()[0] == doctest::Approx(1.0).epsilon(1e-12));

    TimeSpaceParams crit;
    crit.delta_n = 40.0;
    const EmpiricalDistribution c = time_space_convert(paths, 10000, WalkLimitCase::critical, crit);
    const double logn = std::log(1e4);
    CHECK(c.values()[0] == doctest::Approx(60.0 / (1e4 / (logn * logn))).epsilon(1e-12));

    TimeSpaceParams bal;
    bal.kappa = 1.5;
    bal.vp = 0.02;
    const EmpiricalDistribution b = time_space_convert(paths, 10000, WalkLimitCase::ballistic, bal);
    CHECK(b.values()[0] == doctest::Approx(-100.0 / std::pow(1e4, 2.0 / 3.0)).epsilon(1e-12));

    CHECK_THROWS_AS(time_space_convert(paths, 1, WalkLimitCase::sub_ballistic, sub), parameter_error);
    CHECK_THROWS_AS(time_space_convert({}, 100, WalkLimitCase::sub_ballistic, sub), parameter_error);
    TimeSpaceParams bad;
    bad.kappa = 1.0;
    CHECK_THROWS_AS(time_space_convert(paths, 100, WalkLimitCase::sub_ballistic, bad), parameter_error);
    CHECK_THROWS_AS(time_space_convert(paths, 100, WalkLimitCase::critical, bad), parameter_error);
    bad.kappa = 1.5;
    bad.vp = 0.0;
    CHECK_THROWS_AS(time_space_convert(paths, 100, WalkLimitCase::ballistic, bad), parameter_error);
}

TEST_CASE("paths with both passage and maximum records are cross-checked") {
    PathSummary p;
    p.final_pos = 3;
    p.steps = 50;
    p.max_pos = 3;
    p.level_hit_time = {5, 9, 30};
    p.max_at_checkpoint = {1};
    TimeSpaceParams sub;
    sub.kappa = 0.5;
    CHECK_NOTHROW(time_space_convert({p}, 50, WalkLimitCase::sub_ballistic, sub));
    p.max_pos = 4;  // claims a level the recorded passages never reach
    CHECK_THROWS_AS(time_space_convert({p}, 50, WalkLimitCase::sub_ballistic, sub),
                    std::runtime_error);
}

TEST_CASE("centering sequence solver inverts monotone curves") {
    CHECK(solve_delta(100.0, [](double) { return 4.0; }) == doctest::Approx(25.0).epsilon(1e-10));
    CHECK(solve_delta(100.0, [](double d) { return d; }) == doctest::Approx(10.0).epsilon(1e-10));
    CHECK(solve_delta(0.5, [](double) { return 4.0; }) == 1.0);
    CHECK_THROWS_AS(solve_delta(-1.0, [](double) { return 1.0; }), parameter_error);
}

}  // TEST_SUITE
