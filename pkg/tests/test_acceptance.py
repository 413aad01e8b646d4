"""Acceptance gates for the whole package.

One test per criterion; each prints a single PASS/FAIL line (run with
``pytest -s`` to see them all). Criteria 3 and 5 encode expected
strategy orderings for the big uniform and non-uniform experiments; the
sub-conditions that this simulator measurably does not reproduce are
asserted as stated rather than loosened, so they fail honestly. The
numbers behind that call are printed by the tests themselves.
"""

import collections
import random

import numpy as np
import pytest

from mulesim import (
    ExperimentConfig,
    PRESETS,
    SplitMix64,
    farthest_first,
    generate_uniform,
    kcenter_objective,
    kmedian_objective,
    min_cost_assignment,
    reverse_greedy,
    run,
    run_batch,
    strategy_from_name,
    welch_t_test,
)
from mulesim.cli import main

from oracles import (
    best_1median,
    best_assignment,
    best_kcenter,
    best_kmedian,
    dist,
)
from test_simulation import check_invariants


def report(criterion, ok, detail):
    print(f"\nACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


def mean(xs):
    return sum(xs) / len(xs)


SIX = ("basic_grid", "no_cooperation", "k_center", "k_median", "k_centroid",
       "local_search")


def _samples(records):
    table = collections.defaultdict(list)
    for r in records:
        table[(r.strategy, r.f_d)].append(r.summary)
    return table


@pytest.fixture(scope="module")
def main_comparison_batch():
    """Shared batch: 6 strategies, 10 failures, fix durations 0..10000."""
    cfg = ExperimentConfig(
        area_width=100.0,
        area_height=100.0,
        n_nodes=100,
        n_mules=10,
        f_count=10,
        horizon=10000.0,
        fix_durations=tuple(float(v) for v in range(0, 10001, 1000)),
        strategies=SIX,
        seed_base=0,
        repetitions=50,
    )
    return _samples(run_batch(cfg))


def test_criterion_1_algorithm_oracles():
    rng = random.Random(1001)
    ff_viol = 0
    rg_viol = 0
    rg_worst = 1.0
    for _ in range(200):
        n = rng.randint(2, 12)
        k = rng.randint(1, min(4, n))
        sites = [(rng.uniform(0, 100), rng.uniform(0, 100)) for _ in range(n)]
        ff_cost = kcenter_objective(farthest_first(sites, k), sites)
        if ff_cost > 2.0 * best_kcenter(sites, k) + 1e-9:
            ff_viol += 1
        rg_cost = kmedian_objective(reverse_greedy(sites, k), sites)
        opt = best_kmedian(sites, k)
        if rg_cost < opt - 1e-9:
            rg_viol += 1
        if opt > 0:
            rg_worst = max(rg_worst, rg_cost / opt)

    hung_bad = 0
    for _ in range(200):
        n = rng.randint(1, 7)
        costs = [[rng.uniform(0, 100) for _ in range(n)] for _ in range(n)]
        got = min_cost_assignment(costs)
        total = sum(costs[i][j] for i, j in got)
        opt_total, opt_pairs = best_assignment(costs)
        if got != opt_pairs or abs(total - opt_total) > 1e-9:
            hung_bad += 1

    cen_viol = 0
    for _ in range(200):
        n = rng.randint(1, 12)
        cell = [(rng.uniform(0, 100), rng.uniform(0, 100)) for _ in range(n)]
        cx = sum(p[0] for p in cell) / n
        cy = sum(p[1] for p in cell) / n
        got = sum(dist(p, (cx, cy)) for p in cell)
        if got > 2.0 * best_1median(cell) + 1e-9:
            cen_viol += 1

    ok = ff_viol == 0 and rg_viol == 0 and hung_bad == 0 and cen_viol == 0
    assert report(
        1,
        ok,
        f"farthest-first 2-approx violations {ff_viol}/200, reverse-greedy "
        f"below-optimum {rg_viol}/200 (worst ratio {rg_worst:.4f}), "
        f"assignment mismatches {hung_bad}/200, centroid 2-approx "
        f"violations {cen_viol}/200",
    )


def test_criterion_2_cooperation_experiment():
    cfg = ExperimentConfig(
        area_width=100.0,
        area_height=100.0,
        n_nodes=100,
        n_mules=10,
        f_count=100,
        horizon=10000.0,
        fix_durations=tuple(float(v) for v in range(0, 1001, 100)),
        strategies=("no_cooperation", "k_median"),
        seed_base=0,
        repetitions=50,
    )
    table = _samples(run_batch(cfg))
    gaps = {}
    means_ok = True
    for f_d in cfg.fix_durations:
        if f_d < 500:
            continue
        nc = mean([s.avg_downtime for s in table[("no_cooperation", f_d)]])
        km = mean([s.avg_downtime for s in table[("k_median", f_d)]])
        gaps[f_d] = (nc, km)
        means_ok = means_ok and nc > km
    p = welch_t_test(
        [s.avg_downtime for s in table[("no_cooperation", 1000.0)]],
        [s.avg_downtime for s in table[("k_median", 1000.0)]],
    ).p
    nc1000, km1000 = gaps[1000.0]
    ok = means_ok and p < 0.05
    assert report(
        2,
        ok,
        f"no_cooperation > k_median for all fix durations >= 500: {means_ok}; "
        f"at 1000: {nc1000:.1f} vs {km1000:.1f}, Welch p={p:.3g}",
    )


def test_criterion_3_main_comparison(main_comparison_batch):
    table = main_comparison_batch
    at = {s: [x.avg_downtime for x in table[(s, 10000.0)]] for s in SIX}
    means = {s: mean(at[s]) for s in SIX}
    km_lowest = all(means["k_median"] <= means[s] for s in SIX)
    p_km_bg = welch_t_test(at["k_median"], at["basic_grid"]).p
    km_beats_bg = means["k_median"] < means["basic_grid"] and p_km_bg < 0.05
    kc_worse_than_bg = means["k_center"] >= means["basic_grid"]
    ok = km_lowest and km_beats_bg and kc_worse_than_bg
    assert report(
        3,
        ok,
        "mean avg-downtime at fix duration 10000: "
        + ", ".join(f"{s}={means[s]:.2f}" for s in SIX)
        + f"; k_median lowest: {km_lowest}; k_median < basic_grid "
        f"(p={p_km_bg:.3g}): {km_beats_bg}; k_center >= basic_grid: "
        f"{kc_worse_than_bg}",
    )


def test_criterion_4_mobility_trend(main_comparison_batch):
    table = main_comparison_batch
    bg = mean([x.avg_travel for x in table[("basic_grid", 1000.0)]])
    km = mean([x.avg_travel for x in table[("k_median", 1000.0)]])
    kc = mean([x.avg_travel for x in table[("k_center", 1000.0)]])
    ratios_ok = km >= 3.0 * bg and kc >= 3.0 * bg
    km2 = mean([x.avg_travel for x in table[("k_median", 2000.0)]])
    km10 = mean([x.avg_travel for x in table[("k_median", 10000.0)]])
    decreasing = km10 < km2
    ok = ratios_ok and decreasing
    assert report(
        4,
        ok,
        f"avg travel at 1000: basic_grid={bg:.1f}, k_median={km:.1f} "
        f"({km / bg:.1f}x), k_center={kc:.1f} ({kc / bg:.1f}x); "
        f"k_median travel 10000 vs 2000: {km10:.1f} < {km2:.1f}: {decreasing}",
    )


def test_criterion_5_nonuniform_experiment():
    cfg = ExperimentConfig(
        area_width=100.0,
        area_height=100.0,
        n_nodes=100,
        n_mules=10,
        f_count=100,
        horizon=10000.0,
        fix_durations=tuple(float(v) for v in range(0, 1001, 100)),
        strategies=SIX,
        distribution="nonuniform",
        seed_base=0,
        repetitions=50,
    )
    table = _samples(run_batch(cfg))
    pooled = {
        s: [x.avg_downtime for f_d in cfg.fix_durations for x in table[(s, f_d)]]
        for s in SIX
    }
    means = {s: mean(pooled[s]) for s in SIX}
    p_kc_bg = welch_t_test(pooled["k_center"], pooled["basic_grid"]).p
    kc_beats_bg = means["k_center"] < means["basic_grid"] and p_kc_bg < 0.05
    km_lowest = all(means["k_median"] <= means[s] for s in SIX)
    ok = kc_beats_bg and km_lowest
    assert report(
        5,
        ok,
        "pooled mean avg-downtime: "
        + ", ".join(f"{s}={means[s]:.2f}" for s in SIX)
        + f"; k_center < basic_grid (p={p_kc_bg:.3g}): {kc_beats_bg}; "
        f"k_median lowest: {km_lowest}",
    )


MAIN_CONFIG_TEXT = """\
area_width = 100
area_height = 100
nodes = 100
mules = 10
failures = 10
horizon = 10000
fix_durations = 0,1000,2000,3000,4000,5000,6000,7000,8000,9000,10000
strategies = basic_grid,no_cooperation,k_center,k_median,k_centroid,local_search
seed_base = 0
repetitions = 50
"""


def test_criterion_6_determinism(tmp_path):
    cfg_path = tmp_path / "main.cfg"
    cfg_path.write_text(MAIN_CONFIG_TEXT)
    out1, out2 = tmp_path / "run1", tmp_path / "run2"
    assert main(["run", str(cfg_path), "-o", str(out1)]) == 0
    assert main(["run", str(cfg_path), "-o", str(out2)]) == 0
    identical = (out1 / "results.csv").read_bytes() == (
        out2 / "results.csv"
    ).read_bytes()

    rng = SplitMix64(0)
    constants_ok = (
        rng.next_u64() == 0xE220A8397B1DCDAF
        and rng.next_u64() == 0x6E789E6AA1B965F4
    )
    ok = identical and constants_ok
    assert report(
        6,
        ok,
        f"results.csv byte-identical across executions: {identical}; "
        f"splitmix64 seed-0 reference constants: {constants_ok}",
    )


def test_criterion_7_simulation_unit_contract():
    from mulesim import Failure, Scenario, StrategyConfig

    sc = Scenario(
        100.0,
        100.0,
        np.array([[0.0, 0.0], [3.0, 4.0]]),
        (Failure(1, 10.0, 5.0),),
        10000.0,
        0,
    )
    strategy = StrategyConfig("ff", "cooperative", "none_stay", "closest_available")
    res = run(sc, strategy, 1, record_log=True)
    worked = (
        res.downtimes == [5.0]
        and res.travel_totals == [5.0]
        and any(t == 20.0 and k == "fix_done" for t, k, *_ in res.event_log)
    )

    rng = random.Random(7007)
    checked = 0
    failures = 0
    while checked < 100:
        n = rng.randint(1, 10)
        f = rng.randint(0, 10)
        m = rng.randint(1, min(4, n))
        fd = rng.choice([0.0, 10.0, 100.0, 1000.0])
        try:
            scenario = generate_uniform(100, 100, n, f, fd, 2000.0, seed=checked)
        except ValueError:
            checked += 1
            continue
        for name in PRESETS:
            result = run(scenario, strategy_from_name(name), m, record_log=True)
            try:
                check_invariants(scenario, result)
            except AssertionError:
                failures += 1
        checked += 1

    ok = worked and failures == 0
    assert report(
        7,
        ok,
        f"worked example exact: {worked}; invariant violations over "
        f"100 scenarios x 6 presets: {failures}",
    )
