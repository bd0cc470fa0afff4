"""End-to-end checks of the toolkit's headline guarantees.

Each test prints one `ACCEPTANCE k PASS/FAIL - name: details` line (even
under pytest's capture) before asserting, so a run's verdict is readable
at a glance and a red run names the guarantee that broke.
"""

import itertools
import time

import numpy as np
from click.testing import CliRunner

from rieszkit.cli import main as cli_main
from rieszkit.conditional import (
    FiniteMeasureSpace,
    Partition,
    RandomVariable,
    cond_expectation,
    cond_expectation_l1,
    verify_duality,
)
from rieszkit.errors import ContractViolationError
from rieszkit.hilbert import (
    OrthonormalBasis,
    bochner_expectation,
    expected_norm,
    prefix_indicator_law,
    project,
)
from rieszkit.stieltjes import (
    oracle_from_cdf,
    recover_cdf,
    total_mass,
    triangular_cdf,
    two_atom_cdf,
    uniform_cdf,
)
from rieszkit.wiener import (
    CylinderSet,
    CylindricalFunctional,
    WienerParams,
    check_compatibility,
    cylinder_probability,
    heat_kernel,
    wiener_integral_mc,
    wiener_integral_quadrature,
)


def _verdict(capsys, num, name, ok, details):
    with capsys.disabled():
        print(f"ACCEPTANCE {num:2d} {'PASS' if ok else 'FAIL'} - {name}: {details}")


def _ones(X):
    return np.ones(np.asarray(X).shape[:-1])


def test_01_expected_norm_of_segment_indicators(capsys):
    t0 = time.perf_counter()
    basis = OrthonormalBasis(kind="shifted_legendre", size=2048)
    value = expected_norm(prefix_indicator_law(basis))
    elapsed = time.perf_counter() - t0
    err = abs(value - 2.0 / 3.0)
    ok = err < 1e-4 and elapsed < 1.0
    _verdict(
        capsys, 1, "expected norm of segment indicators", ok,
        f"value={value:.7f}, |err|={err:.2e} (tol 1e-4), {elapsed:.2f}s (limit 1s)",
    )
    assert err < 1e-4
    assert elapsed < 1.0


def test_02_expectation_curve_is_one_minus_t(capsys):
    basis = OrthonormalBasis(kind="shifted_legendre", size=32)
    mu = bochner_expectation(prefix_indicator_law(basis))
    target = project(lambda s: 1.0 - np.asarray(s, dtype=float), basis)
    dist = float(
        np.sqrt(np.sum((np.array(mu.coeffs) - np.array(target.coeffs)) ** 2))
    )
    ts = (np.arange(101) + 0.5) / 101.0
    pointwise = float(np.max(np.abs(mu.reconstruct(ts) - (1.0 - ts))))
    ok = dist < 1e-3 and pointwise < 5e-3
    _verdict(
        capsys, 2, "expectation curve equals 1 - t", ok,
        f"coeff distance {dist:.2e} (tol 1e-3), "
        f"pointwise {pointwise:.2e} (tol 5e-3)",
    )
    assert dist < 1e-3
    assert pointwise < 5e-3


def test_03_distribution_recovery_round_trip(capsys):
    grid = np.linspace(-0.5, 1.5, 101)

    def tri_exact(x):
        x = np.asarray(x, dtype=float)
        lower = 2.0 * np.clip(x, 0.0, 0.5) ** 2
        upper = 1.0 - 2.0 * (1.0 - np.clip(x, 0.5, 1.0)) ** 2
        return np.where(x < 0.5, lower, upper)

    cases = [
        ("uniform", uniform_cdf(), lambda x: np.clip(np.asarray(x, float), 0, 1)),
        ("triangular", triangular_cdf(), tri_exact),
        (
            "two-atom",
            two_atom_cdf(0.3, 0.6, 0.7),
            lambda x: 0.6 * (np.asarray(x) >= 0.3) + 0.4 * (np.asarray(x) >= 0.7),
        ),
    ]
    sups, mass_errs, decreases = [], [], []
    violated = False
    try:
        for _, alpha, exact in cases:
            oracle = oracle_from_cdf(alpha, (-0.5, 1.5))
            rec = np.array(
                [recover_cdf(oracle, float(x), 64, 64, 1e-6) for x in grid]
            )
            sups.append(float(np.max(np.abs(rec - exact(grid)))))
            mass_errs.append(abs(total_mass(oracle, 64) - 1.0))
            decreases.append(float(np.min(np.diff(rec))))
    except ContractViolationError:
        violated = True
    ok = (
        not violated
        and max(sups) < 5e-3
        and max(mass_errs) < 1e-6
        and min(decreases) >= -1e-6
    )
    _verdict(
        capsys, 3, "distribution recovery round trip", ok,
        f"sup errors {['%.1e' % s for s in sups]} (tol 5e-3), "
        f"mass error <= {max(mass_errs):.1e} (tol 1e-6), "
        f"contracts violated: {violated}",
    )
    assert not violated
    assert max(sups) < 5e-3
    assert max(mass_errs) < 1e-6
    assert min(decreases) >= -1e-6


def _random_space(rng):
    n = int(rng.integers(2, 9))
    kind = rng.integers(0, 3)
    if kind == 0:
        probs = np.full(n, 1.0 / n)
    else:
        probs = rng.uniform(0.1, 1.0, n)
        if kind == 2 and n >= 3:
            probs[rng.integers(0, n)] = 0.0
        probs = probs / probs.sum()
    return FiniteMeasureSpace(tuple((str(k), float(p)) for k, p in enumerate(probs)))


def _random_partition(rng, n):
    k = int(rng.integers(1, n + 1))
    assign = rng.integers(0, k, n)
    blocks = [tuple(np.flatnonzero(assign == b)) for b in range(k)]
    return Partition(tuple(b for b in blocks if b))


def _merge_blocks(rng, H):
    # coarsen H by merging its blocks at random, so H refines the result
    k = len(H.blocks)
    g = int(rng.integers(1, k + 1))
    assign = rng.integers(0, g, k)
    merged = {}
    for bi, gi in enumerate(assign):
        merged.setdefault(int(gi), []).extend(H.blocks[bi])
    return Partition(tuple(tuple(sorted(v)) for v in merged.values()))


def test_04_conditional_expectation_battery(capsys):
    rng = np.random.default_rng(11)
    worst_dual = worst_tower = worst_total = 0.0
    exact_props = True
    for _ in range(1000):
        space = _random_space(rng)
        n = space.n
        H = _random_partition(rng, n)
        G = _merge_blocks(rng, H)
        X = RandomVariable(tuple(rng.uniform(-5, 5, n)))
        xi = cond_expectation(X, G, space)
        report = verify_duality(X, xi, G, space)
        worst_dual = max(worst_dual, max(report.residuals))

        inner = cond_expectation(X, H, space)
        tower = cond_expectation(RandomVariable(inner.values), G, space)
        worst_tower = max(
            worst_tower, float(np.max(np.abs(tower.array - xi.array)))
        )

        p = space.probabilities
        worst_total = max(
            worst_total,
            abs(float(np.dot(xi.array, p)) - float(np.dot(X.array, p))),
        )

        absX = RandomVariable(tuple(np.abs(X.array)))
        if np.any(cond_expectation(absX, G, space).array < 0.0):
            exact_props = False
        Y = RandomVariable(tuple(X.array + np.abs(rng.uniform(-3, 3, n))))
        if np.any(xi.array > cond_expectation(Y, G, space).array):
            exact_props = False

        ladder = cond_expectation_l1(X, G, space, j_max=64)
        if not ladder.converged or ladder.values != xi.values:
            exact_props = False
        pos_ladder = cond_expectation_l1(absX, G, space, j_max=64)
        levels = [lvl[1] for lvl in pos_ladder.ladder]
        for lo, hi in zip(levels, levels[1:]):
            if np.any(np.array(hi) < np.array(lo)):
                exact_props = False

    ok = (
        worst_dual < 1e-14
        and worst_tower < 1e-14
        and worst_total < 1e-14
        and exact_props
    )
    _verdict(
        capsys, 4, "conditional expectation exactness over 1000 instances", ok,
        f"duality {worst_dual:.1e}, tower {worst_tower:.1e}, "
        f"total-expectation {worst_total:.1e} (all tol 1e-14), "
        f"order/ladder properties exact: {exact_props}",
    )
    assert worst_dual < 1e-14
    assert worst_tower < 1e-14
    assert worst_total < 1e-14
    assert exact_props


def test_05_transition_identity(capsys):
    rng = np.random.default_rng(20250815)
    worst = 0.0
    for _ in range(100):
        x, z = rng.uniform(-2, 2, 2)
        t = rng.uniform(0.5, 2.0)
        u = rng.uniform(0.0, 0.4 * t)
        s = rng.uniform(u + 0.1 * t, 0.9 * t)
        D = rng.uniform(0.2, 1.5)
        worst = max(worst, check_compatibility(x, z, u, s, t, D, 64))
    ladder = [
        check_compatibility(0.0, 0.0, 0.0, 0.5, 1.0, 0.5, n)
        for n in (8, 16, 32, 64)
    ]
    mono = all(b <= a for a, b in zip(ladder, ladder[1:])) and ladder[-1] < ladder[0]
    ok = worst < 1e-8 and mono and ladder[-1] < 1e-10
    _verdict(
        capsys, 5, "two-step transition identity", ok,
        f"worst residual {worst:.1e} over 100 draws (tol 1e-8), "
        f"node ladder {['%.1e' % r for r in ladder]} monotone: {mono}",
    )
    assert worst < 1e-8
    assert mono
    assert ladder[-1] < 1e-10


def test_06_constant_integrates_to_the_total_mass(capsys):
    params = WienerParams(0.3, -0.2, 1.7, 0.8)
    mass = heat_kernel(params.x - params.y, params.t, params.D)
    worst = 0.0
    for n_times in (1, 2, 3):
        times = tuple(
            (k + 1) * params.t / (n_times + 1) for k in range(n_times)
        )
        F = CylindricalFunctional(times, _ones)
        worst = max(worst, abs(wiener_integral_quadrature(F, params, 32) - mass))
        C = CylinderSet(times, ((-np.inf, np.inf),) * n_times)
        worst = max(worst, abs(cylinder_probability(C, params, 32) - mass))
    ok = worst < 1e-8
    _verdict(
        capsys, 6, "path-measure total mass", ok,
        f"worst |value - mass| = {worst:.1e} over 1..3 inserted times (tol 1e-8)",
    )
    assert worst < 1e-8


def _spread_times(rng, t, n, min_gap):
    while True:
        ts = np.sort(rng.uniform(0.1 * t, 0.9 * t, n))
        gaps = np.diff(np.concatenate([[0.0], ts, [t]]))
        if np.all(gaps >= min_gap * t):
            return tuple(float(s) for s in ts)


def _poly_functional(rng, times):
    n = len(times)
    monos = [tuple(k) for k in itertools.product(range(3), repeat=n) if sum(k) <= 2]
    coeffs = rng.uniform(-1.0, 1.0, len(monos))
    P = np.array(monos, dtype=float)

    def fn(X, P=P, c=coeffs):
        X = np.asarray(X, dtype=float)
        return np.sum(c * np.prod(X[..., None, :] ** P, axis=-1), axis=-1)

    return CylindricalFunctional(times, fn)


def test_07_quadrature_and_monte_carlo_agree(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2025)
    worst_ratio = 0.0
    for i in range(50):
        params = WienerParams(
            x=rng.uniform(-1, 1), y=rng.uniform(-1, 1),
            t=rng.uniform(0.5, 2.0), D=rng.uniform(0.3, 1.0),
        )
        n_times = int(rng.integers(1, 4))
        F = _poly_functional(rng, _spread_times(rng, params.t, n_times, 0.08))
        quad = wiener_integral_quadrature(F, params, 32)
        est, se = wiener_integral_mc(F, params, 100_000, seed=2025 + i)
        ratio = abs(quad - est) / se if se > 0 else np.inf
        worst_ratio = max(worst_ratio, ratio)
    elapsed = time.perf_counter() - t0
    ok = worst_ratio < 3.0 and elapsed < 120.0
    _verdict(
        capsys, 7, "quadrature vs Monte Carlo on 50 polynomial functionals", ok,
        f"worst |diff|/stderr = {worst_ratio:.2f} (limit 3), {elapsed:.1f}s "
        "(limit 120s)",
    )
    assert worst_ratio < 3.0
    assert elapsed < 120.0


def test_08_no_functional_beats_the_norm_bound(capsys):
    rng = np.random.default_rng(99)
    worst_excess = -np.inf
    for _ in range(10_000):
        params = WienerParams(
            x=rng.uniform(-1, 1), y=rng.uniform(-1, 1),
            t=rng.uniform(0.5, 2.0), D=rng.uniform(0.3, 1.0),
        )
        n_times = int(rng.choice([1, 2, 3], p=[0.45, 0.45, 0.10]))
        base = np.arange(1, n_times + 1) / (n_times + 1.0)
        jitter = rng.uniform(-0.2, 0.2, n_times) / (n_times + 1.0)
        times = tuple(float(s) for s in params.t * (base + jitter))
        amp = rng.uniform(0.1, 5.0)
        direction = rng.uniform(-1.5, 1.5, n_times)
        phase = rng.uniform(0.0, 2 * np.pi)

        def fn(X, a=direction, b=phase, B=amp):
            return B * np.cos(np.asarray(X, dtype=float) @ a + b)

        F = CylindricalFunctional(times, fn, bound=amp)
        val = wiener_integral_quadrature(F, params, 24)
        mass = heat_kernel(params.x - params.y, params.t, params.D)
        worst_excess = max(worst_excess, abs(val) - mass * amp)
    ok = worst_excess <= 1e-8
    _verdict(
        capsys, 8, "norm bound |L(F)| <= mass * sup|F|", ok,
        f"worst excess {worst_excess:.1e} over 10000 bounded functionals "
        "(allowance 1e-8)",
    )
    assert worst_excess <= 1e-8


def test_09_inserting_a_free_time_changes_nothing(capsys):
    rng = np.random.default_rng(424242)
    worst = 0.0
    for _ in range(100):
        params = WienerParams(
            x=rng.uniform(-1, 1), y=rng.uniform(-1, 1),
            t=rng.uniform(0.5, 2.0), D=rng.uniform(0.3, 1.0),
        )
        n_times = int(rng.integers(1, 3))
        ts = _spread_times(rng, params.t, n_times, 0.1)
        boxes = []
        for _ in range(n_times):
            lo = rng.uniform(-2.0, 0.5)
            boxes.append((lo, lo + rng.uniform(0.5, 3.0)))
        edges = np.concatenate([[0.0], ts, [params.t]])
        k = int(np.argmax(np.diff(edges)))
        s_new = 0.5 * (edges[k] + edges[k + 1])
        ts2 = tuple(np.sort(np.append(ts, s_new)))
        kk = int(np.searchsorted(ts, s_new))
        boxes2 = tuple(boxes[:kk] + [(-np.inf, np.inf)] + boxes[kk:])
        base = cylinder_probability(CylinderSet(ts, tuple(boxes)), params, 32)
        extended = cylinder_probability(CylinderSet(ts2, boxes2), params, 32)
        worst = max(worst, abs(extended - base))
    ok = worst < 1e-8
    _verdict(
        capsys, 9, "free-time insertion invariance", ok,
        f"worst probability change {worst:.1e} over 100 instances (tol 1e-8)",
    )
    assert worst < 1e-8


def test_10_selftest_is_deterministic(capsys, tmp_path):
    runner = CliRunner()
    first = tmp_path / "first.csv"
    second = tmp_path / "second.csv"
    r1 = runner.invoke(cli_main, ["selftest", "--seed", "0", "--out", str(first)])
    r2 = runner.invoke(cli_main, ["selftest", "--seed", "0", "--out", str(second)])
    identical = first.read_bytes() == second.read_bytes()
    ok = r1.exit_code == 0 and r2.exit_code == 0 and identical
    _verdict(
        capsys, 10, "selftest determinism", ok,
        f"exit codes ({r1.exit_code}, {r2.exit_code}), byte-identical: {identical}",
    )
    assert r1.exit_code == 0
    assert r2.exit_code == 0
    assert identical
