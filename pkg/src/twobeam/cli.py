"""Command-line front end: scenario files in, region data and reports out.

Three subcommands: ``region`` runs a Monte Carlo region build and writes the
CSV/JSON outputs, ``solve`` reports one boundary beamformer for a fixed
channel realization, ``validate`` replays the oracle suites and writes a
machine-readable report. Exit codes: 0 success, 1 validation violation,
2 malformed scenario or flags, 3 solver failure beyond the 1% sample budget.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatchError,
    DomainError,
    ScenarioError,
    SolverError,
    TwobeamError,
)
from .heuristics import greedy_phase_bf
from .model import (
    ChannelSet,
    IndividualPower,
    SumPower,
    SystemParams,
    rate_pair,
    relay_powers,
)
from .nonrecip import (
    BisectionConfig,
    algorithm1_sum_power,
    algorithm2_individual,
    profile_rate,
    rank_one_reduce,
    randomize_rank_one,
    snr_targets,
)
from .oracle import (
    best_wsis_grid,
    feasibility_descent,
    hull_bruteforce,
    min_trace_descent,
    random_beamformer_cloud,
    wsis_objective,
)
from .recip import (
    broadcast_params_indiv,
    broadcast_params_sum,
    individual_power_beamformer,
    local_weight_indiv,
    local_weight_sum,
    sum_power_beamformer,
    wsismin_individual,
    wsismin_sum_power,
)
from .region import (
    Scenario,
    build_region,
    convex_hull,
    default_grid,
    points_expansion,
    region_contains,
    region_csv_text,
    region_json_text,
    sample_channels,
)
from .sdp import FEASIBILITY, SdpProblem, SdpStatus, solve_feasibility, solve_min_trace

__all__ = ["main", "build_parser", "scenario_from_dict", "load_scenario"]

_FAILURE_BUDGET = 0.01


def _as_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(name, "must be an integer")
    return value


def _as_number(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(name, "must be a number")
    return float(value)


def _as_bool(value, name: str) -> bool:
    if not isinstance(value, bool):
        raise ScenarioError(name, "must be true or false")
    return value


def _as_number_list(value, name: str) -> list[float]:
    if not isinstance(value, list) or not value:
        raise ScenarioError(name, "must be a non-empty list of numbers")
    return [_as_number(v, name) for v in value]


def _get(doc: dict, name: str):
    if name not in doc:
        raise ScenarioError(name, "missing required field")
    return doc[name]


def scenario_from_dict(doc) -> Scenario:
    """Builds a Scenario from a parsed scenario document.

    Raises ScenarioError naming the offending field on any shape or value
    problem, so the CLI can report it and exit with code 2.
    """
    if not isinstance(doc, dict):
        raise ScenarioError("document", "must be a JSON object")
    version = _as_int(_get(doc, "schema_version"), "schema_version")
    if version != 1:
        raise ScenarioError("schema_version", f"unsupported version {version}")
    k = _as_int(_get(doc, "k"), "k")
    reciprocal = _as_bool(_get(doc, "reciprocal"), "reciprocal")
    sigma_raw = _get(doc, "sigma_relay_watts")
    if isinstance(sigma_raw, list):
        sigma_relay = np.array(_as_number_list(sigma_raw, "sigma_relay_watts"))
    else:
        sigma_relay = np.full(max(k, 1), _as_number(sigma_raw, "sigma_relay_watts"))
    budget_doc = _get(doc, "budget")
    if not isinstance(budget_doc, dict):
        raise ScenarioError("budget", "must be an object with a 'kind'")
    kind = budget_doc.get("kind")
    try:
        if kind == "sum":
            budget = SumPower(p_r=_as_number(_get(budget_doc, "p_r_watts"), "budget.p_r_watts"))
        elif kind == "individual":
            budget = IndividualPower(
                p=np.array(_as_number_list(_get(budget_doc, "p_watts"), "budget.p_watts"))
            )
        else:
            raise ScenarioError("budget.kind", "must be 'sum' or 'individual'")
    except ScenarioError as exc:
        if exc.field in ("p_r_watts", "p_watts"):
            raise ScenarioError(f"budget.{exc.field}", "missing required field") from exc
        raise
    except (DomainError, DimensionMismatchError) as exc:
        raise ScenarioError("budget", str(exc)) from exc
    grid_doc = doc.get("grid", {"step": 0.05})
    if not isinstance(grid_doc, dict) or ("step" in grid_doc) == ("values" in grid_doc):
        raise ScenarioError("grid", "must contain exactly one of 'step' or 'values'")
    try:
        if "step" in grid_doc:
            grid = default_grid(_as_number(grid_doc["step"], "grid.step"))
        else:
            grid = np.array(_as_number_list(grid_doc["values"], "grid.values"))
    except DomainError as exc:
        raise ScenarioError("grid.step", str(exc)) from exc
    try:
        params = SystemParams(
            p_s1=_as_number(_get(doc, "p_s1_watts"), "p_s1_watts"),
            p_s2=_as_number(_get(doc, "p_s2_watts"), "p_s2_watts"),
            sigma_relay=sigma_relay,
            sigma_s1_sq=_as_number(_get(doc, "sigma_s1_sq_watts"), "sigma_s1_sq_watts"),
            sigma_s2_sq=_as_number(_get(doc, "sigma_s2_sq_watts"), "sigma_s2_sq_watts"),
        )
        return Scenario(
            k=k,
            params=params,
            budget=budget,
            reciprocal=reciprocal,
            grid=grid,
            realizations=_as_int(_get(doc, "realizations"), "realizations"),
            seed=_as_int(_get(doc, "seed"), "seed"),
            channel_variance=_as_number(doc.get("channel_variance", 1.0), "channel_variance"),
            epsilon_bits=_as_number(doc.get("epsilon_bits", 1e-4), "epsilon_bits"),
            rand_candidates=_as_int(doc.get("rand_candidates", 1000), "rand_candidates"),
        )
    except (DomainError, DimensionMismatchError) as exc:
        raise ScenarioError("scenario", str(exc)) from exc


def load_scenario(path: str) -> Scenario:
    """Reads and validates a scenario JSON file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioError("file", str(exc)) from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError("file", f"not valid JSON: {exc}") from exc
    return scenario_from_dict(doc)


def _apply_overrides(sc: Scenario, args: argparse.Namespace) -> Scenario:
    updates = {}
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "realizations", None) is not None:
        updates["realizations"] = args.realizations
    if getattr(args, "epsilon", None) is not None:
        updates["epsilon_bits"] = args.epsilon
    if getattr(args, "rand_candidates", None) is not None:
        updates["rand_candidates"] = args.rand_candidates
    try:
        if getattr(args, "grid_step", None) is not None:
            updates["grid"] = default_grid(args.grid_step)
        return replace(sc, **updates) if updates else sc
    except (DomainError, DimensionMismatchError) as exc:
        raise ScenarioError("flags", str(exc)) from exc


def cmd_region(args: argparse.Namespace) -> int:
    sc = _apply_overrides(load_scenario(args.scenario), args)
    try:
        res = build_region(sc)
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    attempted = sc.realizations * sc.grid.size
    failures = attempted - int(res.n_success.sum())
    if failures > _FAILURE_BUDGET * attempted:
        print(
            f"error: {failures} of {attempted} samples failed,"
            f" exceeding the {_FAILURE_BUDGET:.0%} budget",
            file=sys.stderr,
        )
        return 3
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    wrote = [out / "region.csv", out / "region.json"]
    wrote[0].write_text(region_csv_text(res))
    wrote[1].write_text(region_json_text(sc, res))
    if res.randomized is not None:
        path = out / "region_randomized.csv"
        path.write_text(region_csv_text(res.randomized))
        wrote.append(path)
    best = int(np.argmax(res.means.sum(axis=1)))
    print(f"solver: {res.solver}")
    print(f"boundary points: {res.grid.size} of {sc.grid.size} grid values")
    print(f"hull vertices: {res.hull.shape[0]}")
    print(
        f"max sum-rate point: r1={float(res.means[best, 0])!r}"
        f" r2={float(res.means[best, 1])!r} at grid value {float(res.grid[best])!r}"
    )
    for path in wrote:
        print(f"wrote {path}")
    return 0


def _solve_reciprocal(sc: Scenario, ch, mu: float):
    if isinstance(sc.budget, SumPower):
        sol = wsismin_sum_power(ch, sc.params, sc.budget.p_r, mu)
        w = sum_power_beamformer(ch, sol)
        scalars = broadcast_params_sum(sol)
        lines = [
            f"broadcast mu: {float(scalars[0])!r}",
            f"broadcast xi over weighted norm: {float(scalars[1])!r}",
        ]
    else:
        sol = wsismin_individual(ch, sc.params, sc.budget.p, mu)
        w = individual_power_beamformer(ch, sc.params, sc.budget.p, sol)
        scalars = broadcast_params_indiv(sol)
        lines = [
            f"broadcast mu: {float(scalars[0])!r}",
            f"broadcast water level: {float(scalars[1])!r}",
        ]
    return w, lines


def _solve_nonreciprocal(sc: Scenario, ch, kappa: float):
    cfg = BisectionConfig(epsilon=sc.epsilon_bits)
    if isinstance(sc.budget, SumPower):
        r_sum, x_best = algorithm1_sum_power(ch, sc.params, sc.budget.p_r, kappa, cfg)
        gamma1, gamma2 = snr_targets(kappa, r_sum)
        result = rank_one_reduce(x_best, ch, sc.params, gamma1, gamma2)
        how = "exact rank-one reduction"
        if result.source.fallback:
            how += " (dominant-eigenvector fallback)"
    else:
        r_sum, x_best = algorithm2_individual(ch, sc.params, sc.budget.p, kappa, cfg)
        gamma1, gamma2 = snr_targets(kappa, r_sum)
        result = randomize_rank_one(
            x_best,
            ch,
            sc.params,
            gamma1,
            gamma2,
            num_candidates=sc.rand_candidates,
            seed=np.random.SeedSequence(sc.seed).spawn(1)[0],
        )
        how = (
            f"randomized extraction over {result.source.num_candidates} candidates,"
            f" selected violation {float(result.source.best_violation)!r}"
        )
    lines = [
        f"profile kappa: {float(kappa)!r}",
        f"relaxed sum rate: {float(r_sum)!r} bits",
        f"achieved profile rate: {float(profile_rate(result.rates, kappa))!r} bits",
        f"extraction: {how}",
    ]
    return result.w, lines


def cmd_solve(args: argparse.Namespace) -> int:
    sc = load_scenario(args.scenario)
    if sc.reciprocal:
        if args.mu is None or args.kappa is not None:
            print("error: reciprocal scenarios take --mu, not --kappa", file=sys.stderr)
            return 2
        weight = args.mu
    else:
        if args.kappa is None or args.mu is not None:
            print("error: non-reciprocal scenarios take --kappa, not --mu", file=sys.stderr)
            return 2
        weight = args.kappa
    if not 0.0 <= weight <= 1.0:
        print("error: the sweep weight must lie in [0, 1]", file=sys.stderr)
        return 2
    seed = args.realization_seed if args.realization_seed is not None else sc.seed
    ch = sample_channels(sc, seed)
    if sc.reciprocal:
        w, extra = _solve_reciprocal(sc, ch, weight)
    else:
        w, extra = _solve_nonreciprocal(sc, ch, weight)
    rates = rate_pair(ch, sc.params, w)
    powers = relay_powers(ch, sc.params, w)
    print(f"channel realization seed: {seed}")
    for i in range(sc.k):
        print(f"w[{i}] = {complex(w.w[i])!r}  power {float(powers[i])!r} W")
    print(f"total relay power: {float(powers.sum())!r} W")
    if isinstance(sc.budget, SumPower):
        ok = float(powers.sum()) <= sc.budget.p_r * (1.0 + 1e-9)
        print(f"budget check (sum <= {sc.budget.p_r!r} W): {'ok' if ok else 'VIOLATED'}")
    else:
        ok = bool(np.all(powers <= sc.budget.p * (1.0 + 1e-9)))
        print(f"budget check (per-relay caps): {'ok' if ok else 'VIOLATED'}")
    print(f"rates: r1={rates.r1!r} r2={rates.r2!r} bits/channel use")
    for line in extra:
        print(line)
    return 0 if ok else 1


def _spawned_rng(seed: int, label: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed).spawn(label + 1)[label])


def _draw_channels(rng: np.random.Generator, k: int, reciprocal: bool) -> ChannelSet:
    def vec():
        return (rng.standard_normal(k) + 1j * rng.standard_normal(k)) / np.sqrt(2.0)

    if reciprocal:
        return ChannelSet.from_reciprocal(vec(), vec())
    return ChannelSet(h1=vec(), h2=vec(), h1r=vec(), h2r=vec())


def _unit_params(k: int) -> SystemParams:
    return SystemParams(
        p_s1=1.0, p_s2=1.0, sigma_relay=np.ones(k), sigma_s1_sq=1.0, sigma_s2_sq=1.0
    )


def _check_recip_grid_optimality(seed: int) -> dict:
    rng = _spawned_rng(seed, 0)
    worst = -np.inf
    counterexample = None
    for trial in range(3):
        ch = _draw_channels(rng, 2, True)
        sp = _unit_params(2)
        mu = float(rng.uniform(0.1, 0.9))
        sol = wsismin_sum_power(ch, sp, 10.0, mu)
        closed = wsis_objective(ch, sp, mu, sol.x)
        grid_obj, _ = best_wsis_grid(ch, sp, SumPower(10.0), mu, 200)
        gap = closed - grid_obj
        if gap > worst:
            worst = gap
            counterexample = {"trial": trial, "mu": mu, "closed": closed, "grid": grid_obj}
    return {
        "name": "recip-closed-form-beats-grid",
        "passed": bool(worst <= 1e-9),
        "details": {"worst_gap": worst, "at": counterexample, "seed": seed},
    }


def _check_recip_hull_containment(seed: int) -> dict:
    rng = _spawned_rng(seed, 1)
    ch = _draw_channels(rng, 3, True)
    sp = _unit_params(3)
    pts = []
    for mu in default_grid(0.02):
        sol = wsismin_sum_power(ch, sp, 10.0, float(mu))
        r = rate_pair(ch, sp, sum_power_beamformer(ch, sol))
        pts.append([r.r1, r.r2])
    pts = np.array(pts)
    anchors = np.array([[0.0, pts[:, 1].max()], [pts[:, 0].max(), 0.0]])
    hull = convex_hull(np.vstack([pts, anchors]))
    cloud = random_beamformer_cloud(ch, sp, SumPower(10.0), 2000, seed=seed, matched_phases=True)
    cloud_pts = np.array([[r.r1, r.r2] for _, r in cloud])
    expansion = points_expansion(hull, cloud_pts)
    return {
        "name": "recip-sweep-hull-contains-cloud",
        "passed": bool(expansion <= 1e-6),
        "details": {"expansion_bits": expansion, "samples": 2000, "seed": seed},
    }


def _check_recip_local_reassembly(seed: int) -> dict:
    rng = _spawned_rng(seed, 2)
    worst = 0.0
    for _ in range(20):
        k = int(rng.integers(1, 6))
        ch = _draw_channels(rng, k, True)
        sp = _unit_params(k)
        mu = float(rng.uniform(0.0, 1.0))
        sol = wsismin_sum_power(ch, sp, 10.0, mu)
        w = sum_power_beamformer(ch, sol)
        local = np.array(
            [
                local_weight_sum(ch.h1[i], ch.h2[i], sp, 10.0, *broadcast_params_sum(sol))
                for i in range(k)
            ]
        )
        worst = max(worst, float(np.max(np.abs(local - w.w))))
        p = rng.uniform(0.5, 3.0, k)
        sol_i = wsismin_individual(ch, sp, p, mu)
        w_i = individual_power_beamformer(ch, sp, p, sol_i)
        local_i = np.array(
            [
                local_weight_indiv(
                    ch.h1[i], ch.h2[i], sp, float(p[i]), *broadcast_params_indiv(sol_i)
                )
                for i in range(k)
            ]
        )
        worst = max(worst, float(np.max(np.abs(local_i - w_i.w))))
    return {
        "name": "recip-local-rules-rebuild-beamformers",
        "passed": bool(worst <= 1e-12),
        "details": {"worst_abs_error": worst, "instances": 20, "seed": seed},
    }


def _check_nonrecip_sdr_exactness(seed: int) -> dict:
    rng = _spawned_rng(seed, 3)
    worst = -np.inf
    counterexample = None
    for trial in range(3):
        ch = _draw_channels(rng, 3, False)
        sp = _unit_params(3)
        kappa = float(rng.choice([0.25, 0.5, 0.75]))
        r_sum, x_best = algorithm1_sum_power(ch, sp, 10.0, kappa)
        gamma1, gamma2 = snr_targets(kappa, r_sum)
        result = rank_one_reduce(x_best, ch, sp, gamma1, gamma2)
        gap = abs(profile_rate(result.rates, kappa) - r_sum)
        if gap > worst:
            worst = gap
            counterexample = {"trial": trial, "kappa": kappa, "relaxed": r_sum}
    return {
        "name": "nonrecip-rank-one-matches-relaxation",
        "passed": bool(worst <= 2e-4),
        "details": {"worst_gap_bits": worst, "at": counterexample, "seed": seed},
    }


def _check_nonrecip_budget_ordering(seed: int) -> dict:
    rng = _spawned_rng(seed, 4)
    ch = _draw_channels(rng, 3, False)
    sp = _unit_params(3)
    caps = np.array([4.0, 2.0, 4.0])
    r_ind, _ = algorithm2_individual(ch, sp, caps, 0.5)
    r_sum, _ = algorithm1_sum_power(ch, sp, float(caps.sum()), 0.5)
    return {
        "name": "nonrecip-caps-never-beat-pooled-budget",
        "passed": bool(r_ind <= r_sum + 2e-4),
        "details": {"individual": r_ind, "sum": r_sum, "seed": seed},
    }


def _check_nonrecip_endpoint_consistency(seed: int) -> dict:
    rng = _spawned_rng(seed, 5)
    ch = _draw_channels(rng, 3, True)
    sp = _unit_params(3)
    sol = wsismin_sum_power(ch, sp, 10.0, 1.0)
    r_closed = rate_pair(ch, sp, sum_power_beamformer(ch, sol)).r1
    r_sdp, _ = algorithm1_sum_power(ch, sp, 10.0, 1.0)
    gap = abs(r_closed - r_sdp)
    return {
        "name": "nonrecip-one-way-endpoint-matches-closed-form",
        "passed": bool(gap <= 1e-3),
        "details": {"closed_form": r_closed, "bisection": r_sdp, "gap_bits": gap, "seed": seed},
    }


def _random_sdr_problem(rng: np.random.Generator, k: int, with_caps: bool) -> SdpProblem:
    cons = []
    for _ in range(int(rng.integers(1, 4))):
        f = rng.normal(size=k) + 1j * rng.normal(size=k)
        a = np.outer(f.conj(), f) + rng.uniform(0.3, 2.0) * np.eye(k)
        cons.append((0.5 * (a + a.conj().T), float(rng.uniform(0.3, 2.0))))
    c = np.diag(rng.uniform(0.5, 3.0, size=k)).astype(np.complex128)
    caps = rng.uniform(0.4, 3.0, size=k) if with_caps else None
    return SdpProblem(dimension=k, objective=c, constraints=tuple(cons), caps=caps)


def _check_sdp_certificates(seed: int) -> dict:
    rng = _spawned_rng(seed, 6)
    failures = []
    for trial in range(20):
        prob = _random_sdr_problem(rng, 3, with_caps=(trial % 2 == 1))
        sol = solve_min_trace(prob)
        ok = (
            sol.status is SdpStatus.OPTIMAL
            and sol.duality_gap <= 1e-7
            and sol.max_violation <= 1e-8
        )
        if ok:
            cons = [(np.asarray(a), float(b)) for a, b in prob.constraints]
            oracle_obj, _ = min_trace_descent(prob.objective, cons, prob.caps, restarts=4, seed=trial)
            ok = abs(sol.objective - oracle_obj) <= 1e-4 * max(1.0, abs(oracle_obj))
        if not ok:
            failures.append(
                {
                    "trial": trial,
                    "status": sol.status.name,
                    "duality_gap": sol.duality_gap,
                    "max_violation": sol.max_violation,
                }
            )
    return {
        "name": "sdp-certified-optima-match-descent-oracle",
        "passed": not failures,
        "details": {"instances": 20, "failures": failures, "seed": seed},
    }


def _check_sdp_feasibility_verdicts(seed: int) -> dict:
    rng = _spawned_rng(seed, 7)
    disagreements = []
    checked = 0
    for trial in range(10):
        prob = _random_sdr_problem(rng, 3, with_caps=True)
        feas_prob = SdpProblem(
            dimension=3, objective=FEASIBILITY, constraints=prob.constraints, caps=prob.caps
        )
        sol = solve_feasibility(feas_prob)
        verdict = sol.status is SdpStatus.OPTIMAL
        cons = [(np.asarray(a), float(b)) for a, b in prob.constraints]
        oracle_verdict, _ = feasibility_descent(cons, prob.caps, restarts=6, seed=trial)
        # Skip razor-edge margins where both sides sit at their tolerance.
        if abs(sol.objective) < 1e-4:
            continue
        checked += 1
        if verdict != oracle_verdict:
            disagreements.append({"trial": trial, "solver": verdict, "oracle": oracle_verdict})
    return {
        "name": "sdp-feasibility-agrees-with-descent-oracle",
        "passed": not disagreements and checked >= 5,
        "details": {"checked": checked, "disagreements": disagreements, "seed": seed},
    }


def _check_region_hull_oracle(seed: int) -> dict:
    rng = _spawned_rng(seed, 8)
    mismatches = 0
    for _ in range(5):
        pts = rng.uniform(0.0, 1.0, size=(200, 2))
        fast = convex_hull(pts)
        slow = hull_bruteforce(pts)
        if fast.shape != slow.shape or not np.array_equal(fast, slow):
            mismatches += 1
    return {
        "name": "region-hull-matches-bruteforce",
        "passed": mismatches == 0,
        "details": {"clouds": 5, "mismatches": mismatches, "seed": seed},
    }


def _check_region_build_reproducible(seed: int) -> dict:
    sc = Scenario(
        k=2,
        params=_unit_params(2),
        budget=SumPower(10.0),
        reciprocal=True,
        grid=default_grid(0.1),
        realizations=3,
        seed=seed,
    )
    first = build_region(sc)
    second = build_region(sc)
    identical = region_csv_text(first) == region_csv_text(second)
    self_contained = region_contains(first, first, 0.0).contains
    return {
        "name": "region-build-deterministic-and-self-contained",
        "passed": bool(identical and self_contained),
        "details": {"identical": identical, "self_contained": self_contained, "seed": seed},
    }


def _check_region_heuristics_inside(seed: int) -> dict:
    rng = _spawned_rng(seed, 9)
    ch = _draw_channels(rng, 3, True)
    sp = _unit_params(3)
    pts = []
    for mu in default_grid(0.02):
        sol = wsismin_sum_power(ch, sp, 10.0, float(mu))
        r = rate_pair(ch, sp, sum_power_beamformer(ch, sol))
        pts.append([r.r1, r.r2])
    pts = np.array(pts)
    anchors = np.array([[0.0, pts[:, 1].max()], [pts[:, 0].max(), 0.0]])
    hull = convex_hull(np.vstack([pts, anchors]))
    r = rate_pair(ch, sp, greedy_phase_bf(ch, sp, SumPower(10.0)))
    expansion = points_expansion(hull, np.array([[r.r1, r.r2]]))
    return {
        "name": "region-heuristic-point-inside-optimal-region",
        "passed": bool(expansion <= 1e-6),
        "details": {"expansion_bits": expansion, "seed": seed},
    }


_SUITES: dict[str, list] = {
    "recip": [
        _check_recip_grid_optimality,
        _check_recip_hull_containment,
        _check_recip_local_reassembly,
    ],
    "nonrecip": [
        _check_nonrecip_sdr_exactness,
        _check_nonrecip_budget_ordering,
        _check_nonrecip_endpoint_consistency,
    ],
    "sdp": [
        _check_sdp_certificates,
        _check_sdp_feasibility_verdicts,
    ],
    "region": [
        _check_region_hull_oracle,
        _check_region_build_reproducible,
        _check_region_heuristics_inside,
    ],
}
_SUITES["all"] = [fn for name in ("recip", "nonrecip", "sdp", "region") for fn in _SUITES[name]]


def cmd_validate(args: argparse.Namespace) -> int:
    checks = [fn(args.seed) for fn in _SUITES[args.suite]]
    passed = all(c["passed"] for c in checks)
    report = {
        "schema_version": 1,
        "suite": args.suite,
        "seed": args.seed,
        "passed": passed,
        "checks": checks,
    }
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"validation_{args.suite}.json"
    path.write_text(json.dumps(report, indent=2, default=float) + "\n")
    for check in checks:
        print(f"{'pass' if check['passed'] else 'FAIL'}  {check['name']}")
        if not check["passed"]:
            print(f"      counterexample: {json.dumps(check['details'], default=float)}")
    print(f"wrote {path}")
    return 0 if passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twobeam",
        description="Collaborative beamforming rate regions for two-way relay networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_region = sub.add_parser("region", help="build a Monte Carlo rate region from a scenario")
    p_region.add_argument("scenario", help="path to a scenario JSON file")
    p_region.add_argument("--out", default=".", help="output directory (default: current)")
    p_region.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p_region.add_argument(
        "--grid-step", type=float, default=None, help="override the sweep grid with this step"
    )
    p_region.add_argument(
        "--realizations", type=int, default=None, help="override the realization count"
    )
    p_region.add_argument(
        "--epsilon", type=float, default=None, help="override the bisection gap in bits"
    )
    p_region.add_argument(
        "--rand-candidates", type=int, default=None, help="override the randomization count"
    )
    p_region.set_defaults(func=cmd_region)

    p_solve = sub.add_parser("solve", help="solve one boundary point for a fixed realization")
    p_solve.add_argument("scenario", help="path to a scenario JSON file")
    p_solve.add_argument("--mu", type=float, default=None, help="WSISMin weight (reciprocal)")
    p_solve.add_argument(
        "--kappa", type=float, default=None, help="rate-profile fraction (non-reciprocal)"
    )
    p_solve.add_argument(
        "--realization-seed",
        type=int,
        default=None,
        help="channel draw seed (default: scenario seed)",
    )
    p_solve.set_defaults(func=cmd_solve)

    p_val = sub.add_parser("validate", help="run an oracle suite and write a report")
    p_val.add_argument("suite", choices=sorted(_SUITES))
    p_val.add_argument("--seed", type=int, default=0, help="seed for the generated instances")
    p_val.add_argument("--out", default=".", help="report directory (default: current)")
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TwobeamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
