"""
Trial runner and parameter sweeps behind the accuracy experiments.

Presets (block size ``n_c``, logarithms base 2 of the block size):

* ``gnp_accuracy``: single G(n, p) community, ``n = 2^8..2^12``,
  ``p = c log2(n) / n`` for ``c in {2, 3}``; accuracy is the Jaccard index of
  the detected set and ``V`` from one random seed vertex.
* ``ppm_pq``: ``n_c = 2^10``, ``r = 2``, ``p in {2 log2 n_c, 2 log2^2 n_c} / n_c``,
  ``q in {0.1, 0.6, 3.0} / n_c``.
* ``ppm_r_fixed_block``: ``n_c = 2^10``, ``r in {2, 4, 8}``, ``q = 0.1 / n_c``.
* ``ppm_r_fixed_total``: ``n = 8 * 2^10``, ``r in {2, 4, 8}``, ``n_c = n / r``.

These grids are reconstructions: the trial counts and exact constants behind
the published plots are not known.

Seeds: trial ``t`` of cell ``c`` uses ``base_seed + c + t``.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cdst import CdstConfig, run_cdst_detailed
from .congest import detect_all_congest, simulate_cdrw
from .detect import CdrwConfig, detect_all, detect_community
from .graph import Graph, GroundTruth, PpmParams, conductance_of_set, generate_gnpq, ppm_analytic_conductance
from .metrics import CSV_FIELDS, evaluate_assignment, f_score, jaccard

SINGLE_BLOCK_DELTA = 0.05
SWEEP_FIELDS = ["experiment", "cell", "trial", "kind"] + CSV_FIELDS + ["status"]


def resolve_delta(mode, params: PpmParams | None = None, g: Graph | None = None,
                  truth: GroundTruth | None = None) -> float:
    """Stop-rule threshold from a number, ``"analytic"`` or ``"exact"``.

    ``analytic`` uses the planted-partition escape probability, ``exact`` the
    smallest conductance among ground-truth blocks. With a single block both
    would give 0, so the harness falls back to ``SINGLE_BLOCK_DELTA``.
    """
    if isinstance(mode, (int, float)):
        return float(mode)
    if mode not in ("analytic", "exact"):
        return float(mode)
    r = params.r if params is not None else truth.r
    if r <= 1:
        return SINGLE_BLOCK_DELTA
    if mode == "analytic":
        if params is None:
            raise ValueError("analytic delta needs model parameters")
        return ppm_analytic_conductance(params)
    if g is None or truth is None:
        raise ValueError("exact delta needs the graph and its labels")
    return min(conductance_of_set(g, b) for b in truth.blocks())


def estimate_params(g: Graph, truth: GroundTruth, seed: int = 0) -> PpmParams:
    """Maximum-likelihood ``p, q`` of a labelled graph (equal blocks assumed)."""
    nc, r = truth.block_size, truth.r
    e = g.edges
    same = truth.labels[e[:, 0]] == truth.labels[e[:, 1]]
    p = same.sum() / (r * nc * (nc - 1) / 2) if nc > 1 else 0.0
    q = (~same).sum() / (r * (r - 1) / 2 * nc * nc) if r > 1 else 0.0
    return PpmParams(nc, r, float(p), float(min(q, p)), seed)


def _row(params: PpmParams, **values) -> dict:
    row = {"n_c": params.n_c, "r": params.r, "p": params.p, "q": params.q, "seed": params.seed,
           "aggregate_f": 0.0, "aggregate_jaccard": 0.0, "rounds": 0, "messages": 0, "status": "ok"}
    row.update(values)
    return row


def run_trial(params: PpmParams, algorithm: str = "cdrw", delta="analytic", walk_c: float = 4.0,
              alpha: float = 0.3, cost: bool = True) -> dict:
    """Generate one instance, detect, score. Returns one CSV row as a dict."""
    g, truth = generate_gnpq(params)
    if algorithm == "cdst":
        run = run_cdst_detailed(g, CdstConfig(alpha, params.seed))
        rep = evaluate_assignment(run.assignment, truth)
        # CDST has no message model; only its synchronous round count is reported
        return _row(params, aggregate_f=rep.aggregate_f, aggregate_jaccard=rep.aggregate_jaccard,
                    rounds=run.rounds)
    if algorithm != "cdrw":
        raise ValueError(f"unknown algorithm {algorithm!r}")
    cfg = CdrwConfig(delta=resolve_delta(delta, params, g, truth), walk_c=walk_c, seed=params.seed)
    if params.r == 1:
        s = int(np.random.default_rng(params.seed).integers(g.n))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            if cost:
                run = simulate_cdrw(g, s, cfg)
                members, rounds, messages = run.members, run.ledger.rounds, run.ledger.messages
            else:
                members, rounds, messages = detect_community(g, s, cfg).members, 0, 0
        everything = np.arange(g.n)
        return _row(params, aggregate_f=f_score(members, everything), aggregate_jaccard=jaccard(members, everything),
                    rounds=rounds, messages=messages)
    if cost:
        assignment, ledger = detect_all_congest(g, cfg)
        rounds, messages = ledger.rounds, ledger.messages
    else:
        assignment, rounds, messages = detect_all(g, cfg), 0, 0
    rep = evaluate_assignment(assignment, truth)
    return _row(params, aggregate_f=rep.aggregate_f, aggregate_jaccard=rep.aggregate_jaccard,
                rounds=rounds, messages=messages)


@dataclass
class SweepSpec:
    experiment: str
    cells: list[dict]  # each: n_c, r, p, q
    trials: int = 10
    base_seed: int = 0
    algorithm: str = "cdrw"
    delta: object = "analytic"
    walk_c: float = 4.0
    alpha: float = 0.3
    cost: bool = True
    out: str | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.cells:
            raise ValueError("sweep grid is empty")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")


def _lg(x: int) -> float:
    return math.log2(x)


def preset(name: str, trials: int = 10, base_seed: int = 0, **kw) -> SweepSpec:
    nc = 2**10
    if name == "gnp_accuracy":
        cells = [{"n_c": n, "r": 1, "p": c * _lg(n) / n, "q": 0.0}
                 for c in (2, 3) for n in (2**8, 2**9, 2**10, 2**11, 2**12)]
    elif name == "ppm_pq":
        cells = [{"n_c": nc, "r": 2, "p": p, "q": q / nc}
                 for p in (2 * _lg(nc) / nc, 2 * _lg(nc) ** 2 / nc) for q in (0.1, 0.6, 3.0)]
    elif name == "ppm_r_fixed_block":
        cells = [{"n_c": nc, "r": r, "p": 2 * _lg(nc) / nc, "q": 0.1 / nc} for r in (2, 4, 8)]
    elif name == "ppm_r_fixed_total":
        total = 8 * 2**10
        cells = [{"n_c": total // r, "r": r, "p": 2 * _lg(total // r) / (total // r), "q": 0.1 / (total // r)}
                 for r in (2, 4, 8)]
    else:
        raise ValueError(f"unknown experiment {name!r}")
    return SweepSpec(name, cells, trials, base_seed, **kw)


def _job(args):
    spec, ci, ti = args
    cell = spec.cells[ci]
    params = PpmParams(cell["n_c"], cell["r"], cell["p"], cell["q"], spec.base_seed + ci + ti)
    try:
        row = run_trial(params, spec.algorithm, spec.delta, spec.walk_c, spec.alpha, spec.cost)
    except Exception as exc:  # a failed trial is reported, never dropped
        row = _row(params, status=f"error:{type(exc).__name__}")
    row.update(experiment=spec.experiment, cell=ci, trial=ti, kind="trial")
    return row


def run_sweep(spec: SweepSpec, jobs: int = 1) -> list[dict]:
    """All trial rows in (cell, trial) order, each cell followed by its mean and std rows."""
    work = [(spec, ci, ti) for ci in range(len(spec.cells)) for ti in range(spec.trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_job, work))
    else:
        rows = [_job(w) for w in work]
    out = []
    for ci, cell in enumerate(spec.cells):
        trials = [r for r in rows if r["cell"] == ci]
        out.extend(trials)
        ok = [r for r in trials if r["status"] == "ok"]
        for kind, fn in (("mean", np.mean), ("std", np.std)):
            agg = {"experiment": spec.experiment, "cell": ci, "trial": -1, "kind": kind,
                   "n_c": cell["n_c"], "r": cell["r"], "p": cell["p"], "q": cell["q"], "seed": -1,
                   "status": "ok" if ok else "no_successful_trials"}
            for col in ("aggregate_f", "aggregate_jaccard", "rounds", "messages"):
                agg[col] = float(fn([r[col] for r in ok])) if ok else 0.0
            out.append(agg)
    return out


def rows_to_csv(rows: list[dict], fields=SWEEP_FIELDS) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def cell_means(rows: list[dict], column: str = "aggregate_f") -> list[float]:
    return [r[column] for r in rows if r["kind"] == "mean"]
