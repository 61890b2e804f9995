"""Experiment commands: each writes CSV tables plus a ``manifest.json``.

Every table has a fixed column order (see ``SCHEMAS``), reals carry 17
significant digits and rows are merged by key before writing, so the same
config and seed always reproduce the same bytes regardless of ``workers``.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from . import results_io
from .ansatz import ComputationalSubspace
from .config import ExperimentConfig
from .driver import (
    AdaptConfig,
    RunResult,
    compare_eigenpairs,
    extract_eigenstates,
    extrapolate_gibbs,
    run_tepid_adapt,
    state_free_energy,
)
from .errors import ContractViolation, OptimizerStalled, ResourceError, RunFailure, TepidError
from .fitting import fit_curve
from .objective import FreeEnergyModel
from .optimize import OptimizerConfig, minimize
from .quantum import MAX_DENSE_QUBITS, DensityMatrix, fidelity
from .xxz import BOUNDARY, GibbsReference, XXZConfig, relative_error, xxz_reference, xxz_sector_energies

log = logging.getLogger(__name__)

SCHEMAS: dict[str, tuple[str, ...]] = {
    "run_states.csv": ("state", "subspace_index", "energy", "exact_energy", "infidelity",
                       "relative_error", "flagged"),
    "m_scan.csv": ("m", "state", "infidelity", "relative_error", "gibbs_infidelity",
                   "gibbs_relative_error", "status"),
    "beta_extrapolate.csv": ("m", "beta", "mode", "relative_error", "gibbs_fidelity", "status"),
    "tolerance_trace.csv": ("m", "adaptation", "n_params", "pool_grad_norm", "target",
                            "relative_error", "floor"),
    "tolerance_convergence.csv": ("m", "epsilon", "adaptation", "gibbs_relative_error", "floor"),
    "scaling_m_min.csv": ("phase", "j_z", "n_sites", "threshold", "beta", "m_min", "fidelity"),
    "scaling_beta_min.csv": ("phase", "j_z", "n_sites", "threshold", "m", "beta_min", "fidelity"),
    "scaling_fits.csv": ("phase", "j_z", "study", "threshold", "kind", "a", "b", "mse", "status"),
    "random_restart.csv": ("n_operators", "n_params", "restart", "converged", "relative_error",
                           "status"),
    "random_restart_floors.csv": ("label", "indices", "relative_error"),
}

SMOKE_RESTARTS = 10
SMOKE_SCALING_N_MAX = 8


@dataclass(frozen=True)
class RunOptions:
    out_dir: Path
    seed: int = 0
    workers: int = 1
    smoke: bool = False


def fmt_cell(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_csv(path: Path, rows: Iterable[dict]) -> int:
    columns = SCHEMAS[path.name]
    n = 0
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            if set(row) != set(columns):
                raise ContractViolation(f"{path.name}: row keys {sorted(row)} do not match the schema")
            writer.writerow([fmt_cell(row[c]) for c in columns])
            n += 1
    return n


def read_csv(path) -> list[dict[str, str]]:
    """Read a table written by this module, checking its header against the schema."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != SCHEMAS.get(path.name):
            raise ContractViolation(f"{path.name}: header {header} does not match the schema")
        return [dict(zip(header, row)) for row in reader]


def _write_outputs(opts: RunOptions, command: str, tables: dict[str, list[dict]],
                   metadata: dict) -> list[Path]:
    opts.out_dir.mkdir(parents=True, exist_ok=True)
    files = {}
    written = []
    for name, rows in tables.items():
        path = opts.out_dir / name
        n = write_csv(path, rows)
        read_csv(path)  # round-trip schema check
        files[name] = {"columns": list(SCHEMAS[name]), "rows": n}
        written.append(path)
    manifest = {"command": command, "files": files, "metadata": metadata}
    path = opts.out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=_json_default) + "\n")
    written.append(path)
    return written


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(type(obj).__name__)


def _map(fn: Callable, tasks: list, workers: int) -> list:
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


def _require_model(cfg: ExperimentConfig) -> None:
    if cfg.model is None or cfg.beta_bar is None or cfg.subspace is None:
        raise ContractViolation("config lacks the model, beta_bar or subspace")
    if cfg.model.n_sites > MAX_DENSE_QUBITS:
        raise ResourceError(f"{cfg.model.n_sites} sites exceeds the dense cap of {MAX_DENSE_QUBITS}")


def _adapt_cfg(cfg: ExperimentConfig, seed: int, epsilon: float | None = None) -> AdaptConfig:
    return AdaptConfig(epsilon=cfg.epsilon if epsilon is None else epsilon,
                       max_operators=cfg.max_operators,
                       run_initial_mu_opt=cfg.run_initial_mu_opt, seed=seed)


def _base_metadata(cfg: ExperimentConfig, opts: RunOptions) -> dict:
    meta = {"seed": opts.seed, "smoke": opts.smoke, "epsilon": cfg.epsilon}
    if cfg.model is not None:
        meta.update(n_sites=cfg.model.n_sites, j_z=cfg.model.j_z, phase=cfg.model.phase, boundary=BOUNDARY)
    if cfg.beta_bar is not None:
        meta["beta_bar"] = cfg.beta_bar
    if cfg.subspace is not None:
        meta["subspace"] = list(cfg.subspace.elements)
    return meta


@dataclass(frozen=True)
class _RunTask:
    n_sites: int
    j_z: float
    beta: float
    subspace: ComputationalSubspace
    adapt: AdaptConfig


def _execute(task: _RunTask) -> RunResult | str:
    """Run one task; failures come back as a status string."""
    ref = xxz_reference(task.n_sites, task.j_z, task.beta)
    try:
        return run_tepid_adapt(ref.hamiltonian, task.beta, task.subspace, task.adapt)
    except ResourceError:
        raise
    except TepidError as exc:
        return f"failed: {exc}"


def gibbs_metrics(result: RunResult, ref: GibbsReference, beta: float | None = None,
                  rho=None) -> tuple[float, float]:
    """(infidelity, relative free-energy error) of a prepared Gibbs state at ``beta``."""
    beta = result.beta_bar if beta is None else beta
    rho = result.gibbs_state if rho is None else rho
    f = state_free_energy(rho, ref.hamiltonian, beta)
    return 1.0 - fidelity(rho, ref.exact_state), float(relative_error(f, ref.free_energy_exact))


def _status(result: RunResult, comparisons) -> str:
    if any(c.flagged for c in comparisons):
        return "flagged"
    return "ok" if result.terminated_by == "pool_tol" else "max_ops"


# ---------------------------------------------------------------- run


def cmd_run(cfg: ExperimentConfig, opts: RunOptions) -> list[Path]:
    """One adaptive run at ``m = m_values[-1]`` (default: the whole subspace)."""
    _require_model(cfg)
    m = cfg.m_list[-1]
    task = _RunTask(cfg.model.n_sites, cfg.model.j_z, cfg.beta_bar, cfg.subspace_for(m),
                    _adapt_cfg(cfg, opts.seed))
    result = _execute(task)
    if isinstance(result, str):
        raise RunFailure(result)
    ref = xxz_reference(cfg.model.n_sites, cfg.model.j_z, cfg.beta_bar)
    rows = []
    for c in compare_eigenpairs(result, ref):
        rows.append({"state": c.index + 1, "subspace_index": c.subspace_index + 1, "energy": c.energy,
                     "exact_energy": c.exact_energy, "infidelity": c.infidelity,
                     "relative_error": c.relative_energy_error, "flagged": c.flagged})
    infid, rel = gibbs_metrics(result, ref)
    rows.append({"state": "rho_G", "subspace_index": "-",
                 "energy": state_free_energy(result.gibbs_state, ref.hamiltonian, cfg.beta_bar),
                 "exact_energy": ref.free_energy_exact, "infidelity": infid, "relative_error": rel,
                 "flagged": False})
    opts.out_dir.mkdir(parents=True, exist_ok=True)
    doc = results_io.dump(result, opts.out_dir / "run_result.txt")
    meta = _base_metadata(cfg, opts)
    meta.update(m=m, terminated_by=result.terminated_by, n_operators=len(result.operators),
                floor_relative_error=ref.floor_relative_error(m))
    return [doc] + _write_outputs(opts, "run", {"run_states.csv": rows}, meta)


# ---------------------------------------------------------------- m-scan


def cmd_m_scan(cfg: ExperimentConfig, opts: RunOptions) -> list[Path]:
    _require_model(cfg)
    tasks = [_RunTask(cfg.model.n_sites, cfg.model.j_z, cfg.beta_bar, cfg.subspace_for(m),
                      _adapt_cfg(cfg, opts.seed)) for m in cfg.m_list]
    results = _map(_execute, tasks, opts.workers)
    ref = xxz_reference(cfg.model.n_sites, cfg.model.j_z, cfg.beta_bar)
    rows = []
    for m, result in sorted(zip(cfg.m_list, results), key=lambda t: t[0]):
        if isinstance(result, str):
            rows.append({"m": m, "state": "-", "infidelity": math.nan, "relative_error": math.nan,
                         "gibbs_infidelity": math.nan, "gibbs_relative_error": math.nan,
                         "status": result})
            continue
        comps = compare_eigenpairs(result, ref)
        g_inf, g_rel = gibbs_metrics(result, ref)
        status = _status(result, comps)
        for c in comps:
            rows.append({"m": m, "state": c.index + 1, "infidelity": c.infidelity,
                         "relative_error": c.relative_energy_error, "gibbs_infidelity": g_inf,
                         "gibbs_relative_error": g_rel, "status": status})
    meta = _base_metadata(cfg, opts)
    meta["m_values"] = list(cfg.m_list)
    return _write_outputs(opts, "m-scan", {"m_scan.csv": rows}, meta)


# ---------------------------------------------------------------- beta-extrapolate


def cmd_beta_extrapolate(cfg: ExperimentConfig, opts: RunOptions) -> list[Path]:
    """Optimized runs for grid points up to ``beta_bar``, extrapolation above it.

    ``beta_bar`` itself is reported in both modes.
    """
    _require_model(cfg)
    bb = cfg.beta_bar
    opt_betas = sorted({b for b in cfg.beta_grid if b <= bb} | {bb})
    ext_betas = sorted(b for b in cfg.beta_grid if b >= bb)
    keys = [(m, b) for m in cfg.m_list for b in opt_betas]
    tasks = [_RunTask(cfg.model.n_sites, cfg.model.j_z, b, cfg.subspace_for(m), _adapt_cfg(cfg, opts.seed))
             for m, b in keys]
    results = dict(zip(keys, _map(_execute, tasks, opts.workers)))
    rows = []
    for m in sorted(cfg.m_list):
        for b in opt_betas:
            if b not in cfg.beta_grid and b != bb:
                continue
            res = results[(m, b)]
            ref = xxz_reference(cfg.model.n_sites, cfg.model.j_z, b)
            if isinstance(res, str):
                rows.append(_beta_row(m, b, "optimized", math.nan, math.nan, res))
                continue
            infid, rel = gibbs_metrics(res, ref)
            rows.append(_beta_row(m, b, "optimized", rel, 1.0 - infid, res.terminated_by))
        trained = results[(m, bb)]
        for b in ext_betas:
            if isinstance(trained, str):
                rows.append(_beta_row(m, b, "extrapolated", math.nan, math.nan, trained))
                continue
            ref = xxz_reference(cfg.model.n_sites, cfg.model.j_z, b)
            rho = extrapolate_gibbs(trained, b)
            infid, rel = gibbs_metrics(trained, ref, b, rho)
            rows.append(_beta_row(m, b, "extrapolated", rel, 1.0 - infid, trained.terminated_by))
    meta = _base_metadata(cfg, opts)
    meta["beta_grid"] = list(cfg.beta_grid)
    return _write_outputs(opts, "beta-extrapolate", {"beta_extrapolate.csv": rows}, meta)


def _beta_row(m, beta, mode, rel, fid, status) -> dict:
    return {"m": m, "beta": float(beta), "mode": mode, "relative_error": rel,
            "gibbs_fidelity": fid, "status": "ok" if status == "pool_tol" else status}


# ---------------------------------------------------------------- tolerance-scan


def adaptation_errors(result: RunResult, ref: GibbsReference) -> list[dict]:
    """Relative errors of the Gibbs free energy and each sorted eigenstate energy per adaptation."""
    rows = []
    for row in result.trace:
        k = row.n_operators
        partial = _truncated_result(result, k, row.params)
        f = state_free_energy(partial.gibbs_state, ref.hamiltonian, result.beta_bar)
        errs = {"gibbs": float(relative_error(f, ref.free_energy_exact))}
        for i, pair in enumerate(partial.eigenpairs):
            errs[f"state_{i + 1}"] = float(relative_error(pair.energy, ref.energies[i]))
        rows.append({"adaptation": k, "n_params": row.n_params, "pool_grad_norm": row.pool_grad_norm,
                     "converged": row.converged, "errors": errs})
    return rows


def _truncated_result(result: RunResult, k: int, params: np.ndarray) -> RunResult:
    ops = result.operators[:k]
    model = FreeEnergyModel(result.hamiltonian, result.beta_bar, result.subspace, ops)
    phi, theta = model.split(params)
    psi = model.state_matrix(params)
    rho = psi @ psi.conj().T
    partial = replace(result, operators=ops, phi_star=phi, theta_star=theta, eigenpairs=[],
                      gibbs_state=DensityMatrix(0.5 * (rho + rho.conj().T), result.hamiltonian.n_qubits))
    partial.eigenpairs = extract_eigenstates(partial)
    return partial


def cmd_tolerance_scan(cfg: ExperimentConfig, opts: RunOptions) -> list[Path]:
    """One run per m to the tightest tolerance, then convergence points for every tolerance.

    An adaptation counts as converged for ``epsilon`` once the inner
    optimizer met its gradient tolerance and the pool-gradient norm is at
    most ``epsilon``.
    """
    _require_model(cfg)
    eps_min = min(cfg.epsilon_values)
    tasks = [_RunTask(cfg.model.n_sites, cfg.model.j_z, cfg.beta_bar, cfg.subspace_for(m),
                      _adapt_cfg(cfg, opts.seed, eps_min)) for m in cfg.m_list]
    results = _map(_execute, tasks, opts.workers)
    ref = xxz_reference(cfg.model.n_sites, cfg.model.j_z, cfg.beta_bar)
    trace_rows, conv_rows = [], []
    for m, result in sorted(zip(cfg.m_list, results), key=lambda t: t[0]):
        floor = ref.floor_relative_error(m)
        if isinstance(result, str):
            for eps in sorted(cfg.epsilon_values):
                conv_rows.append({"m": m, "epsilon": eps, "adaptation": -1,
                                  "gibbs_relative_error": math.nan, "floor": floor})
            continue
        per = adaptation_errors(result, ref)
        for r in per:
            for target, err in r["errors"].items():
                trace_rows.append({"m": m, "adaptation": r["adaptation"], "n_params": r["n_params"],
                                   "pool_grad_norm": r["pool_grad_norm"], "target": target,
                                   "relative_error": err, "floor": floor})
        for eps in sorted(cfg.epsilon_values):
            hit = next((r for r in per if r["converged"] and r["pool_grad_norm"] <= eps), None)
            conv_rows.append({"m": m, "epsilon": eps, "adaptation": -1 if hit is None else hit["adaptation"],
                              "gibbs_relative_error": math.nan if hit is None else hit["errors"]["gibbs"],
                              "floor": floor})
    meta = _base_metadata(cfg, opts)
    meta["epsilon_values"] = sorted(cfg.epsilon_values)
    return _write_outputs(opts, "tolerance-scan",
                          {"tolerance_trace.csv": trace_rows, "tolerance_convergence.csv": conv_rows}, meta)


# ---------------------------------------------------------------- scaling-study


def truncated_gibbs_fidelity(energies: np.ndarray, beta: float, m: int) -> float:
    """Fidelity between the rank-``m`` truncated and the exact Gibbs state.

    Both states are diagonal in the eigenbasis, so the fidelity is the
    Boltzmann weight kept by the truncation, ``Z_m / Z``.
    """
    w = np.exp(-beta * (energies - energies[0]))
    return float(w[:m].sum() / w.sum())


def minimal_m(energies: np.ndarray, beta: float, threshold: float) -> tuple[int, float]:
    """Smallest ``m`` whose truncated Gibbs state reaches ``threshold``.

    The comparison uses the discarded weight ``1 - F = tail / Z`` to avoid
    rounding at thresholds near one; threshold 1 therefore needs the full
    spectrum.
    """
    w = np.exp(-beta * (energies - energies[0]))
    z = w.sum()
    tail = np.concatenate([np.cumsum(w[::-1])[::-1], [0.0]])  # tail[m] = sum_{k >= m} w_k
    for m in range(1, len(w) + 1):
        if tail[m] / z <= 1.0 - threshold:
            return m, float(1.0 - tail[m] / z)
    return len(w), 1.0


def minimal_beta(energies: np.ndarray, m: int, threshold: float, grid) -> tuple[float, float]:
    for beta in grid:
        w = np.exp(-beta * (energies - energies[0]))
        tail = w[m:].sum()
        if tail / w.sum() <= 1.0 - threshold:
            return float(beta), float(1.0 - tail / w.sum())
    return math.nan, math.nan


def _scaling_task(args) -> tuple:
    n, jz = args
    return n, jz, xxz_sector_energies(XXZConfig(n, jz))


def cmd_scaling_study(cfg: ExperimentConfig, opts: RunOptions) -> list[Path]:
    """Exact-diagonalization scaling of ``m_min`` and ``beta_min`` with chain length, plus fits."""
    n_max = min(cfg.scaling_n_max, SMOKE_SCALING_N_MAX) if opts.smoke else cfg.scaling_n_max
    if n_max > MAX_DENSE_QUBITS:
        raise ResourceError(f"scaling_n_max = {n_max} exceeds the cap of {MAX_DENSE_QUBITS}")
    sizes = range(cfg.scaling_n_min, n_max + 1)
    spectra = {(n, jz): e for n, jz, e in
               _map(_scaling_task, [(n, jz) for jz in cfg.scaling_j_z for n in sizes], opts.workers)}
    m_rows, b_rows, fit_rows = [], [], []
    for jz in cfg.scaling_j_z:
        phase = XXZConfig(2, jz).phase
        for thr in cfg.fidelity_thresholds:
            m_pts, b_pts = [], []
            for n in sizes:
                e = spectra[(n, jz)]
                m_min, fid = minimal_m(e, cfg.scaling_beta, thr)
                m_rows.append({"phase": phase, "j_z": jz, "n_sites": n, "threshold": thr,
                               "beta": cfg.scaling_beta, "m_min": m_min, "fidelity": fid})
                m_pts.append((n, m_min))
                b_min, bfid = minimal_beta(e, cfg.scaling_m, thr, cfg.beta_min_grid)
                b_rows.append({"phase": phase, "j_z": jz, "n_sites": n, "threshold": thr,
                               "m": cfg.scaling_m, "beta_min": b_min, "fidelity": bfid})
                if math.isfinite(b_min):
                    b_pts.append((n, b_min))
            for study, pts, kinds in (("m_min", m_pts, ("power", "exponential")),
                                      ("beta_min", b_pts, ("power",))):
                for kind in kinds:
                    fit = fit_curve(pts, kind)
                    fit_rows.append({"phase": phase, "j_z": jz, "study": study, "threshold": thr,
                                     "kind": kind, "a": fit.a, "b": fit.b, "mse": fit.mse,
                                     "status": fit.status if fit.ok else f"failed: {fit.message}"})
    meta = {"seed": opts.seed, "smoke": opts.smoke, "boundary": BOUNDARY, "n_sites_range": [cfg.scaling_n_min, n_max],
            "beta": cfg.scaling_beta, "m": cfg.scaling_m, "j_z_values": list(cfg.scaling_j_z),
            "thresholds": list(cfg.fidelity_thresholds),
            "beta_min_grid": {"start": cfg.beta_min_grid[0], "stop": cfg.beta_min_grid[-1],
                              "points": len(cfg.beta_min_grid)},
            "method": "sector exact diagonalization; fidelity = Z_m / Z"}
    return _write_outputs(opts, "scaling-study", {"scaling_m_min.csv": m_rows,
                                                  "scaling_beta_min.csv": b_rows,
                                                  "scaling_fits.csv": fit_rows}, meta)


# ---------------------------------------------------------------- random-restart


@dataclass(frozen=True)
class _RestartTask:
    n_sites: int
    j_z: float
    beta: float
    subspace: ComputationalSubspace
    operators: tuple
    x0: tuple | None  # explicit start; None draws from the seed
    seed: tuple
    scale: float


def _restart(task: _RestartTask) -> tuple[bool, float, str]:
    ref = xxz_reference(task.n_sites, task.j_z, task.beta)
    model = FreeEnergyModel(ref.hamiltonian, task.beta, task.subspace, task.operators)
    if task.x0 is None:
        rng = np.random.default_rng(np.random.SeedSequence(task.seed))
        x0 = rng.uniform(-task.scale, task.scale, model.n_params)
    else:
        x0 = np.array(task.x0)
    try:
        res = minimize(model.value_and_grad, x0, OptimizerConfig())
        f, ok, status = res.fun, res.converged, "ok" if res.converged else "max_iterations"
    except OptimizerStalled as exc:
        f, ok, status = exc.f, False, "stalled"
    return ok, float(relative_error(f, ref.free_energy_exact)), status


def _nearest_levels(energies, exact) -> list[int]:
    """Map measured energies to distinct exact eigenvalue indices, closest first."""
    taken: list[int] = []
    for e in sorted(energies):
        order = np.argsort(np.abs(exact - e), kind="stable")
        taken.append(int(next(i for i in order if i not in taken)))
    return sorted(taken)


def cmd_random_restart(cfg: ExperimentConfig, opts: RunOptions) -> list[Path]:
    """Re-optimize every ansatz length along the adaptive path from random angles.

    Restart ``-1`` starts from the path's own warm start (previous optimum
    with the new angle at zero) and should land on the path point.
    """
    _require_model(cfg)
    m = cfg.m_list[-1]
    n_restarts = SMOKE_RESTARTS if opts.smoke else cfg.restarts
    sub = cfg.subspace_for(m)
    path = _execute(_RunTask(cfg.model.n_sites, cfg.model.j_z, cfg.beta_bar, sub, _adapt_cfg(cfg, opts.seed)))
    if isinstance(path, str):
        raise RunFailure(path)
    tasks, keys = [], []
    for k in range(1, len(path.operators) + 1):
        ops = path.operators[:k]
        warm = tuple(np.append(path.trace[k - 1].params, 0.0))
        common = dict(n_sites=cfg.model.n_sites, j_z=cfg.model.j_z, beta=cfg.beta_bar, subspace=sub,
                      operators=ops, scale=cfg.restart_scale)
        tasks.append(_RestartTask(x0=warm, seed=(), **common))
        keys.append((k, len(warm), -1))
        for r in range(n_restarts):
            tasks.append(_RestartTask(x0=None, seed=(opts.seed, k, r), **common))
            keys.append((k, len(warm), r))
    outcomes = _map(_restart, tasks, opts.workers)
    rows = [{"n_operators": k, "n_params": npar, "restart": r, "converged": ok, "relative_error": err,
             "status": status} for (k, npar, r), (ok, err, status) in sorted(zip(keys, outcomes))]
    ref = xxz_reference(cfg.model.n_sites, cfg.model.j_z, cfg.beta_bar)
    lowest = list(range(m))
    found = _nearest_levels([p.energy for p in path.eigenpairs], ref.energies)
    floors = [{"label": "lowest", "indices": " ".join(map(str, lowest)),
               "relative_error": float(relative_error(ref.index_set_floor(lowest), ref.free_energy_exact))}]
    if found != lowest:
        floors.append({"label": "path", "indices": " ".join(map(str, found)),
                       "relative_error": float(relative_error(ref.index_set_floor(found), ref.free_energy_exact))})
    meta = _base_metadata(cfg, opts)
    meta.update(m=m, restarts=n_restarts, restart_scale=cfg.restart_scale,
                path_operators=[p.letters for p in path.operators])
    return _write_outputs(opts, "random-restart",
                          {"random_restart.csv": rows, "random_restart_floors.csv": floors}, meta)


COMMANDS = {
    "run": cmd_run,
    "m-scan": cmd_m_scan,
    "beta-extrapolate": cmd_beta_extrapolate,
    "tolerance-scan": cmd_tolerance_scan,
    "scaling-study": cmd_scaling_study,
    "random-restart": cmd_random_restart,
}
