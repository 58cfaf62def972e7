"""Verification runs: spectra on refined grids checked against the bounds.

A run assembles the mixed operator on each requested grid, solves for the
lowest eigenpairs, and compares partial eigenvalue sums with the
Berezin-Li-Yau lower bound of the matching regime.  Bounds are only given a
verdict for indices whose eigenvalue has settled between the two finest
grids; the rest are reported as ``unverdicted``.
"""
from __future__ import annotations

import csv
import itertools
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
from scipy.integrate import trapezoid

from . import bounds as bd
from .bounds import DomainMeta, OperatorSpec
from .discretize import Grid1D, fractional_matrix, laplacian_matrix
from .eigensolve import Spectrum, is_positive_definite, symmetric_eigen
from .embedding import discrete_embedding_constant
from .errors import ContractError, MixBLYError, ResolutionError

log = logging.getLogger(__name__)

__all__ = [
    "RunConfig",
    "BoundReport",
    "solve_operator",
    "run_verification",
    "proof_diagnostics",
    "default_xi_grid",
    "sweep",
    "write_sweep_csv",
    "emit_plot_data",
]

CHECKS = frozenset({"bly", "polya", "berezin", "weyl_ratio", "proof_diag"})
VERDICT_RTOL = 1e-9
GUARD_RTOL = 0.01
BESSEL_SLACK = 1e-3
PLOT_COLUMNS = ("k", "sum_lambda", "bound", "margin", "verdict")


@dataclass
class RunConfig:
    a: float
    b: float
    s: float
    domain: tuple[float, float] = (0.0, 1.0)
    grid_sizes: Sequence[int] = (256, 512)
    k_max: int = 10
    checks: frozenset = frozenset({"bly"})
    output: Optional[str] = None
    format: str = "json"
    c_e_source: Union[str, float] = "discrete"
    xi_max: float = 40 * math.pi

    def __post_init__(self):
        self.domain = (float(self.domain[0]), float(self.domain[1]))
        self.grid_sizes = tuple(sorted(int(n) for n in self.grid_sizes))
        self.checks = frozenset(self.checks)
        if not self.grid_sizes:
            raise ContractError("at least one grid size is required")
        unknown = self.checks - CHECKS
        if unknown:
            raise ContractError(f"unknown checks: {sorted(unknown)}")
        if self.format not in ("json", "csv"):
            raise ContractError(f"format must be json or csv, got {self.format!r}")
        if not 1 <= self.k_max <= min(self.grid_sizes) // 2:
            raise ContractError("k_max must lie in [1, min(grid_sizes) / 2]")
        if self.c_e_source != "discrete" and not float(self.c_e_source) > 0:
            raise ContractError("c_e_source must be 'discrete' or a positive number")

    @property
    def operator(self) -> OperatorSpec:
        return OperatorSpec(1, self.a, self.b, self.s)

    @property
    def grids(self) -> list[Grid1D]:
        return [Grid1D(self.domain[0], self.domain[1], n) for n in self.grid_sizes]

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        """Build from a JSON-style mapping.

        The operator may be given flat (``a``, ``b``, ``s``) or nested under
        ``"operator"``; ``c_e_source`` is ``"discrete"``, a number, or
        ``{"supplied": value}``.
        """
        data = dict(raw)
        data.update(data.pop("operator", {}) or {})
        data.pop("n", None)
        source = data.get("c_e_source")
        if isinstance(source, dict):
            data["c_e_source"] = float(source["supplied"])
        known = {f for f in cls.__dataclass_fields__}
        extra = set(data) - known
        if extra:
            raise ContractError(f"unknown config keys: {sorted(extra)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path, **overrides) -> "RunConfig":
        raw = json.loads(Path(path).read_text())
        raw.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_dict(raw)


@dataclass
class BoundReport:
    meta: dict
    rows: list = field(default_factory=list)

    @property
    def error(self) -> Optional[str]:
        return self.meta.get("error")

    @property
    def ok(self) -> bool:
        """No error, no failed positivity check, every verdict pass or unverdicted."""
        if self.error or self.meta.get("positive_definite") is False:
            return False
        for row in self.rows:
            for key, value in row.items():
                if key.endswith("verdict") and value == "fail":
                    return False
        diag = self.meta.get("proof_diagnostics")
        if diag and not (diag["bessel_ok"] and diag["moment_ok"]):
            return False
        return True

    def to_dict(self) -> dict:
        return {"meta": self.meta, "rows": self.rows}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _verdict(ok: bool, verdicted: bool) -> str:
    if not verdicted:
        return "unverdicted"
    return "pass" if ok else "fail"


def solve_operator(g: Grid1D, op: OperatorSpec, m: int) -> Spectrum:
    """Lowest ``m`` eigenpairs of the mixed operator with Rayleigh components."""
    local = op.a * laplacian_matrix(g)
    if op.b != 0:
        nonlocal_ = op.b * fractional_matrix(g, op.s)
    else:
        nonlocal_ = np.zeros_like(local)
    return symmetric_eigen(local + nonlocal_, m, parts=(local, nonlocal_))


def default_xi_grid(xi_max: float = 40 * math.pi, spacing: float = 0.05 * math.pi) -> np.ndarray:
    count = int(math.ceil(2 * xi_max / spacing)) + 1
    return np.linspace(-xi_max, xi_max, count)


def proof_diagnostics(spectrum: Spectrum, g: Grid1D, op: OperatorSpec, xi_grid, k: Optional[int] = None) -> dict:
    """Discrete versions of the Bessel cap and the Plancherel moment identity.

    With ``u_i`` the L^2-normalised eigenfunctions and ``u_hat`` their
    (trapezoidal) Fourier transforms, ``f = sum_i |u_hat_i|^2`` must stay
    below ``|Omega| / (2 pi)`` and the truncated moment
    ``int (a xi^2 + b |xi|^{2s}) f`` must not exceed the eigenvalue sum.
    """
    xi = np.asarray(xi_grid, dtype=float)
    if xi.ndim != 1 or xi.size < 2 or np.any(np.diff(xi) <= 0):
        raise ContractError("xi_grid must be increasing with at least two points")
    if np.max(np.diff(xi)) > math.pi / g.length:
        raise ResolutionError(f"xi spacing must not exceed pi / |Omega| = {math.pi / g.length:.4g}")
    k = len(spectrum) if k is None else k
    h = g.h
    u = spectrum.eigenvectors[:, :k] / math.sqrt(h)
    phase = np.exp(1j * np.outer(xi, g.nodes))
    u_hat = (h / math.sqrt(2 * math.pi)) * (phase @ u)
    density = np.sum(np.abs(u_hat) ** 2, axis=1)
    cap = g.length / (2 * math.pi)
    weight = op.a * xi ** 2 + op.b * np.abs(xi) ** (2 * op.s)
    moment = float(trapezoid(weight * density, xi))
    total = float(np.sum(spectrum.eigenvalues[:k]))
    return {
        "k": k,
        "xi_range": [float(xi[0]), float(xi[-1])],
        "bessel_cap": cap,
        "density_max": float(density.max()),
        "bessel_ok": bool(density.max() <= cap * (1 + BESSEL_SLACK)),
        "moment": moment,
        "sum_lambda": total,
        "moment_ratio": moment / total,
        "truncation_deficit": total - moment,
        "moment_ok": bool(moment <= total * (1 + VERDICT_RTOL)),
    }


def _resolve_c_e(cfg: RunConfig, finest: Grid1D) -> Optional[float]:
    if cfg.b >= 0:
        return None
    if cfg.c_e_source == "discrete":
        return discrete_embedding_constant(finest, cfg.s).mu_max
    return float(cfg.c_e_source)


def run_verification(cfg: RunConfig) -> BoundReport:
    """Check the eigenvalue-sum lower bound (and requested extras) for one operator.

    Errors (regime violations, solver failures) are reported in the returned
    report's ``meta["error"]`` rather than raised.
    """
    meta = {
        "a": cfg.a,
        "b": cfg.b,
        "s": cfg.s,
        "domain": list(cfg.domain),
        "grid_sizes": list(cfg.grid_sizes),
        "k_max": cfg.k_max,
        "checks": sorted(cfg.checks),
    }
    try:
        return _run(cfg, meta)
    except MixBLYError as exc:
        log.warning("verification failed: %s", exc)
        meta["error"] = f"{type(exc).__name__}: {exc}"
        return BoundReport(meta, [])


def _run(cfg, meta):
    op = cfg.operator
    grids = cfg.grids
    finest = grids[-1]
    dmeta = DomainMeta(1, finest.length)

    c_e = _resolve_c_e(cfg, finest)
    meta["c_e"] = c_e
    meta["c_e_source"] = cfg.c_e_source if c_e is not None else None
    meta["regime"] = op.regime(c_e)
    if c_e is not None:
        meta["c_e_below_one"] = c_e < 1
        local = op.a * laplacian_matrix(finest)
        meta["positive_definite"] = is_positive_definite(local + op.b * fractional_matrix(finest, op.s))

    m = min(cfg.k_max + 1, finest.n_interior)
    spectra = [solve_operator(g, op, m) for g in grids]
    fine = spectra[-1]
    lam = fine.eigenvalues
    meta["max_residual"] = float(max(sp.residual_norms.max() for sp in spectra))
    meta["max_rayleigh_defect"] = float(np.max(np.abs(fine.local_part + fine.nonlocal_part - lam) / np.abs(lam)))

    if len(spectra) > 1:
        coarse = spectra[-2].eigenvalues
        change = np.abs(lam - coarse) / np.abs(lam)
        meta["convergence_guard"] = f"relative change < {GUARD_RTOL} between n={grids[-2].n_interior} and n={finest.n_interior}"
    else:
        change = np.zeros_like(lam)
        meta["convergence_guard"] = "not applied (single grid)"

    sums = np.cumsum(lam)
    rows = []
    for k in range(1, cfg.k_max + 1):
        settled = bool(change[k - 1] < GUARD_RTOL)
        bound = bd.mixed_bly_lower(k, op, dmeta, c_e)
        margin = sums[k - 1] / bound
        row = {
            "k": k,
            "lambda_k": float(lam[k - 1]),
            "sum_lambda": float(sums[k - 1]),
            "bound": bound,
            "margin": float(margin),
            "verdict": _verdict(margin >= 1 - VERDICT_RTOL, settled),
            "grid_change": float(change[k - 1]),
        }
        if not settled:
            row["note"] = f"eigenvalue changed by {change[k - 1]:.2%} between the two finest grids"
        per_k = bd.per_eigenvalue_lower(k, op, dmeta, c_e)
        row["eigenvalue_bound"] = per_k
        row["eigenvalue_verdict"] = _verdict(lam[k - 1] >= per_k * (1 - VERDICT_RTOL), settled)
        if "weyl_ratio" in cfg.checks:
            row["weyl_ratio"] = float(lam[k - 1] / bd.weyl_asymptotic(k, dmeta))
        if cfg.b == 0 and "polya" in cfg.checks:
            # in 1-D the interval spectrum attains this bound, so the ratio is
            # reported without a verdict
            row["polya_ratio"] = float(lam[k - 1] / (cfg.a * bd.polya_bound(k, dmeta)))
        if cfg.b == 0 and "berezin" in cfg.checks and k < lam.size:
            cap = 0.5 * (lam[k - 1] + lam[k]) / cfg.a
            lhs, rhs = bd.berezin_riesz_upper(cap, 1.0, dmeta, lam / cfg.a)
            row["berezin_cap"] = float(cap)
            row["berezin_lhs"] = lhs
            row["berezin_rhs"] = rhs
            row["berezin_verdict"] = _verdict(lhs <= rhs * (1 + VERDICT_RTOL), settled and bool(change[k] < GUARD_RTOL))
        rows.append(row)

    if "proof_diag" in cfg.checks:
        xi = default_xi_grid(cfg.xi_max, min(0.05 * math.pi, 0.5 * math.pi / finest.length))
        meta["proof_diagnostics"] = proof_diagnostics(fine, finest, op, xi, k=cfg.k_max)
    return BoundReport(meta, rows)


# --- sweeps and files --------------------------------------------------------------

SWEEP_COLUMNS = ("a", "b", "s", "k_max", "grids", "k", "sum_lambda", "bound", "margin", "verdict", "error")


def _sweep_point(point, base):
    a, b, s, k_max, grid_sizes = point
    key = {"a": a, "b": b, "s": s, "k_max": k_max, "grids": ";".join(str(n) for n in grid_sizes)}
    try:
        cfg = RunConfig(a=a, b=b, s=s, k_max=k_max, grid_sizes=grid_sizes, **base)
    except MixBLYError as exc:
        return [dict(key, verdict="error", error=f"{type(exc).__name__}: {exc}")]
    report = run_verification(cfg)
    if report.error:
        return [dict(key, verdict="error", error=report.error)]
    return [
        dict(key, k=r["k"], sum_lambda=r["sum_lambda"], bound=r["bound"], margin=r["margin"],
             verdict=r["verdict"], error="")
        for r in report.rows
    ]


def sweep(spec: dict, jobs: int = 1) -> list[dict]:
    """Run :func:`run_verification` over the Cartesian product of parameter lists.

    ``spec`` holds lists under ``a``, ``b``, ``s``, ``k_max`` and ``grids``
    (each entry a list of grid sizes) plus optional scalar ``domain``,
    ``checks`` and ``c_e_source``.  Rows come back in lexicographic order of
    ``(a, b, s, k_max, grids)``.
    """
    axes = [sorted(spec.get(name, [])) for name in ("a", "b", "s", "k_max")]
    axes.append(sorted(tuple(sorted(g)) for g in spec.get("grids", [])))
    base = {key: spec[key] for key in ("domain", "checks", "c_e_source") if key in spec}
    points = list(itertools.product(*axes))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(lambda p: _sweep_point(p, base), points))
    else:
        chunks = [_sweep_point(p, base) for p in points]
    return [row for chunk in chunks for row in chunk]


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.12g}"
    return value


def write_sweep_csv(rows, target) -> None:
    """Write sweep rows to a path or an open text stream."""
    if hasattr(target, "write"):
        _write_sweep(rows, target)
        return
    with open(target, "w", newline="") as fh:
        _write_sweep(rows, fh)


def _write_sweep(rows, fh):
    writer = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS, restval="")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _fmt(v) for k, v in row.items()})


def emit_plot_data(report: BoundReport, path) -> Path:
    """Write ``k,sum_lambda,bound,margin,verdict`` rows to a CSV file."""
    if not report.rows:
        raise ContractError("report has no rows to write")
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PLOT_COLUMNS)
        for row in report.rows:
            writer.writerow([_fmt(row[c]) for c in PLOT_COLUMNS])
    return path
