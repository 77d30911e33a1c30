"""Config-driven experiment runner emitting CSV/JSON artifacts plus a manifest.

Experiment kinds: spectrum, table1, decay, smoothness, homogenize,
eps-converge.  Configs are JSON files (key-value with nested sections); see
the repository README for the schema and ``scripts/configs`` for examples.
Outputs are deterministic: fixed quadrature and direct solvers only, and CSV
numbers are written in shortest round-trip decimal form, so identical configs
produce byte-identical CSV files.  Every emitted file is listed in
``manifest.json`` with its SHA-256 content hash.

Sweeps (table1 rows, smoothness modes, eps sweep points) fan out to a bounded
thread pool; the pool size is capped by the THERMOWAVE_THREADS environment
variable.  Each output file is written once, by the coordinating thread.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import assembly, coefficients, dynamics, epsilon, homogenization, spectra

EXPERIMENT_KINDS = ("spectrum", "table1", "decay", "smoothness", "homogenize", "eps-converge")
THREADS_ENV = "THERMOWAVE_THREADS"


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


def pool_size() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    if n < 1:
        raise ConfigError(f"{THREADS_ENV} must be >= 1, got {n}")
    return n


@dataclass
class ExperimentConfig:
    kind: str
    params: dict = field(default_factory=dict)
    out_dir: str | None = None

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        try:
            raw = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not raw.strip():
            raise ConfigError(f"config file {path} is empty")
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        kind = data.pop("kind", None)
        if kind not in EXPERIMENT_KINDS:
            raise ConfigError(f"unknown experiment kind {kind!r}; expected one of {EXPERIMENT_KINDS}")
        out_dir = data.pop("out", None)
        return cls(kind=kind, params=data, out_dir=out_dir)


# ---------------------------------------------------------------------------
# deterministic writers
# ---------------------------------------------------------------------------

def format_number(x) -> str:
    """Shortest round-trip decimal form (ints plain, floats via repr)."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


class ArtifactWriter:
    """Writes files under one directory and records them for the manifest."""

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.files: list[dict] = []

    def _register(self, path: Path):
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        self.files.append({"name": path.name, "sha256": digest})

    def csv(self, name: str, header, rows):
        path = self.out_dir / name
        lines = [",".join(header)]
        lines += [",".join(format_number(x) for x in row) for row in rows]
        path.write_text("\n".join(lines) + "\n", newline="\n")
        self._register(path)
        return path

    def json(self, name: str, obj):
        path = self.out_dir / name
        path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", newline="\n")
        self._register(path)
        return path

    def manifest(self, kind: str, params: dict) -> dict:
        data = {
            "kind": kind,
            "params": params,
            "files": sorted(self.files, key=lambda f: f["name"]),
        }
        path = self.out_dir / "manifest.json"
        path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", newline="\n")
        return data


def _gamma_tag(g: float) -> str:
    return f"{g:g}"


def _require(params: dict, key: str):
    if key not in params:
        raise ConfigError(f"missing required parameter {key!r}")
    return params[key]


def _fit_summary(fit: dynamics.DecayFit) -> dict:
    return {
        "law": fit.law,
        "window": list(fit.window),
        "r_squared": fit.r_squared,
        "rate": fit.rate,
        "exponent": fit.exponent,
        "prefactor": fit.prefactor,
        "exp_rate": fit.exp_rate,
        "exp_r_squared": fit.exp_r_squared,
        "poly_exponent": fit.poly_exponent,
        "poly_r_squared": fit.poly_r_squared,
    }


# ---------------------------------------------------------------------------
# experiment kinds
# ---------------------------------------------------------------------------

def _run_spectrum(params: dict, w: ArtifactWriter):
    system = int(_require(params, "system"))
    n = int(_require(params, "n"))
    gamma = float(_require(params, "gamma"))
    tol = float(params.get("tol", 1e-9))
    literal = bool(params.get("paper_literal_blocks", False))
    dyn = assembly.assemble_dynamic(coefficients.ModelParameters(system, gamma, n), literal)
    rep = spectra.compute_spectrum(dyn, tol)
    name = f"spectrum_{system}_{n}_{_gamma_tag(gamma)}.csv"
    w.csv(name, ("re", "im", "residual"),
          [(lam.real, lam.imag, r) for lam, r in zip(rep.eigenvalues, rep.residuals)])
    if params.get("export_matrix", False):
        w.csv(assembly.matrix_csv_name(dyn),
              tuple(f"c{k}" for k in range(dyn.size)),
              [tuple(row) for row in dyn.matrix])


def _run_table1(params: dict, w: ArtifactWriter):
    system = int(_require(params, "system"))
    gamma = float(_require(params, "gamma"))
    n_list = [int(n) for n in _require(params, "n_list")]
    tol = float(params.get("tol", 1e-9))
    literal = bool(params.get("paper_literal_blocks", False))

    def one(n):
        return spectra.min_distance_table(system, gamma, [n], tol, literal)[0]

    with ThreadPoolExecutor(max_workers=pool_size()) as pool:
        rows = list(pool.map(one, n_list))
    w.csv(f"table1_{system}_{_gamma_tag(gamma)}.csv",
          ("n", "min_neg_re", "abscissa", "asymptote"),
          [(r.n, r.min_neg_re, r.abscissa, r.asymptote) for r in rows])


def _initial_state(desc, n: int) -> tuple[dynamics.StateVector, str]:
    if desc is None:
        desc = {"type": "mode", "j": 1}
    kind = desc.get("type", "mode")
    j = int(desc.get("j", 1))
    if kind == "mode":
        return dynamics.mode_velocity_state(n, j), f"mode{j}"
    if kind == "broadband":
        return dynamics.broadband_velocity_state(n, j), f"broadband{j}"
    raise ConfigError(f"unknown initial-state type {kind!r}")


def _run_decay(params: dict, w: ArtifactWriter):
    system = int(_require(params, "system"))
    n = int(_require(params, "n"))
    gamma = float(_require(params, "gamma"))
    dt = float(params.get("dt", 0.1))
    T = float(params.get("T", 100.0))
    literal = bool(params.get("paper_literal_blocks", False))
    z0, label = _initial_state(params.get("initial"), n)
    window = params.get("window")
    dyn = assembly.assemble_dynamic(coefficients.ModelParameters(system, gamma, n), literal)
    trace = dynamics.evolve(dyn, z0, dt, T, initial_label=label)
    fit = dynamics.classify_decay(trace, tuple(window) if window else None)
    stem = f"energy_{system}_{n}_{_gamma_tag(gamma)}_{label}"
    w.csv(stem + ".csv", ("t", "E"), list(zip(trace.times, trace.energies)))
    w.json(stem + "_fit.json", _fit_summary(fit))


def _run_smoothness(params: dict, w: ArtifactWriter):
    system = int(_require(params, "system"))
    gamma = float(_require(params, "gamma"))
    n = int(params.get("n", 100))
    j_list = [int(j) for j in params.get("j_list", (1, 2, 3))]
    dt = float(params.get("dt", 0.1))
    T = float(params.get("T", 100.0))
    window = params.get("window")
    win = tuple(window) if window else None

    def one(j):
        res = dynamics.smoothness_experiment(system, n, gamma, [j], dt, T, win)
        return res[j]

    with ThreadPoolExecutor(max_workers=pool_size()) as pool:
        results = dict(zip(j_list, pool.map(one, j_list)))
    fits = {}
    for j in j_list:
        trace, fit = results[j]
        w.csv(f"energy_{system}_{n}_{_gamma_tag(gamma)}_mode{j}.csv",
              ("t", "E"), list(zip(trace.times, trace.energies)))
        fits[f"j={j}"] = _fit_summary(fit)
    w.json(f"smoothness_{system}_{_gamma_tag(gamma)}.json", fits)


def _coeffs_from_params(params: dict) -> coefficients.ThermoCoefficients:
    raw = _require(params, "coefficients")
    missing = [k for k in ("a", "b", "c", "d", "gamma") if k not in raw]
    if missing:
        raise ConfigError(f"coefficients section is missing {missing}")
    try:
        return coefficients.ThermoCoefficients(
            a=coefficients.field_from_descriptor(raw["a"]),
            b=coefficients.field_from_descriptor(raw["b"]),
            c=coefficients.field_from_descriptor(raw["c"]),
            d=coefficients.field_from_descriptor(raw["d"]),
            gamma=coefficients.field_from_descriptor(raw["gamma"]),
        )
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad coefficient descriptor: {exc}") from exc


def _run_homogenize(params: dict, w: ArtifactWriter):
    name = params.get("name", "case")
    grid = int(params.get("cell_grid", homogenization.DEFAULT_CELL_GRID))
    coeffs = _coeffs_from_params(params)
    hm = homogenization.homogenize(coeffs, grid)
    as_json = lambda t: list(t) if isinstance(t, tuple) else t
    w.json(f"homogenized_{name}.json", {
        "mean_c": hm.mean_c,
        "mean_d": hm.mean_d,
        "mean_gamma": hm.mean_gamma,
        "a_hom": as_json(hm.a_hom),
        "b_hom": as_json(hm.b_hom),
        "cell_grid_size": hm.cell_grid_size,
    })
    corr_m = hm.displacement_correctors[0]
    corr_n = hm.temperature_correctors[0]
    w.csv(f"corrector_{name}.csv", ("y", "M", "N"),
          list(zip(corr_m.grid, corr_m.values, corr_n.values)))


_F_CATALOG = {
    "zero": lambda x: np.zeros_like(x),
    "sine": lambda x: np.sin(np.pi * x),
    "sine2": lambda x: np.sin(2.0 * np.pi * x),
    "parabola": lambda x: x * (1.0 - x),
}


def _run_eps_converge(params: dict, w: ArtifactWriter):
    case = params.get("name", "case")
    coeffs = _coeffs_from_params(params)
    lam = float(params.get("lambda", 1.0))
    eps_list = [float(e) for e in _require(params, "epsilon_list")]
    cells = params.get("cells")
    fnames = params.get("forcing", ("sine", "parabola", "sine2"))
    try:
        F = tuple(_F_CATALOG[k] for k in fnames)
    except KeyError as exc:
        raise ConfigError(f"unknown forcing component {exc}; options: {sorted(_F_CATALOG)}")
    with ThreadPoolExecutor(max_workers=pool_size()) as pool:
        report = epsilon.resolvent_sweep(
            coeffs, eps_list, lam, F,
            cells=int(cells) if cells else None,
            map_jobs=pool.map,
        )
    w.csv(f"eps_convergence_{case}.csv",
          ("epsilon", "err_u", "err_theta", "flux_gap", "ratio_apriori"),
          list(zip(report.epsilons, report.err_u, report.err_theta,
                   report.flux_gap, report.apriori_ratio)))
    w.json(f"eps_orders_{case}.json",
           {"order_u": report.order_u, "order_theta": report.order_theta})


_RUNNERS = {
    "spectrum": _run_spectrum,
    "table1": _run_table1,
    "decay": _run_decay,
    "smoothness": _run_smoothness,
    "homogenize": _run_homogenize,
    "eps-converge": _run_eps_converge,
}


def run(config: ExperimentConfig, out_dir=None) -> dict:
    """Execute one experiment; returns the manifest (also written to disk)."""
    if config.kind not in _RUNNERS:
        raise ConfigError(f"unknown experiment kind {config.kind!r}")
    target = out_dir or config.out_dir or "results"
    writer = ArtifactWriter(target)
    try:
        _RUNNERS[config.kind](config.params, writer)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid parameters for kind {config.kind!r}: {exc}") from exc
    return writer.manifest(config.kind, config.params)
