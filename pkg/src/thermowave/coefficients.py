"""Y-periodic coefficient fields and model parameter sets.

Scalar fields live on the unit cell Y = (0, 1) and extend 1-periodically to
the whole line.  Two representations are supported: a small catalog of closed
forms (constant, affine-sine ``p + q sin(2 pi y)``, affine-cos
``p + q cos(2 pi y)``) and piecewise-constant tables over a uniform partition
of Y with left-closed cells.  A diagonal 2x2 laminate wraps two scalar fields
that both vary in the first cell coordinate only.

Every field carries an ellipticity constant ``alpha``; validation checks the
two-sided bound ``alpha <= value <= 1/alpha`` (or ``0 < value < 1`` for
coupling coefficients) on a dense sampling grid, plus 1-periodicity.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

CLOSED_FORM_KINDS = ("constant", "affine-sine", "affine-cos")
PIECEWISE_KIND = "piecewise"

#: catalog entries printed by ``thermowave --list-catalog``
CATALOG = {
    "constant": "constant(value): y -> value",
    "affine-sine": "affine-sine(p, q): y -> p + q*sin(2*pi*y)",
    "affine-cos": "affine-cos(p, q): y -> p + q*cos(2*pi*y)",
    "piecewise": "piecewise(values): table over a uniform partition of (0,1), left-closed cells",
}


def _frac(y: np.ndarray) -> np.ndarray:
    # y - floor(y) in [0, 1); deterministic at breakpoints (left-closed cells)
    return y - np.floor(y)


@dataclass(frozen=True)
class CoefficientField:
    """A Y-periodic scalar coefficient.

    Parameters
    ----------
    kind
        One of ``constant``, ``affine-sine``, ``affine-cos``, ``piecewise``.
    params
        ``(value,)`` for constant, ``(p, q)`` for the affine forms.
    table
        Cell values for the piecewise kind, uniform partition of (0, 1).
    alpha
        Declared ellipticity constant for the bound ``alpha <= f <= 1/alpha``.
        ``0.0`` marks a field with no valid declared bound (validation fails).
    """

    kind: str
    params: tuple = ()
    table: tuple = ()
    alpha: float = 0.0

    tensor_rank = "scalar"

    def __post_init__(self):
        if self.kind in CLOSED_FORM_KINDS:
            want = 1 if self.kind == "constant" else 2
            if len(self.params) != want:
                raise ValueError(f"{self.kind} takes {want} parameter(s), got {len(self.params)}")
        elif self.kind == PIECEWISE_KIND:
            if len(self.table) < 1:
                raise ValueError("piecewise field needs at least one cell value")
        else:
            raise ValueError(f"unknown coefficient kind {self.kind!r}")

    def sample(self, y):
        """Periodic extension value at y (scalar or array)."""
        y = np.asarray(y, dtype=float)
        fr = _frac(y)
        if self.kind == "constant":
            return np.broadcast_to(np.float64(self.params[0]), y.shape).copy() if y.shape else float(self.params[0])
        if self.kind == "affine-sine":
            p, q = self.params
            return p + q * np.sin(2.0 * np.pi * fr)
        if self.kind == "affine-cos":
            p, q = self.params
            return p + q * np.cos(2.0 * np.pi * fr)
        vals = np.asarray(self.table, dtype=float)
        nc = len(vals)
        idx = np.minimum((fr * nc).astype(int), nc - 1)
        out = vals[idx]
        return float(out) if np.isscalar(y) or y.shape == () else out

    __call__ = sample

    def value_range(self) -> tuple[float, float]:
        """Exact (min, max) over one period."""
        if self.kind == "constant":
            v = float(self.params[0])
            return v, v
        if self.kind in ("affine-sine", "affine-cos"):
            p, q = self.params
            return p - abs(q), p + abs(q)
        vals = self.table
        return float(min(vals)), float(max(vals))

    def exact_mean(self) -> float | None:
        """Closed-form cell mean where one exists, else None."""
        if self.kind == "constant":
            return float(self.params[0])
        if self.kind in ("affine-sine", "affine-cos"):
            return float(self.params[0])
        if self.kind == PIECEWISE_KIND:
            return float(np.mean(self.table))
        return None

    def reciprocal_antiderivative(self, y):
        """P(y) = integral_0^y 1/f, exact for constant and piecewise kinds.

        Used for exact harmonic cell averages in the oscillating-coefficient
        assembly; returns None for kinds without a closed form.
        """
        y = np.asarray(y, dtype=float)
        if self.kind == "constant":
            return y / float(self.params[0])
        if self.kind != PIECEWISE_KIND:
            return None
        vals = np.asarray(self.table, dtype=float)
        nc = len(vals)
        w = 1.0 / nc
        cell_int = w / vals
        cum = np.concatenate([[0.0], np.cumsum(cell_int)])  # P at cell breakpoints
        per_period = cum[-1]
        fr = _frac(y)
        k = np.minimum((fr * nc).astype(int), nc - 1)
        return np.floor(y) * per_period + cum[k] + (fr - k * w) / vals[k]


@dataclass(frozen=True)
class DiagonalField:
    """Diagonal 2x2 laminate diag(a1(y1), a2(y1)); both entries vary in y1 only."""

    a1: CoefficientField
    a2: CoefficientField

    tensor_rank = "diagonal"

    @property
    def alpha(self) -> float:
        return min(self.a1.alpha, self.a2.alpha)

    def sample(self, y1):
        """Diagonal pair (a1(y1), a2(y1))."""
        return self.a1.sample(y1), self.a2.sample(y1)

    __call__ = sample


def sample_field(field, y):
    """Evaluate a scalar field (real) or laminate (diagonal pair) at y."""
    return field.sample(y)


# ---------------------------------------------------------------------------
# catalog constructors
# ---------------------------------------------------------------------------

def _auto_alpha(lo: float, hi: float) -> float:
    if lo <= 0.0:
        return 0.0
    return min(lo, 1.0 / hi)


def constant(value: float, alpha: float | None = None) -> CoefficientField:
    a = _auto_alpha(value, value) if alpha is None else alpha
    return CoefficientField("constant", (float(value),), alpha=a)


def affine_sine(p: float, q: float, alpha: float | None = None) -> CoefficientField:
    a = _auto_alpha(p - abs(q), p + abs(q)) if alpha is None else alpha
    return CoefficientField("affine-sine", (float(p), float(q)), alpha=a)


def affine_cos(p: float, q: float, alpha: float | None = None) -> CoefficientField:
    a = _auto_alpha(p - abs(q), p + abs(q)) if alpha is None else alpha
    return CoefficientField("affine-cos", (float(p), float(q)), alpha=a)


def piecewise(values, alpha: float | None = None) -> CoefficientField:
    values = tuple(float(v) for v in values)
    a = _auto_alpha(min(values), max(values)) if alpha is None else alpha
    return CoefficientField(PIECEWISE_KIND, table=values, alpha=a)


def laminate(a1: CoefficientField, a2: CoefficientField) -> DiagonalField:
    return DiagonalField(a1, a2)


def field_from_descriptor(desc: dict) -> CoefficientField | DiagonalField:
    """Build a field from a config descriptor, e.g. {"kind": "affine-cos", "p": 2, "q": 1}."""
    if not isinstance(desc, dict) or "kind" not in desc:
        raise ValueError(f"coefficient descriptor must be a dict with a 'kind': {desc!r}")
    kind = desc["kind"]
    alpha = desc.get("alpha")
    if kind == "constant":
        return constant(desc["value"], alpha)
    if kind == "affine-sine":
        return affine_sine(desc["p"], desc["q"], alpha)
    if kind == "affine-cos":
        return affine_cos(desc["p"], desc["q"], alpha)
    if kind == PIECEWISE_KIND:
        return piecewise(desc["values"], alpha)
    if kind == "laminate":
        return laminate(field_from_descriptor(desc["a1"]), field_from_descriptor(desc["a2"]))
    raise ValueError(f"unknown coefficient kind {kind!r}")


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

PERIODICITY_TOL = 1e-14
VALIDATION_GRID = 4096  # dense sampling grid, >= 2^12 points


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    violations: tuple = ()

    def __bool__(self) -> bool:
        return self.passed


def _check_scalar(f: CoefficientField, role: str, grid: int) -> list[str]:
    y = np.arange(grid) / grid
    v = f.sample(y)
    bad = []
    per = np.abs(f.sample(y + 1.0) - v)
    if per.max() > PERIODICITY_TOL:
        i = int(per.argmax())
        bad.append(f"periodicity violated: |f(y+1)-f(y)|={per[i]:.3e} at y={y[i]:.6f}")
    if role == "coupling":
        if v.min() <= 0.0 or v.max() >= 1.0:
            i = int(v.argmin() if v.min() <= 0.0 else v.argmax())
            bad.append(f"0<gamma<1 violated: value {v[i]:.6g} at y={y[i]:.6f}")
    else:
        a = f.alpha
        if not (a > 0.0):
            bad.append(f"declared ellipticity constant alpha={a!r} is not positive")
        else:
            if v.min() < a:
                i = int(v.argmin())
                bad.append(f"lower bound violated: value {v[i]:.6g} < alpha={a:.6g} at y={y[i]:.6f}")
            if v.max() > 1.0 / a:
                i = int(v.argmax())
                bad.append(f"upper bound violated: value {v[i]:.6g} > 1/alpha={1.0/a:.6g} at y={y[i]:.6f}")
    return bad


def validate_field(f, role: str = "elliptic", grid: int = VALIDATION_GRID) -> ValidationReport:
    """Check periodicity and bounds on a dense grid; violations are values, not errors.

    role: "elliptic" checks alpha <= f <= 1/alpha, "coupling" checks 0 < f < 1.
    For a diagonal laminate, both diagonal entries are checked (for diagonal
    tensors the quadratic-form bounds reduce entrywise).
    """
    if grid < 2:
        raise ValueError("validation grid must have at least 2 points")
    if isinstance(f, DiagonalField):
        bad = [f"[a1] {m}" for m in _check_scalar(f.a1, role, grid)]
        bad += [f"[a2] {m}" for m in _check_scalar(f.a2, role, grid)]
    else:
        bad = _check_scalar(f, role, grid)
    return ValidationReport(passed=not bad, violations=tuple(bad))


@dataclass(frozen=True)
class ThermoCoefficients:
    """The five coefficient fields of the oscillating thermoelastic model."""

    a: CoefficientField | DiagonalField
    b: CoefficientField | DiagonalField
    c: CoefficientField
    d: CoefficientField
    gamma: CoefficientField

    def validate(self, grid: int = VALIDATION_GRID,
                 allow_zero_coupling: bool = False) -> ValidationReport:
        """Joint report; ``allow_zero_coupling`` admits the identically-zero
        coupling used by uncoupled control experiments."""
        bad = []
        for name, f, role in (
            ("a", self.a, "elliptic"),
            ("b", self.b, "elliptic"),
            ("c", self.c, "elliptic"),
            ("d", self.d, "elliptic"),
            ("gamma", self.gamma, "coupling"),
        ):
            rep = validate_field(f, role, grid)
            if name == "gamma" and not rep and allow_zero_coupling:
                lo, hi = self.gamma.value_range()
                if lo == hi == 0.0:
                    continue
            bad += [f"{name}: {m}" for m in rep.violations]
        return ValidationReport(passed=not bad, violations=tuple(bad))


@dataclass(frozen=True)
class ModelParameters:
    """Parameters of the two spectrally discretized systems.

    system_id 1 is the strongly coupled (gradient-coupled) system, 2 the
    weakly coupled one.  The modal basis lives on (0, pi) with Dirichlet ends.
    gamma = 0 is admitted as the uncoupled control case.
    """

    system_id: int
    gamma: float
    n_modes: int

    def __post_init__(self):
        if self.system_id not in (1, 2):
            raise ValueError(f"system_id must be 1 or 2, got {self.system_id}")
        if not (0.0 <= self.gamma < 1.0):
            raise ValueError(f"coupling gamma must lie in [0, 1), got {self.gamma}")
        if self.n_modes < 1:
            raise ValueError(f"n_modes must be >= 1, got {self.n_modes}")
