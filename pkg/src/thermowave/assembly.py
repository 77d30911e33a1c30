"""Assembly of the semi-discrete thermoelastic dynamics.

The modal dynamics act on stacked coordinates z = (u, v, theta), each block of
length n, with the block layout

    [ 0      D      0    ]
    [ -D     0     -g F  ]
    [ 0    g F^T   -D^2  ]

where D = diag(1..n), F is the identity for the weakly coupled system and the
odd-distance coupling matrix for the strongly coupled one, and g is the
coupling constant.  With the F^T in block (3, 2) the quadratic form satisfies
z^T A z = -theta^T D^2 theta exactly, so the flow is a contraction.  The
widely printed variant with +g F in block (3, 2) breaks that identity for the
antisymmetric F of system 1 (its spectral abscissa is positive); it can be
reproduced with ``paper_literal_blocks=True`` for comparison.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coefficients import ModelParameters

BLOCK_ORDER = ("u", "v", "theta")


def mode_diagonal(n: int) -> np.ndarray:
    """Diagonal frequency matrix diag(1, 2, ..., n)."""
    if n < 1:
        raise ValueError(f"mode count must be >= 1, got {n}")
    return np.diag(np.arange(1.0, n + 1.0))


def coupling_matrix(system_id: int, n: int) -> np.ndarray:
    """Modal coupling matrix F of the chosen system.

    System 2 couples velocity and temperature pointwise per mode (identity).
    System 1 couples modes at odd index distance:

        F[i, j] = -(4/pi) * i*j / (i^2 - j^2)   for |i - j| odd, else 0

    (1-based indices).  This F is antisymmetric.
    """
    if n < 1:
        raise ValueError(f"mode count must be >= 1, got {n}")
    if system_id == 2:
        return np.eye(n)
    if system_id != 1:
        raise ValueError(f"unknown system_id {system_id!r}")
    i = np.arange(1.0, n + 1.0)[:, None]
    j = np.arange(1.0, n + 1.0)[None, :]
    odd = ((i - j).astype(int) % 2) != 0
    F = np.zeros((n, n))
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = -(4.0 / np.pi) * (i * j) / (i * i - j * j)
    F[odd] = vals[odd]
    return F


@dataclass(frozen=True)
class DiscreteDynamic:
    """Dense 3n x 3n modal dynamic with its metadata; matrix is read-only."""

    matrix: np.ndarray
    system_id: int
    n: int
    gamma: float
    paper_literal_blocks: bool = False

    def __post_init__(self):
        self.matrix.setflags(write=False)

    @property
    def size(self) -> int:
        return 3 * self.n

    def blocks(self) -> dict[str, np.ndarray]:
        """The nine n x n blocks keyed by coordinate pair, e.g. ('u','v')."""
        n = self.n
        sl = {"u": slice(0, n), "v": slice(n, 2 * n), "theta": slice(2 * n, 3 * n)}
        return {(r, c): self.matrix[sl[r], sl[c]] for r in BLOCK_ORDER for c in BLOCK_ORDER}


def assemble_dynamic(params: ModelParameters, paper_literal_blocks: bool = False) -> DiscreteDynamic:
    """Assemble the semi-discrete dynamic for the given parameters."""
    n, g = params.n_modes, params.gamma
    D = mode_diagonal(n)
    F = coupling_matrix(params.system_id, n)
    A = np.zeros((3 * n, 3 * n))
    A[0:n, n:2 * n] = D
    A[n:2 * n, 0:n] = -D
    A[n:2 * n, 2 * n:] = -g * F
    A[2 * n:, n:2 * n] = g * (F if paper_literal_blocks else F.T)
    A[2 * n:, 2 * n:] = -D @ D
    return DiscreteDynamic(A, params.system_id, n, g, paper_literal_blocks)


def matrix_csv_name(dyn: DiscreteDynamic) -> str:
    """Export filename, pattern A_<i>_<n>_<gamma>.csv."""
    return f"A_{dyn.system_id}_{dyn.n}_{dyn.gamma:g}.csv"
