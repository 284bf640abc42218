"""Latency matrix generators and file ingestion.

Three generator families: integer-uniform latencies from {1..10}, Gaussian
latencies (mean 5 ms, std 1 ms by default), and a site-composite model where
inter-node latency is the site-to-site latency plus two per-node terms.
Gaussian draws are floored at 0.1 ms so latencies stay strictly positive.

Matrix file format (CSV): first line is ``n``, then n rows of n
comma-separated values in ms.  The loader rejects asymmetry beyond 1e-9,
nonzero diagonals, and non-numeric cells, naming the offending row/column.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graphs import SYMMETRY_TOL, LatencyMatrix
from .rng import make_rng

__all__ = [
    "MatrixFormatError",
    "SiteModel",
    "gen_uniform",
    "gen_gaussian",
    "gen_site_composite",
    "load_matrix",
    "save_matrix",
]

MIN_LATENCY_MS = 0.1  # truncation floor for Gaussian draws


class MatrixFormatError(ValueError):
    """Raised when a matrix or site-model file violates the format contract."""


def _symmetrize_from_upper(upper_values: np.ndarray, n: int) -> LatencyMatrix:
    """Build a matrix from the strict upper triangle, mirrored below."""
    m = np.zeros((n, n))
    iu = np.triu_indices(n, k=1)
    m[iu] = upper_values
    m += m.T
    return LatencyMatrix(m)


def gen_uniform(n: int, seed: int) -> LatencyMatrix:
    """Latencies drawn i.i.d. uniform from the integer set {1..10}."""
    if n < 2:
        raise ValueError(f"gen_uniform needs n >= 2, got {n}")
    rng = make_rng(seed)
    draws = rng.integers(1, 11, size=n * (n - 1) // 2).astype(np.float64)
    return _symmetrize_from_upper(draws, n)


def gen_gaussian(
    n: int, seed: int, mean: float = 5.0, std: float = 1.0
) -> LatencyMatrix:
    """Latencies drawn i.i.d. Normal(mean, std^2), floored at 0.1 ms."""
    if n < 2:
        raise ValueError(f"gen_gaussian needs n >= 2, got {n}")
    if mean <= 0:
        raise ValueError(f"mean must be positive, got {mean}")
    if std <= 0:
        raise ValueError(f"std must be positive, got {std}")
    rng = make_rng(seed)
    draws = rng.normal(mean, std, size=n * (n - 1) // 2)
    return _symmetrize_from_upper(np.maximum(draws, MIN_LATENCY_MS), n)


@dataclass
class SiteModel:
    """Multi-site composition: latency(u,v) = site(u,v) + local(u) + local(v).

    ``site_matrix`` is the symmetric site-to-site latency with zero diagonal,
    so same-site pairs pay only their two per-node terms.  Per-node terms are
    Normal(intra_mean, intra_std^2), floored at 0.1 ms.
    """

    site_matrix: np.ndarray
    nodes_per_site: list[int]
    intra_mean: float = 5.0
    intra_std: float = 1.0

    def __post_init__(self):
        sm = np.asarray(self.site_matrix, dtype=np.float64)
        if sm.ndim != 2 or sm.shape[0] != sm.shape[1]:
            raise ValueError(f"site matrix must be square, got {sm.shape}")
        if np.abs(sm - sm.T).max() > SYMMETRY_TOL:
            raise ValueError("site matrix must be symmetric")
        if np.abs(np.diagonal(sm)).max() > 0:
            raise ValueError("site matrix diagonal must be zero")
        if len(self.nodes_per_site) != sm.shape[0]:
            raise ValueError(
                f"{len(self.nodes_per_site)} site sizes for {sm.shape[0]} sites"
            )
        if any(c < 1 for c in self.nodes_per_site):
            raise ValueError("every site needs at least one node")
        self.site_matrix = sm

    @property
    def total_nodes(self) -> int:
        return sum(self.nodes_per_site)

    def node_sites(self) -> np.ndarray:
        """Per-node site index, sites laid out consecutively."""
        return np.repeat(np.arange(len(self.nodes_per_site)), self.nodes_per_site)

    @classmethod
    def from_json(cls, path: str | Path) -> "SiteModel":
        try:
            raw = json.loads(Path(path).read_text())
        except json.JSONDecodeError as e:
            raise MatrixFormatError(f"{path}: invalid JSON: {e}") from e
        try:
            return cls(
                site_matrix=np.asarray(raw["site_matrix"], dtype=np.float64),
                nodes_per_site=[int(c) for c in raw["nodes_per_site"]],
                intra_mean=float(raw.get("intra_mean", 5.0)),
                intra_std=float(raw.get("intra_std", 1.0)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise MatrixFormatError(f"{path}: bad site model: {e}") from e

    def to_json(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(
                {
                    "site_matrix": self.site_matrix.tolist(),
                    "nodes_per_site": list(self.nodes_per_site),
                    "intra_mean": self.intra_mean,
                    "intra_std": self.intra_std,
                },
                indent=2,
            )
        )


def gen_site_composite(model: SiteModel, seed: int) -> LatencyMatrix:
    """Compose site-to-site and per-node latencies into a full matrix."""
    n = model.total_nodes
    if n < 2:
        raise ValueError(f"site model needs >= 2 total nodes, got {n}")
    rng = make_rng(seed)
    local = np.maximum(
        rng.normal(model.intra_mean, model.intra_std, size=n), MIN_LATENCY_MS
    )
    sites = model.node_sites()
    m = model.site_matrix[np.ix_(sites, sites)] + local[:, None] + local[None, :]
    np.fill_diagonal(m, 0.0)
    return LatencyMatrix(m)


def save_matrix(matrix: LatencyMatrix, path: str | Path) -> None:
    """Write the CSV format; 17 significant digits so load round-trips bitwise."""
    with open(path, "w") as f:
        f.write(f"{matrix.n}\n")
        for row in matrix.values:
            f.write(",".join("%.17g" % x for x in row) + "\n")


def load_matrix(path: str | Path) -> LatencyMatrix:
    """Parse and validate a latency matrix file."""
    path = Path(path)
    lines = [ln.strip() for ln in path.read_text().splitlines() if ln.strip()]
    if not lines:
        raise MatrixFormatError(f"{path}: empty file")
    try:
        n = int(lines[0])
    except ValueError:
        raise MatrixFormatError(f"{path}: first line must be the node count n")
    if n < 2:
        raise MatrixFormatError(f"{path}: n must be >= 2, got {n}")
    if len(lines) - 1 != n:
        raise MatrixFormatError(f"{path}: expected {n} rows, found {len(lines) - 1}")
    values = np.zeros((n, n))
    for i, line in enumerate(lines[1:]):
        cells = line.split(",")
        if len(cells) != n:
            raise MatrixFormatError(f"{path}: row {i} has {len(cells)} cells, expected {n}")
        for j, cell in enumerate(cells):
            try:
                values[i, j] = float(cell)
            except ValueError:
                raise MatrixFormatError(f"{path}: non-numeric cell at ({i},{j}): {cell!r}")
    for i in range(n):
        if values[i, i] != 0.0:
            raise MatrixFormatError(f"{path}: nonzero diagonal at ({i},{i}): {values[i, i]!r}")
    asym = np.abs(values - values.T)
    if asym.max() > SYMMETRY_TOL:
        u, v = np.unravel_index(np.argmax(asym), asym.shape)
        raise MatrixFormatError(
            f"{path}: asymmetric at ({u},{v}): {values[u, v]!r} vs {values[v, u]!r}"
        )
    off = values[~np.eye(n, dtype=bool)]
    if off.min() <= 0:
        u, v = np.unravel_index(
            np.argmin(np.where(np.eye(n, dtype=bool), np.inf, values)), values.shape
        )
        raise MatrixFormatError(f"{path}: non-positive latency at ({u},{v})")
    return LatencyMatrix(values)
