"""Built-in interaction-graph targets and custom targets from file.

Every constructor returns a TargetGraph whose coupling matrix is symmetric,
zero on the diagonal and scaled so the largest |entry| is 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .coupling import CouplingMatrix


class TargetValidationError(ValueError):
    """Custom target file failed validation."""


@dataclass(frozen=True)
class TargetGraph:
    name: str
    coupling: CouplingMatrix
    metadata: dict = field(default_factory=dict)

    @property
    def n_ions(self) -> int:
        return self.coupling.n_ions

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "coupling": self.coupling.to_json_dict(),
            "metadata": self.metadata,
        }


def _normalized_graph(name: str, values: np.ndarray, metadata: dict) -> TargetGraph:
    matrix = CouplingMatrix(values=values).max_normalized()
    if np.abs(matrix.values).max() == 0.0:
        raise TargetValidationError(f"target '{name}' has no nonzero coupling")
    return TargetGraph(name=name, coupling=matrix, metadata=metadata)


def cross_polytope(n_qubits: int) -> TargetGraph:
    """Nearest-neighbor graph of qubits on a (hyper)sphere.

    All pairs couple with unit weight except the chain-mirror pairs
    (i, N+1-i), which are disconnected.  N=4 is the square plaquette, N=6
    the octahedron, N=8 the 16-cell.
    """
    if n_qubits < 4 or n_qubits % 2 != 0:
        raise ValueError(f"cross polytope needs an even qubit count >= 4, got {n_qubits}")
    j = np.ones((n_qubits, n_qubits)) - np.eye(n_qubits)
    for i in range(n_qubits):
        j[i, n_qubits - 1 - i] = 0.0
    return _normalized_graph(
        f"cross_polytope_{n_qubits}",
        j,
        {"dimension": n_qubits // 2, "n_qubits": n_qubits},
    )


def leaves_only_tree(n_qubits: int, s: float) -> TargetGraph:
    """Tree-like couplings at index distances that are powers of two.

    J_ij = 2**(l * s) when |i - j| = 2**l (l = 0, 1, 2, ...), zero at every
    other distance.  Negative s decays with distance, positive s grows.
    """
    if n_qubits < 2:
        raise ValueError(f"need at least 2 qubits, got {n_qubits}")
    j = np.zeros((n_qubits, n_qubits))
    for i in range(n_qubits):
        for k in range(i + 1, n_qubits):
            d = k - i
            if d & (d - 1) == 0:  # power of two
                l = d.bit_length() - 1
                j[i, k] = j[k, i] = 2.0 ** (l * s)
    return _normalized_graph(
        f"leaves_only_tree_{n_qubits}",
        j,
        {"s": s, "n_qubits": n_qubits},
    )


def cayley_tree_c36() -> TargetGraph:
    """Six-qubit Cayley tree with a 3-regular interior, equal edge weights.

    The two internal vertices sit on the middle ions (3, 4) and the leaves
    on ions 1, 2, 5, 6, attached crosswise (ion 3 to 1 and 5, ion 4 to 2
    and 6) so the graph is symmetric under chain reversal.  Of the
    center-on-middle assignments this is the one the axial mode patterns
    can actually reach with high fidelity.
    """
    edges = [(3, 4), (1, 3), (3, 5), (2, 4), (4, 6)]
    j = np.zeros((6, 6))
    for a, b in edges:
        j[a - 1, b - 1] = j[b - 1, a - 1] = 1.0
    return _normalized_graph("cayley_tree_c36", j, {"n_qubits": 6, "edges": edges})


def triangular_torus(rows: int = 3, cols: int = 3) -> TargetGraph:
    """Equal-weight triangular lattice with periodic boundaries, row-major.

    Site (r, c) couples to the offsets (0, +-1), (+-1, 0), (+1, +1) and
    (-1, -1), all modulo the lattice size.
    """
    if rows < 3 or cols < 3:
        raise ValueError("torus needs at least 3 rows and 3 columns")
    n = rows * cols
    offsets = [(0, 1), (0, -1), (1, 0), (-1, 0), (1, 1), (-1, -1)]
    j = np.zeros((n, n))
    for r in range(rows):
        for c in range(cols):
            a = r * cols + c
            for dr, dc in offsets:
                b = ((r + dr) % rows) * cols + (c + dc) % cols
                if a != b:
                    j[a, b] = 1.0
    j = np.maximum(j, j.T)
    return _normalized_graph(
        f"triangular_torus_{rows}x{cols}",
        j,
        {"rows": rows, "cols": cols, "n_qubits": n},
    )


def custom_target(path) -> TargetGraph:
    """Load a target from a CSV matrix or an edge-list file.

    Files ending in ``.csv`` are parsed as an N x N matrix (comment lines
    starting with ``#`` allowed); anything else is parsed as an edge list
    with one ``i j weight`` triple per line, 1-based indices.
    """
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv":
        values = _parse_matrix(text, path)
    else:
        values = _parse_edge_list(text, path)
    _validate_matrix(values, path)
    return _normalized_graph(
        f"custom_{path.stem}", values, {"source": str(path), "n_qubits": len(values)}
    )


def _parse_matrix(text: str, path: Path) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            rows.append([float(tok) for tok in stripped.split(",")])
        except ValueError as exc:
            raise TargetValidationError(f"{path}:{lineno}: {exc}") from exc
    if not rows:
        raise TargetValidationError(f"{path}: empty matrix")
    n = len(rows)
    for lineno_like, row in enumerate(rows, start=1):
        if len(row) != n:
            raise TargetValidationError(
                f"{path}: row {lineno_like} has {len(row)} columns, expected {n}"
            )
    return np.array(rows)


def _parse_edge_list(text: str, path: Path) -> np.ndarray:
    edges = []
    max_index = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        if len(parts) != 3:
            raise TargetValidationError(
                f"{path}:{lineno}: expected 'i j weight', got {stripped!r}"
            )
        try:
            i, j_idx, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError as exc:
            raise TargetValidationError(f"{path}:{lineno}: {exc}") from exc
        if i < 1 or j_idx < 1:
            raise TargetValidationError(f"{path}:{lineno}: indices are 1-based")
        if i == j_idx:
            raise TargetValidationError(f"{path}:{lineno}: self-coupling not allowed")
        edges.append((i, j_idx, w))
        max_index = max(max_index, i, j_idx)
    if not edges:
        raise TargetValidationError(f"{path}: no edges found")
    values = np.zeros((max_index, max_index))
    for i, j_idx, w in edges:
        values[i - 1, j_idx - 1] = w
        values[j_idx - 1, i - 1] = w
    return values


def _validate_matrix(values: np.ndarray, path: Path) -> None:
    n = values.shape[0]
    for i in range(n):
        if values[i, i] != 0.0:
            raise TargetValidationError(f"{path}: nonzero diagonal at ({i + 1},{i + 1})")
        for j_idx in range(i + 1, n):
            if values[i, j_idx] != values[j_idx, i]:
                raise TargetValidationError(
                    f"{path}: asymmetric at ({i + 1},{j_idx + 1}): "
                    f"{values[i, j_idx]} vs {values[j_idx, i]}"
                )
    if np.abs(values).max() == 0.0:
        raise TargetValidationError(f"{path}: target has no nonzero coupling")


BUILTIN_TARGETS = {
    "cross_polytope": cross_polytope,
    "leaves_only_tree": leaves_only_tree,
    "cayley_tree_c36": cayley_tree_c36,
    "triangular_torus": triangular_torus,
}
