"""Chain configurations: ordered robot positions in the plane.

The viewing range is normalized to 1, so a chain is *connected* when every
edge vector has length at most 1 (plus a small numeric slack).
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

# Global numeric tolerances (doubles accumulate <~1e-10 per coordinate over
# the O(n^2)-round runs used here, so these leave ample headroom).
ETA_CONN = 1e-9  # connectivity slack on edge lengths
ETA_COL = 1e-7  # collinearity: max point-to-line distance
ETA_ANG = 1e-7  # direction equality, radians
ETA_ZERO = 1e-9  # below this an edge counts as the zero vector


class ChainError(ValueError):
    """Raised for structurally invalid chains."""


class ZeroOuterEdge(ChainError):
    """An outer edge is the zero vector, so its unit direction (and hence
    any rule built on it) is undefined. Surfaced to the caller instead of
    inventing a symmetry-breaking direction."""

    def __init__(self, which: str, round_index=None):
        self.which = which
        self.round_index = round_index
        at = "" if round_index is None else f" at round {round_index}"
        super().__init__(f"outer edge {which} is a zero vector{at}")


@dataclass(frozen=True)
class Configuration:
    """Ordered positions p_1..p_n of the robots; the single source of truth.

    ``positions`` is an (n, 2) float array. Instances are immutable; the
    array is copied on construction and marked read-only.
    """

    positions: np.ndarray = field()

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise ChainError(f"positions must be (n, 2), got {pos.shape}")
        if pos.shape[0] < 2:
            raise ChainError("a chain needs at least 2 robots")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    def vectors(self) -> np.ndarray:
        """The n-1 difference vectors w_i = p_i - p_{i-1}, i = 2..n."""
        return np.diff(self.positions, axis=0)

    def edge_lengths(self) -> np.ndarray:
        return np.linalg.norm(self.vectors(), axis=1)

    @property
    def length(self) -> float:
        """Total chain length L = sum of edge lengths."""
        return float(self.edge_lengths().sum())

    @property
    def endpoint_distance(self) -> float:
        """Distance between the two outer robots."""
        return float(np.linalg.norm(self.positions[-1] - self.positions[0]))

    def is_connected(self, eta_conn: float = ETA_CONN) -> bool:
        return bool(np.all(self.edge_lengths() <= 1.0 + eta_conn))

    def require_connected(self, eta_conn: float = ETA_CONN) -> None:
        lengths = self.edge_lengths()
        worst = float(lengths.max())
        if worst > 1.0 + eta_conn:
            i = int(lengths.argmax()) + 2
            raise ChainError(f"edge w_{i} has length {worst} > 1")

    # -- CSV interchange (header i,x,y; one row per robot in chain order) --

    def to_csv(self, path_or_buf) -> None:
        buf = io.StringIO()
        buf.write("i,x,y\n")
        for i, (x, y) in enumerate(self.positions, start=1):
            buf.write(f"{i},{float(x)!r},{float(y)!r}\n")
        text = buf.getvalue()
        if hasattr(path_or_buf, "write"):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, "w") as fh:
                fh.write(text)

    @classmethod
    def from_csv(cls, path_or_buf) -> "Configuration":
        if hasattr(path_or_buf, "read"):
            text = path_or_buf.read()
        else:
            with open(path_or_buf) as fh:
                text = fh.read()
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        if not lines or lines[0].strip().lower() != "i,x,y":
            raise ChainError("configuration CSV must start with header 'i,x,y'")
        rows = []
        for ln in lines[1:]:
            i, x, y = ln.split(",")
            rows.append((int(i), float(x), float(y)))
        rows.sort(key=lambda r: r[0])
        if [r[0] for r in rows] != list(range(1, len(rows) + 1)):
            raise ChainError("robot indices must be 1..n")
        return cls(np.array([(x, y) for _, x, y in rows]))


def chain_vectors(config: Configuration) -> np.ndarray:
    """The vector chain w_2..w_n derived from a configuration."""
    return config.vectors()


def reconstruct(w: np.ndarray, anchor=(0.0, 0.0)) -> Configuration:
    """Rebuild a configuration from difference vectors and an anchor p_1."""
    w = np.asarray(w, dtype=float)
    pos = np.vstack([np.zeros((1, 2)), np.cumsum(w, axis=0)]) + np.asarray(anchor, dtype=float)
    return Configuration(pos)
