"""Marker-based alignment: least-squares fit of a linearized similarity
transform (scale/rotation/translation) taking target marker positions onto
source marker positions.

The transform acts as  x' = s*x + h*y + tx,  y' = -h*x + s*y + ty.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class AlignmentError(ValueError):
    pass


@dataclass(frozen=True)
class AffineTransform:
    s: float = 1.0
    h: float = 0.0
    tx: float = 0.0
    ty: float = 0.0

    def __post_init__(self):
        if self.s * self.s + self.h * self.h <= 0:
            raise AlignmentError("degenerate transform")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.s, self.h], [-self.h, self.s]])

    def apply_points(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return pts @ self.matrix.T + np.array([self.tx, self.ty])

    def compose(self, inner: "AffineTransform") -> "AffineTransform":
        """self o inner: apply `inner` first, then `self`."""
        m = self.matrix @ inner.matrix
        t = self.matrix @ np.array([inner.tx, inner.ty]) + np.array([self.tx, self.ty])
        return AffineTransform(s=float(m[0, 0]), h=float(m[0, 1]),
                               tx=float(t[0]), ty=float(t[1]))


IDENTITY = AffineTransform()


def fit_alignment(target_pts: np.ndarray, source_pts: np.ndarray) -> AffineTransform:
    """Least-squares (s, h, tx, ty) minimizing sum ||R * target_i - source_i||^2,
    solved with the Moore-Penrose pseudoinverse of the stacked 2x4 marker rows."""
    target_pts = np.asarray(target_pts, dtype=float)
    source_pts = np.asarray(source_pts, dtype=float)
    m = len(target_pts)
    if m < 2:
        raise AlignmentError("need at least 2 markers")
    a = np.zeros((2 * m, 4))
    b = np.zeros(2 * m)
    for i, ((txp, typ), (sxp, syp)) in enumerate(zip(target_pts, source_pts)):
        a[2 * i] = (txp, typ, 1.0, 0.0)
        a[2 * i + 1] = (typ, -txp, 0.0, 1.0)
        b[2 * i] = sxp
        b[2 * i + 1] = syp
    if np.linalg.matrix_rank(a) < 4:
        raise AlignmentError("rank-deficient marker configuration")
    s, h, tx, ty = np.linalg.pinv(a) @ b
    return AffineTransform(s=float(s), h=float(h), tx=float(tx), ty=float(ty))


def apply_transform(t: AffineTransform, g):
    from .graph import Graph  # local import avoids a cycle at module load

    assert isinstance(g, Graph)
    return g.with_positions(t.apply_points(g.positions))


def invert_transform(t: AffineTransform) -> AffineTransform:
    det = t.s * t.s + t.h * t.h
    if det <= 0:
        raise AlignmentError("degenerate transform")
    s = t.s / det
    h = -t.h / det
    # solve for translation so that inv(t)(t(p)) == p
    tx = -(s * t.tx + h * t.ty)
    ty = -(-h * t.tx + s * t.ty)
    return AffineTransform(s=s, h=h, tx=tx, ty=ty)


def alignment_residual(t: AffineTransform, target_pts: np.ndarray,
                       source_pts: np.ndarray) -> float:
    mapped = t.apply_points(np.asarray(target_pts, dtype=float))
    return float(np.sum((mapped - np.asarray(source_pts, dtype=float)) ** 2))
