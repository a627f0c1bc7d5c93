"""Divergence of the ratio potential v = Psi_K / Psi_0 near a nodal line of Psi_0.

Grids are rebuilt from callables at every refinement level; the strip integral
uses cell-centre values (averages of the four corners), so no sample sits
exactly on the node.
"""
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import trapezoid

from ..errors import CoincidentNodesError

EXTENT = 6.0
BASE_POINTS = 121


@dataclass(eq=False)
class GridWavefunction:
    """Real wavefunction on a uniform square grid, normalized by the trapezoid rule."""

    values: np.ndarray = field(repr=False)
    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)

    def __post_init__(self):
        if np.iscomplexobj(self.values):
            if np.max(np.abs(self.values.imag), initial=0.0) > 0:
                raise ValueError("grid wavefunctions must be real")
            self.values = self.values.real
        self.values = self.values / np.sqrt(self.norm2())

    @property
    def h(self) -> float:
        return float(self.x[1] - self.x[0])

    def norm2(self) -> float:
        return float(trapezoid(trapezoid(self.values ** 2, self.y, axis=1), self.x))

    @classmethod
    def from_function(cls, f: Callable, n: int = BASE_POINTS, extent: float = EXTENT) -> "GridWavefunction":
        x = np.linspace(-extent, extent, n)
        xx, yy = np.meshgrid(x, x, indexing="ij")
        return cls(np.asarray(f(xx, yy), dtype=float), x, x.copy())

    def cell_centres(self) -> np.ndarray:
        v = self.values
        return 0.25 * (v[:-1, :-1] + v[1:, :-1] + v[:-1, 1:] + v[1:, 1:])


def gaussian_p(axis: str) -> Callable:
    """r_axis exp(-r^2/2) on the plane."""
    if axis == "x":
        return lambda x, y: x * np.exp(-(x ** 2 + y ** 2) / 2)
    return lambda x, y: y * np.exp(-(x ** 2 + y ** 2) / 2)


@dataclass
class DivergenceTable:
    h: list
    integrals: list
    ratios: list

    def diverges(self, factor: float = 1.5) -> bool:
        return len(self.ratios) >= 4 and all(r >= factor for r in self.ratios) \
            and all(np.diff(self.integrals) > 0)

    def converges(self, rtol: float = 1e-2) -> bool:
        """Successive changes shrink and the last one is below ``rtol`` relative."""
        d = np.abs(np.diff(self.integrals))
        floor = 1e-12 * abs(self.integrals[-1])  # round-off level
        shrinking = all((d[1:] <= d[:-1]) | (d[1:] <= floor))
        return bool(shrinking and d[-1] <= rtol * abs(self.integrals[-1]))


def strip_integral(psi0: GridWavefunction, psik: GridWavefunction, centre: float = 0.0,
                   half_width: float = 0.5, y_window=(0.5, 2.5)) -> float:
    """int_S |psi_K / psi_0|^2 over the strip |x - centre| < half_width within y_window."""
    xc = 0.5 * (psi0.x[:-1] + psi0.x[1:])
    yc = 0.5 * (psi0.y[:-1] + psi0.y[1:])
    sx = np.abs(xc - centre) < half_width
    sy = (yc > y_window[0]) & (yc < y_window[1])
    v0 = psi0.cell_centres()[np.ix_(sx, sy)]
    vk = psik.cell_centres()[np.ix_(sx, sy)]
    return float(np.sum((vk / v0) ** 2) * psi0.h ** 2)


def _check_nodes(psi0: GridWavefunction, psik: GridWavefunction, centre, half_width, y_window):
    """Raise if psi_K vanishes where psi_0 does inside the strip (and is not psi_0 itself)."""
    sx = np.abs(psi0.x - centre) <= half_width
    sy = (psi0.y >= y_window[0]) & (psi0.y <= y_window[1])
    v0 = psi0.values[np.ix_(sx, sy)]
    vk = psik.values[np.ix_(sx, sy)]
    scale0 = np.max(np.abs(psi0.values))
    nodes = np.abs(v0) <= 1e-12 * scale0
    # sign changes between neighbouring columns also mark a node
    crossing = np.zeros_like(nodes)
    crossing[:-1] |= v0[:-1] * v0[1:] < 0
    nodes |= crossing
    if not nodes.any():
        return
    if np.allclose(psik.values, psi0.values, atol=1e-12) or np.allclose(psik.values, -psi0.values, atol=1e-12):
        return
    if np.min(np.abs(vk[nodes])) <= 1e-8 * np.max(np.abs(psik.values)):
        raise CoincidentNodesError("Psi_K vanishes on the nodal set of Psi_0 inside the strip")


def nodal_potential_divergence(psi0: Callable, psik: Callable, refinements: int = 4,
                               base_points: int = BASE_POINTS, extent: float = EXTENT,
                               centre: float = 0.0, half_width: float = 0.5,
                               y_window=(0.5, 2.5)) -> DivergenceTable:
    """Strip integral of |v_K|^2 on grids refined by 2x, ``refinements`` times."""
    hs, vals = [], []
    for level in range(refinements + 1):
        n = (base_points - 1) * 2 ** level + 1
        g0 = GridWavefunction.from_function(psi0, n, extent)
        gk = GridWavefunction.from_function(psik, n, extent)
        if level == 0:
            _check_nodes(g0, gk, centre, half_width, y_window)
        hs.append(g0.h)
        vals.append(strip_integral(g0, gk, centre, half_width, y_window))
    ratios = [b / a for a, b in zip(vals[:-1], vals[1:])]
    return DivergenceTable(hs, vals, ratios)


@dataclass
class NodalDemo:
    divergent: DivergenceTable
    control_same: DivergenceTable
    control_far: DivergenceTable


def nodal_demo(refinements: int = 4) -> NodalDemo:
    """Psi_0 ~ x e^{-r^2/2}, Psi_K ~ y e^{-r^2/2}, with the two convergent controls."""
    px, py = gaussian_p("x"), gaussian_p("y")
    return NodalDemo(
        nodal_potential_divergence(px, py, refinements),
        nodal_potential_divergence(px, px, refinements),
        nodal_potential_divergence(px, py, refinements, centre=2.5),
    )
