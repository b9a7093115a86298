"""Second and fourth chaotic components of nodal length and vortex count.

Fourth-chaos constituents are integrals over ``D`` of Hermite products of
the field and its normalized gradient ``d~ B = grad B / sqrt(2 pi^2 E)``.
They are evaluated by the midpoint rule on grid cells whose centers lie in
``D``.
"""
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidArgumentError
from ..geometry.domains import Domain, boundary_quadrature
from ..geometry.lattice import Grid
from .hermite import hermite_table

# Hermite degrees on (B, d~1 B, d~2 B)
LENGTH_TERMS = {
    "a1": (4, 0, 0), "a2": (0, 4, 0), "a3": (0, 0, 4),
    "a4": (0, 2, 2), "a5": (2, 2, 0), "a6": (2, 0, 2),
}
LENGTH_WEIGHTS = {"a1": 8.0, "a2": -1.0, "a3": -1.0, "a4": -2.0, "a5": -8.0, "a6": -8.0}

# Hermite degrees on (B, d~1 B, d~2 B, B_hat, d~1 B_hat, d~2 B_hat)
CROSS_TERMS = {
    "b1": (2, 0, 0, 2, 0, 0), "b2": (2, 0, 0, 0, 2, 0), "b3": (2, 0, 0, 0, 0, 2),
    "b4": (0, 2, 0, 2, 0, 0), "b5": (0, 0, 2, 2, 0, 0), "b6": (0, 2, 0, 0, 2, 0),
    "b7": (0, 0, 2, 0, 0, 2), "b8": (0, 2, 0, 0, 0, 2), "b9": (0, 0, 2, 0, 2, 0),
    "b10": (0, 1, 1, 0, 1, 1),
}
CROSS_WEIGHTS = {"b1": 2.0, "b2": -1.0, "b3": -1.0, "b4": -1.0, "b5": -1.0,
                 "b6": -0.25, "b7": -0.25, "b8": 1.25, "b9": 1.25, "b10": -3.0}


def length_prefactor(E):
    return np.sqrt(2.0 * np.pi ** 2 * E) / 128.0


def count_prefactors(E):
    """Prefactors of the single-field part ``a_E`` and the cross part ``b_E``."""
    return np.pi * E / 64.0, np.pi * E / 8.0


@dataclass
class ChaosComponent:
    """A chaotic component together with the integrals it is assembled from.

    ``value == sum(prefactors[g] * weights[name] * constituents[name])``
    where ``g`` is the group a constituent belongs to.
    """

    order: int
    value: float
    constituents: dict
    weights: dict = field(default_factory=dict)
    groups: dict = field(default_factory=dict)
    prefactors: dict = field(default_factory=dict)

    def reconstruct(self):
        return float(sum(self.prefactors[self.groups[n]] * self.weights[n] * v
                         for n, v in self.constituents.items()))

    def part(self, group):
        return float(sum(self.prefactors[group] * self.weights[n] * v
                         for n, v in self.constituents.items() if self.groups[n] == group))


def normalized_gradient(grad, E):
    return np.asarray(grad, dtype=float) / np.sqrt(2.0 * np.pi ** 2 * E)


def _products(variables, terms):
    degs = max(max(d) for d in terms.values())
    tables = [hermite_table(degs, v) for v in variables]
    out = {}
    for name, d in terms.items():
        prod = None
        for i, di in enumerate(d):
            if di:
                prod = tables[i][di] if prod is None else prod * tables[i][di]
        out[name] = prod
    return out


def length_integrands(B, G):
    """Integrands of ``a1..a6`` from the field and its normalized gradient."""
    return _products([B, G[0], G[1]], LENGTH_TERMS)


def count_integrands(B, G, Bh, Gh):
    """Integrands of ``a1..a6`` for both fields (``ah*`` for the copy) and ``b1..b10``."""
    out = length_integrands(B, G)
    for n, v in length_integrands(Bh, Gh).items():
        out["ah" + n[1:]] = v
    out.update(_products([B, G[0], G[1], Bh, Gh[0], Gh[1]], CROSS_TERMS))
    return out


def length_component(integrals, E) -> ChaosComponent:
    c = {n: float(integrals[n]) for n in LENGTH_TERMS}
    pre = {"a": length_prefactor(E)}
    groups = {n: "a" for n in c}
    comp = ChaosComponent(4, 0.0, c, dict(LENGTH_WEIGHTS), groups, pre)
    comp.value = comp.reconstruct()
    return comp


def count_component(integrals, E) -> ChaosComponent:
    pa, pb = count_prefactors(E)
    c, w, g = {}, {}, {}
    for n in LENGTH_TERMS:
        c[n], w[n], g[n] = float(integrals[n]), LENGTH_WEIGHTS[n], "a"
        h = "ah" + n[1:]
        c[h], w[h], g[h] = float(integrals[h]), LENGTH_WEIGHTS[n], "ahat"
    for n in CROSS_TERMS:
        c[n], w[n], g[n] = float(integrals[n]), CROSS_WEIGHTS[n], "b"
    comp = ChaosComponent(4, 0.0, c, w, g, {"a": pa, "ahat": pa, "b": pb})
    comp.value = comp.reconstruct()
    return comp


def cell_weights(grid: Grid, D: Domain):
    """Midpoint-rule weights on the cell-center grid: cell area inside ``D``, else 0."""
    centers = grid.centers()
    inside = D.contains(centers.nodes())
    return centers, inside * grid.spacing ** 2


def _fields_on(realization, grid):
    vals, grads = realization.eval_grid(grid, gradient=True)
    return vals, normalized_gradient(grads, realization.E)


def _field_blocks(realization, grid, rows):
    if hasattr(realization, "iter_grid"):
        for r0, r1, v, g in realization.iter_grid(grid, gradient=True, rows=rows):
            yield r0, r1, v, normalized_gradient(g, realization.E)
        return
    v, g = _fields_on(realization, grid)
    for r0 in range(0, grid.nx, rows):
        yield r0, min(r0 + rows, grid.nx), v[r0:r0 + rows], g[:, r0:r0 + rows]


def integrate_integrands(realization, centers: Grid, weights, rows=64):
    """Weighted sums of every fourth-chaos integrand over ``centers``.

    ``realization`` is real (length integrands) or complex (count
    integrands).  ``weights`` is a list of arrays of shape ``centers.shape``;
    one dict of integrals is returned per array.  Integrands are formed in
    blocks of ``rows`` grid rows to bound memory.
    """
    if hasattr(realization, "imag"):
        blocks = zip(_field_blocks(realization.real, centers, rows),
                     _field_blocks(realization.imag, centers, rows))
    else:
        blocks = ((b, None) for b in _field_blocks(realization, centers, rows))
    out = [{} for _ in weights]
    for first, second in blocks:
        r0, r1, B, G = first
        if second is None:
            integ = length_integrands(B, G)
        else:
            integ = count_integrands(B, G, second[2], second[3])
        for acc, w in zip(out, weights):
            wb = w[r0:r1]
            for n, v in integ.items():
                acc[n] = acc.get(n, 0.0) + float(np.vdot(v, wb))
    return out


def fourth_chaos_length(realization, D: Domain, grid: Grid) -> ChaosComponent:
    """Fourth chaotic component of the nodal length of ``realization`` in ``D``.

    ``grid`` is the node grid used for nodal extraction; integrals use its
    cell centers.  Raises ResolutionError when the spacing is too coarse.
    """
    grid.check_resolution(realization.E)
    centers, w = cell_weights(grid, D)
    return length_component(integrate_integrands(realization, centers, [w])[0], realization.E)


def fourth_chaos_count(realization, D: Domain, grid: Grid) -> ChaosComponent:
    """Fourth chaotic component of the vortex count; ``realization`` is complex."""
    E = realization.real.E
    grid.check_resolution(E)
    centers, w = cell_weights(grid, D)
    return count_component(integrate_integrands(realization, centers, [w])[0], E)


def second_chaos_length(realization, D: Domain, step=None) -> float:
    """``(8 pi sqrt(2E))^{-1}`` times the boundary integral of ``B <grad B, n>``.

    The boundary is sampled at arclength ``step`` (default ``1/(16 sqrt(E))``).
    """
    E = realization.E
    if step is None:
        step = 1.0 / (16.0 * np.sqrt(E))
    if step > 1.0 / (16.0 * np.sqrt(E)) * (1 + 1e-12):
        raise InvalidArgumentError("boundary step must not exceed 1/(16 sqrt(E))")
    pts, nrm, wts = boundary_quadrature(D, step)
    B = np.asarray(realization.value(pts))
    dB = np.asarray(realization.gradient(pts))
    flux = (dB * nrm).sum(-1)
    return float((wts * B * flux).sum() / (8.0 * np.pi * np.sqrt(2.0 * E)))
