"""Monte Carlo experiments over shared realizations of the random wave.

Every replicate draws its own seed from ``SeedSequence([seed, i, e])``
(replicate ``i``, energy index ``e``), so results do not depend on the
order or the number of workers.  Records are merged in replicate order.
"""
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from ..asymptotics import predictions
from ..chaos.functionals import (
    LENGTH_WEIGHTS, count_component, integrate_integrands, length_component,
    length_integrands, length_prefactor, normalized_gradient, second_chaos_length,
)
from ..errors import ConfigError, InvalidArgumentError
from ..geometry.domains import area, union_bbox
from ..geometry.lattice import grid_covering
from ..geometry.nodal import clipped_lengths, nodal_segments
from ..geometry.vortex import locate_vortices
from ..sampler import sample_complex, sample_wave
from ..specfun import wavenumber
from .config import ExperimentConfig, canonical_json, config_from_dict
from .stats import SummaryStats, correlation_from_cov, weighted_line_fit

SHEET_PAIR_KEY = 0x5EE7


class Record(NamedTuple):
    replicate: int
    seed: int
    E: float
    domain_id: int
    stat: str
    value: float


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list
    summary: dict = field(default_factory=dict)

    def values(self, stat, E=None):
        """Array of shape ``(replicates, ids)`` for one statistic (and energy)."""
        rows = [r for r in self.records if r.stat == stat and (E is None or r.E == E)]
        if not rows:
            raise InvalidArgumentError(f"no records for {stat!r}")
        reps = sorted({r.replicate for r in rows})
        ids = sorted({r.domain_id for r in rows})
        ri = {v: k for k, v in enumerate(reps)}
        di = {v: k for k, v in enumerate(ids)}
        out = np.full((len(reps), len(ids)), np.nan)
        for r in rows:
            out[ri[r.replicate], di[r.domain_id]] = r.value
        return out

    @property
    def stats(self):
        return [SummaryStats.from_dict(d) for d in self.summary.get("stats", [])]


def replicate_seed(seed, i, e_index=0):
    """64-bit seed of replicate ``i`` at energy index ``e_index``."""
    ss = np.random.SeedSequence([int(seed), int(i), int(e_index)])
    return int(ss.generate_state(1, np.uint64)[0])


# -- per-worker caches ---------------------------------------------------------

@lru_cache(maxsize=8)
def _config(text):
    return config_from_dict(json.loads(text))


@lru_cache(maxsize=32)
def _layout(text, E):
    """Node grid, center grid and per-domain midpoint weights (cached per worker)."""
    cfg = _config(text)
    doms = [cfg.sheet_domain()] if cfg.experiment == "sheet" else cfg.domain_objects
    grid = grid_covering(union_bbox(doms), E, cfg.grid_factor)
    grid.check_resolution(E)
    centers = grid.centers()
    pts = centers.nodes()
    weights = [D.contains(pts) * grid.spacing ** 2 for D in doms]
    return grid, centers, weights


def _center_fields(real, centers):
    v, g = real.eval_grid(centers, gradient=True)
    return v, normalized_gradient(g, real.E)


# -- replicate kernels (each returns (stat, domain_id, value) triples) ---------

def _rep_length(cfg, text, E, seed):
    grid, centers, weights = _layout(text, E)
    real = sample_wave(cfg.wave_spec(E, seed))
    segs = nodal_segments(real.eval_grid(grid), grid, real.eval_grid(centers))
    out = [("length", d, float(clipped_lengths(segs, D).sum()))
           for d, D in enumerate(cfg.domain_objects)]
    if cfg.chaos:
        for d, sums in enumerate(integrate_integrands(real, centers, weights)):
            out.append(("L4", d, length_component(sums, E).value))
    return out


def _rep_count(cfg, text, E, seed):
    grid, centers, weights = _layout(text, E)
    cr = sample_complex(cfg.wave_spec(E, seed))
    U = cr.real.eval_grid(grid)
    V = cr.imag.eval_grid(grid)
    loc, _, _ = locate_vortices(U, V, grid)
    out = []
    for d, D in enumerate(cfg.domain_objects):
        n = int(np.count_nonzero(D.contains(loc))) if len(loc) else 0
        out.append(("count", d, float(n)))
    if cfg.chaos:
        for d, sums in enumerate(integrate_integrands(cr, centers, weights)):
            out.append(("N4", d, count_component(sums, E).value))
    return out


def _rep_chaos(cfg, text, E, seed):
    _, centers, weights = _layout(text, E)
    cr = sample_complex(cfg.wave_spec(E, seed))
    out = []
    all_sums = integrate_integrands(cr, centers, weights)
    for d, (D, sums) in enumerate(zip(cfg.domain_objects, all_sums)):
        L4 = length_component(sums, E)
        N4 = count_component(sums, E)
        out += [("L4", d, L4.value), ("N4", d, N4.value), ("N4_a", d, N4.part("a")),
                ("N4_ahat", d, N4.part("ahat")), ("N4_b", d, N4.part("b")),
                ("L2", d, second_chaos_length(cr.real, D))]
    return out


def _sheet_cells(cfg, grid):
    m = grid.nx - 1
    n = cfg.sheet_lattice
    if m % n:
        raise ConfigError(f"sheet_lattice {n} does not divide the {m} grid cells per unit")
    return m, n


def sheet_lattice_points(cfg):
    n = cfg.sheet_lattice
    a = np.arange(1, n + 1) / n
    T1, T2 = np.meshgrid(a, a, indexing="ij")
    return np.c_[T1.ravel(), T2.ravel()]


def sheet_pairs(cfg, m):
    """Fixed random pairs ``(t, s)`` of lattice-aligned points for increment moments.

    Returned as integer cell counts in ``1..m``, shape ``(pairs, 2, 2)``.
    """
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, SHEET_PAIR_KEY]))
    idx = rng.integers(1, m + 1, size=(cfg.kolmogorov_pairs, 2, 2))
    same = np.all(idx[:, 0] == idx[:, 1], axis=1)
    idx[same, 1, 0] = np.where(idx[same, 0, 0] > 1, idx[same, 0, 0] - 1, 2)
    return idx


def _rep_sheet(cfg, text, E, seed):
    grid, centers, _ = _layout(text, E)
    m, n = _sheet_cells(cfg, grid)
    real = sample_wave(cfg.wave_spec(E, seed))
    B, G = _center_fields(real, centers)
    integ = length_integrands(B, G)
    dens = sum(LENGTH_WEIGHTS[k] * v for k, v in integ.items())
    dens *= length_prefactor(E) * grid.spacing ** 2
    S = np.zeros((m + 1, m + 1))
    S[1:, 1:] = dens.cumsum(0).cumsum(1)
    scale = np.sqrt(512 * np.pi / np.log(E))
    out = []
    step = m // n
    for a in range(n):
        for b in range(n):
            out.append(("X", a * n + b, float(scale * S[(a + 1) * step, (b + 1) * step])))
    for p, (t, s) in enumerate(sheet_pairs(cfg, m)):
        out.append(("dX", p, float(scale * (S[t[0], t[1]] - S[s[0], s[1]]))))
    return out


def _rep_superposition(cfg, text, E, seed):
    grid, centers, _ = _layout(text, E)
    out = []
    models = [(f"length[J={J}]", J, "berry-phase") for J in cfg.J_values]
    models.append(("length[gaussian]", None, "gaussian-spectral"))
    for j, (name, J, model) in enumerate(models):
        rng = np.random.default_rng(np.random.SeedSequence([seed, j]))
        spec = cfg.wave_spec(E, seed, J=J, model=model)
        real = sample_wave(spec, rng)
        segs = nodal_segments(real.eval_grid(grid), grid, real.eval_grid(centers))
        for d, D in enumerate(cfg.domain_objects):
            out.append((name, d, float(clipped_lengths(segs, D).sum())))
    return out


_KERNELS = {
    "clt": _rep_length,
    "vortex": _rep_count,
    "chaos": _rep_chaos,
    "sheet": _rep_sheet,
    "superposition": _rep_superposition,
}


def _kernel(cfg):
    if cfg.experiment == "variance-scaling":
        return _rep_length if cfg.stat == "length" else _rep_count
    if cfg.experiment not in _KERNELS:
        raise ConfigError(f"experiment {cfg.experiment!r} has no Monte Carlo runner")
    return _KERNELS[cfg.experiment]


def _work(task):
    text, E, e_index, i = task
    cfg = _config(text)
    seed = replicate_seed(cfg.seed, i, e_index)
    rows = _kernel(cfg)(cfg, text, E, seed)
    return [Record(i, seed, E, d, stat, v) for stat, d, v in rows]


def simulate(cfg: ExperimentConfig):
    """Run all replicates of ``cfg`` and return records in deterministic order."""
    text = canonical_json(cfg.to_dict())
    for E in cfg.energies:
        _layout(text, E)  # surface resolution/config errors before forking
    tasks = [(text, E, e, i) for e, E in enumerate(cfg.energies) for i in range(cfg.replicates)]
    if cfg.jobs == 1 or len(tasks) == 1:
        chunks = [_work(t) for t in tasks]
    else:
        jobs = min(cfg.jobs, len(tasks))
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            chunks = list(ex.map(_work, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    return [r for chunk in chunks for r in chunk]


def _coerce(config, experiment=None):
    if isinstance(config, dict):
        config = config_from_dict(config)
    if experiment is not None and config.experiment != experiment:
        config = replace(config, experiment=experiment)
    return config


# -- summaries -----------------------------------------------------------------

def _summary_clt(res):
    cfg = res.config
    doms = cfg.domain_objects
    out = {"stats": [], "C": None, "dominance": {}}
    for E in cfg.energies:
        pred = predictions(E, doms)
        out["C"] = pred["C"].tolist()
        L = res.values("length", E)
        out["stats"].append(SummaryStats.from_values("length", E, L, pred["mean_length"],
                                                     pred["var_length"]).to_dict())
        if cfg.chaos:
            L4 = res.values("L4", E)
            out["stats"].append(SummaryStats.from_values("L4", E, L4, 0.0,
                                                         pred["var_length"]).to_dict())
            out["dominance"][repr(E)] = [float(np.corrcoef(L[:, d], L4[:, d])[0, 1])
                                         for d in range(L.shape[1])]
    return out


def _summary_vortex(res):
    cfg = res.config
    doms = cfg.domain_objects
    out = {"stats": [], "C": None}
    for E in cfg.energies:
        pred = predictions(E, doms)
        out["C"] = pred["C"].tolist()
        out["stats"].append(SummaryStats.from_values("count", E, res.values("count", E),
                                                     pred["mean_count"], pred["var_count"]).to_dict())
        if cfg.chaos:
            out["stats"].append(SummaryStats.from_values("N4", E, res.values("N4", E), 0.0,
                                                         pred["var_count"]).to_dict())
    return out


def _summary_chaos(res):
    cfg = res.config
    doms = cfg.domain_objects
    out = {"stats": [], "part_corr": {}}
    for E in cfg.energies:
        pred = predictions(E, doms)
        for stat, key in (("L4", "var_length"), ("N4", "var_count")):
            out["stats"].append(SummaryStats.from_values(stat, E, res.values(stat, E), 0.0,
                                                         pred[key]).to_dict())
        out["stats"].append(SummaryStats.from_values("L2", E, res.values("L2", E)).to_dict())
        parts = [res.values(p, E) for p in ("N4_a", "N4_ahat", "N4_b")]
        out["part_corr"][repr(E)] = [
            correlation_from_cov(np.cov(np.c_[parts[0][:, d], parts[1][:, d], parts[2][:, d]],
                                        rowvar=False)).tolist()
            for d in range(len(doms))]
    return out


def _summary_sheet(res):
    cfg = res.config
    E = cfg.energies[0]
    t = sheet_lattice_points(cfg)
    pred_cov = np.minimum.outer(t[:, 0], t[:, 0]) * np.minimum.outer(t[:, 1], t[:, 1])
    X = res.values("X", E)
    st = SummaryStats.from_values("X", E, X, 0.0, np.diag(pred_cov))
    cov = np.asarray(st.cov)
    grid, _, _ = _layout(canonical_json(cfg.to_dict()), E)
    m, _ = _sheet_cells(cfg, grid)
    pairs = sheet_pairs(cfg, m) / m
    dX = res.values("dX", E)
    tt, ss = pairs[:, 0], pairs[:, 1]
    dist = np.hypot(*(tt - ss).T)
    inter = np.minimum(tt, ss).prod(1)
    sym = tt.prod(1) + ss.prod(1) - 2 * inter  # variance of the Wiener-sheet increment
    m6 = (dX ** 6).mean(0)
    ratio = m6 / dist ** 3
    return {
        "stats": [st.to_dict()],
        "lattice": t.tolist(),
        "predicted_cov": pred_cov.tolist(),
        "max_abs_cov_error": float(np.abs(cov - pred_cov).max()),
        "pairs": pairs.tolist(),
        "sixth_moment": m6.tolist(),
        "increment_ratio": ratio.tolist(),
        "increment_ratio_spread": float(ratio.max() / ratio.min()),
        "gaussian_sixth_ratio": (m6 / (15 * sym ** 3)).tolist(),
    }


def _summary_superposition(res):
    cfg = res.config
    doms = cfg.domain_objects
    areas = np.array([area(D) for D in doms])
    out = {"stats": [], "drift": {}}
    for E in cfg.energies:
        k = wavenumber(E)
        center = areas * k / np.sqrt(8)
        scale2 = areas * np.log(k) / (256 * np.pi)
        C = predictions(E, doms)["C"]
        ref = res.values("length[gaussian]", E)
        ref_st = SummaryStats.from_values("length[gaussian]", E, ref, center, scale2)
        out["stats"].append(ref_st.to_dict())
        drift = []
        for J in cfg.J_values:
            name = f"length[J={J}]"
            x = res.values(name, E)
            st = SummaryStats.from_values(name, E, x, center, scale2)
            out["stats"].append(st.to_dict())
            se = np.sqrt(np.asarray(st.var) / st.n + np.asarray(ref_st.var) / ref_st.n)
            drift.append({
                "J": J,
                "mean_z": ((np.asarray(st.mean) - ref_st.mean) / se).tolist(),
                "corr_error": float(np.abs(np.asarray(st.corr) - C).max()),
                "corr_vs_gaussian": float(np.abs(np.asarray(st.corr) - np.asarray(ref_st.corr)).max()),
            })
        out["drift"][repr(E)] = drift
    return out


def _summary_variance_scaling(res):
    cfg = res.config
    doms = cfg.domain_objects
    areas = np.array([area(D) for D in doms])
    stat = cfg.stat
    rows = []
    for E in cfg.energies:
        x = res.values(stat, E)
        if stat == "count":
            x = x / E
        rows.append(SummaryStats.from_values(stat, E, x))
    logE = np.log(cfg.energies)
    fits = []
    for d in range(len(doms)):
        var = [r.var[d] for r in rows]
        se = [r.se_var[d] for r in rows]
        fit = weighted_line_fit(logE, var, se)
        pred = areas[d] / (512 * np.pi) if stat == "length" else 11 * areas[d] / (32 * np.pi)
        fit.update(predicted_slope=float(pred), ratio=fit["slope"] / pred)
        fits.append(fit)
    return {"stats": [r.to_dict() for r in rows], "fits": fits, "log_E": logE.tolist()}


_SUMMARIES = {
    "clt": _summary_clt,
    "vortex": _summary_vortex,
    "chaos": _summary_chaos,
    "sheet": _summary_sheet,
    "superposition": _summary_superposition,
    "variance-scaling": _summary_variance_scaling,
}


def run(config) -> ExperimentResult:
    """Run the experiment named in ``config`` and summarize it."""
    cfg = _coerce(config)
    if cfg.experiment not in _SUMMARIES:
        raise ConfigError(f"experiment {cfg.experiment!r} has no Monte Carlo runner")
    res = ExperimentResult(cfg, simulate(cfg))
    res.summary = {"experiment": cfg.experiment, **_SUMMARIES[cfg.experiment](res)}
    return res


def run_clt(config) -> ExperimentResult:
    """Nodal lengths on all domains from one shared realization per replicate."""
    return run(_coerce(config, "clt"))


def run_vortex(config) -> ExperimentResult:
    """Phase-singularity counts of the complex wave on all domains."""
    return run(_coerce(config, "vortex"))


def run_chaos(config) -> ExperimentResult:
    """Second and fourth chaotic components on each domain."""
    return run(_coerce(config, "chaos"))


def run_sheet(config) -> ExperimentResult:
    """Rectangle-indexed fourth-chaos field on the unit square lattice."""
    return run(_coerce(config, "sheet"))


def run_superposition(config) -> ExperimentResult:
    """Nodal statistics of superposed random-phase waves for each ``J``."""
    return run(_coerce(config, "superposition"))


def run_variance_scaling(config) -> ExperimentResult:
    """Fit replicate variance against ``log E``."""
    return run(_coerce(config, "variance-scaling"))
