"""Verification suites: configuration, certificate records and the report."""
from __future__ import annotations

import datetime as _dt
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .certificate import Certificate, _jsonable, worst_of
from .conformal import (Normalization, boundary_argument_certificate, caratheodory_experiment, round_trip_certificate,
                        sample_domain, sample_upper, sc_solve, sector_certificate, tangency_certificate)
from .errors import ConfigError, HardyLipError
from .geometry import LipschitzGraph, RegionTag, cone_at, in_cone
from .hardy import (RationalFunction, annihilation_pairing, apply_T, apply_T_inverse, aux_H_function,
                    aux_h_function, boundary_norm_identity, circle_means, conjugate, domain_side_certificates,
                    exterior_pole_certificates, growth_certificates, pairing_orthogonality, rational_in_hp,
                    round_trip_T)
from .kernels import CONE, cone_entry_radius, kernel_bound_certificate, vertical_bound_sweep
from .quadrature import (QuadratureSpec, cauchy_integral, k_transform, k_transform_function,
                         k_transform_lp_certificate, kernel_mass, nontangential_limit_probe)

SUITES = ("kernel_bounds", "cauchy", "k_transform", "conformal", "operator_T", "bounds_44_46", "caratheodory")
SCHEMA_VERSION = 1
THREADS_ENV = "HARDYLIP_THREADS"


def _complex_list(values, name: str) -> list[complex]:
    out = []
    for v in values:
        if isinstance(v, (list, tuple)) and len(v) == 2:
            out.append(complex(float(v[0]), float(v[1])))
        elif isinstance(v, (int, float)):
            out.append(complex(v))
        else:
            raise ConfigError(f"grid {name}: cannot read {v!r} as a complex number")
    return out


def _positive_grid(values, name: str) -> list[float]:
    vals = [float(v) for v in values]
    if not vals:
        raise ConfigError(f"empty grid: {name}")
    if any(not (v > 0 and math.isfinite(v)) for v in vals):
        raise ConfigError(f"grid {name} must be positive")
    return vals


@dataclass
class SuiteConfig:
    graph: LipschitzGraph
    suites: tuple
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    tau: list = field(default_factory=lambda: [0.1, 1.0, 10.0])
    y: list = field(default_factory=lambda: list(np.logspace(-2, 1, 10)))
    p: list = field(default_factory=lambda: [1.5, 2.0, 3.0])
    alpha: list | None = None
    probes: list = field(default_factory=lambda: [2j, 1 + 1j, -1 + 0.5j])
    j: list = field(default_factory=lambda: [2, 3, 4, 5])
    seed: int = 0
    kernel_grid: int = 19
    out: str | None = None
    graph_source: object = None

    def to_dict(self) -> dict:
        return {"graph": self.graph.to_dict(), "graph_source": self.graph_source, "suites": list(self.suites),
                "quadrature": self.quadrature.to_dict(), "grids": {
                    "tau": self.tau, "y": self.y, "p": self.p,
                    "alpha": None if self.alpha is None else [[a.real, a.imag] for a in self.alpha],
                    "probes": [[z.real, z.imag] for z in self.probes], "j": self.j},
                "seed": self.seed, "kernel_grid": self.kernel_grid}


def _load_graph(spec, base: Path) -> LipschitzGraph:
    if isinstance(spec, str):
        return LipschitzGraph.load(base / spec)
    if isinstance(spec, dict):
        preset = spec.get("preset")
        if preset == "flat":
            return LipschitzGraph.flat()
        if preset == "wedge":
            return LipschitzGraph.wedge(float(spec.get("M", 1.0)), float(spec.get("apex", 0.0)))
        if preset is not None:
            raise ConfigError(f"unknown graph preset {preset!r}")
        return LipschitzGraph.from_dict(spec)
    raise ConfigError("config needs a 'graph' entry (path or object)")


def load_config(path, suites: list[str] | None = None, out: str | None = None) -> SuiteConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(raw, path.parent, suites, out)


def config_from_dict(raw: dict, base: Path = Path("."), suites: list[str] | None = None,
                     out: str | None = None) -> SuiteConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    try:
        graph = _load_graph(raw.get("graph"), Path(base))
    except HardyLipError as exc:
        raise ConfigError(f"graph: {exc}") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read graph: {exc}") from exc
    sel = suites if suites else raw.get("suites", list(SUITES))
    if isinstance(sel, str):
        sel = [s.strip() for s in sel.split(",") if s.strip()]
    if not sel:
        raise ConfigError("no suites selected")
    unknown = [s for s in sel if s not in SUITES]
    if unknown:
        raise ConfigError(f"unknown suites {unknown}; choose from {list(SUITES)}")
    grids = raw.get("grids", {})
    try:
        quad = QuadratureSpec.from_dict(raw.get("quadrature", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"quadrature: {exc}") from exc
    cfg = SuiteConfig(graph, tuple(sorted(set(sel), key=SUITES.index)), quad, graph_source=raw.get("graph"))
    if "tau" in grids:
        cfg.tau = _positive_grid(grids["tau"], "tau")
    if "y" in grids:
        cfg.y = _positive_grid(grids["y"], "y")
    if "p" in grids:
        cfg.p = _positive_grid(grids["p"], "p")
        if any(v <= 1 for v in cfg.p):
            raise ConfigError("grid p must exceed 1")
    if "alpha" in grids:
        cfg.alpha = _complex_list(grids["alpha"], "alpha")
        if not cfg.alpha:
            raise ConfigError("empty grid: alpha")
    if "probes" in grids:
        cfg.probes = _complex_list(grids["probes"], "probes")
        if not cfg.probes:
            raise ConfigError("empty grid: probes")
        if any(z.imag <= 0 for z in cfg.probes):
            raise ConfigError("grid probes must lie in the upper half-plane")
    if "j" in grids:
        cfg.j = [int(v) for v in grids["j"]]
        if len(cfg.j) < 2 or any(v < 1 for v in cfg.j):
            raise ConfigError("grid j needs at least two levels >= 1")
    cfg.seed = int(raw.get("seed", 0))
    cfg.kernel_grid = int(raw.get("kernel_grid", 19))
    if cfg.kernel_grid < 2:
        raise ConfigError("kernel_grid must be >= 2")
    cfg.out = out or raw.get("out")
    return cfg


# -- records ---------------------------------------------------------------------

@dataclass
class Record:
    suite: str
    index: int
    certificate: Certificate | None
    error: str | None = None
    name: str | None = None

    @property
    def status(self) -> str:
        if self.certificate is None:
            return "error"
        return "pass" if self.certificate.passed else "fail"

    def to_dict(self) -> dict:
        out = {"suite": self.suite, "index": self.index, "status": self.status}
        if self.certificate is not None:
            out.update(self.certificate.to_dict())
        else:
            out["bound_name"] = self.name
            out["error"] = self.error
        return out


class _Collector:
    def __init__(self, suite: str):
        self.suite = suite
        self.records: list[Record] = []
        self.series: dict[str, list] = {}

    def run(self, name: str, fn: Callable[[], Certificate | list]):
        """Evaluate one certificate (or a sweep, collapsed to its worst sample)."""
        try:
            c = fn()
            if isinstance(c, list):
                c = worst_of(c, c[0].bound_name)
            self.records.append(Record(self.suite, len(self.records), c, name=name))
        except Exception as exc:  # reported, never swallowed
            self.records.append(Record(self.suite, len(self.records), None, f"{type(exc).__name__}: {exc}", name))


def _check(name: str, lhs: float, rhs: float, **params) -> Certificate:
    return Certificate(name, lhs, rhs, params)


# -- defaults derived from the graph ------------------------------------------------

def _default_poles(graph: LipschitzGraph) -> list[complex]:
    return [complex(u, graph.height(u) - d) for u, d in ((0.5, 1.0), (-1.0, 2.0), (2.0, 1.5))]


def _test_functions(graph: LipschitzGraph) -> list[RationalFunction]:
    a, b, c = _default_poles(graph)
    return [RationalFunction(((a, 1, 1.0),)),
            RationalFunction(((a, 1, 1.0), (b, 2, 0.5j))),
            RationalFunction(((c, 1, 2.0 - 1.0j), (b, 1, -1.0)))]


def _alphas(cfg: SuiteConfig) -> list[complex]:
    if cfg.alpha is not None:
        return cfg.alpha
    return [complex(u, cfg.graph.height(u) - d) for u, d in ((0.0, 1.0), (1.5, 0.5), (-2.0, 2.0))]


def _smooth_u(graph: LipschitzGraph, candidates) -> list[float]:
    kinks = [v[0] for v in graph.vertices()]
    return [u for u in candidates if all(abs(u - k) > 0.25 for k in kinks)]


# -- the suites -----------------------------------------------------------------------

def suite_kernel_bounds(cfg: SuiteConfig, col: _Collector):
    g = cfg.graph
    grid = np.linspace(-3.0, 3.0, cfg.kernel_grid)
    col.run("kernel_bound_vertical", lambda: vertical_bound_sweep(g, grid, grid, cfg.tau))
    rng = np.random.default_rng(cfg.seed)
    for u0 in _smooth_u(g, [-1.7, 0.6, 2.3]):
        def cone_sweep(u0=u0):
            cone = cone_at(g, u0, math.pi / 4)
            delta = cone_entry_radius(g, cone)
            zeta0 = complex(g.zeta(u0))
            th = cone.tangent_angle_phi0 + rng.uniform(cone.half_angle_phi, math.pi - cone.half_angle_phi, 40)
            r = delta * rng.uniform(0.01, 0.99, 40)
            zs = r * np.exp(1j * th)
            us = rng.uniform(-3, 3, 40)
            return [kernel_bound_certificate(g, complex(g.zeta(u)), zeta0, complex(z), CONE, cone, delta=delta)
                    for u, z in zip(us, zs)]
        col.run(f"kernel_bound_cone_u0={u0}", cone_sweep)


def suite_cauchy(cfg: SuiteConfig, col: _Collector):
    g, spec = cfg.graph, cfg.quadrature
    F = _test_functions(g)[1]
    us = np.linspace(-3.0, 3.0, 20)
    above = us + 1j * (g.height(us) + 0.5)
    below = us + 1j * (g.height(us) - 0.5)

    def reproduce():
        err = max(abs(cauchy_integral(g, F, w, spec) - F(w)) for w in above)
        return _check("cauchy_reproduction", err, 1e-6, points=len(above))

    def annihilate():
        err = max(abs(cauchy_integral(g, F, w, spec)) for w in below)
        return _check("cauchy_annihilation", err, 1e-6, points=len(below))

    col.run("cauchy_reproduction", reproduce)
    col.run("cauchy_annihilation", annihilate)

    def orthogonality():
        Fs = _test_functions(g)
        val = max(abs(pairing_orthogonality(g, Fs[0], Fs[2], 2.0, spec)), abs(pairing_orthogonality(g, Fs[1], Fs[2], 1.5, spec)))
        return _check("orthogonality", val, 1e-6)

    col.run("orthogonality", orthogonality)

    def sweep():
        alphas = [complex(u, g.height(u) - d) for u in np.linspace(-3, 3, 5) for d in (0.3, 1.0, 2.0, 4.0)]
        val = max(abs(annihilation_pairing(g, F, a, 2.0, spec)) for a in alphas)
        return _check("annihilation_sweep", val, 1e-6, alphas=len(alphas))

    col.run("annihilation_sweep", sweep)

    def negative_control():
        a = complex(0.3, g.height(0.3) + 1.0)
        val = abs(annihilation_pairing(g, F, a, 2.0, spec, check=False))
        # a pole above the curve must be detected
        return _check("annihilation_negative_control", 1e-2, val, alpha=a)

    col.run("annihilation_negative_control", negative_control)

    def membership():
        res = [rational_in_hp(g, f, p, spec=spec).as_certificate() for f in _test_functions(g)[:1] for p in cfg.p]
        return res

    col.run("rational_membership", membership)


def suite_k_transform(cfg: SuiteConfig, col: _Collector):
    g, spec = cfg.graph, cfg.quadrature
    rng = np.random.default_rng(cfg.seed + 1)

    def mass():
        u0 = rng.uniform(-3, 3, 50)
        tau = 10.0 ** rng.uniform(-2, 1, 50)
        errs = [abs(kernel_mass(g, complex(g.zeta(a)), 1j * t, spec) - 1.0) for a, t in zip(u0, tau)]
        i = int(np.argmax(errs))
        return _check("kernel_mass", errs[i], 1e-6, configs=50, worst_u0=float(u0[i]), worst_tau=float(tau[i]))

    col.run("kernel_mass", mass)
    F = _test_functions(g)[0]

    def vs_cauchy():
        errs = []
        for u0 in (-1.3, 0.4, 2.1):
            z0 = complex(g.zeta(u0))
            for t in cfg.tau:
                errs.append(abs(k_transform(g, F, z0, 1j * t, spec) - F(z0 + 1j * t)))
        return _check("k_transform_reproduction", max(errs), 1e-6)

    col.run("k_transform_reproduction", vs_cauchy)
    data = lambda t: 1.0 / (1.0 + np.abs(t) ** 2)
    rows = []

    def lp(p, tau):
        c = k_transform_lp_certificate(g, data, p, tau)
        rows.append(["k_transform_Lp", p, tau, c.lhs, c.rhs])
        return c

    for p in cfg.p:
        col.run(f"k_transform_Lp_p={p}", lambda p=p: [lp(p, t) for t in cfg.tau])
    col.series["tau_sweep"] = rows

    for u0 in _smooth_u(g, [0.7, -1.6]):
        def probe(u0=u0):
            cone = cone_at(g, u0, math.pi / 4)
            delta = cone_entry_radius(g, cone)
            zeta0 = complex(g.zeta(u0))
            G = k_transform_function(g, F, zeta0, spec)
            radii = [delta * 0.2 * 2.0 ** -k for k in range(4)]
            res = nontangential_limit_probe(g, G, cone, radii)
            return _check("nontangential_limit", abs(res.extrapolated_limit - F(zeta0)), 1e-4, u0=u0,
                          converged=res.converged)
        col.run(f"nontangential_limit_u0={u0}", probe)


def suite_conformal(cfg: SuiteConfig, col: _Collector):
    g = cfg.graph
    state = {}

    def solve():
        m, rep = sc_solve(g, return_report=True)
        state["map"] = m
        scale = max(1.0, g.extent())
        return _check("sc_vertex_residual", rep.max_residual, 1e-6 * scale, vertices=len(rep.residuals),
                      map=m.to_dict())

    col.run("sc_vertex_residual", solve)
    if "map" not in state:
        return
    m = state["map"]
    col.run("sector", lambda: sector_certificate(m, g.M, n=1000, seed=cfg.seed).as_certificate("sector"))
    col.run("inverse_sector", lambda: sector_certificate(m, g.M, n=1000, seed=cfg.seed + 7,
                                                         inverse=True).as_certificate("inverse_sector"))
    col.run("boundary_argument", lambda: boundary_argument_certificate(m, g.M))
    col.run("boundary_tangency", lambda: tangency_certificate(m, g))
    col.run("inverse_round_trip", lambda: round_trip_certificate(m, sample_domain(g, 200, cfg.seed)))

    def path_independence():
        z = sample_upper(m, 20, cfg.seed + 3)
        z = z[z.imag > 1e-2]
        d = float(np.max(np.abs(m.evaluate_along(z, 3j) - np.asarray(m.evaluate(z)))))
        return _check("path_independence", d, 1e-9 * max(1.0, g.extent()))

    col.run("path_independence", path_independence)


def suite_operator_T(cfg: SuiteConfig, col: _Collector):
    g = cfg.graph
    m = sc_solve(g)
    for k, F in enumerate(_test_functions(g)):
        for p in cfg.p:
            col.run(f"boundary_norm_identity_F{k}_p={p}",
                    lambda F=F, p=p: boundary_norm_identity(m, g, F, p, decay=F.decay_order()))
    z = sample_upper(m, 50, cfg.seed + 11)
    f = lambda x: 1.0 / (x + 1j) + 0.5 / (x - 2.0 + 0.5j) ** 2
    col.run("T_round_trip", lambda: [_check("T_round_trip", round_trip_T(m, f, p, z), 1e-8, p=p) for p in cfg.p])

    def inverse_round_trip():
        w = sample_domain(g, 50, cfg.seed + 12)
        F = _test_functions(g)[1]
        out = []
        for p in cfg.p:
            TF = lambda x, p=p: apply_T(m, F, p, x)
            err = float(np.max(np.abs(apply_T_inverse(m, TF, p, w) - F(w))))
            out.append(_check("T_inverse_round_trip", err, 1e-8, p=p))
        return out

    col.run("T_inverse_round_trip", inverse_round_trip)

    def linearity():
        F1, F2 = _test_functions(g)[:2]
        a, b = 0.7 - 0.2j, -1.3 + 0.4j
        lhs = apply_T(m, lambda w: a * F1(w) + b * F2(w), 2.0, z)
        rhs = a * apply_T(m, F1, 2.0, z) + b * apply_T(m, F2, 2.0, z)
        return _check("T_linearity", float(np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(rhs)))), 1e-12)

    col.run("T_linearity", linearity)

    for p in (2.0, 4.0):
        def h_removable(p=p):
            z0 = 1j
            h = aux_h_function(m, z0, p)
            radii = [1e-2, 1e-3]
            means = circle_means(h.direct, z0, radii)
            err = float(np.max(np.abs(means - h.limit)))
            tol = 1e-8 if p == 2.0 else 1e-5
            return _check("h_removable", err, tol, p=p, limit=h.limit)

        def H_removable(p=p):
            w0 = complex(0.3, g.height(0.3) + 1.0)
            H = aux_H_function(m, w0, p, g)
            means = circle_means(H.direct, w0, [1e-2, 1e-3])
            err = float(np.max(np.abs(means - H.limit)))
            tol = 1e-8 if p == 2.0 else 1e-5
            return _check("H_removable", err, tol, p=p, limit=H.limit)

        col.run(f"h_removable_p={p}", h_removable)
        col.run(f"H_removable_p={p}", H_removable)


def suite_bounds(cfg: SuiteConfig, col: _Collector):
    g = cfg.graph
    m = sc_solve(g)
    rows = []
    for alpha in _alphas(cfg):
        for q in cfg.p:
            col.run(f"exterior_pole_alpha={alpha}_q={q}",
                    lambda alpha=alpha, q=q: exterior_pole_certificates(m, g, alpha, q, cfg.y))
    F = _test_functions(g)[0]
    for p in cfg.p:
        def growth(p=p):
            certs = growth_certificates(g, F, p, cfg.tau, poles=F.poles, tail_k=p)
            rows.extend(["growth", p, c.parameters["tau"], c.lhs, c.rhs] for c in certs)
            return certs
        col.run(f"growth_p={p}", growth)
    for alpha in (-1j, 1.0 - 2.0j):
        for q in cfg.p:
            def domain_side(alpha=alpha, q=q):
                certs = domain_side_certificates(m, g, alpha, q, cfg.tau)
                vals = [c.lhs for c in certs]
                rows.extend(["domain_side", q, c.parameters["tau"], c.lhs, c.rhs] for c in certs)
                spread = max(vals) / min(vals) if min(vals) > 0 else math.inf
                agg = worst_of(certs, "domain_side_Hq", spread=spread)
                return agg
            col.run(f"domain_side_alpha={alpha}_q={q}", domain_side)
    col.series["tau_sweep"] = col.series.get("tau_sweep", []) + rows


def suite_caratheodory(cfg: SuiteConfig, col: _Collector):
    g = cfg.graph
    state = {}

    def run():
        table = caratheodory_experiment(g, cfg.j, cfg.probes)
        state["table"] = table
        diffs = [v for _, v in sorted(table.max_diffs.items())]
        failures = [r.error for r in table.rows if r.error]
        if failures:
            raise HardyLipError(f"inner solve failed: {failures[0]}")
        tiny = all(d is not None and d <= 1e-12 for d in diffs)
        steps = sum(1 for a, b in zip(diffs, diffs[1:]) if not b < a)
        return Certificate("caratheodory_decreasing", 0.0 if (tiny or steps == 0) else float(steps), 0.0,
                           {"max_diffs": diffs, "j": cfg.j, "w0": table.w0})

    col.run("caratheodory_decreasing", run)

    def pinned():
        table = state["table"]
        from .geometry import polygonal_approximation
        errs = []
        for j in cfg.j:
            mj = sc_solve(polygonal_approximation(g, j), Normalization(1j, table.w0))
            errs.append(abs(complex(mj.evaluate(1j)) - table.w0))
        return _check("caratheodory_normalization", max(errs), 1e-10)

    if "table" in state:
        col.run("caratheodory_normalization", pinned)
        col.series["caratheodory"] = state["table"].to_csv_rows()


_RUNNERS = {"kernel_bounds": suite_kernel_bounds, "cauchy": suite_cauchy, "k_transform": suite_k_transform,
            "conformal": suite_conformal, "operator_T": suite_operator_T, "bounds_44_46": suite_bounds,
            "caratheodory": suite_caratheodory}

SERIES_HEADERS = {"tau_sweep": ["quantity", "p", "tau", "measured", "bound"],
                  "caratheodory": ["j", "probe", "re", "im", "successive_diff"]}


@dataclass
class SuiteReport:
    records: list
    series: dict
    config: dict
    wall_time: float
    timestamp: str

    @property
    def summary(self) -> dict:
        counts = {"pass": 0, "fail": 0, "error": 0}
        for r in self.records:
            counts[r.status] += 1
        counts["total"] = len(self.records)
        return counts

    @property
    def exit_status(self) -> int:
        s = self.summary
        return 0 if s["fail"] == 0 and s["error"] == 0 else 1

    def to_dict(self) -> dict:
        return _jsonable({
            "artifact": "hardylip", "version": __version__, "schema_version": SCHEMA_VERSION,
            # the only run-dependent field
            "timestamp": {"utc": self.timestamp, "wall_time_s": self.wall_time},
            "config": self.config, "summary": self.summary,
            "records": [r.to_dict() for r in self.records],
            "series": {k: {"header": SERIES_HEADERS[k], "rows": v} for k, v in sorted(self.series.items())},
        })


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError as exc:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    return os.cpu_count() or 1


def _run_one(cfg: SuiteConfig, name: str) -> _Collector:
    col = _Collector(name)
    try:
        _RUNNERS[name](cfg, col)
    except Exception as exc:
        col.records.append(Record(name, len(col.records), None, f"{type(exc).__name__}: {exc}", name))
    return col


def run_suite(cfg: SuiteConfig) -> SuiteReport:
    t0 = time.perf_counter()
    stamp = _dt.datetime.now(_dt.timezone.utc).isoformat()
    with ThreadPoolExecutor(max_workers=min(_threads(), len(cfg.suites))) as ex:
        cols = list(ex.map(lambda s: _run_one(cfg, s), cfg.suites))
    records = []
    series: dict[str, list] = {}
    for col in sorted(cols, key=lambda c: c.suite):
        records.extend(col.records)
        for k, v in col.series.items():
            series.setdefault(k, []).extend(v)
    return SuiteReport(records, series, cfg.to_dict(), time.perf_counter() - t0, stamp)


def write_json(report: SuiteReport | dict, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    data = report.to_dict() if isinstance(report, SuiteReport) else report
    path = out / "report.json"
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return path


def write_csv_bundle(report: SuiteReport | dict, out_dir) -> list[Path]:
    import csv

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    data = report.to_dict() if isinstance(report, SuiteReport) else report
    paths = []
    for name, block in sorted(data.get("series", {}).items()):
        path = out / f"{name}.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(block["header"])
            w.writerows(block["rows"])
        paths.append(path)
    return paths
