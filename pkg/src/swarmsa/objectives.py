"""Benchmark objective catalog with analytic gradients.

Every objective evaluates on arrays of shape (..., d) and returns values of
shape (...); gradients have the input shape. Points where the formula is not
differentiable use a subgradient convention: the non-smooth component of the
gradient is zero there (the global minimizers sit on those loci, so a zero
step is the fixed-point-consistent choice).

Rational constants inside formulas are written as exact divisions (x/100
rather than 0.01*x) where it matters for hitting the cataloged minimum
value exactly in floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .errors import InvalidDimensionError
from .rng import seeded_generator

TWO_PI = 2.0 * np.pi


@dataclass(eq=False)
class Objective:
    """An evaluatable objective with analytic gradient and catalog metadata.

    eval/grad/eval_grad accept (..., dim) arrays. global_min_point is None
    when the minimizer is not cataloged. box is the default test and
    initialization box, one (lo, hi) pair per coordinate; runs may override
    it. nonsmooth_dist measures separation from known non-smooth loci (in
    the metric relevant to finite-difference accuracy) and is None for
    everywhere-smooth objectives.
    """

    name: str
    dim: int
    eval: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray]
    global_min_value: float
    global_min_point: Optional[np.ndarray]
    smooth_everywhere: bool
    box: tuple
    params: dict = field(default_factory=dict)
    eval_grad: Optional[Callable] = None
    nonsmooth_dist: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if self.eval_grad is None:
            self.eval_grad = lambda x: (self.eval(x), self.grad(x))

    @property
    def label(self) -> str:
        if self.params:
            inner = ",".join(f"{k}={v:g}" for k, v in sorted(self.params.items()))
            return f"{self.name}({inner})"
        return self.name

    def box_array(self) -> np.ndarray:
        return np.asarray(self.box, dtype=float)


def _as_points(x) -> np.ndarray:
    return np.asarray(x, dtype=float)


# ---------------------------------------------------------------------------
# Ackley family


def ackley(d: int, A: float = 20.0, C: float = 0.2, D: float = 0.0) -> Objective:
    """d-dimensional Ackley function.

    F(x) = -A exp(-C sqrt(mean(x_i^2))) - exp(mean(cos(2 pi x_i))) + A + e + D

    The sqrt term is non-smooth at the origin (the global minimizer); the
    gradient there is defined as the zero vector.
    """
    if d < 1:
        raise InvalidDimensionError(f"ackley requires d >= 1, got {d}")
    if A <= 0 or C <= 0:
        raise ValueError("ackley requires A > 0 and C > 0")

    def evaluate(x):
        x = _as_points(x)
        rms = np.sqrt(np.mean(x * x, axis=-1))
        mc = np.mean(np.cos(TWO_PI * x), axis=-1)
        return -A * np.exp(-C * rms) - np.exp(mc) + A + np.e + D

    def eval_grad(x):
        x = _as_points(x)
        rms = np.sqrt(np.mean(x * x, axis=-1, keepdims=True))
        e1 = np.exp(-C * rms)
        cosx = np.cos(TWO_PI * x)
        e2 = np.exp(np.mean(cosx, axis=-1, keepdims=True))
        f = (-A * e1 - e2 + A + np.e + D)[..., 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            radial = (A * C / d) * x * (e1 / rms)
        radial = np.where(rms > 0, radial, 0.0)
        g = radial + (TWO_PI / d) * np.sin(TWO_PI * x) * e2
        return f, g

    def gradient(x):
        return eval_grad(x)[1]

    return Objective(
        name="ackley",
        dim=d,
        eval=evaluate,
        grad=gradient,
        eval_grad=eval_grad,
        global_min_value=D,
        global_min_point=np.zeros(d),
        smooth_everywhere=True,
        box=((-5.0, 5.0),) * d,
        params={"A": A, "C": C, "D": D},
        nonsmooth_dist=lambda x: np.linalg.norm(_as_points(x), axis=-1),
    )


def rastrigin(d: int, D: float = 0.0, quad_coef: float = 1.0) -> Objective:
    """d-dimensional Rastrigin function with adjustable quadratic envelope.

    F(x) = 10 d + sum(quad_coef * x_i^2 - 10 cos(2 pi x_i)) + D

    quad_coef = 1 is the classic form; quad_coef = 2 steepens the envelope
    so the non-global wells sit noticeably above the global one.
    """
    if d < 1:
        raise InvalidDimensionError(f"rastrigin requires d >= 1, got {d}")
    if quad_coef <= 0:
        raise ValueError("rastrigin requires quad_coef > 0")

    def evaluate(x):
        x = _as_points(x)
        return 10.0 * d + np.sum(quad_coef * x * x - 10.0 * np.cos(TWO_PI * x), axis=-1) + D

    def gradient(x):
        x = _as_points(x)
        return 2.0 * quad_coef * x + 10.0 * TWO_PI * np.sin(TWO_PI * x)

    def eval_grad(x):
        x = _as_points(x)
        c = np.cos(TWO_PI * x)
        f = 10.0 * d + np.sum(quad_coef * x * x - 10.0 * c, axis=-1) + D
        g = 2.0 * quad_coef * x + 10.0 * TWO_PI * np.sin(TWO_PI * x)
        return f, g

    params = {"D": D, "quad_coef": quad_coef}
    return Objective(
        name="rastrigin",
        dim=d,
        eval=evaluate,
        grad=gradient,
        eval_grad=eval_grad,
        global_min_value=D,
        global_min_point=np.zeros(d),
        smooth_everywhere=True,
        box=((-5.12, 5.12),) * d,
        params=params,
    )


# ---------------------------------------------------------------------------
# Two-dimensional suite


def levy() -> Objective:
    """2-D Levy function with w(t) = 1 + (t - 1)/4; minimum 0 at (1, 1)."""

    def evaluate(x):
        x = _as_points(x)
        wx = 1.0 + (x[..., 0] - 1.0) / 4.0
        wy = 1.0 + (x[..., 1] - 1.0) / 4.0
        return (
            np.sin(np.pi * wx) ** 2
            + (wx - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * wx + 1.0) ** 2)
            + (wy - 1.0) ** 2 * (1.0 + np.sin(TWO_PI * wy) ** 2)
        )

    def gradient(x):
        x = _as_points(x)
        wx = 1.0 + (x[..., 0] - 1.0) / 4.0
        wy = 1.0 + (x[..., 1] - 1.0) / 4.0
        dfx = (
            np.pi * np.sin(TWO_PI * wx)
            + 2.0 * (wx - 1.0) * (1.0 + 10.0 * np.sin(np.pi * wx + 1.0) ** 2)
            + 10.0 * np.pi * (wx - 1.0) ** 2 * np.sin(2.0 * (np.pi * wx + 1.0))
        ) / 4.0
        dfy = (
            2.0 * (wy - 1.0) * (1.0 + np.sin(TWO_PI * wy) ** 2)
            + TWO_PI * (wy - 1.0) ** 2 * np.sin(2.0 * TWO_PI * wy)
        ) / 4.0
        return np.stack([dfx, dfy], axis=-1)

    return Objective(
        name="levy",
        dim=2,
        eval=evaluate,
        grad=gradient,
        global_min_value=0.0,
        global_min_point=np.array([1.0, 1.0]),
        smooth_everywhere=True,
        box=((-10.0, 10.0), (-10.0, 10.0)),
    )


def levy13() -> Objective:
    """2-D Levy N.13 function; minimum 0 at (1, 1)."""

    def evaluate(x):
        x = _as_points(x)
        u, v = x[..., 0], x[..., 1]
        return (
            np.sin(3.0 * np.pi * u) ** 2
            + (u - 1.0) ** 2 * (1.0 + np.sin(3.0 * np.pi * v) ** 2)
            + (v - 1.0) ** 2 * (1.0 + np.sin(TWO_PI * v) ** 2)
        )

    def gradient(x):
        x = _as_points(x)
        u, v = x[..., 0], x[..., 1]
        dfu = 3.0 * np.pi * np.sin(6.0 * np.pi * u) + 2.0 * (u - 1.0) * (
            1.0 + np.sin(3.0 * np.pi * v) ** 2
        )
        dfv = (
            3.0 * np.pi * (u - 1.0) ** 2 * np.sin(6.0 * np.pi * v)
            + 2.0 * (v - 1.0) * (1.0 + np.sin(TWO_PI * v) ** 2)
            + TWO_PI * (v - 1.0) ** 2 * np.sin(2.0 * TWO_PI * v)
        )
        return np.stack([dfu, dfv], axis=-1)

    return Objective(
        name="levy13",
        dim=2,
        eval=evaluate,
        grad=gradient,
        global_min_value=0.0,
        global_min_point=np.array([1.0, 1.0]),
        smooth_everywhere=True,
        box=((-10.0, 10.0), (-10.0, 10.0)),
    )


def drop_wave() -> Objective:
    """2-D Drop-Wave function; minimum -1 at the origin.

    F(x, y) = -(1 + cos(12 r)) / (r^2/2 + 2) with r = sqrt(x^2 + y^2).
    The radial term makes the formula non-smooth at the origin; the
    gradient there is taken as zero (which equals its radial limit).
    """

    def evaluate(x):
        x = _as_points(x)
        r2 = np.sum(x * x, axis=-1)
        r = np.sqrt(r2)
        return -(1.0 + np.cos(12.0 * r)) / (0.5 * r2 + 2.0)

    def gradient(x):
        x = _as_points(x)
        r2 = np.sum(x * x, axis=-1, keepdims=True)
        r = np.sqrt(r2)
        u = 1.0 + np.cos(12.0 * r)
        v = 0.5 * r2 + 2.0
        with np.errstate(divide="ignore", invalid="ignore"):
            g = x * (12.0 * v * np.sin(12.0 * r) / r + u) / (v * v)
        return np.where(r > 0, g, 0.0)

    return Objective(
        name="dropwave",
        dim=2,
        eval=evaluate,
        grad=gradient,
        global_min_value=-1.0,
        global_min_point=np.zeros(2),
        smooth_everywhere=False,
        box=((-5.12, 5.12), (-5.12, 5.12)),
        nonsmooth_dist=lambda x: np.linalg.norm(_as_points(x), axis=-1),
    )


def schaffer2() -> Objective:
    """2-D Schaffer N.2 function; minimum 0 at the origin.

    F(x, y) = 0.5 + (sin^2(x^2 - y^2) - 0.5) / (1 + (x^2 + y^2)/1000)^2
    """

    def evaluate(x):
        x = _as_points(x)
        u, v = x[..., 0], x[..., 1]
        p = u * u - v * v
        q = 1.0 + (u * u + v * v) / 1000.0
        return 0.5 + (np.sin(p) ** 2 - 0.5) / (q * q)

    def gradient(x):
        x = _as_points(x)
        u, v = x[..., 0], x[..., 1]
        p = u * u - v * v
        q = 1.0 + (u * u + v * v) / 1000.0
        s2p = np.sin(2.0 * p)
        top = np.sin(p) ** 2 - 0.5
        dfu = 2.0 * u * s2p / (q * q) - u * top / 250.0 / (q * q * q)
        dfv = -2.0 * v * s2p / (q * q) - v * top / 250.0 / (q * q * q)
        return np.stack([dfu, dfv], axis=-1)

    return Objective(
        name="schaffer2",
        dim=2,
        eval=evaluate,
        grad=gradient,
        global_min_value=0.0,
        global_min_point=np.zeros(2),
        smooth_everywhere=True,
        box=((-10.0, 10.0), (-10.0, 10.0)),
    )


def bukin6() -> Objective:
    """2-D Bukin N.6 function; minimum 0 at (-10, 1).

    F(x, y) = 100 sqrt(|y - x^2/100|) + |x + 10|/100

    Non-smooth on the parabola y = x^2/100 (which contains the minimizer)
    and on the line x = -10; both components use the zero-subgradient
    convention there.
    """

    def evaluate(x):
        x = _as_points(x)
        u, v = x[..., 0], x[..., 1]
        return 100.0 * np.sqrt(np.abs(v - u * u / 100.0)) + np.abs(u + 10.0) / 100.0

    def gradient(x):
        x = _as_points(x)
        u, v = x[..., 0], x[..., 1]
        t = v - u * u / 100.0
        s = np.sign(t)
        root = np.sqrt(np.abs(t))
        with np.errstate(divide="ignore", invalid="ignore"):
            dfu = -u * s / root + np.sign(u + 10.0) / 100.0
            dfv = 50.0 * s / root
        # sign(0) = 0 zeroes the kink term; the sqrt term needs the guard.
        dfu = np.where(t != 0, dfu, np.sign(u + 10.0) / 100.0)
        dfv = np.where(t != 0, dfv, 0.0)
        return np.stack([dfu, dfv], axis=-1)

    def dist(x):
        x = _as_points(x)
        u, v = x[..., 0], x[..., 1]
        return np.minimum(np.abs(v - u * u / 100.0), np.abs(u + 10.0))

    return Objective(
        name="bukin6",
        dim=2,
        eval=evaluate,
        grad=gradient,
        global_min_value=0.0,
        global_min_point=np.array([-10.0, 1.0]),
        smooth_everywhere=False,
        box=((-15.0, -5.0), (-3.0, 3.0)),
        nonsmooth_dist=dist,
    )


def suite_2d() -> list[Objective]:
    """The five fixed 2-D benchmark objectives."""
    return [levy(), levy13(), drop_wave(), schaffer2(), bukin6()]


def full_catalog(d: int = 2) -> list[Objective]:
    """All eight cataloged objectives (Ackley/Rastrigin built in dimension d)."""
    return [
        ackley(d),
        rastrigin(d, quad_coef=1.0),
        rastrigin(d, quad_coef=2.0),
        *suite_2d(),
    ]


_FIXED_2D = {
    "levy": levy,
    "levy13": levy13,
    "dropwave": drop_wave,
    "schaffer2": schaffer2,
    "bukin6": bukin6,
}


def from_config(name: str, dim: int, params: dict | None = None) -> Objective:
    """Build an objective from its config name, dimension and parameter map."""
    params = dict(params or {})
    if name == "ackley":
        return ackley(dim, **params)
    if name == "rastrigin":
        return rastrigin(dim, **params)
    if name in _FIXED_2D:
        if params:
            raise ValueError(f"{name} takes no parameters, got {sorted(params)}")
        if dim != 2:
            raise InvalidDimensionError(f"{name} is 2-D only, got dim={dim}")
        return _FIXED_2D[name]()
    raise ValueError(f"unknown objective {name!r}")


# ---------------------------------------------------------------------------
# Gradient verification


def fd_gradient(f, x: np.ndarray, step: float = 1e-6) -> np.ndarray:
    """Central finite-difference gradient of f at a single point x.

    f may be an Objective or a plain callable on (..., d) arrays.
    """
    if step <= 0:
        raise ValueError("step must be > 0")
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("x must be finite")
    evaluate = f.eval if isinstance(f, Objective) else f
    d = x.shape[-1]
    eye = np.eye(d)
    pts = np.concatenate([x[None] + step * eye, x[None] - step * eye], axis=0)
    vals = np.asarray(evaluate(pts), dtype=float)
    return (vals[:d] - vals[d:]) / (2.0 * step)


@dataclass
class GradientCheck:
    objective: str
    n_points: int
    max_rel_err: float
    passed: bool


def gradient_check(
    objective: Objective,
    n_points: int = 100,
    seed: int = 2024,
    step: float = 1e-6,
    rtol: float = 1e-5,
    abs_floor: float = 1e-7,
    exclusion_radius: float = 1e-3,
) -> GradientCheck:
    """Compare the analytic gradient with central differences at seeded points.

    Points are sampled uniformly from the objective's box, resampling any
    that fall within exclusion_radius of a known non-smooth locus. A
    component passes if |analytic - fd| <= max(rtol * scale, abs_floor)
    with scale = max(|analytic|, |fd|).
    """
    gen = seeded_generator(seed, stream=hash(objective.label) & 0xFFFF)
    box = objective.box_array()
    lo, hi = box[:, 0], box[:, 1]
    pts = []
    guard = 0
    while len(pts) < n_points:
        cand = gen.uniform(lo, hi, size=(n_points, objective.dim))
        if objective.nonsmooth_dist is not None:
            cand = cand[objective.nonsmooth_dist(cand) > exclusion_radius]
        pts.extend(cand.tolist())
        guard += 1
        if guard > 100:
            raise RuntimeError("could not sample points away from non-smooth loci")
    pts = np.asarray(pts[:n_points])

    max_rel = 0.0
    ok = True
    for x in pts:
        a = np.asarray(objective.grad(x), dtype=float)
        fd = fd_gradient(objective, x, step=step)
        err = np.abs(a - fd)
        scale = np.maximum(np.abs(a), np.abs(fd))
        ok &= bool(np.all(err <= np.maximum(rtol * scale, abs_floor)))
        with np.errstate(divide="ignore", invalid="ignore"):
            rel = np.where(scale > 0, err / scale, 0.0)
        max_rel = max(max_rel, float(rel.max(initial=0.0)))
    return GradientCheck(objective.label, n_points, max_rel, ok)


# ---------------------------------------------------------------------------
# One-dimensional basin analysis


@dataclass(frozen=True)
class BasinInfo:
    """Global-minimum basin of a 1-D objective.

    (lo, hi) is the interval bounded by the local maxima nearest the
    minimizer (or the box edge where none exists); best_local_min_value is
    the lowest value among the other local minima; epsilon_succ is half the
    gap between it and the global minimum value, the threshold below which
    a final provisional minimum counts as a success.
    """

    lo: float
    hi: float
    best_local_min_value: float
    epsilon_succ: float


def basin_1d(objective: Objective, n_grid: int = 100001) -> BasinInfo:
    """Locate the global basin and success threshold of a 1-D objective.

    Critical points are found from sign changes of the analytic gradient on
    a dense grid and refined with Brent's method; they are classified by a
    centered difference of the gradient.
    """
    if objective.dim != 1:
        raise InvalidDimensionError("basin_1d requires a 1-D objective")
    if objective.global_min_point is None:
        raise ValueError("objective has no cataloged minimizer")
    x_star = float(objective.global_min_point[0])
    (lo, hi), = objective.box
    xs = np.linspace(lo, hi, n_grid)
    g = np.asarray(objective.grad(xs[:, None]))[:, 0]

    def g1(x):
        return float(objective.grad(np.array([x]))[0])

    crit = []
    sign_change = np.nonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0)[0]
    for i in sign_change:
        crit.append(brentq(g1, xs[i], xs[i + 1], xtol=1e-13))
    eps = 1e-5
    maxima, minima = [], []
    for c in crit:
        curv = g1(c + eps) - g1(c - eps)
        (minima if curv > 0 else maxima).append(c)

    left = [c for c in maxima if c < x_star]
    right = [c for c in maxima if c > x_star]
    basin_lo = max(left) if left else lo
    basin_hi = min(right) if right else hi

    others = [c for c in minima if abs(c - x_star) > 1e-6]
    if not others:
        raise ValueError("objective has a single minimum; no success gap to measure")
    best = min(float(objective.eval(np.array([c]))) for c in others)
    return BasinInfo(
        lo=basin_lo,
        hi=basin_hi,
        best_local_min_value=best,
        epsilon_succ=0.5 * (best - objective.global_min_value),
    )
