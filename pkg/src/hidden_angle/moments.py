"""Position/momentum variances by quadrature, plus a Monte-Carlo cross-check.

Three integration rules are available: Gauss-Hermite (natural for the
oscillator and Gaussian families, after scaling to the e^{-xi^2} weight),
Gauss-Legendre (exact-domain rule for the infinite well and tabulated
grids), and an adaptive Simpson rule with an evaluation budget.  When no
rule is forced, each family gets its natural one.

The Gauss-Hermite weights are rebuilt from the orthonormal Hermite
functions as W_i = 1 / (n * h_{n-1}(x_i)^2), which already contains the
e^{+x_i^2} factor; this stays finite at any order, unlike the textbook
weights that underflow beyond a few hundred points.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import roots_hermite

from .axis_states import (
    AxisState,
    Family,
    SeparableState3D,
    closed_form_variances,
    eval_dpsi,
    eval_psi,
    hermite_function,
    hermite_function_scaled,
    _hermite_function_fast,
    _hermite_function_neighbors,
    support_interval,
)
from .errors import (
    DerivativeUnstable,
    HiddenAngleError,
    NoClosedForm,
    QuadratureNotConverged,
    RejectionInefficient,
)

__all__ = [
    "Rule",
    "QuadratureConfig",
    "VarianceVector",
    "position_variance_quad",
    "momentum_variance_quad",
    "variance_vectors",
    "mc_variance_oracle",
]

MAX_ADAPTIVE_EVALS = 1_000_000


class Rule(enum.Enum):
    GAUSS_HERMITE = "gauss_hermite"
    GAUSS_LEGENDRE = "gauss_legendre"
    ADAPTIVE_SIMPSON = "adaptive_simpson"


@dataclass(frozen=True)
class QuadratureConfig:
    """Integration settings; ``rule=None`` picks the family's natural rule."""

    rule: Rule | None = None
    points: int = 256
    rel_tol: float = 1e-10

    def __post_init__(self):
        if self.points < 8:
            raise ValueError(f"points must be >= 8, got {self.points}")
        if not 0.0 < self.rel_tol <= 1e-2:
            raise ValueError(f"rel_tol must be in (0, 1e-2], got {self.rel_tol}")


@dataclass(frozen=True)
class VarianceVector:
    """Three nonnegative squared deviations, one per Cartesian axis."""

    components: tuple[float, float, float]

    def __post_init__(self):
        comps = tuple(float(c) for c in self.components)
        if len(comps) != 3:
            raise ValueError("VarianceVector needs exactly three components")
        for c in comps:
            if not math.isfinite(c) or c < 0.0:
                raise ValueError(f"components must be finite and >= 0, got {c!r}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def of(cls, x, y, z) -> "VarianceVector":
        return cls((float(x), float(y), float(z)))

    def as_array(self) -> np.ndarray:
        return np.array(self.components, dtype=float)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __len__(self):
        return 3


# ---------------------------------------------------------------------------
# Quadrature rules
# ---------------------------------------------------------------------------


@lru_cache(maxsize=32)
def _gauss_hermite_rule(points: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes x_i of H_points and direct weights W_i = w_i * e^{x_i^2}."""
    nodes, _ = roots_hermite(points)
    m, e = hermite_function_scaled(points - 1, nodes)
    # W = 1 / (points * h^2) with h = m * 2^e, kept in ldexp form
    w = np.ldexp(1.0 / (points * m * m), -2 * e.astype(np.int64))
    return nodes, w


@lru_cache(maxsize=32)
def _gauss_legendre_rule(points: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(points)


def _legendre_on(a: float, b: float, points: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = _gauss_legendre_rule(points)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def adaptive_simpson(f, a: float, b: float, rel_tol: float,
                     max_evals: int = MAX_ADAPTIVE_EVALS) -> float:
    """Adaptive Simpson integration of a scalar function on [a, b].

    The tolerance is relative to a coarse estimate of the integral of |f|;
    exceeding ``max_evals`` evaluations raises QuadratureNotConverged.
    """
    evals = 0

    def feval(x):
        nonlocal evals
        evals += 1
        return f(x)

    # scale the relative tolerance off a coarse |f| integral
    xs = np.linspace(a, b, 129)
    fs = [f(x) for x in xs]
    coarse = np.trapezoid(np.abs(fs), xs)
    evals += len(xs)
    tol = rel_tol * max(coarse, 1e-300)

    # seed with 16 panels so a symmetric integrand cannot fool the first
    # accept test by vanishing at the few points a single panel samples
    stack = []
    for i in range(0, 128, 8):
        x0, xm, x1 = xs[i], xs[i + 4], xs[i + 8]
        f0, fm, f1 = fs[i], fs[i + 4], fs[i + 8]
        est = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1)
        stack.append((x0, x1, f0, fm, f1, est, tol / 16.0))
    total = 0.0
    while stack:
        x0, x1, f0, f12, f1, s, t = stack.pop()
        if evals > max_evals:
            raise QuadratureNotConverged(
                f"adaptive Simpson exceeded {max_evals} evaluations "
                f"(rel_tol={rel_tol:g})"
            )
        xm = 0.5 * (x0 + x1)
        fl = feval(0.5 * (x0 + xm))
        fr = feval(0.5 * (xm + x1))
        left = (xm - x0) / 6.0 * (f0 + 4.0 * fl + f12)
        right = (x1 - xm) / 6.0 * (f12 + 4.0 * fr + f1)
        if abs(left + right - s) <= 15.0 * t:
            total += left + right + (left + right - s) / 15.0
        else:
            stack.append((x0, xm, f0, fl, f12, left, 0.5 * t))
            stack.append((xm, x1, f12, fr, f1, right, 0.5 * t))
    return total


def _resolve_rule(state: AxisState, cfg: QuadratureConfig) -> Rule:
    if cfg.rule is None:
        if state.family in (Family.HARMONIC_OSCILLATOR, Family.GAUSSIAN_PACKET):
            return Rule.GAUSS_HERMITE
        return Rule.GAUSS_LEGENDRE
    if cfg.rule is Rule.GAUSS_HERMITE and state.family not in (
        Family.HARMONIC_OSCILLATOR,
        Family.GAUSSIAN_PACKET,
    ):
        raise ValueError(
            "Gauss-Hermite applies only to oscillator/Gaussian families, "
            f"not {state.family.value}"
        )
    return cfg.rule


# ---------------------------------------------------------------------------
# Density moments
# ---------------------------------------------------------------------------


def _density_moments_gh(state: AxisState, cfg: QuadratureConfig, hbar: float):
    """(norm, <x>, <x^2>) via Gauss-Hermite in the state's scaled variable."""
    xi, w = _gauss_hermite_rule(cfg.points)
    if state.family is Family.HARMONIC_OSCILLATOR:
        alpha = math.sqrt(state.mass * state.omega / hbar)
        dens = hermite_function(state.n, xi) ** 2
        scale = 1.0 / alpha
    else:  # Gaussian packet, xi = x / (sqrt(2) sigma)
        dens = np.exp(-xi * xi) / math.sqrt(math.pi)
        scale = math.sqrt(2.0) * state.sigma
    n0 = float(np.sum(w * dens))
    n1 = float(np.sum(w * dens * xi)) * scale
    n2 = float(np.sum(w * dens * xi * xi)) * scale * scale
    return n0, n1, n2


def _density_moments_nodes(state, hbar, xs, ws):
    psi = eval_psi(state, xs, hbar)
    dens = psi * psi
    n0 = float(np.sum(ws * dens))
    n1 = float(np.sum(ws * dens * xs))
    n2 = float(np.sum(ws * dens * xs * xs))
    return n0, n1, n2


def position_variance_quad(state: AxisState, cfg: QuadratureConfig,
                           hbar: float = 1.0) -> float:
    """<x^2> - <x>^2 by the configured (or family-natural) rule."""
    rule = _resolve_rule(state, cfg)
    if rule is Rule.GAUSS_HERMITE:
        n0, n1, n2 = _density_moments_gh(state, cfg, hbar)
    elif rule is Rule.GAUSS_LEGENDRE:
        a, b = support_interval(state, hbar)
        xs, ws = _legendre_on(a, b, cfg.points)
        n0, n1, n2 = _density_moments_nodes(state, hbar, xs, ws)
    else:
        a, b = support_interval(state, hbar)

        def dens(x):
            p = eval_psi(state, x, hbar)
            return p * p

        n0 = adaptive_simpson(dens, a, b, cfg.rel_tol)
        n1 = adaptive_simpson(lambda x: dens(x) * x, a, b, cfg.rel_tol)
        n2 = adaptive_simpson(lambda x: dens(x) * x * x, a, b, cfg.rel_tol)
    mean = n1 / n0
    return max(n2 / n0 - mean * mean, 0.0)


def _table_derivative(grid: np.ndarray, values: np.ndarray) -> np.ndarray:
    """d(psi)/dx on the grid: 4th-order stencils inside, 2nd-order at the ends."""
    n = len(grid)
    out = np.empty(n)
    h = np.diff(grid)
    if np.allclose(h, h[0], rtol=1e-10, atol=0.0):
        # uniform grid: classic coefficients, vectorized
        dx = h[0]
        out[2:-2] = (values[:-4] - 8.0 * values[1:-3]
                     + 8.0 * values[3:-1] - values[4:]) / (12.0 * dx)
        out[1] = (values[2] - values[0]) / (2.0 * dx)
        out[-2] = (values[-1] - values[-3]) / (2.0 * dx)
        out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * dx)
        out[-1] = (3.0 * values[-1] - 4.0 * values[-2] + values[-3]) / (2.0 * dx)
        return out
    for i in range(n):
        if 2 <= i <= n - 3:
            sel = slice(i - 2, i + 3)
        elif i in (1, n - 2):
            sel = slice(i - 1, i + 2)
        elif i == 0:
            sel = slice(0, 3)
        else:
            sel = slice(n - 3, n)
        out[i] = _fornberg_first(grid[sel], grid[i]) @ values[sel]
    return out


def _fornberg_first(xs: np.ndarray, x0: float) -> np.ndarray:
    """First-derivative finite-difference weights at x0 for arbitrary nodes."""
    n = len(xs)
    c = np.zeros((n, 2))
    c[0, 0] = 1.0
    c1 = 1.0
    c4 = xs[0] - x0
    for i in range(1, n):
        mn = min(i, 1)
        c2 = 1.0
        c5 = c4
        c4 = xs[i] - x0
        for j in range(i):
            c3 = xs[i] - xs[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, 1]


def _check_table_resolution(state: AxisState):
    values = state.values
    signs = np.sign(values[np.abs(values) > 1e-12])
    flips = int(np.sum(signs[1:] != signs[:-1])) if len(signs) > 1 else 0
    # one oscillation = two half-waves; demand 8 points per oscillation
    if len(state.grid) < 4 * (flips + 1):
        raise DerivativeUnstable(
            f"grid has {len(state.grid)} points for {flips + 1} half-waves; "
            "need at least 8 points per oscillation"
        )


def momentum_variance_quad(state: AxisState, cfg: QuadratureConfig,
                           hbar: float = 1.0) -> float:
    """hbar^2 * integral |psi'|^2 dx (central momentum variance, <p> = 0)."""
    rule = _resolve_rule(state, cfg)
    if state.family is Family.TABULATED:
        _check_table_resolution(state)
        dvals = _table_derivative(state.grid, state.values)
        dspline = CubicSpline(state.grid, dvals, bc_type="natural")
        a, b = float(state.grid[0]), float(state.grid[-1])
        if rule is Rule.ADAPTIVE_SIMPSON:
            num = adaptive_simpson(lambda x: dspline(x) ** 2, a, b, cfg.rel_tol)
            den = adaptive_simpson(
                lambda x: eval_psi(state, x, hbar) ** 2, a, b, cfg.rel_tol
            )
        else:
            xs, ws = _legendre_on(a, b, cfg.points)
            dv = dspline(xs)
            psi = eval_psi(state, xs, hbar)
            num = float(np.sum(ws * dv * dv))
            den = float(np.sum(ws * psi * psi))
        return hbar * hbar * max(num / den, 0.0)

    if rule is Rule.GAUSS_HERMITE:
        xi, w = _gauss_hermite_rule(cfg.points)
        if state.family is Family.HARMONIC_OSCILLATOR:
            alpha2 = state.mass * state.omega / hbar
            below, above = _hermite_function_neighbors(state.n, xi)
            dh = (math.sqrt(state.n / 2.0) * below
                  - math.sqrt((state.n + 1) / 2.0) * above)
            num = float(np.sum(w * dh * dh)) * alpha2
            den = float(np.sum(w * hermite_function(state.n, xi) ** 2))
        else:
            s = state.sigma
            dens = np.exp(-xi * xi) / math.sqrt(math.pi)
            x = math.sqrt(2.0) * s * xi
            dpsi_over_psi_sq = (x / (2.0 * s * s)) ** 2
            num = float(np.sum(w * dens * dpsi_over_psi_sq))
            den = float(np.sum(w * dens))
        return hbar * hbar * num / den

    a, b = support_interval(state, hbar)
    if rule is Rule.GAUSS_LEGENDRE:
        xs, ws = _legendre_on(a, b, cfg.points)
        dv = eval_dpsi(state, xs, hbar)
        psi = eval_psi(state, xs, hbar)
        num = float(np.sum(ws * dv * dv))
        den = float(np.sum(ws * psi * psi))
    else:
        num = adaptive_simpson(
            lambda x: eval_dpsi(state, x, hbar) ** 2, a, b, cfg.rel_tol
        )
        den = adaptive_simpson(
            lambda x: eval_psi(state, x, hbar) ** 2, a, b, cfg.rel_tol
        )
    return hbar * hbar * max(num / den, 0.0)


def variance_vectors(
    state: SeparableState3D,
    cfg: QuadratureConfig | None = None,
    hbar: float = 1.0,
    prefer_closed_form: bool = True,
) -> tuple[VarianceVector, VarianceVector]:
    """Per-axis (position, momentum) variance vectors (R2, P2).

    Closed forms are used where the family has them unless
    ``prefer_closed_form`` is False; tabulated axes always integrate.
    Axis failures are re-raised with the failing axis named.
    """
    cfg = cfg or QuadratureConfig()
    r2 = []
    p2 = []
    for axis_name, axis in zip("xyz", state.axes):
        try:
            if prefer_closed_form and axis.family is not Family.TABULATED:
                vx, vp = closed_form_variances(axis, hbar)
            else:
                vx = position_variance_quad(axis, cfg, hbar)
                vp = momentum_variance_quad(axis, cfg, hbar)
        except HiddenAngleError as exc:
            raise type(exc)(f"axis {axis_name}: {exc}") from exc
        r2.append(vx)
        p2.append(vp)
    return VarianceVector.of(*r2), VarianceVector.of(*p2)


# ---------------------------------------------------------------------------
# Monte-Carlo oracle
# ---------------------------------------------------------------------------

_MC_BATCH_CAP = 4_000_000


def _envelope(state: AxisState, hbar: float):
    """Proposal sampler and acceptance test for the density |psi|^2.

    Returns (draw, accept, acceptance_estimate) where accept(xs, us) marks
    proposals xs kept against uniforms us, with the acceptance ratio
    p(x) / (M q(x)) guaranteed <= 1.
    """
    if state.family is Family.INFINITE_WELL:
        # |psi|^2 = (2/L) sin^2 <= 2/L, i.e. exactly twice the uniform pdf
        L = state.width_L
        k = state.n * math.pi / L

        def draw(rng, size):
            return rng.uniform(0.0, L, size)

        def accept(xs, us):
            return us < np.square(np.sin(k * xs))

        return draw, accept, 0.5

    var_x, _ = closed_form_variances(state, hbar)
    spread = 1.2 * math.sqrt(var_x)

    def draw(rng, size):
        return rng.normal(0.0, spread, size)

    def pdf(x):
        return np.exp(-0.5 * (x / spread) ** 2) / (spread * math.sqrt(2.0 * math.pi))

    if state.family is Family.GAUSSIAN_PACKET:
        # density ratio is 1.2 exp(-c x^2): the envelope constant is exact
        c = 0.5 / var_x - 0.5 / (spread * spread)

        def accept(xs, us):
            return us < np.exp(-c * np.square(xs))

        return draw, accept, 1.0 / 1.2

    # oscillator: proposal tails decay slower than |psi|^2 for every n, so
    # the density ratio peaks inside the classically allowed region; scan it
    a, b = support_interval(state, hbar)
    grid = np.linspace(a, b, 4001)
    bound = 1.05 * float(np.max(eval_psi(state, grid, hbar) ** 2 / pdf(grid)))
    alpha = math.sqrt(state.mass * state.omega / hbar)
    n = state.n
    hfun = _hermite_function_fast if n <= 300 else hermite_function

    def accept(xs, us):
        h = hfun(n, alpha * xs)
        return us * (bound * pdf(xs)) < alpha * h * h

    return draw, accept, 1.0 / bound


def mc_variance_oracle(
    state: AxisState, n_samples: int, seed: int, hbar: float = 1.0
) -> tuple[float, float]:
    """Sample positions from |psi|^2 by rejection; return (variance, stderr).

    Deterministic for a fixed seed.  Raises RejectionInefficient if the
    acceptance rate falls below 1e-4.
    """
    if n_samples < 1_000:
        raise ValueError(f"n_samples must be >= 1000, got {n_samples}")
    draw, accept, acc_est = _envelope(state, hbar)
    rng = np.random.default_rng(seed)
    out = np.empty(n_samples)
    filled = 0
    proposals = 0
    accepted = 0
    while filled < n_samples:
        want = n_samples - filled
        batch = int(min(max(want / max(acc_est, 1e-6) * 1.08, 10_000), _MC_BATCH_CAP))
        xs = draw(rng, batch)
        us = rng.uniform(0.0, 1.0, batch)
        kept = xs[accept(xs, us)]
        take = min(len(kept), want)
        out[filled:filled + take] = kept[:take]
        filled += take
        proposals += batch
        accepted += len(kept)
        acc_est = accepted / proposals
        if proposals >= 100_000 and acc_est < 1e-4:
            raise RejectionInefficient(
                f"acceptance rate {acc_est:.2e} after {proposals} proposals"
            )
    mean = float(np.mean(out))
    dev = out - mean
    dev2 = dev * dev
    var = float(np.sum(dev2)) / (n_samples - 1)
    m4 = float(np.mean(dev2 * dev2))
    stderr = math.sqrt(max(m4 - var * var, 0.0) / n_samples)
    return var, stderr
