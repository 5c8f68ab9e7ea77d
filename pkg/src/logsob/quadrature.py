"""Reproducible quadrature on spheres, Gauss space, weighted R^k, and mu_n.

All integrands are batch functions: they take an (N, dim) array of points
and return an (N,) array of values.  Monte Carlo streams come from the
counter-based Philox generator keyed by the spec seed, so a result is a
pure function of (integrand, spec) down to the bit.

Importance-sampling densities are taken from scipy.stats rather than from
the closed forms derived elsewhere in this package; the Monte Carlo
normalizations are thereby independent of the formulas they are used to
verify.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate as _spi
from scipy import stats as _sps
from scipy.special import roots_jacobi

KINDS = ("monte-carlo", "sphere-product-rule", "gauss-hermite", "adaptive-radial")

DEFAULT_SPHERE_SIZE = 200_000
DEFAULT_HEISENBERG_SIZE = 100_000

TINY = 1e-300  # entropy guard threshold


@dataclass(frozen=True)
class QuadratureSpec:
    kind: str = "monte-carlo"
    size: int = DEFAULT_SPHERE_SIZE
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown quadrature kind {self.kind!r}")
        if self.size < 1:
            raise ValueError("size must be >= 1")
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must fit in 64 bits")

    def to_json(self) -> str:
        return json.dumps({"kind": self.kind, "size": self.size, "seed": self.seed})

    @classmethod
    def from_json(cls, blob) -> "QuadratureSpec":
        data = json.loads(blob) if isinstance(blob, str) else dict(blob)
        return cls(**{k: data[k] for k in ("kind", "size", "seed") if k in data})


@dataclass(frozen=True)
class IntegralResult:
    value: float
    std_error: float
    nodes_used: int

    def __post_init__(self):
        if self.std_error < 0:
            raise ValueError("std_error must be >= 0")


def rng_for(spec: QuadratureSpec) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(spec.seed)))


def _check_finite(vals: np.ndarray, pts: np.ndarray) -> None:
    bad = ~np.isfinite(vals)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise ValueError(
            f"integrand returned {vals[i]!r} at point {pts[i].tolist()}"
        )


def _mc_result(vals: np.ndarray, weights: np.ndarray | None = None) -> IntegralResult:
    if weights is not None:
        vals = vals * weights
    n = len(vals)
    mean = float(np.mean(vals))
    sem = float(np.std(vals, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return IntegralResult(mean, sem, n)


def sample_sphere(d: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points on S^d via normalized Gaussian directions."""
    pts = rng.standard_normal((size, d + 1))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def sphere_surface_area(d: int) -> float:
    """Area of the unit d-sphere in R^(d+1)."""
    return 2 * math.pi ** ((d + 1) / 2) / math.gamma((d + 1) / 2)


def sphere_monomial_moment(d: int, expo) -> Fraction:
    """Exact normalized moment of a monomial over S^d.

    For even exponents 2b the value is prod (2b_i - 1)!! over
    m (m+2) ... (m+2s-2), with m = d+1 and s = sum b_i; odd exponents
    integrate to zero.
    """
    expo = tuple(int(e) for e in expo)
    if len(expo) != d + 1:
        raise ValueError(f"need {d + 1} exponents, got {len(expo)}")
    if any(e < 0 for e in expo):
        raise ValueError("exponents must be >= 0")
    if any(e % 2 for e in expo):
        return Fraction(0)
    m = d + 1
    s = sum(expo) // 2
    num = 1
    for e in expo:
        for odd in range(1, e, 2):
            num *= odd
    den = 1
    for i in range(s):
        den *= m + 2 * i
    return Fraction(num, den)


def _sphere_product_nodes(d: int, size: int) -> tuple[np.ndarray, np.ndarray]:
    if d > 4:
        raise ValueError("sphere-product-rule supports d <= 4")
    m = max(2, round(size ** (1.0 / d)))
    axes: list[tuple[np.ndarray, np.ndarray]] = []
    for i in range(1, d):
        a = (d - i - 1) / 2.0  # weight (1-u^2)^a after u = cos(theta)
        u, w = roots_jacobi(m, a, a)
        axes.append((u, w))
    phi = 2 * math.pi * (np.arange(m) + 0.5) / m
    nodes = np.ones((1, 1))
    weights = np.ones(1)
    sines = np.ones(1)
    for u, w in axes:
        k = len(weights)
        new_nodes = np.empty((k * m, nodes.shape[1] + 1))
        new_w = np.empty(k * m)
        new_s = np.empty(k * m)
        for j in range(m):
            seg = slice(j * k, (j + 1) * k)
            new_nodes[seg, :-1] = nodes
            new_nodes[seg, -1] = sines * u[j]
            new_w[seg] = weights * w[j]
            new_s[seg] = sines * math.sqrt(max(0.0, 1 - u[j] ** 2))
        nodes, weights, sines = new_nodes, new_w, new_s
    k = len(weights)
    out = np.empty((k * m, d + 1))
    out_w = np.empty(k * m)
    for j in range(m):
        seg = slice(j * k, (j + 1) * k)
        out[seg, : d - 1] = nodes[:, 1:]
        out[seg, d - 1] = sines * math.cos(phi[j])
        out[seg, d] = sines * math.sin(phi[j])
        out_w[seg] = weights
    out_w = out_w / np.sum(out_w)  # normalized measure, exactly
    return out, out_w


def integrate_sphere(d: int, f, spec: QuadratureSpec) -> IntegralResult:
    """Integral over S^d against the normalized rotation-invariant measure."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if spec.kind == "monte-carlo":
        pts = sample_sphere(d, spec.size, rng_for(spec))
        vals = np.asarray(f(pts), dtype=float)
        _check_finite(vals, pts)
        return _mc_result(vals)
    if spec.kind == "sphere-product-rule":
        pts, w = _sphere_product_nodes(d, spec.size)
        vals = np.asarray(f(pts), dtype=float)
        _check_finite(vals, pts)
        return IntegralResult(float(vals @ w), 0.0, len(w))
    raise ValueError(f"kind {spec.kind!r} not supported on the sphere")


def integrate_gauss(k: int, f, spec: QuadratureSpec) -> IntegralResult:
    """Integral against the standard Gauss measure on R^k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if spec.kind == "monte-carlo":
        pts = rng_for(spec).standard_normal((spec.size, k))
        vals = np.asarray(f(pts), dtype=float)
        _check_finite(vals, pts)
        return _mc_result(vals)
    if spec.kind == "gauss-hermite":
        if k > 4:
            raise ValueError("gauss-hermite tensor rule supports k <= 4")
        m = min(200, max(2, round(spec.size ** (1.0 / k))))
        x, w = np.polynomial.hermite_e.hermegauss(m)
        w = w / math.sqrt(2 * math.pi)
        grids = np.meshgrid(*([x] * k), indexing="ij")
        pts = np.column_stack([g.ravel() for g in grids])
        wgrid = np.ones(len(pts))
        for axis in range(k):
            wgrid *= w[np.meshgrid(*([np.arange(m)] * k), indexing="ij")[axis].ravel()]
        vals = np.asarray(f(pts), dtype=float)
        _check_finite(vals, pts)
        return IntegralResult(float(vals @ wgrid), 0.0, len(pts))
    raise ValueError(f"kind {spec.kind!r} not supported for Gauss measure")


def integrate_weighted_rn(
    k: int, n_parameter: float, exponent: float, f, spec: QuadratureSpec
) -> IntegralResult:
    """Integral of f(x) (1 + |x|^2/n)^exponent over R^k.

    Needs 2|exponent| > k so the weight alone is integrable; Monte Carlo
    importance-samples from the multivariate t distribution matching the
    weight, with its density taken from scipy.stats.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    nn = float(n_parameter)
    expo = float(exponent)
    if nn <= 0:
        raise ValueError("n-parameter must be positive")
    dof = -2 * expo - k
    if dof <= 0:
        raise ValueError(
            f"weight (1+|x|^2/{nn})^{expo} is not integrable on R^{k}"
        )
    if spec.kind == "monte-carlo":
        dist = _sps.multivariate_t(
            loc=np.zeros(k), shape=(nn / dof) * np.eye(k), df=dof
        )
        rng = rng_for(spec)
        pts = np.asarray(
            dist.rvs(size=spec.size, random_state=rng), dtype=float
        ).reshape(spec.size, k)
        vals = np.asarray(f(pts), dtype=float)
        _check_finite(vals, pts)
        weight = (1 + np.sum(pts * pts, axis=1) / nn) ** expo
        return _mc_result(vals, weight / dist.pdf(pts))
    if spec.kind == "adaptive-radial":
        return _weighted_rn_radial(k, nn, expo, f)
    raise ValueError(f"kind {spec.kind!r} not supported for weighted R^k")


def _weighted_rn_radial(k: int, nn: float, expo: float, f) -> IntegralResult:
    if k == 1:
        val, err = _spi.quad(
            lambda x: float(f(np.array([[x]]))[0]) * (1 + x * x / nn) ** expo,
            -np.inf,
            np.inf,
        )
        return IntegralResult(val, 0.0, 0)
    if k > 5:
        raise ValueError("adaptive-radial supports k <= 5")
    omega, w = _sphere_product_nodes(k - 1, 2000)
    area = sphere_surface_area(k - 1)

    def radial(r: float) -> float:
        vals = np.asarray(f(r * omega), dtype=float)
        return float(vals @ w) * area * r ** (k - 1) * (1 + r * r / nn) ** expo

    val, err = _spi.quad(radial, 0, np.inf, limit=200)
    return IntegralResult(val, 0.0, len(w))


def mu_density(n: int, z_sq: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Density ((1+|z|^2/2n)^2 + t^2/4n^2)^(-n-1) of the model measure."""
    a = 1 + z_sq / (2 * n)
    return (a * a + t * t / (4 * n * n)) ** (-(n + 1))


def integrate_heisenberg_mu(n: int, f, spec: QuadratureSpec) -> IntegralResult:
    """Integral over C^n x R against mu_n.

    The integrand receives points as (N, 2n+1) arrays, z interleaved as
    (x1, y1, ..., xn, yn) with t last.  Monte Carlo factorizes the
    importance density as (multivariate t in z) x (scaled t in tau),
    where t = 2n (1+|z|^2/2n) tau / sqrt(2n+1).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    k = 2 * n
    if spec.kind == "monte-carlo":
        rng = rng_for(spec)
        zdist = _sps.multivariate_t(
            loc=np.zeros(k), shape=(2 * n / (2 * n + 2)) * np.eye(k), df=2 * n + 2
        )
        z = np.asarray(zdist.rvs(size=spec.size, random_state=rng)).reshape(
            spec.size, k
        )
        zsq = np.sum(z * z, axis=1)
        a = 1 + zsq / (2 * n)
        tau = _sps.t(df=2 * n + 1).rvs(size=spec.size, random_state=rng)
        scale = 2 * n * a / math.sqrt(2 * n + 1)
        t = scale * tau
        pts = np.column_stack([z, t])
        vals = np.asarray(f(pts), dtype=float)
        _check_finite(vals, pts)
        q = zdist.pdf(z) * _sps.t(df=2 * n + 1).pdf(tau) / scale
        return _mc_result(vals, mu_density(n, zsq, t) / q)
    if spec.kind == "adaptive-radial":
        return _heisenberg_radial(n, f)
    raise ValueError(f"kind {spec.kind!r} not supported for the model measure")


def _heisenberg_radial(n: int, f) -> IntegralResult:
    # deterministic second path: angular average in z, then (r, t) plane
    k = 2 * n
    if k == 2:
        omega = np.column_stack(
            [np.cos(np.linspace(0, 2 * math.pi, 64, endpoint=False))]
            + [np.sin(np.linspace(0, 2 * math.pi, 64, endpoint=False))]
        )
        w = np.full(64, 1.0 / 64)
    elif k <= 5:
        omega, w = _sphere_product_nodes(k - 1, 2000)
    else:
        raise ValueError("adaptive-radial supports n <= 2")
    area = sphere_surface_area(k - 1)

    def inner(r: float, t: float) -> float:
        pts = np.column_stack([r * omega, np.full(len(omega), t)])
        vals = np.asarray(f(pts), dtype=float)
        return float(vals @ w)

    def radial(r: float) -> float:
        # substitute t = 2n a u so the inner integral has unit scale
        a = 1 + r * r / (2 * n)

        def over_u(u: float) -> float:
            return inner(r, 2 * n * a * u) * (1 + u * u) ** (-(n + 1))

        val, _ = _spi.quad(over_u, -np.inf, np.inf, limit=200)
        return val * (2 * n) * a ** (-(2 * n + 1)) * area * r ** (k - 1)

    val, _ = _spi.quad(radial, 0, np.inf, limit=200)
    return IntegralResult(val, 0.0, len(w))


def entropy_integrand(vals: np.ndarray) -> np.ndarray:
    """v^2 log(v^2) with the continuous extension 0 log 0 = 0."""
    vals = np.asarray(vals, dtype=float)
    out = np.zeros_like(vals)
    mask = np.abs(vals) >= TINY
    v = vals[mask]
    out[mask] = v * v * np.log(v * v)
    return out
