"""Finite-n logarithmic Sobolev inequalities and their Gaussian limits.

The sphere inequality transported to R^n carries the weight
(1 + |x|^2/n)^(-n).  Fixing k, integrating out the other n - k variables
leaves an inequality on R^k whose weights and constants converge to the
Gaussian log-Sobolev inequality; the same projection applied to the model
measure on the Heisenberg group produces candidate limit measures that are
only explored, not asserted.  Everything Gamma-shaped is computed in log
space so n = 10^6 constants stay finite.

Two kinds of integral engine coexist deliberately: closed Gamma-form
moment formulas for polynomial integrands (deterministic, used for exact
normalization identities and integrability enforcement) and importance-
sampled Monte Carlo for entropy terms (which need a logarithm).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
import scipy.integrate as _spi
import scipy.stats as _sps

from . import exactpoly as xp
from .geometry import heisenberg_fields, heisenberg_variables
from .inequalities import InequalityReport
from .quadrature import (
    IntegralResult,
    QuadratureSpec,
    _mc_result,
    entropy_integrand,
    integrate_heisenberg_mu,
    rng_for,
    sphere_surface_area,
)

_lg = math.lgamma


def lemma_closed_form(m: int, N: float, n: float, x_norm_sq: float) -> float:
    """Fiber integral of (1 + (|x|^2+|y|^2)/n)^(-N) over y in R^m.

    Equals n^(m/2) pi^(m/2) Gamma(N - m/2)/Gamma(N) (1+|x|^2/n)^(m/2 - N);
    the y-integral converges exactly when 2N > m.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if not 2 * N > m:
        raise ValueError(f"need 2N > m for convergence, got N={N}, m={m}")
    if n <= 0:
        raise ValueError("scale n must be positive")
    if x_norm_sq < 0:
        raise ValueError("|x|^2 must be >= 0")
    log = 0.5 * m * (math.log(n) + math.log(math.pi))
    log += _lg(N - m / 2) - _lg(N)
    log += (m / 2 - N) * math.log1p(x_norm_sq / n)
    return math.exp(log)


@dataclass(frozen=True)
class LimitConstants:
    """The five weight-normalization constants at fixed (n, k), in logs.

    cn normalizes (1+|x|^2/n)^(-n) on R^n; d and d_prime arise when the
    last n-k coordinates are integrated out; d_tilde and d_tilde_prime
    are their gradient-weight relatives (exponent shifted by 2).
    """

    n: int
    k: int
    log_cn: float
    log_d: float
    log_d_prime: float
    log_d_tilde: float
    log_d_tilde_prime: float

    @property
    def cn(self) -> float:
        return math.exp(self.log_cn)

    @property
    def d(self) -> float:
        return math.exp(self.log_d)

    @property
    def d_prime(self) -> float:
        return math.exp(self.log_d_prime)

    @property
    def d_tilde(self) -> float:
        return math.exp(self.log_d_tilde)

    @property
    def d_tilde_prime(self) -> float:
        return math.exp(self.log_d_tilde_prime)

    def identity_residuals(self) -> tuple[float, float]:
        """Log-space residuals of d' = cn*d and dtilde' = cn*dtilde."""
        return (
            self.log_d_prime - self.log_cn - self.log_d,
            self.log_d_tilde_prime - self.log_cn - self.log_d_tilde,
        )


def limit_constants(n: int, k: int) -> LimitConstants:
    """All five constants from their Gamma-ratio formulas, in log space."""
    if k < 1 or n <= k:
        raise ValueError(f"need n > k >= 1, got n={n}, k={k}")
    if n <= 2 or n + k <= 4:
        raise ValueError(f"Gamma arguments need n > 2 and n + k > 4, got n={n}, k={k}")
    m = n - k
    lpn = math.log(math.pi) + math.log(n)
    log_cn = -0.5 * n * lpn + _lg(n) - _lg(n / 2)
    log_d = 0.5 * m * lpn + _lg((n + k) / 2) - _lg(n)
    log_d_prime = -0.5 * k * lpn + _lg((n + k) / 2) - _lg(n / 2)
    log_d_tilde = 0.5 * m * lpn + _lg((n + k) / 2 - 2) - _lg(n - 2)
    # the primed tilde constant is defined as the product
    log_d_tilde_prime = log_cn + log_d_tilde
    return LimitConstants(
        n, k, log_cn, log_d, log_d_prime, log_d_tilde, log_d_tilde_prime
    )


@dataclass(frozen=True)
class AsymptoticsTable:
    """Deviations of the projected constants from their Gaussian limits.

    Columns: d'_{n,k} (2pi)^(k/2) - 1 and (dtilde'_{n,k}/4)(2pi)^(k/2) - 1;
    both vanish as n grows.  envelope holds |deviation|*n at the largest n,
    a reported 1/n fit constant, not an assertion.
    """

    k: int
    rows: tuple
    envelope: tuple[float, float]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["n", "d_prime_deviation", "d_tilde_prime_deviation"])
        for row in self.rows:
            w.writerow(list(row))
        return buf.getvalue()


def asymptotics_check(k: int, n_list) -> AsymptoticsTable:
    """Tabulate the Gaussian-limit deviations along increasing n."""
    ns = list(n_list)
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("n_list must be increasing")
    half_log_2pi = 0.5 * k * math.log(2 * math.pi)
    rows = []
    for n in ns:
        lc = limit_constants(n, k)
        dev1 = math.expm1(lc.log_d_prime + half_log_2pi)
        dev2 = math.expm1(lc.log_d_tilde_prime - math.log(4) + half_log_2pi)
        rows.append((n, dev1, dev2))
    n_last, d1, d2 = rows[-1]
    return AsymptoticsTable(k, tuple(rows), (abs(d1) * n_last, abs(d2) * n_last))


def weighted_poly_integral(k: int, n: float, exponent: float, p: xp.MultiPoly) -> float:
    """Integral of a real polynomial against (1+|x|^2/n)^exponent on R^k.

    Closed Gamma form per monomial; odd monomials vanish by symmetry.
    Raises if any monomial (with nonzero coefficient) fails absolute
    integrability, which requires |monomial degree| + k < -2*exponent.
    """
    if len(p.variables) != k:
        raise ValueError(f"polynomial has {len(p.variables)} variables, expected {k}")
    if exponent >= 0:
        raise ValueError("weight exponent must be negative")
    big_m = -exponent
    total = 0.0
    for e, (re, im) in p.terms.items():
        if re == 0 and im == 0:
            continue
        if im != 0:
            raise ValueError("real polynomials only")
        if sum(e) + k >= 2 * big_m:
            raise ValueError(
                f"monomial {e} is not integrable against exponent {exponent} on R^{k}"
            )
        if any(x % 2 for x in e):
            continue
        s = sum(e) // 2
        log = (0.5 * k + s) * math.log(n)
        log += sum(_lg(x // 2 + 0.5) for x in e)
        log += _lg(big_m - s - k / 2) - _lg(big_m)
        total += float(re) * math.exp(log)
    return total


def _poly_batch(f: xp.MultiPoly, k: int):
    if len(f.variables) != k:
        raise ValueError(f"polynomial has {len(f.variables)} variables, expected {k}")
    partials = [xp.differentiate(f, v) for v in f.variables]

    def fv(pts):
        return np.real(xp.evaluate(f, pts))

    def gradsq(pts):
        cols = xp.evaluate_many(partials, pts)
        return sum(np.real(c) ** 2 for c in cols)

    return fv, gradsq


def _callable_batch(f, k: int, grad):
    if grad is not None:
        def gradsq(pts):
            g = np.asarray(grad(pts))
            return np.sum(g * g, axis=1)

    else:
        def gradsq(pts):
            h = 1e-5
            out = np.zeros(len(pts))
            for i in range(k):
                step = np.zeros(k)
                step[i] = h
                diff = (np.asarray(f(pts + step)) - np.asarray(f(pts - step))) / (2 * h)
                out += diff * diff
            return out

    return f, gradsq


def projected_inequality_check(
    k: int, n: int, f, spec: QuadratureSpec, grad=None
) -> InequalityReport:
    """Entropy bound on R^k with the degree-(n+k)/2 projected weights.

    lhs is the weighted entropy of f normalized to unit weighted L^2 norm,
    rhs the gradient term with its exponent-shifted weight.  The sample
    stream is the weight's own probability law (a multivariate t with n
    degrees of freedom; its density equals d'_{n,k} times the weight
    identically), so weight normalization never enters the estimator and
    constants get margin 0 exactly.
    """
    lc = limit_constants(n, k)
    if spec.kind != "monte-carlo":
        raise ValueError("projected checks are Monte Carlo only")
    if isinstance(f, xp.MultiPoly):
        fv, gradsq = _poly_batch(f, k)
    else:
        fv, gradsq = _callable_batch(f, k, grad)
    dist = _sps.multivariate_t(loc=np.zeros(k), shape=np.eye(k), df=n)
    pts = np.asarray(
        dist.rvs(size=spec.size, random_state=rng_for(spec)), dtype=float
    ).reshape(spec.size, k)
    v = np.asarray(fv(pts), dtype=float)
    fsq = v * v
    nsq = float(np.mean(fsq))
    if nsq <= 0:
        raise ValueError("cannot normalize the zero function")
    lognorm = 0.5 * math.log(nsq)
    ratio_const = math.exp(lc.log_d_tilde_prime - lc.log_d_prime) / 4
    ratio = (1 + np.sum(pts * pts, axis=1) / n) ** 2
    rhs_i = ratio_const * np.asarray(gradsq(pts), dtype=float) * ratio
    ent_i = 0.5 * entropy_integrand(np.abs(v))
    u_i = rhs_i - ent_i
    a = float(np.mean(u_i))
    margin = a / nsq + lognorm
    # delta method for g(A, C) = A/C + log(C)/2 on the correlated streams
    cov = np.cov(u_i, fsq) / spec.size
    da = 1 / nsq
    dc = 0.5 / nsq - a / nsq**2
    se = math.sqrt(
        max(da * da * cov[0, 0] + 2 * da * dc * cov[0, 1] + dc * dc * cov[1, 1], 0.0)
    )
    lhs = float(np.mean(ent_i)) / nsq - lognorm
    return InequalityReport(
        lhs,
        float(np.mean(rhs_i)) / nsq,
        margin,
        se,
        {
            "check": "projected-logsob",
            "n": n,
            "k": k,
            "size": spec.size,
            "seed": spec.seed,
            "d_prime": lc.d_prime,
            "d_tilde_prime": lc.d_tilde_prime,
        },
    )


# -- Heisenberg side -----------------------------------------------------------


def _log_heisenberg_constant(n: int) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    return (
        -(n + 1) * math.log(2 * n)
        - (n + 0.5) * math.log(math.pi)
        + _lg(2 * n + 1)
        - _lg(n + 0.5)
    )


def heisenberg_constant(n: int) -> float:
    """Normalizing constant of the model measure on C^n x R (log-space)."""
    return math.exp(_log_heisenberg_constant(n))


def _mu_monomial_log(n: int, big_n: float, a, b: int) -> float:
    # t-part: (2n)^(2b+1) A^(2b+1-2N) G(b+1/2) G(N-b-1/2) / G(N),
    # then the z-part against A^(-M), M = 2N-2b-1
    big_m = 2 * big_n - 2 * b - 1
    s = sum(a)
    log = (2 * b + 1 + n + s) * math.log(2 * n)
    log += _lg(b + 0.5) + _lg(big_n - b - 0.5) - _lg(big_n)
    log += sum(_lg(ai + 0.5) for ai in a)
    log += _lg(big_m - s - n) - _lg(big_m)
    return log


def mu_poly_integral(n: int, exponent: float, p: xp.MultiPoly) -> float:
    """Polynomial integral against ((1+|z|^2/2n)^2 + t^2/4n^2)^exponent.

    Variables are read as (x1, y1, ..., xn, yn, t); exponent is negative.
    Every nonzero monomial must be absolutely integrable: with z-degree E
    and t-degree g this needs g + 1 < -2*exponent and
    E + 2n < -4*exponent - 2g - 2.  Odd monomials then vanish.
    """
    if len(p.variables) != 2 * n + 1:
        raise ValueError(
            f"polynomial has {len(p.variables)} variables, expected {2 * n + 1}"
        )
    if exponent >= 0:
        raise ValueError("weight exponent must be negative")
    big_n = -exponent
    total = 0.0
    for e, (re, im) in p.terms.items():
        if re == 0 and im == 0:
            continue
        if im != 0:
            raise ValueError("real polynomials only")
        g = e[-1]
        zdeg = sum(e[:-1])
        if not (g + 1 < 2 * big_n and zdeg + 2 * n < 4 * big_n - 2 * g - 2):
            raise ValueError(
                f"monomial {e} is not integrable against exponent {exponent}"
            )
        if g % 2 or any(x % 2 for x in e[:-1]):
            continue
        log = _mu_monomial_log(n, big_n, [x // 2 for x in e[:-1]], g // 2)
        total += float(re) * math.exp(log)
    return total


def _model_weight(n: int, big_n: float, zsq: np.ndarray, t: np.ndarray) -> np.ndarray:
    a = 1 + zsq / (2 * n)
    return (a * a + t * t / (4 * n * n)) ** (-big_n)


def integrate_model_measure(
    n: int, exponent: float, f, spec: QuadratureSpec, proposal_exponent: float | None = None
) -> IntegralResult:
    """Integral over C^n x R against the model weight at any exponent.

    The default importance proposal matches the weight itself and requires
    it to be integrable (-2*exponent > n + 1 in z and > 1/2 in t).  For a
    non-integrable weight paired with a decaying integrand, pass a more
    negative proposal_exponent that makes integrand * weight / proposal
    bounded; the caller asserts the decay.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if exponent >= 0:
        raise ValueError("weight exponent must be negative")
    big_n = -exponent
    big_p = -(proposal_exponent if proposal_exponent is not None else exponent)
    df_z = 4 * big_p - 2 - 2 * n
    df_t = 2 * big_p - 1
    if df_z <= 0 or df_t <= 0:
        raise ValueError(
            f"weight exponent {-big_p} is not integrable on C^{n} x R; "
            "supply proposal_exponent for a decaying integrand"
        )
    k = 2 * n
    if spec.kind == "monte-carlo":
        rng = rng_for(spec)
        zdist = _sps.multivariate_t(
            loc=np.zeros(k), shape=(2 * n / df_z) * np.eye(k), df=df_z
        )
        z = np.asarray(zdist.rvs(size=spec.size, random_state=rng)).reshape(
            spec.size, k
        )
        zsq = np.sum(z * z, axis=1)
        a = 1 + zsq / (2 * n)
        tdist = _sps.t(df=df_t)
        tau = tdist.rvs(size=spec.size, random_state=rng)
        scale = 2 * n * a / math.sqrt(df_t)
        t = scale * tau
        pts = np.column_stack([z, t])
        vals = np.asarray(f(pts), dtype=float)
        q = zdist.pdf(z) * tdist.pdf(tau) / scale
        return _mc_result(vals, _model_weight(n, big_n, zsq, t) / q)
    if spec.kind == "adaptive-radial":
        return _model_radial(n, big_n, f)
    raise ValueError(f"kind {spec.kind!r} not supported for the model measure")


def _model_radial(n: int, big_n: float, f) -> IntegralResult:
    from .quadrature import _sphere_product_nodes

    k = 2 * n
    if k == 2:
        ang = np.linspace(0, 2 * math.pi, 64, endpoint=False)
        omega = np.column_stack([np.cos(ang), np.sin(ang)])
        w = np.full(64, 1.0 / 64)
    elif k <= 5:
        omega, w = _sphere_product_nodes(k - 1, 2000)
    else:
        raise ValueError("adaptive-radial supports n <= 2")
    area = sphere_surface_area(k - 1)

    def inner(r: float, t: float) -> float:
        pts = np.column_stack([r * omega, np.full(len(omega), t)])
        return float(np.asarray(f(pts), dtype=float) @ w)

    def radial(r: float) -> float:
        a = 1 + r * r / (2 * n)

        def over_u(u: float) -> float:
            return inner(r, 2 * n * a * u) * (1 + u * u) ** (-big_n)

        val, _ = _spi.quad(over_u, -np.inf, np.inf, limit=200)
        return val * (2 * n) * a ** (1 - 2 * big_n) * area * r ** (k - 1)

    val, _ = _spi.quad(radial, 0, np.inf, limit=200)
    return IntegralResult(val, 0.0, len(w))


def heisenberg_logsob_check(n: int, f: xp.MultiPoly, spec: QuadratureSpec) -> InequalityReport:
    """Model-measure entropy bound on C^n x R for a polynomial f.

    lhs is the normalized entropy against the mass-one weight (exponent
    -(n+1)); rhs couples the horizontal gradient to the exponent -n
    weight.  Norm and gradient terms use the closed Gamma-form moments,
    so only the entropy integral is Monte Carlo.  Monomials that are not
    integrable against their weight raise before any sampling.
    """
    names = heisenberg_variables(n)
    if not isinstance(f, xp.MultiPoly):
        raise TypeError("the polynomial path is the supported one here")
    if f.variables != names:
        raise ValueError(f"variables must be {names}")
    if not f.is_real():
        raise ValueError("real polynomials only")
    c = math.exp(_log_heisenberg_constant(n))
    nsq = c * mu_poly_integral(n, -(n + 1), xp.mul(f, f))
    if nsq <= 0:
        raise ValueError("cannot normalize the zero function")
    gradsq = xp.constant(names, 0)
    for field in heisenberg_fields(n):
        df = xp.apply_operator(field, f)
        gradsq = xp.add(gradsq, xp.mul(df, df))
    rhs = (c / 4) * mu_poly_integral(n, -n, gradsq) / nsq
    lognorm = 0.5 * math.log(nsq)

    def ent(pts):
        v = np.abs(np.real(xp.evaluate(f, pts)))
        return 0.5 * entropy_integrand(v) - lognorm * v * v

    res = integrate_heisenberg_mu(n, ent, spec)
    lhs = c * res.value / nsq
    se = c * res.std_error / nsq
    return InequalityReport(
        lhs,
        rhs,
        rhs - lhs,
        se,
        {
            "check": "heisenberg-logsob",
            "n": n,
            "size": spec.size,
            "seed": spec.seed,
            "constant": c,
        },
    )


# -- the projected Heisenberg integral and its limit ---------------------------


@dataclass(frozen=True)
class RadialIntegralParams:
    """Arguments of the fiber integral over v in C^m at fixed (u, t).

    The weight is ((1 + (|u|^2+|v|^2)/(2n))^2 + t^2/(2n)^2)^(-N); the
    derived quantities A, C, D, beta parametrize its radial rewrite.
    """

    N: float
    m: int
    n: float
    u_norm_sq: float
    t: float

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.n <= 0:
            raise ValueError("scale n must be positive")
        if self.u_norm_sq < 0:
            raise ValueError("|u|^2 must be >= 0")

    @property
    def A(self) -> float:
        return 1 + self.u_norm_sq / (2 * self.n)

    @property
    def C(self) -> float:
        return self.t**2 / (2 * self.n) ** 2

    @property
    def D(self) -> float:
        return self.C / self.A**2

    @property
    def beta(self) -> float:
        return (1 + self.D) ** -0.5


def _rewritten_radial_factor(m: int, N: float, beta: float) -> float:
    val, _ = _spi.quad(
        lambda x: (x * x + 2 * beta * x + 1) ** (-N) * x ** (m - 1),
        0,
        np.inf,
        limit=200,
    )
    return val


def radial_integral_I(
    params: RadialIntegralParams, spec: QuadratureSpec | None = None
) -> tuple[float, float]:
    """The v-fiber integral two ways: direct quadrature and the rewrite.

    direct reduces over spheres in C^m; rewritten is the closed prefactor
    (2n)^m A^(m-2N) (2 pi^m/Gamma(m)) (1/2)(1+D)^(m/2-N) times the
    one-dimensional x-integral of (x^2+2 beta x+1)^(-N) x^(m-1).
    At t = 0 that x-integral is the beta function B(m, 2N-m).
    """
    m, N, n = params.m, params.N, params.n
    if not 2 * N > m:
        raise ValueError(f"need 2N > m for convergence, got N={N}, m={m}")
    if spec is not None and spec.kind not in ("adaptive-radial", "monte-carlo"):
        raise ValueError(f"kind {spec.kind!r} not supported here")
    usq, tsq = params.u_norm_sq, params.t**2

    def profile(r):
        base = 1 + (usq + r * r) / (2 * n)
        return (base * base + tsq / (4 * n * n)) ** (-N)

    area = 2 * math.pi**m / math.gamma(m)
    direct, _ = _spi.quad(
        lambda r: profile(r) * r ** (2 * m - 1), 0, np.inf, limit=200
    )
    direct *= area
    pref = (
        (2 * n) ** m
        * params.A ** (m - 2 * N)
        * area
        * 0.5
        * (1 + params.D) ** (m / 2 - N)
    )
    rewritten = pref * _rewritten_radial_factor(m, N, params.beta)
    return direct, rewritten


def _log_radial_integral(m: int, N: float, n: float, u_norm_sq: float, t: float) -> float:
    """log of the fiber integral, robust for N ~ m ~ 10^4.

    Uses the rewrite with the x-integral in log space: substitute x = e^s
    and shift by the peak of m*s - N*log(e^2s + 2 beta e^s + 1).
    """
    p = RadialIntegralParams(N, m, n, u_norm_sq, t)
    if not 2 * N > m:
        raise ValueError(f"need 2N > m, got N={N}, m={m}")
    beta = p.beta

    def neg_logw(s: float) -> float:
        # -(m*s - N*log(x^2+2bx+1)) at x = e^s; the m*s already carries
        # the x^(m-1) dx = x^m ds substitution
        big = np.logaddexp(2 * s, math.log(2 * beta) + s)
        big = np.logaddexp(big, 0.0)
        return -(m * s - N * big)

    # locate the peak by ternary search; neg_logw is unimodal in s
    lo, hi = -40.0, 40.0
    for _ in range(200):
        m1 = lo + (hi - lo) / 3
        m2 = hi - (hi - lo) / 3
        if neg_logw(m1) < neg_logw(m2):
            hi = m2
        else:
            lo = m1
    smax = 0.5 * (lo + hi)
    f0 = -neg_logw(smax)

    def shifted(s: float) -> float:
        return math.exp(-neg_logw(s) - f0)

    # peak at an interval endpoint so the adaptive rule cannot step over it
    left, _ = _spi.quad(shifted, smax - 60, smax, limit=400)
    right, _ = _spi.quad(shifted, smax, smax + 60, limit=400)
    log_j = f0 + math.log(left + right)
    log_pref = (
        m * math.log(2 * n)
        + (m - 2 * N) * math.log(p.A)
        + math.log(2) + m * math.log(math.pi) - _lg(m)
        + math.log(0.5)
        + (m / 2 - N) * math.log1p(p.D)
    )
    return log_pref + log_j


@dataclass(frozen=True)
class CrLimitTable:
    """Pointwise comparison of the projected model measures with their
    common Gaussian limit; exploration only, nothing here is an inequality.

    Ratios are density / ((2pi)^(-k) exp(-|u|^2/2) / (4 sqrt(pi))), the
    limit the Gamma-ratio asymptotics force; it is flat in t, so the mass
    in t spreads rather than concentrating.  norm_check is the measured
    total mass of the entropy-side measure (Monte Carlo over the full
    space), None where skipped.
    """

    k: int
    rows: tuple

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["n", "u_norm_sq", "t", "nu_ratio", "rho_ratio", "rho_tilde_ratio", "norm_check"])
        for row in self.rows:
            w.writerow(["" if x is None else x for x in row])
        return buf.getvalue()


def cr_limit_table(
    k: int,
    n_list,
    u_sq_values=(0.0, 1.0, 4.0),
    t_values=(0.0, 1.0),
    norm_spec: QuadratureSpec | None = None,
    norm_max_n: int = 200,
) -> CrLimitTable:
    """Ratios of the three projected measures to their Gaussian limit.

    nu comes from the exponent -(n+1) fiber integral, rho from -n, and
    rho_tilde from the |v|^2-weighted -n integral (an m+1 fiber integral
    times m/pi), each with its display normalization.  All three converge
    pointwise to (2pi)^(-k) exp(-|u|^2/2)/(4 sqrt(pi)) at 1/n speed.  The
    mass check integrates the full model measure when a Monte Carlo spec
    is given and n is small enough for that to be cheap.
    """
    rows = []
    for n in n_list:
        m = n - k
        if m < 1:
            raise ValueError(f"need n > k, got n={n}, k={k}")
        log_c = _log_heisenberg_constant(n)
        norm = None
        if norm_spec is not None and n <= norm_max_n:
            res = integrate_heisenberg_mu(n, lambda p: np.ones(len(p)), norm_spec)
            norm = math.exp(log_c) * res.value
        for usq in u_sq_values:
            for t in t_values:
                log_gauss = (
                    -k * math.log(2 * math.pi)
                    - usq / 2
                    - math.log(4)
                    - 0.5 * math.log(math.pi)
                )
                log_nu = 0.5 * math.log(n) + log_c + _log_radial_integral(
                    m, n + 1, n, usq, t
                )
                log_rho = (
                    0.5 * math.log(n)
                    + log_c
                    - math.log(4)
                    + _log_radial_integral(m, n, n, usq, t)
                )
                log_rho_tilde = (
                    log_c
                    - math.log(8) - 0.5 * math.log(n)
                    + math.log(m) - math.log(math.pi)
                    + _log_radial_integral(m + 1, n, n, usq, t)
                )
                rows.append(
                    (
                        n,
                        usq,
                        t,
                        math.exp(log_nu - log_gauss),
                        math.exp(log_rho - log_gauss),
                        math.exp(log_rho_tilde - log_gauss),
                        norm,
                    )
                )
    return CrLimitTable(k, tuple(rows))
