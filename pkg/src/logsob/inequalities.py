"""Entropy bounds on spheres: the sharp logarithmic Sobolev inequality and
its relatives.

The central objects are band-limited functions (finite sums of exactly
harmonic components, labeled by K-type where labels exist) and inequality
reports carrying lhs, rhs, margin and a standard error.  The decisive
cross-validation is dirichlet_form_spectral == dirichlet_form_geometric:
the first is exact rational arithmetic from the eigenvalue formulas, the
second is quadrature of the squared horizontal gradient, so agreement
pins the frame realization to the spectral side.

Component L2 norms are exact (sphere monomial moments over Fractions),
which keeps the norm terms of every inequality noise-free; only entropy
and gradient integrals carry Monte Carlo error, and reports estimate
margins from a single common sample stream so the error bars are the
correlated ones.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import exactpoly as xp
from .geometry import vertical_matrices
from .quadrature import (
    QuadratureSpec,
    entropy_integrand,
    integrate_gauss,
    integrate_heisenberg_mu,
    integrate_sphere,
    rng_for,
    sample_sphere,
    sphere_monomial_moment,
)
from .spectra import CaseId, KTypeLabel, deltab_eigenvalue


def sphere_variables(case: CaseId) -> tuple[str, ...]:
    return tuple(f"x{i}" for i in range(case.ambient_dim))


def sphere_l2_pairing(a: xp.MultiPoly, b: xp.MultiPoly, d: int) -> tuple[Fraction, Fraction]:
    """Exact integral of a * conj(b) over S^d, as (real, imag) Fractions."""
    prod = xp.mul(a, xp.conjugate(b))
    re = Fraction(0)
    im = Fraction(0)
    for e, (cre, cim) in prod.terms.items():
        m = sphere_monomial_moment(d, e)
        re += cre * m
        im += cim * m
    return re, im


def sphere_l2_norm_sq(h: xp.MultiPoly, d: int) -> Fraction:
    re, im = sphere_l2_pairing(h, h, d)
    if im != 0:
        raise ValueError("norm came out non-real; broken component")
    return re


@lru_cache(maxsize=None)
def _vertical_mats(case: CaseId) -> np.ndarray:
    return vertical_matrices(case)


@lru_cache(maxsize=None)
def _clifford_mats(convention: str) -> np.ndarray:
    from .geometry import octonion_clifford_matrices

    return octonion_clifford_matrices(convention)


def horizontal_gradient_sq_batch(
    case: CaseId, grads: np.ndarray, pts: np.ndarray, convention: str = "cyclic"
) -> np.ndarray:
    """|grad_b f|^2 at each point from ambient gradient rows.

    Complex gradients are handled through their real and imaginary parts.
    Linear-vertical families subtract the radial and vertical components
    from the full gradient; the octonionic one sums the squares against
    the Clifford span of the horizontal space instead.
    """
    if case.family == "octonionic":
        cxi = [pts @ c for c in _clifford_mats(convention)]

        def hsq(g: np.ndarray) -> np.ndarray:
            out = -np.sum(g * pts, axis=1) ** 2
            for v in cxi:
                out = out + np.sum(g * v, axis=1) ** 2
            return out

    else:
        mats = _vertical_mats(case)

        def hsq(g: np.ndarray) -> np.ndarray:
            out = np.sum(g * g, axis=1) - np.sum(g * pts, axis=1) ** 2
            for m in mats:
                v = pts @ m.T
                out = out - np.sum(g * v, axis=1) ** 2
            return out

    if np.iscomplexobj(grads):
        return hsq(np.ascontiguousarray(grads.real)) + hsq(
            np.ascontiguousarray(grads.imag)
        )
    return hsq(grads)


@dataclass(frozen=True)
class BandLimitedFunction:
    """Finite sum of harmonic components with exact per-component norms.

    Labels are KTypeLabel for the real and complex families; for the
    quaternionic and octonionic families plain integer degrees are used
    unless the caller supplies genuine labels.
    """

    case: CaseId
    components: tuple
    total: xp.MultiPoly = field(repr=False)
    norms: tuple = ()

    @classmethod
    def from_components(cls, case: CaseId, comps) -> "BandLimitedFunction":
        vs = sphere_variables(case)
        d = case.sphere_dim
        checked = []
        norms = []
        total = xp.constant(vs, 0)
        for label, h in comps:
            if h.variables != vs:
                raise ValueError(f"component variables {h.variables} != {vs}")
            if h.is_zero():
                continue
            if not xp.is_homogeneous_in(h, vs):
                raise ValueError("components must be homogeneous")
            if not xp.euclidean_laplacian(h, vs).is_zero():
                raise ValueError("components must be harmonic")
            deg = xp.degree_in(h, vs)
            if isinstance(label, KTypeLabel):
                if label.family != case.family:
                    raise ValueError("label family mismatch")
                if label.degree != deg:
                    raise ValueError(f"label degree {label.degree} != {deg}")
                if case.family == "complex":
                    split = xp.bidegree_split(h)
                    if set(split) != {(label.a, label.b)}:
                        raise ValueError(
                            f"component is not pure bidegree {(label.a, label.b)}"
                        )
            elif isinstance(label, int):
                if case.family in ("real", "complex"):
                    raise ValueError(
                        f"{case.family} components need KTypeLabel labels"
                    )
                if label != deg:
                    raise ValueError(f"degree label {label} != {deg}")
            else:
                raise TypeError(f"bad label {label!r}")
            checked.append((label, h))
            norms.append(sphere_l2_norm_sq(h, d))
            total = xp.add(total, h)
        if not checked:
            raise ValueError("need at least one nonzero component")
        labels = [l for l, _ in checked]
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate component label")
        return cls(case, tuple(checked), total, tuple(norms))

    @property
    def norm_sq(self) -> Fraction:
        # distinct labels are L2-orthogonal, so norms add
        return sum(self.norms, Fraction(0))

    @property
    def is_real(self) -> bool:
        return self.total.is_real()

    def values(self, pts: np.ndarray) -> np.ndarray:
        return xp.evaluate(self.total, pts)

    def gradient(self, pts: np.ndarray) -> np.ndarray:
        partials = [xp.differentiate(self.total, v) for v in self.total.variables]
        cols = xp.evaluate_many(partials, pts)
        return np.column_stack(cols)

    def map_components(self, factor) -> "BandLimitedFunction":
        """New function with each component scaled by factor(label)."""
        comps = [
            (label, xp.scale(h, Fraction(float(factor(label)))))
            for label, h in self.components
        ]
        return BandLimitedFunction.from_components(self.case, comps)


def constant_function(case: CaseId, c) -> BandLimitedFunction:
    label = {
        "real": KTypeLabel("real", 0),
        "complex": KTypeLabel("complex", 0, 0),
    }.get(case.family, 0)
    return BandLimitedFunction.from_components(
        case, [(label, xp.constant(sphere_variables(case), c))]
    )


# sparse harmonic seed families; every entry is exactly harmonic
def _sparse_harmonics(vs, deg: int, rng: np.random.Generator) -> xp.MultiPoly:
    dim = len(vs)

    def mono(pairs):
        e = [0] * dim
        for i, p in pairs:
            e[i] += p
        return tuple(e)

    def distinct(k):
        return [int(i) for i in rng.choice(dim, size=k, replace=False)]

    if deg == 0:
        return xp.constant(vs, 1)
    if deg == 1:
        return xp.poly(vs, {mono([(distinct(1)[0], 1)]): 1})
    if deg == 2:
        i, j = distinct(2)
        if rng.integers(2):
            return xp.poly(vs, {mono([(i, 1), (j, 1)]): 1})
        return xp.poly(vs, {mono([(i, 2)]): 1, mono([(j, 2)]): -1})
    if deg == 3:
        if dim >= 3 and rng.integers(2):
            i, j, k = distinct(3)
            return xp.poly(vs, {mono([(i, 1), (j, 1), (k, 1)]): 1})
        i, j = distinct(2)
        return xp.poly(vs, {mono([(i, 3)]): 1, mono([(i, 1), (j, 2)]): -3})
    if deg == 4:
        pick = rng.integers(3 if dim >= 4 else 2)
        if pick == 0:
            i, j = distinct(2)
            return xp.poly(
                vs, {mono([(i, 3), (j, 1)]): 1, mono([(i, 1), (j, 3)]): -1}
            )
        if pick == 1:
            i, j = distinct(2)
            return xp.poly(
                vs,
                {
                    mono([(i, 4)]): 1,
                    mono([(i, 2), (j, 2)]): -6,
                    mono([(j, 4)]): 1,
                },
            )
        i, j, k, l = distinct(4)
        return xp.poly(
            vs,
            {
                mono([(i, 2), (j, 1), (k, 1)]): 1,
                mono([(l, 2), (j, 1), (k, 1)]): -1,
            },
        )
    raise ValueError(f"no sparse family for degree {deg}")


def random_band_limited(
    case: CaseId, seed: int, max_degree: int = 4, blocks_per_degree: int = 6
) -> BandLimitedFunction:
    """Reproducible random test function with coefficients in [-1, 1].

    Each degree up to max_degree gets a random combination of sparse
    harmonic seeds; the result is decomposed into labeled components
    (bidegree-refined in the complex case, degree-labeled in the
    quaternionic and octonionic ones).
    """
    rng = np.random.default_rng(seed)
    vs = sphere_variables(case)
    by_degree: dict[int, xp.MultiPoly] = {}
    for deg in range(min(max_degree, 4) + 1):
        acc = xp.constant(vs, 0)
        for _ in range(1 if deg == 0 else blocks_per_degree):
            c = Fraction(int(rng.integers(-100, 101)), 100)
            acc = xp.add(acc, xp.scale(_sparse_harmonics(vs, deg, rng), c))
        if not acc.is_zero():
            by_degree[deg] = acc
    if not by_degree:
        by_degree[0] = xp.constant(vs, 1)

    comps: list[tuple] = []
    for deg, h in sorted(by_degree.items()):
        if case.family == "real":
            comps.append((KTypeLabel("real", deg), h))
        elif case.family == "complex":
            for (p, q), part in sorted(xp.bidegree_split(h).items()):
                comps.append((KTypeLabel("complex", p, q), part))
        else:
            comps.append((deg, h))
    return BandLimitedFunction.from_components(case, comps)


@dataclass(frozen=True)
class InequalityReport:
    lhs: float
    rhs: float
    margin: float
    std_error: float
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not math.isfinite(self.margin):
            raise ValueError("margin must be finite")
        if self.std_error < 0:
            raise ValueError("std_error must be >= 0")

    def holds(self, sigmas: float = 3.0, atol: float = 1e-12) -> bool:
        return self.margin >= -(sigmas * self.std_error + atol)

    def to_json(self) -> str:
        return json.dumps(
            {
                "lhs": self.lhs,
                "rhs": self.rhs,
                "margin": self.margin,
                "std_error": self.std_error,
                "metadata": self.metadata,
            }
        )


def _meta(case: CaseId | None, spec: QuadratureSpec, **extra) -> dict:
    out = {"kind": spec.kind, "size": spec.size, "seed": spec.seed}
    if case is not None:
        out["case"] = case.family
        out["n"] = case.n
    out.update(extra)
    return out


def _sphere_stream(d: int, spec: QuadratureSpec):
    """Common sample stream: points plus weights (None = equal MC weights)."""
    if spec.kind == "monte-carlo":
        return sample_sphere(d, spec.size, rng_for(spec)), None
    if spec.kind == "sphere-product-rule":
        from .quadrature import _sphere_product_nodes

        return _sphere_product_nodes(d, spec.size)
    raise ValueError(f"kind {spec.kind!r} not usable for sphere reports")


def _wmean_se(vals: np.ndarray, w: np.ndarray | None) -> tuple[float, float]:
    if w is None:
        n = len(vals)
        se = float(np.std(vals, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        return float(np.mean(vals)), se
    return float(vals @ w), 0.0


def entropy_functional(f, context, spec: QuadratureSpec, subtract_norm_term: bool = False) -> float:
    """Integral of |f|^2 log|f| for the given measure context.

    context is ("sphere", d), ("gauss", k) or ("heisenberg", n).  With
    subtract_norm_term the value ||f||^2 log||f|| (same quadrature) is
    removed, giving the left side of the inequality in closed form.
    """
    what, param = context
    integrator = {
        "sphere": integrate_sphere,
        "gauss": integrate_gauss,
        "heisenberg": integrate_heisenberg_mu,
    }[what]
    fv = f.values if isinstance(f, BandLimitedFunction) else f

    def ent(pts):
        return 0.5 * entropy_integrand(np.abs(np.asarray(fv(pts))))

    value = integrator(param, ent, spec).value
    if subtract_norm_term:
        nsq = integrator(param, lambda p: np.abs(np.asarray(fv(p))) ** 2, spec).value
        if nsq <= 0:
            raise ValueError("cannot normalize the zero function")
        value -= nsq * 0.5 * math.log(nsq)
    return value


def dirichlet_form_geometric(
    case: CaseId, f: BandLimitedFunction, spec: QuadratureSpec, convention: str = "cyclic"
):
    """Quadrature of |grad_b f|^2 over the normalized sphere measure."""

    def integrand(pts):
        return horizontal_gradient_sq_batch(case, f.gradient(pts), pts, convention)

    return integrate_sphere(case.sphere_dim, integrand, spec)


def dirichlet_form_spectral_exact(case: CaseId, f: BandLimitedFunction) -> Fraction:
    out = Fraction(0)
    for (label, _), nsq in zip(f.components, f.norms):
        if not isinstance(label, KTypeLabel):
            raise ValueError(
                "spectral form needs K-type labels; this function only has degrees"
            )
        out += deltab_eigenvalue(case, label) * nsq
    return out


def dirichlet_form_spectral(case: CaseId, f: BandLimitedFunction) -> float:
    return float(dirichlet_form_spectral_exact(case, f))


def verify_theorem21(
    case: CaseId, f: BandLimitedFunction, spec: QuadratureSpec, convention: str = "cyclic"
) -> InequalityReport:
    """Entropy vs C * Dirichlet + norm term, margins from one sample stream."""
    pts, w = _sphere_stream(case.sphere_dim, spec)
    v = np.abs(f.values(pts))
    gsq = horizontal_gradient_sq_batch(case, f.gradient(pts), pts, convention)
    c = float(case.sharp_constant)
    nsq = float(f.norm_sq)
    lognorm = 0.5 * math.log(nsq)
    ent_i = 0.5 * entropy_integrand(v)
    margin_i = c * gsq - ent_i
    margin, se = _wmean_se(margin_i, w)
    margin += nsq * lognorm
    lhs, _ = _wmean_se(ent_i, w)
    return InequalityReport(
        lhs, margin + lhs, margin, se, _meta(case, spec, check="theorem21")
    )


def beckner_bound_check(f: BandLimitedFunction, spec: QuadratureSpec) -> InequalityReport:
    """Entropy of the normalized function vs the degree-weighted norm sum."""
    case = f.case
    if case.family != "real":
        raise ValueError("the harmonic-degree bound is a real-family check")
    nsq = float(f.norm_sq)
    rhs = float(
        sum(label.degree * ns for (label, _), ns in zip(f.components, f.norms))
    ) / nsq
    pts, w = _sphere_stream(case.sphere_dim, spec)
    v = np.abs(f.values(pts))
    ent_g_i = (0.5 * entropy_integrand(v) - v * v * 0.5 * math.log(nsq)) / nsq
    margin_i = rhs - ent_g_i
    margin, se = _wmean_se(margin_i, w)
    lhs, _ = _wmean_se(ent_g_i, w)
    return InequalityReport(
        lhs, rhs, margin, se, _meta(case, spec, check="degree-bound")
    )


def sobolev_generator_check(
    spectrum, c: float, f: BandLimitedFunction, spec: QuadratureSpec
) -> InequalityReport:
    """Generic log-Sobolev check against (B f, f) = sum C lambda |Y|^2."""
    case = f.case
    nsq = float(f.norm_sq)
    rhs = (
        sum(float(c) * float(spectrum[label]) * float(ns) for (label, _), ns in zip(f.components, f.norms))
        / nsq
    )
    pts, w = _sphere_stream(case.sphere_dim, spec)
    v = np.abs(f.values(pts))
    ent_g_i = (0.5 * entropy_integrand(v) - v * v * 0.5 * math.log(nsq)) / nsq
    margin_i = rhs - ent_g_i
    margin, se = _wmean_se(margin_i, w)
    lhs, _ = _wmean_se(ent_g_i, w)
    return InequalityReport(
        lhs, rhs, margin, se, _meta(case, spec, check="sobolev-generator")
    )


def gamma_k(n: int, p: float, k: int) -> float:
    """HLS multiplier Gamma(n/p)Gamma(n/p'+k) / (Gamma(n/p')Gamma(n/p+k))."""
    if not 1 < p < 2:
        raise ValueError(f"need p in (1, 2), got {p}")
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0:
        return 1.0
    pp = p / (p - 1)
    lg = math.lgamma
    return math.exp(
        (lg(n / p) - lg(n / p + k)) + (lg(n / pp + k) - lg(n / pp))
    )


def hls_constant(n: int, p: float) -> float:
    """Best constant pi^(n/p') Gamma(n/p - n/2)/Gamma(n/p) (Gamma(n/2)/Gamma(n))^((p-2)/p)."""
    if not 1 < p < 2:
        raise ValueError(f"Gamma(n/p - n/2) needs n/2 < n/p < n, so p in (1, 2); got {p}")
    pp = p / (p - 1)
    return (
        math.pi ** (n / pp)
        * math.gamma(n / p - n / 2)
        / math.gamma(n / p)
        * (math.gamma(n / 2) / math.gamma(n)) ** ((p - 2) / p)
    )


def intertwiner_multiplier_apply(f: BandLimitedFunction, p: float) -> BandLimitedFunction:
    """Multiply each degree-k component by gamma_k (real family)."""
    if f.case.family != "real":
        raise ValueError("the multiplier is defined for the real family")
    n = f.case.sphere_dim
    return f.map_components(lambda label: gamma_k(n, p, label.degree))


def lp_norm_stream(vals: np.ndarray, p: float, w: np.ndarray | None) -> tuple[float, float, np.ndarray]:
    """(norm, std_error, power stream) for ||f||_p from sampled values."""
    powers = np.abs(vals) ** p
    ip, se_ip = _wmean_se(powers, w)
    norm = ip ** (1 / p)
    se = se_ip * norm / (p * ip) if ip > 0 else 0.0
    return norm, se, powers


def hls_contraction_check(
    f: BandLimitedFunction, p: float, spec: QuadratureSpec
) -> InequalityReport:
    """Experimental ||I f||_p' <= ||f||_p with the gamma_k multiplier."""
    case = f.case
    pp = p / (p - 1)
    gf = intertwiner_multiplier_apply(f, p)
    pts, w = _sphere_stream(case.sphere_dim, spec)
    lhs, se_l, pow_l = lp_norm_stream(gf.values(pts), pp, w)
    rhs, se_r, pow_r = lp_norm_stream(f.values(pts), p, w)
    if w is None and len(pow_l) > 1:
        # correlated streams: delta-method with the sample covariance
        n = len(pow_l)
        cov = float(np.cov(pow_l, pow_r)[0, 1]) / n
        dl = lhs / (pp * float(np.mean(pow_l)))
        dr = rhs / (p * float(np.mean(pow_r)))
        se = math.sqrt(max(se_l**2 + se_r**2 - 2 * dl * dr * cov, 0.0))
    else:
        se = 0.0
    return InequalityReport(
        lhs, rhs, rhs - lhs, se, _meta(case, spec, check="hls-contraction", p=p)
    )


def rearrangement_check(a, b) -> tuple[float, float]:
    """Q = sum a_i b_i against Q* after sorting both descending; Q* >= Q."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("need two equal-length vectors")
    if np.any(a < 0) or np.any(b < 0):
        raise ValueError("entries must be nonnegative")
    q = float(a @ b)
    qs = float(np.sort(a)[::-1] @ np.sort(b)[::-1])
    if qs < q - 1e-12 * (1 + abs(q)):
        raise AssertionError("rearrangement bound violated; broken sort?")
    return q, qs


def semigroup_contraction_check(
    case: CaseId,
    f: BandLimitedFunction,
    t: float,
    q: float,
    p: float,
    spec: QuadratureSpec,
) -> InequalityReport:
    """Hypercontractivity ||exp(-tB) f||_p <= ||f||_q with B the CR-Laplacian.

    The time condition exp(-t/C) <= sqrt((q-1)/(p-1)) is recorded in the
    metadata; margins are only guaranteed when it holds.
    """
    if not 1 < q <= p:
        raise ValueError("need 1 < q <= p")
    for label, _ in f.components:
        if not isinstance(label, KTypeLabel):
            raise ValueError("semigroup flow needs K-type labels")
    g = f.map_components(
        lambda label: math.exp(-t * float(deltab_eigenvalue(case, label)))
    )
    pts, w = _sphere_stream(case.sphere_dim, spec)
    lhs, se_l, pow_l = lp_norm_stream(g.values(pts), p, w)
    rhs, se_r, pow_r = lp_norm_stream(f.values(pts), q, w)
    if w is None and len(pow_l) > 1:
        n = len(pow_l)
        cov = float(np.cov(pow_l, pow_r)[0, 1]) / n
        dl = lhs / (p * float(np.mean(pow_l)))
        dr = rhs / (q * float(np.mean(pow_r)))
        se = math.sqrt(max(se_l**2 + se_r**2 - 2 * dl * dr * cov, 0.0))
    else:
        se = 0.0
    c = float(case.sharp_constant)
    threshold = 0.5 * c * math.log((p - 1) / (q - 1)) if p > q else 0.0
    condition = math.exp(-t / c) <= math.sqrt((q - 1) / (p - 1)) + 1e-12
    return InequalityReport(
        lhs,
        rhs,
        rhs - lhs,
        se,
        _meta(
            case,
            spec,
            check="semigroup-contraction",
            t=t,
            p=p,
            q=q,
            threshold_t=threshold,
            condition_holds=bool(condition),
        ),
    )


def vertical_eigenvalue(case: CaseId, label: KTypeLabel) -> int:
    """Eigenvalue of the vertical Casimir (sphere Laplacian minus CR one)."""
    if label.family != case.family:
        raise ValueError("label family mismatch")
    if case.family == "real":
        return 0
    if case.family == "complex":
        return (label.a - label.b) ** 2
    if case.family == "quaternionic":
        return label.b * (label.b + 2)
    return label.b * (label.b + 6)


@lru_cache(maxsize=None)
def vertical_operators(case: CaseId) -> tuple[xp.FirstOrderOperator, ...]:
    """First-order operators V_a f(x) = (M_a x) . grad f spanning the
    vertical directions, as exact polynomial operators.

    Only the families with linear vertical spans qualify; the octonionic
    projections go through the Clifford quadratics instead.
    """
    if case.family == "octonionic":
        raise ValueError(
            "octonionic vertical directions are not linear fields; "
            "degree-2 types split via octonion_degree2_split"
        )
    vs = sphere_variables(case)
    dim = case.ambient_dim
    ops = []
    for m in _vertical_mats(case):
        coeffs = []
        for i in range(dim):
            terms = {}
            for k in range(dim):
                if m[i, k] != 0.0:
                    e = [0] * dim
                    e[k] = 1
                    terms[tuple(e)] = Fraction(m[i, k])
            coeffs.append(xp.poly(vs, terms))
        ops.append(xp.FirstOrderOperator(vs, tuple(coeffs)))
    return tuple(ops)


def vertical_casimir_apply(case: CaseId, h: xp.MultiPoly) -> xp.MultiPoly:
    """-(sum_a V_a V_a) h, exactly."""
    out = xp.constant(h.variables, 0)
    for v in vertical_operators(case):
        out = xp.sub(out, xp.apply_operator(v, xp.apply_operator(v, h)))
    return out


def ktype_component(case: CaseId, h: xp.MultiPoly, label: KTypeLabel) -> xp.MultiPoly:
    """Exact projection of a degree-N harmonic onto one K-type.

    Within a fixed harmonic degree the types are separated by the vertical
    Casimir, so the projector is the rational interpolation product over
    the other eigenvalues for that degree.  Octonionic inputs are served
    for degree 2 via the Hopf quadratics.
    """
    from .spectra import enumerate_ktypes

    vs = sphere_variables(case)
    if h.variables != vs:
        raise ValueError("variable list mismatch")
    if not xp.euclidean_laplacian(h, vs).is_zero():
        raise ValueError("projection needs a harmonic input")
    deg = xp.degree_in(h, vs)
    if label.degree != deg:
        raise ValueError(f"label degree {label.degree} != polynomial degree {deg}")
    if case.family == "octonionic":
        split = octonion_degree2_split(case, h)
        return split.get(label, xp.constant(vs, 0))
    lam = vertical_eigenvalue(case, label)
    others = sorted(
        {
            vertical_eigenvalue(case, kt)
            for kt in enumerate_ktypes(case, deg)
            if kt.degree == deg
        }
        - {lam}
    )
    out = h
    for mu in others:
        # (Cas - mu) / (lam - mu) applied exactly
        out = xp.scale(
            xp.sub(vertical_casimir_apply(case, out), xp.scale(out, Fraction(mu))),
            Fraction(1, lam - mu),
        )
    return out


def octonion_hopf_quadratics(convention: str = "cyclic") -> tuple[xp.MultiPoly, ...]:
    """The nine quadratics u_b = <xi, C_b xi>, an exact basis of the
    small degree-2 isotypic piece (the pullbacks of the linear functions
    on the base 8-sphere)."""
    case = CaseId("octonionic", 1)
    vs = sphere_variables(case)
    out = []
    for c in _clifford_mats(convention):
        terms: dict = {}
        for i in range(16):
            for k in range(i, 16):
                coef = c[i, k] if i == k else c[i, k] + c[k, i]
                if coef != 0.0:
                    e = [0] * 16
                    e[i] += 1
                    e[k] += 1
                    terms[tuple(e)] = Fraction(coef)
        out.append(xp.poly(vs, terms))
    return tuple(out)


def octonion_degree2_split(
    case: CaseId, h: xp.MultiPoly, convention: str = "cyclic"
) -> dict[KTypeLabel, xp.MultiPoly]:
    """Exact isotypic split of a degree-2 octonionic harmonic.

    The (2,0) part is the L2 projection onto the Hopf quadratics (their
    Gram matrix is diagonal rational), the (2,2) part is the remainder.
    """
    vs = sphere_variables(case)
    if case.family != "octonionic":
        raise ValueError("this split is the octonionic degree-2 one")
    if h.variables != vs:
        raise ValueError("variable list mismatch")
    if not xp.euclidean_laplacian(h, vs).is_zero() or xp.degree_in(h, vs) != 2:
        raise ValueError("need a degree-2 harmonic")
    d = case.sphere_dim
    p0 = xp.constant(vs, 0)
    for u in octonion_hopf_quadratics(convention):
        num, num_im = sphere_l2_pairing(h, u, d)
        if num_im != 0:
            raise ValueError("octonionic split expects real coefficients")
        den = sphere_l2_norm_sq(u, d)
        if num != 0:
            p0 = xp.add(p0, xp.scale(u, num / den))
    p2 = xp.sub(h, p0)
    out = {}
    if not p0.is_zero():
        out[KTypeLabel("octonionic", 2, 0)] = p0
    if not p2.is_zero():
        out[KTypeLabel("octonionic", 2, 2)] = p2
    return out


def gross_check(k: int, f, spec: QuadratureSpec, grad=None) -> InequalityReport:
    """Gauss-measure log-Sobolev report for a numeric or polynomial f.

    f may be a MultiPoly (gradient taken exactly) or a batch callable;
    callables get central-difference gradients with h = 1e-5 unless grad
    is supplied.
    """
    if isinstance(f, xp.MultiPoly):
        if len(f.variables) != k:
            raise ValueError("polynomial variable count != k")
        partials = [xp.differentiate(f, v) for v in f.variables]

        def fv(pts):
            return np.real(xp.evaluate(f, pts))

        def gradsq(pts):
            cols = xp.evaluate_many(partials, pts)
            return sum(np.real(c) ** 2 for c in cols)

    else:
        fv = f
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
                    diff = (np.asarray(fv(pts + step)) - np.asarray(fv(pts - step))) / (2 * h)
                    out += diff * diff
                return out

    nsq = integrate_gauss(k, lambda p: np.asarray(fv(p)) ** 2, spec).value
    if nsq <= 0:
        raise ValueError("cannot normalize the zero function")
    lognorm = 0.5 * math.log(nsq)

    def margin_integrand(p):
        v = np.asarray(fv(p))
        return gradsq(p) - 0.5 * entropy_integrand(v) + v * v * lognorm

    res = integrate_gauss(k, margin_integrand, spec)
    ent = integrate_gauss(
        k, lambda p: 0.5 * entropy_integrand(np.asarray(fv(p))), spec
    ).value
    lhs = (ent - nsq * lognorm) / nsq
    return InequalityReport(
        lhs,
        lhs + res.value / nsq,
        res.value / nsq,
        res.std_error / nsq,
        _meta(None, spec, check="gauss-logsob", k=k),
    )
