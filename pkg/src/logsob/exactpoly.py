"""Exact multivariate polynomial arithmetic and differential operators.

A polynomial is represented by an ordered tuple of variable names plus a
mapping from exponent vectors to coefficients.  Coefficients are pairs
(re, im) of Fraction so that one representation covers both real
polynomials and the complex combinations produced by the bidegree split.
No floating point enters any operation in this module; numeric evaluation
happens only in `evaluate`, which converts to numpy at the very end.

Zero coefficients are never stored, and exponent vectors always have the
same length as the variable tuple.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

Coeff = tuple[Fraction, Fraction]
Expo = tuple[int, ...]

ZERO = (Fraction(0), Fraction(0))
ONE = (Fraction(1), Fraction(0))

# Guards for the recursive expanders (harmonic projection, bidegree split),
# which are the only operations whose intermediate size can blow up.
DEGREE_CAP = 12
DIMENSION_CAP = 16


def coeff(c) -> Coeff:
    """Coerce an int, Fraction, or (re, im) pair into a coefficient."""
    if isinstance(c, tuple):
        return (Fraction(c[0]), Fraction(c[1]))
    return (Fraction(c), Fraction(0))


def _cadd(a: Coeff, b: Coeff) -> Coeff:
    return (a[0] + b[0], a[1] + b[1])


def _cmul(a: Coeff, b: Coeff) -> Coeff:
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _cscale(a: Coeff, s: Fraction) -> Coeff:
    return (a[0] * s, a[1] * s)


@dataclass(frozen=True)
class MultiPoly:
    """Exact polynomial: variable names and exponent-vector -> coefficient."""

    variables: tuple[str, ...]
    terms: dict[Expo, Coeff]

    def is_zero(self) -> bool:
        return not self.terms

    def is_real(self) -> bool:
        return all(c[1] == 0 for c in self.terms.values())

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def __repr__(self) -> str:  # compact, for test failure messages
        if not self.terms:
            return "MultiPoly(0)"
        bits = []
        for e, c in sorted(self.terms.items()):
            mono = "*".join(
                f"{v}^{k}" for v, k in zip(self.variables, e) if k
            )
            val = f"{c[0]}" if c[1] == 0 else f"({c[0]}+{c[1]}i)"
            bits.append(f"{val}*{mono}" if mono else val)
        return "MultiPoly(" + " + ".join(bits) + ")"


def poly(variables, terms) -> MultiPoly:
    """Build a canonical MultiPoly; drops zero coefficients."""
    vs = tuple(variables)
    out: dict[Expo, Coeff] = {}
    for e, c in terms.items():
        if len(e) != len(vs):
            raise ValueError(f"exponent vector {e} has wrong length for {vs}")
        cc = coeff(c)
        if cc != ZERO:
            out[tuple(e)] = _cadd(out.get(tuple(e), ZERO), cc) if tuple(e) in out else cc
    return MultiPoly(vs, {e: c for e, c in out.items() if c != ZERO})


def constant(variables, c) -> MultiPoly:
    vs = tuple(variables)
    cc = coeff(c)
    return MultiPoly(vs, {} if cc == ZERO else {(0,) * len(vs): cc})


def monomial(variables, expo, c=1) -> MultiPoly:
    return poly(variables, {tuple(expo): c})


def var_poly(variables, name: str) -> MultiPoly:
    vs = tuple(variables)
    if name not in vs:
        raise ValueError(f"unknown variable {name!r}")
    e = [0] * len(vs)
    e[vs.index(name)] = 1
    return MultiPoly(vs, {tuple(e): ONE})


def _check_same_vars(a: MultiPoly, b: MultiPoly) -> None:
    if a.variables != b.variables:
        raise ValueError(
            f"variable lists differ: {a.variables} vs {b.variables}"
        )


def add(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    _check_same_vars(a, b)
    out = dict(a.terms)
    for e, c in b.terms.items():
        s = _cadd(out.get(e, ZERO), c)
        if s == ZERO:
            out.pop(e, None)
        else:
            out[e] = s
    return MultiPoly(a.variables, out)


def sub(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    return add(a, scale(b, Fraction(-1)))


def mul(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    _check_same_vars(a, b)
    out: dict[Expo, Coeff] = {}
    for ea, ca in a.terms.items():
        for eb, cb in b.terms.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            s = _cadd(out.get(e, ZERO), _cmul(ca, cb))
            if s == ZERO:
                out.pop(e, None)
            else:
                out[e] = s
    return MultiPoly(a.variables, out)


def poly_arith(a: MultiPoly, b: MultiPoly, op: str) -> MultiPoly:
    """Dispatch form of the arithmetic: op is 'add' or 'mul'."""
    if op == "add":
        return add(a, b)
    if op == "mul":
        return mul(a, b)
    raise ValueError(f"unknown op {op!r}")


def scale(p: MultiPoly, s) -> MultiPoly:
    sc = coeff(s)
    if sc == ZERO:
        return MultiPoly(p.variables, {})
    return MultiPoly(p.variables, {e: _cmul(c, sc) for e, c in p.terms.items()})


def poly_pow(p: MultiPoly, k: int) -> MultiPoly:
    if k < 0:
        raise ValueError("negative power")
    out = constant(p.variables, 1)
    for _ in range(k):
        out = mul(out, p)
    return out


def conjugate(p: MultiPoly) -> MultiPoly:
    return MultiPoly(
        p.variables, {e: (c[0], -c[1]) for e, c in p.terms.items()}
    )


def differentiate(p: MultiPoly, var: str) -> MultiPoly:
    if var not in p.variables:
        raise ValueError(f"unknown variable {var!r}")
    i = p.variables.index(var)
    out: dict[Expo, Coeff] = {}
    for e, c in p.terms.items():
        if e[i] == 0:
            continue
        e2 = list(e)
        e2[i] -= 1
        out[tuple(e2)] = _cscale(c, Fraction(e[i]))
    return MultiPoly(p.variables, out)


def euclidean_laplacian(p: MultiPoly, dims) -> MultiPoly:
    """Sum of second partials over the variables named in dims."""
    dims = list(dims)
    for v in dims:
        if v not in p.variables:
            raise ValueError(f"unknown variable {v!r}")
    out = MultiPoly(p.variables, {})
    for v in dims:
        out = add(out, differentiate(differentiate(p, v), v))
    return out


def degree_in(p: MultiPoly, dims) -> int:
    idx = [p.variables.index(v) for v in dims]
    return max((sum(e[i] for i in idx) for e in p.terms), default=0)


def is_homogeneous_in(p: MultiPoly, dims) -> bool:
    idx = [p.variables.index(v) for v in dims]
    degs = {sum(e[i] for i in idx) for e in p.terms}
    return len(degs) <= 1


def norm_sq_poly(variables, dims) -> MultiPoly:
    """The polynomial sum of squares of the dims variables."""
    vs = tuple(variables)
    out: dict[Expo, Coeff] = {}
    for v in dims:
        e = [0] * len(vs)
        e[vs.index(v)] = 2
        out[tuple(e)] = ONE
    return MultiPoly(vs, out)


def harmonic_projection(p: MultiPoly, dims) -> list[tuple[int, MultiPoly]]:
    """Decompose a homogeneous p as sum over j of |x|^(2j) * H_(k-2j).

    dims names the coordinates entering |x|^2 and the Laplacian.  Returns
    the list of (degree, harmonic polynomial) with nonzero entries only,
    ordered by decreasing degree.  Uses the exact triangular system from
    repeated application of the Laplacian: for harmonic H of degree l,
    Lap(|x|^(2j) H) = 2j(2j + 2l + m - 2) |x|^(2j-2) H in m coordinates.
    """
    dims = list(dims)
    m = len(dims)
    if m > DIMENSION_CAP:
        raise ValueError(f"dimension {m} exceeds cap {DIMENSION_CAP}")
    if not is_homogeneous_in(p, dims):
        raise ValueError("input is not homogeneous in dims")
    if p.is_zero():
        return []
    k = degree_in(p, dims)
    if k > DEGREE_CAP:
        raise ValueError(f"degree {k} exceeds cap {DEGREE_CAP}")

    def drop_coeff(j: int, i: int) -> Fraction:
        # factor multiplying |x|^(2(j-i)) H_(k-2j) inside Lap^i of |x|^(2j) H
        out = Fraction(1)
        for a in range(i):
            b = j - a
            out *= Fraction(2 * b * (2 * b + 2 * (k - 2 * j) + m - 2))
        return out

    lap_powers = [p]
    jmax = k // 2
    for _ in range(jmax):
        lap_powers.append(euclidean_laplacian(lap_powers[-1], dims))

    r2 = norm_sq_poly(p.variables, dims)
    harmonics: dict[int, MultiPoly] = {}
    for j in range(jmax, -1, -1):
        rest = lap_powers[j]
        for l in range(j + 1, jmax + 1):
            if l in harmonics:
                corr = scale(
                    mul(poly_pow(r2, l - j), harmonics[l]), drop_coeff(l, j)
                )
                rest = sub(rest, corr)
        h = scale(rest, Fraction(1) / drop_coeff(j, j))
        if not h.is_zero():
            harmonics[j] = h
    return [(k - 2 * j, harmonics[j]) for j in sorted(harmonics) ]


def _binom_expand_pair(a: int, scalars: tuple[Coeff, Coeff]):
    """Binomial expansion of (s0*u + s1*v)^a.

    Yields ((i, a-i), coefficient) for the expansion in (u, v)."""
    s0, s1 = scalars
    for i in range(a + 1):
        c = coeff(math.comb(a, i))
        for _ in range(i):
            c = _cmul(c, s0)
        for _ in range(a - i):
            c = _cmul(c, s1)
        yield (i, a - i), c


def bidegree_split(p: MultiPoly) -> dict[tuple[int, int], MultiPoly]:
    """Split p over paired variables (x1, y1, x2, y2, ...) by bidegree.

    The bidegree (p, q) counts powers of z_j = x_j + i y_j and of its
    conjugate.  Components carry complex coefficients in general and sum
    back to the input exactly.
    """
    nv = len(p.variables)
    if nv % 2 != 0:
        raise ValueError("bidegree split needs an even number of variables")
    npairs = nv // 2
    if p.total_degree() > DEGREE_CAP:
        raise ValueError(f"degree {p.total_degree()} exceeds cap {DEGREE_CAP}")

    half = Fraction(1, 2)
    # x = (z + w)/2, y = (z - w)/(2i) = -i/2 z + i/2 w, with w the conjugate
    x_scalars = ((half, Fraction(0)), (half, Fraction(0)))
    y_scalars = ((Fraction(0), -half), (Fraction(0), half))

    zw_terms: dict[tuple[Expo, Expo], Coeff] = {}
    for e, c in p.terms.items():
        partial: dict[tuple[Expo, Expo], Coeff] = {
            ((0,) * npairs, (0,) * npairs): c
        }
        for j in range(npairs):
            a_x, a_y = e[2 * j], e[2 * j + 1]
            # expand x_j^a_x then y_j^a_y into z_j, w_j powers
            for a, scalars in ((a_x, x_scalars), (a_y, y_scalars)):
                grown = {}
                for (ez, ew), cc in partial.items():
                    for (iz, iw), cx in _binom_expand_pair(a, scalars):
                        nez = list(ez)
                        new = list(ew)
                        nez[j] += iz
                        new[j] += iw
                        key = (tuple(nez), tuple(new))
                        s = _cadd(grown.get(key, ZERO), _cmul(cc, cx))
                        if s == ZERO:
                            grown.pop(key, None)
                        else:
                            grown[key] = s
                partial = grown
        for key, cc in partial.items():
            s = _cadd(zw_terms.get(key, ZERO), cc)
            if s == ZERO:
                zw_terms.pop(key, None)
            else:
                zw_terms[key] = s

    # group by bidegree, then map z^a w^b back to real coordinates
    groups: dict[tuple[int, int], dict[tuple[Expo, Expo], Coeff]] = {}
    for (ez, ew), cc in zw_terms.items():
        groups.setdefault((sum(ez), sum(ew)), {})[(ez, ew)] = cc

    plus_i = (Fraction(0), Fraction(1))
    minus_i = (Fraction(0), Fraction(-1))
    z_scalars = (ONE, plus_i)   # z = x + i y  -> coefficients on (x, y)
    w_scalars = (ONE, minus_i)  # conjugate

    out: dict[tuple[int, int], MultiPoly] = {}
    for bideg, terms in groups.items():
        real_terms: dict[Expo, Coeff] = {}
        for (ez, ew), cc in terms.items():
            partial2: dict[Expo, Coeff] = {(0,) * nv: cc}
            for j in range(npairs):
                for a, scalars in ((ez[j], z_scalars), (ew[j], w_scalars)):
                    grown2: dict[Expo, Coeff] = {}
                    for ee, c2 in partial2.items():
                        for (ix, iy), cx in _binom_expand_pair(a, scalars):
                            ne = list(ee)
                            ne[2 * j] += ix
                            ne[2 * j + 1] += iy
                            key2 = tuple(ne)
                            s = _cadd(grown2.get(key2, ZERO), _cmul(c2, cx))
                            if s == ZERO:
                                grown2.pop(key2, None)
                            else:
                                grown2[key2] = s
                    partial2 = grown2
            for ee, c2 in partial2.items():
                s = _cadd(real_terms.get(ee, ZERO), c2)
                if s == ZERO:
                    real_terms.pop(ee, None)
                else:
                    real_terms[ee] = s
        comp = MultiPoly(p.variables, real_terms)
        if not comp.is_zero():
            out[bideg] = comp
    return out


@dataclass(frozen=True)
class FirstOrderOperator:
    """The operator sum_i c_i(x) d/dx_i with polynomial coefficients."""

    variables: tuple[str, ...]
    coefficients: tuple[MultiPoly, ...]

    def __post_init__(self):
        if len(self.coefficients) != len(self.variables):
            raise ValueError("one coefficient polynomial per variable required")
        for c in self.coefficients:
            if c.variables != self.variables:
                raise ValueError("coefficient variable list mismatch")


def apply_operator(V: FirstOrderOperator, p: MultiPoly) -> MultiPoly:
    if V.variables != p.variables:
        raise ValueError("operator and polynomial variable lists differ")
    out = MultiPoly(p.variables, {})
    for v, c in zip(V.variables, V.coefficients):
        if c.is_zero():
            continue
        out = add(out, mul(c, differentiate(p, v)))
    return out


def commutator_apply(
    A: FirstOrderOperator, B: FirstOrderOperator, p: MultiPoly
) -> MultiPoly:
    """[A, B] applied to p, computed exactly as A(Bp) - B(Ap)."""
    return sub(apply_operator(A, apply_operator(B, p)), apply_operator(B, apply_operator(A, p)))


def evaluate(p: MultiPoly, points: np.ndarray) -> np.ndarray:
    """Evaluate at an (N, nvars) array of points.

    Returns a float64 array for real polynomials, complex128 otherwise.
    Powers of each coordinate are cached per distinct exponent.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.shape[1] != len(p.variables):
        raise ValueError(
            f"points have {pts.shape[1]} coordinates, expected {len(p.variables)}"
        )
    n = pts.shape[0]
    real = p.is_real()
    out = np.zeros(n, dtype=np.float64 if real else np.complex128)
    cache: dict[tuple[int, int], np.ndarray] = {}
    for e, c in p.terms.items():
        term = np.ones(n)
        for i, k in enumerate(e):
            if k == 0:
                continue
            key = (i, k)
            if key not in cache:
                cache[key] = pts[:, i] ** k
            term = term * cache[key]
        cval = float(c[0]) if real else complex(float(c[0]), float(c[1]))
        out += cval * term
    return out


def evaluate_many(polys, points: np.ndarray) -> list[np.ndarray]:
    """Evaluate several polynomials over one shared coordinate-power cache.

    All polynomials must share the same variable list; much cheaper than
    separate evaluate calls when they have overlapping monomials (e.g. a
    gradient).
    """
    polys = list(polys)
    if not polys:
        return []
    vs = polys[0].variables
    for p in polys:
        if p.variables != vs:
            raise ValueError("variable lists differ across polynomials")
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.shape[1] != len(vs):
        raise ValueError(
            f"points have {pts.shape[1]} coordinates, expected {len(vs)}"
        )
    n = pts.shape[0]
    cache: dict[tuple[int, int], np.ndarray] = {}

    def powers(e: Expo) -> np.ndarray:
        term = np.ones(n)
        for i, k in enumerate(e):
            if k == 0:
                continue
            key = (i, k)
            if key not in cache:
                cache[key] = pts[:, i] ** k
            term = term * cache[key]
        return term

    out = []
    for p in polys:
        real = p.is_real()
        acc = np.zeros(n, dtype=np.float64 if real else np.complex128)
        for e, c in p.terms.items():
            cval = float(c[0]) if real else complex(float(c[0]), float(c[1]))
            acc += cval * powers(e)
        out.append(acc)
    return out
