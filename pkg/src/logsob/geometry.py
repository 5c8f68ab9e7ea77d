"""Sphere models, horizontal distributions, and the Heisenberg group.

The four geometries live on round spheres sitting in a normed division
algebra: S^n in R^(n+1), S^(2n+1) in C^(n+1), S^(4n+3) in H^(n+1), and
S^15 in O^2.  Complex coordinates are interleaved as reals, so C^(n+1)
is (x1, y1, ..., x_{n+1}, y_{n+1}); quaternions and octonions take 4 and
8 consecutive slots.

The vertical space at xi is tangent to the Hopf fiber through xi.  For
the complex and quaternionic spheres that is the span of (imaginary
unit) * xi acting coordinate-wise, but octonion nonassociativity makes
the coordinate-wise span a different, non-invariant plane field: there
the fibration structure is carried by nine symmetric Clifford matrices
C_b, the horizontal space is span{C_b xi} minus the radial line, and
the vertical space is its orthogonal complement.  (The failure is
detectable: the coordinate-wise span gives a vertical Laplacian whose
degree-2 spectrum {0, 8, 16, 24} is not constant on the isotypic pieces,
while the Clifford realization yields the two-eigenvalue structure that
matches the closed-form spectra.)  The horizontal gradient is the
ambient gradient with the radial and vertical components removed.

Also here: the Heisenberg group C^n x R with its left-invariant fields
X_j, Y_j, the CR-Laplacian as exact polynomial calculus (two
independent implementations), stereographic projection with its
conformal factor, and the Cayley transform onto the complex sphere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exactpoly import (
    FirstOrderOperator,
    MultiPoly,
    add,
    apply_operator,
    constant,
    differentiate,
    evaluate,
    mul,
    scale,
    sub,
    var_poly,
)
from .spectra import CaseId

UNIT_TOL = 1e-12
FRAME_TOL = 1e-10


@dataclass(frozen=True)
class SpherePoint:
    """A unit vector; the constructor rejects anything off the sphere."""

    coordinates: np.ndarray

    def __post_init__(self):
        coords = np.asarray(self.coordinates, dtype=float)
        object.__setattr__(self, "coordinates", coords)
        if coords.ndim != 1:
            raise ValueError("coordinates must be a 1-d vector")
        if abs(coords @ coords - 1.0) > UNIT_TOL:
            raise ValueError("not a unit vector; use SpherePoint.normalized")

    @classmethod
    def normalized(cls, coords) -> "SpherePoint":
        coords = np.asarray(coords, dtype=float)
        norm = np.linalg.norm(coords)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(coords / norm)

    @property
    def dim(self) -> int:
        """Dimension of the sphere the point lies on."""
        return len(self.coordinates) - 1


@dataclass(frozen=True)
class HeisenbergPoint:
    """Group element (z, t) with z in C^n stored interleaved as 2n reals."""

    xy: np.ndarray
    t: float

    def __post_init__(self):
        xy = np.asarray(self.xy, dtype=float)
        object.__setattr__(self, "xy", xy)
        object.__setattr__(self, "t", float(self.t))
        if xy.ndim != 1 or len(xy) % 2:
            raise ValueError("xy must be a flat vector of 2n reals")
        if not (np.all(np.isfinite(xy)) and np.isfinite(self.t)):
            raise ValueError("coordinates must be finite")

    @classmethod
    def from_complex(cls, z, t: float) -> "HeisenbergPoint":
        z = np.asarray(z, dtype=complex)
        xy = np.empty(2 * len(z))
        xy[0::2] = z.real
        xy[1::2] = z.imag
        return cls(xy, t)

    @property
    def n(self) -> int:
        return len(self.xy) // 2

    @property
    def z(self) -> np.ndarray:
        return self.xy[0::2] + 1j * self.xy[1::2]


@dataclass(frozen=True)
class HorizontalFrame:
    """Orthonormal basis of the horizontal subspace at a base point."""

    base: SpherePoint
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=float)
        object.__setattr__(self, "basis", basis)
        xi = self.base.coordinates
        if basis.ndim != 2 or basis.shape[1] != len(xi):
            raise ValueError("basis shape does not match the base point")
        gram = basis @ basis.T
        if np.max(np.abs(gram - np.eye(len(basis)))) > FRAME_TOL:
            raise ValueError("basis is not orthonormal")
        if np.max(np.abs(basis @ xi)) > FRAME_TOL:
            raise ValueError("basis is not tangent to the sphere")

    def __len__(self) -> int:
        return len(self.basis)


# -- stereographic projection ------------------------------------------------


def stereographic_inverse(x) -> SpherePoint:
    """Map x in R^n to (2x, 1 - |x|^2) / (1 + |x|^2) on S^n."""
    x = np.asarray(x, dtype=float)
    s = x @ x
    coords = np.concatenate([2 * x, [1 - s]]) / (1 + s)
    return SpherePoint.normalized(coords)


def stereographic(p: SpherePoint) -> np.ndarray:
    """Inverse map, xi -> xi_head / (1 + xi_last); undefined at the south pole."""
    last = p.coordinates[-1]
    if 1 + last <= 1e-15:
        raise ValueError("stereographic projection is undefined at the south pole")
    return p.coordinates[:-1] / (1 + last)


def conformal_factor(x) -> float | np.ndarray:
    """Scale factor 2 / (1 + |x|^2) of the stereographic map; in (0, 2]."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return 2.0 / (1.0 + x @ x)
    return 2.0 / (1.0 + np.sum(x * x, axis=-1))


# -- Heisenberg group ---------------------------------------------------------


def cayley(h: HeisenbergPoint) -> SpherePoint:
    """Map (z, t) to the complex sphere: w0 = (z0-1)/(z0+1), w = 2z/(z0+1).

    Here z0 = it + |z|^2, so Re(z0) + 1 >= 1 and the map is globally
    defined; the image satisfies |w0|^2 + |w|^2 = 1.  Coordinates come
    back interleaved with the distinguished coordinate w0 last.
    """
    z = h.z
    z0 = 1j * h.t + z @ z.conj()
    w0 = (z0 - 1) / (z0 + 1)
    w = 2 * z / (z0 + 1)
    full = np.concatenate([w, [w0]])
    coords = np.empty(2 * len(full))
    coords[0::2] = full.real
    coords[1::2] = full.imag
    return SpherePoint.normalized(coords)


def heisenberg_mul(a: HeisenbergPoint, b: HeisenbergPoint) -> HeisenbergPoint:
    """Group law (z,t)(z',t') = (z + z', t + t' + 2 Im z.conj(z'))."""
    if a.n != b.n:
        raise ValueError(f"rank mismatch: {a.n} vs {b.n}")
    tw = float(np.imag(a.z @ b.z.conj()))
    return HeisenbergPoint(a.xy + b.xy, a.t + b.t + 2 * tw)


def heisenberg_variables(n: int) -> tuple[str, ...]:
    """Polynomial variables (x1, y1, ..., xn, yn, t)."""
    names: list[str] = []
    for j in range(1, n + 1):
        names += [f"x{j}", f"y{j}"]
    return tuple(names + ["t"])


def heisenberg_fields(n: int) -> list[FirstOrderOperator]:
    """Left-invariant fields [X1, Y1, ..., Xn, Yn].

    X_j = d/dx_j + 2 y_j d/dt and Y_j = d/dy_j - 2 x_j d/dt; they span
    the horizontal distribution and satisfy [X_j, Y_j] = -4 d/dt.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    names = heisenberg_variables(n)
    zero = constant(names, 0)
    one = constant(names, 1)
    out = []
    for j in range(n):
        xj = var_poly(names, names[2 * j])
        yj = var_poly(names, names[2 * j + 1])
        coeffs_x = [zero] * (2 * n + 1)
        coeffs_x[2 * j] = one
        coeffs_x[2 * n] = scale(yj, 2)
        coeffs_y = [zero] * (2 * n + 1)
        coeffs_y[2 * j + 1] = one
        coeffs_y[2 * n] = scale(xj, -2)
        out.append(FirstOrderOperator(names, tuple(coeffs_x)))
        out.append(FirstOrderOperator(names, tuple(coeffs_y)))
    return out


def heisenberg_cr_fields(n: int) -> list[FirstOrderOperator]:
    """Holomorphic fields Z_j = (X_j - i Y_j) / 2 = d/dz_j + i conj(z_j) d/dt."""
    from fractions import Fraction

    fields = heisenberg_fields(n)
    out = []
    for j in range(n):
        xf, yf = fields[2 * j], fields[2 * j + 1]
        coeffs = tuple(
            scale(add(cx, scale(cy, (0, -1))), Fraction(1, 2))
            for cx, cy in zip(xf.coefficients, yf.coefficients)
        )
        out.append(FirstOrderOperator(xf.variables, coeffs))
    return out


def heisenberg_deltab(f: MultiPoly, n: int) -> MultiPoly:
    """CR-Laplacian sum_j (X_j^2 + Y_j^2) f, exactly."""
    out = constant(f.variables, 0)
    for v in heisenberg_fields(n):
        out = add(out, apply_operator(v, apply_operator(v, f)))
    return out


def heisenberg_deltab_displayed(f: MultiPoly, n: int) -> MultiPoly:
    """Independent expansion: Dx + Dy + 4(y.grad_x - x.grad_y) d/dt + 4|z|^2 d2/dt2."""
    names = f.variables
    t = names[-1]
    out = constant(names, 0)
    ft = differentiate(f, t)
    ftt = differentiate(ft, t)
    for j in range(n):
        xn, yn = names[2 * j], names[2 * j + 1]
        out = add(out, differentiate(differentiate(f, xn), xn))
        out = add(out, differentiate(differentiate(f, yn), yn))
        yj = var_poly(names, yn)
        xj = var_poly(names, xn)
        out = add(out, scale(mul(yj, differentiate(ft, xn)), 4))
        out = sub(out, scale(mul(xj, differentiate(ft, yn)), 4))
        zsq = add(mul(xj, xj), mul(yj, yj))
        out = add(out, scale(mul(zsq, ftt), 4))
    return out


# -- division-algebra multiplication ------------------------------------------

def _quaternion_mul(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    a, b, c, d = u
    e, f_, g, h = v
    return np.array(
        [
            a * e - b * f_ - c * g - d * h,
            a * f_ + b * e + c * h - d * g,
            a * g - b * h + c * e + d * f_,
            a * h + b * g - c * f_ + d * e,
        ]
    )


def _cyclic_table() -> np.ndarray:
    # Fano triples (i, i+1, i+3) mod 7: e1 e2 = e4 and cyclic shifts.
    table = np.zeros((8, 8, 2), dtype=int)
    for i in range(8):
        table[0, i] = (1, i)
        table[i, 0] = (1, i)
    for i in range(1, 8):
        table[i, i] = (-1, 0)
    for i in range(1, 8):
        a, b, c = i, (i % 7) + 1, ((i + 2) % 7) + 1
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            table[x, y] = (1, z)
            table[y, x] = (-1, z)
    return table


def _doubling_table() -> np.ndarray:
    # Cayley-Dickson over the quaternions: (a,b)(c,d) = (ac - conj(d) b, d a + b conj(c)).
    def mul(u: np.ndarray, v: np.ndarray) -> np.ndarray:
        a, b = u[:4], u[4:]
        c, d = v[:4], v[4:]
        conj = np.array([1.0, -1.0, -1.0, -1.0])
        top = _quaternion_mul(a, c) - _quaternion_mul(conj * d, b)
        bot = _quaternion_mul(d, a) + _quaternion_mul(b, conj * c)
        return np.concatenate([top, bot])

    table = np.zeros((8, 8, 2), dtype=int)
    eye = np.eye(8)
    for i in range(8):
        for j in range(8):
            prod = mul(eye[i], eye[j])
            idx = int(np.argmax(np.abs(prod)))
            table[i, j] = (int(round(prod[idx])), idx)
    return table


_OCTONION_TABLES = {"cyclic": _cyclic_table(), "doubling": _doubling_table()}

OCTONION_CONVENTIONS = tuple(_OCTONION_TABLES)


def octonion_mul(u, v, convention: str = "cyclic") -> np.ndarray:
    """Multiply octonions given as 8-vectors (batched over leading axes)."""
    table = _OCTONION_TABLES[convention]
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    out = np.zeros(np.broadcast_shapes(u.shape, v.shape))
    for i in range(8):
        for j in range(8):
            sign, k = table[i, j]
            out[..., k] += sign * u[..., i] * v[..., j]
    return out


def _left_mul_matrix(a: int, table: np.ndarray) -> np.ndarray:
    out = np.zeros((8, 8))
    for j in range(8):
        sign, k = table[a, j]
        out[k, j] = sign
    return out


def _block_diag(block: np.ndarray, copies: int) -> np.ndarray:
    m = block.shape[0]
    out = np.zeros((m * copies, m * copies))
    for c in range(copies):
        out[c * m : (c + 1) * m, c * m : (c + 1) * m] = block
    return out


def vertical_matrices(case: CaseId) -> np.ndarray:
    """Skew matrices whose action on xi spans the vertical space.

    Shape (m_2alpha, D, D) with D the ambient dimension: multiplication
    by i (complex) or by i, j, k (quaternionic) applied to each algebra
    coordinate.  The octonionic vertical space is not the orbit of any
    fixed linear maps, so that family is refused here; use
    octonion_clifford_matrices and vertical_vectors instead.
    """
    dim = case.ambient_dim
    if case.family == "real":
        return np.zeros((0, dim, dim))
    if case.family == "complex":
        j2 = np.array([[0.0, -1.0], [1.0, 0.0]])
        return _block_diag(j2, case.n + 1)[None]
    if case.family == "quaternionic":
        eye = np.eye(4)
        units = [
            np.column_stack([_quaternion_mul(eye[a], eye[j]) for j in range(4)])
            for a in (1, 2, 3)
        ]
        return np.stack([_block_diag(u, case.n + 1) for u in units])
    raise ValueError(
        "no linear vertical matrices in the octonionic case; "
        "use octonion_clifford_matrices"
    )


def octonion_unit_actions(convention: str = "cyclic") -> np.ndarray:
    """Coordinate-wise left multiplication by e1..e7 on octonion pairs.

    Shape (7, 16, 16).  The actions are skew, anticommuting, and send xi
    to orthonormal tangent vectors, but their pointwise span is not the
    Hopf-fiber tangent space (nonassociativity), so they must not be
    used as a vertical projection.
    """
    table = _OCTONION_TABLES[convention]
    return np.stack(
        [_block_diag(_left_mul_matrix(a, table), 2) for a in range(1, 8)]
    )


def octonion_clifford_matrices(convention: str = "cyclic") -> np.ndarray:
    """Nine symmetric matrices with C_a C_b + C_b C_a = 2 delta_ab on R^16.

    On octonion pairs, C_0 (x1, x2) = (x1, -x2) and the others act as
    c(y)(x1, x2) = (y x2, conj(y) x1) for y running over the unit basis.
    The quadratic map u_b = <xi, C_b xi> sends the 15-sphere onto the unit
    8-sphere with c(u(xi)) xi = xi, and span{C_b xi} is the horizontal
    space plus the radial line, which is what makes these the right
    projection data for the octonionic fibration.
    """
    table = _OCTONION_TABLES[convention]
    z8 = np.zeros((8, 8))
    mats = [np.block([[np.eye(8), z8], [z8, -np.eye(8)]])]
    for a in range(8):
        ly = _left_mul_matrix(a, table)
        mats.append(np.block([[z8, ly], [ly if a == 0 else -ly, z8]]))
    return np.stack(mats)


def vertical_vectors(case: CaseId, p: SpherePoint, convention: str = "cyclic") -> np.ndarray:
    """Orthonormal basis of the vertical space at p, shape (m_2alpha, D)."""
    if case.family != "octonionic":
        return vertical_matrices(case) @ p.coordinates
    span = octonion_clifford_matrices(convention) @ p.coordinates
    return _null_space_rows(span)


def _null_space_rows(rows: np.ndarray) -> np.ndarray:
    _, s, vt = np.linalg.svd(rows, full_matrices=True)
    rank = int(np.sum(s > 1e-10))
    return vt[rank:]


def horizontal_frame(case: CaseId, p: SpherePoint, seed: int | None = None) -> HorizontalFrame:
    """Orthonormal basis of the horizontal space at p.

    The basis is found by Gram-Schmidt over the coordinate directions
    after removing the radial and vertical components; pass a seed to
    shuffle the candidate order (any choice spans the same space).
    """
    xi = p.coordinates
    dim = case.ambient_dim
    if len(xi) != dim:
        raise ValueError(f"point has {len(xi)} coordinates, case needs {dim}")
    verts = vertical_vectors(case, p)
    killed = np.vstack([xi[None], verts])
    order = np.arange(dim)
    if seed is not None:
        np.random.default_rng(seed).shuffle(order)
    rows: list[np.ndarray] = []
    for idx in order:
        v = np.eye(dim)[idx] - killed.T @ (killed @ np.eye(dim)[idx])
        for r in rows:
            v = v - (r @ v) * r
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            rows.append(v / norm)
    want = case.multiplicities[0]
    if len(rows) != want:
        raise ValueError(f"frame has {len(rows)} vectors, expected {want}")
    return HorizontalFrame(p, np.array(rows))


def horizontal_gradient(case: CaseId, f: MultiPoly, p: SpherePoint) -> np.ndarray:
    """Ambient gradient of f at p minus its radial and vertical parts."""
    xi = p.coordinates
    if len(f.variables) != case.ambient_dim:
        raise ValueError("polynomial variable count does not match the case")
    pt = xi[None]
    g = np.array([evaluate(differentiate(f, v), pt)[0] for v in f.variables])
    if np.iscomplexobj(g):
        if np.max(np.abs(g.imag)) > 1e-12:
            raise ValueError("horizontal gradient needs a real polynomial")
        g = g.real
    g = g - (g @ xi) * xi
    for v in vertical_vectors(case, p):
        g = g - (g @ v) * v
    return g
