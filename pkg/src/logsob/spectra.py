"""Case tables and exact spectral formulas for the four sphere geometries.

Each geometry is a sphere with a horizontal distribution: the full tangent
bundle (real family, S^n), and the complex (S^(2n+1)), quaternionic
(S^(4n+3)) and octonionic (S^15) Hopf-type structures.  This module stores
the per-case numerology (dimension, multiplicities, sharp constant,
distinguished spectral parameter) and evaluates, in exact rational
arithmetic wherever the formulas are rational:

  * eigenvalues of the normalized intertwining operator on each K-type,
  * eigenvalues of the hypoelliptic CR-Laplacian,
  * the margins of the sharp-constant bound C*lambda >= degree,
  * the distinguished-parameter identities tying the two together.

Poles of the eigenvalue products are reported with the exact vanishing
linear factor rather than as numeric infinities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

FAMILIES = ("real", "complex", "quaternionic", "octonionic")


class PoleError(ValueError):
    """A spectral parameter hit a vanishing factor of the denominator."""


@dataclass(frozen=True)
class CaseId:
    """One of the four rank-one geometries, with its rank parameter n."""

    family: str
    n: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.n < 1:
            raise ValueError("n must be a positive integer")

    @property
    def sphere_dim(self) -> int:
        return {
            "real": self.n,
            "complex": 2 * self.n + 1,
            "quaternionic": 4 * self.n + 3,
            "octonionic": 15,
        }[self.family]

    @property
    def ambient_dim(self) -> int:
        return self.sphere_dim + 1

    @property
    def multiplicities(self) -> tuple[int, int]:
        """Root multiplicities (m_alpha, m_2alpha)."""
        return {
            "real": (self.n, 0),
            "complex": (2 * self.n, 1),
            "quaternionic": (4 * self.n, 3),
            "octonionic": (8, 7),
        }[self.family]

    @property
    def rho(self) -> Fraction:
        """Half-sum parameter: m_alpha/2 + m_2alpha."""
        ma, m2a = self.multiplicities
        return Fraction(ma, 2) + m2a

    @property
    def sharp_constant(self) -> Fraction:
        """The constant C in the entropy bound: 1/m_alpha."""
        return Fraction(1, self.multiplicities[0])

    @property
    def special_nu(self) -> Fraction:
        """The parameter at which the intertwiner matches the CR-Laplacian."""
        return {
            "real": Fraction(self.n - 2, 2),
            "complex": Fraction(self.n),
            "quaternionic": Fraction(2 * self.n + 2),
            "octonionic": Fraction(10),  # nu = 11 - r at r = 1
        }[self.family]


@dataclass(frozen=True)
class KTypeLabel:
    """Label of an irreducible component of L^2 of the sphere.

    real:         a = k (spherical-harmonic degree), b unused
    complex:      a = p (holomorphic degree), b = q (antiholomorphic)
    quaternionic: a = p, b = q with p >= q >= 0 and p - q even
    octonionic:   a = N, b = j with N >= j >= 0 and N - j even
    """

    family: str
    a: int
    b: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.family == "real":
            if self.a < 0 or self.b is not None:
                raise ValueError(f"bad real label {(self.a, self.b)}")
            return
        if self.b is None or self.a < 0 or self.b < 0:
            raise ValueError(f"label {(self.a, self.b)} needs two entries >= 0")
        if self.family == "quaternionic":
            if self.a < self.b or (self.a - self.b) % 2:
                raise ValueError(
                    f"quaternionic label needs p >= q, p - q even, got {(self.a, self.b)}"
                )
        if self.family == "octonionic":
            if self.a < self.b or (self.a - self.b) % 2:
                raise ValueError(
                    f"octonionic label needs N >= j, N - j even, got {(self.a, self.b)}"
                )

    @property
    def degree(self) -> int:
        """Degree of the harmonic polynomials carrying this type."""
        if self.family == "complex":
            return self.a + self.b
        return self.a


@dataclass(frozen=True)
class SpectralValue:
    """Exact value when available, float always, plus how it was computed."""

    exact: Fraction | None
    approx: float
    provenance: str

    def __post_init__(self):
        if self.exact is not None and abs(float(self.exact) - self.approx) > 1e-9 * (
            1 + abs(self.approx)
        ):
            raise ValueError("exact and approximate values disagree")


def _exact_value(x: Fraction, provenance: str) -> SpectralValue:
    return SpectralValue(x, float(x), provenance)


def _product(factors) -> Fraction:
    out = Fraction(1)
    for num, den, name in factors:
        if den == 0:
            raise PoleError(f"vanishing factor {name}")
        out *= Fraction(num, den)
    return out


def log_gamma(x: float) -> float:
    """Natural log of the Gamma function for x > 0."""
    if x <= 0:
        raise ValueError(f"log_gamma needs a positive argument, got {x}")
    return math.lgamma(x)


def _check_label(case: CaseId, kt: KTypeLabel) -> None:
    if case.family != kt.family:
        raise ValueError(f"label family {kt.family} does not match case {case.family}")


def intertwiner_eigenvalue(case: CaseId, kt: KTypeLabel, nu) -> SpectralValue:
    """Eigenvalue of the intertwining operator normalized to 1 on constants.

    nu may be a Fraction (or int), giving an exact rational result, or any
    real number, giving a float.  The octonionic formula is a Gamma-function
    ratio, but the integer argument offsets telescope it to a finite product,
    so it too is rational in nu.
    """
    _check_label(case, kt)
    n = case.n
    exact_mode = isinstance(nu, (int, Fraction))
    nu = Fraction(nu) if exact_mode else float(nu)

    if case.family == "real":
        factors = [
            (n - 1 - nu + j, nu + j - 1, f"nu + {j} - 1 at j={j}")
            for j in range(1, kt.a + 1)
        ]
    elif case.family == "complex":
        factors = [
            (2 * n - nu + 2 * j, nu + 2 * j - 2, f"nu + 2*{j} - 2")
            for j in range(1, kt.a + 1)
        ] + [
            (2 * n - nu + 2 * l, nu + 2 * l - 2, f"nu + 2*{l} - 2")
            for l in range(1, kt.b + 1)
        ]
    elif case.family == "quaternionic":
        r = (kt.a - kt.b) // 2
        s = (kt.a + kt.b) // 2
        factors = [
            (4 * n + 2 - nu + 2 * j, nu + 2 * j - 4, f"nu + 2*{j} - 4")
            for j in range(1, r + 1)
        ] + [
            (4 * n + 4 - nu + 2 * l, nu + 2 * l - 2, f"nu + 2*{l} - 2")
            for l in range(1, s + 1)
        ]
    else:
        return _octonion_eigenvalue(kt, nu, exact_mode)

    if exact_mode:
        return _exact_value(_product(factors), "rational-product")
    value = 1.0
    for num, den, name in factors:
        if den == 0:
            raise PoleError(f"vanishing factor {name}")
        value *= num / den
    return SpectralValue(None, value, "float-product")


def octonion_r_from_nu(nu) -> Fraction | float:
    """The octonionic formulas use r with nu = 11 - r."""
    return 11 - nu


def _octonion_eigenvalue(kt: KTypeLabel, nu, exact_mode: bool) -> SpectralValue:
    # The Gamma ratio Gamma(b + h + i_max)/Gamma(b + h) over Gamma(b - h + ...)
    # telescopes to a finite product because the argument offsets j + k and k
    # are integers.  The product is the analytic continuation of the ratio, so
    # it is used for every r, exactly when nu is rational.
    N, j = kt.a, kt.b
    k = (N - j) // 2
    r = octonion_r_from_nu(nu)
    factors = [
        (11 + r + 2 * i, 11 - r + 2 * i, f"11 - r + {2 * i} at i={i}")
        for i in range(j + k)
    ] + [
        (5 + r + 2 * i, 5 - r + 2 * i, f"5 - r + {2 * i} at i={i}")
        for i in range(k)
    ]
    if exact_mode:
        return _exact_value(_product(factors), "rational-telescoped")
    value = 1.0
    for num, den, name in factors:
        if den == 0:
            raise PoleError(f"vanishing factor {name}")
        value *= num / den
    return SpectralValue(None, value, "float-telescoped")


def deltab_eigenvalue(case: CaseId, kt: KTypeLabel) -> int:
    """Eigenvalue of the CR-Laplacian on the K-type, a nonnegative integer."""
    _check_label(case, kt)
    n = case.n
    if case.family == "real":
        k = kt.a
        return k * (k + n - 1)
    if case.family == "complex":
        k = kt.a + kt.b
        j = kt.a - kt.b
        return k * (k + 2 * n) - j * j
    if case.family == "quaternionic":
        p, q = kt.a, kt.b
        return p * (p + 4 * n + 2) - q * (q + 2)
    N, j = kt.a, kt.b
    return N * (N + 14) - j * (j + 6)


def yamabe_eigenvalue(n: int, k: int) -> Fraction:
    """(k + (n-2)/2)(k + n/2): conformal-Laplacian eigenvalue on degree k."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return (k + Fraction(n - 2, 2)) * (k + Fraction(n, 2))


@dataclass(frozen=True)
class SpecialNuReport:
    """Both sides of the distinguished-parameter identity for one label.

    lhs: the scaled intertwiner eigenvalue; rhs: the closed-form product.
    shifted_lhs subtracts the constant part; deltab is the CR-Laplacian
    eigenvalue it must equal (families with a second identity only).
    degenerate marks the real n = 2 case, where the normalizing factor
    (n-2)/2 vanishes and the identity is replaced by a pole report.
    """

    lhs: SpectralValue | None
    rhs: SpectralValue | None
    shifted_lhs: Fraction | None = None
    deltab: int | None = None
    degenerate: bool = False
    note: str = ""


def special_nu_identity(case: CaseId, kt: KTypeLabel) -> SpecialNuReport:
    _check_label(case, kt)
    n = case.n

    if case.family == "real":
        if n == 2:
            note = "degenerate at n = 2: (n-2)/2 = 0"
            try:
                intertwiner_eigenvalue(case, kt, Fraction(0))
                note += "; a_k(0) is finite"
            except PoleError as exc:
                note += f"; a_k(0) pole: {exc}"
            return SpecialNuReport(None, None, degenerate=True, note=note)
        a = intertwiner_eigenvalue(case, kt, case.special_nu)
        lhs = a.exact * Fraction(n, 2) * Fraction(n - 2, 2)
        rhs = yamabe_eigenvalue(n, kt.a)
        return SpecialNuReport(
            _exact_value(lhs, "rational-product"),
            _exact_value(rhs, "closed-form"),
        )

    if case.family == "complex":
        a = intertwiner_eigenvalue(case, kt, case.special_nu)
        lhs = a.exact * n * n
        rhs = Fraction((2 * kt.a + n) * (2 * kt.b + n))
        return SpecialNuReport(
            _exact_value(lhs, "rational-product"),
            _exact_value(rhs, "closed-form"),
            shifted_lhs=rhs - n * n,
            deltab=deltab_eigenvalue(case, kt),
        )

    if case.family == "quaternionic":
        a = intertwiner_eigenvalue(case, kt, case.special_nu)
        const = Fraction(2 * n * (2 * n + 2))
        lhs = a.exact * const
        r = (kt.a - kt.b) // 2
        s = (kt.a + kt.b) // 2
        rhs = Fraction((2 * n + 2 * r) * (2 * n + 2 + 2 * s))
        return SpecialNuReport(
            _exact_value(lhs, "rational-product"),
            _exact_value(rhs, "closed-form"),
            shifted_lhs=rhs - const,
            deltab=deltab_eigenvalue(case, kt),
        )

    a = intertwiner_eigenvalue(case, kt, case.special_nu)  # r = 1
    N, j = kt.a, kt.b
    k = (N - j) // 2
    lhs = a.exact * 40
    rhs = Fraction(4 * (j + k + 5) * (k + 2))
    return SpecialNuReport(
        _exact_value(lhs, "rational-telescoped"),
        _exact_value(rhs, "closed-form"),
        shifted_lhs=rhs - 40,
        deltab=deltab_eigenvalue(case, kt),
    )


def theorem_bound_margin(case: CaseId, kt: KTypeLabel) -> Fraction:
    """C * lambda - degree, exactly; nonnegative on every valid label."""
    lam = deltab_eigenvalue(case, kt)
    return case.sharp_constant * lam - kt.degree


def equality_labels(case: CaseId, max_degree: int) -> list[KTypeLabel]:
    """Labels where the bound margin vanishes (for exhaustive checks)."""
    out = []
    for kt in enumerate_ktypes(case, max_degree):
        if theorem_bound_margin(case, kt) == 0:
            out.append(kt)
    return out


def enumerate_ktypes(case: CaseId, max_degree: int) -> list[KTypeLabel]:
    """All valid labels of degree <= max_degree, duplicate-free."""
    if max_degree < 0:
        raise ValueError("max_degree must be >= 0")
    fam = case.family
    out: list[KTypeLabel] = []
    if fam == "real":
        out = [KTypeLabel(fam, k) for k in range(max_degree + 1)]
    elif fam == "complex":
        for k in range(max_degree + 1):
            for p in range(k + 1):
                out.append(KTypeLabel(fam, p, k - p))
    else:
        for a in range(max_degree + 1):
            for b in range(a % 2, a + 1, 2):
                out.append(KTypeLabel(fam, a, b))
    return out


def spectral_table(case: CaseId, max_degree: int, nu=None) -> list[dict]:
    """Serializable eigenvalue table used by the service and the CLI."""
    nu = case.special_nu if nu is None else nu
    rows = []
    for kt in enumerate_ktypes(case, max_degree):
        row: dict = {
            "case": case.family,
            "n": case.n,
            "label": [kt.a] if kt.b is None else [kt.a, kt.b],
            "nu": str(Fraction(nu)) if isinstance(nu, (int, Fraction)) else nu,
            "deltab": deltab_eigenvalue(case, kt),
            "margin": str(theorem_bound_margin(case, kt)),
        }
        try:
            val = intertwiner_eigenvalue(case, kt, nu)
            row["eigenvalue_exact"] = None if val.exact is None else str(val.exact)
            row["eigenvalue"] = val.approx
        except PoleError as exc:
            row["eigenvalue_exact"] = None
            row["eigenvalue"] = None
            row["pole"] = str(exc)
        rows.append(row)
    return rows
