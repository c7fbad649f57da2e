"""
Truncated q-expansions with exact coefficients.

A ``QExpansion`` holds ``a_0 .. a_prec`` over one coefficient ring (``ZZ``, ``QQ`` or
``Zmod(m)``) together with optional weight / level / nebentypus metadata. Every operation
returns a fresh series truncated to the smallest input precision.
"""
import logging
from fractions import Fraction
from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict

from eisrank.core.exceptions import InvalidInputError, NonInvertibleError, RingMismatchError
from eisrank.services.bernoulli import bernoulli, gen_bernoulli
from eisrank.services.dirichlet import TRIVIAL, QuadChar, char_eval, char_product
from eisrank.utils.numkernel import (
    factorize,
    is_squarefree,
    is_squarefull,
    pairwise_coprime,
    prime_divisors,
    reduce_mod as reduce_scalar,
)

logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction]

CUSPFORM_WEIGHTS = (12, 16, 18, 20, 22, 26)


class CoefficientRing(BaseModel):
    """ZZ, QQ or Z/mZ."""

    model_config = ConfigDict(frozen=True)

    kind: str
    modulus: Optional[int] = None

    def coerce(self, x: Scalar) -> Scalar:
        if self.kind == "Zmod":
            return reduce_scalar(x, self.modulus)
        if self.kind == "QQ":
            return Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise InvalidInputError(f"{x} is not an integer")
            return x.numerator
        return int(x)

    def __str__(self) -> str:
        return f"Z/{self.modulus}Z" if self.kind == "Zmod" else self.kind


ZZ = CoefficientRing(kind="ZZ")
QQ = CoefficientRing(kind="QQ")


def Zmod(m: int) -> CoefficientRing:
    if m < 2:
        raise InvalidInputError(f"residue ring modulus must be >= 2, got {m}")
    return CoefficientRing(kind="Zmod", modulus=m)


class QExpansion:
    """Immutable truncated q-series ``sum_{n<=prec} a_n q^n``."""

    __slots__ = ("coeffs", "ring", "weight", "level", "nebentypus")

    def __init__(
        self,
        coeffs: Iterable[Scalar],
        ring: CoefficientRing = QQ,
        weight: Optional[int] = None,
        level: int = 1,
        nebentypus: QuadChar = TRIVIAL,
    ):
        values = tuple(ring.coerce(c) for c in coeffs)
        if not values:
            raise InvalidInputError("a q-expansion needs at least the constant term")
        object.__setattr__(self, "coeffs", values)
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "weight", weight)
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "nebentypus", nebentypus)

    def __setattr__(self, name, value):
        raise AttributeError("QExpansion is immutable")

    @property
    def prec(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> Scalar:
        return self.coeffs[n]

    def __len__(self) -> int:
        return len(self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QExpansion):
            return NotImplemented
        return self.ring == other.ring and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.ring, self.coeffs))

    def __repr__(self) -> str:
        head = ", ".join(str(c) for c in self.coeffs[:6])
        return f"QExpansion(prec={self.prec}, ring={self.ring}, coeffs=[{head}, ...])"

    def _with(self, coeffs: Iterable[Scalar], **meta) -> "QExpansion":
        params = dict(ring=self.ring, weight=self.weight, level=self.level, nebentypus=self.nebentypus)
        params.update(meta)
        return QExpansion(coeffs, **params)

    def _with_level(self, level: int) -> "QExpansion":
        return self._with(self.coeffs, level=level)

    def __add__(self, other: "QExpansion") -> "QExpansion":
        return add(self, other)

    def __sub__(self, other: "QExpansion") -> "QExpansion":
        return sub(self, other)

    def __mul__(self, other: Union["QExpansion", Scalar]) -> "QExpansion":
        if isinstance(other, QExpansion):
            return multiply(self, other)
        return scale(self, other)

    def __rmul__(self, other: Scalar) -> "QExpansion":
        return scale(self, other)

    def __neg__(self) -> "QExpansion":
        return scale(self, -1)


def _check_ring(f: QExpansion, g: QExpansion) -> int:
    if f.ring != g.ring:
        raise RingMismatchError(f"cannot combine series over {f.ring} and {g.ring}")
    return min(f.prec, g.prec)


def from_coefficients(coeffs: Sequence[Scalar], ring: CoefficientRing = QQ, **meta) -> QExpansion:
    return QExpansion(coeffs, ring=ring, **meta)


def one(prec: int, ring: CoefficientRing = ZZ) -> QExpansion:
    return QExpansion([1] + [0] * prec, ring=ring, weight=0)


def truncate(f: QExpansion, prec: int) -> QExpansion:
    if prec < 0:
        raise InvalidInputError(f"precision must be >= 0, got {prec}")
    return f._with(f.coeffs[: prec + 1])


def add(f: QExpansion, g: QExpansion) -> QExpansion:
    n = _check_ring(f, g)
    return f._with(a + b for a, b in zip(f.coeffs[: n + 1], g.coeffs[: n + 1]))


def sub(f: QExpansion, g: QExpansion) -> QExpansion:
    n = _check_ring(f, g)
    return f._with(a - b for a, b in zip(f.coeffs[: n + 1], g.coeffs[: n + 1]))


def scale(f: QExpansion, c: Scalar) -> QExpansion:
    c = f.ring.coerce(c)
    return f._with(c * a for a in f.coeffs)


def multiply(f: QExpansion, g: QExpansion) -> QExpansion:
    n = _check_ring(f, g)
    out: List[Scalar] = [0] * (n + 1)
    gs = g.coeffs
    for i, a in enumerate(f.coeffs[: n + 1]):
        if not a:
            continue
        for j in range(n - i + 1):
            b = gs[j]
            if b:
                out[i + j] += a * b
    weight = f.weight + g.weight if f.weight is not None and g.weight is not None else None
    level = f.level * g.level // gcd(f.level, g.level)
    nebentypus = char_product(f.nebentypus, g.nebentypus)
    return QExpansion(out, ring=f.ring, weight=weight, level=level, nebentypus=nebentypus)


def power(f: QExpansion, e: int) -> QExpansion:
    if e < 0:
        raise InvalidInputError("only nonnegative powers of a q-expansion are defined")
    result = one(f.prec, f.ring)
    base = f
    while e:
        if e & 1:
            result = multiply(result, base)
        e >>= 1
        if e:
            base = multiply(base, base)
    return result


def reduce_mod(f: QExpansion, m: int) -> QExpansion:
    """Reduce every coefficient into Z/mZ; a non-unit denominator raises NonInvertibleError."""
    return QExpansion(f.coeffs, ring=Zmod(m), weight=f.weight, level=f.level, nebentypus=f.nebentypus)


def congruent_from(f: QExpansion, g: QExpansion, m: int, n0: int = 1) -> bool:
    """True when a_n = b_n mod m for every n0 <= n <= min(prec).

    The two series may live over different rings; only their images mod m are compared.
    """
    return first_incongruence(f, g, m, n0) is None


def first_incongruence(f: QExpansion, g: QExpansion, m: int, n0: int = 1) -> Optional[int]:
    n = min(f.prec, g.prec)
    for i in range(n0, n + 1):
        if reduce_scalar(f.coeffs[i] - g.coeffs[i], m):
            return i
    return None


def theta(f: QExpansion, j: int = 1) -> QExpansion:
    """theta^j = (q d/dq)^j, multiplying a_n by n^j."""
    if j < 0:
        raise InvalidInputError(f"theta exponent must be >= 0, got {j}")
    if j == 0:
        return f
    weight = f.weight + 2 * j if f.weight is not None else None
    return f._with((n ** j * a for n, a in enumerate(f.coeffs)), weight=weight)


def p_deplete(f: QExpansion, p: int) -> QExpansion:
    return f._with(0 if n % p == 0 else a for n, a in enumerate(f.coeffs))


def dilate(f: QExpansion, ell: int) -> QExpansion:
    """F(q^ell), truncated to the precision of F."""
    out = [0] * (f.prec + 1)
    for n in range(0, f.prec // ell + 1):
        out[n * ell] = f.coeffs[n]
    return f._with(out, level=f.level * ell)


def twist(f: QExpansion, chi: QuadChar) -> QExpansion:
    """Coefficientwise twist a_n -> chi(n) a_n."""
    if chi.is_trivial:
        return f
    return f._with(
        (char_eval(chi, n) * a for n, a in enumerate(f.coeffs)),
        level=f.level * chi.conductor ** 2,
    )


# --- Eisenstein series ---------------------------------------------------------------


def sigma(k: int, n: int) -> int:
    """Divisor power sum sigma_k(n)."""
    total = 1
    for p, e in factorize(n):
        pk = p ** k
        total *= sum(pk ** i for i in range(e + 1))
    return total


def _validate_type(psi1: QuadChar, psi2: QuadChar, k: int, n_plus: int, n_minus: int, n_zero: int) -> None:
    if k < 2:
        raise InvalidInputError(f"weight must be >= 2, got {k}")
    if psi1.parity * psi2.parity != (-1) ** k:
        raise InvalidInputError(
            f"parity violation: ({psi1.disc}, {psi2.disc}) at -1 is not (-1)^{k}"
        )
    if min(n_plus, n_minus, n_zero) < 1:
        raise InvalidInputError("level factors must be positive")
    if not is_squarefree(n_plus * n_minus):
        raise InvalidInputError(f"N+ N- = {n_plus * n_minus} must be squarefree")
    if not is_squarefull(n_zero):
        raise InvalidInputError(f"N0 = {n_zero} must be squarefull")
    if not pairwise_coprime((n_plus, n_minus, n_zero)):
        raise InvalidInputError(f"({n_plus}, {n_minus}, {n_zero}) are not pairwise coprime")


def eisenstein_constant_term(
    psi1: QuadChar, psi2: QuadChar, k: int, n_plus: int = 1, n_minus: int = 1, n_zero: int = 1
) -> Fraction:
    """-delta_{psi1=1} B_{1,psi2} B_{k,psi1} / k times the Euler factors at N+, N- and N0.

    With psi2 trivial this is -B_k/(2k) * prod(...).
    """
    if not psi1.is_trivial:
        return Fraction(0)
    value = -gen_bernoulli(psi2, 1) * gen_bernoulli(psi1, k) / k
    if not value:
        return value
    for ell in prime_divisors(n_plus):
        value *= 1 - char_eval(psi1, ell) * ell ** (k - 1)
    for ell in prime_divisors(n_minus):
        value *= 1 - char_eval(psi2, ell)
    for ell in prime_divisors(n_zero):
        value *= (1 - char_eval(psi1, ell) * ell ** (k - 1)) * (1 - char_eval(psi2, ell))
    return value


def eisenstein(
    psi1: QuadChar,
    psi2: QuadChar,
    k: int,
    n_plus: int = 1,
    n_minus: int = 1,
    n_zero: int = 1,
    prec: int = 100,
    ring: CoefficientRing = QQ,
) -> QExpansion:
    """Eisenstein series with coefficients sigma_{k-1}^{psi1,psi2,(N)}(n).

    The n-th coefficient sums psi1(n/d) psi2(d) d^(k-1) over divisors d of n with
    (d, N+) = 1, (n/d, N-) = 1 and (n, N0) = 1.

    Args:
        psi1: Character attached to n/d.
        psi2: Character attached to d.
        k: Weight, at least 2, with (psi1 psi2)(-1) = (-1)^k.
        n_plus: Squarefree level factor where divisors d must be prime to it.
        n_minus: Squarefree level factor where n/d must be prime to it.
        n_zero: Squarefull level factor where n itself must be prime to it.
        prec: Highest coefficient index.
        ring: Coefficient ring; the constant term must be representable in it.

    Returns:
        The truncated series with weight, level and nebentypus metadata.
    """
    _validate_type(psi1, psi2, k, n_plus, n_minus, n_zero)
    level = psi1.conductor * psi2.conductor * n_plus * n_minus * n_zero
    if k == 2 and level == 1:
        logger.info("E_2 of level 1 is only quasi-modular; returning the formal series")

    constant = eisenstein_constant_term(psi1, psi2, k, n_plus, n_minus, n_zero)
    try:
        ring.coerce(constant)
    except NonInvertibleError as e:
        raise NonInvertibleError(
            f"constant term {constant} has no image in {ring}; build over QQ and reduce"
        ) from e

    chi1 = [char_eval(psi1, m) for m in range(prec + 1)]
    coeffs: List[int] = [0] * (prec + 1)
    for d in range(1, prec + 1):
        if gcd(d, n_plus) != 1:
            continue
        w = char_eval(psi2, d)
        if not w:
            continue
        w *= d ** (k - 1)
        for m in range(1, prec // d + 1):
            if not chi1[m] or gcd(m, n_minus) != 1:
                continue
            n = d * m
            if n_zero > 1 and gcd(n, n_zero) != 1:
                continue
            coeffs[n] += chi1[m] * w
    series = [constant] + coeffs[1:]
    return QExpansion(series, ring=ring, weight=k, level=level, nebentypus=char_product(psi1, psi2))


def eisenstein_level1(k: int, prec: int, ring: CoefficientRing = ZZ) -> QExpansion:
    """Normalized G_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n."""
    if k < 4 or k % 2:
        raise InvalidInputError(f"level-1 Eisenstein series need even k >= 4, got {k}")
    factor = -Fraction(2 * k) / bernoulli(k)
    coeffs = [Fraction(1)] + [factor * sigma(k - 1, n) for n in range(1, prec + 1)]
    return QExpansion(coeffs, ring=ring, weight=k, level=1)


# --- stabilization ---------------------------------------------------------------------


def _valuation(x: Scalar, ell: int) -> float:
    x = Fraction(x)
    if x == 0:
        return float("inf")
    v = 0
    num, den = x.numerator, x.denominator
    while num % ell == 0:
        num //= ell
        v += 1
    while den % ell == 0:
        den //= ell
        v -= 1
    return v


def stabilize(
    f: QExpansion,
    ell: int,
    sign: str,
    alpha: Optional[Scalar] = None,
    beta: Optional[Scalar] = None,
    a_ell: Optional[Scalar] = None,
    eps_ell: Optional[int] = None,
    weight: Optional[int] = None,
) -> QExpansion:
    """Apply the (ell+), (ell-) or (ell0) stabilization operator.

    * ``+``: F(q) - beta F(q^ell)
    * ``-``: F(q) - alpha F(q^ell)
    * ``0``: F(q) - a_ell F(q^ell) + eps(ell) ell^(k-1) F(q^(ell^2))

    ``alpha`` and ``beta`` must satisfy alpha + beta = a_ell, alpha beta = ell^(k-1) eps(ell)
    and ord_ell(alpha) <= ord_ell(beta). ``a_ell`` defaults to the coefficient of q^ell and
    ``eps_ell`` to the nebentypus at ell.
    """
    k = weight if weight is not None else f.weight
    if k is None:
        raise InvalidInputError("stabilize needs a weight")
    if f.level % ell == 0:
        raise InvalidInputError(f"{ell} divides the level {f.level}")
    if sign not in ("+", "-", "0"):
        raise InvalidInputError(f"sign must be '+', '-' or '0', got {sign!r}")
    if a_ell is None:
        a_ell = f.coeffs[ell]
    if eps_ell is None:
        eps_ell = char_eval(f.nebentypus, ell)
    norm = ell ** (k - 1) * eps_ell

    if sign == "0":
        return sub(
            f,
            sub(scale(dilate(f, ell), a_ell), scale(dilate(f, ell * ell), norm)),
        )._with_level(f.level * ell * ell)

    if alpha is None or beta is None:
        raise InvalidInputError("(ell+) and (ell-) need both alpha and beta")
    if f.ring.kind == "Zmod":
        ok = f.ring.coerce(alpha + beta) == f.ring.coerce(a_ell) and f.ring.coerce(alpha * beta) == f.ring.coerce(norm)
    else:
        ok = Fraction(alpha) + Fraction(beta) == Fraction(a_ell) and Fraction(alpha) * Fraction(beta) == norm
        ok = ok and _valuation(alpha, ell) <= _valuation(beta, ell)
    if not ok:
        raise InvalidInputError(
            f"(alpha, beta) = ({alpha}, {beta}) are not the ordered roots of X^2 - {a_ell} X + {norm}"
        )
    root = beta if sign == "+" else alpha
    return sub(f, scale(dilate(f, ell), root))._with_level(f.level * ell)


def eisenstein_roots(psi1: QuadChar, psi2: QuadChar, k: int, ell: int) -> Tuple[int, int]:
    """The Hecke roots (alpha, beta) = (psi1(ell), psi2(ell) ell^(k-1)) of an Eisenstein series."""
    return char_eval(psi1, ell), char_eval(psi2, ell) * ell ** (k - 1)


def stabilize_many(
    f: QExpansion,
    plus: int = 1,
    minus: int = 1,
    zero: int = 1,
    psi1: QuadChar = TRIVIAL,
    psi2: QuadChar = TRIVIAL,
    roots: Optional[dict] = None,
) -> QExpansion:
    """Iterate ``stabilize`` over the primes of (N+, N-, N0).

    ``roots`` maps ell to (alpha, beta). Missing primes use the Eisenstein roots of
    (psi1, psi2), which is the right choice whenever f is congruent to an Eisenstein series.
    """
    if f.weight is None:
        raise InvalidInputError("stabilize_many needs a weight")
    roots = roots or {}
    for sign, part in (("+", plus), ("-", minus)):
        for ell in prime_divisors(part):
            alpha, beta = roots.get(ell, eisenstein_roots(psi1, psi2, f.weight, ell))
            f = stabilize(f, ell, sign, alpha=alpha, beta=beta, a_ell=alpha + beta)
    for ell in prime_divisors(zero):
        f = stabilize(f, ell, "0")
    return f


# --- level one cusp forms --------------------------------------------------------------


def _eta_cubed(prec: int) -> List[int]:
    """prod (1 - q^n)^3 = sum_k (-1)^k (2k+1) q^(k(k+1)/2), to q^prec."""
    out = [0] * (prec + 1)
    k = 0
    while k * (k + 1) // 2 <= prec:
        out[k * (k + 1) // 2] = (-1) ** k * (2 * k + 1)
        k += 1
    return out


def delta(prec: int, ring: CoefficientRing = ZZ) -> QExpansion:
    """Ramanujan's Delta = q prod (1 - q^n)^24, truncated at q^prec."""
    if prec < 1:
        raise InvalidInputError(f"delta needs prec >= 1, got {prec}")
    cube = QExpansion(_eta_cubed(prec - 1), ring=ring)
    p24 = cube
    for _ in range(3):
        p24 = multiply(p24, p24)
    return QExpansion([0] + list(p24.coeffs), ring=ring, weight=12, level=1)


_CUSPFORM_RECIPES = {
    12: (0, 0),
    16: (1, 0),
    18: (0, 1),
    20: (2, 0),
    22: (1, 1),
    26: (2, 1),
}


def level1_cuspform(k: int, prec: int, ring: CoefficientRing = ZZ) -> QExpansion:
    """The normalized cusp form Delta * G4^a * G6^b spanning the one-dimensional S_k."""
    if k not in _CUSPFORM_RECIPES:
        raise InvalidInputError(f"S_{k} is not one-dimensional; k must be one of {CUSPFORM_WEIGHTS}")
    a, b = _CUSPFORM_RECIPES[k]
    form = delta(prec, ring)
    if a:
        form = multiply(form, power(eisenstein_level1(4, prec, ring), a))
    if b:
        form = multiply(form, eisenstein_level1(6, prec, ring))
    return form._with(form.coeffs, weight=k, level=1)


def coefficient_source(
    f: Union[QExpansion, Sequence[Scalar]], weight: Optional[int] = None, level: int = 1
) -> QExpansion:
    """Prepare a series for ``verify_descent``: it needs a weight and exact coefficients.

    A plain coefficient list is wrapped over QQ. An explicit ``weight`` overrides the
    series metadata.
    """
    if not isinstance(f, QExpansion):
        f = QExpansion(f, ring=QQ, weight=weight, level=level)
    elif weight is not None:
        f = f._with(f.coeffs, weight=weight)
    if f.weight is None:
        raise InvalidInputError("a coefficient source needs a weight")
    return f
