"""
Bernoulli numbers and generalized Bernoulli numbers of quadratic characters.

Conventions: ``B_1 = -1/2`` for the classical numbers, while the character-twisted value
at the trivial character is ``B_{1,1} = +1/2``. Values of ``B_{1, psi * omega^j}`` mod p
come from a Teichmueller sum, using ``omega(a) = a^p mod p^2``.
"""
import logging
import threading
from fractions import Fraction
from math import comb, gcd
from typing import List

from eisrank.core.config import settings
from eisrank.core.exceptions import (
    ConsistencyError,
    ExceptionalCharacterError,
    InvalidInputError,
)
from eisrank.services.dirichlet import QuadChar, char_eval
from eisrank.utils.numkernel import Residue, modinv, reduce_mod

logger = logging.getLogger(__name__)


class _BernoulliTable:
    """Memo of B_0..B_n, grown on demand behind a lock."""

    def __init__(self, initial: int):
        self._lock = threading.Lock()
        self._values: List[Fraction] = [Fraction(1)]
        self._extend(initial)

    def _extend(self, n: int) -> None:
        values = self._values
        for m in range(len(values), n + 1):
            if m > 1 and m % 2 == 1:
                values.append(Fraction(0))
                continue
            total = sum(comb(m + 1, i) * values[i] for i in range(m) if values[i])
            values.append(-total / (m + 1))

    def get(self, n: int) -> Fraction:
        if n >= len(self._values):
            with self._lock:
                if n >= len(self._values):
                    logger.debug(f"Extending Bernoulli table to index {n}")
                    self._extend(n)
        return self._values[n]


_table = _BernoulliTable(settings.BERNOULLI_CACHE_MAX)


def bernoulli(n: int) -> Fraction:
    if n < 0:
        raise InvalidInputError(f"bernoulli index must be >= 0, got {n}")
    return _table.get(n)


def bernoulli_poly(n: int, x: Fraction) -> Fraction:
    """B_n(x) = sum_i C(n, i) B_i x^(n-i)."""
    if n < 0:
        raise InvalidInputError(f"bernoulli_poly degree must be >= 0, got {n}")
    x = Fraction(x)
    return sum((comb(n, i) * bernoulli(i) * x ** (n - i) for i in range(n + 1)), Fraction(0))


def gen_bernoulli(chi: QuadChar, n: int) -> Fraction:
    """Generalized Bernoulli number B_{n,chi} = f^(n-1) sum_{a=1}^{f} chi(a) B_n(a/f).

    Args:
        chi: Quadratic or trivial character of conductor f.
        n: Index, at least 1.

    Returns:
        The exact rational value. For the trivial character this is ``bernoulli(n)``
        except at ``n = 1``, where it is ``+1/2``.
    """
    if n < 1:
        raise InvalidInputError(f"gen_bernoulli index must be >= 1, got {n}")
    if chi.is_trivial:
        return Fraction(1, 2) if n == 1 else bernoulli(n)
    if chi.parity != (-1) ** n:
        return Fraction(0)
    f = chi.conductor
    if n == 1:
        # B_1(x) = x - 1/2 and sum chi(a) = 0
        return Fraction(sum(char_eval(chi, a) * a for a in range(1, f)), f)
    total = sum(
        (char_eval(chi, a) * bernoulli_poly(n, Fraction(a, f)) for a in range(1, f) if gcd(a, f) == 1),
        Fraction(0),
    )
    return f ** (n - 1) * total


def b1_teichmuller_mod_p(psi: QuadChar, j: int, p: int) -> Residue:
    """B_{1, psi * omega^[j]} mod p.

    Args:
        psi: Quadratic character with p not dividing its conductor.
        j: Teichmueller exponent; only its class [j] mod p - 1 matters.
        p: Odd prime.

    Returns:
        The value reduced mod p.

    Raises:
        ExceptionalCharacterError: psi * omega^[j] is trivial or omega^-1.
        ConsistencyError: the Teichmueller sum is not divisible by p.
    """
    if p == 2 or psi.conductor % p == 0:
        raise InvalidInputError(f"need an odd prime p not dividing {psi.disc}, got {p}")
    jj = j % (p - 1)
    if jj == 0:
        if psi.is_trivial:
            raise ExceptionalCharacterError("B_{1,chi} at the trivial character is not p-integral here")
        return Residue.of(gen_bernoulli(psi, 1), p)
    if psi.is_trivial and jj == p - 2:
        raise ExceptionalCharacterError(f"B_{{1,omega^-1}} has a pole at p = {p}")

    f = psi.conductor
    modulus = p * p
    fp = f * p
    exponent = p * jj
    s = 0
    for a in range(1, fp):
        if gcd(a, fp) != 1:
            continue
        chi_a = char_eval(psi, a) if f > 1 else 1
        s += chi_a * pow(a, exponent, modulus) * a
    s %= modulus
    if s % p:
        raise ConsistencyError(f"Teichmueller sum for ({psi.disc}, {j}) is not divisible by {p}")
    return Residue(value=(s // p) * modinv(f, p) % p, modulus=p)


def kummer_b1_mod_p(j: int, p: int) -> Residue:
    """B_{1, omega^[j]} mod p from B_{[j]+1}/([j]+1), valid for 1 <= [j] <= p - 3."""
    jj = j % (p - 1)
    if not 1 <= jj <= p - 3:
        raise InvalidInputError(f"Kummer shortcut needs 1 <= [j] <= p - 3, got [j] = {jj}")
    return Residue.of(bernoulli(jj + 1) / (jj + 1), p)


def kubota_leopoldt_special_mod_p(psi: QuadChar, j: int, p: int) -> Residue:
    """-(1 - chi omega^-1 (p)) B_{1, chi omega^-1} mod p for chi = psi * omega^j.

    When p divides the conductor of chi * omega^-1 the Euler factor is 1.
    """
    shifted = j - 1
    if shifted % (p - 1) != 0:
        value = b1_teichmuller_mod_p(psi, shifted, p).value
        return Residue(value=(-value) % p, modulus=p)
    if psi.is_trivial:
        raise ExceptionalCharacterError(
            "trivial character: the special value is (p-1)/p * log_p, outside exact arithmetic"
        )
    euler = 1 - char_eval(psi, p)
    b1 = reduce_mod(gen_bernoulli(psi, 1), p)
    return Residue(value=(-euler * b1) % p, modulus=p)
