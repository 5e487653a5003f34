"""Integer constants of the approximation scheme, computed without floats."""
from __future__ import annotations

from gmpy2 import iroot, mpq

from .rational import Rat, ceil_sqrt_int, rat


def q_const(d: int) -> int:
    """``ceil((5d)^(d/2))``: least ``q`` with ``q^2 >= (5d)^d``."""
    if d < 0:
        raise ValueError("negative dimension")
    return ceil_sqrt_int((5 * d) ** d)


def r_const(d: int) -> int:
    """``ceil(2 d^(3/2) q_d^2)``: least ``r`` with ``r^2 >= 4 d^3 q_d^4``."""
    q = q_const(d)
    return ceil_sqrt_int(4 * d ** 3 * q ** 4)


def s_bar(p: int) -> Rat:
    """Least ``m / 2^10`` that is ``>= 14 p 2^(p(p-1)/4)``."""
    if p < 0:
        raise ValueError("negative rank")
    target = (14 * 1024 * p) ** 4 * 2 ** (p * (p - 1))
    m, exact = iroot(target, 4)
    m = int(m)
    if not exact:
        m += 1
    return mpq(m, 1024)


def s_bar_exceeds(p: int) -> bool:
    """``s_bar(p)^4 >= s_p^4`` checked exactly (sanity helper)."""
    sb = s_bar(p)
    return sb ** 4 >= mpq((14 * p) ** 4 * 2 ** (p * (p - 1)))


def phi_const(r: int, k: int, eps) -> int:
    """``ceil(4 r sqrt(k / (3 eps)))`` via integer arithmetic."""
    eps = rat(eps)
    if not (0 < eps <= 1):
        raise ValueError("epsilon must lie in (0, 1]")
    en, ed = int(eps.numerator), int(eps.denominator)
    num = 16 * r * r * k * ed
    den = 3 * en
    return ceil_sqrt_int(-(-num // den))


def iteration_bound(k: int, p: int) -> Rat:
    """``(r_{k+p} s_bar_p + 1)^(p+1)``."""
    return (r_const(k + p) * s_bar(p) + 1) ** (p + 1)

