"""The truncated ramified ring R_{N,m} = GR(p^{N/2}, m)[π]/(π^2 - p).

An element is a0 + a1·π with a0, a1 in the Galois ring GR(p^k, m) = (Z/p^k)[x]/(f),
k = N/2, f the integer lift of the residue field modulus.  Conjugation sends π to -π;
σ lifts the p-power Frobenius of the residue field and fixes π.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Sequence, Tuple, Union

import sympy

from src.config import FIELD_ORDER_BOUND
from src.exceptions import (
    BadParametersError,
    BoundExceededError,
    DescriptorMismatchError,
    DivisionByZeroError,
)
from src.gf import FieldDescriptor, FieldElement, field_arith, field_descriptor

logger = logging.getLogger(__name__)

GRValue = Tuple[int, ...]
Valuation = Union[int, float]

INFINITY: float = math.inf


@dataclass(frozen=True)
class ChainRingDescriptor:
    """Parameters of R_{N,m}: π^N = 0, Witt coefficients of degree m."""

    p: int
    N: int
    m: int

    @property
    def k(self) -> int:
        """p-adic precision of the coefficients a0, a1."""
        return self.N // 2

    @property
    def modulus(self) -> int:
        return int(self.p**self.k)

    @property
    def residue_field(self) -> FieldDescriptor:
        return field_descriptor(self.p, 1, self.m)

    @property
    def order(self) -> int:
        return int(self.p ** (self.N * self.m))

    def to_json(self) -> dict:
        return {"p": self.p, "N": self.N, "m": self.m}


def ring_descriptor(p: int, N: int, m: int = 1) -> ChainRingDescriptor:
    """Validated ring descriptor.

    Raises:
        BadParametersError: If p is not an odd prime, N is odd or < 2, or m < 1
        TypeError: If p, N or m is not an int
    """
    for name, value in (("p", p), ("N", N), ("m", m)):
        if not isinstance(value, int) or isinstance(value, bool):
            raise TypeError(f"{name} must be int, got {type(value).__name__}")
    return _ring_descriptor(p, N, m)


@lru_cache(maxsize=None)
def _ring_descriptor(p: int, N: int, m: int) -> ChainRingDescriptor:
    if p == 2 or not sympy.isprime(p):
        raise BadParametersError(f"p must be an odd prime, got {p}", {"p": p})
    if N < 2 or N % 2:
        raise BadParametersError(f"N must be even and at least 2, got {N}", {"N": N})
    if m < 1:
        raise BadParametersError(f"m must be positive, got {m}", {"m": m})
    return ChainRingDescriptor(p=p, N=N, m=m)


# Galois ring arithmetic on coefficient tuples


def _gr_add(desc: ChainRingDescriptor, a: GRValue, b: GRValue) -> GRValue:
    mod = desc.modulus
    return tuple((x + y) % mod for x, y in zip(a, b))


def _gr_sub(desc: ChainRingDescriptor, a: GRValue, b: GRValue) -> GRValue:
    mod = desc.modulus
    return tuple((x - y) % mod for x, y in zip(a, b))


def _gr_scale(desc: ChainRingDescriptor, c: int, a: GRValue) -> GRValue:
    mod = desc.modulus
    return tuple((c * x) % mod for x in a)


@lru_cache(maxsize=None)
def _lifted_modulus(desc: ChainRingDescriptor) -> GRValue:
    return tuple(desc.residue_field.modulus)


def _gr_mul(desc: ChainRingDescriptor, a: GRValue, b: GRValue) -> GRValue:
    m, mod = desc.m, desc.modulus
    if m == 1:
        return ((a[0] * b[0]) % mod,)
    prod = [0] * (2 * m - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] += x * y
    f = _lifted_modulus(desc)
    for top in range(2 * m - 2, m - 1, -1):
        c = prod[top]
        if c:
            for j in range(m + 1):
                prod[top - m + j] -= c * f[j]
    return tuple(c % mod for c in prod[:m])


def _vp_int(c: int, p: int, cap: int) -> int:
    if c == 0:
        return cap
    v = 0
    while c % p == 0 and v < cap:
        c //= p
        v += 1
    return v


def _gr_vp(desc: ChainRingDescriptor, a: GRValue) -> int:
    return min(_vp_int(c, desc.p, desc.k) for c in a)


def _zero(desc: ChainRingDescriptor) -> GRValue:
    return (0,) * desc.m


def _one(desc: ChainRingDescriptor) -> GRValue:
    return (1,) + (0,) * (desc.m - 1)


def _gr_residue_code(desc: ChainRingDescriptor, a: GRValue) -> int:
    p = desc.p
    code = 0
    for c in reversed(a):
        code = code * p + (c % p)
    return code


def _gr_from_code(desc: ChainRingDescriptor, code: int) -> GRValue:
    out = []
    for _ in range(desc.m):
        code, d = divmod(code, desc.p)
        out.append(d)
    return tuple(out)


def _gr_inverse(desc: ChainRingDescriptor, a: GRValue) -> GRValue:
    code = _gr_residue_code(desc, a)
    if code == 0:
        raise DivisionByZeroError("Element of the Galois ring is not a unit")
    y = _gr_from_code(desc, field_arith(FieldElement(desc.residue_field, code), None, "inv").code)
    two = _gr_scale(desc, 2, _one(desc))
    for _ in range(max(1, math.ceil(math.log2(desc.k)) + 1)):
        y = _gr_mul(desc, y, _gr_sub(desc, two, _gr_mul(desc, a, y)))
    return y


def _gr_pow(desc: ChainRingDescriptor, a: GRValue, e: int) -> GRValue:
    acc, base = _one(desc), a
    while e:
        if e & 1:
            acc = _gr_mul(desc, acc, base)
        base = _gr_mul(desc, base, base)
        e >>= 1
    return acc


@lru_cache(maxsize=None)
def _sigma_images(desc: ChainRingDescriptor) -> Tuple[GRValue, ...]:
    """σ(x)^i for i < m, with σ(x) the Hensel lift of x^p to a root of f."""
    m = desc.m
    if m == 1:
        return (_one(desc),)
    f = _lifted_modulus(desc)
    x = (0, 1) + (0,) * (m - 2)

    def evaluate(coeffs: Sequence[int], y: GRValue) -> GRValue:
        acc = _zero(desc)
        for c in reversed(coeffs):
            acc = _gr_add(desc, _gr_mul(desc, acc, y), _gr_scale(desc, c, _one(desc)))
        return acc

    derivative = [i * f[i] for i in range(1, m + 1)]
    y = _gr_pow(desc, x, desc.p)
    for _ in range(desc.k + 1):
        y = _gr_sub(desc, y, _gr_mul(desc, evaluate(f, y), _gr_inverse(desc, evaluate(derivative, y))))
    images = [_one(desc)]
    for _ in range(1, m):
        images.append(_gr_mul(desc, images[-1], y))
    return tuple(images)


def _gr_sigma(desc: ChainRingDescriptor, a: GRValue) -> GRValue:
    if desc.m == 1:
        return a
    acc = _zero(desc)
    for c, img in zip(a, _sigma_images(desc)):
        if c:
            acc = _gr_add(desc, acc, _gr_scale(desc, c, img))
    return acc


# Chain ring elements


@dataclass(frozen=True)
class ChainRingElement:
    """a0 + a1·π in R_{N,m}, with a0 and a1 reduced mod p^{N/2}."""

    desc: ChainRingDescriptor
    a0: GRValue
    a1: GRValue

    def _check(self, other: "ChainRingElement") -> None:
        if not isinstance(other, ChainRingElement):
            raise TypeError(f"Expected ChainRingElement, got {type(other).__name__}")
        if other.desc != self.desc:
            raise DescriptorMismatchError("Ring elements from different descriptors")

    def __add__(self, other: "ChainRingElement") -> "ChainRingElement":
        return ring_arith(self, other, "add")

    def __sub__(self, other: "ChainRingElement") -> "ChainRingElement":
        return ring_arith(self, other, "sub")

    def __mul__(self, other: "ChainRingElement") -> "ChainRingElement":
        return ring_arith(self, other, "mul")

    def __neg__(self) -> "ChainRingElement":
        return ring_arith(self, None, "neg")

    def is_zero(self) -> bool:
        return not any(self.a0) and not any(self.a1)

    def __repr__(self) -> str:
        return f"ChainRingElement({self.a0} + {self.a1}·π)"


def ring_element(desc: ChainRingDescriptor, a0: Union[int, Sequence[int]] = 0, a1: Union[int, Sequence[int]] = 0) -> ChainRingElement:
    """Build a0 + a1·π from integers or coefficient vectors.

    Example:
        >>> R = ring_descriptor(3, 4)
        >>> ring_element(R, 1, 1).a1
        (1,)
    """

    def coerce(v: Union[int, Sequence[int]]) -> GRValue:
        if isinstance(v, int):
            return ((v % desc.modulus),) + (0,) * (desc.m - 1)
        coeffs = [int(c) % desc.modulus for c in v]
        if len(coeffs) > desc.m:
            raise BadParametersError(f"Too many coefficients for degree {desc.m}")
        return tuple(coeffs) + (0,) * (desc.m - len(coeffs))

    return ChainRingElement(desc, coerce(a0), coerce(a1))


def zero(desc: ChainRingDescriptor) -> ChainRingElement:
    return ChainRingElement(desc, _zero(desc), _zero(desc))


def one(desc: ChainRingDescriptor) -> ChainRingElement:
    return ChainRingElement(desc, _one(desc), _zero(desc))


def uniformizer(desc: ChainRingDescriptor) -> ChainRingElement:
    return ChainRingElement(desc, _zero(desc), _one(desc))


def ring_arith(a: ChainRingElement, b: Optional[ChainRingElement], op: str) -> ChainRingElement:
    """Apply one ring operation ("add", "sub", "mul" or "neg").

    Args:
        a: First operand
        b: Second operand (ignored for neg)
        op: Operation name

    Returns:
        Canonical result

    Raises:
        DescriptorMismatchError: If the operands live in different rings
        ValueError: If op is unknown

    Example:
        >>> R = ring_descriptor(3, 4)
        >>> pi = uniformizer(R)
        >>> ring_arith(pi, pi, "mul") == ring_element(R, 3)
        True
    """
    desc = a.desc
    if op == "neg":
        return ChainRingElement(desc, _gr_scale(desc, -1, a.a0), _gr_scale(desc, -1, a.a1))
    if b is None:
        raise ValueError(f"Operation {op} needs two operands")
    a._check(b)
    if op == "add":
        return ChainRingElement(desc, _gr_add(desc, a.a0, b.a0), _gr_add(desc, a.a1, b.a1))
    if op == "sub":
        return ChainRingElement(desc, _gr_sub(desc, a.a0, b.a0), _gr_sub(desc, a.a1, b.a1))
    if op == "mul":
        a0 = _gr_add(desc, _gr_mul(desc, a.a0, b.a0), _gr_scale(desc, desc.p, _gr_mul(desc, a.a1, b.a1)))
        a1 = _gr_add(desc, _gr_mul(desc, a.a0, b.a1), _gr_mul(desc, a.a1, b.a0))
        return ChainRingElement(desc, a0, a1)
    raise ValueError(f"Unknown ring operation: {op}")


def conjugate(a: ChainRingElement) -> ChainRingElement:
    """Galois conjugation a0 + a1π ↦ a0 - a1π."""
    return ChainRingElement(a.desc, a.a0, _gr_scale(a.desc, -1, a.a1))


def sigma(a: ChainRingElement) -> ChainRingElement:
    """Frobenius lift acting on the Witt coefficients, fixing π."""
    return ChainRingElement(a.desc, _gr_sigma(a.desc, a.a0), _gr_sigma(a.desc, a.a1))


def sigma_inverse(a: ChainRingElement) -> ChainRingElement:
    out = a
    for _ in range(a.desc.m - 1):
        out = sigma(out)
    return out


def pi_valuation(a: ChainRingElement) -> Valuation:
    """Largest v with a in (π^v); infinity for zero.

    Example:
        >>> R = ring_descriptor(3, 4)
        >>> pi_valuation(ring_element(R, 3))
        2
    """
    desc = a.desc
    v = min(2 * _gr_vp(desc, a.a0), 2 * _gr_vp(desc, a.a1) + 1)
    return INFINITY if v >= desc.N else v


def truncate(a: ChainRingElement, v: int) -> ChainRingElement:
    """Canonical residue of a modulo π^v."""
    desc = a.desc
    if v >= desc.N:
        return a
    m0 = desc.p ** ((v + 1) // 2)
    m1 = desc.p ** (v // 2)
    return ChainRingElement(desc, tuple(c % m0 for c in a.a0), tuple(c % m1 for c in a.a1))


def multiply_by_pi(a: ChainRingElement, e: int = 1) -> ChainRingElement:
    desc = a.desc
    out = a
    for _ in range(e):
        out = ChainRingElement(desc, _gr_scale(desc, desc.p, out.a1), out.a0)
    return out


def divide_by_pi_power(a: ChainRingElement, e: int) -> ChainRingElement:
    """Some x with π^e·x = a; the top e π-adic digits of x are set to zero.

    Raises:
        DivisionByZeroError: If a is not divisible by π^e
    """
    if pi_valuation(a) < e:
        raise DivisionByZeroError(f"Element is not divisible by π^{e}")
    desc = a.desc
    out = a
    for _ in range(e):
        out = ChainRingElement(desc, out.a1, tuple(c // desc.p for c in out.a0))
    return out


def unit_inverse(u: ChainRingElement) -> ChainRingElement:
    """Inverse of a unit via the norm u·conj(u) = a0^2 - p·a1^2.

    Raises:
        DivisionByZeroError: If u has positive valuation
    """
    desc = u.desc
    norm = _gr_sub(desc, _gr_mul(desc, u.a0, u.a0), _gr_scale(desc, desc.p, _gr_mul(desc, u.a1, u.a1)))
    try:
        inv_norm = _gr_inverse(desc, norm)
    except DivisionByZeroError as e:
        raise DivisionByZeroError("Element of positive π-valuation has no inverse") from e
    c = conjugate(u)
    return ChainRingElement(desc, _gr_mul(desc, c.a0, inv_norm), _gr_mul(desc, c.a1, inv_norm))


def residue(a: ChainRingElement) -> int:
    """Code of a mod π in the residue field F_{p^m}."""
    return _gr_residue_code(a.desc, a.a0)


def from_residue(desc: ChainRingDescriptor, code: int) -> ChainRingElement:
    """Digit lift of a residue field code."""
    return ChainRingElement(desc, _gr_from_code(desc, code), _zero(desc))


def teichmuller(desc: ChainRingDescriptor, code: int) -> ChainRingElement:
    """Multiplicative lift of a residue field element."""
    y = _gr_from_code(desc, code)
    for _ in range(desc.k):
        y = _gr_pow(desc, y, desc.p**desc.m)
    return ChainRingElement(desc, y, _zero(desc))


def enumerate_ring(desc: ChainRingDescriptor, bound: int = FIELD_ORDER_BOUND**2) -> Iterator[ChainRingElement]:
    """Yield every element of R_{N,m} once.

    Raises:
        BoundExceededError: If the ring is larger than the bound
    """
    if desc.order > bound:
        raise BoundExceededError(f"Ring of order {desc.order} exceeds bound {bound}")
    size = desc.modulus**desc.m
    for c0 in range(size):
        for c1 in range(size):
            yield ChainRingElement(desc, _digit_tuple(c0, desc), _digit_tuple(c1, desc))


def _digit_tuple(code: int, desc: ChainRingDescriptor) -> GRValue:
    out = []
    for _ in range(desc.m):
        code, d = divmod(code, desc.modulus)
        out.append(d)
    return tuple(out)


def to_json(a: ChainRingElement) -> list:
    return [list(a.a0), list(a.a1)]


def from_json(desc: ChainRingDescriptor, data: Sequence[Sequence[int]]) -> ChainRingElement:
    return ring_element(desc, list(data[0]), list(data[1]))
