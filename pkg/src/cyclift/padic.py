"""Finite-precision arithmetic in K = Q_{p^d}(pi), pi^e = sign * p.

An element is pi^shift * sum_{j<e} a_j pi^j with a_j in the Galois ring
Z[y]/(p^M, modulus).  Every element carries an absolute precision ``aprec``
(a rational valuation): digits at valuation >= aprec are meaningless and are
never reported.  Valuations are normalized by v(p) = 1.

Also here: Gauss valuations and residues of Laurent polynomials over K,
Newton polygons, piecewise-linear profiles, Hensel lifting and p-th roots.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .errors import BadInput, NeedsExtension, PrecisionError
from .fields import FFElem, FiniteField, LaurentPoly, embed, make_field

Rational = Union[int, Fraction]

GUARD = 12  # extra p-adic digits of relative precision kept in mantissas
EXACT = Fraction(10 ** 12)  # precision of exact zeros


def _vp_int(n: int, p: int) -> Optional[int]:
    if n == 0:
        return None
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def parse_rational(s: Union[str, int, Fraction]) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    try:
        return Fraction(str(s).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise BadInput(f"bad rational {s!r}") from exc


def rat_to_str(x: Rational) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


class LocalField:
    """Descriptor of Q_{p^d}(pi) with pi^e = sign * p and absolute precision
    prec / e."""

    def __init__(self, p: int, d: int = 1, e: int = 1, prec: int = 40, sign: int = 1):
        if e < 1 or d < 1 or prec < 1:
            raise BadInput("need d, e, prec >= 1")
        if sign not in (1, -1):
            raise BadInput("sign must be +1 or -1")
        self.residue_field: FiniteField = make_field(p, d)
        self.p, self.d, self.e, self.prec, self.sign = p, d, e, prec, sign
        self.cap = Fraction(prec, e)
        self.M = max(1, ceil(self.cap)) + GUARD
        self.pM = p ** self.M
        # monic integer lift of the residue modulus, low degree first
        self.modulus = list(self.residue_field.modulus)
        bits = (2 * self.M * p.bit_length()) + (e * d).bit_length() + 2
        self._bytes = (bits + 7) // 8
        self.zero = LocalElement(self, 0, self._zero_mant(), EXACT)
        self.one = self.from_int(1)

    def __repr__(self) -> str:
        s = "+" if self.sign > 0 else "-"
        return f"LocalField(p={self.p}, d={self.d}, e={self.e}, prec={self.prec}, sign={s})"

    def key(self) -> Tuple[int, int, int, int, int]:
        return (self.p, self.d, self.e, self.prec, self.sign)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LocalField) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def _zero_mant(self) -> Tuple[int, ...]:
        return (0,) * (self.e * self.d)

    # constructors ---------------------------------------------------------

    def __call__(self, value: Any) -> "LocalElement":
        if isinstance(value, LocalElement):
            if value.field == self:
                return value
            return embed_element(value, self)
        if isinstance(value, bool):
            value = int(value)
        if isinstance(value, int):
            return self.from_int(value)
        if isinstance(value, Fraction):
            return self.from_rational(value)
        if isinstance(value, FFElem):
            return self.teichmuller(value)
        raise BadInput(f"cannot coerce {value!r} into {self}")

    def from_int(self, n: int) -> "LocalElement":
        return self.from_rational(Fraction(n))

    def from_rational(self, q: Rational) -> "LocalElement":
        q = Fraction(q)
        if q == 0:
            return self.zero
        a, b = q.numerator, q.denominator
        va, vb = _vp_int(a, self.p), _vp_int(b, self.p)
        a //= self.p ** va
        b //= self.p ** vb
        mant = [0] * (self.e * self.d)
        k = va - vb
        unit = a * pow(b, -1, self.pM) * (self.sign if k % 2 else 1)  # p^k = (sign pi^e)^k
        mant[0] = unit % self.pM
        return _make(self, k * self.e, tuple(mant), EXACT)

    def pi(self) -> "LocalElement":
        return self.pi_power(1)

    def pi_power(self, k: int) -> "LocalElement":
        mant = [0] * (self.e * self.d)
        mant[0] = 1
        return _make(self, k, tuple(mant), EXACT)

    def p_power(self, q: Rational) -> "LocalElement":
        """p^q read as pi^{q e} (requires q e integral)."""
        k = Fraction(q) * self.e
        if k.denominator != 1:
            raise NeedsExtension(f"p^{q} needs e divisible by {Fraction(q).denominator}",
                                 Fraction(q).denominator)
        return self.pi_power(int(k))

    def from_gr(self, a: Sequence[int], shift: int = 0) -> "LocalElement":
        """Galois-ring element (length-d integer vector) times pi^shift."""
        mant = [0] * (self.e * self.d)
        for k, c in enumerate(a):
            mant[k] = c % self.pM
        return _make(self, shift, tuple(mant), EXACT)

    def teichmuller(self, x: FFElem) -> "LocalElement":
        if x.field != self.residue_field:
            x = embed(x, self.residue_field)
        if x.is_zero():
            return self.zero
        a = tuple(x.c)
        q = self.p ** self.d
        if self.d == 1:
            a = (pow(a[0], self.p ** (self.M - 1), self.pM),)
        else:
            for _ in range(self.M):
                a = _gr_pow(self, a, q)
        return self.from_gr(a)

    def naive_lift(self, x: FFElem) -> "LocalElement":
        if x.field != self.residue_field:
            x = embed(x, self.residue_field)
        return self.from_gr(x.c)

    def random_element(self, rng: Any, min_val: Rational = 0) -> "LocalElement":
        """A random element of valuation >= min_val (unit digits random)."""
        k = ceil(Fraction(min_val) * self.e)
        mant = tuple(rng.randrange(self.pM) for _ in range(self.e * self.d))
        return _make(self, k, mant, EXACT)

    def extend(self, e_factor: int = 1, d_factor: int = 1) -> "LocalField":
        return extend_field(self, e_factor, d_factor)

    def to_json(self) -> Dict[str, Any]:
        return {"p": self.p, "d": self.d, "e": self.e, "prec": self.prec,
                "sign": "+" if self.sign > 0 else "-"}

    @classmethod
    def from_json(cls, obj: Dict[str, Any]) -> "LocalField":
        try:
            sign = obj.get("sign", "+")
            return make_local_field(int(obj["p"]), int(obj.get("d", 1)), int(obj.get("e", 1)),
                                    int(obj.get("prec", 40)), -1 if sign in ("-", -1) else 1)
        except (KeyError, TypeError, ValueError) as exc:
            raise BadInput(f"malformed field JSON: {exc}") from exc


_FIELDS: Dict[Tuple[int, int, int, int, int], LocalField] = {}
_FIELDS_LOCK = threading.Lock()


def make_local_field(p: int, d: int = 1, e: int = 1, prec: int = 40, sign: int = 1) -> LocalField:
    """Cached LocalField constructor."""
    key = (p, d, e, prec, sign)
    with _FIELDS_LOCK:
        F = _FIELDS.get(key)
        if F is None:
            F = LocalField(p, d, e, prec, sign)
            _FIELDS[key] = F
        return F


lf_make = make_local_field


# ---------------------------------------------------------------------------
# Galois-ring helpers (vectors of length d, reduced mod p^M)


def _gr_mul(F: LocalField, a: Sequence[int], b: Sequence[int]) -> Tuple[int, ...]:
    d, pM = F.d, F.pM
    if d == 1:
        return ((a[0] * b[0]) % pM,)
    prod = [0] * (2 * d - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] += x * y
    for k in range(2 * d - 2, d - 1, -1):
        c = prod[k]
        if c:
            prod[k] = 0
            for i, m in enumerate(F.modulus[:d]):
                prod[k - d + i] -= c * m
    return tuple(x % pM for x in prod[:d])


def _gr_pow(F: LocalField, a: Tuple[int, ...], k: int) -> Tuple[int, ...]:
    result = tuple([1] + [0] * (F.d - 1))
    while k:
        if k & 1:
            result = _gr_mul(F, result, a)
        k >>= 1
        if k:
            a = _gr_mul(F, a, a)
    return result


def _gr_vp(F: LocalField, a: Sequence[int]) -> Optional[int]:
    vals = [v for v in (_vp_int(x, F.p) for x in a) if v is not None]
    return min(vals) if vals else None


def _gr_inv_unit(F: LocalField, a: Tuple[int, ...]) -> Tuple[int, ...]:
    """Inverse of a unit of the Galois ring by Newton iteration."""
    if F.d == 1:
        return (pow(a[0], -1, F.pM),)
    res = F.residue_field(tuple(x % F.p for x in a))
    if res.is_zero():
        raise ZeroDivisionError("not a unit")
    y = tuple(res.inverse().c)
    prec = 1
    two = tuple([2] + [0] * (F.d - 1))
    while prec < F.M:
        ay = _gr_mul(F, a, y)
        y = _gr_mul(F, y, tuple((t - s) % F.pM for t, s in zip(two, ay)))
        prec *= 2
    return y


# ---------------------------------------------------------------------------
# mantissa arithmetic


def _mant_mul(F: LocalField, A: Sequence[int], B: Sequence[int]) -> Tuple[int, ...]:
    """Product of two mantissas via Kronecker packing."""
    e, d, nb = F.e, F.d, F._bytes
    W = 2 * d - 1
    slots = 2 * e - 1

    def pack(X: Sequence[int]) -> int:
        buf = bytearray(nb * slots * W)
        for j in range(e):
            base = j * W
            for k in range(d):
                x = X[j * d + k]
                if x:
                    pos = (base + k) * nb
                    buf[pos:pos + nb] = x.to_bytes(nb, "little")
        return int.from_bytes(bytes(buf), "little")

    a, b = pack(A), pack(B)
    if a == 0 or b == 0:
        return F._zero_mant()
    raw = (a * b).to_bytes(nb * slots * W + nb, "little")
    coef = [[int.from_bytes(raw[(J * W + K) * nb:(J * W + K + 1) * nb], "little")
             for K in range(W)] for J in range(slots)]
    # reduce y^K for K >= d with the modulus
    if d > 1:
        mod = F.modulus
        for J in range(slots):
            row = coef[J]
            for K in range(W - 1, d - 1, -1):
                c = row[K]
                if c:
                    row[K] = 0
                    for i in range(d):
                        row[K - d + i] -= c * mod[i]
    # pi^{e + j} = sign * p * pi^j
    sp = F.sign * F.p
    out = [0] * (e * d)
    pM = F.pM
    for J in range(slots):
        row = coef[J]
        if J < e:
            for k in range(d):
                out[J * d + k] += row[k]
        else:
            j = J - e
            for k in range(d):
                out[j * d + k] += sp * row[k]
    return tuple(x % pM for x in out)


def _mant_shift_up(F: LocalField, A: Sequence[int], k: int) -> Tuple[int, ...]:
    """Mantissa of pi^k * A (k >= 0), same window."""
    if k == 0:
        return tuple(A)
    e, d, pM = F.e, F.d, F.pM
    q, r = divmod(k, e)
    f = pow(F.sign * F.p, q, pM) if q else 1
    out = [0] * (e * d)
    sp = F.sign * F.p
    for j in range(e):
        nj = j + r
        mult = f
        if nj >= e:
            nj -= e
            mult = f * sp
        for t in range(d):
            out[nj * d + t] = (A[j * d + t] * mult) % pM
    return tuple(out)


def _mant_val(F: LocalField, A: Sequence[int]) -> Optional[int]:
    """min_j (e v_p(a_j) + j), in units of 1/e; None if zero."""
    best = None
    e, d = F.e, F.d
    for j in range(e):
        v = _gr_vp(F, A[j * d:(j + 1) * d])
        if v is None:
            continue
        k = e * v + j
        if best is None or k < best:
            best = k
    return best


def _mant_strip(F: LocalField, A: Sequence[int], k: int) -> Tuple[int, ...]:
    """Mantissa of pi^{-k} A, assuming the result is integral."""
    if k == 0:
        return tuple(A)
    e, d, pM, p = F.e, F.d, F.pM, F.p
    out = [0] * (e * d)
    sgn = F.sign
    for i in range(e):
        q, r = divmod(i - k, e)  # pi^{i-k} = (sign p)^q pi^r with q <= 0
        for t in range(d):
            a = A[i * d + t]
            if not a:
                continue
            if q < 0:
                div = p ** (-q)
                a = a // div  # exact: v_p(a) >= -q by choice of k
                if (-q) % 2 and sgn < 0:
                    a = -a
            out[r * d + t] = a % pM
    return tuple(out)


def _make(F: LocalField, shift: int, mant: Sequence[int], aprec: Fraction) -> "LocalElement":
    aprec = Fraction(aprec)
    if aprec >= EXACT / 2:
        aprec = EXACT  # working-exact: digits are taken at face value
    else:
        aprec = min(aprec, Fraction(shift, F.e) + F.M)
    k = _mant_val(F, mant)
    if k is None or Fraction(shift + k, F.e) >= aprec:
        return LocalElement(F, 0, F._zero_mant(), aprec)
    return LocalElement(F, shift + k, _mant_strip(F, mant, k), aprec)


@dataclass(frozen=True)
class AtLeast:
    """Valuation outcome when all digits vanish below the tracked precision."""

    bound: Fraction

    def __str__(self) -> str:
        return f">={rat_to_str(self.bound)}"


class LocalElement:
    __slots__ = ("field", "shift", "mant", "aprec")

    def __init__(self, field: LocalField, shift: int, mant: Tuple[int, ...], aprec: Fraction):
        self.field = field
        self.shift = shift
        self.mant = mant
        self.aprec = aprec

    # queries ----------------------------------------------------------------

    def _is_zero_mant(self) -> bool:
        return not any(self.mant)

    def is_zero(self) -> bool:
        """Zero to the tracked precision."""
        return self._is_zero_mant()

    def is_exact_zero(self) -> bool:
        return self._is_zero_mant() and self.aprec >= EXACT

    def valuation_or_none(self) -> Optional[Fraction]:
        if self._is_zero_mant():
            return None
        return Fraction(self.shift, self.field.e)

    def valuation(self) -> Union[Fraction, AtLeast]:
        v = self.valuation_or_none()
        return v if v is not None else AtLeast(self.aprec)

    def val(self, where: object = None) -> Fraction:
        """Valuation, raising PrecisionError when undecidable."""
        v = self.valuation_or_none()
        if v is None:
            raise PrecisionError(f"valuation undecidable below {self.aprec}", where)
        return v

    def val_lower(self) -> Fraction:
        """A lower bound for the valuation (exact when decidable)."""
        v = self.valuation_or_none()
        return v if v is not None else self.aprec

    def unit_residue(self) -> FFElem:
        """Reduction of x / pi^{e v(x)}."""
        if self._is_zero_mant():
            raise PrecisionError("unit part of an element zero to precision")
        F = self.field
        return F.residue_field(tuple(x % F.p for x in self.mant[:F.d]))

    def residue(self) -> FFElem:
        F = self.field
        if self._is_zero_mant():
            if self.aprec <= 0:
                raise PrecisionError("residue undecidable")
            return F.residue_field.zero
        if self.shift < 0:
            raise BadInput("residue of a non-integral element")
        if self.shift > 0:
            return F.residue_field.zero
        return self.unit_residue()

    def digits(self) -> List[List[int]]:
        """Mantissa digits a_j as Galois-ring vectors, reduced below aprec."""
        F = self.field
        out = []
        for j in range(F.e):
            room = self.aprec - Fraction(self.shift + j, F.e)
            keep = min(max(0, ceil(room)), F.M)
            mod = F.p ** keep
            out.append([x % mod for x in self.mant[j * F.d:(j + 1) * F.d]])
        return out

    # arithmetic ----------------------------------------------------------

    def _coerce(self, other: Any) -> "LocalElement":
        if isinstance(other, LocalElement):
            if other.field != self.field:
                raise BadInput(f"field mismatch: {self.field} vs {other.field}")
            return other
        return self.field(other)

    def __add__(self, other: Any) -> "LocalElement":
        o = self._coerce(other)
        F = self.field
        ap = min(self.aprec, o.aprec)
        if o._is_zero_mant():
            return _make(F, self.shift, self.mant, ap)
        if self._is_zero_mant():
            return _make(F, o.shift, o.mant, ap)
        if self.shift <= o.shift:
            lo, hi = self, o
        else:
            lo, hi = o, self
        up = _mant_shift_up(F, hi.mant, hi.shift - lo.shift)
        pM = F.pM
        mant = tuple((a + b) % pM for a, b in zip(lo.mant, up))
        return _make(F, lo.shift, mant, ap)

    __radd__ = __add__

    def __neg__(self) -> "LocalElement":
        pM = self.field.pM
        return LocalElement(self.field, self.shift, tuple((-a) % pM for a in self.mant), self.aprec)

    def __sub__(self, other: Any) -> "LocalElement":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Any) -> "LocalElement":
        return self._coerce(other) - self

    def __mul__(self, other: Any) -> "LocalElement":
        if isinstance(other, int) and not isinstance(other, bool):
            if other == 0:
                return self.field.zero
            if abs(other) < self.field.p:
                # cheap path for small integers
                pM = self.field.pM
                return _make(self.field, self.shift, tuple((a * other) % pM for a in self.mant),
                             self.aprec)
        o = self._coerce(other)
        F = self.field
        vx, vy = self.val_lower(), o.val_lower()
        ap = min(self.aprec + vy, o.aprec + vx)
        if self._is_zero_mant() or o._is_zero_mant():
            return LocalElement(F, 0, F._zero_mant(), ap)
        return _make(F, self.shift + o.shift, _mant_mul(F, self.mant, o.mant), ap)

    __rmul__ = __mul__

    def mul_pi(self, k: int) -> "LocalElement":
        """pi^k * x, exact."""
        F = self.field
        if self._is_zero_mant():
            return LocalElement(F, 0, self.mant, self.aprec + Fraction(k, F.e))
        return LocalElement(F, self.shift + k, self.mant, self.aprec + Fraction(k, F.e))

    def inverse(self) -> "LocalElement":
        F = self.field
        if self._is_zero_mant():
            raise PrecisionError("inverse of an element zero to precision")
        v = Fraction(self.shift, F.e)
        a0 = self.mant[:F.d]
        y = list(F._zero_mant())
        y[:F.d] = _gr_inv_unit(F, a0)
        y = tuple(y)
        two = list(F._zero_mant())
        two[0] = 2
        two = tuple(two)
        pM = F.pM
        steps = (F.M * F.e).bit_length() + 1
        for _ in range(steps):
            uy = _mant_mul(F, self.mant, y)
            y = _mant_mul(F, y, tuple((a - b) % pM for a, b in zip(two, uy)))
        return _make(F, -self.shift, y, self.aprec - 2 * v)

    def __truediv__(self, other: Any) -> "LocalElement":
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other: Any) -> "LocalElement":
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int) -> "LocalElement":
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.field(other)
        if not isinstance(other, LocalElement):
            return NotImplemented
        diff = self - other
        if diff.is_zero():
            return True
        # working-exact digits are trusted to cap relative digits only:
        # cancellation moves the GUARD digits into the mantissa
        base = min(self.val_lower(), self._coerce(other).val_lower())
        return diff.val() >= min(diff.aprec, base + self.field.cap)

    def __hash__(self) -> int:  # pragma: no cover
        return hash(self.shift)

    def with_prec(self, aprec: Rational) -> "LocalElement":
        """Same digits, precision lowered to aprec."""
        return _make(self.field, self.shift, self.mant, min(self.aprec, Fraction(aprec)))

    def as_exact(self) -> "LocalElement":
        """Treat the stored digits as an exact field element."""
        return _make(self.field, self.shift, self.mant, EXACT)

    def __repr__(self) -> str:
        if self._is_zero_mant():
            return f"O(p^{self.aprec})"
        F = self.field
        lead = self.mant[:F.d]
        lead = lead[0] % F.p if F.d == 1 else tuple(x % F.p for x in lead)
        return f"<{lead}*pi^{self.shift} +O(p^{self.aprec})>"

    def to_json(self) -> Dict[str, Any]:
        return {"field": self.field.to_json(), "shift": self.shift, "digits": self.digits(),
                "prec": rat_to_str(self.aprec),
                "valuation": str(self.valuation()) if self.valuation_or_none() is None
                else rat_to_str(self.valuation_or_none())}


def local_from_json(obj: Dict[str, Any]) -> LocalElement:
    try:
        F = LocalField.from_json(obj["field"])
        shift = int(obj.get("shift", 0))
        digits = obj["digits"]
        mant = [0] * (F.e * F.d)
        for j, dig in enumerate(digits):
            if isinstance(dig, int):
                dig = [dig]
            for k, c in enumerate(dig):
                mant[j * F.d + k] = int(c) % F.pM
        ap = parse_rational(obj.get("prec", F.cap))
    except (KeyError, TypeError, ValueError) as exc:
        raise BadInput(f"malformed local element JSON: {exc}") from exc
    return _make(F, shift, tuple(mant), ap)


# ---------------------------------------------------------------------------
# field growth


def extend_field(F: LocalField, e_factor: int = 1, d_factor: int = 1) -> LocalField:
    """The field with e' = e * e_factor, d' = d * d_factor and the same
    precision cap; pi = pi'^{e_factor}."""
    if e_factor < 1 or d_factor < 1:
        raise BadInput("growth factors must be positive")
    return make_local_field(F.p, F.d * d_factor, F.e * e_factor, F.prec * e_factor, F.sign)


def _gr_embedding_image(src: LocalField, dst: LocalField) -> Tuple[int, ...]:
    """Image of the Galois-ring generator y of src in dst (Hensel lift of
    the residue embedding)."""
    ybar = embed(src.residue_field.gen, dst.residue_field)
    x = tuple(ybar.c)
    mod = src.modulus  # monic, length d_src + 1

    def ev(z: Tuple[int, ...]) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        val = tuple([0] * dst.d)
        der = tuple([0] * dst.d)
        power = tuple([1] + [0] * (dst.d - 1))
        for i, c in enumerate(mod):
            val = tuple((a + c * b) % dst.pM for a, b in zip(val, power))
            if i + 1 < len(mod):
                dc = (i + 1) * mod[i + 1]
                der = tuple((a + dc * b) % dst.pM for a, b in zip(der, power))
            power = _gr_mul(dst, power, z)
        return val, der

    for _ in range(dst.M.bit_length() + 2):
        val, der = ev(x)
        corr = _gr_mul(dst, val, _gr_inv_unit(dst, der))
        x = tuple((a - b) % dst.pM for a, b in zip(x, corr))
    return x


def embed_element(x: LocalElement, target: LocalField) -> LocalElement:
    src = x.field
    if src.p != target.p or src.sign != target.sign or target.e % src.e or target.d % src.d:
        raise BadInput(f"no embedding {src} -> {target}")
    k = target.e // src.e
    if x._is_zero_mant():
        return LocalElement(target, 0, target._zero_mant(), x.aprec)
    if src.d == target.d:
        conv = lambda a: tuple(c % target.pM for c in a)
    else:
        img = _gr_embedding_image(src, target)
        powers = [tuple([1] + [0] * (target.d - 1))]
        for _ in range(src.d - 1):
            powers.append(_gr_mul(target, powers[-1], img))

        def conv(a: Sequence[int]) -> Tuple[int, ...]:
            acc = [0] * target.d
            for c, pw in zip(a, powers):
                for i, b in enumerate(pw):
                    acc[i] += c * b
            return tuple(v % target.pM for v in acc)

    mant = [0] * (target.e * target.d)
    for j in range(src.e):
        a = conv(x.mant[j * src.d:(j + 1) * src.d])
        for t in range(target.d):
            mant[j * k * target.d + t] = a[t]
    return _make(target, x.shift * k, tuple(mant), x.aprec)


def embed_poly(f: LaurentPoly, target: LocalField) -> LaurentPoly:
    return LaurentPoly(target, {e: embed_element(c, target) for e, c in f.terms.items()}, f.var)


# ---------------------------------------------------------------------------
# Laurent polynomials over K


def gauss_valuation(F: LaurentPoly, r: Rational) -> Fraction:
    """v_r(sum c_k T^k) = min_k (v(c_k) + k r)."""
    r = Fraction(r)
    best: Optional[Fraction] = None
    pending: List[Tuple[int, Fraction]] = []
    for k, c in F.terms.items():
        v = c.valuation_or_none()
        if v is None:
            pending.append((k, c.aprec + k * r))
            continue
        val = v + k * r
        if best is None or val < best:
            best = val
    for k, lower in pending:
        if best is None or lower <= best:
            raise PrecisionError(f"coefficient of {F.var}^{k} is below precision", k)
    if best is None:
        raise PrecisionError("polynomial is zero to precision")
    return best


def residue(F: LaurentPoly, r: Rational, var: str = "t") -> LaurentPoly:
    """[F]_r: the reduction of p^{-v_r(F)} F(p^r t), with p^q read as pi^{q e}."""
    r = Fraction(r)
    K: LocalField = F.ring
    if (r * K.e).denominator != 1:
        raise NeedsExtension(f"radius {r} needs e divisible by {r.denominator}", r.denominator)
    v = gauss_valuation(F, r)
    out = {}
    for k, c in F.terms.items():
        cv = c.valuation_or_none()
        if cv is not None and cv + k * r == v:
            out[k] = c.unit_residue()
    return LaurentPoly(K.residue_field, out, var)


def poly_eval(coeffs: Sequence[LocalElement], x: LocalElement) -> LocalElement:
    """Horner evaluation of a dense polynomial (low degree first)."""
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def poly_deriv(coeffs: Sequence[LocalElement]) -> List[LocalElement]:
    return [c * i for i, c in enumerate(coeffs)][1:] or [coeffs[0].field.zero]


# ---------------------------------------------------------------------------
# Newton polygons and piecewise-linear functions


@dataclass(frozen=True)
class NewtonPolygon:
    points: Tuple[Tuple[int, Fraction], ...]
    hull: Tuple[Tuple[int, Fraction], ...]
    segments: Tuple[Tuple[Fraction, int], ...]

    def zero_valuations(self) -> List[Tuple[Fraction, int]]:
        """(valuation, count) of the zeroes in T (for F = sum c_k T^{-k})."""
        return list(self.segments)

    def count_with_slope(self, s: Rational) -> int:
        return sum(l for sl, l in self.segments if sl == Fraction(s))

    def to_json(self) -> Dict[str, Any]:
        return {"points": [[k, rat_to_str(v)] for k, v in self.points],
                "hull": [[k, rat_to_str(v)] for k, v in self.hull],
                "segments": [{"slope": rat_to_str(s), "length": l} for s, l in self.segments]}


def lower_hull(points: Iterable[Tuple[int, Rational]]) -> List[Tuple[int, Fraction]]:
    pts = sorted({(int(k), Fraction(v)) for k, v in points})
    # keep the lowest point per abscissa
    best: Dict[int, Fraction] = {}
    for k, v in pts:
        if k not in best or v < best[k]:
            best[k] = v
    pts = sorted(best.items())
    hull: List[Tuple[int, Fraction]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point unless it lies strictly below the chord
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def newton_polygon_points(points: Iterable[Tuple[int, Rational]]) -> NewtonPolygon:
    pts = tuple(sorted((int(k), Fraction(v)) for k, v in points))
    hull = lower_hull(pts)
    segs = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        segs.append(((y2 - y1) / (x2 - x1), x2 - x1))
    return NewtonPolygon(pts, tuple(hull), tuple(segs))


def newton_polygon(F: LaurentPoly) -> NewtonPolygon:
    """Polygon of (k, v(c_k)) for F = sum c_k T^{-k}.

    Indeterminate coefficients are allowed only when their precision bound
    keeps them strictly above the hull.
    """
    known, unknown = [], []
    for e, c in F.terms.items():
        v = c.valuation_or_none()
        if v is None:
            unknown.append((-e, c.aprec))
        else:
            known.append((-e, v))
    if not known:
        raise PrecisionError("all coefficients are below precision")
    poly = newton_polygon_points(known)
    for k, bound in unknown:
        if _hull_value(poly.hull, k) is None:
            continue
        if bound <= _hull_value(poly.hull, k):
            raise PrecisionError(f"coefficient of T^-{k} is indeterminate on the hull", k)
    return poly


def _hull_value(hull: Sequence[Tuple[int, Fraction]], k: int) -> Optional[Fraction]:
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        if x1 <= k <= x2:
            return y1 + (y2 - y1) * (k - x1) / (x2 - x1)
    if len(hull) == 1 and hull[0][0] == k:
        return hull[0][1]
    return None


@dataclass(frozen=True)
class PiecewiseLinear:
    """Continuous piecewise-linear function on [breakpoints[0], breakpoints[-1]]."""

    breakpoints: Tuple[Fraction, ...]
    values: Tuple[Fraction, ...]

    @property
    def slopes(self) -> Tuple[Fraction, ...]:
        b, v = self.breakpoints, self.values
        return tuple((v[i + 1] - v[i]) / (b[i + 1] - b[i]) for i in range(len(b) - 1))

    def __call__(self, x: Rational) -> Fraction:
        x = Fraction(x)
        b, v = self.breakpoints, self.values
        if x < b[0] or x > b[-1]:
            raise BadInput(f"{x} outside [{b[0]}, {b[-1]}]")
        for i in range(len(b) - 1):
            if b[i] <= x <= b[i + 1]:
                return v[i] + (v[i + 1] - v[i]) * (x - b[i]) / (b[i + 1] - b[i])
        return v[0]

    def kinks(self) -> List[Fraction]:
        """Interior breakpoints where the slope changes."""
        sl = self.slopes
        return [self.breakpoints[i + 1] for i in range(len(sl) - 1) if sl[i] != sl[i + 1]]

    def is_convex(self) -> bool:
        sl = self.slopes
        return all(sl[i] <= sl[i + 1] for i in range(len(sl) - 1))

    def map(self, x_map: Any, y_map: Any) -> "PiecewiseLinear":
        """Apply x -> x_map(x), y -> y_map(x, y) pointwise at breakpoints
        (exact for affine maps)."""
        xs = tuple(x_map(x) for x in self.breakpoints)
        ys = tuple(y_map(x, y) for x, y in zip(self.breakpoints, self.values))
        return PiecewiseLinear(xs, ys)

    def to_json(self) -> Dict[str, Any]:
        return {"breakpoints": [rat_to_str(x) for x in self.breakpoints],
                "values": [rat_to_str(y) for y in self.values],
                "slopes": [rat_to_str(s) for s in self.slopes]}

    def to_csv(self) -> str:
        lines = ["r,value"]
        lines += [f"{rat_to_str(x)},{rat_to_str(y)}" for x, y in zip(self.breakpoints, self.values)]
        return "\n".join(lines) + "\n"


def upper_envelope(lines: Sequence[Tuple[Rational, Rational]], lo: Rational, hi: Rational) -> PiecewiseLinear:
    """max_i (a_i x + b_i) on [lo, hi] for lines (a_i, b_i)."""
    lo, hi = Fraction(lo), Fraction(hi)
    if not lines:
        raise BadInput("empty envelope")
    L = [(Fraction(a), Fraction(b)) for a, b in lines]

    def top(x: Fraction) -> Tuple[Fraction, Fraction]:
        return max(L, key=lambda ab: (ab[0] * x + ab[1], ab[0]))

    xs = [lo]
    cur = top(lo)
    x = lo
    while True:
        a, b = cur
        nxt = None
        for a2, b2 in L:
            if a2 > a:
                xc = (b - b2) / (a2 - a)
                if xc >= x and (nxt is None or xc < nxt[0] or (xc == nxt[0] and a2 > nxt[1][0])):
                    nxt = (xc, (a2, b2))
        if nxt is None or nxt[0] >= hi:
            break
        x, cur = nxt
        if x > xs[-1]:
            xs.append(x)
    xs.append(hi)
    xs = sorted(set(xs))
    vals = tuple(max(a * t + b for a, b in L) for t in xs)
    return PiecewiseLinear(tuple(xs), vals)


# ---------------------------------------------------------------------------
# roots


def hensel_root(coeffs: Sequence[LocalElement], x0: LocalElement, max_iter: int = 200) -> LocalElement:
    """Newton iteration for a root of sum coeffs[i] x^i starting at x0.

    Requires v(f(x0)) > 2 v(f'(x0)).
    """
    F = x0.field
    df = poly_deriv(list(coeffs))
    fx, dfx = poly_eval(coeffs, x0), poly_eval(df, x0)
    vd = dfx.valuation_or_none()
    if vd is None:
        raise BadInput("Hensel criterion fails: f'(x0) vanishes to precision")
    if not fx.is_zero() and fx.val() <= 2 * vd:
        raise BadInput(f"Hensel criterion fails: v(f(x0)) = {fx.val()} <= 2 v(f'(x0)) = {2 * vd}")
    x = x0.as_exact()
    for _ in range(max_iter):
        fx = poly_eval(coeffs, x)
        if fx.is_zero():
            break
        x = (x - fx / poly_eval(df, x)).as_exact()
    else:  # pragma: no cover
        raise PrecisionError("Hensel iteration did not converge")
    # a root determined mod p^{cap - v(f'(root))}
    return x.with_prec(F.cap - vd)


def cyclotomic_shifted(F: LocalField) -> List[LocalElement]:
    """Coefficients of Phi_p(1 + x) = ((1 + x)^p - 1)/x, low degree first."""
    from math import comb
    p = F.p
    return [F(comb(p, i + 1)) for i in range(p)]


def zeta_p(F: LocalField) -> LocalElement:
    """lambda = zeta_p - 1 with v(lambda) = 1/(p-1).

    Needs sign = -1 and (p-1) | e.  Solved as lambda = pi^{e/(p-1)} u with
    u = 1 + O(pi), which is a Hensel problem for a unit.
    """
    p = F.p
    if F.e % (p - 1):
        raise NeedsExtension("zeta_p needs (p-1) | e", p - 1)
    if F.sign != -1 and p != 2:
        raise BadInput("zeta_p is built in a field with pi^e = -p")
    k = F.e // (p - 1)
    base = cyclotomic_shifted(F)
    pik = F.pi_power(k)
    # h(u) = Phi_p(1 + pi^k u) / pi^{k(p-1)}
    scale = F.pi_power(-k * (p - 1))
    h = [base[i] * pik ** i * scale for i in range(p)]
    u = hensel_root(h, F.one)
    lam = (pik * u).as_exact()
    check = (F.one + lam) ** p - F.one
    if not check.is_zero() and check.val() < F.cap - 1:
        raise PrecisionError("zeta_p check (1 + lambda)^p = 1 failed")  # pragma: no cover
    return lam


def _pth_root_iter(x: LocalElement, target: Optional[Fraction],
                   max_iter: int) -> Tuple[LocalElement, Fraction]:
    """Shared p-th root iteration.  Returns (y, rho) with y^p = x (1 + z),
    v(z) >= rho.  With ``target`` set, stops once rho >= target or when the
    next correction would need a ramified extension."""
    F = x.field
    p = F.p
    if x.shift % p:
        raise NeedsExtension("valuation not divisible by p", p)
    lead = F.teichmuller(x.unit_residue().pth_root())
    y = F.pi_power(x.shift // p) * lead
    thresh = Fraction(p, p - 1)
    xe = x.as_exact()
    rel = x.aprec - x.val()
    for _ in range(max_iter):
        z = xe / y.as_exact() ** p - F.one  # y^p (1 + z) = x
        if z.is_zero():
            return y, rel
        t = z.val()
        if target is not None and t >= target:
            return y, t
        if t > thresh:
            return y * binomial_root_scalar(z, 1), rel
        k = z.shift
        if k % p or t == thresh:
            if target is not None:
                return y, t
            if k % p:
                raise NeedsExtension(f"no p-th root: correction at pi^{k} with p not dividing {k}", p)
            raise NeedsExtension("p-th root needs an Artin-Schreier residue equation", p)
        a = F.pi_power(k // p) * F.teichmuller(z.unit_residue().pth_root())
        y = (y * (F.one + a)).as_exact()
    raise PrecisionError("p-th root iteration did not converge")  # pragma: no cover


def pth_root(x: LocalElement, max_iter: int = 10000) -> LocalElement:
    """A p-th root of x in its own field.

    The branch is fixed by the residue: the root's leading unit digit is
    the Frobenius-inverse of x's.  Raises NeedsExtension (factor p) when
    v(x) e is not divisible by p or a correction term has exponent prime
    to p below valuation p/(p-1).
    """
    F = x.field
    if x.is_zero():
        return LocalElement(F, 0, F._zero_mant(), x.aprec / F.p)
    y, _ = _pth_root_iter(x, None, max_iter)
    vx = x.val()
    return y.with_prec(vx / F.p + (x.aprec - vx) - 1)


def pth_root_approx(x: LocalElement, target: Rational, max_iter: int = 10000) -> Tuple[LocalElement, Fraction]:
    """(y, rho) with y^p = x (1 + z) and v(z) >= rho.

    Uses the same residue-canonical branch as ``pth_root`` but stops at
    relative accuracy ``target`` or at the first correction that would need
    a ramified extension; the caller decides whether rho is enough.  The
    returned y is a working-exact element.
    """
    F = x.field
    if x.is_zero():
        return F.zero, EXACT
    return _pth_root_iter(x, Fraction(target), max_iter)


def _binomial_coeffs(F: LocalField, k: int, n: int) -> List[LocalElement]:
    """C(1/p^k, j) for j < n as elements of F."""
    a = Fraction(1, F.p ** k)
    out = [F.one]
    c = Fraction(1)
    for j in range(1, n):
        c = c * (a - (j - 1)) / j
        out.append(F(c))
    return out


def binomial_root_scalar(z: LocalElement, k: int) -> LocalElement:
    """(1 + z)^{1/p^k} by the binomial series; needs v(z) > k + 1/(p-1).

    The result carries the tail bound of the truncated series as precision.
    """
    F = z.field
    p = F.p
    vz = z.val_lower()
    if vz <= k + Fraction(1, p - 1):
        raise BadInput("binomial series does not converge")
    # term j has valuation >= j (vz - k - 1/(p-1))
    gain = vz - k - Fraction(1, p - 1)
    n = ceil((F.cap + 2) / gain) + 1
    coeffs = _binomial_coeffs(F, k, n)
    acc = F.one
    zp = F.one
    for j in range(1, n):
        zp = zp * z
        acc = acc + coeffs[j] * zp
    return acc.with_prec(n * gain)


def binomial_pth_root_series(G: LaurentPoly, k: int, r: Rational, trunc: int) -> LaurentPoly:
    """G^{1/p^k} for G = 1 + h, h in T^{-1}K[T^{-1}], as a series in T^{-1}
    truncated to exponents >= -trunc.

    Needs v_r(h) > k + 1/(p-1) so that the terms C(1/p^k, j) h^j have Gauss
    valuation tending to infinity.
    """
    K: LocalField = G.ring
    p = K.p
    r = Fraction(r)
    one = LaurentPoly.constant(K, K.one, G.var)
    h = G - one
    if h.is_zero():
        return one
    if any(e >= 0 for e in h.terms):
        raise BadInput("G must be 1 plus terms in T^-1")
    vh = gauss_valuation(h, r)
    margin = vh - k - Fraction(1, p - 1)
    if margin <= 0:
        raise BadInput(f"binomial series fails to converge at radius {r}: v_r(G - 1) = {vh}")
    # h^j only has exponents <= -j, so j <= trunc gives every kept coefficient exactly
    n = trunc + 1
    coeffs = _binomial_coeffs(K, k, n)
    acc = one
    hp = one
    for j in range(1, n):
        hp = hp.mul_trunc(h, -trunc)
        if hp.is_zero():
            break
        acc = acc + hp * coeffs[j]
    return acc
