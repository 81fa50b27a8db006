"""Finite fields F_{p^d}, sparse Laurent polynomials, differential forms and
the Cartier operator.

Elements of F_{p^d} are coefficient vectors (low degree first) modulo a
deterministically chosen monic irreducible modulus.  Fields are cached per
(p, d), so two calls to ``make_field`` return the same object.
"""

from __future__ import annotations

import functools
import random
import threading
from math import gcd as igcd
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .errors import BadInput


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _prime_factors(n: int) -> List[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def lcm(a: int, b: int) -> int:
    return a * b // igcd(a, b)


# ---------------------------------------------------------------------------
# dense polynomials over F_p as int lists (low degree first)


def _zp_trim(a: List[int]) -> List[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _zp_mod(a: List[int], m: List[int], p: int) -> List[int]:
    a = [c % p for c in a]
    _zp_trim(a)
    dm = len(m) - 1
    inv = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm:
        c = a[-1] * inv % p
        shift = len(a) - 1 - dm
        for j, mj in enumerate(m):
            a[shift + j] = (a[shift + j] - c * mj) % p
        _zp_trim(a)
    return a


def _zp_mulmod(a: List[int], b: List[int], m: List[int], p: int) -> List[int]:
    if not a or not b:
        return []
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] += x * y
    return _zp_mod(prod, m, p)


def _zp_powmod(a: List[int], e: int, m: List[int], p: int) -> List[int]:
    result = [1]
    base = _zp_mod(list(a), m, p)
    while e:
        if e & 1:
            result = _zp_mulmod(result, base, m, p)
        e >>= 1
        if e:
            base = _zp_mulmod(base, base, m, p)
    return result


def _zp_gcd(a: List[int], b: List[int], p: int) -> List[int]:
    a = _zp_trim([c % p for c in a])
    b = _zp_trim([c % p for c in b])
    while b:
        a, b = b, _zp_mod(a, b, p)
    if a:
        inv = pow(a[-1], p - 2, p)
        a = [c * inv % p for c in a]
    return a


def _zp_is_irreducible(f: List[int], p: int) -> bool:
    """Rabin's test for a monic f over F_p."""
    d = len(f) - 1
    if d == 1:
        return True
    x = [0, 1]
    if _zp_powmod(x, p ** d, f, p) != _zp_mod(x, f, p):
        return False
    for q in _prime_factors(d):
        h = _zp_powmod(x, p ** (d // q), f, p)
        h = h + [0] * max(0, 2 - len(h))
        h[1] = (h[1] - 1) % p
        if len(_zp_gcd(f, h, p)) > 1:
            return False
    return True


def smallest_irreducible(p: int, d: int) -> Tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree d over F_p.

    Candidates x^d + c_{d-1}x^{d-1} + ... + c_0 are ordered by the tuple
    (c_{d-1}, ..., c_0); for d = 1 the modulus is x.
    """
    if d == 1:
        return (0, 1)
    for idx in range(p ** d):
        tail = []
        k = idx
        for _ in range(d):
            tail.append(k % p)
            k //= p
        coeffs = tail + [1]  # tail is (c_0, ..., c_{d-1}) read low digit first
        if coeffs[0] == 0:
            continue
        if _zp_is_irreducible(coeffs, p):
            return tuple(coeffs)
    raise RuntimeError(f"no irreducible polynomial of degree {d} over F_{p}")  # pragma: no cover


# ---------------------------------------------------------------------------
# finite fields


class FiniteField:
    """F_{p^d} = F_p[y]/(modulus)."""

    def __init__(self, p: int, d: int, modulus: Sequence[int]):
        if not is_prime(p):
            raise BadInput(f"{p} is not prime")
        if d < 1:
            raise BadInput("extension degree must be >= 1")
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != d + 1 or modulus[-1] != 1:
            raise BadInput("modulus must be monic of degree d")
        if d > 1 and not _zp_is_irreducible(list(modulus), p):
            raise BadInput("modulus is not irreducible")
        self.p = p
        self.d = d
        self.q = p ** d
        self.modulus = modulus
        # x^k mod modulus for d <= k <= 2d-2, used by the multiplication
        self._red: List[List[int]] = []
        for k in range(d, 2 * d - 1):
            v = [0] * k + [1]
            self._red.append(_zp_mod(v, list(modulus), p) + [0] * d)
        self._frob_inv: Optional[List[List[int]]] = None
        self.zero = FFElem(self, (0,) * d)
        self.one = FFElem(self, (1,) + (0,) * (d - 1))

    def __repr__(self) -> str:
        return f"F_{self.p}^{self.d}"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FiniteField) and (self.p, self.modulus) == (other.p, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.modulus))

    @property
    def gen(self) -> "FFElem":
        if self.d == 1:
            # the class of y is 0 in F_p[y]/(y)
            return self.zero
        return FFElem(self, (0, 1) + (0,) * (self.d - 2))

    def __call__(self, value: Any) -> "FFElem":
        if isinstance(value, FFElem):
            if value.field is self:
                return value
            if value.field == self:
                return FFElem(self, value.c)
            return embed(value, self)
        if isinstance(value, int):
            return FFElem(self, (value % self.p,) + (0,) * (self.d - 1))
        if isinstance(value, (list, tuple)):
            vals = [int(v) % self.p for v in value]
            if len(vals) > self.d:
                raise BadInput("too many digits for field element")
            return FFElem(self, tuple(vals + [0] * (self.d - len(vals))))
        raise BadInput(f"cannot coerce {value!r} into {self}")

    def elements(self) -> Iterator["FFElem"]:
        for idx in range(self.q):
            digits = []
            for _ in range(self.d):
                digits.append(idx % self.p)
                idx //= self.p
            yield FFElem(self, tuple(digits))

    def random(self, rng: random.Random) -> "FFElem":
        return FFElem(self, tuple(rng.randrange(self.p) for _ in range(self.d)))

    # raw vector arithmetic -------------------------------------------------

    def _mul(self, a: Tuple[int, ...], b: Tuple[int, ...]) -> Tuple[int, ...]:
        p, d = self.p, self.d
        if d == 1:
            return (a[0] * b[0] % p,)
        prod = [0] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        out = prod[:d]
        red = self._red
        for k in range(d, 2 * d - 1):
            c = prod[k] % p
            if c:
                rk = red[k - d]
                for j in range(d):
                    if rk[j]:
                        out[j] += c * rk[j]
        return tuple(v % p for v in out)

    def _inv(self, a: Tuple[int, ...]) -> Tuple[int, ...]:
        p = self.p
        if self.d == 1:
            if a[0] % p == 0:
                raise ZeroDivisionError("inverse of zero in finite field")
            return (pow(a[0], p - 2, p),)
        # extended Euclid over F_p
        r0, r1 = list(self.modulus), _zp_trim(list(a))
        s0, s1 = [], [1]
        if not r1:
            raise ZeroDivisionError("inverse of zero in finite field")
        while len(r1) > 1:
            inv = pow(r1[-1], p - 2, p)
            q = [0] * (len(r0) - len(r1) + 1)
            rem = list(r0)
            while len(rem) >= len(r1) and rem:
                c = rem[-1] * inv % p
                sh = len(rem) - len(r1)
                q[sh] = c
                for j, v in enumerate(r1):
                    rem[sh + j] = (rem[sh + j] - c * v) % p
                _zp_trim(rem)
            qs = [0] * (len(q) + len(s1))
            for i, x in enumerate(q):
                for j, y in enumerate(s1):
                    qs[i + j] += x * y
            new_s = [((s0[i] if i < len(s0) else 0) - (qs[i] if i < len(qs) else 0)) % p
                     for i in range(max(len(s0), len(qs)))]
            r0, r1 = r1, rem
            s0, s1 = s1, _zp_trim(new_s)
        inv = pow(r1[0], p - 2, p)
        s = [c * inv % p for c in s1]
        s = _zp_mod(s, list(self.modulus), p)
        return tuple(s + [0] * (self.d - len(s)))

    def frobenius_inverse(self, a: "FFElem") -> "FFElem":
        """The unique b with b^p = a."""
        if self.d == 1:
            return a
        if self._frob_inv is None:
            # a^(p^(d-1)) is the inverse Frobenius; tabulate it on the basis
            cols = []
            for i in range(self.d):
                e = FFElem(self, tuple(1 if j == i else 0 for j in range(self.d)))
                cols.append(list((e ** (self.p ** (self.d - 1))).c))
            self._frob_inv = cols
        p, d = self.p, self.d
        out = [0] * d
        for i, ai in enumerate(a.c):
            if ai:
                col = self._frob_inv[i]
                for j in range(d):
                    out[j] += ai * col[j]
        return FFElem(self, tuple(v % p for v in out))


_FIELD_CACHE: Dict[Tuple[int, int], FiniteField] = {}
_FIELD_LOCK = threading.Lock()


def make_field(p: int, d: int = 1) -> FiniteField:
    """F_{p^d} with the lexicographically smallest monic irreducible modulus."""
    if not isinstance(p, int) or not is_prime(p):
        raise BadInput(f"{p!r} is not prime")
    if not isinstance(d, int) or d < 1:
        raise BadInput("extension degree must be >= 1")
    key = (p, d)
    with _FIELD_LOCK:
        fld = _FIELD_CACHE.get(key)
        if fld is None:
            fld = FiniteField(p, d, smallest_irreducible(p, d))
            _FIELD_CACHE[key] = fld
    return fld


class FFElem:
    __slots__ = ("field", "c")

    def __init__(self, field: FiniteField, c: Tuple[int, ...]):
        self.field = field
        self.c = c

    def _coerce(self, other: Any) -> "FFElem":
        if isinstance(other, FFElem):
            if other.field is not self.field and other.field != self.field:
                raise BadInput(f"field mismatch: {self.field} vs {other.field}")
            return other
        if isinstance(other, int):
            return self.field(other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: Any) -> "FFElem":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        p = self.field.p
        return FFElem(self.field, tuple((x + y) % p for x, y in zip(self.c, o.c)))

    __radd__ = __add__

    def __sub__(self, other: Any) -> "FFElem":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        p = self.field.p
        return FFElem(self.field, tuple((x - y) % p for x, y in zip(self.c, o.c)))

    def __rsub__(self, other: Any) -> "FFElem":
        return (-self) + other

    def __neg__(self) -> "FFElem":
        p = self.field.p
        return FFElem(self.field, tuple((-x) % p for x in self.c))

    def __mul__(self, other: Any) -> "FFElem":
        if isinstance(other, int):
            p = self.field.p
            return FFElem(self.field, tuple(x * other % p for x in self.c))
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FFElem(self.field, self.field._mul(self.c, o.c))

    __rmul__ = __mul__

    def inverse(self) -> "FFElem":
        return FFElem(self.field, self.field._inv(self.c))

    def __truediv__(self, other: Any) -> "FFElem":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: Any) -> "FFElem":
        return self.field(other) * self.inverse()

    def __pow__(self, e: int) -> "FFElem":
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def is_zero(self) -> bool:
        return not any(self.c)

    def __bool__(self) -> bool:
        return any(self.c)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            return self.c == self.field(other).c
        if isinstance(other, FFElem):
            return self.field == other.field and self.c == other.c
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field.p, self.c))

    def sort_key(self) -> Tuple[int, ...]:
        return tuple(reversed(self.c))

    def frobenius(self) -> "FFElem":
        return self ** self.field.p

    def pth_root(self) -> "FFElem":
        return self.field.frobenius_inverse(self)

    def to_int(self) -> int:
        """Integer value; only for prime-field elements."""
        if any(self.c[1:]):
            raise BadInput("element is not in the prime field")
        return self.c[0]

    def digits(self) -> List[int]:
        return list(self.c)

    def __repr__(self) -> str:
        if self.field.d == 1:
            return str(self.c[0])
        terms = []
        for i, v in enumerate(self.c):
            if v:
                terms.append(str(v) if i == 0 else (f"{v if v != 1 else ''}y" + (f"^{i}" if i > 1 else "")))
        return "(" + " + ".join(terms) + ")" if terms else "0"


# ---------------------------------------------------------------------------
# dense polynomials over a finite field (lists of FFElem, low degree first)


def _trim(a: List[FFElem]) -> List[FFElem]:
    while a and a[-1].is_zero():
        a.pop()
    return a


def dpoly_add(a: List[FFElem], b: List[FFElem], sign: int = 1) -> List[FFElem]:
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else None
        y = b[i] if i < len(b) else None
        if y is None:
            out.append(x)
        elif x is None:
            out.append(y if sign == 1 else -y)
        else:
            out.append(x + y if sign == 1 else x - y)
    return _trim(out)


def dpoly_mul(a: List[FFElem], b: List[FFElem]) -> List[FFElem]:
    if not a or not b:
        return []
    F = a[0].field
    out = [F.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            if not y.is_zero():
                out[i + j] = out[i + j] + x * y
    return _trim(out)


def dpoly_divmod(a: List[FFElem], b: List[FFElem]) -> Tuple[List[FFElem], List[FFElem]]:
    b = _trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    F = b[0].field
    rem = list(a)
    _trim(rem)
    if len(rem) < len(b):
        return [], rem
    inv = b[-1].inverse()
    quo = [F.zero] * (len(rem) - len(b) + 1)
    while len(rem) >= len(b) and rem:
        c = rem[-1] * inv
        sh = len(rem) - len(b)
        quo[sh] = c
        for j, v in enumerate(b):
            if not v.is_zero():
                rem[sh + j] = rem[sh + j] - c * v
        rem.pop()
        _trim(rem)
    return _trim(quo), rem


def dpoly_monic(a: List[FFElem]) -> List[FFElem]:
    if not a:
        return a
    inv = a[-1].inverse()
    return [c * inv for c in a]


def dpoly_gcd(a: List[FFElem], b: List[FFElem]) -> List[FFElem]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, dpoly_divmod(a, b)[1]
    return dpoly_monic(a)


def dpoly_deriv(a: List[FFElem]) -> List[FFElem]:
    return _trim([a[i] * i for i in range(1, len(a))])


def dpoly_eval(a: List[FFElem], x: FFElem) -> FFElem:
    acc = x.field.zero
    for c in reversed(a):
        acc = acc * x + c
    return acc


def dpoly_mulmod(a: List[FFElem], b: List[FFElem], m: List[FFElem]) -> List[FFElem]:
    return dpoly_divmod(dpoly_mul(a, b), m)[1]


def dpoly_powmod(a: List[FFElem], e: int, m: List[FFElem]) -> List[FFElem]:
    F = m[0].field
    result = [F.one]
    base = dpoly_divmod(a, m)[1]
    while e:
        if e & 1:
            result = dpoly_mulmod(result, base, m)
        e >>= 1
        if e:
            base = dpoly_mulmod(base, base, m)
    return result


def dpoly_squarefree_part(a: List[FFElem]) -> List[FFElem]:
    """Product of the distinct monic irreducible factors of a (char p aware)."""
    a = dpoly_monic(_trim(list(a)))
    if len(a) <= 1:
        return a
    F = a[0].field
    p = F.p
    da = dpoly_deriv(a)
    if not da:
        # a = b(x^p): take the p-th root coefficientwise
        b = [a[i].pth_root() for i in range(0, len(a), p)]
        return dpoly_squarefree_part(b)
    g = dpoly_gcd(a, da)
    rad = dpoly_divmod(a, g)[0]
    if len(g) > 1:
        rest = dpoly_squarefree_part(g)
        # merge: radical of lcm(rad, rest)
        common = dpoly_gcd(rad, rest)
        rad = dpoly_mul(rad, dpoly_divmod(rest, common)[0])
    return dpoly_monic(rad)


def dpoly_factor_degrees(f: List[FFElem]) -> List[int]:
    """Degrees of the irreducible factors of a squarefree monic f
    (distinct-degree factorisation)."""
    F = f[0].field
    x = [F.zero, F.one]
    degs: List[int] = []
    h = x
    i = 0
    f = list(f)
    while len(f) > 1:
        i += 1
        if 2 * i > len(f) - 1:
            degs.append(len(f) - 1)
            break
        h = dpoly_powmod(h, F.q, f)
        diff = dpoly_add(h, x, -1)
        g = dpoly_gcd(f, diff)
        if len(g) > 1:
            degs.extend([i] * ((len(g) - 1) // i))
            f = dpoly_divmod(f, g)[0]
            h = dpoly_divmod(h, f)[1] if len(f) > 1 else h
    return degs


# ---------------------------------------------------------------------------
# embeddings and root finding

_EMBED_CACHE: Dict[Tuple[FiniteField, FiniteField], List[FFElem]] = {}
_BRUTE_FORCE_LIMIT = 1 << 12


def embed(x: FFElem, target: FiniteField) -> FFElem:
    """Image of x under the deterministic embedding into ``target``."""
    src = x.field
    if src == target:
        return FFElem(target, x.c)
    if src.p != target.p or target.d % src.d:
        raise BadInput(f"no embedding {src} -> {target}")
    images = _embedding_images(src, target)
    acc = target.zero
    for c, img in zip(x.c, images):
        if c:
            acc = acc + img * c
    return acc


def _embedding_images(src: FiniteField, target: FiniteField) -> List[FFElem]:
    key = (src, target)
    imgs = _EMBED_CACHE.get(key)
    if imgs is None:
        if src.d == 1:
            gen_img = target.zero
        else:
            mod = [target(c) for c in src.modulus]
            roots = _split_roots(mod)
            gen_img = min(roots, key=lambda r: r.sort_key())
        imgs = [target.one]
        for _ in range(1, src.d):
            imgs.append(imgs[-1] * gen_img)
        _EMBED_CACHE[key] = imgs
    return imgs


def _split_roots(f: List[FFElem]) -> List[FFElem]:
    """All roots of a squarefree f that splits into linear factors over its
    coefficient field."""
    f = dpoly_monic(_trim(list(f)))
    F = f[0].field
    n = len(f) - 1
    if n == 0:
        return []
    if n == 1:
        return [-f[0]]
    if F.q <= _BRUTE_FORCE_LIMIT:
        return [x for x in F.elements() if dpoly_eval(f, x).is_zero()]
    return _trace_split(f)


def _frobenius_images(f: List[FFElem]) -> List[List[FFElem]]:
    """x^{p j} mod f for j < deg f."""
    F = f[0].field
    n = len(f) - 1
    xp = dpoly_powmod([F.zero, F.one], F.p, f)
    out = [[F.one]]
    for _ in range(1, n):
        out.append(dpoly_mulmod(out[-1], xp, f))
    return out


def _trace_split(f: List[FFElem]) -> List[FFElem]:
    """Split a squarefree, fully split f with the absolute trace map.

    For random a, Tr(a x) mod f takes values in F_p at each root, so the gcds
    with Tr(a x) - c (c in F_p) partition the roots.
    """
    F = f[0].field
    p = F.p
    images = _frobenius_images(f)

    def frob(h: List[FFElem]) -> List[FFElem]:
        acc: List[FFElem] = []
        for j, c in enumerate(h):
            if not c.is_zero():
                term = [c.frobenius() * v for v in images[j]]
                acc = dpoly_add(acc, term)
        return acc

    rng = random.Random(0x5EED + F.q % 9973)
    pending = [f]
    roots: List[FFElem] = []
    while pending:
        g = pending.pop()
        if len(g) == 2:
            roots.append(-g[0] * g[1].inverse())
            continue
        while True:
            a = F.random(rng)
            h = [F.zero, a]
            tr = list(h)
            cur = h
            for _ in range(F.d - 1):
                cur = frob(cur)
                tr = dpoly_add(tr, cur)
            tr = dpoly_divmod(tr, g)[1]
            parts = []
            for c in range(p):
                shifted = dpoly_add(tr, [F(c)], -1)
                gg = dpoly_gcd(g, shifted) if shifted else dpoly_monic(list(g))
                if len(gg) > 1:
                    parts.append(gg)
            if len(parts) > 1:
                pending.extend(parts)
                break
    return roots


def splitting_degree(f: List[FFElem]) -> int:
    """Degree over F_p of the splitting field of the squarefree part of f."""
    F = f[0].field
    sq = dpoly_squarefree_part(f)
    k = 1
    if len(sq) > 1:
        for deg in dpoly_factor_degrees(sq):
            k = lcm(k, deg)
    return F.d * k


# ---------------------------------------------------------------------------
# Laurent polynomials


class LaurentPoly:
    """Finite sum of coeff * var^exp; coefficients live in ``ring``.

    ``ring`` is a FiniteField or a padic.LocalField.  Zero coefficients are
    pruned (for p-adic rings only exact zeros are pruned).
    """

    __slots__ = ("ring", "var", "terms")

    def __init__(self, ring: Any, terms: Optional[Dict[int, Any]] = None, var: str = "t"):
        self.ring = ring
        self.var = var
        clean: Dict[int, Any] = {}
        if terms:
            for e, c in terms.items():
                if isinstance(c, int):
                    c = ring(c)
                if not _is_exact_zero(c):
                    clean[int(e)] = c
        self.terms = clean

    # constructors ----------------------------------------------------------

    @classmethod
    def _raw(cls, ring: Any, terms: Dict[int, Any], var: str) -> "LaurentPoly":
        """Trusted constructor: ``terms`` already has no zero coefficients."""
        out = cls.__new__(cls)
        out.ring, out.var, out.terms = ring, var, terms
        return out

    @classmethod
    def monomial(cls, ring: Any, exp: int, coeff: Any = 1, var: str = "t") -> "LaurentPoly":
        return cls(ring, {exp: coeff if not isinstance(coeff, int) else ring(coeff)}, var)

    @classmethod
    def constant(cls, ring: Any, c: Any = 1, var: str = "t") -> "LaurentPoly":
        return cls.monomial(ring, 0, c, var)

    @classmethod
    def zero(cls, ring: Any, var: str = "t") -> "LaurentPoly":
        return cls(ring, {}, var)

    # arithmetic ------------------------------------------------------------

    def _check(self, other: "LaurentPoly") -> None:
        if self.var != other.var:
            raise BadInput(f"variable mismatch: {self.var} vs {other.var}")
        if self.ring != other.ring:
            raise BadInput(f"ring mismatch: {self.ring} vs {other.ring}")

    def _lift(self, other: Any) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            self._check(other)
            return other
        return LaurentPoly.constant(self.ring, other if not isinstance(other, int) else self.ring(other), self.var)

    def __add__(self, other: Any) -> "LaurentPoly":
        o = self._lift(other)
        out = dict(self.terms)
        for e, c in o.terms.items():
            out[e] = out[e] + c if e in out else c
        return LaurentPoly(self.ring, out, self.var)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.ring, {e: -c for e, c in self.terms.items()}, self.var)

    def __sub__(self, other: Any) -> "LaurentPoly":
        return self + (-self._lift(other))

    def __rsub__(self, other: Any) -> "LaurentPoly":
        return self._lift(other) - self

    def __mul__(self, other: Any) -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            if isinstance(other, int):
                other = self.ring(other)
            return LaurentPoly(self.ring, {e: c * other for e, c in self.terms.items()}, self.var)
        self._check(other)
        F = self.ring
        if isinstance(F, FiniteField) and F.d == 1:
            # prime field: accumulate integers, reduce once
            acc: Dict[int, int] = {}
            for e1, c1 in self.terms.items():
                x = c1.c[0]
                for e2, c2 in other.terms.items():
                    e = e1 + e2
                    acc[e] = acc.get(e, 0) + x * c2.c[0]
            p = F.p
            return LaurentPoly._raw(F, {e: FFElem(F, (v % p,)) for e, v in acc.items() if v % p}, self.var)
        out: Dict[int, Any] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                v = c1 * c2
                out[e] = out[e] + v if e in out else v
        return LaurentPoly(self.ring, out, self.var)

    def __rmul__(self, other: Any) -> "LaurentPoly":
        return self * other

    def __pow__(self, k: int) -> "LaurentPoly":
        if k < 0:
            if len(self.terms) != 1:
                raise BadInput("only monomials have Laurent-polynomial inverses")
            (e, c), = self.terms.items()
            return LaurentPoly(self.ring, {e * k: c.inverse() ** (-k)}, self.var)
        result = LaurentPoly.constant(self.ring, self.ring.one, self.var)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def mul_trunc(self, other: "LaurentPoly", min_exp: int) -> "LaurentPoly":
        """Product keeping only exponents >= min_exp."""
        self._check(other)
        out: Dict[int, Any] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                if e < min_exp:
                    continue
                v = c1 * c2
                out[e] = out[e] + v if e in out else v
        return LaurentPoly(self.ring, out, self.var)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = LaurentPoly.constant(self.ring, self.ring(other), self.var)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if self.var != other.var:
            return False
        diff = self - other
        return all(_is_zero_coeff(c) for c in diff.terms.values())

    def __hash__(self) -> int:  # pragma: no cover - polys are not dict keys
        return hash((self.var, tuple(sorted(self.terms))))

    # queries -----------------------------------------------------------------

    def is_zero(self) -> bool:
        return all(_is_zero_coeff(c) for c in self.terms.values())

    def coeff(self, e: int) -> Any:
        return self.terms.get(e, self.ring.zero)

    def exponents(self) -> List[int]:
        return sorted(self.terms)

    def min_exp(self) -> int:
        if not self.terms:
            raise BadInput("zero polynomial has no exponents")
        return min(self.terms)

    def max_exp(self) -> int:
        if not self.terms:
            raise BadInput("zero polynomial has no exponents")
        return max(self.terms)

    def deg_inv(self) -> int:
        """Degree in var^{-1} (0 for constants, a huge negative sentinel for 0)."""
        if not self.terms:
            return -(10 ** 18)
        return -min(self.terms)

    def is_poly_in_inverse(self) -> bool:
        return all(e <= 0 for e in self.terms)

    def items(self) -> List[Tuple[int, Any]]:
        return sorted(self.terms.items())

    # transformations ---------------------------------------------------------

    def map_coeffs(self, fn: Callable[[Any], Any], ring: Any = None) -> "LaurentPoly":
        ring = ring if ring is not None else self.ring
        return LaurentPoly(ring, {e: fn(c) for e, c in self.terms.items()}, self.var)

    def subs_power(self, k: int) -> "LaurentPoly":
        """var -> var^k."""
        return LaurentPoly(self.ring, {e * k: c for e, c in self.terms.items()}, self.var)

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by var^k."""
        return LaurentPoly(self.ring, {e + k: c for e, c in self.terms.items()}, self.var)

    def truncate_below(self, min_exp: int) -> "LaurentPoly":
        return LaurentPoly(self.ring, {e: c for e, c in self.terms.items() if e >= min_exp}, self.var)

    def with_var(self, var: str) -> "LaurentPoly":
        return LaurentPoly(self.ring, dict(self.terms), var)

    def frobenius(self) -> "LaurentPoly":
        """f(t) -> f(t)^p for coefficients in F_{p^d}."""
        p = self.ring.p
        return LaurentPoly(self.ring, {e * p: c.frobenius() for e, c in self.terms.items()}, self.var)

    def embed(self, target: FiniteField) -> "LaurentPoly":
        return LaurentPoly(target, {e: embed(c, target) for e, c in self.terms.items()}, self.var)

    def inverse_coeffs(self) -> Dict[int, Any]:
        """Coefficients as a map k -> coefficient of var^{-k}."""
        return {-e: c for e, c in self.terms.items()}

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            parts.append(f"{c!r}*{self.var}^{e}" if e else f"{c!r}")
        return " + ".join(parts)


def _is_exact_zero(c: Any) -> bool:
    if isinstance(c, FFElem):
        return c.is_zero()
    fn = getattr(c, "is_exact_zero", None)
    if fn is not None:
        return fn()
    return c == 0


def _is_zero_coeff(c: Any) -> bool:
    fn = getattr(c, "is_zero", None)
    if fn is not None:
        return fn()
    return c == 0


def poly_arith(a: LaurentPoly, b: LaurentPoly, op: str) -> LaurentPoly:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise BadInput(f"unknown op {op!r}")


def laurent_from_dense(coeffs: Sequence[FFElem], var: str = "t", shift: int = 0) -> LaurentPoly:
    F = coeffs[0].field
    return LaurentPoly(F, {i + shift: c for i, c in enumerate(coeffs)}, var)


def cleared_dense(g: LaurentPoly) -> List[FFElem]:
    """g * var^{-min_exp} as a dense polynomial in var (nonzero constant term)."""
    if not g.terms:
        raise BadInput("zero polynomial")
    lo = g.min_exp()
    hi = g.max_exp()
    F = g.ring
    out = [F.zero] * (hi - lo + 1)
    for e, c in g.terms.items():
        out[e - lo] = c
    return out


# ---------------------------------------------------------------------------
# differential forms


class DiffForm:
    """mantissa * dt.  ``truncation`` is the lowest exponent of the mantissa
    known exactly (None for exact forms)."""

    __slots__ = ("mantissa", "truncation")

    def __init__(self, mantissa: LaurentPoly, truncation: Optional[int] = None):
        self.mantissa = mantissa
        self.truncation = truncation

    @property
    def ring(self) -> Any:
        return self.mantissa.ring

    def _merge_trunc(self, other: "DiffForm") -> Optional[int]:
        ts = [t for t in (self.truncation, other.truncation) if t is not None]
        return max(ts) if ts else None

    def __add__(self, other: "DiffForm") -> "DiffForm":
        tr = self._merge_trunc(other)
        m = self.mantissa + other.mantissa
        return DiffForm(m.truncate_below(tr) if tr is not None else m, tr)

    def __sub__(self, other: "DiffForm") -> "DiffForm":
        return self + (-other)

    def __neg__(self) -> "DiffForm":
        return DiffForm(-self.mantissa, self.truncation)

    def __mul__(self, f: Any) -> "DiffForm":
        return DiffForm(self.mantissa * f, None if isinstance(f, LaurentPoly) else self.truncation)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiffForm):
            return NotImplemented
        tr = self._merge_trunc(other)
        a, b = self.mantissa, other.mantissa
        if tr is not None:
            a, b = a.truncate_below(tr), b.truncate_below(tr)
        return a == b

    def __hash__(self) -> int:  # pragma: no cover
        return hash(tuple(sorted(self.mantissa.terms)))

    def is_zero(self) -> bool:
        return self.mantissa.is_zero()

    def ord_inf(self) -> int:
        """Order of vanishing at t = infinity: ord_inf(t^k dt) = -k - 2."""
        if self.mantissa.is_zero():
            raise BadInput("zero form has infinite order")
        return -self.mantissa.max_exp() - 2

    def residue_inf(self) -> Any:
        """Residue at infinity: -(coefficient of t^{-1})."""
        return -self.mantissa.coeff(-1)

    def __repr__(self) -> str:
        return f"({self.mantissa!r}) dt"


def derivative(g: LaurentPoly) -> DiffForm:
    out = {}
    for e, c in g.terms.items():
        v = c * e
        if not _is_exact_zero(v):
            out[e - 1] = v
    return DiffForm(LaurentPoly(g.ring, out, g.var))


def series_inverse_inv(h: LaurentPoly, depth: int) -> LaurentPoly:
    """1/(1 + h) for h a polynomial in var^{-1} without constant term, as a
    series in var^{-1} keeping exponents >= -depth."""
    if any(e >= 0 for e in h.terms):
        raise BadInput("h must have only negative exponents")
    ring = h.ring
    one = LaurentPoly.constant(ring, ring.one, h.var)
    result = one
    power = one
    neg_h = -h
    while True:
        power = power.mul_trunc(neg_h, -depth)
        if power.is_zero():
            break
        result = result + power
    return result


def log_derivative(g: LaurentPoly, truncation: int) -> DiffForm:
    """Expansion of dg/g at t = infinity, exact for mantissa exponents >= -truncation."""
    if g.is_zero():
        raise BadInput("log derivative of zero")
    top = g.max_exp()
    lead = g.coeff(top)
    inv_lead = lead.inverse()
    h = (g * inv_lead).shift(-top) - 1
    mant = LaurentPoly.monomial(g.ring, -1, g.ring(top) if isinstance(top, int) else top, g.var)
    if not h.is_zero():
        dh = derivative(h).mantissa
        mant = mant + dh.mul_trunc(series_inverse_inv(h, truncation), -truncation)
    return DiffForm(mant.truncate_below(-truncation), -truncation)


def cartier(omega: DiffForm) -> DiffForm:
    F = omega.ring
    p = F.p
    out = {}
    for m, c in omega.mantissa.terms.items():
        if (m + 1) % p == 0:
            out[(m + 1) // p - 1] = c.pth_root()
    tr = None
    if omega.truncation is not None:
        tr = -((-(omega.truncation + 1)) // p) - 1  # ceil((trunc+1)/p) - 1
    return DiffForm(LaurentPoly(F, out, omega.mantissa.var), tr)


# ---------------------------------------------------------------------------
# roots


def squarefree_check(g: LaurentPoly) -> bool:
    if g.is_zero():
        return False
    f = cleared_dense(g)
    if len(f) <= 1:
        return True
    return len(dpoly_gcd(f, dpoly_deriv(f))) <= 1


def roots_in_extension(g: LaurentPoly) -> Tuple[FiniteField, List[Tuple[FFElem, int]]]:
    """All roots of the cleared polynomial with multiplicities.

    The coefficient field is enlarged to the splitting field of the squarefree
    part; roots are sorted by their canonical digit order.
    """
    f = cleared_dense(g)
    if len(f) <= 1:
        raise BadInput("degree 0 input has no roots")
    F = g.ring
    D = splitting_degree(f)
    big = make_field(F.p, D)
    fb = [embed(c, big) for c in f]
    sq = dpoly_squarefree_part(fb)
    roots = sorted(_split_roots(sq), key=lambda r: r.sort_key())
    out = []
    for r in roots:
        lin = [-r, big.one]
        mult = 0
        cur = dpoly_monic(fb)
        while True:
            q, rem = dpoly_divmod(cur, lin)
            if rem:
                break
            mult += 1
            cur = q
        out.append((r, mult))
    return big, out


# ---------------------------------------------------------------------------
# JSON


def ff_to_json(c: FFElem) -> List[int]:
    return list(c.c)


def poly_to_json(f: LaurentPoly) -> Dict[str, Any]:
    return {"var": f.var, "terms": [[e, ff_to_json(c)] for e, c in f.items()]}


def poly_from_json(obj: Dict[str, Any], field: FiniteField) -> LaurentPoly:
    try:
        var = obj.get("var", "t")
        terms = {}
        for e, c in obj["terms"]:
            if isinstance(c, int):
                c = [c]
            terms[int(e)] = field(list(c))
    except (KeyError, TypeError, ValueError) as exc:
        raise BadInput(f"malformed polynomial JSON: {exc}") from exc
    return LaurentPoly(field, terms, var)
