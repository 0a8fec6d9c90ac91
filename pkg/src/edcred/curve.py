"""Affine group arithmetic on complete Edwards curves over prime fields.

A curve is the solution set of x^2 + y^2 = 1 + d*x^2*y^2 over GF(p) with d a
quadratic non-residue, which makes the addition law complete: the denominators
1 +- d*x1*x2*y1*y2 never vanish on curve points, so there are no special cases
and no points at infinity. The neutral element is (0, 1), the inverse of
(x, y) is (-x, y), (0, -1) has order two and (+-1, 0) have order four, so the
group order is always divisible by four and scalars live modulo the prime
order q of the chosen base point.

Two moduli are in play and must not be mixed: coordinates are integers mod p,
exponents are Scalar values mod q. Coordinates are kept as plain ints inside
Point; Scalar is a real class because scalars cross module boundaries where a
silent modulus mixup would be the expensive bug.
"""

from __future__ import annotations

import contextvars
from importlib import resources

from .errors import RngError

# Hard cap for the exhaustive helpers; anything bigger is not a toy curve.
MAX_ENUMERABLE_P = 10_000

_DRAW_ATTEMPTS = 100

_active_counter: contextvars.ContextVar["OpCounter | None"] = contextvars.ContextVar(
    "edcred_active_opcounter", default=None
)


def inv_mod(a: int, m: int) -> int:
    """Inverse of a modulo m, raising ValueError when none exists.

    pow with exponent -1 resolves to the C extended-gcd path, which measures
    about nine times faster than the p-2 exponentiation route at 251 bits;
    both routes are asserted equal in the test suite.
    """
    return pow(a, -1, m)


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin with a fixed witness set (deterministic below 3.3e24)."""
    if n < 2:
        return False
    for small in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % small == 0:
            return n == small
    r, s = n - 1, 0
    while r % 2 == 0:
        r //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, r, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# operation counting

class OpCounter:
    """Tallies group operations while installed via ``with``.

    scalar_mults, point_adds and point_doubles count protocol-level calls:
    one scalar_mults tick per k*P regardless of how the ladder runs, one
    point_adds tick per explicit addition. The ladder's internal steps land
    in inner_adds / inner_doubles and stay out of the headline numbers.

    Counters nest: entering a second counter redirects counting to it until
    it exits, which is how proof-of-knowledge costs are kept in a separate
    column. Installation is per execution context, so threads do not
    interleave counts.
    """

    __slots__ = (
        "scalar_mults",
        "point_adds",
        "point_doubles",
        "inner_adds",
        "inner_doubles",
        "_token",
    )

    def __init__(self):
        self.reset()
        self._token = None

    def reset(self) -> None:
        self.scalar_mults = 0
        self.point_adds = 0
        self.point_doubles = 0
        self.inner_adds = 0
        self.inner_doubles = 0

    def __enter__(self) -> "OpCounter":
        self._token = _active_counter.set(self)
        return self

    def __exit__(self, *exc) -> None:
        _active_counter.reset(self._token)
        self._token = None

    def as_dict(self) -> dict:
        return {
            "scalar_mults": self.scalar_mults,
            "point_adds": self.point_adds,
            "point_doubles": self.point_doubles,
            "inner_adds": self.inner_adds,
            "inner_doubles": self.inner_doubles,
        }

    def __repr__(self):
        return (
            f"OpCounter(Ms={self.scalar_mults}, Ap={self.point_adds}, "
            f"Dp={self.point_doubles})"
        )


# ---------------------------------------------------------------------------
# raw affine formulas on int pairs

def _add_xy(p, d, x1, y1, x2, y2):
    # One shared inversion covers both denominators: with
    # t = d*x1*x2*y1*y2, inv((1+t)(1-t)) recovers each via one extra mul.
    t = d * x1 % p * x2 % p * y1 % p * y2 % p
    a = (1 + t) % p
    b = (1 - t) % p
    inv_ab = pow(a * b % p, -1, p)
    x3 = (x1 * y2 + x2 * y1) % p * (inv_ab * b % p) % p
    y3 = (y1 * y2 - x1 * x2) % p * (inv_ab * a % p) % p
    return x3, y3


def _dbl_xy(p, x, y):
    # 2(x,y) = (2xy/(x^2+y^2), (y^2-x^2)/(2-x^2-y^2)); d drops out on curve.
    xx = x * x % p
    yy = y * y % p
    a = (xx + yy) % p
    b = (2 - xx - yy) % p
    inv_ab = pow(a * b % p, -1, p)
    x3 = 2 * x * y % p * (inv_ab * b % p) % p
    y3 = (yy - xx) % p * (inv_ab * a % p) % p
    return x3, y3


# ---------------------------------------------------------------------------
# scalars mod q

class Scalar:
    """An exponent modulo the prime subgroup order q."""

    __slots__ = ("v", "q")

    def __init__(self, v: int, q: int):
        self.v = v % q
        self.q = q

    def _coerce(self, other):
        if isinstance(other, Scalar):
            if other.q != self.q:
                raise ValueError("scalars from different groups")
            return other.v
        if isinstance(other, int):
            return other % self.q
        return None

    def __add__(self, other):
        w = self._coerce(other)
        if w is None:
            return NotImplemented
        return Scalar(self.v + w, self.q)

    __radd__ = __add__

    def __sub__(self, other):
        w = self._coerce(other)
        if w is None:
            return NotImplemented
        return Scalar(self.v - w, self.q)

    def __rsub__(self, other):
        w = self._coerce(other)
        if w is None:
            return NotImplemented
        return Scalar(w - self.v, self.q)

    def __mul__(self, other):
        w = self._coerce(other)
        if w is None:
            return NotImplemented
        return Scalar(self.v * w, self.q)

    __rmul__ = __mul__

    def __neg__(self):
        return Scalar(-self.v, self.q)

    def inverse(self) -> "Scalar":
        if self.v == 0:
            raise ValueError("zero has no inverse")
        return Scalar(inv_mod(self.v, self.q), self.q)

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.q == other.q and self.v == other.v
        if isinstance(other, int):
            return self.v == other % self.q
        return NotImplemented

    def __hash__(self):
        return hash((self.v, self.q))

    def __int__(self):
        return self.v

    def __bool__(self):
        return self.v != 0

    def to_bytes(self, length: int) -> bytes:
        return self.v.to_bytes(length, "big")

    @classmethod
    def from_bytes(cls, data: bytes, q: int) -> "Scalar":
        v = int.from_bytes(data, "big")
        if v >= q:
            raise ValueError("scalar encoding out of range")
        return cls(v, q)

    def __repr__(self):
        return f"Scalar({self.v})"


# ---------------------------------------------------------------------------
# points

class Point:
    """An affine point bound to its curve. Treat instances as immutable."""

    __slots__ = ("x", "y", "curve", "_ladder")

    def __init__(self, x: int, y: int, curve: "CurveParams"):
        self.x = x
        self.y = y
        self.curve = curve
        self._ladder = None

    def on_curve(self) -> bool:
        p = self.curve.p
        x, y = self.x, self.y
        if not (0 <= x < p and 0 <= y < p):
            return False
        xx = x * x % p
        yy = y * y % p
        return (xx + yy) % p == (1 + self.curve.d * xx % p * yy) % p

    def is_neutral(self) -> bool:
        return self.x == 0 and self.y == 1

    def _same_curve(self, other: "Point"):
        if self.curve is not other.curve and self.curve != other.curve:
            raise ValueError("points on different curves")

    def __add__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        self._same_curve(other)
        ctr = _active_counter.get()
        if ctr is not None:
            ctr.point_adds += 1
        c = self.curve
        x, y = _add_xy(c.p, c.d, self.x, self.y, other.x, other.y)
        return Point(x, y, c)

    def __neg__(self):
        return Point(-self.x % self.curve.p, self.y, self.curve)

    def __sub__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        return self.__add__(-other)

    def double(self) -> "Point":
        ctr = _active_counter.get()
        if ctr is not None:
            ctr.point_doubles += 1
        c = self.curve
        x, y = _dbl_xy(c.p, self.x, self.y)
        return Point(x, y, c)

    def precompute(self) -> "Point":
        """Cache the doubling ladder so repeated multiples cost only adds.

        Worth it for long-lived bases (the generator, a public key); a point
        multiplied once gains nothing.
        """
        if self._ladder is None:
            c = self.curve
            lad = [(self.x, self.y)]
            for _ in range(c.q.bit_length() - 1):
                lad.append(_dbl_xy(c.p, *lad[-1]))
            self._ladder = lad
        return self

    def __rmul__(self, k):
        c = self.curve
        if isinstance(k, Scalar):
            if k.q != c.q:
                raise ValueError("scalar from a different group")
            k = k.v
        elif isinstance(k, int):
            k %= c.q
        else:
            return NotImplemented
        ctr = _active_counter.get()
        if ctr is not None:
            ctr.scalar_mults += 1
        return self._mul_reduced(k, ctr)

    def _mul_reduced(self, k: int, ctr) -> "Point":
        c = self.curve
        if k == 0:
            return c.neutral()
        p, d = c.p, c.d
        if self._ladder is not None:
            lad = self._ladder
            acc = None
            i = 0
            adds = 0
            while k:
                if k & 1:
                    if acc is None:
                        acc = lad[i]
                    else:
                        acc = _add_xy(p, d, acc[0], acc[1], *lad[i])
                        adds += 1
                k >>= 1
                i += 1
            if ctr is not None:
                ctr.inner_adds += adds
            return Point(acc[0], acc[1], c)
        # plain left-to-right double-and-add
        ax, ay = self.x, self.y
        dbls = adds = 0
        for bit in bin(k)[3:]:
            ax, ay = _dbl_xy(p, ax, ay)
            dbls += 1
            if bit == "1":
                ax, ay = _add_xy(p, d, ax, ay, self.x, self.y)
                adds += 1
        if ctr is not None:
            ctr.inner_doubles += dbls
            ctr.inner_adds += adds
        return Point(ax, ay, c)

    def __eq__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        return (
            self.x == other.x
            and self.y == other.y
            and (self.curve is other.curve or self.curve == other.curve)
        )

    def __hash__(self):
        return hash((self.x, self.y, self.curve.p, self.curve.d))

    def encode(self) -> bytes:
        w = self.curve.coord_bytes
        return self.x.to_bytes(w, "big") + self.y.to_bytes(w, "big")

    @classmethod
    def decode(cls, data: bytes, curve: "CurveParams") -> "Point":
        w = curve.coord_bytes
        if len(data) != 2 * w:
            raise ValueError("point encoding has wrong length")
        pt = cls(int.from_bytes(data[:w], "big"), int.from_bytes(data[w:], "big"), curve)
        if not pt.on_curve():
            raise ValueError("point encoding not on curve")
        return pt

    def __repr__(self):
        return f"Point({self.x}, {self.y})"


# ---------------------------------------------------------------------------
# curve parameters

_CURVE_FILE_KEYS = ("name", "p", "d", "Px", "Py", "q", "cofactor")


class CurveParams:
    """Static description of one curve plus its chosen base point."""

    __slots__ = ("name", "p", "d", "q", "cofactor", "coord_bytes", "_base")

    def __init__(self, name: str, p: int, d: int, gx: int, gy: int, q: int, cofactor: int):
        self.name = name
        self.p = p
        self.d = d % p
        self.q = q
        self.cofactor = cofactor
        self.coord_bytes = (p.bit_length() + 7) // 8
        self._base = Point(gx, gy, self)

    @property
    def base(self) -> Point:
        return self._base

    def neutral(self) -> Point:
        return Point(0, 1, self)

    def scalar(self, v: int) -> Scalar:
        return Scalar(v, self.q)

    def random_nonzero(self, rng) -> Scalar:
        """Uniform draw from [1, q-1]; zero draws are redrawn a bounded
        number of times so a broken source fails loudly instead of looping."""
        for _ in range(_DRAW_ATTEMPTS):
            v = rng.randrange(0, self.q)
            if v != 0:
                return Scalar(v, self.q)
        raise RngError("randomness source keeps returning zero")

    def __eq__(self, other):
        if not isinstance(other, CurveParams):
            return NotImplemented
        return (
            self.p == other.p
            and self.d == other.d
            and self.q == other.q
            and self.cofactor == other.cofactor
            and self._base.x == other._base.x
            and self._base.y == other._base.y
        )

    def __hash__(self):
        return hash((self.p, self.d, self.q))

    def __repr__(self):
        return f"CurveParams({self.name!r}, p={self.p}, d={self.d}, q={self.q})"

    # -- key=value fixture format ------------------------------------------

    def format_file(self) -> str:
        vals = {
            "name": self.name,
            "p": self.p,
            "d": self.d,
            "Px": self._base.x,
            "Py": self._base.y,
            "q": self.q,
            "cofactor": self.cofactor,
        }
        return "".join(f"{k}={vals[k]}\n" for k in _CURVE_FILE_KEYS)

    @classmethod
    def parse_file(cls, text: str) -> "CurveParams":
        fields = parse_kv(text, required=_CURVE_FILE_KEYS)
        curve = cls(
            name=fields["name"],
            p=int(fields["p"]),
            d=int(fields["d"]),
            gx=int(fields["Px"]),
            gy=int(fields["Py"]),
            q=int(fields["q"]),
            cofactor=int(fields["cofactor"]),
        )
        if not curve.base.on_curve():
            raise ValueError("curve file: base point not on curve")
        return curve


def parse_kv(text: str, required=()) -> dict:
    """Parse the shared key=value line format. Unknown keys are kept;
    duplicates and junk lines are rejected."""
    fields = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value")
        key, val = line.split("=", 1)
        key = key.strip()
        if key in fields:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        fields[key] = val.strip()
    for key in required:
        if key not in fields:
            raise ValueError(f"missing key {key!r}")
    return fields


# ---------------------------------------------------------------------------
# the two shipped curves

# Curve1174 (Bernstein, Hamburg, Krasnova, Lange): x^2+y^2 = 1 - 1174 x^2 y^2
# over GF(2^251 - 9), cofactor 4, prime subgroup order 2^249 - 11332...711.
# Constants restated from the published curve description; the repository
# script tools/check_production_curve.py re-derives every claim (primality,
# d a non-residue, Hasse window, base point order) from p and d alone.
_P1174 = 2**251 - 9
_CURVE1174 = dict(
    name="curve1174",
    p=_P1174,
    d=_P1174 - 1174,
    gx=1582619097725911541954547006453739763381091388846394833492296309729998839514,
    gy=3037538013604154504764115728651437646519513534305223422754827055689195992590,
    q=2**249 - 11332719920821432534773113288178349711,
    cofactor=4,
)

_singletons: dict = {}


def production_curve() -> CurveParams:
    if "production" not in _singletons:
        c = CurveParams(**_CURVE1174)
        c.base.precompute()
        _singletons["production"] = c
    return _singletons["production"]


def toy_curve() -> CurveParams:
    """The small curve used by exhaustive tests, frozen in data/toy_curve.txt.

    Selected by tools/find_toy_curve.py: p = 1009, d the smallest quadratic
    non-residue whose curve has a prime-order subgroup of at least 100.
    """
    if "toy" not in _singletons:
        text = resources.files("edcred").joinpath("data/toy_curve.txt").read_text()
        c = CurveParams.parse_file(text)
        c.base.precompute()
        _singletons["toy"] = c
    return _singletons["toy"]


def curve_by_name(name: str) -> CurveParams:
    if name in ("toy", "toy1009"):
        return toy_curve()
    if name in ("prod", "production", "curve1174"):
        return production_curve()
    raise ValueError(f"unknown curve {name!r}")


# ---------------------------------------------------------------------------
# exhaustive helpers, usable only at toy scale

def enumerate_points(curve: CurveParams) -> list[Point]:
    """Every affine point of the curve, sorted by (x, y).

    Walks x and solves y^2 = (1-x^2)/(1-d*x^2) with a square-root table,
    so the cost is O(p) rather than O(p^2). Refuses non-toy fields.
    """
    p, d = curve.p, curve.d
    if p > MAX_ENUMERABLE_P:
        raise ValueError(f"enumeration capped at p <= {MAX_ENUMERABLE_P}")
    roots: dict[int, list[int]] = {}
    for y in range(p):
        roots.setdefault(y * y % p, []).append(y)
    pts = []
    for x in range(p):
        num = (1 - x * x) % p
        den = (1 - d * x * x) % p
        # d is a non-residue, so den vanishes for no x
        t = num * inv_mod(den, p) % p
        for y in roots.get(t, ()):
            pts.append(Point(x, y, curve))
    return pts


def dlp_bruteforce(target: Point, base: Point) -> Scalar:
    """Smallest k with k*base == target, by walking the subgroup.

    Only defined for toy curves and for base points of order dividing q;
    raises ValueError when target is not a multiple of base.
    """
    curve = base.curve
    if curve.p > MAX_ENUMERABLE_P:
        raise ValueError(f"brute force capped at p <= {MAX_ENUMERABLE_P}")
    target._same_curve(base)
    ax, ay = 0, 1
    for k in range(curve.q):
        if ax == target.x and ay == target.y:
            return Scalar(k, curve.q)
        ax, ay = _add_xy(curve.p, curve.d, ax, ay, base.x, base.y)
    raise ValueError("target is not in the subgroup generated by base")


def in_prime_subgroup(pt: Point) -> bool:
    """True when pt lies in the order-q subgroup.

    Cannot be written as (q * pt).is_neutral(): multiplication reduces the
    exponent mod q, which maps q to 0 and calls every point a member. Split
    the exponent as (q-1)+1 to keep the reduction out of the way.
    """
    if not pt.on_curve():
        return False
    return ((pt.curve.q - 1) * pt + pt).is_neutral()


def hasse_holds(order: int, p: int) -> bool:
    """|order - (p+1)| <= 2*sqrt(p), checked without floats."""
    t = order - (p + 1)
    return t * t <= 4 * p


__all__ = [
    "CurveParams",
    "OpCounter",
    "Point",
    "Scalar",
    "curve_by_name",
    "dlp_bruteforce",
    "enumerate_points",
    "hasse_holds",
    "in_prime_subgroup",
    "inv_mod",
    "is_probable_prime",
    "parse_kv",
    "production_curve",
    "toy_curve",
    "MAX_ENUMERABLE_P",
]
