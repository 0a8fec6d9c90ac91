"""System parameters and issuer keys.

A deployment is a curve, a base point and the issuer public key
Ppub = x * P. The secret x never appears inside SystemParams or its file
form; it lives only in the separate issuer key file, so serializing or
publishing params can never leak it. Both files use the same key=value
text lines as curve fixtures.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .curve import (
    CurveParams,
    Point,
    Scalar,
    curve_by_name,
    hasse_holds,
    in_prime_subgroup,
    is_probable_prime,
    parse_kv,
)

_PARAMS_KEYS = ("Ppubx", "Ppuby", "hash", "k")


def _security_bits(q: int) -> int:
    # generic-group discrete log costs about sqrt(q) work
    return q.bit_length() // 2


@dataclass
class SystemParams:
    """Public issuance parameters: curve plus issuer public key."""

    curve: CurveParams
    p_pub: Point
    hash_name: str = "sha256"
    k: int = 0

    def __post_init__(self):
        if self.k == 0:
            self.k = _security_bits(self.curve.q)
        if self.hash_name != "sha256":
            raise ValueError(f"unsupported hash {self.hash_name!r}")
        self.p_pub.precompute()

    def format_file(self) -> str:
        return (
            self.curve.format_file()
            + f"Ppubx={self.p_pub.x}\n"
            + f"Ppuby={self.p_pub.y}\n"
            + f"hash={self.hash_name}\n"
            + f"k={self.k}\n"
        )

    def digest(self) -> bytes:
        """Stable 32-byte identifier, bound into every proof context and
        token so artifacts cannot migrate between deployments."""
        return hashlib.sha256(self.format_file().encode()).digest()

    @classmethod
    def parse_file(cls, text: str) -> "SystemParams":
        curve = CurveParams.parse_file(text)
        fields = parse_kv(text, required=_PARAMS_KEYS)
        p_pub = Point(int(fields["Ppubx"]), int(fields["Ppuby"]), curve)
        if not p_pub.on_curve():
            raise ValueError("params file: public key not on curve")
        return cls(curve=curve, p_pub=p_pub, hash_name=fields["hash"], k=int(fields["k"]))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.format_file())

    @classmethod
    def load(cls, path) -> "SystemParams":
        with open(path) as fh:
            return cls.parse_file(fh.read())


@dataclass
class IssuerKey:
    """The issuer secret x with its public counterpart."""

    x: Scalar
    p_pub: Point

    def format_file(self, params: SystemParams) -> str:
        return params.format_file() + f"x={self.x.v}\n"

    def save(self, path, params: SystemParams) -> None:
        with open(path, "w") as fh:
            fh.write(self.format_file(params))

    @classmethod
    def load(cls, path) -> tuple[SystemParams, "IssuerKey"]:
        with open(path) as fh:
            text = fh.read()
        params = SystemParams.parse_file(text)
        fields = parse_kv(text, required=("x",))
        x = Scalar(int(fields["x"]), params.curve.q)
        if x.v == 0:
            raise ValueError("key file: x must be nonzero")
        key = cls(x=x, p_pub=params.p_pub)
        if x * params.curve.base != params.p_pub:
            raise ValueError("key file: x does not match public key")
        return params, key


def setup(curve="toy", rng=None) -> tuple[SystemParams, IssuerKey]:
    """Create a deployment: draw x uniform from [1, q-1], publish x * P."""
    if isinstance(curve, str):
        curve = curve_by_name(curve)
    if rng is None:
        import random

        rng = random.SystemRandom()
    x = curve.random_nonzero(rng)
    p_pub = x * curve.base
    params = SystemParams(curve=curve, p_pub=p_pub)
    return params, IssuerKey(x=x, p_pub=params.p_pub)


@dataclass
class ParamsCheck:
    """Boolean verdict that remembers why it is false."""

    problems: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def __bool__(self) -> bool:
        return self.ok

    def note(self, problem: str) -> None:
        self.problems.append(problem)


def validate_params(params: SystemParams) -> ParamsCheck:
    """Full consistency audit of a parameter set.

    Runs the expensive subgroup checks too (two scalar multiplications),
    so call it at load or setup time rather than per operation.
    """
    c = params.curve
    check = ParamsCheck()
    if not is_probable_prime(c.p):
        check.note("p is not prime")
    if not is_probable_prime(c.q):
        check.note("q is not prime")
    if c.d % c.p in (0, 1):
        check.note("d is 0 or 1")
    elif pow(c.d, (c.p - 1) // 2, c.p) != c.p - 1:
        check.note("d is a square, addition law not complete")
    if not c.base.on_curve():
        check.note("base point not on curve")
    elif c.base.is_neutral():
        check.note("base point is neutral")
    elif not in_prime_subgroup(c.base):
        check.note("base point order does not divide q")
    if not hasse_holds(c.cofactor * c.q, c.p):
        check.note("cofactor * q outside the Hasse window")
    if not params.p_pub.on_curve():
        check.note("public key not on curve")
    elif params.p_pub.is_neutral():
        check.note("public key is neutral")
    elif not in_prime_subgroup(params.p_pub):
        check.note("public key outside the prime-order subgroup")
    if params.k > c.q.bit_length():
        check.note("claimed security level exceeds group size")
    return check
