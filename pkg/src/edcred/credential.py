"""Verification, randomization and full-show presentation tokens.

A signature triple (R, s, h) verifies through s * P == h * Ppub + R. Anyone
holding one can re-randomize it: pick r, set s^ = s + r and R^ = R + r * P;
the triple (R^, s^, h) verifies again and is unlinkable to the original as
a pair, while h deliberately stays fixed. Verifiers always use the h they
were handed and never recompute it, which is what keeps randomized triples
verifiable.

A presentation token carries the triple, the master-secret commitment P_0
and a proof of knowledge for it, all bound under one hash context so none
of the parts can be swapped out individually.
"""

from __future__ import annotations

from contextlib import nullcontext
from dataclasses import dataclass

from .curve import OpCounter, Point, Scalar
from .issuance import Credential
from .params import SystemParams
from .schnorr import SchnorrTranscript, fs_prove, fs_verify, transcript_size

SESSION_ID_BYTES = 16


@dataclass(frozen=True)
class PresentationSignature:
    """The public part of a credential: the triple (R, s, h)."""

    r_point: Point
    s: Scalar
    h: Scalar

    def encode(self) -> bytes:
        w = self.r_point.curve.coord_bytes
        return self.r_point.encode() + self.s.to_bytes(w) + self.h.to_bytes(w)

    @classmethod
    def decode(cls, data: bytes, params: SystemParams) -> "PresentationSignature":
        curve = params.curve
        w = curve.coord_bytes
        if len(data) != 4 * w:
            raise ValueError("signature encoding has wrong length")
        sig = cls(
            r_point=Point.decode(data[: 2 * w], curve),
            s=Scalar.from_bytes(data[2 * w : 3 * w], curve.q),
            h=Scalar.from_bytes(data[3 * w :], curve.q),
        )
        if sig.h.v == 0:
            raise ValueError("signature carries h = 0")
        return sig


def signature_of(cred: Credential) -> PresentationSignature:
    return PresentationSignature(r_point=cred.r_point, s=cred.s, h=cred.h)


def check_equation(sig: PresentationSignature, params: SystemParams) -> bool:
    """The bare curve-equation check, two multiplications and one addition."""
    if not sig.r_point.on_curve() or sig.h.v == 0:
        return False
    curve = params.curve
    return sig.s * curve.base == sig.h * params.p_pub + sig.r_point


def verify_signature(
    sig: PresentationSignature,
    proof: SchnorrTranscript,
    params: SystemParams,
    *,
    context: bytes = b"",
    pk_ops: OpCounter | None = None,
) -> bool:
    """Equation plus master-secret proof; both must hold."""
    if not check_equation(sig, params):
        return False
    with pk_ops if pk_ops is not None else nullcontext():
        return fs_verify(proof, context)


def randomize(
    sig: PresentationSignature,
    params: SystemParams,
    rng=None,
    *,
    r: Scalar | None = None,
) -> PresentationSignature:
    """Fresh verifying triple: (R + r * P, s + r, h) for r in [1, q-1].

    Randomizations compose additively: applying r1 then r2 lands on the
    same triple as applying r1 + r2 once.
    """
    curve = params.curve
    if r is None:
        if rng is None:
            raise ValueError("need an rng or an explicit r")
        r = curve.random_nonzero(rng)
    elif r.q != curve.q:
        raise ValueError("r is not a scalar mod q")
    return PresentationSignature(
        r_point=sig.r_point + r * curve.base,
        s=sig.s + r,
        h=sig.h,
    )


@dataclass(frozen=True)
class PresentationToken:
    """A full show: randomized triple, P_0 and its proof of knowledge."""

    sig: PresentationSignature
    commitment0: Point
    proof: SchnorrTranscript
    session_id: bytes

    def to_bytes(self, params: SystemParams) -> bytes:
        return (
            params.digest()
            + self.sig.encode()
            + self.commitment0.encode()
            + self.proof.to_bytes()
        )

    @classmethod
    def from_bytes(cls, data: bytes, params: SystemParams, session_id: bytes) -> "PresentationToken":
        curve = params.curve
        w = curve.coord_bytes
        need = 32 + 4 * w + 2 * w + transcript_size(curve)
        if len(data) != need:
            raise ValueError("presentation token has wrong length")
        if data[:32] != params.digest():
            raise ValueError("token was made under different parameters")
        sig = PresentationSignature.decode(data[32 : 32 + 4 * w], params)
        commitment0 = Point.decode(data[32 + 4 * w : 32 + 6 * w], curve)
        proof = SchnorrTranscript.from_bytes(data[32 + 6 * w :], commitment0)
        return cls(sig=sig, commitment0=commitment0, proof=proof, session_id=session_id)


def presentation_context(params: SystemParams, session_id: bytes, sig: PresentationSignature) -> bytes:
    """Everything the token proof must be bound to, except the proof itself."""
    return b"PRESENT:" + params.digest() + session_id + sig.encode()


def make_presentation(
    cred: Credential,
    params: SystemParams,
    rng,
    *,
    fresh: bool = True,
    session_id: bytes | None = None,
) -> PresentationToken:
    """Build a token from a credential, randomizing the triple by default."""
    if session_id is None:
        session_id = rng.getrandbits(8 * SESSION_ID_BYTES).to_bytes(SESSION_ID_BYTES, "big")
    sig = signature_of(cred)
    if fresh:
        sig = randomize(sig, params, rng)
    p0 = cred.attrs[0] * params.curve.base
    ctx = presentation_context(params, session_id, sig)
    proof = fs_prove(cred.attrs[0], p0, ctx, rng)
    return PresentationToken(sig=sig, commitment0=p0, proof=proof, session_id=session_id)


def verify_presentation(
    token: PresentationToken,
    params: SystemParams,
    *,
    pk_ops: OpCounter | None = None,
) -> bool:
    ctx = presentation_context(params, token.session_id, token.sig)
    return verify_signature(token.sig, token.proof, params, context=ctx, pk_ops=pk_ops)
