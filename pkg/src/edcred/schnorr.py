"""Proofs of knowledge of a discrete log with respect to the curve base.

The prover holds mu with statement = mu * P. Interactive flow: prover sends
A = w * P, verifier answers a random challenge c, prover responds with
r = c * mu + w, and the verifier accepts when r * P == A + c * statement.
The non-interactive variant derives c by hashing the commitment, the
statement and a caller-supplied context, so a transcript is bound to the
session it was made for.

Several statements can be proven at once under one shared challenge; the
challenge then hashes every commitment and every statement, which ties the
individual transcripts into a single conjunction.
"""

from __future__ import annotations

from dataclasses import dataclass

from .curve import CurveParams, Point, Scalar
from .hashing import challenge_scalar


@dataclass(frozen=True)
class SchnorrTranscript:
    """One accepted or offered proof: (A, c, r) for a statement."""

    commitment: Point
    challenge: Scalar
    response: Scalar
    statement: Point

    def to_bytes(self) -> bytes:
        w = self.commitment.curve.coord_bytes
        return (
            self.commitment.encode()
            + self.challenge.to_bytes(w)
            + self.response.to_bytes(w)
        )

    @classmethod
    def from_bytes(cls, data: bytes, statement: Point) -> "SchnorrTranscript":
        curve = statement.curve
        w = curve.coord_bytes
        if len(data) != 4 * w:
            raise ValueError("transcript encoding has wrong length")
        return cls(
            commitment=Point.decode(data[: 2 * w], curve),
            challenge=Scalar.from_bytes(data[2 * w : 3 * w], curve.q),
            response=Scalar.from_bytes(data[3 * w :], curve.q),
            statement=statement,
        )


def transcript_size(curve: CurveParams) -> int:
    return 4 * curve.coord_bytes


def pk_commit(curve: CurveParams, rng) -> tuple[Scalar, Point]:
    """Draw the proof nonce w from [1, q-1] and commit A = w * P."""
    w = curve.random_nonzero(rng)
    return w, w * curve.base


def pk_respond(secret: Scalar, nonce: Scalar, challenge: Scalar) -> Scalar:
    return challenge * secret + nonce


def pk_verify(t: SchnorrTranscript) -> bool:
    curve = t.statement.curve
    if not (t.commitment.on_curve() and t.statement.on_curve()):
        return False
    return t.response * curve.base == t.commitment + t.challenge * t.statement


def fs_prove_batch(
    secrets: list[Scalar],
    statements: list[Point],
    context: bytes,
    curve: CurveParams,
    rng,
) -> list[SchnorrTranscript]:
    """Prove every statement under one hash-derived challenge."""
    if len(secrets) != len(statements) or not secrets:
        raise ValueError("need matching nonempty secrets and statements")
    nonces = []
    commitments = []
    for _ in secrets:
        w, a = pk_commit(curve, rng)
        nonces.append(w)
        commitments.append(a)
    c = challenge_scalar(commitments, statements, context, curve)
    return [
        SchnorrTranscript(a, c, pk_respond(mu, w, c), stmt)
        for a, w, mu, stmt in zip(commitments, nonces, secrets, statements)
    ]


def fs_verify_batch(transcripts: list[SchnorrTranscript], context: bytes) -> bool:
    if not transcripts:
        return False
    curve = transcripts[0].statement.curve
    c = challenge_scalar(
        [t.commitment for t in transcripts],
        [t.statement for t in transcripts],
        context,
        curve,
    )
    for t in transcripts:
        if t.challenge != c or not pk_verify(t):
            return False
    return True


def fs_prove(secret: Scalar, statement: Point, context: bytes, rng) -> SchnorrTranscript:
    return fs_prove_batch([secret], [statement], context, statement.curve, rng)[0]


def fs_verify(t: SchnorrTranscript, context: bytes) -> bool:
    return fs_verify_batch([t], context)


def extract_witness(t1: SchnorrTranscript, t2: SchnorrTranscript) -> Scalar:
    """Special soundness: two accepting transcripts with the same commitment
    but different challenges reveal the witness as (r1-r2)/(c1-c2)."""
    if t1.commitment != t2.commitment or t1.statement != t2.statement:
        raise ValueError("transcripts must share commitment and statement")
    if t1.challenge == t2.challenge:
        raise ValueError("challenges must differ")
    return (t1.response - t2.response) * (t1.challenge - t2.challenge).inverse()
