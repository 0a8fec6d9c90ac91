"""Blind issuance of attribute credentials.

The issuer contributes a fresh nonce point, the user blinds everything the
issuer sees, and the result is an ordinary signature the issuer cannot link
back to the session:

    issuer: draw k from [1, q-1], send R' = k * P
    user:   draw alpha, beta from [1, q-1]
            R = alpha * R' + beta * P
            P_i = m_i * P for each attribute, h = prod H(P_i, R)
            h' = h / alpha, prove knowledge of m_0, send (h', P_0, proof)
    issuer: check the proof, send s' = h' * x + k
    user:   check s' * P == h' * Ppub + R', then s = alpha * s' + beta

The credential (attrs, R, s, h) satisfies s * P == h * Ppub + R. The first
attribute m_0 is the user's master secret: it is never revealed, and the
proof of knowledge for P_0 is what the issuer requires before signing.

By default only P_0 crosses the wire (the issuer does not even learn how
many attributes the credential carries); reveal_all switches to sending
every commitment for deployments where the issuer must see them.
"""

from __future__ import annotations

from contextlib import nullcontext
from dataclasses import dataclass

from .curve import OpCounter, Point, Scalar
from .errors import InvalidProofError, IssuerMisbehavior, SessionError
from .hashing import hash_block
from .params import IssuerKey, SystemParams
from .schnorr import SchnorrTranscript, fs_prove, fs_verify, pk_commit, pk_respond, pk_verify

MAX_ATTRIBUTES = 64

_STARTED = "started"
_CHALLENGED = "challenged"
_SIGNED = "signed"


def _check_attrs(attrs, q: int) -> tuple[Scalar, ...]:
    if not 1 <= len(attrs) <= MAX_ATTRIBUTES:
        raise ValueError(f"attribute count must be in [1, {MAX_ATTRIBUTES}]")
    out = []
    for i, m in enumerate(attrs):
        if not isinstance(m, Scalar) or m.q != q:
            raise ValueError(f"attribute {i} is not a scalar mod q")
        if m.v == 0:
            raise ValueError(f"attribute {i} is zero")
        out.append(m)
    return tuple(out)


@dataclass(frozen=True)
class Credential:
    """What the user walks away with: attribute scalars and the signature
    triple (R, s, h) satisfying s * P == h * Ppub + R."""

    attrs: tuple
    r_point: Point
    s: Scalar
    h: Scalar

    MAGIC = b"CRD1"

    def to_bytes(self, params: SystemParams) -> bytes:
        w = params.curve.coord_bytes
        body = [self.MAGIC, params.digest(), len(self.attrs).to_bytes(2, "big")]
        body += [m.to_bytes(w) for m in self.attrs]
        body += [self.r_point.encode(), self.s.to_bytes(w), self.h.to_bytes(w)]
        return b"".join(body)

    @classmethod
    def from_bytes(cls, data: bytes, params: SystemParams) -> "Credential":
        curve = params.curve
        w = curve.coord_bytes
        if data[:4] != cls.MAGIC:
            raise ValueError("not a credential file")
        if data[4:36] != params.digest():
            raise ValueError("credential was issued under different parameters")
        n = int.from_bytes(data[36:38], "big")
        need = 38 + n * w + 2 * w + 2 * w
        if not 1 <= n <= MAX_ATTRIBUTES or len(data) != need:
            raise ValueError("credential encoding has wrong length")
        off = 38
        attrs = []
        for _ in range(n):
            attrs.append(Scalar.from_bytes(data[off : off + w], curve.q))
            off += w
        r_point = Point.decode(data[off : off + 2 * w], curve)
        off += 2 * w
        s = Scalar.from_bytes(data[off : off + w], curve.q)
        h = Scalar.from_bytes(data[off + w : off + 2 * w], curve.q)
        cred = cls(attrs=_check_attrs(attrs, curve.q), r_point=r_point, s=s, h=h)
        if h.v == 0:
            raise ValueError("credential carries h = 0")
        return cred


@dataclass
class IssuanceRequest:
    """What the user sends to be signed."""

    h_bar: Scalar
    commitments: tuple
    proof: SchnorrTranscript | None = None
    pk_commitment: Point | None = None


class IssuerSession:
    """One signing session. The nonce k is destroyed when the session signs
    or aborts, and a session never signs twice."""

    def __init__(self, key: IssuerKey, params: SystemParams, rng):
        self._key = key
        self._params = params
        self._k = params.curve.random_nonzero(rng)
        self.r_bar = self._k * params.curve.base
        self._challenge = None
        self.state = _STARTED

    def issue_challenge(self, rng) -> Scalar:
        """Interactive proof path: hand out a fresh challenge, once."""
        if self.state != _STARTED:
            raise SessionError(f"cannot challenge in state {self.state}")
        self._challenge = self._params.curve.random_nonzero(rng)
        self.state = _CHALLENGED
        return self._challenge

    def sign(
        self,
        request: IssuanceRequest,
        *,
        pk_response: Scalar | None = None,
        context: bytes = b"",
        pk_ops: OpCounter | None = None,
    ) -> Scalar:
        """Verify the proof of knowledge for P_0, then sign blindly.

        The session accepts either a non-interactive proof in the request or,
        after issue_challenge, the bare response to its own challenge.
        Refuses to sign twice and wipes the nonce afterwards.
        """
        if self.state == _SIGNED:
            raise SessionError("session already signed")
        curve = self._params.curve
        if not isinstance(request.h_bar, Scalar) or request.h_bar.q != curve.q:
            raise InvalidProofError("blinded hash is not a scalar mod q")
        if request.h_bar.v == 0:
            raise InvalidProofError("blinded hash is zero")
        if not request.commitments:
            raise InvalidProofError("request carries no commitment")
        for pt in request.commitments:
            if not isinstance(pt, Point) or not pt.on_curve():
                raise InvalidProofError("commitment not on curve")
        p0 = request.commitments[0]

        with pk_ops if pk_ops is not None else nullcontext():
            if self.state == _CHALLENGED:
                if pk_response is None or request.pk_commitment is None:
                    raise InvalidProofError("interactive proof is incomplete")
                transcript = SchnorrTranscript(
                    commitment=request.pk_commitment,
                    challenge=self._challenge,
                    response=pk_response,
                    statement=p0,
                )
                ok = pk_verify(transcript)
            else:
                if request.proof is None:
                    raise InvalidProofError("request carries no proof")
                if request.proof.statement != p0:
                    raise InvalidProofError("proof is not about the first commitment")
                ok = fs_verify(request.proof, context)
        if not ok:
            raise InvalidProofError("proof of knowledge for the master secret failed")

        s_bar = sign_response(request.h_bar, self._key.x, self._k)
        self._k = None
        self._challenge = None
        self.state = _SIGNED
        return s_bar


def sign_response(h_bar: Scalar, x: Scalar, k: Scalar) -> Scalar:
    """The issuer's actual signing arithmetic: s' = h' * x + k mod q."""
    return h_bar * x + k


def issuer_start(key: IssuerKey, params: SystemParams, rng) -> tuple[IssuerSession, Point]:
    session = IssuerSession(key, params, rng)
    return session, session.r_bar


@dataclass
class UserBlindState:
    """Everything the user must remember between blinding and unblinding."""

    alpha: Scalar
    beta: Scalar
    r_bar: Point
    r_point: Point
    h: Scalar
    h_bar: Scalar
    attrs: tuple
    commitments: tuple
    pk_nonce: Scalar | None = None
    pk_commitment: Point | None = None


def user_blind(
    r_bar: Point,
    attrs,
    params: SystemParams,
    rng,
    *,
    interactive: bool = False,
    context: bytes = b"",
    reveal_all: bool = False,
    pk_ops: OpCounter | None = None,
) -> tuple[UserBlindState, IssuanceRequest]:
    """Blind the issuer nonce and build the signing request.

    attrs is the full attribute list with the master secret first. With
    interactive=True the request carries only the proof commitment and the
    caller must answer the issuer's challenge via user_pk_respond.
    """
    curve = params.curve
    attrs = _check_attrs(attrs, curve.q)
    if not r_bar.on_curve():
        raise ValueError("issuer nonce point not on curve")
    alpha = curve.random_nonzero(rng)
    beta = curve.random_nonzero(rng)
    r_point = alpha * r_bar + beta * curve.base
    commitments = tuple(m * curve.base for m in attrs)
    h = hash_block(list(commitments), r_point)
    h_bar = h * alpha.inverse()

    state = UserBlindState(
        alpha=alpha,
        beta=beta,
        r_bar=r_bar,
        r_point=r_point,
        h=h,
        h_bar=h_bar,
        attrs=attrs,
        commitments=commitments,
    )
    sent = commitments if reveal_all else commitments[:1]
    with pk_ops if pk_ops is not None else nullcontext():
        if interactive:
            w, a = pk_commit(curve, rng)
            state.pk_nonce = w
            state.pk_commitment = a
            request = IssuanceRequest(h_bar=h_bar, commitments=sent, pk_commitment=a)
        else:
            proof = fs_prove(attrs[0], commitments[0], context, rng)
            request = IssuanceRequest(h_bar=h_bar, commitments=sent, proof=proof)
    return state, request


def user_pk_respond(state: UserBlindState, challenge: Scalar) -> Scalar:
    if state.pk_nonce is None:
        raise SessionError("no interactive proof pending")
    response = pk_respond(state.attrs[0], state.pk_nonce, challenge)
    state.pk_nonce = None
    return response


def user_unblind(state: UserBlindState, s_bar: Scalar, params: SystemParams) -> Credential:
    """Check the issuer's response against its nonce, then strip the blinding:
    s = alpha * s' + beta. Raises IssuerMisbehavior when the check fails."""
    curve = params.curve
    if s_bar.q != curve.q:
        raise ValueError("response is not a scalar mod q")
    if s_bar * curve.base != state.h_bar * params.p_pub + state.r_bar:
        raise IssuerMisbehavior("blinded response fails the check equation")
    s = state.alpha * s_bar + state.beta
    return Credential(attrs=state.attrs, r_point=state.r_point, s=s, h=state.h)
