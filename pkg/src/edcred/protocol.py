"""Issuance driven over wire messages.

Both parties are sans-io engines: feed a message in, get the reply out.
The same engines run in-process, over a socket pair or over a unix socket;
whatever carries the bytes records a Transcript on the way through.

Message flow, with CHAL only present for the interactive proof:

    issuer                          user
      ISS1 {R'}             ->
                            <-      ISS2 {h', commitments, proof or A}
      CHAL {c}              ->
                            <-      CHAL {response}
      ISS3 {s'}             ->

The issuer's view of a session is exactly the messages above: the
unblinded triple (R, s, h) never crosses the wire, which the transcript
tests pin down by scanning these bytes.
"""

from __future__ import annotations

from collections import deque

from .curve import Point, Scalar
from .errors import ProtocolError, SessionError, WireError
from .issuance import (
    IssuanceRequest,
    IssuerSession,
    issuer_start,
    user_blind,
    user_pk_respond,
    user_unblind,
)
from .params import IssuerKey, SystemParams
from .schnorr import SchnorrTranscript, transcript_size
from .wire import (
    ISSUER_TO_USER,
    MSG_CHAL,
    MSG_ISS1,
    MSG_ISS2,
    MSG_ISS3,
    SESSION_ID_LEN,
    Transcript,
    USER_TO_ISSUER,
    WireMessage,
    read_message,
    write_message,
)

_FLAG_INTERACTIVE = 0x01
_FLAG_REVEAL_ALL = 0x02


def issuance_context(params: SystemParams, session_id: bytes) -> bytes:
    """Context for the non-interactive issuance proof: deployment, session
    and message type."""
    return b"ISSUE:" + params.digest() + session_id


# -- ISS2 body ---------------------------------------------------------------

def encode_request(req: IssuanceRequest, params: SystemParams) -> bytes:
    w = params.curve.coord_bytes
    flags = 0
    if req.pk_commitment is not None:
        flags |= _FLAG_INTERACTIVE
    if len(req.commitments) > 1:
        flags |= _FLAG_REVEAL_ALL
    parts = [bytes((flags,)), req.h_bar.to_bytes(w), len(req.commitments).to_bytes(2, "big")]
    parts += [pt.encode() for pt in req.commitments]
    if req.pk_commitment is not None:
        parts.append(req.pk_commitment.encode())
    else:
        parts.append(req.proof.to_bytes())
    return b"".join(parts)


def decode_request(body: bytes, params: SystemParams) -> IssuanceRequest:
    curve = params.curve
    w = curve.coord_bytes
    try:
        flags = body[0]
        h_bar = Scalar.from_bytes(body[1 : 1 + w], curve.q)
        count = int.from_bytes(body[1 + w : 3 + w], "big")
        if count < 1:
            raise ValueError("no commitments")
        off = 3 + w
        commitments = []
        for _ in range(count):
            commitments.append(Point.decode(body[off : off + 2 * w], curve))
            off += 2 * w
        if flags & _FLAG_INTERACTIVE:
            pk_commitment = Point.decode(body[off : off + 2 * w], curve)
            off += 2 * w
            proof = None
        else:
            proof = SchnorrTranscript.from_bytes(
                body[off : off + transcript_size(curve)], commitments[0]
            )
            off += transcript_size(curve)
            pk_commitment = None
        if off != len(body):
            raise ValueError("trailing bytes")
    except (ValueError, IndexError) as exc:
        raise WireError(f"bad issuance request: {exc}") from exc
    return IssuanceRequest(
        h_bar=h_bar,
        commitments=tuple(commitments),
        proof=proof,
        pk_commitment=pk_commitment,
    )


def _scalar_body(v: Scalar, params: SystemParams) -> bytes:
    return v.to_bytes(params.curve.coord_bytes)


def _body_scalar(body: bytes, params: SystemParams) -> Scalar:
    w = params.curve.coord_bytes
    if len(body) != w:
        raise WireError("scalar body has wrong length")
    try:
        return Scalar.from_bytes(body, params.curve.q)
    except ValueError as exc:
        raise WireError(str(exc)) from exc


def _point_body(body: bytes, params: SystemParams) -> Point:
    try:
        return Point.decode(body, params.curve)
    except ValueError as exc:
        raise WireError(str(exc)) from exc


# -- engines -----------------------------------------------------------------

class IssuerEngine:
    """Issuer side of one session, driven by incoming messages."""

    def __init__(self, params: SystemParams, key: IssuerKey, rng, session_id: bytes | None = None):
        self._params = params
        self._key = key
        self._rng = rng
        self.session_id = session_id or rng.getrandbits(8 * SESSION_ID_LEN).to_bytes(
            SESSION_ID_LEN, "big"
        )
        self._session: IssuerSession | None = None
        self._request: IssuanceRequest | None = None
        self.state = "new"

    def open(self) -> WireMessage:
        if self.state != "new":
            raise SessionError("engine already opened")
        self._session, r_bar = issuer_start(self._key, self._params, self._rng)
        self.state = "await_request"
        return WireMessage(MSG_ISS1, self.session_id, r_bar.encode())

    def handle(self, msg: WireMessage) -> WireMessage:
        if msg.session_id != self.session_id:
            raise WireError("message carries a different session id")
        if self.state == "await_request" and msg.msg_type == MSG_ISS2:
            request = decode_request(msg.body, self._params)
            if request.pk_commitment is not None:
                self._request = request
                c = self._session.issue_challenge(self._rng)
                self.state = "await_response"
                return WireMessage(MSG_CHAL, self.session_id, _scalar_body(c, self._params))
            s_bar = self._session.sign(
                request, context=issuance_context(self._params, self.session_id)
            )
            self.state = "done"
            return WireMessage(MSG_ISS3, self.session_id, _scalar_body(s_bar, self._params))
        if self.state == "await_response" and msg.msg_type == MSG_CHAL:
            response = _body_scalar(msg.body, self._params)
            s_bar = self._session.sign(self._request, pk_response=response)
            self.state = "done"
            return WireMessage(MSG_ISS3, self.session_id, _scalar_body(s_bar, self._params))
        raise SessionError(
            f"unexpected message type 0x{msg.msg_type:02x} in state {self.state}"
        )


class UserEngine:
    """User side of one session; .credential is set once ISS3 checks out."""

    def __init__(
        self,
        params: SystemParams,
        attrs,
        rng,
        *,
        interactive: bool = False,
        reveal_all: bool = False,
    ):
        self._params = params
        self._attrs = attrs
        self._rng = rng
        self._interactive = interactive
        self._reveal_all = reveal_all
        self._blind = None
        self.session_id = None
        self.credential = None
        self.state = "await_nonce"

    def handle(self, msg: WireMessage) -> WireMessage | None:
        if self.state == "await_nonce":
            if msg.msg_type != MSG_ISS1:
                raise SessionError(
                    f"unexpected message type 0x{msg.msg_type:02x} before the offer"
                )
            self.session_id = msg.session_id
            r_bar = _point_body(msg.body, self._params)
            self._blind, request = user_blind(
                r_bar,
                self._attrs,
                self._params,
                self._rng,
                interactive=self._interactive,
                context=issuance_context(self._params, self.session_id),
                reveal_all=self._reveal_all,
            )
            self.state = "await_challenge" if self._interactive else "await_signature"
            return WireMessage(MSG_ISS2, self.session_id, encode_request(request, self._params))
        if msg.session_id != self.session_id:
            raise WireError("message carries a different session id")
        if self.state == "await_challenge" and msg.msg_type == MSG_CHAL:
            c = _body_scalar(msg.body, self._params)
            response = user_pk_respond(self._blind, c)
            self.state = "await_signature"
            return WireMessage(MSG_CHAL, self.session_id, _scalar_body(response, self._params))
        if self.state == "await_signature" and msg.msg_type == MSG_ISS3:
            s_bar = _body_scalar(msg.body, self._params)
            self.credential = user_unblind(self._blind, s_bar, self._params)
            self.state = "done"
            return None
        raise SessionError(
            f"unexpected message type 0x{msg.msg_type:02x} in state {self.state}"
        )


# -- drivers -----------------------------------------------------------------

_STEP_NAMES = {MSG_ISS1: "ISS1", MSG_ISS2: "ISS2", MSG_ISS3: "ISS3", MSG_CHAL: "CHAL"}


def _handle_step(engine, msg):
    label = _STEP_NAMES.get(msg.msg_type, "?")
    try:
        return engine.handle(msg)
    except ProtocolError as exc:
        raise type(exc)(f"step {label}: {exc}") from exc


def run_issuance(
    params: SystemParams,
    key: IssuerKey,
    attrs,
    issuer_rng,
    user_rng,
    *,
    interactive: bool = False,
    reveal_all: bool = False,
):
    """Drive one full issuance in-process. Returns (credential, transcript).

    Aborts surface as the underlying error with the failing step named in
    the message.
    """
    issuer = IssuerEngine(params, key, issuer_rng)
    user = UserEngine(params, attrs, user_rng, interactive=interactive, reveal_all=reveal_all)
    transcript = Transcript()
    msg = issuer.open()
    transcript.record(ISSUER_TO_USER, msg)
    while True:
        reply = _handle_step(user, msg)
        if reply is None:
            break
        transcript.record(USER_TO_ISSUER, reply)
        msg = _handle_step(issuer, reply)
        transcript.record(ISSUER_TO_USER, msg)
    return user.credential, transcript


def serve_issuance(conn, params: SystemParams, key: IssuerKey, rng) -> Transcript:
    """Run the issuer side over a connected socket, one session."""
    stream = conn.makefile("rwb")
    engine = IssuerEngine(params, key, rng)
    transcript = Transcript()
    try:
        msg = engine.open()
        write_message(stream, msg)
        transcript.record(ISSUER_TO_USER, msg)
        while engine.state != "done":
            incoming = read_message(stream)
            if incoming is None:
                raise WireError("peer closed the connection mid-session")
            transcript.record(USER_TO_ISSUER, incoming)
            reply = _handle_step(engine, incoming)
            write_message(stream, reply)
            transcript.record(ISSUER_TO_USER, reply)
    finally:
        stream.close()
    return transcript


def request_issuance(
    conn,
    params: SystemParams,
    attrs,
    rng,
    *,
    interactive: bool = False,
    reveal_all: bool = False,
):
    """Run the user side over a connected socket. Returns (credential,
    transcript)."""
    stream = conn.makefile("rwb")
    engine = UserEngine(params, attrs, rng, interactive=interactive, reveal_all=reveal_all)
    transcript = Transcript()
    try:
        while engine.credential is None:
            incoming = read_message(stream)
            if incoming is None:
                raise WireError("peer closed the connection mid-session")
            transcript.record(ISSUER_TO_USER, incoming)
            reply = _handle_step(engine, incoming)
            if reply is not None:
                write_message(stream, reply)
                transcript.record(USER_TO_ISSUER, reply)
    finally:
        stream.close()
    return engine.credential, transcript


# -- recordable randomness ---------------------------------------------------

class RecordingRandom:
    """Wraps an rng and logs every value drawn, for exact replay."""

    def __init__(self, inner):
        self._inner = inner
        self.log = []

    def randrange(self, *args):
        v = self._inner.randrange(*args)
        self.log.append(v)
        return v

    def getrandbits(self, k):
        v = self._inner.getrandbits(k)
        self.log.append(v)
        return v


class ReplayRandom:
    """Feeds back a RecordingRandom log, value for value."""

    def __init__(self, log):
        self._values = deque(log)

    def _next(self):
        if not self._values:
            raise SessionError("replay log exhausted")
        return self._values.popleft()

    def randrange(self, *args):
        return self._next()

    def getrandbits(self, k):
        return self._next()
