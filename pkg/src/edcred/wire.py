"""Framing for protocol messages and recorded transcripts.

Every message is  version(1) | type(1) | session_id(16) | body_len(4 BE) | body.
Decoding is strict: unknown version or type, short input and trailing bytes
are all WireError. The CHAL type is used in both directions, carrying the
issuer's challenge one way and the prover's response back; the recorded
direction keeps the two apart.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import WireError

WIRE_VERSION = 1

MSG_ISS1 = 0x01
MSG_ISS2 = 0x02
MSG_ISS3 = 0x03
MSG_CHAL = 0x04
MSG_PRESENT = 0x10
MSG_DISCLOSE = 0x11

_KNOWN_TYPES = {MSG_ISS1, MSG_ISS2, MSG_ISS3, MSG_CHAL, MSG_PRESENT, MSG_DISCLOSE}

SESSION_ID_LEN = 16
_HEADER_LEN = 1 + 1 + SESSION_ID_LEN + 4
_MAX_BODY = 1 << 20

ISSUER_TO_USER = 0
USER_TO_ISSUER = 1


@dataclass(frozen=True)
class WireMessage:
    msg_type: int
    session_id: bytes
    body: bytes

    def __post_init__(self):
        if self.msg_type not in _KNOWN_TYPES:
            raise WireError(f"unknown message type 0x{self.msg_type:02x}")
        if len(self.session_id) != SESSION_ID_LEN:
            raise WireError("session id must be 16 bytes")
        if len(self.body) > _MAX_BODY:
            raise WireError("body too large")


def encode_message(msg: WireMessage) -> bytes:
    return (
        bytes((WIRE_VERSION, msg.msg_type))
        + msg.session_id
        + len(msg.body).to_bytes(4, "big")
        + msg.body
    )


def decode_message(data: bytes) -> WireMessage:
    if len(data) < _HEADER_LEN:
        raise WireError("truncated header")
    if data[0] != WIRE_VERSION:
        raise WireError(f"unknown wire version {data[0]}")
    body_len = int.from_bytes(data[18:22], "big")
    if body_len > _MAX_BODY:
        raise WireError("declared body too large")
    if len(data) != _HEADER_LEN + body_len:
        raise WireError("length field does not match data")
    return WireMessage(msg_type=data[1], session_id=data[2:18], body=data[22:])


def write_message(stream, msg: WireMessage) -> None:
    stream.write(encode_message(msg))
    stream.flush()


def read_message(stream) -> WireMessage | None:
    """Read one framed message from a blocking binary stream.

    Returns None on clean EOF before any byte; raises WireError on a
    partial frame.
    """
    header = stream.read(_HEADER_LEN)
    if not header:
        return None
    if len(header) < _HEADER_LEN:
        raise WireError("connection closed mid-header")
    body_len = int.from_bytes(header[18:22], "big")
    if body_len > _MAX_BODY:
        raise WireError("declared body too large")
    body = stream.read(body_len) if body_len else b""
    if len(body) < body_len:
        raise WireError("connection closed mid-body")
    return decode_message(header + body)


@dataclass(frozen=True)
class TranscriptEntry:
    direction: int  # ISSUER_TO_USER or USER_TO_ISSUER
    message: WireMessage


@dataclass
class Transcript:
    """Ordered record of one protocol run, replayable byte for byte."""

    entries: list = field(default_factory=list)

    def record(self, direction: int, message: WireMessage) -> None:
        if direction not in (ISSUER_TO_USER, USER_TO_ISSUER):
            raise ValueError("bad direction")
        self.entries.append(TranscriptEntry(direction, message))

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def messages(self, direction: int) -> list:
        return [e.message for e in self.entries if e.direction == direction]

    def to_bytes(self) -> bytes:
        out = []
        for e in self.entries:
            encoded = encode_message(e.message)
            out.append(bytes((e.direction,)) + len(encoded).to_bytes(4, "big") + encoded)
        return b"".join(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> "Transcript":
        t = cls()
        off = 0
        while off < len(data):
            if off + 5 > len(data):
                raise WireError("truncated transcript entry")
            direction = data[off]
            size = int.from_bytes(data[off + 1 : off + 5], "big")
            off += 5
            if off + size > len(data):
                raise WireError("truncated transcript message")
            t.record(direction, decode_message(data[off : off + size]))
            off += size
        return t
