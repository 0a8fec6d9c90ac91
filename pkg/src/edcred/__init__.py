"""Attribute credentials with blind issuance on complete Edwards curves.

The issuer signs a product of attribute hashes without seeing the blinded
half of the signature, holders re-randomize what they show, and selective
disclosure proves the hidden attributes still live inside the signed
product. Everything runs over a twisted Edwards curve whose addition law
has no special cases, so the group code is total functions on points.

Typical round trip:

    from edcred import setup, run_issuance, signature_of, check_equation
    params, key = setup("toy")
    cred, _ = run_issuance(params, key, attrs, issuer_rng, user_rng)
    assert check_equation(signature_of(cred), params)
"""

from .curve import (
    CurveParams,
    OpCounter,
    Point,
    Scalar,
    curve_by_name,
    production_curve,
    toy_curve,
)
from .credential import (
    PresentationToken,
    check_equation,
    make_presentation,
    randomize,
    signature_of,
    verify_presentation,
    verify_signature,
)
from .disclosure import DisclosureToken, present, verify_disclosure
from .errors import (
    InvalidProofError,
    IssuerMisbehavior,
    ProtocolError,
    RngError,
    SessionError,
    WireError,
)
from .harness import blindness_crosscheck, opcount_bench, render_table, simulate_issue
from .hashing import attr_to_scalar, hash_block, hash_points
from .issuance import (
    Credential,
    issuer_start,
    user_blind,
    user_unblind,
)
from .params import IssuerKey, SystemParams, setup, validate_params
from .protocol import IssuerEngine, UserEngine, request_issuance, run_issuance, serve_issuance
from .schnorr import fs_prove, fs_verify, pk_commit, pk_respond, pk_verify
from .wire import Transcript, WireMessage, decode_message, encode_message

__version__ = "0.1.0"

__all__ = [
    "CurveParams",
    "Credential",
    "DisclosureToken",
    "InvalidProofError",
    "IssuerEngine",
    "IssuerKey",
    "IssuerMisbehavior",
    "OpCounter",
    "Point",
    "PresentationToken",
    "ProtocolError",
    "RngError",
    "Scalar",
    "SessionError",
    "SystemParams",
    "Transcript",
    "UserEngine",
    "WireError",
    "WireMessage",
    "attr_to_scalar",
    "blindness_crosscheck",
    "check_equation",
    "curve_by_name",
    "decode_message",
    "encode_message",
    "fs_prove",
    "fs_verify",
    "hash_block",
    "hash_points",
    "issuer_start",
    "make_presentation",
    "opcount_bench",
    "pk_commit",
    "pk_respond",
    "pk_verify",
    "present",
    "production_curve",
    "randomize",
    "render_table",
    "request_issuance",
    "run_issuance",
    "serve_issuance",
    "setup",
    "signature_of",
    "simulate_issue",
    "toy_curve",
    "user_blind",
    "user_unblind",
    "validate_params",
    "verify_disclosure",
    "verify_presentation",
    "verify_signature",
]
