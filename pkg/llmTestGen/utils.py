from decimal import Decimal, ROUND_HALF_UP
from fractions import Fraction
import hashlib
import json
from math import ceil
from pathlib import Path
from typing import Union

from llmTestGen.constants import CHARS_PER_TOKEN


def estimate_tokens(text_len: int) -> int:
    return ceil(text_len / CHARS_PER_TOKEN)


def round_half_up(v: Union[Fraction, int, float], digits: int=1) -> float:
    """
    Round like the tables in reports do (0.05 -> 0.1)

    :note: floats are converted through their repr so 42.15 is really 42.15
    """
    if isinstance(v, Fraction):
        d = Decimal(v.numerator) / Decimal(v.denominator)
    else:
        d = Decimal(repr(v)) if isinstance(v, float) else Decimal(v)
    q = Decimal(1).scaleb(-digits)
    return float(d.quantize(q, rounding=ROUND_HALF_UP))


def canonical_json(obj) -> str:
    """
    Serialization with fixed key order and separators, used for hashing
    and for files which have to be byte-identical between runs
    """
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def hash_tree(root: Path) -> str:
    """
    Digest of all file paths and contents under the root directory
    """
    h = hashlib.sha256()
    for p in sorted(root.rglob("*"), key=lambda p: p.relative_to(root).as_posix()):
        if p.is_file():
            h.update(p.relative_to(root).as_posix().encode("utf-8"))
            h.update(b"\0")
            h.update(p.read_bytes())
            h.update(b"\0")
    return h.hexdigest()
