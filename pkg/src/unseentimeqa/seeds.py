"""Deterministic seed derivation.

All randomness in the package flows from a single master seed through
:func:`derive_seed`, which hashes a label path with SHA-256.  Python's
built-in ``hash`` is never used for this purpose because it is salted per
process (``PYTHONHASHSEED``) and would break run-to-run determinism.
"""

from __future__ import annotations

import hashlib
import random


def derive_seed(*parts: object) -> int:
    """Derive a 64-bit seed from an arbitrary label path.

    Parts are joined by an unprintable separator so ``("a", "bc")`` and
    ``("ab", "c")`` derive different seeds.
    """
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def rng_for(*parts: object) -> random.Random:
    """A fresh :class:`random.Random` seeded from the label path."""
    return random.Random(derive_seed(*parts))
