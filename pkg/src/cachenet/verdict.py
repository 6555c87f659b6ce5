"""Per-receiver recovery verdicts returned by the delivery verifiers."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class RecoveryVerdict:
    """Outcome of one UE's end-to-end reconstruction attempt."""

    ue: int
    file_id: int
    ok: bool
    note: str = ""
