"""Cloud-free delivery for networks whose combined caches hold the library.

When mu_r + mu_t >= 1 the EN-resident prefix of each file can be sized so
that, together with a suffix cached whole at every UE, no cloud transfer is
needed at delivery time: the prefix is subfiled over t_R-subsets of UEs and
shipped purely by EN beamforming, reusing the one-shot/chunked scheduling
machinery. The fronthaul component of the delivery time is identically zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .channel import ChannelMatrix
from .errors import (
    IndivisibleFileSize,
    NonIntegralCacheParameter,
    OutOfRange,
    ReconstructionMismatch,
    RegionViolation,
)
from .mdscode import Library
from .ndt import NdtValue, as_fraction
from .soft_transfer import (
    PART_LOCAL,
    DeliveryStep,
    SoftPlacement,
    _assemble,
    collect_deliveries,
    soft_schedule,
)
from .topology import NetworkTopology
from .verdict import RecoveryVerdict


@dataclass(frozen=True)
class ZfParams:
    """Derived sizing of the cloud-free split."""

    t_r: int
    w1_bits: int  # EN-resident prefix of every file
    w2_bits: int  # suffix cached whole at every UE


def _zf_t_r(h: int, r: int, mu_r: Fraction, mu_t: Fraction) -> Fraction:
    """(mu_r + mu_t - 1) * K / mu_t, with the mu_t = 0 limit by continuity."""
    if not 0 <= mu_r <= 1 or not 0 <= mu_t <= 1:
        raise OutOfRange(f"cache fractions must lie in [0,1]: mu_r={mu_r}, mu_t={mu_t}")
    if mu_r + mu_t < 1:
        raise RegionViolation(
            f"cloud-free delivery needs mu_r + mu_t >= 1, got {mu_r} + {mu_t}"
        )
    k = comb(h, r)
    if mu_t == 0:
        return Fraction(k)  # region forces mu_r = 1: everything fits at the UEs
    return (mu_r + mu_t - 1) * k / mu_t


@dataclass(frozen=True)
class ZfPlacement:
    """Frozen outcome of the split placement: prefix subfiled, suffix whole."""

    library: Library
    topology: NetworkTopology
    params: ZfParams
    mu_r: Fraction
    mu_t: Fraction
    view: SoftPlacement  # the prefix as a pure-EN-part subset placement

    @property
    def t_r(self) -> int:
        return self.params.t_r

    def w2_payload(self, file: int) -> bytes:
        return self.library.file(file)[self.params.w1_bits // 8 :]

    def ue_cache_bits(self) -> int:
        n = self.library.n_files
        return self.view.ue_cache_bits() + n * self.params.w2_bits

    def en_cache_bits(self) -> int:
        return self.library.n_files * self.params.w1_bits


def minimal_zf_file_bits(h: int, r: int, mu_r, mu_t) -> int:
    """Smallest file size (bits) giving whole-byte prefix subfiles/chunks."""
    from math import gcd, lcm

    mu_r, mu_t = as_fraction(mu_r), as_fraction(mu_t)
    t_r_frac = _zf_t_r(h, r, mu_r, mu_t)
    if t_r_frac.denominator != 1:
        raise NonIntegralCacheParameter(f"t_R = {t_r_frac} is not an integer")
    t_r = int(t_r_frac)
    k = comb(h, r)
    chunks = comb(k - t_r - 1, h - 1) if t_r < k - h else 1
    unit = 8 * comb(k, t_r) * chunks
    need = 8
    for frac, scale in ((mu_t, unit), (1 - mu_t, 8)):
        if frac == 0:
            continue
        need = lcm(need, scale * frac.denominator // gcd(frac.numerator, scale * frac.denominator))
    return need


def zf_place(lib: Library, t: NetworkTopology, mu_r, mu_t) -> ZfPlacement:
    """Split every file so delivery never touches the cloud.

    The first mu_t*F bits of each file go to every EN and are subfiled over
    t_R-subsets at the UEs; the remaining (1-mu_t)*F bits are cached whole
    at every UE. UE cache totals come out to mu_r*N*F bits exactly.

    Raises
    ------
    RegionViolation
        If mu_r + mu_t < 1.
    NonIntegralCacheParameter
        If t_R = (mu_r+mu_t-1)K/mu_t is not an integer.
    IndivisibleFileSize
        If the prefix does not split into whole-byte subfiles (and chunks).
    """
    mu_r, mu_t = as_fraction(mu_r), as_fraction(mu_t)
    t_r_frac = _zf_t_r(t.h, t.r, mu_r, mu_t)
    if t_r_frac.denominator != 1:
        raise NonIntegralCacheParameter(
            f"t_R = {t_r_frac} is not an integer; use memory sharing for such points"
        )
    t_r = int(t_r_frac)
    k, h = t.k, t.h

    f_bits = lib.file_size_bits
    w1 = mu_t * f_bits
    if w1.denominator != 1 or int(w1) % 8:
        raise IndivisibleFileSize(f"mu_t*F = {w1} is not a whole number of bytes")
    w1 = int(w1)

    n_subfiles = comb(k, t_r)
    chunk_count = comb(k - t_r - 1, h - 1) if t_r < k - h else 1
    subfile_bits = {}
    if w1:
        if w1 % n_subfiles:
            raise IndivisibleFileSize(
                f"prefix of {w1} bits does not split into {n_subfiles} subfiles"
            )
        sub = w1 // n_subfiles
        if sub % (8 * chunk_count):
            raise IndivisibleFileSize(
                f"subfile of {sub} bits does not split into {chunk_count} whole-byte chunks"
            )
        subfile_bits[PART_LOCAL] = sub

    view = SoftPlacement(
        library=lib,
        topology=t,
        t_u=t_r,
        mu_r=Fraction(t_r, k),
        mu_t=Fraction(1),
        part_bits={PART_LOCAL: w1} if w1 else {},
        subfile_bits=subfile_bits,
        chunk_count=chunk_count,
    )
    placement = ZfPlacement(
        library=lib,
        topology=t,
        params=ZfParams(t_r=t_r, w1_bits=w1, w2_bits=f_bits - w1),
        mu_r=mu_r,
        mu_t=mu_t,
        view=view,
    )
    assert placement.ue_cache_bits() == mu_r * lib.n_files * f_bits
    assert placement.en_cache_bits() == mu_t * lib.n_files * f_bits
    return placement


def zf_deliver(
    demand,
    placement: ZfPlacement,
    t: NetworkTopology,
    ch: ChannelMatrix | None,
) -> tuple[list[DeliveryStep], list[RecoveryVerdict]]:
    """Schedule and verify the EN-only delivery of the prefix subfiles.

    Mechanically identical to the cloud-assisted scheduler/simulator run on
    the prefix placement; every UE finishes by concatenating the delivered
    and cached prefix subfiles with its whole-suffix cache copy. No
    fronthaul messages exist anywhere on this path.
    """
    view = placement.view
    schedule = soft_schedule(demand, view, t)
    got = collect_deliveries(schedule, ch, view)
    verdicts = []
    for ue in range(1, t.k + 1):
        want = demand[ue - 1]
        prefix = _assemble(ue, want, view, got[ue]) if placement.params.w1_bits else b""
        full = prefix + placement.w2_payload(want)
        if full != placement.library.file(want):
            raise ReconstructionMismatch(f"UE {ue} rebuilt file {want} incorrectly")
        verdicts.append(
            RecoveryVerdict(ue=ue, file_id=want, ok=True, note=f"{len(got[ue])} deliveries")
        )
    return schedule, verdicts


def zf_ndt(h: int, r: int, mu_r, mu_t) -> NdtValue:
    """Closed-form delivery time: mu_t*(K - t_R)/min(H + t_R, K), no fronthaul."""
    mu_r, mu_t = as_fraction(mu_r), as_fraction(mu_t)
    t_r_frac = _zf_t_r(h, r, mu_r, mu_t)
    if t_r_frac.denominator != 1:
        raise NonIntegralCacheParameter(f"t_R = {t_r_frac} is not an integer")
    t_r = int(t_r_frac)
    k = comb(h, r)
    edge = mu_t * Fraction(k - t_r, min(h + t_r, k))
    branch = "degenerate" if mu_t == 0 else ("one-shot" if t_r >= k - h else "chunked")
    return NdtValue(total=edge, fronthaul=Fraction(0), edge=edge, scheme="zf", branch=branch)


def zf_structural_ndt(schedule: list[DeliveryStep], placement: ZfPlacement) -> NdtValue:
    """Delivery time re-derived from the scheduled bits; fronthaul must be 0."""
    from .soft_transfer import soft_structural_ndt

    inner = soft_structural_ndt(schedule, placement.view, rho=None)
    assert inner.fronthaul == 0
    return NdtValue(
        total=inner.edge,
        fronthaul=Fraction(0),
        edge=inner.edge,
        scheme="zf",
        branch="structural",
    )
