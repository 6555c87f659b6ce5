"""Tests for the cloud-assisted zero-forcing scheme with subset placement."""

from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import cachenet as cn
from cachenet.errors import (
    IndivisibleFileSize,
    NonDistinctDemand,
    NonIntegralCacheParameter,
    OutOfRange,
)
from cachenet.soft_transfer import CASE_CHUNKED, CASE_ONE_SHOT

from oracles import FROZEN


def make_soft(h, r, mu_r, mu_t, seed=5):
    t = cn.build_topology(h, r)
    f_bits = cn.minimal_soft_file_bits(h, r, mu_r, mu_t)
    lib = cn.random_library(t.k, f_bits, seed=seed)
    pl = cn.soft_place(lib, t, mu_r, mu_t)
    demand = list(range(1, t.k + 1))
    schedule = cn.soft_schedule(demand, pl, t)
    return t, lib, pl, demand, schedule


# ---------------------------------------------------------------------------
# placement
# ---------------------------------------------------------------------------


def test_minimal_soft_file_bits():
    assert cn.minimal_soft_file_bits(4, 2, Fraction(1, 3), 0) == 120
    assert cn.minimal_soft_file_bits(4, 2, Fraction(1, 3), Fraction(1, 2)) == 240
    # chunked regime folds the chunk count into the divisibility unit
    assert cn.minimal_soft_file_bits(4, 2, Fraction(1, 6), 0) == 8 * 6 * comb(4, 3)


def test_place_six_ue_network():
    t, lib, pl, demand, schedule = make_soft(4, 2, Fraction(1, 3), 0)
    assert (pl.t_u, pl.case, pl.chunk_count) == (2, CASE_ONE_SHOT, 1)
    assert pl.parts == ("cloud",)
    assert pl.n_subfiles == comb(6, 2)
    assert pl.subfile_bits == {"cloud": 8}


@pytest.mark.parametrize("mu_t", [0, Fraction(1, 2), 1])
def test_cache_budgets_are_exact(mu_t):
    t, lib, pl, *_ = make_soft(4, 2, Fraction(1, 3), mu_t)
    f = lib.file_size_bits
    assert pl.ue_cache_bits() == Fraction(1, 3) * lib.n_files * f
    assert pl.en_cache_bits() == Fraction(mu_t) * lib.n_files * f


def test_subfile_payloads_tile_the_file():
    t, lib, pl, *_ = make_soft(4, 2, Fraction(1, 3), Fraction(1, 2))
    for n in (1, 4):
        whole = b"".join(
            pl.subfile_payload(cn.SoftSubfileLabel(n, s, part))
            for part in pl.parts
            for s in __import__("itertools").combinations(range(1, 7), 2)
        )
        assert whole == lib.file(n)


def test_place_rejects_bad_parameters():
    t = cn.build_topology(4, 2)
    lib = cn.random_library(t.k, 120, seed=0)
    with pytest.raises(OutOfRange):
        cn.soft_place(lib, t, Fraction(7, 6), 0)
    with pytest.raises(NonIntegralCacheParameter):
        cn.soft_place(lib, t, Fraction(1, 4), 0)
    odd = cn.random_library(t.k, 88, seed=0)  # 88 not divisible by 15 subfiles
    with pytest.raises(IndivisibleFileSize):
        cn.soft_place(odd, t, Fraction(1, 3), 0)


# ---------------------------------------------------------------------------
# missing sets
# ---------------------------------------------------------------------------


def test_missing_counts():
    t, lib, pl, demand, schedule = make_soft(4, 2, Fraction(1, 3), 0)
    missing = cn.soft_missing(demand, pl)
    assert all(len(v) == comb(5, 2) for v in missing.values())
    assert all(lab.file == demand[ue - 1] for ue, v in missing.items() for lab in v)
    # a (4,3) network with half caching: each UE misses 3 subfiles
    t2, lib2, pl2, demand2, _ = make_soft(4, 3, Fraction(1, 2), 0)
    missing2 = cn.soft_missing(demand2, pl2)
    assert all(len(v) == FROZEN["missing_per_ue_k4_t2"] for v in missing2.values())


def test_missing_warns_on_repeated_demand():
    t, lib, pl, *_ = make_soft(4, 2, Fraction(1, 3), 0)
    with pytest.warns(NonDistinctDemand):
        cn.soft_missing([1] * 6, pl)


# ---------------------------------------------------------------------------
# scheduling: fully provisioned (one-shot) regime
# ---------------------------------------------------------------------------


def test_one_shot_schedule_shape():
    t, lib, pl, demand, schedule = make_soft(4, 2, Fraction(1, 3), 0)
    assert len(schedule) == comb(5, 2) == 10
    for step in schedule:
        assert step.case == CASE_ONE_SHOT
        assert len(step.entries) == t.k  # every UE served every step
        assert step.pi_prime == ()
        for ue, lab in step.entries:
            assert ue not in lab.subset
            assert set(lab.pi) == set(range(1, 7)) - {ue} - set(lab.subset)
    # first step pairs UE 1 with its lexicographically first missing subset,
    # last step closes with UE 6 and its last one
    first = dict(schedule[0].entries)
    last = dict(schedule[-1].entries)
    assert first[1] == cn.SoftSubfileLabel(1, (2, 3), "cloud", pi=(4, 5, 6), pi_prime=())
    assert last[6] == cn.SoftSubfileLabel(6, (4, 5), "cloud", pi=(1, 2, 3), pi_prime=())


def test_one_shot_delivers_each_missing_subfile_once():
    t, lib, pl, demand, schedule = make_soft(4, 2, Fraction(1, 3), 0)
    missing = cn.soft_missing(demand, pl)
    seen = {ue: [] for ue in range(1, 7)}
    for step in schedule:
        for ue, lab in step.entries:
            seen[ue].append(lab.base())
    for ue in range(1, 7):
        assert sorted(seen[ue], key=repr) == sorted(missing[ue], key=repr)


def test_one_shot_boundary_uses_full_spatial_room():
    # t_U = K - H exactly: still one-shot, steps of K entries
    t, lib, pl, demand, schedule = make_soft(4, 2, Fraction(1, 3), 0)
    assert pl.t_u == t.k - t.h
    assert all(len(s.entries) == t.k for s in schedule)


# ---------------------------------------------------------------------------
# scheduling: under-provisioned (chunked) regime
# ---------------------------------------------------------------------------


def test_chunked_step_count_closed_forms():
    assert cn.chunked_step_count(3, 6, 1) == FROZEN["chunked_steps_3_6_1"]
    assert cn.chunked_step_count(4, 6, 0) == FROZEN["chunked_steps_4_6_0"]


def test_chunked_geometry_3_6_1():
    geometry = cn.chunked_step_geometry(3, 6, 1)
    assert len(geometry) == 45
    per_subfile = {}
    for pi_prime, triples in geometry:
        assert len(pi_prime) == 6 - 1 - 3
        assert len(triples) == 3 + 1  # H + t_U chunks per step
        for ue, t_set, pi in triples:
            assert len(pi) == 2  # H - 1 forced nulls
            parts = (ue,) + t_set + pi + pi_prime
            assert sorted(parts) == [1, 2, 3, 4, 5, 6]  # disjoint, exhaustive
            per_subfile[(ue, t_set)] = per_subfile.get((ue, t_set), 0) + 1
    # every (destination, subset) splits into C(K-t_U-1, H-1) = C(4,2) chunks
    assert set(per_subfile.values()) == {comb(4, 2)}


@given(
    st.sampled_from([(3, 6, 1), (4, 6, 0), (4, 6, 1), (3, 6, 2), (5, 10, 1)]),
    st.data(),
)
@settings(max_examples=20, deadline=None)
def test_chunked_geometry_invariants(cfg, data):
    h, k, t_u = cfg
    geometry = cn.chunked_step_geometry(h, k, t_u)
    step = data.draw(st.sampled_from(geometry))
    pi_prime, triples = step
    assert len(triples) == h + t_u
    served = [ue for ue, _, _ in triples]
    assert sorted(served) == sorted(set(range(1, k + 1)) - set(pi_prime))
    for ue, t_set, pi in triples:
        assert len(t_set) == t_u and len(pi) == h - 1
        assert sorted((ue,) + t_set + pi + pi_prime) == list(range(1, k + 1))


def test_chunked_schedule_end_to_end():
    t, lib, pl, demand, schedule = make_soft(4, 2, Fraction(1, 6), 0)
    assert pl.case == CASE_CHUNKED
    assert pl.chunk_count == comb(4, 3)
    assert len(schedule) == cn.chunked_step_count(4, 6, 1) == 24
    for step in schedule:
        assert len(step.entries) == t.h + pl.t_u
        assert set(ue for ue, _ in step.entries).isdisjoint(step.pi_prime)
    verdicts = cn.soft_simulate(schedule, None, pl, demand)
    assert all(v.ok for v in verdicts)


def test_chunk_payloads_tile_each_subfile():
    t, lib, pl, demand, schedule = make_soft(4, 2, Fraction(1, 6), 0)
    base = cn.SoftSubfileLabel(3, (5,), "cloud")
    chunks = sorted(
        {lab for step in schedule for ue, lab in step.entries if lab.base() == base},
        key=lambda l: l.pi,
    )
    assert len(chunks) == pl.chunk_count
    joined = b"".join(pl.chunk_payload(c) for c in chunks)
    assert joined == pl.subfile_payload(base)


# ---------------------------------------------------------------------------
# tiny networks where the regimes degenerate
# ---------------------------------------------------------------------------


def test_two_en_network_full_cache_cancelation():
    # t_U = 1 = K - 1: the single step needs no nulling at all
    t, lib, pl, demand, schedule = make_soft(2, 1, Fraction(1, 2), 0)
    assert len(schedule) == 1
    assert all(lab.pi == () for _, lab in schedule[0].entries)
    ch = cn.draw_channel(t, 0)
    assert all(v.ok for v in cn.soft_simulate(schedule, ch, pl, demand))


def test_two_en_network_pure_zero_forcing():
    # t_U = 0: each UE's subfile is nulled at the other UE
    t, lib, pl, demand, schedule = make_soft(2, 1, 0, 0)
    assert len(schedule) == 1
    assert dict(schedule[0].entries)[1].pi == (2,)
    assert dict(schedule[0].entries)[2].pi == (1,)
    ch = cn.draw_channel(t, 0)
    assert all(v.ok for v in cn.soft_simulate(schedule, ch, pl, demand))


# ---------------------------------------------------------------------------
# numeric delivery
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("seed", range(5))
def test_one_shot_simulation_with_channel(seed):
    t, lib, pl, demand, schedule = make_soft(4, 2, Fraction(1, 3), 0, seed=seed)
    ch = cn.draw_channel(t, seed)
    verdicts = cn.soft_simulate(schedule, ch, pl, demand)
    assert [v.ue for v in verdicts] == list(range(1, 7))
    assert all(v.ok for v in verdicts)


def test_split_parts_simulation():
    t, lib, pl, demand, schedule = make_soft(4, 2, Fraction(1, 3), Fraction(1, 2))
    assert pl.parts == ("local", "cloud")
    assert len(schedule) == 2 * 10  # each part swept separately
    assert all(v.ok for v in cn.soft_simulate(schedule, cn.draw_channel(t, 1), pl, demand))


def test_full_en_cache_skips_fronthaul():
    t, lib, pl, demand, schedule = make_soft(4, 2, Fraction(1, 3), 1)
    assert pl.parts == ("local",)
    assert cn.soft_fronthaul_bits_per_en(pl) == 0
    assert all(v.ok for v in cn.soft_simulate(schedule, None, pl, demand))


# ---------------------------------------------------------------------------
# delivery-time values
# ---------------------------------------------------------------------------


def test_ndt_closed_form_values():
    v = cn.soft_ndt(4, 2, Fraction(1, 3), 0, 1)
    assert (v.total, v.edge, v.fronthaul) == (Fraction(5, 3), Fraction(2, 3), 1)
    assert cn.soft_ndt(4, 2, Fraction(1, 3), 0, 4).edge == Fraction(2, 3)
    assert cn.soft_ndt(5, 2, Fraction(1, 2), 0, 1).total == FROZEN["soft_total_5_2_half"]
    assert cn.soft_ndt(4, 2, 1, 0).total == 0  # everything cached
    assert cn.soft_ndt(4, 2, Fraction(1, 3), 1).fronthaul == 0  # mu_t = 1


def test_ndt_branch_tags():
    assert cn.soft_ndt(4, 2, Fraction(1, 3), 0, 1).branch == CASE_ONE_SHOT
    assert cn.soft_ndt(4, 2, Fraction(1, 6), 0, 1).branch == CASE_CHUNKED
    assert cn.soft_ndt(4, 2, 1, 0).branch == "empty"


def test_ndt_errors():
    with pytest.raises(NonIntegralCacheParameter):
        cn.soft_ndt(4, 2, Fraction(1, 4), 0, 1)
    with pytest.raises(OutOfRange):
        cn.soft_ndt(4, 2, Fraction(1, 3), 0)  # rho required
    with pytest.raises(OutOfRange):
        cn.soft_ndt(4, 2, Fraction(1, 3), 0, -1)


def test_fronthaul_bits_per_en():
    t, lib, pl, *_ = make_soft(4, 2, Fraction(1, 3), 0)
    f = lib.file_size_bits
    assert cn.soft_fronthaul_bits_per_en(pl) == Fraction((6 - 2) * f, 4)
    t2, lib2, pl2, *_ = make_soft(4, 2, Fraction(1, 3), Fraction(1, 2))
    assert cn.soft_fronthaul_bits_per_en(pl2) == Fraction(1, 2) * Fraction((6 - 2) * lib2.file_size_bits, 4)


@pytest.mark.parametrize("mu_r,mu_t", [
    (Fraction(1, 3), Fraction(0)),
    (Fraction(1, 3), Fraction(1, 2)),
    (Fraction(1, 6), Fraction(0)),
    (Fraction(1, 2), Fraction(0)),
    (Fraction(0), Fraction(0)),
])
def test_structural_ndt_matches_closed_form(mu_r, mu_t):
    t, lib, pl, demand, schedule = make_soft(4, 2, mu_r, mu_t)
    rho = Fraction(7, 3)
    structural = cn.soft_structural_ndt(schedule, pl, rho=rho)
    closed = cn.soft_ndt(4, 2, mu_r, mu_t, rho)
    assert structural.total == closed.total
    assert structural.fronthaul == closed.fronthaul
    assert structural.edge == closed.edge


def test_chunked_simulation_with_channel():
    t, lib, pl, demand, schedule = make_soft(4, 2, Fraction(1, 6), 0)
    ch = cn.draw_channel(t, 3)
    verdicts = cn.soft_simulate(schedule, ch, pl, demand)
    assert all(v.ok for v in verdicts)
