import random

import pytest

from nbhd.core import (
    CapExceededError,
    Family,
    FrameMorphism,
    InvalidInputError,
    NeighborhoodAlgebra,
    NeighborhoodFrame,
    Relation,
    algebra_from_json,
    algebra_to_json,
    box_n,
    complement_frame,
    effective_cap,
    family_from_famask,
    frame_from_json,
    frame_to_json,
    from_relation,
    full_mask,
    hom_from_json,
    hom_to_json,
    is_nbhd_morphism,
    morphism_from_json,
    morphism_to_json,
    relation_from_json,
    relation_to_json,
    to_relation,
    up_cone,
)
from nbhd.core import CompleteHom

from oracles import kripke_box, mask_to_set


def all_frames(n):
    total = 1 << (1 << n)
    for key in range(total**n):
        famasks = []
        rest = key
        for _ in range(n):
            famasks.append(rest % total)
            rest //= total
        yield NeighborhoodFrame(n, tuple(family_from_famask(fm) for fm in famasks))


def test_family_is_ordered_and_round_trips():
    fam = Family.of([3, 0, 2, 0])
    assert fam.members == (0, 2, 3)
    assert fam.famask() == 0b1101
    assert family_from_famask(fam.famask()) == fam
    assert 2 in fam and 1 not in fam
    for famask in range(256):
        assert family_from_famask(famask).famask() == famask


def test_family_rejects_disorder_and_negatives():
    with pytest.raises(InvalidInputError):
        Family((2, 1))
    with pytest.raises(InvalidInputError):
        Family((1, 1))
    with pytest.raises(InvalidInputError):
        Family((-1,))


def test_frame_and_algebra_validation():
    with pytest.raises(InvalidInputError):
        NeighborhoodFrame(1, ())
    with pytest.raises(InvalidInputError):
        NeighborhoodFrame(1, (Family((2,)),))
    with pytest.raises(InvalidInputError):
        NeighborhoodAlgebra(1, (0,))
    with pytest.raises(InvalidInputError):
        NeighborhoodAlgebra(1, (0, 4))
    with pytest.raises(InvalidInputError):
        Relation(2, (4, 0))
    with pytest.raises(InvalidInputError):
        FrameMorphism(2, 1, (0, 1))
    with pytest.raises(InvalidInputError):
        CompleteHom(1, 2, (0, 1))


def test_up_cone_examples():
    assert up_cone(2, 2).members == (2, 3)
    assert up_cone(0, 2).members == (0, 1, 2, 3)
    assert up_cone(3, 2).members == (3,)
    assert up_cone(0, 0).members == (0,)


def test_box_n_and_complement():
    frame = NeighborhoodFrame(2, (Family((1, 3)), Family((0,))))
    assert box_n(frame, 1) == 1
    assert box_n(frame, 0) == 2
    assert box_n(frame, 3) == 1
    comp = complement_frame(frame)
    assert comp.nbhd[0].members == (0, 2)
    assert complement_frame(comp) == frame


def test_kripke_bridge_examples():
    rel = Relation(2, (3, 0))
    frame = from_relation(rel)
    assert frame.nbhd[0].members == (3,)
    assert frame.nbhd[1].members == (0, 1, 2, 3)
    assert to_relation(frame) == rel
    empty = NeighborhoodFrame(1, (Family(()),))
    assert to_relation(empty).succ == (1,)


def test_kripke_round_trip_exhaustive():
    for n in (0, 1, 2, 3):
        m = 1 << n
        for key in range(m**n):
            succ = []
            rest = key
            for _ in range(n):
                succ.append(rest % m)
                rest //= m
            rel = Relation(n, tuple(succ))
            assert to_relation(from_relation(rel)) == rel


def test_from_relation_box_matches_direct_oracle():
    for n in (1, 2):
        m = 1 << n
        for key in range(m**n):
            succ = tuple((key // m**x) % m for x in range(n))
            frame = from_relation(Relation(n, succ))
            succ_sets = [mask_to_set(s) for s in succ]
            for a in range(m):
                want = 0
                for x in kripke_box(succ_sets, mask_to_set(a), n):
                    want |= 1 << x
                assert box_n(frame, a) == want


def test_morphism_preimage_image():
    f = FrameMorphism(3, 2, (0, 0, 1))
    assert f.preimage(0b01) == 0b011
    assert f.preimage(0b10) == 0b100
    assert f.image(0b011) == 0b01
    assert f.image(0b110) == 0b11


def test_is_nbhd_morphism_biconditional():
    dom = NeighborhoodFrame(2, (Family((1, 3)), Family((1, 3))))
    cod = NeighborhoodFrame(1, (Family((1,)),))
    f = FrameMorphism(2, 1, (0, 0))
    # preimage of {0} is {0,1}=3, in both N(x); preimage of {} is {}, absent.
    assert is_nbhd_morphism(f, dom, cod)
    bad_dom = NeighborhoodFrame(2, (Family((1,)), Family((1, 3))))
    assert not is_nbhd_morphism(f, bad_dom, cod)
    with pytest.raises(InvalidInputError):
        is_nbhd_morphism(f, dom, NeighborhoodFrame(2, (Family(()), Family(()))))


def test_identity_and_constant_morphisms_exhaustive_n2():
    ident = FrameMorphism(2, 2, (0, 1))
    for frame in all_frames(2):
        assert is_nbhd_morphism(ident, frame, frame)


def test_json_round_trips():
    frame = NeighborhoodFrame(2, (Family((1, 3)), Family((0,))))
    assert frame_from_json(frame_to_json(frame)) == frame
    assert frame_to_json(frame) == {"n": 2, "N": [[1, 3], [0]]}
    alg = NeighborhoodAlgebra(2, (2, 1, 0, 1))
    assert algebra_from_json(algebra_to_json(alg)) == alg
    assert algebra_to_json(alg) == {"n": 2, "box": [2, 1, 0, 1]}
    rel = Relation(2, (3, 0))
    assert relation_from_json(relation_to_json(rel)) == rel
    assert relation_to_json(rel) == {"n": 2, "R": [3, 0]}
    f = FrameMorphism(2, 1, (0, 0))
    assert morphism_from_json(morphism_to_json(f)) == f
    assert morphism_to_json(f) == {"n_dom": 2, "n_cod": 1, "map": [0, 0]}
    h = CompleteHom(1, 2, (0, 0))
    assert hom_from_json(hom_to_json(h)) == h
    assert hom_to_json(h) == {"n_dom": 1, "n_cod": 2, "atom_map": [0, 0]}


def test_json_rejects_bad_shapes():
    with pytest.raises(InvalidInputError):
        frame_from_json({"n": 1})
    with pytest.raises(InvalidInputError):
        frame_from_json({"n": 1, "N": [[0]], "extra": 1})
    with pytest.raises(InvalidInputError):
        algebra_from_json({"n": 1, "box": [0, "x"]})
    with pytest.raises(InvalidInputError):
        morphism_from_json({"n_dom": 1, "n_cod": 1, "map": "00"})


def test_effective_cap_env(monkeypatch):
    assert effective_cap(5) == 5
    monkeypatch.setenv("NBHD_MAX_N", "3")
    assert effective_cap(5) == 3
    monkeypatch.setenv("NBHD_MAX_N", "9")
    assert effective_cap(5) == 5
    monkeypatch.setenv("NBHD_MAX_N", "zebra")
    with pytest.raises(InvalidInputError):
        effective_cap(5)


def test_width_caps_raise():
    frame = NeighborhoodFrame(17, tuple(Family(()) for _ in range(17)))
    with pytest.raises(CapExceededError):
        box_n(frame, 0)
    with pytest.raises(CapExceededError):
        complement_frame(frame)
    with pytest.raises(CapExceededError):
        to_relation(frame)


def test_hom_apply_preserves_structure():
    rng = random.Random(11)
    for _ in range(200):
        n_dom = rng.randrange(1, 4)
        n_cod = rng.randrange(0, 4)
        h = CompleteHom(n_dom, n_cod, tuple(rng.randrange(n_dom) for _ in range(n_cod)))
        full_d = full_mask(n_dom)
        for _ in range(10):
            a = rng.randrange(full_d + 1)
            b = rng.randrange(full_d + 1)
            assert h.apply(a & b) == h.apply(a) & h.apply(b)
            assert h.apply(a | b) == h.apply(a) | h.apply(b)
            assert h.apply(full_d ^ a) == full_mask(n_cod) ^ h.apply(a)
