"""Smoke tests of the python module: each exposed surface does one real thing."""

import math

import pytest

import rblab


def test_derive_params():
    p = rblab.derive_params(4, 1.0, 2, 0.5, 1.4427, seed=7)
    assert (p.d, p.m, p.t) == (4, 8, 8)
    with pytest.raises(rblab.DomainError):
        rblab.derive_params(1, 1.0, 2, 0.5, 1.0)


def test_generation_is_deterministic():
    p = rblab.derive_params(6, 1.0, 2, 0.5, 1.3, seed=11)
    a = rblab.generate_original(p)
    b = rblab.generate_original(p)
    assert a == b
    assert len(a.constraints) == p.m
    assert all(len(c) == p.t for c in a.constraints)


def test_solver_and_oracle_agree():
    p = rblab.derive_params(5, 1.0, 2, 0.5, 1.2, seed=3)
    inst = rblab.generate_original(p)
    fast = rblab.solve(inst, rblab.SolveMode.CountAll)
    slow = rblab.enumerate_oracle(inst)
    assert fast.count == slow.count
    if fast.sat:
        assert rblab.satisfies_all(inst, fast.witness)


def test_flip_cycle():
    r, _ = rblab.moments.calibrate_r(6, 1.0, 0.5)
    for seed in range(200):
        p = rblab.derive_params(6, 1.0, 2, 0.5, r, seed=seed)
        inst = rblab.generate_original(p)
        res = rblab.solve(inst, rblab.SolveMode.CheckUnique)
        if res.sat and res.count == 1:
            flipped, cert = rblab.flip_sat_to_unsat(inst, res.witness)
            assert cert.direction == rblab.FlipDirection.SatToUnsat
            assert not rblab.satisfies(flipped.constraints[cert.u], res.witness)
            assert rblab.verify_certificate(flipped, cert)
            assert "sat_to_unsat" in cert.to_json()
            break
    else:
        pytest.fail("no unique-solution instance among 200 seeds")


def test_near_miss_and_unsat_flip():
    r, _ = rblab.moments.calibrate_r(6, 1.0, 0.5)
    for seed in range(200):
        p = rblab.derive_params(6, 1.0, 2, 0.5, r, seed=seed)
        inst = rblab.generate_original(p)
        if rblab.solve(inst).sat:
            continue
        for u in range(len(inst.constraints)):
            near = rblab.find_near_miss(inst, u)
            if near is None:
                continue
            try:
                flipped, cert = rblab.flip_unsat_to_sat(inst, u, near)
            except rblab.NoFlipPairFound:
                continue
            assert rblab.satisfies_all(flipped, cert.witness)
            assert rblab.solve(flipped).sat
            return
    pytest.fail("no flippable UNSAT instance among 200 seeds")


def test_moments_reference_values():
    p = rblab.derive_params(4, 1.0, 2, 0.5, 1.4427, seed=0)
    assert rblab.moments.expected_solutions(p) == pytest.approx(1.0)
    assert rblab.moments.expected_near_miss(p) == pytest.approx(1.0)
    assert rblab.moments.r_critical(0.5) == pytest.approx(1.0 / math.log(2))
    r, eps = rblab.moments.calibrate_r(100, 3.0, 0.5)
    assert eps == pytest.approx(1.0 / (300 * math.log(100)))
    exact, asym = rblab.moments.binom_ratio(2, 4, 2)
    assert exact == pytest.approx(1 / 6)
    assert asym == pytest.approx(0.25)


def test_json_round_trip():
    p = rblab.derive_params(5, 1.0, 2, 0.5, 1.0, seed=2)
    inst = rblab.generate_original(p)
    again = rblab.Instance.from_json(inst.to_json())
    assert again == inst
    with pytest.raises(rblab.DomainError):
        rblab.Instance.from_json('{"n": 2}')


def test_symmetric_relation():
    rel = rblab.generate_symmetric_relation(3, 2, 5, seed=1)
    assert rblab.closed_under_permutation(rel)
    p = rblab.derive_params(5, 1.0, 2, 0.5, 1.0, seed=2)
    rel2 = rblab.generate_symmetric_relation(p.d, p.k, p.t, seed=4)
    inst = rblab.instantiate_symmetric(p, rel2)
    assert inst.variant == rblab.Variant.Symmetric
    assert all(len(c) == len(rel2) for c in inst.constraints)


def test_encoding_equisatisfiable():
    p = rblab.derive_params(5, 1.0, 2, 0.5, 1.2, seed=9)
    inst = rblab.generate_original(p)
    cnf = rblab.satenc.encode(inst)
    assert cnf.num_vars == p.n * rblab.satenc.bits_for_domain(p.d)
    res = rblab.satenc.dpll_sat(cnf)
    assert res.sat == rblab.solve(inst).sat
    if res.sat:
        decoded = rblab.satenc.decode(cnf, res.model)
        assert rblab.satisfies_all(inst, decoded)
    text = rblab.satenc.to_dimacs(cnf)
    back = rblab.satenc.from_dimacs(text)
    assert back.num_vars == cnf.num_vars
    assert back.clauses == cnf.clauses


def test_feasibility():
    good = rblab.feasibility.check(100, 3.0, 3, 0.5)
    assert good.overall
    bad = rblab.feasibility.check(100, 2.0, 3, 0.5)
    assert not bad.overall
    assert [c.id for c in bad.conditions if not c.ok] == [5]
    alpha = rblab.feasibility.find_feasible(100, 3, 0.5, [1.0 + 0.25 * i for i in range(17)])
    assert alpha == pytest.approx(2.75)


def test_harness_sweep():
    records = rblab.harness.sweep(5, 1.0, 2, 0.5, [1.0, 1.8], trials=20, seed=1, jobs=2)
    assert len(records) == 2
    assert all(0.0 <= rec.pr_sat <= 1.0 for rec in records)
    again = rblab.harness.sweep(5, 1.0, 2, 0.5, [1.0, 1.8], trials=20, seed=1, jobs=1)
    assert [rec.sat_count for rec in records] == [rec.sat_count for rec in again]
