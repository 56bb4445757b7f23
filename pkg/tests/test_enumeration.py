import itertools
from fractions import Fraction
from math import comb

import pytest

from thermoforms.enumeration import (
    LOG_P,
    LOG_V,
    SingletonTheorem,
    entropy_theorem_set,
    enumerate_closed_forms,
    primitive,
    theorem_candidates,
)
from thermoforms.forms import OneForm, d_one, d_scalar, find_potential, is_closed, mono
from thermoforms.units import summands_consistent


def brute_force_closed(bound):
    """Every tuple, unit check by direct dimensions, closed subspace by null space.

    For f = a*X dp + b*Y dV, d(f) = b*dY/dp - a*dX/dV is linear in (a, b); each
    monomial of that 2-form gives one linear constraint on (a, b).
    """
    out = set()
    for al, be, alp, bep in itertools.product(range(-bound, bound + 1), repeat=4):
        X, Y = mono(p=al, V=be), mono(p=alp, V=bep)
        if not summands_consistent(OneForm(X, Y)):
            continue
        ca = d_one(OneForm(A=X)).C  # coefficient of a
        cb = d_one(OneForm(B=Y)).C  # coefficient of b
        keys = {m.key for m in ca} | {m.key for m in cb}
        rows = []
        for k in keys:
            ra = next((m.coeff for m in ca if m.key == k), Fraction(0))
            rb = next((m.coeff for m in cb if m.key == k), Fraction(0))
            rows.append((ra, rb))
        rows = [r for r in rows if r != (0, 0)]
        if not rows:
            basis = [(1, 0), (0, 1)]
        else:
            ra, rb = rows[0]
            candidate = (rb, -ra)  # spans the null space of the first row
            if any(x * candidate[0] + y * candidate[1] != 0 for x, y in rows):
                basis = []
            else:
                basis = [candidate]
                if candidate[0] == 0 or candidate[1] == 0:
                    basis = []  # only one summand survives
        for a, b in basis:
            out.add(primitive(OneForm(X * a, Y * b)))
    return out


class TestEnumerateClosedForms:
    def test_bound_one_contents(self):
        forms = [c.form for c in enumerate_closed_forms(1)]
        assert LOG_P in forms
        assert LOG_V in forms
        assert OneForm(mono(V=1), mono(p=1)) in forms
        assert OneForm(B=mono(p=1)) not in forms

    def test_bound_zero_is_empty(self):
        assert enumerate_closed_forms(0) == []

    @pytest.mark.parametrize("bound", [1, 2, 3])
    def test_soundness(self, bound):
        for c in enumerate_closed_forms(bound):
            assert is_closed(c.form)
            assert summands_consistent(c.form)
            assert d_scalar(c.potential) == c.form
            assert d_scalar(find_potential(c.form)) == c.form

    @pytest.mark.parametrize("bound", [1, 2])
    def test_matches_brute_force(self, bound):
        assert {c.form for c in enumerate_closed_forms(bound)} == brute_force_closed(bound)

    @pytest.mark.parametrize("bound", [1, 2, 3])
    def test_filter_order_does_not_matter(self, bound):
        a = enumerate_closed_forms(bound)
        b = enumerate_closed_forms(bound, closed_first=True)
        assert [c.form for c in a] == [c.form for c in b]

    def test_sorted_and_deduplicated(self):
        found = enumerate_closed_forms(3)
        keys = [c.complexity for c in found]
        assert keys == sorted(keys)
        assert len({c.form for c in found}) == len(found)
        for c in found:
            assert primitive(c.form) == c.form

    def test_extra_family_flag(self):
        flags = {c.form: c.extra_family for c in enumerate_closed_forms(2)}
        assert flags[LOG_P] is False and flags[LOG_V] is False
        assert flags[OneForm(mono(V=1), mono(p=1))] is True

    def test_non_log_survivors_are_monomial_gradients(self):
        for c in enumerate_closed_forms(3):
            if c.extra_family:
                assert not c.potential.log_p and not c.potential.log_V
                assert len(c.potential.poly) == 1


def uniform(n):
    return [SingletonTheorem(f"A{i}", OneForm(mono(p=i))) for i in range(1, n + 1)]


class TestTheoremCandidates:
    def test_singletons_only(self):
        out = theorem_candidates(uniform(3), 1)
        assert [c.labels for c in out] == [("A1",), ("A2",), ("A3",)]

    def test_pairs(self):
        out = theorem_candidates(uniform(3), 2)
        assert len(out) == 6
        assert [c.labels for c in out[3:]] == [("A1", "A2"), ("A1", "A3"), ("A2", "A3")]

    def test_zero_budget(self):
        assert theorem_candidates(uniform(3), 0) == []

    @pytest.mark.parametrize("n, N", [(1, 1), (4, 2), (5, 3), (5, 9), (6, 6)])
    def test_counts(self, n, N):
        expected = sum(comb(n, k) for k in range(1, min(n, N) + 1))
        assert len(theorem_candidates(uniform(n), N)) == expected

    def test_weighted_budget(self):
        H = [SingletonTheorem("a", complexity=2), SingletonTheorem("b", LOG_P), SingletonTheorem("c", LOG_V, 3)]
        out = theorem_candidates(H, 3)
        assert [c.labels for c in out] == [("b",), ("a",), ("a", "b"), ("c",)]
        assert all(c.total_complexity <= 3 for c in out)
        assert [c.total_complexity for c in out] == sorted(c.total_complexity for c in out)

    def test_complexity_must_be_positive(self):
        with pytest.raises(ValueError):
            SingletonTheorem("x", complexity=0)


class TestEntropyTheoremSet:
    def test_size_and_members(self):
        T = entropy_theorem_set()
        assert len(T) == 3
        assert [t.observed for t in T] == [True, False, False]
        assert {t.term for t in T if t.term} == {LOG_P, LOG_V}

    def test_full_theorem_enumerated_at_budget_three(self):
        labels = {frozenset(c.labels) for c in theorem_candidates(entropy_theorem_set(), 3)}
        assert frozenset({"dS", "p^-1 dp", "V^-1 dV"}) in labels

    def test_full_theorem_absent_at_budget_one(self):
        assert all(len(c.terms) == 1 for c in theorem_candidates(entropy_theorem_set(), 1))

    def test_render(self):
        c = theorem_candidates(entropy_theorem_set(), 3)[-1]
        assert c.render() == "c0 + c1*dS + c2*(V^-1 dV) + c3*(p^-1 dp) = 0"
