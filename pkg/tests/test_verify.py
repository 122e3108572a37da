import pytest

from secant_dyn import verify
from secant_dyn.focal import _PairDerivatives


def test_default_suite_passes():
    for r in verify.default_suite(0):
        assert r.passed, r.line()


def test_recursion_check_catches_a_sign_slip(monkeypatch):
    original = _PairDerivatives.q

    def flipped(self, m, l):
        if m > 0 and l == m:
            return (-m * original(self, m - 1, m - 1) - self.dp(m, self.a2)) / self.h
        return original(self, m, l)

    monkeypatch.setattr(_PairDerivatives, "q", flipped)
    r = verify.check_recursions()
    assert not r.passed and "l=" in r.detail


def test_taylor_check_catches_wrong_expansion(monkeypatch):
    import secant_dyn.verify as v

    monkeypatch.setattr(v, "n1_eval", lambda p, root, x, y: 0.0 * x)
    assert not v.check_taylor().passed


def test_root_claims():
    assert verify.check_root_claims([0, 2, -3, 0, 1], [(1, 2), (0, 1), (-2, 1)]).passed
    bad = verify.check_root_claims([0, 2, -3, 0, 1], [(1, 3)])
    assert not bad.passed and "multiplicity" in bad.detail


@pytest.mark.parametrize("seed", [0, 1])
def test_divided_difference_seeded(seed):
    a = verify.check_divided_difference(seed, n_polys=20)
    b = verify.check_divided_difference(seed, n_polys=20)
    assert a.worst == b.worst and a.passed
