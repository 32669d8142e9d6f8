from fractions import Fraction

from hypothesis import strategies as st


def rationals(lo=-3, hi=3, max_den=12):
    return st.builds(
        lambda n, d: Fraction(n, d),
        st.integers(lo * max_den, hi * max_den),
        st.integers(1, max_den),
    )


def unit_q(max_den=12):
    """Rational q in [0, 1]."""
    return st.integers(1, max_den).flatmap(lambda d: st.integers(0, d).map(lambda n: Fraction(n, d)))


@st.composite
def standard_params(draw, positive_eta=True):
    from qproj.family import Params

    eta = draw(st.sampled_from([Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2)]))
    theta = draw(st.sampled_from([Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(2)]))
    tau = draw(st.sampled_from([Fraction(0), Fraction(3, 10), Fraction(1)]))
    q = draw(st.sampled_from([Fraction(1, 3), Fraction(1, 2), Fraction(7, 10), Fraction(1)]))
    if not positive_eta and draw(st.booleans()):
        eta, theta = -eta, -theta
    return Params(eta, theta, tau, q)
