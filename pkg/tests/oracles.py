"""Independent reference computations used by the tests.

Nothing here imports the package's rewriting code: NS expectation values
are computed by naive adjacent swaps on raw mode words, and graded
dimensions come from explicit power-series products.
"""

from fractions import Fraction
from functools import lru_cache

HALF = Fraction(1, 2)


def _bracket(x, y, c):
    """Graded bracket [x, y] as a list of (coeff, mode) plus a central scalar."""
    (kx, a), (ky, b) = x, y
    if kx == "L" and ky == "L":
        central = c / 12 * (a**3 - a) if a + b == 0 else 0
        return [((a - b), ("L", a + b))], central
    if kx == "L" and ky == "G":
        return [((a / 2 - b), ("G", a + b))], 0
    if kx == "G" and ky == "L":
        return [(-(b / 2 - a), ("G", a + b))], 0
    central = c / 3 * (a * a - Fraction(1, 4)) if a + b == 0 else 0
    return [(Fraction(2), ("L", a + b))], central


def ns_expectation(word, c, h):
    """Coefficient of v in ``word . v`` for the highest weight vector v of M(c, h)."""
    c, h = Fraction(c), Fraction(h)

    @lru_cache(maxsize=None)
    def E(w):
        if sum(m for _, m in w) != 0:
            return Fraction(0)
        if not w:
            return Fraction(1)
        if w[-1][1] > 0:
            return Fraction(0)
        if w[0][1] < 0:
            return Fraction(0)
        # first adjacent pair (annihilator, creator-or-zero) out of order
        for k in range(len(w) - 1):
            x, y = w[k], w[k + 1]
            if x[1] > y[1]:
                sign = -1 if (x[0] == "G" and y[0] == "G") else 1
                swapped = w[:k] + (y, x) + w[k + 2 :]
                terms, central = _bracket(x, y, c)
                total = sign * E(swapped)
                for coeff, z in terms:
                    total += coeff * E(w[:k] + (z,) + w[k + 2 :])
                if central:
                    total += central * E(w[:k] + w[k + 2 :])
                return total
        # ordered and weight zero: only zero modes remain
        out = Fraction(1)
        for kind, m in w:
            if kind == "G":
                return Fraction(0)
            out *= h
        return out

    return E(tuple((k, Fraction(m)) for k, m in word))


def ns_gram_oracle(monomials, c, h):
    """Gram matrix of words ``[(kind, mode), ...]`` (leftmost acts last)."""

    def adj(word):
        return [(k, -m) for k, m in reversed(word)]

    return [[ns_expectation(adj(a) + list(b), c, h) for b in monomials] for a in monomials]


def series_product(factors, top2):
    """Multiply power series in q^(1/2), truncated at exponent top2/2.

    ``factors`` is a list of (exponent2, kind) with kind 'fermion' (1 + q^e)
    or 'boson' (1/(1 - q^e)).
    """
    coeffs = [0] * (top2 + 1)
    coeffs[0] = 1
    for e2, kind in factors:
        if kind == "fermion":
            for k in range(top2, e2 - 1, -1):
                coeffs[k] += coeffs[k - e2]
        else:
            for k in range(e2, top2 + 1):
                coeffs[k] += coeffs[k - e2]
    return coeffs


def fermion_dims(n, top):
    top2 = int(2 * Fraction(top))
    return series_product([(2 * k + 1, "fermion") for k in range(top2) for _ in range(n)], top2)


def lattice_dims(gram, top):
    """Theta series times the rank-d partition function, by brute force."""
    import itertools

    d = len(gram)
    top2 = int(2 * Fraction(top))
    boson = series_product([(2 * k, "boson") for k in range(1, top2 + 1) for _ in range(d)], top2)
    theta = [0] * (top2 + 1)
    R = 2 * top2 + 2
    for lam in itertools.product(range(-R, R + 1), repeat=d):
        nrm = sum(lam[i] * gram[i][j] * lam[j] for i in range(d) for j in range(d))
        if nrm <= top2:
            theta[nrm] += 1
    return [sum(theta[a] * boson[k - a] for a in range(k + 1)) for k in range(top2 + 1)]
