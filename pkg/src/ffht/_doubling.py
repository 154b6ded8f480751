"""Doubling on a Weierstrass cubic as three quartic forms in X, Y, Z.

Each entry maps an (X, Y, Z) exponent to terms (c, (e1, e2, e3, e4, e6))
standing for c * a1^e1 a2^e2 a3^e3 a4^e4 a6^e6.  Restricted to the affine
curve the forms are psi^3 * (x(2P), y(2P), 1) with psi = 2y + a1 x + a3, and
they use only monomials of X-degree at most 2 (normal forms modulo the cubic).
"""

DOUBLING = (
    {
        (2, 2, 0): [(3, (1, 0, 0, 0, 0))],
        (2, 1, 1): [(-2, (2, 1, 0, 0, 0)), (2, (0, 2, 0, 0, 0)), (-6, (0, 0, 0, 1, 0))],
        (2, 0, 2): [(1, (2, 1, 1, 0, 0)), (-1, (1, 3, 0, 0, 0)), (4, (1, 1, 0, 1, 0)), (-3, (1, 0, 2, 0, 0)), (-9, (1, 0, 0, 0, 1)), (1, (0, 2, 1, 0, 0)), (-3, (0, 0, 1, 1, 0))],
        (1, 3, 0): [(2, (0, 0, 0, 0, 0))],
        (1, 2, 1): [(1, (3, 0, 0, 0, 0)), (-3, (1, 1, 0, 0, 0)), (3, (0, 0, 1, 0, 0))],
        (1, 1, 2): [(-1, (3, 0, 1, 0, 0)), (1, (2, 2, 0, 0, 0)), (-4, (2, 0, 0, 1, 0)), (-2, (1, 1, 1, 0, 0)), (2, (0, 1, 0, 1, 0)), (-3, (0, 0, 2, 0, 0)), (-18, (0, 0, 0, 0, 1))],
        (1, 0, 3): [(-1, (3, 0, 0, 0, 1)), (2, (2, 0, 1, 1, 0)), (-1, (1, 2, 0, 1, 0)), (-1, (1, 1, 2, 0, 0)), (-3, (1, 1, 0, 0, 1)), (4, (1, 0, 0, 2, 0)), (1, (0, 1, 1, 1, 0)), (-2, (0, 0, 3, 0, 0)), (-9, (0, 0, 1, 0, 1))],
        (0, 3, 1): [(1, (2, 0, 0, 0, 0)), (-2, (0, 1, 0, 0, 0))],
        (0, 2, 2): [(1, (1, 2, 0, 0, 0)), (-3, (1, 0, 0, 1, 0)), (-3, (0, 1, 1, 0, 0))],
        (0, 1, 3): [(-1, (2, 0, 2, 0, 0)), (-3, (2, 0, 0, 0, 1)), (1, (1, 2, 1, 0, 0)), (-1, (1, 0, 1, 1, 0)), (-3, (0, 1, 2, 0, 0)), (-6, (0, 1, 0, 0, 1)), (2, (0, 0, 0, 2, 0))],
        (0, 0, 4): [(-1, (1, 2, 0, 0, 1)), (1, (1, 0, 2, 1, 0)), (3, (1, 0, 0, 1, 1)), (-1, (0, 1, 3, 0, 0)), (-3, (0, 1, 1, 0, 1)), (1, (0, 0, 1, 2, 0))],
    },
    {
        (2, 1, 1): [(-2, (1, 2, 0, 0, 0)), (6, (1, 0, 0, 1, 0))],
        (2, 0, 2): [(-1, (2, 1, 0, 1, 0)), (9, (2, 0, 0, 0, 1)), (2, (1, 2, 1, 0, 0)), (-6, (1, 0, 1, 1, 0)), (-1, (0, 4, 0, 0, 0)), (6, (0, 2, 0, 1, 0)), (-9, (0, 0, 0, 2, 0))],
        (1, 3, 0): [(1, (1, 0, 0, 0, 0))],
        (1, 2, 1): [(1, (2, 1, 0, 0, 0)), (-3, (1, 0, 1, 0, 0)), (-1, (0, 2, 0, 0, 0)), (3, (0, 0, 0, 1, 0))],
        (1, 1, 2): [(1, (3, 0, 0, 1, 0)), (-2, (2, 1, 1, 0, 0)), (1, (1, 3, 0, 0, 0)), (-6, (1, 1, 0, 1, 0)), (3, (1, 0, 2, 0, 0)), (27, (1, 0, 0, 0, 1)), (-1, (0, 2, 1, 0, 0)), (3, (0, 0, 1, 1, 0))],
        (1, 0, 3): [(1, (4, 0, 0, 0, 1)), (-1, (3, 0, 1, 1, 0)), (1, (2, 1, 2, 0, 0)), (6, (2, 1, 0, 0, 1)), (-2, (2, 0, 0, 2, 0)), (-1, (1, 0, 3, 0, 0)), (-1, (0, 3, 0, 1, 0)), (2, (0, 2, 2, 0, 0)), (9, (0, 2, 0, 0, 1)), (3, (0, 1, 0, 2, 0)), (-6, (0, 0, 2, 1, 0)), (-27, (0, 0, 0, 1, 1))],
        (0, 4, 0): [(1, (0, 0, 0, 0, 0))],
        (0, 3, 1): [(1, (1, 1, 0, 0, 0)), (-2, (0, 0, 1, 0, 0))],
        (0, 2, 2): [(1, (2, 0, 0, 1, 0)), (-1, (1, 1, 1, 0, 0)), (1, (0, 3, 0, 0, 0)), (-5, (0, 1, 0, 1, 0)), (18, (0, 0, 0, 0, 1))],
        (0, 1, 3): [(1, (3, 0, 0, 0, 1)), (-1, (1, 1, 2, 0, 0)), (3, (1, 1, 0, 0, 1)), (-1, (1, 0, 0, 2, 0)), (1, (0, 3, 1, 0, 0)), (-5, (0, 1, 1, 1, 0)), (2, (0, 0, 3, 0, 0)), (18, (0, 0, 1, 0, 1))],
        (0, 0, 4): [(1, (3, 0, 1, 0, 1)), (-1, (2, 0, 2, 1, 0)), (1, (1, 1, 3, 0, 0)), (6, (1, 1, 1, 0, 1)), (-2, (1, 0, 1, 2, 0)), (-1, (0, 3, 0, 0, 1)), (1, (0, 1, 2, 1, 0)), (9, (0, 1, 0, 1, 1)), (-1, (0, 0, 4, 0, 0)), (-9, (0, 0, 2, 0, 1)), (-1, (0, 0, 0, 3, 0)), (-27, (0, 0, 0, 0, 2))],
    },
    {
        (2, 1, 1): [(6, (2, 0, 0, 0, 0))],
        (2, 0, 2): [(-1, (3, 1, 0, 0, 0)), (3, (2, 0, 1, 0, 0))],
        (1, 2, 1): [(12, (1, 0, 0, 0, 0))],
        (1, 1, 2): [(1, (4, 0, 0, 0, 0)), (12, (1, 0, 1, 0, 0))],
        (1, 0, 3): [(-1, (3, 0, 0, 1, 0)), (3, (1, 0, 2, 0, 0))],
        (0, 3, 1): [(8, (0, 0, 0, 0, 0))],
        (0, 2, 2): [(1, (3, 0, 0, 0, 0)), (12, (0, 0, 1, 0, 0))],
        (0, 1, 3): [(1, (3, 0, 1, 0, 0)), (6, (0, 0, 2, 0, 0))],
        (0, 0, 4): [(-1, (3, 0, 0, 0, 1)), (1, (0, 0, 3, 0, 0))],
    },
)
