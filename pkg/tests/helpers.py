"""Generators and independent oracles shared by the test modules."""

import math
from fractions import Fraction

from sentinel.polyalg import PolyMatrix, Polynomial, poly_gcd
from sentinel.polyalg.poly import EXACT


def random_poly(rng, max_deg, mode=EXACT, span=3, nonzero=False):
    """Random polynomial with small integer coefficients, degree <= max_deg."""
    while True:
        coeffs = [rng.randint(-span, span) for _ in range(max_deg + 1)]
        p = Polynomial(coeffs, mode)
        if not nonzero or not p.is_zero():
            return p


def random_monic(rng, deg, mode=EXACT, span=3):
    coeffs = [rng.randint(-span, span) for _ in range(deg)] + [1]
    return Polynomial(coeffs, mode)


def random_matrix(rng, rows, cols, max_deg, mode=EXACT, span=3):
    return PolyMatrix(
        [[random_poly(rng, rng.randint(0, max_deg), mode, span) for _ in range(cols)]
         for _ in range(rows)]
    )


def random_unimodular(rng, n, mode=EXACT, ops=None):
    """Product of elementary row-addition and swap matrices."""
    if n == 1:
        return PolyMatrix([[Polynomial.constant(rng.choice([-2, -1, 1, 2]), mode)]])
    ops = 2 * n if ops is None else ops
    u = PolyMatrix.identity(n, mode)
    for _ in range(ops):
        i, j = rng.sample(range(n), 2)
        kind = rng.random()
        entries = [
            [Polynomial.constant(1 if r == c else 0, mode) for c in range(n)]
            for r in range(n)
        ]
        if kind < 0.2:
            entries[i][i] = Polynomial.zero(mode)
            entries[j][j] = Polynomial.zero(mode)
            entries[i][j] = Polynomial.one(mode)
            entries[j][i] = Polynomial.one(mode)
        else:
            entries[i][j] = random_poly(rng, rng.randint(0, 2), mode)
        u = PolyMatrix(entries) @ u
    return u


def laplace_det(m):
    """Cofactor-expansion determinant; independent of the triangularization."""
    if m.rows == 1:
        return m[0, 0]
    total = Polynomial.zero(m.mode, m.eps_zero)
    rest = range(1, m.rows)
    for j in range(m.cols):
        minor = m.submatrix(rest, [c for c in range(m.cols) if c != j])
        term = m[0, j] * laplace_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def minors_gcd_left_unimodular(m):
    """Left-unimodularity via the maximal-minors characterization.

    A tall matrix has a polynomial left inverse iff the GCD of all its
    maximal minors is a nonzero constant.
    """
    from itertools import combinations

    g = None
    for rows in combinations(range(m.rows), m.cols):
        d = laplace_det(m.take_rows(rows))
        if d.is_zero():
            continue
        g = d if g is None else poly_gcd(g, d)
        if g.degree == 0:
            return True
    return g is not None and g.degree == 0


def coprime_pair(rng, deg_a, deg_c, mode=EXACT):
    """(a, c) with a monic of degree deg_a, deg c < deg a, GCD(a, c) = 1."""
    while True:
        a = random_monic(rng, deg_a, mode)
        c = random_poly(rng, deg_c, mode, nonzero=True)
        if poly_gcd(a, c).degree == 0:
            return a, c


def random_ms_canonical(rng, n, deg_a):
    """Maximally secure shape: identity block of size n-1 over a single
    monic annihilator, every off-column polynomial coprime to it."""
    a = random_monic(rng, deg_a)
    rows = []
    for i in range(n - 1):
        while True:
            c = random_poly(rng, rng.randint(0, deg_a - 1), nonzero=True)
            if poly_gcd(a, c).degree == 0:
                break
        row = [Polynomial.constant(1 if i == j else 0) for j in range(n - 1)]
        row.append(-c)
        rows.append(row)
    rows.append([Polynomial.zero()] * (n - 1) + [a])
    return PolyMatrix(rows)


def random_general_canonical(rng, n, block):
    """Canonical shape with an upper-triangular dominant bottom block."""
    m = n - block
    diag_degs = [rng.randint(1, 2) for _ in range(m)]
    rows = []
    for i in range(block):
        row = [Polynomial.constant(1 if i == j else 0) for j in range(block)]
        row += [random_poly(rng, diag_degs[j] - 1) for j in range(m)]
        rows.append(row)
    for i in range(m):
        row = [Polynomial.zero()] * block
        for j in range(m):
            if j < i:
                row.append(Polynomial.zero())
            elif j == i:
                row.append(random_monic(rng, diag_degs[i]))
            else:
                row.append(random_poly(rng, diag_degs[j] - 1))
        rows.append(row)
    return PolyMatrix(rows)


def state_trajectory(a_rows, y0, horizon):
    """Iterate y(t+1) = A y(t) with exact rationals; returns time-major rows."""
    a = [[Fraction(c) for c in row] for row in a_rows]
    state = [Fraction(c) for c in y0]
    rows = [tuple(state)]
    for _ in range(horizon - 1):
        state = [sum(a[i][j] * state[j] for j in range(len(state))) for i in range(len(state))]
        rows.append(tuple(state))
    return rows


def latent_trajectory(d_matrix, rng, horizon, span=3):
    """Random exact solution of D(sigma) l = 0 for upper-triangular monic D.

    Later components are generated first and padded, since every earlier
    row's recurrence consumes them at shifted indices.
    """
    m = d_matrix.rows
    pad = d_matrix.max_degree() + 1
    comps = [None] * m
    for i in range(m - 1, -1, -1):
        length = horizon + i * pad
        diag = d_matrix[i, i]
        deg = diag.degree
        seq = [Fraction(rng.randint(-span, span)) for _ in range(deg)]
        while len(seq) < length:
            t = len(seq) - deg
            total = Fraction(0)
            for j in range(i + 1, m):
                entry = d_matrix[i, j]
                if entry.degree is None:
                    continue
                for k, c in enumerate(entry.coeffs):
                    if c:
                        total += Fraction(c) * comps[j][t + k]
            for k in range(deg):
                c = diag.coeff(k)
                if c:
                    total += Fraction(c) * seq[t + k]
            seq.append(-total)
        comps[i] = seq
    return [c[:horizon] for c in comps]


def clean_trajectory_md(output_map, latent_kernel, rng, horizon):
    """Random clean sensor trajectory of the latent-form system."""
    from sentinel.signals import SignalVector, apply_poly_matrix

    latent = latent_trajectory(
        latent_kernel, rng, horizon + output_map.max_degree()
    )
    latent_signal = SignalVector(latent)
    return apply_poly_matrix(output_map, latent_signal), latent_signal


# six-sensor converter plant: two coupled RL branches and a capacitor,
# rotating at the grid frequency
CONVERTER_L1 = 4.3e-3
CONVERTER_R1 = 83.1e-3
CONVERTER_L2 = 2.4e-3
CONVERTER_R2 = 67.3e-3
CONVERTER_C0 = 18e-6
CONVERTER_W1 = 100 * math.pi
CONVERTER_TS = 200e-6

CONVERTER_INITIAL = [1.0, -0.5, 0.25, 1.5, -1.0, 2.0]


def converter_matrix():
    l1, r1 = CONVERTER_L1, CONVERTER_R1
    l2, r2 = CONVERTER_L2, CONVERTER_R2
    c0, w1 = CONVERTER_C0, CONVERTER_W1
    return [
        [-r1 / l1, w1, 0, 0, -1 / l1, 0],
        [-w1, -r1 / l1, 0, 0, 0, -1 / l1],
        [0, 0, -r2 / l2, w1, 1 / l2, 0],
        [0, 0, -w1, -r2 / l2, 0, 1 / l2],
        [1 / c0, 0, -1 / c0, 0, 0, w1],
        [0, 1 / c0, 0, -1 / c0, -w1, 0],
    ]
