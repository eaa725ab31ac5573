"""Finite-horizon multichannel signals and the shift-operator calculus.

A polynomial in the shift acts as a forward finite-impulse-response filter:
o(t) = sum_k p_k u(t+k).  Each application therefore consumes deg p samples
from the end of the horizon, and consumers track how many leading samples
they consider trustworthy through an explicit ``valid_from`` watermark.

Sample arithmetic follows the coefficient mode of the polynomials applied:
exact rationals compare by equality, tolerant floats within a relative
``eps_sig`` of the largest magnitude in the compared windows.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DegenerateInput, HorizonTooShort, MajorityTie, ShapeError
from .polyalg.poly import EXACT, TOLERANT, _coerce

DEFAULT_EPS_SIG = 1e-6


class SignalVector:
    """Immutable bundle of N equal-length scalar sequences.

    ``valid_from`` marks the first sample index the producer vouches for;
    everything before it may be transient garbage and is ignored by
    support computation and voting.
    """

    __slots__ = ("components", "mode", "valid_from")

    def __init__(self, components, mode=EXACT, valid_from=0):
        if mode not in (EXACT, TOLERANT):
            raise ValueError("unknown coefficient mode %r" % (mode,))
        comps = [tuple(_coerce(s, mode) for s in comp) for comp in components]
        if not comps:
            raise DegenerateInput("signal needs at least one component")
        horizon = len(comps[0])
        if any(len(c) != horizon for c in comps):
            raise ShapeError("signal components differ in length")
        if not 0 <= valid_from <= horizon:
            raise DegenerateInput(
                "valid_from %d outside horizon %d" % (valid_from, horizon)
            )
        object.__setattr__(self, "components", tuple(comps))
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "valid_from", valid_from)

    def __setattr__(self, name, value):
        raise AttributeError("SignalVector is immutable")

    @property
    def n_components(self):
        return len(self.components)

    @property
    def horizon(self):
        return len(self.components[0])

    @classmethod
    def zero(cls, n, horizon, mode=EXACT):
        return cls([[0] * horizon for _ in range(n)], mode)

    @classmethod
    def from_rows(cls, rows, mode=EXACT, valid_from=0):
        """Build from time-major rows (one tuple of N samples per instant)."""
        if not rows:
            raise DegenerateInput("empty signal")
        n = len(rows[0])
        if any(len(r) != n for r in rows):
            raise ShapeError("rows differ in width")
        return cls([[r[i] for r in rows] for i in range(n)], mode, valid_from)

    def to_rows(self):
        return [tuple(c[t] for c in self.components) for t in range(self.horizon)]

    def component(self, i):
        return self.components[i]

    def take_components(self, indices):
        return SignalVector(
            [self.components[i] for i in indices], self.mode, self.valid_from
        )

    def truncated(self, horizon):
        if horizon > self.horizon:
            raise HorizonTooShort(
                "cannot extend horizon %d to %d" % (self.horizon, horizon)
            )
        return SignalVector(
            [c[:horizon] for c in self.components],
            self.mode,
            min(self.valid_from, horizon),
        )

    def with_valid_from(self, t):
        return SignalVector(self.components, self.mode, t)

    def window_max(self):
        """Largest sample magnitude at or after the watermark."""
        mags = [
            abs(s) for c in self.components for s in c[self.valid_from :]
        ]
        return max(mags, default=_coerce(0, self.mode))

    def _binary(self, other, op):
        if not isinstance(other, SignalVector):
            raise TypeError("expected a SignalVector")
        if self.mode != other.mode:
            raise DegenerateInput("cannot mix signal modes")
        if self.n_components != other.n_components:
            raise ShapeError("component counts differ")
        horizon = min(self.horizon, other.horizon)
        comps = [
            [op(a[t], b[t]) for t in range(horizon)]
            for a, b in zip(self.components, other.components)
        ]
        return SignalVector(
            comps, self.mode, min(max(self.valid_from, other.valid_from), horizon)
        )

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __repr__(self):
        return "SignalVector(n=%d, horizon=%d, valid_from=%d, mode=%s)" % (
            self.n_components,
            self.horizon,
            self.valid_from,
            self.mode,
        )


@dataclass(frozen=True)
class SupportProfile:
    """Which sensors carry signal (1-based) and how many there are."""

    support: tuple
    weight: int


def support_profile(signal, eps_sig=DEFAULT_EPS_SIG, scale=None):
    """Support over the valid window; magnitudes are judged against the
    largest sample across all components so transients never count.

    Pass ``scale`` to judge against an external reference instead, e.g. a
    residual that should be sized against the signal that produced it.
    """
    start = signal.valid_from
    if signal.mode == EXACT:
        live = [
            i + 1
            for i, comp in enumerate(signal.components)
            if any(s != 0 for s in comp[start:])
        ]
    else:
        if scale is None:
            scale = signal.window_max()
        tol = eps_sig * float(scale)
        live = [
            i + 1
            for i, comp in enumerate(signal.components)
            if any(abs(s) > tol for s in comp[start:])
        ]
    return SupportProfile(support=tuple(live), weight=len(live))


def apply_poly(p, samples):
    """Forward FIR filter: o(t) = sum_k p_k u(t+k) for t in 0..T-deg-1.

    The zero polynomial annihilates the input without shrinking it.
    """
    deg = p.degree or 0
    n_out = len(samples) - deg
    if n_out < 1:
        raise HorizonTooShort(
            "degree %d operator needs more than %d samples" % (deg, len(samples))
        )
    if p.degree is None:
        zero = _coerce(0, p.mode)
        return (zero,) * n_out
    coerced = [_coerce(s, p.mode) for s in samples]
    out = []
    for t in range(n_out):
        acc = _coerce(0, p.mode)
        for k, coeff in enumerate(p.coeffs):
            if coeff:
                acc += coeff * coerced[t + k]
        out.append(acc)
    return tuple(out)


def apply_poly_matrix(matrix, signal):
    """Row-wise shift-polynomial action on a signal vector.

    Every output component is truncated to the common horizon
    T - max degree; the watermark is carried through unchanged (clamped to
    the new horizon).
    """
    if matrix.cols != signal.n_components:
        raise ShapeError(
            "matrix width %d does not match %d signal components"
            % (matrix.cols, signal.n_components)
        )
    if matrix.mode != signal.mode:
        raise DegenerateInput("matrix and signal modes differ")
    horizon = signal.horizon - matrix.max_degree()
    if horizon < 1:
        raise HorizonTooShort(
            "degree %d matrix needs more than %d samples"
            % (matrix.max_degree(), signal.horizon)
        )
    comps = []
    for i in range(matrix.rows):
        acc = [_coerce(0, signal.mode)] * horizon
        for j in range(signal.n_components):
            part = apply_poly(matrix[i, j], signal.component(j))
            for t in range(horizon):
                acc[t] += part[t]
        comps.append(acc)
    return SignalVector(
        comps, signal.mode, min(signal.valid_from, horizon)
    )


def _window_scale(windows):
    mags = [abs(s) for w in windows for s in w]
    return max(mags, default=0.0)


def _vote_classes(windows, tolerance):
    """Group windows into agreement classes keyed by first appearance."""
    classes = []  # [founder index, count]
    for idx, w in enumerate(windows):
        for cls in classes:
            ref = windows[cls[0]]
            if tolerance is None:
                same = ref == w
            else:
                same = all(abs(a - b) <= tolerance for a, b in zip(ref, w))
            if same:
                cls[1] += 1
                break
        else:
            classes.append([idx, 1])
    return classes


def _vote_indexed(windows, tolerance):
    """Vote over pre-sliced windows; returns (winner position, tally).

    The tally lists class sizes in descending order; a tie for the top
    spot raises MajorityTie with the tally attached.
    """
    classes = _vote_classes(windows, tolerance)
    tally = tuple(sorted((count for _, count in classes), reverse=True))
    if len(tally) > 1 and tally[0] == tally[1]:
        raise MajorityTie("no strict plurality: %s" % (tally,), tally=tally)
    return max(classes, key=lambda cls: cls[1])[0], tally


def majority_vote(candidates, valid_from, eps_sig=DEFAULT_EPS_SIG):
    """Pick the strictly most frequent sequence among the candidates.

    Sequences are compared on indices >= valid_from only.  Returns
    (winner, tally) where the winner is the earliest candidate of the
    largest agreement class and the tally lists class sizes in descending
    order.  A tie for the largest class raises MajorityTie; deciding by
    coin flip would hide that the attacker broke the voting contract.
    """
    candidates = [tuple(c) for c in candidates]
    if not candidates:
        raise DegenerateInput("no candidates to vote on")
    lengths = {len(c) for c in candidates}
    if len(lengths) != 1:
        raise ShapeError("candidates differ in length")
    horizon = lengths.pop()
    if valid_from >= horizon:
        raise HorizonTooShort(
            "valid window is empty: valid_from %d, horizon %d"
            % (valid_from, horizon)
        )
    windows = [c[valid_from:] for c in candidates]
    tolerant = any(isinstance(s, float) for w in windows for s in w)
    tolerance = eps_sig * float(_window_scale(windows)) if tolerant else None
    winner_idx, tally = _vote_indexed(windows, tolerance)
    return candidates[winner_idx], tally


def signal_to_csv(signal):
    """Render as ``t,y1,...,yN`` rows; exact samples keep their p/q form."""
    header = "t," + ",".join("y%d" % (i + 1) for i in range(signal.n_components))
    lines = [header]
    for t, row in enumerate(signal.to_rows()):
        lines.append("%d,%s" % (t, ",".join(_format_sample(s) for s in row)))
    return "\n".join(lines) + "\n"


def _format_sample(s):
    if isinstance(s, Fraction):
        return str(s)
    return repr(s)


def signal_from_csv(text, mode=EXACT, valid_from=0):
    """Parse the ``t,y1,...,yN`` format produced by signal_to_csv."""
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise DegenerateInput("empty signal file")
    header = [h.strip() for h in lines[0].split(",")]
    n = len(header) - 1
    if n < 1 or header[0] != "t" or header[1:] != ["y%d" % (i + 1) for i in range(n)]:
        raise DegenerateInput("malformed signal header %r" % (lines[0],))
    rows = []
    for t, line in enumerate(lines[1:]):
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != n + 1:
            raise DegenerateInput("row %d has %d cells, expected %d" % (t, len(cells), n + 1))
        try:
            if int(cells[0]) != t:
                raise DegenerateInput("time column must run 0..T-1 without gaps")
            rows.append([_parse_sample(c, mode) for c in cells[1:]])
        except ValueError as exc:
            raise DegenerateInput("bad sample in row %d: %s" % (t, exc)) from exc
    return SignalVector.from_rows(rows, mode, valid_from)


def _parse_sample(cell, mode):
    if mode == EXACT:
        return Fraction(cell)
    try:
        return float(cell)
    except ValueError:
        return float(Fraction(cell))
