"""Sensor-attack detection and correction built on FIR observer banks.

Detection filters the received signal through the kernel matrix; the
output is zero exactly when the receipt is a plausible trajectory, so any
additive attack that is not itself a trajectory leaves a residual.

Correction exploits redundancy between sensors.  For a maximally secure
system every sensor determines the last one through a shift polynomial,
giving one scalar observer per sensor; in the general case every large
enough sensor subset determines the latent signal through a polynomial
left inverse.  Corrupted observers cannot form a plurality while fewer
than half of the index's worth of sensors are attacked, so a majority
vote recovers the true signal and regenerates every channel from it.

All observers are forward FIR filters: each application costs samples at
the end of the horizon, and results carry a ``valid_from`` watermark for
the span the vote actually compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

from .errors import (
    DegenerateInput,
    HorizonTooShort,
    InconsistentIndex,
    MajorityTie,
    NoLeftInverse,
    NotMaximallySecure,
    ShapeError,
)
from .polyalg import left_inverse, poly_ext_gcd
from .polyalg.poly import EXACT
from .signals import (
    DEFAULT_EPS_SIG,
    SignalVector,
    SupportProfile,
    _vote_indexed,
    _window_scale,
    apply_poly,
    apply_poly_matrix,
    majority_vote,
    support_profile,
)

MAXIMALLY_SECURE = "maximally_secure"
GENERAL = "general"


@dataclass(frozen=True)
class ObserverBank:
    """Precomputed observers for one system, reusable across scenarios.

    Maximally secure banks hold (p_j, c_j) pairs per sensor j < N, with
    the last sensor read directly (p_N = 1); ``cofactors`` keeps the
    Bezout complements q_j so the defining identity can be re-audited.
    General banks hold (J, P_J) pairs, one per sensor subset of size
    N + 1 - index.
    """

    kind: str
    n_sensors: int
    observers: tuple
    latency: int
    regen_latency: int
    mode: str
    cofactors: tuple = ()
    latent_kernel: object = None


@dataclass(frozen=True)
class DetectionVerdict:
    attacked: bool
    residual: SignalVector
    residual_support: SupportProfile

    def as_dict(self):
        return {
            "attacked": self.attacked,
            "residual_support": list(self.residual_support.support),
            "residual_weight": self.residual_support.weight,
        }


@dataclass(frozen=True)
class CorrectionResult:
    """Corrected signal plus the evidence used to pick it.

    ``latent`` is the vote winner before channel regeneration: the last
    sensor's sequence in the maximally secure path, the latent signal
    vector in the general path.  The tally lists agreement-class sizes
    largest first, so callers can gauge how contested the vote was.
    """

    corrected: SignalVector
    latent: object
    winning_tally: tuple
    valid_from: int

    def as_dict(self):
        return {
            "winning_tally": list(self.winning_tally),
            "valid_from": self.valid_from,
        }


def _signal_peak(signal):
    mags = [abs(s) for comp in signal.components for s in comp]
    return max(mags, default=0)


def _assert_counting_bound(n, index):
    # Strictly fewer corrupted than clean observers at every tolerable
    # attack weight; voting is unsound if this ever fails.
    size = n + 1 - index
    t = 0
    while 2 * t < index:
        clean = math.comb(n - t, size)
        corrupt = math.comb(n - index + t, size)
        assert clean > corrupt, (
            "observer count bound fails for n=%d index=%d weight=%d"
            % (n, index, t)
        )
        t += 1


def detect(kernel, received, eps_sig=DEFAULT_EPS_SIG):
    """Filter the receipt through the kernel and judge the residual.

    Attacks lighter than the security index always leave a nonzero
    residual; an attack that is itself a trajectory is invisible here.
    """
    residual = apply_poly_matrix(kernel, received)
    # In tolerant mode the residual of a clean receipt is pure rounding
    # noise, so it must be sized against the input, not against itself.
    scale = float(kernel.coeff_scale()) * float(_signal_peak(received))
    support = support_profile(residual, eps_sig, scale=scale)
    return DetectionVerdict(
        attacked=support.weight > 0,
        residual=residual,
        residual_support=support,
    )


def build_observers_ms(canon):
    """Bezout observers for a maximally secure canonical form.

    For each sensor j the pair p_j, q_j solves p_j c_j + q_j a = 1, so
    p_j applied to a clean channel j reproduces the last channel.
    """
    annihilator = canon.char_poly
    regen = canon.regen_polys
    n = len(regen) + 1
    observers = []
    cofactors = []
    for j, c in enumerate(regen, start=1):
        g, p, q = poly_ext_gcd(c, annihilator)
        if g.degree != 0:
            raise NotMaximallySecure(
                "sensor %d shares a factor of degree %d with the annihilator"
                % (j, g.degree)
            )
        observers.append((p, c))
        cofactors.append(q)
    _assert_counting_bound(n, n)
    latency = max((p.degree or 0 for p, _ in observers), default=0)
    regen_latency = latency + max(
        (c.degree or 0 for _, c in observers), default=0
    )
    return ObserverBank(
        kind=MAXIMALLY_SECURE,
        n_sensors=n,
        observers=tuple(observers),
        latency=latency,
        regen_latency=regen_latency,
        mode=annihilator.mode,
        cofactors=tuple(cofactors),
    )


def correct_ms(bank, received, eps_sig=DEFAULT_EPS_SIG):
    """Majority vote over per-sensor estimates of the last channel, then
    regenerate every channel from the winner."""
    if bank.kind != MAXIMALLY_SECURE:
        raise DegenerateInput("bank kind %r is not maximally secure" % bank.kind)
    if received.n_components != bank.n_sensors:
        raise ShapeError(
            "bank expects %d sensors, received %d"
            % (bank.n_sensors, received.n_components)
        )
    if received.mode != bank.mode:
        raise DegenerateInput("bank and signal modes differ")
    vote_horizon = received.horizon - bank.latency
    out_horizon = received.horizon - bank.regen_latency
    if out_horizon < 1 or bank.regen_latency > out_horizon:
        raise HorizonTooShort(
            "horizon %d cannot cover regeneration latency %d"
            % (received.horizon, bank.regen_latency)
        )
    candidates = [
        apply_poly(p, received.component(j))[:vote_horizon]
        for j, (p, _) in enumerate(bank.observers)
    ]
    candidates.append(received.component(bank.n_sensors - 1)[:vote_horizon])
    winner, tally = majority_vote(candidates, bank.latency, eps_sig)
    channels = [
        apply_poly(c, winner)[:out_horizon] for _, c in bank.observers
    ]
    channels.append(winner[:out_horizon])
    corrected = SignalVector(channels, bank.mode, bank.regen_latency)
    return CorrectionResult(
        corrected=corrected,
        latent=winner,
        winning_tally=tally,
        valid_from=bank.regen_latency,
    )


def build_observers_general(output_map, latent_kernel, index):
    """One exact observer per sensor subset of size N + 1 - index.

    Each observer is the leading block of a polynomial left inverse of
    the subset's rows stacked on the latent kernel; the declared index
    guarantees every such stack admits one.
    """
    n = output_map.rows
    m = output_map.cols
    if latent_kernel.rows != m or latent_kernel.cols != m:
        raise ShapeError(
            "latent kernel must be %dx%d, got %dx%d"
            % (m, m, latent_kernel.rows, latent_kernel.cols)
        )
    if not 1 <= index <= n:
        raise DegenerateInput("index %d outside 1..%d" % (index, n))
    _assert_counting_bound(n, index)
    size = n + 1 - index
    observers = []
    for subset in combinations(range(n), size):
        stack = output_map.take_rows(subset).vstack(latent_kernel)
        try:
            inverse = left_inverse(stack)
        except NoLeftInverse as exc:
            raise InconsistentIndex(
                "sensors %s admit no exact observer; declared index %d "
                "is too high" % (tuple(i + 1 for i in subset), index)
            ) from exc
        observers.append(
            (tuple(i + 1 for i in subset), inverse.take_columns(range(size)))
        )
    latency = max(p.max_degree() for _, p in observers)
    return ObserverBank(
        kind=GENERAL,
        n_sensors=n,
        observers=tuple(observers),
        latency=latency,
        regen_latency=latency + output_map.max_degree(),
        mode=output_map.mode,
        latent_kernel=latent_kernel,
    )


def _sequences_close(a, b, tolerance):
    if tolerance is None:
        return a == b
    return all(abs(x - y) <= tolerance for x, y in zip(a, b))


def _is_self_consistent(estimate, picked, latent_kernel, subset_map, tolerance):
    """An estimate counts only if it explains the data it was read from:
    it must satisfy the latent kernel and reproduce the subset's rows."""
    membership = apply_poly_matrix(latent_kernel, estimate)
    zero = (0,) * membership.horizon
    for comp in membership.components:
        if not _sequences_close(comp, zero, tolerance):
            return False
    replay = apply_poly_matrix(subset_map, estimate)
    for comp, original in zip(replay.components, picked.components):
        if not _sequences_close(comp, original[: replay.horizon], tolerance):
            return False
    return True


def correct_general(bank, output_map, received, eps_sig=DEFAULT_EPS_SIG):
    """Majority vote over subset observers for the latent signal, then
    push the winner back through the output map.

    Estimates that fail to explain their own subset's data are excluded
    before the vote.  A corrupted subset can produce the same wrong
    estimate as many others (every subset sharing a cheap sensor reads it
    identically), so output agreement alone can tie or outvote the clean
    subsets; self-consistency restores the count argument that makes the
    clean class the strict winner whenever 2 * attack weight < index.
    """
    if bank.kind != GENERAL:
        raise DegenerateInput("bank kind %r is not general" % bank.kind)
    if received.n_components != bank.n_sensors:
        raise ShapeError(
            "bank expects %d sensors, received %d"
            % (bank.n_sensors, received.n_components)
        )
    if received.mode != bank.mode:
        raise DegenerateInput("bank and signal modes differ")
    vote_horizon = received.horizon - bank.latency
    out_horizon = received.horizon - bank.regen_latency
    checks_degree = max(
        bank.latent_kernel.max_degree(), output_map.max_degree()
    )
    if (
        out_horizon < 1
        or bank.regen_latency > out_horizon
        or bank.latency >= vote_horizon
        or checks_degree >= vote_horizon
    ):
        raise HorizonTooShort(
            "horizon %d cannot cover regeneration latency %d"
            % (received.horizon, bank.regen_latency)
        )
    if received.mode == EXACT:
        tolerance = None
    else:
        tolerance = eps_sig * float(_signal_peak(received)) * max(
            1.0,
            float(output_map.coeff_scale()),
            float(bank.latent_kernel.coeff_scale()),
        )
    candidates = []
    windows = []
    for subset, observer in bank.observers:
        zero_based = [j - 1 for j in subset]
        picked = received.take_components(zero_based)
        estimate = apply_poly_matrix(observer, picked).truncated(vote_horizon)
        if not _is_self_consistent(
            estimate,
            picked,
            bank.latent_kernel,
            output_map.take_rows(zero_based),
            tolerance,
        ):
            continue
        candidates.append(estimate)
        flat = ()
        for comp in estimate.components:
            flat += comp[bank.latency :]
        windows.append(flat)
    if not candidates:
        raise MajorityTie(
            "no self-consistent observer; attack exceeds the correctable "
            "weight",
            tally=(),
        )
    if tolerance is not None:
        tolerance = eps_sig * float(_window_scale(windows))
    winner_idx, tally = _vote_indexed(windows, tolerance)
    latent = candidates[winner_idx].with_valid_from(bank.latency)
    corrected = apply_poly_matrix(output_map, latent).with_valid_from(
        bank.regen_latency
    )
    return CorrectionResult(
        corrected=corrected,
        latent=latent,
        winning_tally=tally,
        valid_from=bank.regen_latency,
    )
