"""Security index: how many sensors an attack needs to stay invisible.

The index of a system is the weight of the lightest nonzero trajectory the
system itself can produce.  An additive sensor attack that touches fewer
sensors can never equal a valid trajectory, so it always leaves a nonzero
residual; at the index and beyond there is a support on which an attack
can hide.  Two equivalent characterizations are implemented: via column
subsets of a square kernel matrix, and via row subsets of a latent
variable representation (M, D).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from itertools import combinations

from .errors import NotObservable, ShapeError, SingularKernel, ZeroBehavior
from .polyalg import is_left_unimodular
from .polyalg.matrix import _diagonal_is_unit, _reduce


@dataclass(frozen=True)
class SecurityReport:
    """Attack-resilience thresholds of one system.

    Attacks of weight at most ``detectable_weight_max`` always trip the
    residual test; weights at most ``correctable_weight_max`` can also be
    corrected by majority vote.  ``witness_subset`` is a 1-based sensor
    set of size ``index`` able to host an undetectable attack.
    """

    index: int
    n_sensors: int
    level: int
    maximally_secure: bool
    detectable_weight_max: int
    correctable_weight_max: int
    witness_subset: tuple

    @classmethod
    def from_level(cls, n, level, witness):
        """Build from the largest all-subsets-invertible cardinality."""
        index = level + 1
        return cls(
            index=index,
            n_sensors=n,
            level=level,
            maximally_secure=index == n,
            detectable_weight_max=index - 1,
            correctable_weight_max=(index - 1) // 2,
            witness_subset=tuple(witness),
        )

    def as_dict(self):
        out = asdict(self)
        out["witness_subset"] = list(self.witness_subset)
        return out


def _first_failing_columns(matrix, size):
    """Lex-first column subset (1-based) of the given size that has no
    polynomial left inverse, or None when they all do."""
    if size == 0:
        return None
    for subset in combinations(range(matrix.cols), size):
        if not is_left_unimodular(matrix.take_columns(subset)):
            return tuple(j + 1 for j in subset)
    return None


def _check_square_kernel(r):
    n = r.rows
    if r.cols != n:
        raise ShapeError("kernel matrix must be square")
    probe = _reduce(r)
    if any(probe.is_zero(probe.m[k][k]) for k in range(n)):
        raise SingularKernel("kernel matrix has zero determinant")
    if all(_diagonal_is_unit(probe, k) for k in range(n)):
        raise ZeroBehavior(
            "kernel matrix is unimodular; the only trajectory is zero"
        )


def security_index_kernel(r):
    """Security index from a square kernel matrix.

    Scans subset cardinalities downward: the index is one more than the
    largest size at which every column subset is left unimodular.  Cost is
    combinatorial in N; intended for desk-scale systems (N <= 12).
    """
    _check_square_kernel(r)
    n = r.rows
    witness = tuple(range(1, n + 1))
    for size in range(n - 1, 0, -1):
        failing = _first_failing_columns(r, size)
        if failing is None:
            return SecurityReport.from_level(n, size, witness)
        witness = failing
    return SecurityReport.from_level(n, 0, witness)


def security_index_md(output_map, latent_kernel):
    """Security index from a latent-variable pair (M, D).

    M maps the latent driver to the N outputs and D annihilates the
    driver.  The index is N + 1 minus the smallest row-subset size at
    which every stack [M_rows; D] is left unimodular; the witness is the
    complement of the first failing subset one size below.
    """
    n, m = output_map.rows, output_map.cols
    if latent_kernel.rows != latent_kernel.cols or latent_kernel.cols != m:
        raise ShapeError("latent annihilator must be square and match the map width")
    probe = _reduce(latent_kernel)
    if any(probe.is_zero(probe.m[k][k]) for k in range(m)):
        raise SingularKernel("latent annihilator has zero determinant")
    if not is_left_unimodular(output_map.vstack(latent_kernel)):
        raise NotObservable(
            "stacked output map and annihilator has no left inverse"
        )
    if all(_diagonal_is_unit(probe, k) for k in range(m)):
        raise ZeroBehavior(
            "latent annihilator is unimodular; the only trajectory is zero"
        )
    witness = tuple(range(1, n + 1))
    for size in range(1, n + 1):
        failing = None
        for subset in combinations(range(n), size):
            stack = output_map.take_rows(subset).vstack(latent_kernel)
            if not is_left_unimodular(stack):
                failing = subset
                break
        if failing is None:
            return SecurityReport.from_level(n, n - size, witness)
        excluded = set(failing)
        witness = tuple(i + 1 for i in range(n) if i not in excluded)
    raise NotObservable("stacked output map and annihilator has no left inverse")


def is_maximally_secure(r):
    """Whether every column subset of size N-1 is left unimodular."""
    _check_square_kernel(r)
    return _first_failing_columns(r, r.rows - 1) is None
