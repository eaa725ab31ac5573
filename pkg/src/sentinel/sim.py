"""Trajectory synthesis, attack injection, and end-to-end scenario runs.

A scenario run stitches the other layers together: simulate a clean
trajectory from a system description, add a synthetic sensor attack,
filter the sum through the kernel matrix for a verdict, and optionally
vote a correction.  Everything downstream of the seed is deterministic,
so a scenario file is a complete, replayable experiment record.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from random import Random

import numpy as np
from scipy.linalg import expm

from .engine import (
    MAXIMALLY_SECURE,
    build_observers_general,
    build_observers_ms,
    correct_general,
    correct_ms,
    detect,
)
from .errors import DegenerateInput, ShapeError
from .polyalg import PolyMatrix, kronecker_hermite
from .polyalg.canonical import kernel_from_md
from .polyalg.poly import EXACT, TOLERANT, Polynomial, _coerce
from .security import security_index_kernel, security_index_md
from .signals import (
    DEFAULT_EPS_SIG,
    SignalVector,
    apply_poly,
    apply_poly_matrix,
    signal_to_csv,
)

# resolution of the uniform attack generator; draws are rationals with
# this denominator so exact and tolerant runs see the same sequence
_UNIFORM_STEPS = 10**9


class SystemSpec:
    """One system, in whichever representation the source provides.

    Exactly one of ``kernel``, ``state_space``, ``md``, ``continuous``
    may be given.  ``state_space`` is the square update matrix A of
    y(t+1) = A y(t) with every state measured; ``continuous`` is a pair
    (matrix, t_s) sampled through the matrix exponential, which forces
    tolerant mode.  The kernel matrix, security report, canonical
    factorization, and observer bank are derived on first use and cached.
    """

    def __init__(
        self,
        kernel=None,
        state_space=None,
        md=None,
        continuous=None,
        mode=EXACT,
        eps_zero=None,
    ):
        given = [
            name
            for name, value in (
                ("kernel", kernel),
                ("state_space", state_space),
                ("md", md),
                ("continuous", continuous),
            )
            if value is not None
        ]
        if len(given) != 1:
            raise DegenerateInput(
                "need exactly one system representation, got %s"
                % (", ".join(given) or "none")
            )
        if continuous is not None:
            matrix, t_s = continuous
            rows = [[float(v) for v in row] for row in matrix]
            if any(len(row) != len(rows) for row in rows):
                raise ShapeError("continuous-time matrix must be square")
            if not float(t_s) > 0:
                raise DegenerateInput("sampling period must be positive")
            continuous = (rows, float(t_s))
            mode = TOLERANT
        if state_space is not None:
            state_space = [[_coerce(v, mode) for v in row] for row in state_space]
            if any(len(row) != len(state_space) for row in state_space):
                raise ShapeError("state update matrix must be square")
        if kernel is not None:
            if kernel.rows != kernel.cols:
                raise ShapeError("kernel matrix must be square")
            if kernel.mode != mode:
                raise DegenerateInput("kernel mode does not match declared mode")
        if md is not None:
            output_map, latent_kernel = md
            if latent_kernel.rows != latent_kernel.cols:
                raise ShapeError("latent annihilator must be square")
            if latent_kernel.cols != output_map.cols:
                raise ShapeError("output map width must match the annihilator")
            if output_map.mode != mode or latent_kernel.mode != mode:
                raise DegenerateInput("factor modes do not match declared mode")
            md = (output_map, latent_kernel)
        self.kernel = kernel
        self.state_space = state_space
        self.md = md
        self.continuous = continuous
        self.mode = mode
        self.eps_zero = eps_zero
        self._kernel_matrix = None
        self._report = None
        self._form = None
        self._bank = None

    @property
    def n_sensors(self):
        if self.kernel is not None:
            return self.kernel.rows
        if self.state_space is not None:
            return len(self.state_space)
        if self.md is not None:
            return self.md[0].rows
        return len(self.continuous[0])

    def _update_matrix(self):
        if self.state_space is not None:
            return self.state_space
        matrix, t_s = self.continuous
        return exponentiate(matrix, t_s)

    def kernel_matrix(self):
        if self._kernel_matrix is None:
            if self.kernel is not None:
                self._kernel_matrix = self.kernel
            elif self.md is not None:
                self._kernel_matrix = kernel_from_md(*self.md)
            else:
                a = self._update_matrix()
                n = len(a)
                rows = [
                    [
                        Polynomial(
                            [-a[i][j]] + ([1] if i == j else []),
                            self.mode,
                            self.eps_zero,
                        )
                        for j in range(n)
                    ]
                    for i in range(n)
                ]
                self._kernel_matrix = PolyMatrix(rows)
        return self._kernel_matrix

    def security_report(self):
        if self._report is None:
            if self.md is not None:
                self._report = security_index_md(*self.md)
            else:
                self._report = security_index_kernel(self.kernel_matrix())
        return self._report

    def canonical_form(self):
        """Kronecker-Hermite form of the kernel matrix."""
        if self._form is None:
            level = self.security_report().level
            self._form = kronecker_hermite(self.kernel_matrix(), level)
        return self._form

    def factorization(self):
        """Latent pair (M, D) with y = M(s) l and D(s) l = 0."""
        if self.md is not None:
            return self.md
        form = self.canonical_form()
        return form.output_map, form.latent_kernel

    def observer_bank(self):
        """Correction bank matched to the system's security level."""
        if self._bank is None:
            report = self.security_report()
            output_map, latent_kernel = self.factorization()
            if self.md is None and report.maximally_secure:
                self._bank = build_observers_ms(self._form)
            else:
                self._bank = build_observers_general(
                    output_map, latent_kernel, report.index
                )
        return self._bank


@dataclass(frozen=True)
class AttackScenario:
    """Synthetic additive attack on a fixed sensor subset.

    ``generators`` maps a 1-based sensor to how its attack sequence is
    produced: ``{"kind": "iid_uniform", "low": .., "high": ..}`` draws
    i.i.d. samples, ``{"kind": "constant", "value": ..}`` holds a level,
    ``{"kind": "custom", "samples": [..]}`` plays a given sequence.
    Sensors in the support without an entry default to iid_uniform on
    (-1, 1).  Uniform draws are rationals on a fixed grid, so the same
    seed yields the same attack in either coefficient mode.
    """

    support: tuple
    horizon: int
    generators: dict = field(default_factory=dict)
    start_time: int = 0
    seed: int = 0

    def __post_init__(self):
        support = tuple(sorted(set(int(s) for s in self.support)))
        object.__setattr__(self, "support", support)
        if support and support[0] < 1:
            raise DegenerateInput("sensor numbers are 1-based")
        if self.horizon < 1:
            raise DegenerateInput("horizon must be at least 1")
        if not 0 <= self.start_time:
            raise DegenerateInput("start time must be nonnegative")
        unknown = set(self.generators) - set(support)
        if unknown:
            raise DegenerateInput(
                "generators for sensors outside the support: %s"
                % sorted(unknown)
            )

    @property
    def weight(self):
        return len(self.support)

    def _sequence(self, sensor, mode):
        length = max(self.horizon - self.start_time, 0)
        gen = self.generators.get(sensor, {"kind": "iid_uniform", "low": -1, "high": 1})
        kind = gen.get("kind")
        if kind == "iid_uniform":
            low = Fraction(str(gen.get("low", -1)))
            high = Fraction(str(gen.get("high", 1)))
            # distinct stream per sensor, stable across runs and modes
            rng = Random(int(gen.get("seed", self.seed)) * 1_000_003 + sensor)
            values = [
                low + (high - low) * Fraction(rng.randrange(_UNIFORM_STEPS), _UNIFORM_STEPS)
                for _ in range(length)
            ]
        elif kind == "constant":
            values = [Fraction(str(gen["value"]))] * length
        elif kind == "custom":
            samples = gen["samples"]
            if len(samples) < length:
                raise DegenerateInput(
                    "custom attack on sensor %d needs %d samples, got %d"
                    % (sensor, length, len(samples))
                )
            values = list(samples[:length])
        else:
            raise DegenerateInput("unknown attack generator kind %r" % kind)
        return [_coerce(v, mode) for v in values]

    def realize(self, n_sensors, mode=EXACT):
        """The attack signal itself, zero off the support."""
        if self.support and self.support[-1] > n_sensors:
            raise DegenerateInput(
                "support names sensor %d of %d" % (self.support[-1], n_sensors)
            )
        zero = _coerce(0, mode)
        comps = [[zero] * self.horizon for _ in range(n_sensors)]
        for sensor in self.support:
            head = [zero] * min(self.start_time, self.horizon)
            tail = self._sequence(sensor, mode)
            comps[sensor - 1] = head + tail
        return SignalVector(comps, mode)


@dataclass(frozen=True)
class ScenarioResult:
    """Everything one scenario run produced.

    ``error_signal`` is corrected minus clean on the corrected horizon;
    its watermark marks where the correction claims validity.
    ``observer_outputs`` carries the per-sensor estimates of the driving
    channel when the scalar observer bank was used.
    """

    clean: SignalVector
    attack: SignalVector
    received: SignalVector
    verdict: object
    security: object
    correction: object = None
    error_signal: object = None
    observer_outputs: object = None

    @property
    def attack_support(self):
        # generators write exact zeros off the support, so this is sharp
        # even in tolerant mode
        return tuple(
            i + 1
            for i, comp in enumerate(self.attack.components)
            if any(v != 0 for v in comp)
        )

    def max_error_from_valid(self):
        if self.error_signal is None:
            return None
        window = [
            abs(v)
            for comp in self.error_signal.components
            for v in comp[self.error_signal.valid_from :]
        ]
        return float(max(window)) if window else None

    def as_dict(self):
        out = {
            "verdict": self.verdict.as_dict(),
            "security": self.security.as_dict(),
            "attack_support": list(self.attack_support),
            "horizon": self.clean.horizon,
            "correction": None,
        }
        if self.correction is not None:
            out["correction"] = self.correction.as_dict()
            out["max_error_from_valid"] = self.max_error_from_valid()
        return out


def exponentiate(matrix, t_s):
    """Sampled update matrix exp(A t_s) of a continuous-time plant."""
    rows = [[float(v) for v in row] for row in matrix]
    if any(len(row) != len(rows) for row in rows):
        raise ShapeError("matrix must be square")
    if not float(t_s) > 0:
        raise DegenerateInput("sampling period must be positive")
    result = expm(np.array(rows) * float(t_s))
    return [[float(v) for v in row] for row in result]


def _check_recursible(latent_kernel):
    m = latent_kernel.rows
    for i in range(m):
        if latent_kernel[i, i].degree is None:
            raise DegenerateInput("latent annihilator has a zero diagonal entry")
        for j in range(i):
            if latent_kernel[i, j].degree is not None:
                raise DegenerateInput(
                    "latent annihilator must be upper triangular to drive "
                    "the recursion; canonicalize the system first"
                )


def _drive_latent(latent_kernel, initial, length):
    """Run D(s) l = 0 forward from per-component seed samples.

    Component i needs deg D[i,i] seed values.  Later components are
    generated first with extra padding because earlier rows consume them
    at shifted indices.
    """
    m = latent_kernel.rows
    mode = latent_kernel.mode
    pad = latent_kernel.max_degree() + 1
    comps = [None] * m
    for i in range(m - 1, -1, -1):
        diag = latent_kernel[i, i]
        deg = diag.degree
        seed = [_coerce(v, mode) for v in initial[i]]
        if len(seed) != deg:
            raise DegenerateInput(
                "latent component %d needs %d seed samples, got %d"
                % (i + 1, deg, len(seed))
            )
        lead = diag.lead
        target = length + i * pad
        while len(seed) < target:
            t = len(seed) - deg
            total = _coerce(0, mode)
            for j in range(i + 1, m):
                entry = latent_kernel[i, j]
                if entry.degree is None:
                    continue
                for k, c in enumerate(entry.coeffs):
                    if c:
                        total += c * comps[j][t + k]
            for k in range(deg):
                c = diag.coeff(k)
                if c:
                    total += c * seed[t + k]
            seed.append(-total / lead)
        comps[i] = seed
    return [comp[:length] for comp in comps]


def simulate(spec, initial, horizon):
    """Attack-free trajectory of the system over the given horizon.

    For state-space systems ``initial`` is the state vector at time zero.
    Otherwise it seeds the latent driver of the system's factorization:
    one list of samples per latent component, sized by the corresponding
    annihilator diagonal degree (a single flat list is accepted when the
    driver is scalar).
    """
    if horizon < 1:
        raise DegenerateInput("horizon must be at least 1")
    if spec.state_space is not None or spec.continuous is not None:
        a = spec._update_matrix()
        n = len(a)
        if len(initial) != n:
            raise DegenerateInput(
                "initial state needs %d entries, got %d" % (n, len(initial))
            )
        state = [_coerce(v, spec.mode) for v in initial]
        rows = [tuple(state)]
        for _ in range(horizon - 1):
            state = [
                sum(a[i][j] * state[j] for j in range(n)) for i in range(n)
            ]
            rows.append(tuple(state))
        return SignalVector.from_rows(rows, spec.mode)
    output_map, latent_kernel = spec.factorization()
    _check_recursible(latent_kernel)
    if initial and not isinstance(initial[0], (list, tuple)):
        if latent_kernel.rows != 1:
            raise DegenerateInput(
                "flat seed data only fits a scalar latent driver"
            )
        initial = [initial]
    if len(initial) != latent_kernel.rows:
        raise DegenerateInput(
            "latent driver needs %d seed blocks, got %d"
            % (latent_kernel.rows, len(initial))
        )
    # outputs are shift-polynomial images of the driver, so the driver
    # must run past the horizon by the map's degree
    latent = _drive_latent(
        latent_kernel, initial, horizon + output_map.max_degree()
    )
    return apply_poly_matrix(output_map, SignalVector(latent, spec.mode))


def correct_received(spec, received, eps_sig=DEFAULT_EPS_SIG):
    """Vote a correction of one received signal.

    Returns (correction, observer_outputs); the second entry carries the
    per-sensor estimates when the bank is scalar, None otherwise.
    """
    bank = spec.observer_bank()
    if bank.kind == MAXIMALLY_SECURE:
        correction = correct_ms(bank, received, eps_sig)
        estimates = [
            apply_poly(p, received.component(j))[: received.horizon - bank.latency]
            for j, (p, _) in enumerate(bank.observers)
        ]
        estimates.append(
            received.component(bank.n_sensors - 1)[: received.horizon - bank.latency]
        )
        return correction, SignalVector(estimates, spec.mode, bank.latency)
    output_map, _ = spec.factorization()
    return correct_general(bank, output_map, received, eps_sig), None


def run_scenario(spec, scenario, initial, correct=True, eps_sig=DEFAULT_EPS_SIG):
    """Simulate, attack, detect, and (optionally) correct in one pass.

    Engine errors propagate; in particular an attack heavier than the
    correctable weight may surface as MajorityTie.
    """
    clean = simulate(spec, initial, scenario.horizon)
    attack = scenario.realize(clean.n_components, spec.mode)
    received = clean + attack
    verdict = detect(spec.kernel_matrix(), received, eps_sig)
    report = spec.security_report()
    correction = None
    error_signal = None
    observer_outputs = None
    if correct:
        correction, observer_outputs = correct_received(spec, received, eps_sig)
        error_signal = correction.corrected - clean
    return ScenarioResult(
        clean=clean,
        attack=attack,
        received=received,
        verdict=verdict,
        security=report,
        correction=correction,
        error_signal=error_signal,
        observer_outputs=observer_outputs,
    )


def _entry_strings(matrix):
    return matrix.to_strings()


def system_spec_to_dict(spec):
    out = {"mode": spec.mode}
    if spec.eps_zero is not None:
        out["eps_zero"] = spec.eps_zero
    if spec.kernel is not None:
        out["kernel"] = _entry_strings(spec.kernel)
    elif spec.state_space is not None:
        out["state_space"] = [[str(v) for v in row] for row in spec.state_space]
    elif spec.md is not None:
        out["md"] = {
            "output_map": _entry_strings(spec.md[0]),
            "latent_kernel": _entry_strings(spec.md[1]),
        }
    else:
        matrix, t_s = spec.continuous
        out["continuous"] = {"matrix": matrix, "t_s": t_s}
    return out


def system_spec_from_dict(data):
    if not isinstance(data, dict):
        raise DegenerateInput("system description must be a JSON object")
    known = {"mode", "eps_zero", "kernel", "state_space", "md", "continuous"}
    unknown = set(data) - known
    if unknown:
        raise DegenerateInput("unknown system fields: %s" % sorted(unknown))
    mode = data.get("mode", EXACT)
    if mode not in (EXACT, TOLERANT):
        raise DegenerateInput("mode must be exact or tolerant")
    eps_zero = data.get("eps_zero")
    kwargs = {"mode": mode, "eps_zero": eps_zero}
    try:
        if "kernel" in data:
            kwargs["kernel"] = PolyMatrix.from_strings(data["kernel"], mode, eps_zero)
        if "state_space" in data:
            kwargs["state_space"] = data["state_space"]
        if "md" in data:
            block = data["md"]
            if not isinstance(block, dict) or set(block) != {"output_map", "latent_kernel"}:
                raise DegenerateInput(
                    "md must carry exactly output_map and latent_kernel"
                )
            kwargs["md"] = (
                PolyMatrix.from_strings(block["output_map"], mode, eps_zero),
                PolyMatrix.from_strings(block["latent_kernel"], mode, eps_zero),
            )
        if "continuous" in data:
            block = data["continuous"]
            if not isinstance(block, dict) or set(block) != {"matrix", "t_s"}:
                raise DegenerateInput("continuous must carry exactly matrix and t_s")
            kwargs["continuous"] = (block["matrix"], block["t_s"])
        return SystemSpec(**kwargs)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise DegenerateInput("bad system description: %s" % exc) from exc


def load_system(path):
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DegenerateInput("system file is not valid JSON: %s" % exc) from exc
    return system_spec_from_dict(data)


def scenario_from_dict(data, base_dir=None, seed_override=None):
    """Unpack a scenario description into its runnable pieces.

    Returns (spec, scenario, initial, correct).  ``system`` may be inline
    or a path relative to ``base_dir``; ``seed_override`` replaces the
    file's seed wherever a generator does not pin its own.
    """
    if not isinstance(data, dict):
        raise DegenerateInput("scenario must be a JSON object")
    known = {"system", "initial", "attack", "horizon", "seed", "correct"}
    unknown = set(data) - known
    if unknown:
        raise DegenerateInput("unknown scenario fields: %s" % sorted(unknown))
    for field_name in ("system", "initial", "horizon"):
        if field_name not in data:
            raise DegenerateInput("scenario is missing %r" % field_name)
    system = data["system"]
    if isinstance(system, str):
        path = Path(system)
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        spec = load_system(path)
    else:
        spec = system_spec_from_dict(system)
    horizon = int(data["horizon"])
    seed = int(data.get("seed", 0)) if seed_override is None else int(seed_override)
    attack = data.get("attack", {})
    if not isinstance(attack, dict):
        raise DegenerateInput("attack must be a JSON object")
    generators = {
        int(sensor): gen for sensor, gen in attack.get("generators", {}).items()
    }
    try:
        scenario = AttackScenario(
            support=tuple(attack.get("support", ())),
            horizon=horizon,
            generators=generators,
            start_time=int(attack.get("start_time", 0)),
            seed=seed,
        )
    except (ValueError, TypeError) as exc:
        raise DegenerateInput("bad attack description: %s" % exc) from exc
    return spec, scenario, data["initial"], bool(data.get("correct", True))


def load_scenario(path, seed_override=None):
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DegenerateInput("scenario file is not valid JSON: %s" % exc) from exc
    return scenario_from_dict(data, path.parent, seed_override)


def run_files(result):
    """File name to content for one scenario's complete record."""
    files = {
        "clean.csv": signal_to_csv(result.clean),
        "attack.csv": signal_to_csv(result.attack),
        "received.csv": signal_to_csv(result.received),
        "residual.csv": signal_to_csv(result.verdict.residual),
    }
    if result.correction is not None:
        files["corrected.csv"] = signal_to_csv(result.correction.corrected)
        files["error.csv"] = signal_to_csv(result.error_signal)
    if result.observer_outputs is not None:
        files["observers.csv"] = signal_to_csv(result.observer_outputs)
    files["result.json"] = json.dumps(result.as_dict(), indent=2) + "\n"
    return files


def write_run_dir(out_dir, result):
    """Write one scenario's files: the signal CSVs and result.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in run_files(result).items():
        (out / name).write_text(text)
    return out
