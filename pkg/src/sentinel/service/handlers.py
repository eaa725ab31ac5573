"""Transport-free request handlers.

Both the HTTP routes and the command line call these with plain dicts
and CSV text, so the two front ends cannot drift apart.  Domain errors
propagate to the caller, which owns the mapping to status codes.
"""

from __future__ import annotations

from ..engine import MAXIMALLY_SECURE, detect
from ..errors import DegenerateInput
from ..signals import DEFAULT_EPS_SIG, signal_from_csv, signal_to_csv
from ..sim import (
    correct_received,
    run_files,
    run_scenario,
    scenario_from_dict,
    system_spec_from_dict,
)


def checked_eps(eps_sig):
    if eps_sig is None:
        return DEFAULT_EPS_SIG
    eps = float(eps_sig)
    if not eps > 0:
        raise DegenerateInput("eps_sig must be positive")
    return eps


def compute_index(system_doc):
    """Security report of the described system."""
    return system_spec_from_dict(system_doc).security_report().as_dict()


def observer_bank_doc(bank):
    doc = {
        "kind": bank.kind,
        "latency": bank.latency,
        "regen_latency": bank.regen_latency,
    }
    if bank.kind == MAXIMALLY_SECURE:
        doc["scalar_observers"] = [
            {
                "sensor": j + 1,
                "filter": str(p),
                "channel": str(c),
                "cofactor": str(q),
            }
            for j, ((p, c), q) in enumerate(zip(bank.observers, bank.cofactors))
        ]
    else:
        doc["subset_observers"] = [
            {"subset": list(subset), "rows": matrix.to_strings()}
            for subset, matrix in bank.observers
        ]
        doc["latent_kernel"] = bank.latent_kernel.to_strings()
    return doc


def compute_canonical(system_doc):
    """Canonical kernel form plus the observer bank it induces."""
    spec = system_spec_from_dict(system_doc)
    form = spec.canonical_form()
    return {
        "canonical": form.canonical.to_strings(),
        "transform": form.transform.to_strings(),
        "block_size": form.block_size,
        "security": spec.security_report().as_dict(),
        "observers": observer_bank_doc(spec.observer_bank()),
    }


def run_detection(system_doc, signals_csv, eps_sig=None):
    spec = system_spec_from_dict(system_doc)
    received = signal_from_csv(signals_csv, spec.mode)
    verdict = detect(spec.kernel_matrix(), received, checked_eps(eps_sig))
    out = verdict.as_dict()
    out["residual_csv"] = signal_to_csv(verdict.residual)
    return out


def run_correction(system_doc, signals_csv, eps_sig=None):
    spec = system_spec_from_dict(system_doc)
    received = signal_from_csv(signals_csv, spec.mode)
    correction, _ = correct_received(spec, received, checked_eps(eps_sig))
    out = correction.as_dict()
    out["kind"] = spec.observer_bank().kind
    out["corrected_csv"] = signal_to_csv(correction.corrected)
    return out


def run_simulation(scenario_doc, seed_override=None):
    """Full scenario run returning the result record and its file set."""
    if isinstance(scenario_doc, dict) and isinstance(scenario_doc.get("system"), str):
        # no filesystem reads on behalf of remote callers
        raise DegenerateInput("scenario must carry the system inline")
    spec, scenario, initial, correct = scenario_from_dict(
        scenario_doc, seed_override=seed_override
    )
    result = run_scenario(spec, scenario, initial, correct)
    return {"result": result.as_dict(), "files": run_files(result)}
