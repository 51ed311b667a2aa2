"""Shared result assembly: estimator configuration, reports, assumption
checks against known spectra, and relative error."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .densmat import SparseSymMatrix, SpectralModel
from .power import (
    U_MODES,
    PowerEstimate,
    default_power_params,
    power_method,
    u_from_p1,
)
from .rng import RngStream

RANK_CLAMP = 1e-12


@dataclass(frozen=True)
class EstimatorConfig:
    """Parameters for the polynomial estimators.

    ``ell`` is a caller-supplied lower bound on the spectrum (the
    estimators never try to infer it); it may be omitted only when ``m``
    is overridden.  ``nte`` replaces the stochastic trace estimate with
    the exact truncated series from known eigenvalues, isolating the
    truncation error; in that mode ``s_override=0`` is allowed.
    """

    epsilon: float = 0.1
    delta: float = 0.1
    ell: float | None = None
    u_mode: str = "six"
    u_value: float | None = None
    m_override: int | None = None
    s_override: int | None = None
    nte: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.ell is not None and not 0.0 < self.ell <= 1.0:
            raise ValueError(f"ell must lie in (0, 1], got {self.ell}")
        if self.u_mode not in U_MODES:
            raise ValueError(f"u_mode must be one of {U_MODES}, got {self.u_mode!r}")
        if self.u_mode == "manual" and (
            self.u_value is None or not 0.0 < self.u_value <= 1.0
        ):
            raise ValueError(f"manual u must lie in (0, 1], got {self.u_value}")
        if self.m_override is not None and self.m_override < 1:
            raise ValueError("m override must be at least 1")
        if self.s_override is not None:
            if self.s_override < 0 or (self.s_override == 0 and not self.nte):
                raise ValueError("s override must be >= 1 (0 is allowed only with nte)")
        if self.m_override is None and self.ell is None:
            raise ValueError("ell is required unless m is overridden")


@dataclass(frozen=True)
class AssumptionCheck:
    """Tri-state checks of the estimators' spectrum assumptions.

    Each field is True/False when a ground-truth spectrum was available
    for the comparison and None (unknown) otherwise.
    """

    u_ge_p1: bool | None = None
    ell_le_pmin: bool | None = None
    rank_le_k: bool | None = None

    def warnings(self) -> list[str]:
        out = []
        if self.u_ge_p1 is False:
            out.append("assumption violated: u is below the top probability p1")
        if self.ell_le_pmin is False:
            out.append("assumption violated: ell exceeds the smallest probability")
        if self.rank_le_k is False:
            out.append("assumption violated: matrix rank exceeds the supplied k")
        return out


def check_assumptions(
    model: SpectralModel | None,
    u: float | None = None,
    ell: float | None = None,
    k: int | None = None,
) -> AssumptionCheck:
    """Compare estimator parameters against a known spectrum when present."""
    if model is None or model.probs is None:
        return AssumptionCheck()
    probs = np.asarray(model.probs)
    u_ok = None if u is None else bool(u >= probs[0])
    ell_ok = None if ell is None else bool(ell <= probs[-1])
    rank_ok = None if k is None else bool(int(np.sum(probs > RANK_CLAMP)) <= k)
    return AssumptionCheck(u_ge_p1=u_ok, ell_le_pmin=ell_ok, rank_le_k=rank_ok)


def relative_error(estimate: float, exact: float) -> float:
    """|estimate - exact| / exact for exact > 0.

    Zero exact entropy means a pure state; report absolute error instead
    (see the CLI flag) rather than dividing by zero.
    """
    if exact <= 0.0:
        raise ValueError(f"relative error needs exact > 0, got {exact}")
    return abs(estimate - exact) / exact


@dataclass
class EstimateReport:
    """Output envelope of one estimator run."""

    estimate: float
    method: str
    m_used: int
    s_used: int
    u_used: float
    wall_ms: float
    seed: int
    exact: float | None = None
    rel_err: float | None = None
    assumptions: AssumptionCheck = field(default_factory=AssumptionCheck)
    warnings: tuple[str, ...] = ()


def resolve_u(
    R: SparseSymMatrix, cfg: EstimatorConfig, stream: RngStream
) -> tuple[float, PowerEstimate | None]:
    """Upper bound u per the config's mode (power-method backed unless manual)."""
    if cfg.u_mode == "manual":
        return float(cfg.u_value), None
    t, q = default_power_params(R.n, cfg.delta)
    pe = power_method(R, t, q, stream)
    return u_from_p1(pe.p1_tilde, cfg.u_mode), pe


def assemble_report(
    estimate: float,
    method: str,
    m_used: int,
    s_used: int,
    u_used: float,
    wall_ms: float,
    cfg: EstimatorConfig,
    model: SpectralModel | None,
    extra_warnings: tuple[str, ...] = (),
) -> EstimateReport:
    """Fill in exact value, relative error, and assumption flags."""
    from .linalg import ENTROPY_CLAMP, entropy_from_probs

    assumptions = check_assumptions(model, u=u_used, ell=cfg.ell)
    warnings = list(extra_warnings)
    if cfg.u_mode == "raw":
        warnings.append("u_mode 'raw' is heuristic: u >= p1 is not guaranteed")
    warnings.extend(assumptions.warnings())

    exact = rel = None
    if model is not None and model.probs is not None:
        exact = entropy_from_probs(model.probs, ENTROPY_CLAMP)
        if exact > 0.0:
            rel = relative_error(estimate, exact)
        else:
            warnings.append("exact entropy is zero (pure state); rel_err omitted")
    return EstimateReport(
        estimate=estimate,
        method=method,
        m_used=m_used,
        s_used=s_used,
        u_used=u_used,
        wall_ms=wall_ms,
        seed=cfg.seed,
        exact=exact,
        rel_err=rel,
        assumptions=assumptions,
        warnings=tuple(warnings),
    )
