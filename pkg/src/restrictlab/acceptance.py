"""The nine acceptance criteria as experiment configurations with runtime budgets."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .experiments import ExperimentConfig, ExperimentReport, run_experiment

ACCEPT_SEED = 0


@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    configs: tuple
    budget: float            # seconds allowed per configuration


@dataclass
class CriterionResult:
    criterion: Criterion
    reports: list = field(default_factory=list)

    @property
    def within_budget(self) -> bool:
        return all(r.wall_time <= self.criterion.budget for r in self.reports)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports) and self.within_budget

    def line(self, with_time: bool = True) -> str:
        parts = []
        for r in self.reports:
            a = r.aggregate
            tag = r.config["params"].get("hurst", r.config["params"].get("delta"))
            label = r.experiment_id if tag is None or r.experiment_id not in (
                "FBM_RECORD_DIM", "GAP_BOUND") else f"{r.experiment_id}[{tag:g}]"
            t = f" t={r.wall_time:.1f}s" if with_time else ""
            parts.append(f"{label} {r.verdict} mean={a['mean']:.4g} pass_fraction={a['pass_fraction']:.3f}{t}")
        budget = "" if self.within_budget else f" (over the {self.criterion.budget:g}s budget)"
        status = "PASS" if self.passed else "FAIL"
        return f"{status} [{self.criterion.number}] {self.criterion.title}: " + "; ".join(parts) + budget


def _cfg(eid, seed=ACCEPT_SEED, **params):
    return ExperimentConfig(eid, params, seed)


CRITERIA = (
    Criterion(1, "fBm record-set dimension within H ± 0.1",
              tuple(_cfg("FBM_RECORD_DIM", hurst=h) for h in (0.3, 0.5, 0.7)), 120.0),
    Criterion(2, "gap bound 4·sqrt(delta/xi), zero violations",
              tuple(_cfg("GAP_BOUND", delta=d) for d in (1e-2, 1e-3, 1e-4)), 30.0),
    Criterion(3, "integrated-fBm contact-set dimension ≥ 0.45",
              (_cfg("INTEGRATED_FBM_CONTACT_DIM"),), 120.0),
    Criterion(4, "convex-to-monotone transfer N(A) ≤ 3·N(B), zero violations",
              (_cfg("LEMMA_AB_TRANSFER"),), 120.0),
    Criterion(5, "monotone sawtooth: ≤ 3 cells per period",
              (_cfg("SAWTOOTH_MONOTONE_COVER"),), 60.0),
    Criterion(6, "convexity sawtooth: < 7 cells per period",
              (_cfg("SAWTOOTH_CONVEX_COVER"),), 120.0),
    Criterion(7, "divided-difference recursion vs symmetric form",
              (_cfg("DD_ORACLE"),), 120.0),
    Criterion(8, "Cantor calibration: exact counts, log2/log3 ± 0.02, bases agree",
              (_cfg("CANTOR_CALIBRATION"),), 120.0),
    Criterion(9, "Erdős–Szekeres: max(LIS, LDS) ≥ 32, brute-force agreement",
              (_cfg("ERDOS_SZEKERES"),), 120.0),
)


def run_criterion(c: Criterion, out_dir=None, workers: int = 1) -> CriterionResult:
    res = CriterionResult(c)
    for cfg in c.configs:
        cfg = ExperimentConfig(cfg.experiment_id, dict(cfg.params), cfg.seed, out_dir)
        if out_dir is not None and len(c.configs) > 1:
            tag = cfg.params.get("hurst", cfg.params.get("delta"))
            cfg.out_dir = str(Path(out_dir) / f"criterion{c.number}_{tag:g}")
        res.reports.append(run_experiment(cfg, workers=workers, write=out_dir is not None))
    return res


def run_acceptance(out_dir=None, workers: int = 1, on_result=None) -> list:
    """Run every criterion; ``summary.txt`` goes to ``out_dir`` when given."""
    results = []
    for c in CRITERIA:
        r = run_criterion(c, out_dir, workers)
        results.append(r)
        if on_result is not None:
            on_result(r)
    if out_dir is not None:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        (Path(out_dir) / "summary.txt").write_text("".join(r.line(with_time=False) + "\n" for r in results))
    return results


__all__ = ["CRITERIA", "Criterion", "CriterionResult", "ExperimentReport", "run_acceptance", "run_criterion"]
