"""Optimizer settings shared by the gamma and correlation searches."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .linalg import SeededRng


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    max_iters: int = 500
    step_tol: float = 1e-9
    value_tol: float = 1e-7
    agreement_tol: float = 1e-4
    seed: int = 42

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError(f"restarts must be at least 1, got {self.restarts}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be at least 1, got {self.max_iters}")

    @property
    def rng(self) -> SeededRng:
        return SeededRng(self.seed)

    def with_(self, **changes) -> "OptimizerConfig":
        return replace(self, **changes)
