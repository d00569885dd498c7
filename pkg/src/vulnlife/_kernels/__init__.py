"""Numeric kernel backend selection.

The compiled extension (`vulnlife._kernels._core`) is preferred; the NumPy
reference (`vulnlife._kernels.pure`) is used when the extension is missing
or when ``VULNLIFE_PURE_KERNELS`` is set in the environment. Both expose the
same functions; ``benchmarks/bench_kernels.py`` compares them.
"""

from __future__ import annotations

import os

if os.environ.get("VULNLIFE_PURE_KERNELS"):
    from vulnlife._kernels import pure as backend
else:
    try:
        from vulnlife._kernels import _core as backend  # type: ignore[attr-defined]
    except ImportError:  # pragma: no cover - depends on the build
        from vulnlife._kernels import pure as backend

EXPONENTIAL = 0
WEIBULL = 1
GAMMA = 2
LOGNORMAL = 3

km_curve = backend.km_curve
fit_exponential = backend.fit_exponential
fit_lognormal = backend.fit_lognormal
fit_gamma = backend.fit_gamma
fit_weibull = backend.fit_weibull
ad_statistic = backend.ad_statistic
ad_bootstrap = backend.ad_bootstrap


def backend_name() -> str:
    """'compiled' when the extension is active, else 'pure'."""
    return "compiled" if backend.__name__.endswith("_core") else "pure"
