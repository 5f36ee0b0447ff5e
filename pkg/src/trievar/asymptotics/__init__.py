"""Closed-form asymptotic expansions of trie statistics and their Fourier series."""
from .core import (
    DEFAULT_DIGITS,
    DEFAULT_K,
    AsymptoticExpansion,
    FourierSeries,
    TruncationError,
    evaluate,
    evaluate_fluctuation,
)
from .ipl import ipl_covariance_expansion, ipl_expansion, ipl_mean_expansion
from .mean import mean_expansion
from .poisson import depoissonize, tau
from .variance import (
    epl_variance_series,
    leader_variance_expansion,
    multiaccess_variance_series,
    patricia_epl_series,
    patricia_variance_constant_alt,
    peripheral_variance_constant,
    peripheral_variance_constant_alt,
    peripheral_variance_series,
    radix_variance_constant,
    radix_variance_series,
    size_variance_series,
)

__all__ = [
    "AsymptoticExpansion",
    "FourierSeries",
    "TruncationError",
    "DEFAULT_DIGITS",
    "DEFAULT_K",
    "evaluate",
    "evaluate_fluctuation",
    "tau",
    "depoissonize",
    "mean_expansion",
    "size_variance_series",
    "epl_variance_series",
    "radix_variance_constant",
    "radix_variance_series",
    "peripheral_variance_constant",
    "peripheral_variance_constant_alt",
    "peripheral_variance_series",
    "leader_variance_expansion",
    "multiaccess_variance_series",
    "ipl_expansion",
    "ipl_covariance_expansion",
    "ipl_mean_expansion",
    "patricia_epl_series",
    "patricia_variance_constant_alt",
    "variance_expansion",
]


def variance_expansion(statistic, model=None, prec=None, K: int = DEFAULT_K, J=None) -> AsymptoticExpansion:
    """Dispatch to the variance expansion of a statistic."""
    from ..model import StatKind, StatisticSpec, symmetric_model

    stat = statistic if isinstance(statistic, StatisticSpec) else StatisticSpec.of(statistic)
    kind = stat.kind
    if kind is StatKind.RADIX:
        return radix_variance_series(stat.b, prec, K, J)
    model = model or symmetric_model(2)
    stat.check_model(model)
    if kind is StatKind.SIZE:
        return size_variance_series(model, prec, K, J)
    if kind is StatKind.EPL:
        return epl_variance_series(model, prec, K, J)
    if kind is StatKind.PERIPHERAL:
        return peripheral_variance_series(prec, K, J, model=model)
    if kind is StatKind.LEADER:
        return leader_variance_expansion(prec, K)
    if kind is StatKind.MULTIACCESS:
        return multiaccess_variance_series(model, prec, K, J)
    if kind is StatKind.IPL:
        return ipl_expansion(prec, K, J, model=model)
    return patricia_epl_series(model, prec, K, J)
