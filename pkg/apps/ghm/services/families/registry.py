# apps/ghm/services/families/registry.py
from __future__ import annotations

from typing import Callable, Dict, Mapping, Tuple

from apps.ghm.services.errors import MissingParameter
from apps.ghm.services.families.askey import AskeyFamily
from apps.ghm.services.families.base import Family
from apps.ghm.services.families.gmuntz import GenMuntzFamily
from apps.ghm.services.families.lommel import LommelFamily
from apps.ghm.services.families.muntz import MuntzFamily
from apps.ghm.services.families.synthetic import SyntheticFamily

# family -> (required parameters, optional parameters, factory)
FAMILIES: Dict[str, Tuple[Tuple[str, ...], Tuple[str, ...], Callable[..., Family]]] = {
    "muntz": (("alphas",), (), lambda p: MuntzFamily(p["alphas"])),
    "gmuntz": (("a", "b", "c", "alphas"), (), lambda p: GenMuntzFamily(p["a"], p["b"], p["c"], p["alphas"])),
    "lommel": (("q", "V"), (), lambda p: LommelFamily(p["q"], p["V"])),
    "askey": (("alpha", "beta", "q"), (), lambda p: AskeyFamily(p["alpha"], p["beta"], p["q"])),
    "synthetic": (("alphas",), ("connection",), lambda p: SyntheticFamily(p["alphas"], p.get("connection"))),
}

FAMILY_CLASSES: Dict[str, type] = {
    "muntz": MuntzFamily,
    "gmuntz": GenMuntzFamily,
    "lommel": LommelFamily,
    "askey": AskeyFamily,
    "synthetic": SyntheticFamily,
}

FAMILY_NAMES = tuple(FAMILIES)


def required_params(family: str) -> Tuple[str, ...]:
    return FAMILIES[family][0]


def allowed_params(family: str) -> Tuple[str, ...]:
    required, optional, _ = FAMILIES[family]
    return required + optional


def is_hermitian(family: str) -> bool:
    return FAMILY_CLASSES[family].hermitian


def make_family(family: str, params: Mapping[str, object]) -> Family:
    """Instantiate a family; ParameterError propagates from the parameter types."""
    required, _, factory = FAMILIES[family]
    missing = [name for name in required if params.get(name) is None]
    if missing:
        raise MissingParameter(f"{family} needs --{', --'.join(missing)}")
    return factory(params)
