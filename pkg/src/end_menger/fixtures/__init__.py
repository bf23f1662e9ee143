"""Normative fixture instances shipped with the package."""
from importlib import resources

from ..instance import parse_instance

NAMES = ("ladder", "single", "chord", "domcore", "twoend", "feedback")


def path(name: str):
    return resources.files(__name__).joinpath(f"{name}.red")


def text(name: str) -> str:
    return path(name).read_text(encoding="utf-8")


def load(name: str):
    return parse_instance(text(name))
