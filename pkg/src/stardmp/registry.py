"""Theorem ids, their checkers, and the JSON shape of their instances."""

from __future__ import annotations

from typing import Callable, Union

from .additive import (
    TheoremVerdict,
    cor24_verify,
    cor34_verify,
    lemma21_verify,
    lemma22_check,
    lemma31_verify,
    thm23_verify,
    thm32_verify,
    thm33_verify,
)
from .blockmat import (
    BlockMatrix,
    cor43_check,
    cor45_check,
    cor47_check,
    lemma41_check,
    thm42_check,
    thm44_check,
    thm46_check,
)
from .matcore import DEFAULT_TOL, CMatrix, MatrixFormatError, Tolerance, from_json, to_json

Instance = Union[tuple, BlockMatrix]

THEOREM_IDS = (
    "L2.1", "L2.2", "T2.3", "C2.4", "L3.1", "T3.2", "T3.3", "C3.4",
    "L4.1", "T4.2", "C4.3", "T4.4", "C4.5", "T4.6", "C4.7",
)

_CHECKS: dict[str, Callable[..., TheoremVerdict]] = {
    "L2.1": lemma21_verify,
    "L2.2": lemma22_check,
    "T2.3": thm23_verify,
    "C2.4": cor24_verify,
    "L3.1": lemma31_verify,
    "T3.2": thm32_verify,
    "T3.3": thm33_verify,
    "C3.4": cor34_verify,
    "L4.1": lemma41_check,
    "T4.2": thm42_check,
    "C4.3": cor43_check,
    "T4.4": thm44_check,
    "C4.5": cor45_check,
    "T4.6": thm46_check,
    "C4.7": cor47_check,
}

# JSON keys of each instance kind, in argument order.
_KEYS = {"pair": ("a", "b"), "triple": ("a", "b", "d"), "offdiag": ("B", "C"), "block": ("A", "B", "C", "D")}


def instance_kind(theorem_id: str) -> str:
    if theorem_id == "L2.2":
        return "triple"
    if theorem_id == "L4.1":
        return "offdiag"
    if theorem_id.startswith(("T4", "C4")):
        return "block"
    return "pair"


def check(theorem_id: str, instance: Instance, tol: Tolerance = DEFAULT_TOL) -> TheoremVerdict:
    if theorem_id not in _CHECKS:
        raise KeyError(f"unknown theorem id {theorem_id!r}")
    fn = _CHECKS[theorem_id]
    if isinstance(instance, BlockMatrix):
        return fn(instance, tol)
    return fn(*instance, tol)


def instance_to_json(theorem_id: str, instance: Instance) -> dict:
    if isinstance(instance, BlockMatrix):
        return instance.to_json()
    return {k: to_json(x) for k, x in zip(_KEYS[instance_kind(theorem_id)], instance)}


def instance_from_json(theorem_id: str, obj) -> Instance:
    if not isinstance(obj, dict):
        raise MatrixFormatError("instance must be a JSON object")
    kind = instance_kind(theorem_id)
    keys = _KEYS[kind]
    missing = [k for k in keys if k not in obj]
    if missing:
        raise MatrixFormatError(f"{theorem_id} instance needs keys {list(keys)}, missing {missing}")
    mats: list[CMatrix] = [from_json(obj[k]) for k in keys]
    if kind == "block":
        return BlockMatrix(*mats)
    return tuple(mats)
