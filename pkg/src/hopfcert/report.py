"""Run configuration, the subcommand runners, and deterministic JSON reports.

Reports hold no timings and no floats, and their keys are sorted, so equal
configurations give byte-identical output whatever the worker count.
Timings go to stderr from the CLI.
"""
from __future__ import annotations

import json
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .catalog import CatalogError, classify_klein, make_setup, sylow_subgroup
from .characters import (KINDS, closed_form_character, fibers, induced_character,
                         special_character)
from .groups import (GroupError, build_group, expected_order, normalize_family, parse_prime_power)

__all__ = ["SCHEMA", "ConfigError", "RunConfig", "run", "dumps", "COMMANDS"]

SCHEMA = 1
COMMANDS = ("verify", "classify", "character", "enumerate", "selftest")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    family: Optional[str] = None
    q: Optional[int] = None
    m: Optional[str] = None
    tau: Optional[str] = None
    kind: Optional[str] = None
    bound: Optional[int] = None
    workers: int = 1
    cache_dir: Optional[str] = None
    output: Optional[str] = None
    seed: int = 0
    include_sz32: bool = False
    full: bool = False

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.workers < 1:
            raise ConfigError("--workers must be >= 1")
        if self.command in ("verify", "classify", "character", "enumerate"):
            if self.family is None or self.q is None:
                raise ConfigError(f"{self.command} needs --family and --q")
            try:
                self.family = normalize_family(self.family)
                parse_prime_power(self.q)
            except GroupError as exc:
                raise ConfigError(str(exc)) from None
        if self.command == "verify" and not self.m:
            raise ConfigError("verify needs --m")
        if self.command == "classify" and (self.family != "PSL2" or self.q % 2 == 0):
            raise ConfigError("classify needs --family psl2 and odd q")
        if self.kind is not None and self.kind not in KINDS:
            raise ConfigError(f"--kind must be one of {', '.join(KINDS)}")
        if self.command == "enumerate" and self.bound is not None \
                and self.bound < expected_order(self.family, self.q):
            raise ConfigError("--bound is below the group order")
        return self

    def echo(self) -> dict:
        """The fields that determine the payload."""
        keys = ("command", "family", "q", "m", "tau", "kind", "bound", "seed", "include_sz32", "full")
        return {k: getattr(self, k) for k in keys if getattr(self, k) not in (None, False)}


def _parse_tau(G, text: str) -> int:
    try:
        codes = [int(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"--tau must be comma-separated entry codes, got {text!r}") from None
    if len(codes) != G.dim ** 2 or any(not 0 <= c < G.q for c in codes):
        raise ConfigError(f"--tau needs {G.dim ** 2} codes in [0, {G.q})")
    idx = int(G.lookup(np.array([codes]))[0])
    if idx < 0:
        raise ConfigError("--tau is not an element of the group")
    return idx


def run_verify(cfg: RunConfig) -> dict:
    from .obstruction import certify
    tau = None
    if cfg.tau:
        tau = _parse_tau(build_group(cfg.family, cfg.q, cfg.bound), cfg.tau)
    setup = make_setup(cfg.family, cfg.q, cfg.m, tau=tau, bound=cfg.bound)
    chi = None
    if cfg.kind is not None:
        chi = _character(setup.group, cfg.kind)
        setup.character_kind = cfg.kind
    return certify(setup, chi).to_json()


def run_classify(cfg: RunConfig) -> dict:
    from .structure import e_subspaces
    G = build_group(cfg.family, cfg.q, cfg.bound)
    info = classify_klein(G)
    subspaces = e_subspaces(G.field)
    return {
        "klein": {
            "class_count": info["class_count"],
            "klein_count": info["klein_count"],
            "containing_hbar": info["containing_hbar"],
            "orbit_sizes": info["orbit_sizes"],
            "representatives": [
                {"members": [int(x) for x in R.members],
                 "matrices": [G.matrix(x).to_json()["entries"] for x in R.members]}
                for R in info["representatives"]],
        },
        "p_subgroups": {
            "count": len(subspaces),
            "E": [list(E) for E in subspaces],
        },
    }


def _character(G, kind: str):
    if kind == "induced_sylow":
        return induced_character(G, sylow_subgroup(G))
    return special_character(kind, G)


def run_character(cfg: RunConfig) -> dict:
    G = build_group(cfg.family, cfg.q, cfg.bound)
    kind = cfg.kind or "induced_sylow"
    chi = _character(G, kind)
    out = {
        "group": G.descriptor(),
        "kind": kind,
        "fibers": [{"value": str(v), "size": int(len(ix))} for v, ix in fibers(chi).fibers],
        "sum": chi.total(),
    }
    if kind == "induced_sylow":
        ref = closed_form_character(G)
        out["closed_form_agrees"] = bool(np.array_equal(ref.values, chi.values))
        out["support_is_P"] = bool(np.array_equal(chi.values != 0, G.in_p_mask))
    if cfg.full:
        out["values"] = [str(int(v)) for v in chi.values]
    return out


def run_enumerate(cfg: RunConfig) -> dict:
    from .groups import _cache_path, cache_dir
    G = build_group(cfg.family, cfg.q, cfg.bound)
    orders = Counter(int(o) for o in G.element_orders)
    directory = cache_dir()
    return {
        "group": G.descriptor(),
        "expected_order": expected_order(G.family, G.q),
        "dim": G.dim,
        "identity_index": int(G.identity_index),
        "element_orders": {str(k): v for k, v in sorted(orders.items())},
        "p_elements": int(G.in_p_mask.sum()),
        "sylow_order": sylow_subgroup(G).order,
        "cache_file": None if directory is None else _cache_path(directory, G.family, G.field).name,
    }


def run_selftest(cfg: RunConfig) -> dict:
    from .selftest import DEFAULT_MATRIX, SZ32_CHECK, run_checks
    items = list(DEFAULT_MATRIX)
    if cfg.include_sz32:
        items.append(SZ32_CHECK)
    results = run_checks(items, workers=cfg.workers)
    criteria: dict = {}
    for r in results:
        criteria.setdefault(str(r["criterion"]), []).append(bool(r["pass"]))
    return {
        "checks": results,
        "criteria": {k: "PASS" if all(v) else "FAIL" for k, v in sorted(criteria.items())},
        "all_pass": all(r["pass"] for r in results),
    }


RUNNERS = {"verify": run_verify, "classify": run_classify, "character": run_character,
           "enumerate": run_enumerate, "selftest": run_selftest}


def run(cfg: RunConfig) -> dict:
    cfg.validate()
    if cfg.cache_dir is not None:
        os.environ["HOPFCERT_CACHE_DIR"] = cfg.cache_dir
    payload = RUNNERS[cfg.command](cfg)
    return {
        "schema": SCHEMA,
        "tool": {"name": "hopfcert", "version": __version__},
        "config": cfg.echo(),
        "payload": payload,
    }


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"
