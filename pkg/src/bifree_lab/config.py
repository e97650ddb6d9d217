"""Experiment configuration: YAML in, validated dataclasses out.

The accepted layout is published as ``config.schema.json`` next to this
module.  Structural problems are reported with the offending path
(``families.s.cov``, ``word[2].side``); semantic checks (symmetry, PSD,
unknown symbols) name the field as well.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema
import yaml

from .bnc import LEFT, normalize_side
from .ensemble import EntryLaw
from .limits import Atom, CovarianceError, CovSpec, DiagonalLimit, check_word
from .words import Diag, Var, Word

MODES = ("exact", "cumulants", "simulate", "sweep", "selftest")


class ConfigError(ValueError):
    """Invalid configuration; ``where`` names the offending field or location."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where
        self.message = message


def load_schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("config.schema.json").read_text())


@dataclass
class OutputSpec:
    path: str | None = None
    format: str = "csv"


@dataclass
class CumulantTable:
    order: int
    symbols: dict[str, str] | None = None  # symbol -> side
    moments: dict[tuple[str, ...], float] | None = None


@dataclass
class ExperimentConfig:
    mode: str
    families: dict[str, CovSpec] = field(default_factory=dict)
    word: Word | None = None
    diagonal: DiagonalLimit | None = None
    entry_law: EntryLaw = EntryLaw.RADEMACHER
    Ns: tuple[int, ...] = ()
    n_samples: int = 1000
    base_seed: int = 0
    output: OutputSpec = field(default_factory=OutputSpec)
    cumulants: CumulantTable | None = None

    # -- (de)serialization ---------------------------------------------

    @classmethod
    def from_dict(cls, data: dict, mode: str | None = None) -> "ExperimentConfig":
        data = dict(data or {})
        if mode is not None:
            data["mode"] = mode
        try:
            jsonschema.validate(data, load_schema())
        except jsonschema.ValidationError as err:
            raise ConfigError(_json_path(err.absolute_path), err.message) from None
        if "mode" not in data:
            raise ConfigError("mode", "missing")

        families = {}
        for k, fam in (data.get("families") or {}).items():
            left = [str(i) for i in fam.get("left_indices", [])]
            right = [str(j) for j in fam.get("right_indices", [])]
            try:
                families[k] = CovSpec.from_matrix(left, right, fam["cov"])
            except CovarianceError as err:
                raise ConfigError(f"families.{k}.cov", str(err)) from None

        diagonal = None
        if data.get("diagonal") is not None:
            d = data["diagonal"]
            atoms = tuple(Atom(a["weight"], {str(s): v for s, v in a["values"].items()}) for a in d["atoms"])
            symbols = tuple(str(s) for s in d["atoms"][0]["values"])
            try:
                diagonal = DiagonalLimit(symbols, atoms, d.get("bound"))
            except ValueError as err:
                raise ConfigError("diagonal", str(err)) from None

        word = None
        if data.get("word") is not None:
            letters = []
            for pos, a in enumerate(data["word"]):
                if a["kind"] == "var":
                    letters.append(Var(a["side"], a["family"], str(a["index"])))
                else:
                    letters.append(Diag(a["side"], str(a["symbol"])))
            word = Word(tuple(letters))

        cum = None
        if data.get("cumulants") is not None:
            c = data["cumulants"]
            symbols = {s: normalize_side(v) for s, v in c["symbols"].items()} if "symbols" in c else None
            moments = None
            if "moments" in c:
                moments = {tuple(m["word"]): float(m["value"]) for m in c["moments"]}
            cum = CumulantTable(int(c["order"]), symbols, moments)

        out = data.get("output") or {}
        cfg = cls(
            mode=data["mode"],
            families=families,
            word=word,
            diagonal=diagonal,
            entry_law=EntryLaw(data.get("entry_law", EntryLaw.RADEMACHER.value)),
            Ns=tuple(int(n) for n in data.get("Ns", ())),
            n_samples=int(data.get("n_samples", 1000)),
            base_seed=int(data.get("base_seed", 0)),
            output=OutputSpec(out.get("path"), out.get("format", "csv")),
            cumulants=cum,
        )
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"mode": self.mode}
        if self.families:
            d["families"] = {
                k: {
                    "left_indices": list(C.left),
                    "right_indices": list(C.right),
                    "cov": [v for row in C.cov for v in row],
                }
                for k, C in self.families.items()
            }
        if self.word is not None:
            d["word"] = [_letter_dict(a) for a in self.word]
        if self.diagonal is not None:
            d["diagonal"] = {
                "atoms": [{"weight": a.weight, "values": dict(a.values)} for a in self.diagonal.atoms],
                "bound": dict(self.diagonal.bound),
            }
        d["entry_law"] = self.entry_law.value
        if self.Ns:
            d["Ns"] = list(self.Ns)
        d["n_samples"] = self.n_samples
        d["base_seed"] = self.base_seed
        out = {"format": self.output.format}
        if self.output.path is not None:
            out["path"] = self.output.path
        d["output"] = out
        if self.cumulants is not None:
            c: dict[str, Any] = {"order": self.cumulants.order}
            if self.cumulants.symbols is not None:
                c["symbols"] = {s: ("left" if v == LEFT else "right") for s, v in self.cumulants.symbols.items()}
            if self.cumulants.moments is not None:
                c["moments"] = [{"word": list(w), "value": v} for w, v in self.cumulants.moments.items()]
            d["cumulants"] = c
        return d

    def dump(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)

    # -- semantic checks -----------------------------------------------

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigError("mode", f"unknown mode {self.mode!r}")
        if self.mode in ("exact", "simulate", "sweep"):
            if self.word is None:
                raise ConfigError("word", f"required for mode {self.mode}")
            if not self.families:
                raise ConfigError("families", f"required for mode {self.mode}")
            for pos, a in enumerate(self.word):
                try:
                    check_word(Word((a,)), self.families, self.diagonal)
                except ValueError as err:
                    raise ConfigError(f"word[{pos}]", str(err)) from None
        if self.mode in ("simulate", "sweep"):
            if not self.Ns:
                raise ConfigError("Ns", f"required for mode {self.mode}")
            if any(b <= a for a, b in zip(self.Ns, self.Ns[1:])):
                raise ConfigError("Ns", "must be strictly ascending")
            if self.word.has_diagonals() and self.Ns[0] < len(self.diagonal.atoms):
                raise ConfigError("Ns", "every N must be at least the number of diagonal atoms")
        if self.mode == "cumulants":
            c = self.cumulants
            if c is None:
                raise ConfigError("cumulants", "required for mode cumulants")
            if c.symbols is None:
                if not self.families:
                    raise ConfigError("cumulants.symbols", "give symbols and moments, or declare families")
                if c.moments is not None:
                    raise ConfigError("cumulants.moments", "a moment table needs cumulants.symbols")
            else:
                if c.moments is None:
                    raise ConfigError("cumulants.moments", "required together with cumulants.symbols")
                for i, w in enumerate(c.moments):
                    for s in w:
                        if s not in c.symbols:
                            raise ConfigError(f"cumulants.moments[{i}].word", f"undeclared symbol {s!r}")


def _letter_dict(a) -> dict:
    side = "left" if a.side == LEFT else "right"
    if isinstance(a, Var):
        return {"kind": "var", "side": side, "family": a.family, "index": a.index}
    return {"kind": "diag", "side": side, "symbol": a.symbol}


def _json_path(path) -> str:
    out = ""
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "<root>"


def parse_config_text(text: str, mode: str | None = None, source: str = "<config>") -> ExperimentConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as err:
        mark = err.problem_mark or err.context_mark
        where = f"{source}:{mark.line + 1}:{mark.column + 1}" if mark else source
        raise ConfigError(where, f"parse error: {err.problem or err}") from None
    except yaml.YAMLError as err:
        raise ConfigError(source, f"parse error: {err}") from None
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(source, "top level must be a mapping")
    return ExperimentConfig.from_dict(data, mode)


def load_config(path: str | Path, mode: str | None = None) -> ExperimentConfig:
    path = Path(path)
    return parse_config_text(path.read_text(), mode, str(path))
