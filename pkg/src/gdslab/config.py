"""INI experiment configs: ``[model]``, ``[task]`` and ``[output]`` sections.

Values are typed on read: integers, floats, ``true``/``false`` and
comma-separated lists of those. Everything else stays a string.
"""

from __future__ import annotations

import configparser
import io
import re
from dataclasses import dataclass, field

TASKS = ("eval", "moment", "moment-scan", "growth", "mv-check", "zeros", "bohr-probe", "verify")
FORMATS = ("csv", "json")
_INT = re.compile(r"^[+-]?\d+$")


class ConfigError(ValueError):
    pass


def parse_value(text: str):
    text = text.strip()
    if "," in text:
        return [parse_value(p) for p in text.split(",") if p.strip()]
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    if _INT.match(text):
        return int(text)
    try:
        return float(text)
    except ValueError:
        return text


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, tuple)):
        if len(v) == 1:
            return format_value(v[0]) + ","
        return ", ".join(format_value(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


@dataclass
class ExperimentConfig:
    model: dict = field(default_factory=dict)
    task: str = "eval"
    params: dict = field(default_factory=dict)
    output_path: str | None = None
    output_format: str = "csv"

    def validate(self) -> "ExperimentConfig":
        if self.task not in TASKS:
            raise ConfigError(f"[task] name: unknown task {self.task!r}; expected one of {', '.join(TASKS)}")
        if self.output_format not in FORMATS:
            raise ConfigError(f"[output] format: expected csv or json, got {self.output_format!r}")
        if self.task != "verify" and "kind" not in self.model and self.task != "mv-check":
            raise ConfigError("[model] kind: missing")
        return self

    def to_ini(self) -> str:
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        cp["model"] = {k: format_value(v) for k, v in self.model.items()}
        task = {"name": self.task}
        task.update({k: format_value(v) for k, v in self.params.items()})
        cp["task"] = task
        out = {"format": self.output_format}
        if self.output_path is not None:
            out["path"] = self.output_path
        cp["output"] = out
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()


def _read(cp: configparser.ConfigParser, text_name: str) -> ExperimentConfig:
    model = {}
    if cp.has_section("model"):
        model = {k: parse_value(v) for k, v in cp["model"].items()}
    params = {}
    task = "eval"
    if cp.has_section("task"):
        for k, v in cp["task"].items():
            if k == "name":
                task = v.strip()
            else:
                params[k] = parse_value(v)
    path = None
    fmt = "csv"
    if cp.has_section("output"):
        path = cp["output"].get("path")
        fmt = cp["output"].get("format", "csv").strip()
    for sec in cp.sections():
        if sec not in ("model", "task", "output"):
            raise ConfigError(f"{text_name}: unknown section [{sec}]")
    return ExperimentConfig(model, task, params, path, fmt).validate()


def loads(text: str, name: str = "<config>") -> ExperimentConfig:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text, source=name)
    except configparser.Error as exc:
        raise ConfigError(f"{name}: {exc}") from exc
    return _read(cp, name)


def load(path: str) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), path)
