"""INI run configuration: parsing, validation, and defaults."""

from __future__ import annotations

import configparser
import difflib
import os
from dataclasses import dataclass, field
from typing import Optional

from .models import ModelKind
from .pipeline import InvestmentMeasure
from .quarters import QuarterIndex


class ConfigError(ValueError):
    pass


#: Recognized keys per section; anything else is rejected with a suggestion.
KNOWN_KEYS = {
    "data": {
        "panel", "series_dir", "snapshot", "investment_measure", "rate_scale",
        "sample_start", "sample_end",
    },
    "model": {"kind", "beta", "delta", "rho"},
    "instruments": {"lags", "external"},
    "inference": {
        "statistic", "level", "bandwidth", "split_fraction", "split_gap",
        "theta0", "qll_fallback",
    },
    "grid": {"points", "extra_points"},
    "output": {"dir"},
}


@dataclass
class RunConfig:
    # data
    panel: Optional[str] = None
    series_dir: Optional[str] = None
    snapshot: bool = False
    investment_measure: InvestmentMeasure = InvestmentMeasure.SW
    rate_scale: float = 400.0
    sample_start: Optional[QuarterIndex] = None
    sample_end: Optional[QuarterIndex] = None
    # model
    model: ModelKind = ModelKind.IAC
    beta: float = 0.99
    delta: float = 0.025
    rho: float = 0.0  # fixed rho for the SEMI variant
    # instruments
    instrument_lags: tuple[tuple[str, int], ...] = (
        ("delta_i", 1), ("r_p", 2), ("u", 1),
    )
    external: tuple[str, ...] = ()
    # inference
    statistic: str = "S"
    level: float = 0.90
    bandwidth: object = "auto"
    split_fraction: float = 0.45
    split_gap: int = 3
    theta0: Optional[tuple[float, ...]] = None
    qll_fallback: str = "sup_split"
    # grid
    grid_points: Optional[tuple[int, ...]] = None
    extra_points: tuple[tuple[float, ...], ...] = ()
    # output
    out_dir: str = "."

    def effective(self) -> dict:
        """Fully-resolved key/value view for embedding in outputs."""
        return {
            "data": {
                "panel": self.panel,
                "series_dir": self.series_dir,
                "snapshot": self.snapshot,
                "investment_measure": self.investment_measure.value,
                "rate_scale": self.rate_scale,
                "sample_start": str(self.sample_start) if self.sample_start else None,
                "sample_end": str(self.sample_end) if self.sample_end else None,
            },
            "model": {
                "kind": self.model.value,
                "beta": self.beta,
                "delta": self.delta,
                "rho": self.rho,
            },
            "instruments": {
                "lags": [[n, l] for n, l in self.instrument_lags],
                "external": list(self.external),
            },
            "inference": {
                "statistic": self.statistic,
                "level": self.level,
                "bandwidth": self.bandwidth,
                "split_fraction": self.split_fraction,
                "split_gap": self.split_gap,
                "theta0": list(self.theta0) if self.theta0 else None,
                "qll_fallback": self.qll_fallback,
            },
            "grid": {
                "points": list(self.grid_points) if self.grid_points else None,
                "extra_points": [list(p) for p in self.extra_points],
            },
            "output": {"dir": self.out_dir},
        }


def _err(path: str, section: str, key: str, msg: str) -> ConfigError:
    return ConfigError(f"{path}: [{section}] {key}: {msg}")


def _parse_lags(text: str) -> tuple[tuple[str, int], ...]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        name, _, lag = part.partition(":")
        try:
            out.append((name.strip(), int(lag)))
        except ValueError:
            raise ConfigError(
                f"bad instrument lag {part!r}, expected 'column:lag'"
            ) from None
    return tuple(out)


def _parse_extra_points(text: str) -> tuple[tuple[float, ...], ...]:
    points = []
    for group in text.split(";"):
        group = group.strip()
        if not group:
            continue
        points.append(tuple(float(x) for x in group.split(",")))
    return tuple(points)


def parse_config(path: str | os.PathLike) -> RunConfig:
    """Parse and validate an INI run configuration, filling documented defaults."""
    path = os.fspath(path)
    if not os.path.exists(path):
        raise ConfigError(f"no such config file: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None

    for section in parser.sections():
        if section not in KNOWN_KEYS:
            hint = difflib.get_close_matches(section, KNOWN_KEYS, n=1)
            extra = f" (did you mean [{hint[0]}]?)" if hint else ""
            raise ConfigError(f"{path}: unknown section [{section}]{extra}")
        for key in parser[section]:
            if key not in KNOWN_KEYS[section]:
                hint = difflib.get_close_matches(key, KNOWN_KEYS[section], n=1)
                extra = f" (did you mean {hint[0]!r}?)" if hint else ""
                raise ConfigError(f"{path}: unknown key {key!r} in [{section}]{extra}")

    cfg = RunConfig()
    get = parser.get

    if parser.has_section("data"):
        d = parser["data"]
        cfg.panel = d.get("panel", cfg.panel)
        cfg.series_dir = d.get("series_dir", cfg.series_dir)
        if "snapshot" in d:
            cfg.snapshot = d.getboolean("snapshot")
        if "investment_measure" in d:
            try:
                cfg.investment_measure = InvestmentMeasure(d["investment_measure"])
            except ValueError:
                raise _err(path, "data", "investment_measure",
                           f"must be SW or JPT, got {d['investment_measure']!r}")
        if "rate_scale" in d:
            cfg.rate_scale = d.getfloat("rate_scale")
            if cfg.rate_scale <= 0:
                raise _err(path, "data", "rate_scale", "must be > 0")
        for key, attr in (("sample_start", "sample_start"), ("sample_end", "sample_end")):
            if key in d:
                try:
                    setattr(cfg, attr, QuarterIndex.parse(d[key]))
                except ValueError as exc:
                    raise _err(path, "data", key, str(exc))
        if cfg.panel and not os.path.exists(cfg.panel):
            raise _err(path, "data", "panel", f"file not found: {cfg.panel}")

    if parser.has_section("model"):
        m = parser["model"]
        if "kind" in m:
            try:
                cfg.model = ModelKind(m["kind"])
            except ValueError:
                raise _err(path, "model", "kind",
                           f"must be IAC, CAC, or SEMI, got {m['kind']!r}")
        for key in ("beta", "delta", "rho"):
            if key in m:
                try:
                    setattr(cfg, key, m.getfloat(key))
                except ValueError:
                    raise _err(path, "model", key, f"not a number: {m[key]!r}")
        if not 0 < cfg.beta < 1:
            raise _err(path, "model", "beta", f"must be in (0,1), got {cfg.beta}")
        if not 0 < cfg.delta < 1:
            raise _err(path, "model", "delta", f"must be in (0,1), got {cfg.delta}")
        if not 0 <= cfg.rho < 1:
            raise _err(path, "model", "rho", f"must be in [0,1), got {cfg.rho}")

    if parser.has_section("instruments"):
        i = parser["instruments"]
        if "lags" in i:
            cfg.instrument_lags = _parse_lags(i["lags"])
        if "external" in i:
            cfg.external = tuple(
                s.strip() for s in i["external"].split(",") if s.strip()
            )

    if parser.has_section("inference"):
        f = parser["inference"]
        if "statistic" in f:
            stat = f["statistic"].strip()
            if stat not in ("S", "qll", "split"):
                raise _err(path, "inference", "statistic",
                           f"must be S, qll, or split, got {stat!r}")
            cfg.statistic = stat
        if "level" in f:
            cfg.level = f.getfloat("level")
            if not 0 < cfg.level < 1:
                raise _err(path, "inference", "level",
                           f"must be in (0,1), got {cfg.level}")
        if "bandwidth" in f:
            raw = f["bandwidth"].strip()
            if raw == "auto":
                cfg.bandwidth = "auto"
            else:
                try:
                    cfg.bandwidth = int(raw)
                except ValueError:
                    raise _err(path, "inference", "bandwidth",
                               f"must be 'auto' or an integer, got {raw!r}")
                if cfg.bandwidth < 0:
                    raise _err(path, "inference", "bandwidth", "must be >= 0")
        if "split_fraction" in f:
            cfg.split_fraction = f.getfloat("split_fraction")
            if not 0 < cfg.split_fraction < 1:
                raise _err(path, "inference", "split_fraction", "must be in (0,1)")
        if "split_gap" in f:
            cfg.split_gap = f.getint("split_gap")
            if cfg.split_gap < 0:
                raise _err(path, "inference", "split_gap", "must be >= 0")
        if "theta0" in f:
            try:
                cfg.theta0 = tuple(float(x) for x in f["theta0"].split(","))
            except ValueError:
                raise _err(path, "inference", "theta0",
                           f"must be comma-separated numbers, got {f['theta0']!r}")
        if "qll_fallback" in f:
            cfg.qll_fallback = f["qll_fallback"].strip()
            if cfg.qll_fallback != "sup_split":
                raise _err(path, "inference", "qll_fallback",
                           f"only 'sup_split' is available, got {cfg.qll_fallback!r}")

    if parser.has_section("grid"):
        g = parser["grid"]
        if "points" in g:
            try:
                cfg.grid_points = tuple(int(x) for x in g["points"].split(","))
            except ValueError:
                raise _err(path, "grid", "points",
                           f"must be comma-separated integers, got {g['points']!r}")
            if any(p < 2 for p in cfg.grid_points):
                raise _err(path, "grid", "points", "each axis needs >= 2 points")
        if "extra_points" in g:
            try:
                cfg.extra_points = _parse_extra_points(g["extra_points"])
            except ValueError:
                raise _err(path, "grid", "extra_points",
                           f"bad value {g['extra_points']!r}")

    if parser.has_section("output"):
        cfg.out_dir = parser["output"].get("dir", cfg.out_dir)

    return cfg
