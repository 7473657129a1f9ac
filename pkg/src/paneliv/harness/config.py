"""Run configuration files.

Line-oriented INI: "[name]" sections with "key = value" pairs, lists
comma-separated. Reserved sections [data], [output], and [dgp] configure
inputs, rendering, and the synthetic-data lab; every other section is one
named regression spec, executed in declaration order.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ConfigError, PanelIvError
from ..panel import SampleFilter
from ..regress.spec import RegressionSpec, VcovKind, WeightSpec
from ..transforms import TransformKind

RESERVED_SECTIONS = ("data", "output", "dgp")

_SPEC_KEYS = {
    "dependent", "exogenous", "endogenous", "instruments", "fixed_effects",
    "weight", "vcov", "sample", "transform", "years", "start_year", "end_year",
    "lag_periods", "base_variable", "intercept", "auto_drop", "weak_iv",
}


@dataclass
class DataPaths:
    country_year: Path | None = None
    disease_mortality: Path | None = None
    interventions: Path | None = None
    groups: Path | None = None
    frontier_mortality: float = 0.0


@dataclass
class OutputOptions:
    format: str = "text"
    path: Path | None = None


@dataclass
class SpecEntry:
    name: str
    spec: RegressionSpec
    weak_iv: bool


@dataclass
class RunConfig:
    data: DataPaths = field(default_factory=DataPaths)
    specs: list[SpecEntry] = field(default_factory=list)
    output: OutputOptions = field(default_factory=OutputOptions)
    dgp_options: dict[str, str] = field(default_factory=dict)
    seed: int | None = None
    base_dir: Path = Path(".")


def _parse_bool(value: str, context: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"{context}: expected a boolean, got {value!r}")


def _parse_int(value: str, context: str) -> int:
    try:
        return int(value.strip())
    except ValueError:
        raise ConfigError(f"{context}: expected an integer, got {value!r}") from None


def _parse_list(value: str) -> tuple[str, ...]:
    return tuple(item.strip() for item in value.split(",") if item.strip())


def _parse_vcov(value: str, context: str) -> VcovKind:
    value = value.strip()
    if value in ("classical", ""):
        return VcovKind("classical")
    if value in ("robust", "robust_hc1", "hc1"):
        return VcovKind("robust_hc1")
    if value.startswith("cluster"):
        _, _, variable = value.partition(":")
        variable = variable.strip() or "country"
        return VcovKind("cluster", variable)
    raise ConfigError(f"{context}: unknown vcov {value!r}")


def _parse_sample(value: str, context: str) -> SampleFilter:
    value = value.strip()
    if value in ("all", ""):
        return SampleFilter("all")
    if value in ("base_sample", "base"):
        return SampleFilter("base_sample")
    if value in ("low_middle_income", "low_middle"):
        return SampleFilter("low_middle_income")
    if value.startswith("list:"):
        countries = _parse_list(value[len("list:"):])
        if not countries:
            raise ConfigError(f"{context}: empty country list")
        return SampleFilter("explicit_list", countries)
    raise ConfigError(f"{context}: unknown sample {value!r}")


def _parse_transform(options: dict[str, str], context: str) -> TransformKind:
    kind = options.get("transform", "levels_panel").strip()
    decadal = False
    if kind in ("levels", "levels_panel", ""):
        kind = "levels_panel"
    elif kind == "growth_rate_decadal":
        kind, decadal = "growth_rate", True
    elif kind not in ("long_difference", "growth_rate", "lag", "year_interaction"):
        raise ConfigError(f"{context}: unknown transform {kind!r}")
    years = None
    if "years" in options:
        years = tuple(_parse_int(y, context) for y in _parse_list(options["years"]))
    start = _parse_int(options["start_year"], context) if "start_year" in options else None
    end = _parse_int(options["end_year"], context) if "end_year" in options else None
    lag_periods = _parse_int(options["lag_periods"], context) if "lag_periods" in options else None
    base_variable = options.get("base_variable", "").strip() or None
    try:
        return TransformKind(kind, start_year=start, end_year=end, lag_periods=lag_periods,
                             base_variable=base_variable, years=years, decadal=decadal)
    except PanelIvError as exc:
        raise ConfigError(f"{context}: {exc}") from None


def parse_spec_options(name: str, options: dict[str, str]) -> SpecEntry:
    context = f"[{name}]"
    unknown = set(options) - _SPEC_KEYS
    if unknown:
        raise ConfigError(f"{context}: unknown keys: {', '.join(sorted(unknown))}")
    if "dependent" not in options or not options["dependent"].strip():
        raise ConfigError(f"{context}: missing dependent")
    weight = None
    if options.get("weight", "").strip():
        weight = WeightSpec(options["weight"].strip())
    try:
        spec = RegressionSpec(
            dependent=options["dependent"].strip(),
            exogenous=_parse_list(options.get("exogenous", "")),
            endogenous=_parse_list(options.get("endogenous", "")),
            instruments=_parse_list(options.get("instruments", "")),
            fixed_effects=frozenset(f for f in _parse_list(options.get("fixed_effects", ""))
                                    if f != "none"),
            weight=weight,
            vcov=_parse_vcov(options.get("vcov", "classical"), context),
            sample=_parse_sample(options.get("sample", "all"), context),
            transform=_parse_transform(options, context),
            include_intercept=_parse_bool(options.get("intercept", "false"), context),
            auto_drop_collinear=_parse_bool(options.get("auto_drop", "false"), context),
        )
    except PanelIvError as exc:
        raise ConfigError(f"{context}: {exc}") from None
    default_weak = bool(spec.endogenous)
    weak_iv = _parse_bool(options.get("weak_iv", str(default_weak)), context)
    return SpecEntry(name, spec, weak_iv and bool(spec.endogenous))


def read_run_config(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"no such config file: {path}")
    return parse_run_config(path.read_text(encoding="utf-8"), base_dir=path.parent)


def parse_run_config(text: str, base_dir: str | Path = ".") -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from None

    base_dir = Path(base_dir)
    config = RunConfig(base_dir=base_dir)

    if parser.has_section("data"):
        section = parser["data"]
        for key in section:
            if key == "frontier_mortality":
                config.data.frontier_mortality = float(section[key])
            elif key in ("country_year", "disease_mortality", "interventions", "groups"):
                setattr(config.data, key, base_dir / section[key])
            else:
                raise ConfigError(f"[data]: unknown key {key!r}")

    if parser.has_section("output"):
        section = parser["output"]
        for key in section:
            if key == "format":
                fmt = section[key].strip()
                if fmt not in ("text", "csv"):
                    raise ConfigError(f"[output]: format must be text or csv, got {fmt!r}")
                config.output.format = fmt
            elif key == "path":
                config.output.path = base_dir / section[key]
            else:
                raise ConfigError(f"[output]: unknown key {key!r}")

    if parser.has_section("dgp"):
        config.dgp_options = dict(parser["dgp"])
        if "seed" in config.dgp_options:
            config.seed = _parse_int(config.dgp_options["seed"], "[dgp]")

    seen = set()
    for name in parser.sections():
        if name in RESERVED_SECTIONS:
            continue
        if name in seen:
            raise ConfigError(f"duplicate spec section [{name}]")
        seen.add(name)
        config.specs.append(parse_spec_options(name, dict(parser[name])))
    return config
