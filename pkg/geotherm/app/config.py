"""
Run configuration: the flat `section.key = value` format, presets and model
construction from a validated RunSpec.

Example::

    # PMI black hole, n = 4, s = 5/2
    model.type = pmi
    model.n = 4
    model.s = 5/2
    model.l = 1
    sweep.var = S
    sweep.min = 0.5
    sweep.max = 10
    fixed.Q = 1
"""

import logging
import re
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from pydantic import ValidationError

from geotherm.app.errors import ConfigError, ExpressionSyntaxError, InvalidParameter, UnknownVariable
from geotherm.app.models import (
    ThermoModel,
    build_custom_model,
    build_pmi_model,
    build_rn_model,
    s_to_index,
    validate_pmi_parameters,
)
from geotherm.app.schemas import ModelSection, RunSpec

logger = logging.getLogger(__name__)

SECTIONS = ("model", "sweep", "fixed", "analysis", "output", "tolerances")
LIST_KEYS = {("analysis", "quantities"), ("model", "variables"), ("tolerances", "growth_offsets")}

PRESET_DIR = Path(__file__).resolve().parents[1] / "presets"
PRESET_ALIASES = {
    "pmi4-heat-capacity": "fig1",
    "pmi4-gtd": "fig4",
    "rn-gtd": "fig7",
    "pmi4-weinhold": "fig9",
    "pmi4-l-heat-capacity": "fig10",
    "pmi4-l-gtd": "fig12",
}
RN_DEFAULT_L = 8.0


def _raw_sections(text: str) -> Dict[str, Dict[str, object]]:
    raw: Dict[str, Dict[str, object]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(None, f"line {lineno}: expected 'section.key = value'")
        key, value = (part.strip() for part in stripped.split("=", 1))
        section, dot, name = key.partition(".")
        if not dot or not name:
            raise ConfigError(key, f"line {lineno}: keys must look like section.key")
        if section not in SECTIONS:
            raise ConfigError(key, f"unknown section {section!r}; expected one of {', '.join(SECTIONS)}")
        entries = raw.setdefault(section, {})
        if name in entries:
            raise ConfigError(key, f"line {lineno}: duplicate key")
        if (section, name) in LIST_KEYS:
            entries[name] = [item.strip() for item in value.split(",") if item.strip()]
        else:
            entries[name] = value
    return raw


def parse_config(text: str) -> RunSpec:
    """
    Parse and fully validate a run configuration.

    Raises:
        ConfigError: Malformed line, unknown key, invalid value or a model
            precondition violation; `key` names the offending entry
    """
    raw = _raw_sections(text)
    try:
        spec = RunSpec.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(part) for part in first["loc"])
        raise ConfigError(key or None, first["msg"])
    validate_run_spec(spec)
    return spec


def model_variables(section: ModelSection) -> Tuple[str, ...]:
    if section.type == "custom":
        return tuple(section.variables or ())
    return ("S", "Q", "l") if section.l_is_variable else ("S", "Q")


def validate_run_spec(spec: RunSpec):
    """Check every model and sweep precondition before any computation"""
    section = spec.model
    if section.type == "pmi":
        if section.n is None:
            raise ConfigError("model.n", "required for pmi models")
        if (section.s is None) == (section.i is None):
            raise ConfigError("model.s", "give exactly one of model.s and model.i")
        try:
            i = section.i if section.i is not None else s_to_index(section.s)
            validate_pmi_parameters(section.n, i, section.l, section.l_is_variable)
        except InvalidParameter as e:
            message = str(e)
            if message.startswith("l must"):
                key = "model.l"
            elif message.startswith("n ") or "violates n" in message:
                key = "model.n"
            else:
                key = "model.i" if section.i is not None else "model.s"
            raise ConfigError(key, message)
    elif section.type == "rn":
        for name in ("n", "s", "i"):
            if getattr(section, name) is not None:
                raise ConfigError(f"model.{name}", "rn models fix n = 3, s = 1")
        if section.l is not None and section.l <= 0:
            raise ConfigError("model.l", f"l must be positive, got {section.l}")
    else:
        if not section.variables:
            raise ConfigError("model.variables", "required for custom models")
        if not section.potential:
            raise ConfigError("model.potential", "required for custom models")
        if section.l_is_variable:
            raise ConfigError("model.l_is_variable", "only meaningful for pmi and rn models")
        try:
            build_custom_model(section.variables, section.potential)
        except (ExpressionSyntaxError, UnknownVariable, InvalidParameter) as e:
            raise ConfigError("model.potential", str(e))

    variables = model_variables(section)
    if spec.sweep.var not in variables:
        raise ConfigError("sweep.var", f"{spec.sweep.var!r} is not one of {', '.join(variables)}")
    if spec.sweep.min <= 0:
        raise ConfigError("sweep.min", f"must be positive, got {spec.sweep.min}")
    if spec.sweep.min >= spec.sweep.max:
        raise ConfigError("sweep.max", f"must exceed sweep.min = {spec.sweep.min}")
    for name, value in spec.fixed.items():
        if name not in variables or name == spec.sweep.var:
            raise ConfigError(f"fixed.{name}", "not a fixed variable of this model")
        if not value > 0:
            raise ConfigError(f"fixed.{name}", f"must be positive, got {value}")
    for name in variables:
        if name != spec.sweep.var and name not in spec.fixed:
            raise ConfigError(f"fixed.{name}", "missing value for a non-swept variable")


def build_model(section: ModelSection) -> ThermoModel:
    if section.type == "pmi":
        return build_pmi_model(
            section.n, s=section.s, i=section.i, l=section.l, l_is_variable=section.l_is_variable
        )
    if section.type == "rn":
        l = section.l if section.l is not None else RN_DEFAULT_L
        return build_rn_model(l, section.l_is_variable)
    return build_custom_model(section.variables, section.potential)


def _preset_order(path: Path):
    # fig1, fig4, ..., fig12 before the descriptive names
    match = re.fullmatch(r"fig(\d+)", path.stem)
    return (0, int(match.group(1)), "") if match else (1, 0, path.stem)


def preset_alias(name: str) -> Optional[str]:
    """Descriptive alias of a preset id, if it has one"""
    return next((alias for alias, target in PRESET_ALIASES.items() if target == name), None)


def list_presets() -> List[Tuple[str, str]]:
    """(name, description) for every preset file; the first comment line is the description"""
    presets = []
    for path in sorted(PRESET_DIR.glob("*.conf"), key=_preset_order):
        description = ""
        for line in path.read_text().splitlines():
            if line.startswith("#"):
                description = line.lstrip("#").strip()
                break
        presets.append((path.stem, description))
    return presets


def load_spec(ref: str) -> RunSpec:
    """
    Load a run spec from a file path, a preset id or a preset alias.

    Raises:
        ConfigError: neither a readable file nor a known preset, or invalid contents
    """
    path = Path(ref)
    if not path.is_file():
        path = PRESET_DIR / f"{PRESET_ALIASES.get(ref, ref)}.conf"
    if not path.is_file():
        known = ", ".join(name for name, _ in list_presets())
        raise ConfigError(None, f"{ref!r} is neither a config file nor a preset ({known})")
    logger.info(f"Loading config from {path}")
    return parse_config(path.read_text())
