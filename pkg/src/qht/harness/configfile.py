"""TOML experiment-spec files.

Schema (every key optional except family; omitted keys fall back to the
family defaults):

    [experiment]
    family = "qcs-thm4"
    seed = 123
    trials = 50
    n_grid = "100:100:1000"        # start:step:stop, or a list of ints
    delta_grid = [0.0, 0.5, 1.0]

    [experiment.dims]
    d = 150
    s = 5

    [experiment.constants]
    c_lambda = 0.5
"""
from __future__ import annotations

try:
    import tomllib  # py311+
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from .families import FAMILIES, default_spec


class ConfigError(ValueError):
    pass


_KNOWN_KEYS = {"family", "seed", "trials", "n_grid", "delta_grid", "dims", "constants"}


def parse_grid(value) -> tuple[int, ...]:
    """Accept [100, 200, ...] or the compact "start:step:stop" string."""
    if isinstance(value, str):
        parts = value.split(":")
        if len(parts) != 3:
            raise ConfigError(f"n_grid string must be start:step:stop, got {value!r}")
        try:
            a, step, b = (int(p) for p in parts)
        except ValueError as exc:
            raise ConfigError(f"n_grid has non-integer parts: {value!r}") from exc
        if step <= 0 or b < a:
            raise ConfigError(f"n_grid must increase: {value!r}")
        return tuple(range(a, b + 1, step))
    if isinstance(value, list):
        try:
            return tuple(int(v) for v in value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"n_grid entries must be integers: {value!r}") from exc
    raise ConfigError(f"n_grid must be a list or start:step:stop string, got {type(value).__name__}")


def load_spec(path: str):
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"spec file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"spec file is not valid TOML: {exc}") from exc
    return spec_from_dict(doc.get("experiment", doc))


def spec_from_dict(exp: dict):
    unknown = set(exp) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown spec fields: {sorted(unknown)}")
    family = exp.get("family")
    if not family:
        raise ConfigError("spec must name a family (field: family)")
    if family not in FAMILIES:
        raise ConfigError(f"unknown family {family!r}; valid: {sorted(FAMILIES)}")
    overrides = {}
    if "seed" in exp:
        overrides["seed"] = int(exp["seed"])
    if "trials" in exp:
        overrides["trials"] = int(exp["trials"])
    if "n_grid" in exp:
        overrides["n_grid"] = parse_grid(exp["n_grid"])
    if "delta_grid" in exp:
        try:
            overrides["delta_grid"] = tuple(float(v) for v in exp["delta_grid"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"delta_grid entries must be numbers: {exp['delta_grid']!r}") from exc
    if "dims" in exp:
        fam = FAMILIES[family]
        dims = dict(fam.default_dims)
        try:
            dims.update({k: int(v) for k, v in exp["dims"].items()})
        except (TypeError, ValueError, AttributeError) as exc:
            raise ConfigError(f"dims must be an integer table: {exp['dims']!r}") from exc
        overrides["dims"] = dims
    if "constants" in exp:
        try:
            overrides["constants"] = {k: float(v) for k, v in exp["constants"].items()}
        except (TypeError, ValueError, AttributeError) as exc:
            raise ConfigError(f"constants must be a numeric table: {exp['constants']!r}") from exc
    try:
        return default_spec(family, **overrides)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
