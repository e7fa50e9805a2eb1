"""TOML experiment configuration with a closed schema."""

from __future__ import annotations

import copy
import hashlib
import sys

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError

# section -> key -> (accepted types, default); None means "unset"
SCHEMA: dict[str, dict[str, tuple[tuple[type, ...], object]]] = {
    "run": {"command": ((str,), None), "seed": ((int,), 0), "trials": ((int,), 100),
            "out": ((str,), "orlicz-run"), "workers": ((int,), None)},
    "group": {"N": ((int,), 16), "d": ((int,), 1)},
    "young": {"phi": ((str,), "power(p=2)"), "psi": ((str,), "power(p=3)")},
    "verify": {"ids": ((list,), [])},
    "norms": {"signal": ((str,), "gaussian"), "input": ((str,), None), "sites": ((list,), None)},
    "restriction": {"sites": ((list,), None), "sites_file": ((str,), None),
                    "size": ((int, float), None), "budget": ((int,), 40)},
    "up": {"theorem": ((str,), "classical"), "signal": ((str,), None),
           "constants": ((dict,), {})},
    "recovery": {"input": ((str,), None), "erased": ((str,), None), "step": ((int, float), 1.0),
                 "max_iter": ((int,), 50000), "tol": ((int, float), 1e-10)},
    "phase": {"grid": ((list,), [[1, 3], [2, 3], [4, 4], [8, 8]])},
    "tolerances": {"relative": ((int, float), 1e-9), "support": ((int, float), 1e-10)},
}


def defaults() -> dict:
    return {sec: {k: copy.deepcopy(v[1]) for k, v in keys.items() if v[1] is not None}
            for sec, keys in SCHEMA.items()}


def validate(raw: dict) -> dict:
    """Check ``raw`` against the schema and fill defaults; unknown keys are errors."""
    out = defaults()
    for sec, body in raw.items():
        if sec not in SCHEMA:
            raise ConfigError(f"unknown section [{sec}]")
        if not isinstance(body, dict):
            raise ConfigError(f"[{sec}] must be a table")
        for key, value in body.items():
            if key not in SCHEMA[sec]:
                raise ConfigError(f"unknown key {sec}.{key}")
            types, _ = SCHEMA[sec][key]
            if isinstance(value, bool) or not isinstance(value, types):
                names = "/".join(t.__name__ for t in types)
                raise ConfigError(f"{sec}.{key} must be {names}, got {type(value).__name__}")
            out[sec][key] = value
    return out


def loads(text: str) -> dict:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    return validate(raw)


def load(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def dumps(config: dict) -> str:
    return tomli_w.dumps(validate(config))


def config_hash(config: dict) -> str:
    return hashlib.sha256(dumps(config).encode()).hexdigest()


def override(config: dict, section: str, **values) -> dict:
    """Copy of ``config`` with the non-None ``values`` set in ``section``."""
    out = copy.deepcopy(config)
    for k, v in values.items():
        if v is not None:
            out[section][k] = v
    return validate(out)
