"""INI run configuration.

Sections and keys::

    [problem]        N, p, domain (box|ball), lower, upper | center, radius
    [problem.J]      kind plus the field's parameters
    [problem.V]      same
    [numerics]       resolution, eps_ladder, newton_tol, correction_tol,
                     ground_state_tol, max_iters, subsample
    [experiment]     q0, q, lattice, seeds, seed

Vectors are comma separated; lists of points (bump centres) separate the
points with ';'.  Polynomial terms are written ``2,0:1.0; 0,2:1.0``.
Unknown sections or keys are errors.
"""
import configparser
import io

from .errors import ConfigError
from .problem import ProblemData, make_domain, make_field

__all__ = ["load_config", "parse_config", "apply_overrides", "dump_config",
           "build_problem", "ladder_of"]


def _floats(key, text):
    try:
        return [float(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise ConfigError(key, f"expected comma-separated numbers, got {text!r}") from None


def _float(key, text):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(key, f"expected a number, got {text!r}") from None


def _int(key, text):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(key, f"expected an integer, got {text!r}") from None


def _points(key, text):
    return [_floats(key, chunk) for chunk in text.split(";") if chunk.strip()]


def _terms(key, text):
    out = []
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        if ":" not in chunk:
            raise ConfigError(key, f"polynomial term {chunk.strip()!r} needs 'exponents:coefficient'")
        e, c = chunk.split(":")
        out.append([[int(v) for v in _floats(key, e)], _float(key, c)])
    return out


def _int_or_tuple(key, text):
    vals = _floats(key, text)
    if not vals or any(v != int(v) for v in vals):
        raise ConfigError(key, f"expected integer node counts, got {text!r}")
    return int(vals[0]) if len(vals) == 1 else tuple(int(v) for v in vals)


_FIELD_KEYS = {
    "constant": {"value": _float},
    "quadratic_well": {"center": _floats, "base": _float, "curvature": _float},
    "gaussian_bumps": {"base": _float, "amplitudes": _floats, "centers": _points, "widths": _floats},
    "polynomial": {"terms": _terms},
}

_SCHEMA = {
    "problem": {"N": _int, "p": _float, "domain": str, "lower": _floats, "upper": _floats,
                "center": _floats, "radius": _float},
    "numerics": {"resolution": _int_or_tuple, "eps_ladder": _floats, "newton_tol": _float,
                 "correction_tol": _float, "ground_state_tol": _float, "max_iters": _int,
                 "subsample": _int},
    "experiment": {"q0": _floats, "q": _points, "lattice": _int, "seeds": _int, "seed": _int},
}

DEFAULTS = {
    "numerics": {"resolution": 129, "newton_tol": 1e-8, "correction_tol": 1e-9,
                 "ground_state_tol": 1e-12, "max_iters": 30},
    "experiment": {"lattice": 41, "seeds": 9, "seed": 0},
}


def _parser():
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    cp.optionxform = str          # keys are case sensitive (N)
    return cp


def load_config(path, overrides=()):
    cp = _parser()
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError("config", str(exc)) from None
    apply_overrides(cp, overrides)
    return parse_config(cp)


def apply_overrides(cp, overrides):
    """Apply ``section.key=value`` overrides (the section may be dotted)."""
    for item in overrides:
        if "=" not in item:
            raise ConfigError(item, "override must look like KEY=VALUE")
        path, value = item.split("=", 1)
        if "." not in path:
            raise ConfigError(path, "override key needs a section, e.g. numerics.eps_ladder")
        section, key = path.strip().rsplit(".", 1)
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section, key, value.strip())
    return cp


def parse_config(cp):
    """Validated nested dict from a ConfigParser."""
    out = {s: dict(v) for s, v in DEFAULTS.items()}
    for section in cp.sections():
        if section in ("problem.J", "problem.V"):
            out[section] = _parse_field(section, cp[section])
            continue
        schema = _SCHEMA.get(section)
        if schema is None:
            raise ConfigError(section, "unknown section")
        block = out.setdefault(section, {})
        for key, text in cp[section].items():
            if key not in schema:
                raise ConfigError(f"{section}.{key}", "unknown key")
            conv = schema[key]
            block[key] = conv(key, text) if conv is not str else text.strip()
    for need in ("problem", "problem.J", "problem.V"):
        if need not in out:
            raise ConfigError(need, "missing section")
    prob = out["problem"]
    for key in ("N", "p", "domain"):
        if key not in prob:
            raise ConfigError(f"problem.{key}", "missing")
    lad = out["numerics"].get("eps_ladder")
    if lad is not None:
        ladder_of(out)
    return out


def _parse_field(section, items):
    kind = items.get("kind", "").strip()
    if kind not in _FIELD_KEYS:
        raise ConfigError(f"{section}.kind", f"unknown kind {kind!r}; expected one of {sorted(_FIELD_KEYS)}")
    spec = {"kind": kind}
    for key, text in items.items():
        if key == "kind":
            continue
        conv = _FIELD_KEYS[kind].get(key)
        if conv is None:
            raise ConfigError(f"{section}.{key}", f"unknown key for kind {kind}")
        spec[key] = conv(key, text)
    return spec


def ladder_of(cfg, override=None):
    """The ε-ladder, checked positive and strictly decreasing."""
    lad = override if override is not None else cfg["numerics"].get("eps_ladder")
    if not lad:
        raise ConfigError("eps_ladder", "no eps ladder given")
    lad = [float(e) for e in lad]
    if any(e <= 0 for e in lad):
        raise ConfigError("eps_ladder", f"values must be positive, got {lad}")
    if any(b >= a for a, b in zip(lad, lad[1:])):
        raise ConfigError("eps_ladder", f"must be strictly decreasing, got {lad}")
    return lad


def build_problem(cfg):
    prob = cfg["problem"]
    dom = {"shape": prob["domain"]}
    for key in ("lower", "upper", "center", "radius"):
        if key in prob:
            dom[key] = prob[key]
    try:
        domain = make_domain(dom)
    except KeyError as exc:
        raise ConfigError(f"problem.{exc.args[0]}", "missing for this domain shape") from None
    except Exception as exc:
        raise ConfigError("problem.domain", str(exc)) from None
    fields = {}
    for name in ("J", "V"):
        try:
            fields[name] = make_field(cfg[f"problem.{name}"])
        except KeyError as exc:
            raise ConfigError(f"problem.{name}.{exc.args[0]}", "missing") from None
        except ValueError as exc:
            raise ConfigError(f"problem.{name}", str(exc)) from None
    try:
        return ProblemData(prob["N"], prob["p"], fields["J"], fields["V"], domain)
    except ValueError as exc:
        raise ConfigError("problem", str(exc)) from None


def _fmt(v):
    if isinstance(v, (list, tuple)):
        if v and isinstance(v[0], (list, tuple)):
            return "; ".join(_fmt(x) for x in v)
        return ",".join(_fmt(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def dump_config(cfg, version):
    """Resolved config as INI text, headed by the artifact version."""
    cp = _parser()
    for section in sorted(cfg, key=lambda s: (s.count("."), s)):
        cp.add_section(section)
        for key, val in sorted(cfg[section].items()):
            if section.endswith((".J", ".V")) and key == "terms":
                val = "; ".join(f"{_fmt(e)}:{c!r}" for e, c in val)
            cp.set(section, key, _fmt(val))
    buf = io.StringIO()
    buf.write(f"# spikelab {version}\n")
    cp.write(buf)
    return buf.getvalue()
