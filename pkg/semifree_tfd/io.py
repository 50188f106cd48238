import json
import os
import re
from textwrap import fill

import commentjson
import pandas as pd
import yaml

from semifree_tfd.lattice import format_class
from semifree_tfd.toric import (
    CircleSubgroup,
    polytope_from_vertices,
    summary_from_counts,
)

SCHEMA_VERSION = "1.0"

CONFIG_FILENAME = "config.yml"


class FixtureParseError(ValueError):
    pass


class InvalidConfigError(ValueError):
    pass


RANGE_KEYS = ("coefficient_box", "case_iii_b_range", "case_iii_m_range")


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _build_yaml(sections, comments):
    text_blocks = []
    for title, data in sections:
        centered_title = f" {title} ".center(50, "=")
        text_blocks.append(f"\n\n{'#'}{centered_title}{'#'}")
        for key, value in data.items():
            text = yaml.dump({key: value}).strip("\n")
            if key in comments:
                text = f"\n{'#'} {comments[key]}\n{text}"
            text_blocks.append(text)
    return "\n".join(text_blocks)


def _update_dict(new, original):
    return {k: new[k] if k in new else v for k, v in original.items()}


def _config_sections(**kwargs):
    search = _update_dict(
        kwargs,
        {
            "coefficient_box": [-4, 6],
            "splitting_slack": 3,
            "oracle_box": 4,
        },
    )
    exceptional = _update_dict(
        kwargs,
        {
            "exceptional_degree_bound": 6,
            "exceptional_multiplicity_bound": 3,
        },
    )
    case_iii = _update_dict(
        kwargs,
        {
            "case_iii_b_range": [-1, 6],
            "case_iii_m_range": [1, 8],
        },
    )
    other = _update_dict(kwargs, {"show_progress": False})
    return [
        ("SEARCH", search),
        ("EXCEPTIONAL CLASSES", exceptional),
        ("CASE III", case_iii),
        ("OTHER", other),
    ]


def default_config():
    """Search bounds used when no config file is given."""
    config = {}
    for _, data in _config_sections():
        config.update(data)
    return config


def generate_config(config_dir, **kwargs):
    """Generate a `config.yml` file with search bounds. Default settings
    will be used unless overriden by a keyword argument.

    Parameters
    ----------
    config_dir: str
        A file `config.yml` will be generated in this directory.

    kwargs
        Custom settings.
    """
    comments = {
        "coefficient_box": "range searched for every unknown coefficient (a, b, c, d, k)",
        "splitting_slack": "extra room around PD(Z0) when enumerating level-0 components",
        "oracle_box": "coefficient range of the unpruned splitting oracle used by `check splitting`",
        "exceptional_degree_bound": "largest degree d of d*u - sum m_i E_i searched for exceptional classes",
        "exceptional_multiplicity_bound": "largest multiplicity m_i searched for exceptional classes",
        "case_iii_b_range": "range of b_min searched in case III",
        "case_iii_m_range": "range of the number of isolated points searched in case III",
        "show_progress": "whether to show a progress bar over the case IV branches",
    }
    if not os.path.exists(config_dir):
        os.makedirs(config_dir)
    with open(os.path.join(config_dir, CONFIG_FILENAME), "w") as f:
        f.write(_build_yaml(_config_sections(**kwargs), comments))


def check_config_validity(config):
    """Check if the config is valid.

    To be valid, every range must satisfy lo < hi, the slack must be
    nonnegative and the remaining bounds positive.

    Parameters
    ----------
    config: dict

    Returns
    -------
    validity: bool
    """
    error_messages = []

    for key in RANGE_KEYS:
        value = config.get(key)
        if not (
            isinstance(value, (list, tuple))
            and len(value) == 2
            and all(_is_number(v) for v in value)
            and value[0] < value[1]
        ):
            error_messages.append(
                f"ACTION REQUIRED: `{key}` must be a pair [lo, hi] with lo < hi, got {value}."
            )

    slack = config.get("splitting_slack")
    if not (_is_number(slack) and slack >= 0):
        error_messages.append("ACTION REQUIRED: `splitting_slack` must be nonnegative.")

    for key in ("oracle_box", "exceptional_degree_bound", "exceptional_multiplicity_bound"):
        value = config.get(key)
        if not (_is_number(value) and value > 0):
            error_messages.append(f"ACTION REQUIRED: `{key}` must be positive.")

    if len(error_messages) == 0:
        return True
    for msg in error_messages:
        print(fill(msg, width=70, subsequent_indent="  "), end="\n\n")
    return False


def load_config(config_dir=None, check_if_valid=True):
    """Load search bounds.

    Parameters
    ----------
    config_dir: str, default=None
        Directory containing `config.yml`. When None the defaults from
        :py:func:`semifree_tfd.io.default_config` are returned.

    check_if_valid: bool, default=True
        Check if the config is valid using
        :py:func:`semifree_tfd.io.check_config_validity`

    Returns
    -------
    config: dict

    Raises
    ------
    InvalidConfigError
        When `check_if_valid` is set and the config fails validation, or
        when `config.yml` does not hold a mapping.
    """
    config = default_config()
    if config_dir is None:
        return config

    config_path = os.path.join(config_dir, CONFIG_FILENAME)
    with open(config_path, "r") as stream:
        loaded = yaml.safe_load(stream) or {}
    if not isinstance(loaded, dict):
        raise InvalidConfigError(f"{config_path} does not contain a mapping of settings")
    config.update(loaded)

    if check_if_valid and not check_config_validity(config):
        raise InvalidConfigError(f"{config_path} has invalid settings")

    for key in RANGE_KEYS:
        if isinstance(config[key], list):
            config[key] = tuple(config[key])
    return config


def update_config(config_dir, **kwargs):
    """Update the config file stored at `config_dir/config.yml`.

    Examples
    --------
    To widen the coefficient search box::

      >>> update_config(config_dir, coefficient_box=[-6, 8])
      >>> print(load_config(config_dir)['coefficient_box'])
      (-6, 8)
    """
    config = load_config(config_dir, check_if_valid=False)
    config.update(kwargs)
    config = {k: list(v) if isinstance(v, tuple) else v for k, v in config.items()}
    generate_config(config_dir, **config)


def fixtures_dir():
    """Directory of the example fixtures shipped with the package."""
    return os.path.join(os.path.dirname(os.path.abspath(__file__)), "data", "fixtures")


def list_fixtures(directory=None):
    """Fixture files (`.txt` polytopes and `.json` reports) in a directory."""
    directory = fixtures_dir() if directory is None else directory
    return sorted(
        os.path.join(directory, f)
        for f in os.listdir(directory)
        if os.path.splitext(f)[1] in (".txt", ".json")
    )


def load_polytope_fixture(path):
    """Load a toric example.

    The file holds a header line ``dim d``, one vertex per line as
    space-separated integers, a line ``xi: a b c`` and optionally
    ``expect: <case_id>``. Blank lines and ``#`` comments are ignored.

    Returns
    -------
    polytope: DelzantPolytope

    circle: CircleSubgroup

    expect: str or None
    """
    with open(path, "r") as f:
        lines = [line.split("#", 1)[0].strip() for line in f]
    lines = [line for line in lines if line]
    if not lines:
        raise FixtureParseError(f"{path}: empty fixture")

    header = re.fullmatch(r"dim\s+(\d+)", lines[0])
    if header is None:
        raise FixtureParseError(f"{path}: expected `dim d` header, got {lines[0]!r}")
    dim = int(header.group(1))

    vertices, xi, expect = [], None, None
    for line in lines[1:]:
        if line.startswith("xi:"):
            xi = _parse_ints(path, line[3:], dim)
        elif line.startswith("expect:"):
            expect = line[7:].strip() or None
        elif xi is not None:
            raise FixtureParseError(f"{path}: vertex after the `xi:` line: {line!r}")
        else:
            vertices.append(_parse_ints(path, line, dim))
    if xi is None:
        raise FixtureParseError(f"{path}: missing `xi:` line")
    try:
        return polytope_from_vertices(vertices), CircleSubgroup(xi), expect
    except ValueError as err:
        raise FixtureParseError(f"{path}: {err}")


def _parse_ints(path, text, dim):
    try:
        values = tuple(int(v) for v in text.split())
    except ValueError:
        raise FixtureParseError(f"{path}: non-integer entry in {text.strip()!r}")
    if len(values) != dim:
        raise FixtureParseError(f"{path}: expected {dim} integers, got {text.strip()!r}")
    return values


def load_report_fixture(path):
    """Load the precomputed fixed point data of a non-toric example.

    The commented JSON object has keys ``b_min``, ``b_max``, ``m`` (points
    per level ±1), ``z0_areas`` (list) and optionally ``expect`` and
    ``description``.

    Returns
    -------
    summary: FixedPointSummary

    expect: str or None
    """
    with open(path, "r") as f:
        try:
            data = commentjson.load(f)
        except Exception as err:
            raise FixtureParseError(f"{path}: {err}")
    missing = [k for k in ("b_min", "b_max") if k not in data]
    if missing:
        raise FixtureParseError(f"{path}: missing keys {missing}")
    try:
        summary = summary_from_counts(
            int(data.get("m", 0)),
            [int(a) for a in data.get("z0_areas", [])],
            int(data["b_min"]),
            int(data["b_max"]),
            source=os.path.basename(path),
        )
    except (TypeError, ValueError) as err:
        raise FixtureParseError(f"{path}: {err}")
    return summary, data.get("expect")


def _format_classes(model, classes):
    return ", ".join(format_class(model, c) for c in classes)


def _component_text(record, level):
    comps = [f for f in record.fixed if f.level == level]
    if abs(level) == 1:
        if not comps:
            return ""
        return "1 pt" if len(comps) == 1 else f"{len(comps)} pts"
    if abs(level) == 2:
        return f"S2, b={comps[0].b}"
    return "; ".join(
        f"{f.shape} {format_class(record.model0, f.pd_class)} (area {f.area})" for f in comps
    )


MARKDOWN_HEADERS = [
    "case",
    "(M0, [w0])",
    "e(P-2+)",
    "Z_min",
    "Z-1",
    "Z0",
    "Z1",
    "Z_max",
    "b2",
    "c1^3",
    "Fano",
]


def record_to_dict(record):
    """Field-for-field JSON mapping of a :py:class:`TFDRecord`."""
    M0 = record.model0
    return {
        "case_id": record.case_id,
        "profile": {
            "interior_levels": sorted(record.profile.interior_levels),
            "m": record.profile.m,
            "z0_components": record.profile.z0_components,
        },
        "model0": M0.label,
        "omega0": format_class(M0, record.omega0),
        "euler_minus2_plus": format_class(record.base_model, record.euler_minus2_plus),
        "fixed": [
            {
                "level": f.level,
                "shape": f.shape,
                "genus": f.genus,
                "pd_class": None if f.pd_class is None else format_class(M0, f.pd_class),
                "area": f.area,
                "normal_chern": None if f.normal_chern is None else list(f.normal_chern),
                "b": f.b,
            }
            for f in record.fixed
        ],
        "b_min": record.b_min,
        "b_max": record.b_max,
        "b2": record.b2,
        "c1_cubed": record.c1_cubed,
        "vanishing_cycles": [format_class(M0, C) for C in record.cycles],
        "euler_max": format_class(record.max_side.target, record.euler_max),
        "mori_mukai": record.mori_mukai,
        "fano": record.fano,
    }


def records_to_dataframe(records):
    """One row per record with the master-table columns."""
    rows = []
    for r in records:
        rows.append(
            [
                r.case_id,
                f"({r.model0.label}, {_format_classes(r.model0, [r.omega0])})",
                _format_classes(r.base_model, [r.euler_minus2_plus]),
                _component_text(r, -2),
                _component_text(r, -1),
                _component_text(r, 0),
                _component_text(r, 1),
                _component_text(r, 2),
                r.b2,
                r.c1_cubed,
                r.mori_mukai,
            ]
        )
    return pd.DataFrame(rows, columns=MARKDOWN_HEADERS)


def format_records(records, kind="markdown"):
    """Serialize records as ``"json"``, ``"markdown"`` or ``"tsv"``.

    Returns
    -------
    text: str
    """
    if kind == "json":
        payload = {
            "schema_version": SCHEMA_VERSION,
            "records": [record_to_dict(r) for r in records],
        }
        return json.dumps(payload, indent=2, ensure_ascii=False)
    df = records_to_dataframe(records)
    if kind == "markdown":
        return df.to_markdown(index=False, tablefmt="pipe")
    if kind == "tsv":
        return df.to_csv(sep="\t", index=False)
    raise ValueError(f"Unknown output format {kind!r}; choose json, markdown or tsv")
