"""JSON documents for laws and Lévy specs, CSV tables for grids."""

import csv
import dataclasses
import json
from pathlib import Path

import numpy as np

from . import dist
from .errors import InvalidSpec
from .levy import CompoundPoisson, FiniteAtoms, LevySpec

_LEAVES = {cls.variant: cls for cls in (
    dist.Exponential, dist.Gamma, dist.Beta, dist.BetaT, dist.LogNormal, dist.Uniform,
    dist.PerturbedLogNormal)}
_DERIVED = {cls.variant: cls for cls in (dist.Scaled, dist.SizeBiased, dist.Excess)}


def levy_to_dict(spec):
    j = spec.jumps
    if j is None:
        jumps = None
    elif isinstance(j, CompoundPoisson):
        jumps = {"type": "compound_poisson", "rate": j.rate, "jump_mean": j.jump_mean}
    else:
        jumps = {"type": "atoms", "atoms": [list(p) for p in j.atoms]}
    return {"variant": "levy", "d": spec.d, "sigma2": spec.sigma2, "jumps": jumps}


def levy_from_dict(doc):
    jumps = doc.get("jumps")
    if jumps is None:
        j = None
    elif jumps.get("type") == "compound_poisson":
        j = CompoundPoisson(float(jumps["rate"]), float(jumps["jump_mean"]))
    elif jumps.get("type") == "atoms":
        j = FiniteAtoms(tuple((float(m), float(a)) for m, a in jumps["atoms"]))
    else:
        raise InvalidSpec("unknown jump type %r" % jumps.get("type"))
    return LevySpec(float(doc.get("d", 0.0)), float(doc.get("sigma2", 0.0)), j)


def spec_to_dict(spec):
    """JSON-ready document with a ``variant`` discriminator."""
    if isinstance(spec, LevySpec):
        return levy_to_dict(spec)
    if isinstance(spec, dist.GridSurvival):
        return {"variant": spec.variant, "points": [[x, s] for x, s in zip(spec.x, spec.s)]}
    if isinstance(spec, dist.LevyLog):
        return {"variant": spec.variant, "levy": levy_to_dict(spec.levy)}
    doc = {"variant": spec.variant}
    for f in dataclasses.fields(spec):
        value = getattr(spec, f.name)
        doc[f.name] = spec_to_dict(value) if isinstance(value, dist.DistributionSpec) else value
    return doc


def spec_from_dict(doc):
    try:
        variant = doc["variant"]
    except (KeyError, TypeError):
        raise InvalidSpec("spec document needs a 'variant' field") from None
    params = {k: v for k, v in doc.items() if k != "variant"}
    try:
        if variant in _LEAVES:
            return _LEAVES[variant](**{k: float(v) for k, v in params.items()})
        if variant == "grid_survival":
            pts = np.asarray(params["points"], dtype=float)
            return dist.GridSurvival(pts[:, 0], pts[:, 1])
        if variant == "levy_log":
            return dist.LevyLog(levy_from_dict(params["levy"]))
        if variant == "levy":
            return dist.LevyLog(levy_from_dict(doc))
        if variant in _DERIVED:
            base = spec_from_dict(params.pop("base"))
            return _DERIVED[variant](base, **{k: float(v) for k, v in params.items()})
        if variant == "product":
            return dist.ProductIndep(spec_from_dict(params["a"]), spec_from_dict(params["b"]))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        if isinstance(exc, InvalidSpec):
            raise
        raise InvalidSpec("bad parameters for %s: %s" % (variant, exc)) from None
    raise InvalidSpec("unknown variant %r" % variant)


def dumps(spec):
    return json.dumps(spec_to_dict(spec), sort_keys=True)


def loads(text):
    return spec_from_dict(json.loads(text))


def read_xy_csv(path):
    """Two numeric columns; a non-numeric first row is taken as a header."""
    rows = []
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row or not "".join(row).strip():
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except (ValueError, IndexError):
                if i == 0:
                    continue
                raise InvalidSpec("%s line %d: expected two numbers" % (path, i + 1)) from None
    if len(rows) < 2:
        raise InvalidSpec("%s: need at least two rows" % path)
    arr = np.array(rows)
    return arr[:, 0], arr[:, 1]


def read_grid_survival_csv(path):
    x, s = read_xy_csv(path)
    return dist.GridSurvival(x, s)


def load_spec(path):
    """Read a law from a JSON document or a two-column ``(x, S)`` CSV."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return read_grid_survival_csv(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InvalidSpec("%s is not valid JSON: %s" % (path, exc)) from None
    return spec_from_dict(doc)


def load_levy(path):
    doc = json.loads(Path(path).read_text())
    if doc.get("variant") == "levy_log":
        doc = doc["levy"]
    if doc.get("variant") not in ("levy", None):
        raise InvalidSpec("expected a Lévy spec document")
    return levy_from_dict(doc)
