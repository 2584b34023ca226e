"""Command-line interface: ``wfkit <command> [options]``.

Exit codes: 0 success, 1 product condition violated, 2 malformed input,
3 parameter violation.  Results go to stdout (or ``--out``); diagnostics go
to stderr only.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Optional

import numpy as np

from . import catalog, conic, geometry, oscillatory, radon, spectral
from .conic import Everywhere, SampledSet, Tolerance
from .core import Grid, SampledField, centered_grid, make_grid
from .errors import MalformedInput, ParameterError

SCHEMA = "wf/1"
EXIT_OK, EXIT_VIOLATED, EXIT_MALFORMED, EXIT_PARAM = 0, 1, 2, 3
DEFAULT_EXTENT = {1: 4.0, 2: 3.0}
DEFAULT_STRIDE = {1: 2, 2: 8}


# ------------------------------------------------------------------ readers

def _tokens_pgm(data: bytes):
    """Header tokens of a PGM file plus the offset just past the header."""
    toks, i, n = [], 0, len(data)
    while len(toks) < 4:
        while i < n and data[i:i + 1].isspace():
            i += 1
        if i < n and data[i:i + 1] == b"#":
            while i < n and data[i:i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        j = i
        while j < n and not data[j:j + 1].isspace() and data[j:j + 1] != b"#":
            j += 1
        if j == i:
            raise MalformedInput("truncated PGM header")
        toks.append(data[i:j])
        i = j
    return toks, i


def read_pgm(path: str) -> np.ndarray:
    """Grey image scaled to ``[0, 1]``; row 0 is the top of the picture."""
    with open(path, "rb") as fh:
        data = fh.read()
    toks, pos = _tokens_pgm(data)
    magic = toks[0]
    try:
        w, h, maxval = (int(t) for t in toks[1:4])
    except ValueError:
        raise MalformedInput("PGM header must hold integer width, height and maxval")
    if w <= 0 or h <= 0 or not (0 < maxval < 65536):
        raise MalformedInput("PGM size or maxval out of range")
    if magic == b"P2":
        body = data[pos:].split()
        try:
            vals = np.array([int(t) for t in body[:w * h]], dtype=float)
        except ValueError:
            raise MalformedInput("non-integer pixel in P2 body")
    elif magic == b"P5":
        pos += 1  # single whitespace after maxval
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        vals = np.frombuffer(data, dtype=dtype, count=min(w * h, (len(data) - pos) // dtype.itemsize),
                             offset=pos).astype(float)
    else:
        raise MalformedInput(f"unsupported PGM magic {magic!r} (need P2 or P5)")
    if vals.size != w * h:
        raise MalformedInput(f"PGM body holds {vals.size} pixels, expected {w * h}")
    if np.any(vals > maxval) or np.any(vals < 0):
        raise MalformedInput("pixel value exceeds maxval")
    return vals.reshape(h, w) / maxval


def image_to_field_values(img: np.ndarray) -> np.ndarray:
    """Image (row 0 = top) to node values indexed ``[ix, iy]``."""
    return np.ascontiguousarray(img[::-1, :].T)


def _read_rows(path: str):
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except UnicodeDecodeError:
        raise MalformedInput(f"{path} is not a text CSV file")
    if not rows:
        raise MalformedInput(f"{path} holds no rows")
    try:
        [float(c) for c in rows[0]]
    except ValueError:
        rows = rows[1:]  # header
    try:
        return [[float(c) for c in r] for r in rows]
    except ValueError as exc:
        raise MalformedInput(f"non-numeric CSV entry: {exc}")


def read_csv_field(path: str, dim: Optional[int], n: Optional[int],
                   extent: Optional[float]) -> SampledField:
    """CSV input.

    1D: ``x,value`` (or ``x,re,im``) rows on a uniform ``x`` grid, or a
    single column of values placed on a centered grid of ``--extent``.
    2D: a square matrix laid out like an image (first row = largest ``y``).
    """
    rows = _read_rows(path)
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise MalformedInput("CSV rows differ in length")
    width = widths.pop()
    is_2d = dim == 2 or (dim is None and width > 3 and len(rows) == width)
    try:
        if is_2d:
            arr = np.asarray(rows, dtype=float)
            if arr.shape[0] != arr.shape[1]:
                raise MalformedInput("2D CSV must be a square matrix")
            g = centered_grid(2, extent or DEFAULT_EXTENT[2], arr.shape[0])
            return SampledField(g, image_to_field_values(arr).astype(complex))
        arr = np.asarray(rows, dtype=float)
        if width == 1:
            g = centered_grid(1, extent or DEFAULT_EXTENT[1], len(arr))
            return SampledField(g, arr[:, 0].astype(complex))
        if width not in (2, 3):
            raise MalformedInput("1D CSV needs 1, 2 or 3 columns")
        x = arr[:, 0]
        step = np.diff(x)
        if len(x) < 2 or np.any(step <= 0) or np.ptp(step) > 1e-9 * max(1.0, abs(step[0])) * len(x):
            raise MalformedInput("x column must be strictly increasing and uniform")
        vals = arr[:, 1] + (1j * arr[:, 2] if width == 3 else 0)
        g = make_grid(1, x[0], step.mean() * len(x), len(x))
        return SampledField(g, np.asarray(vals, dtype=complex))
    except ValueError as exc:
        if isinstance(exc, MalformedInput):
            raise
        raise MalformedInput(f"unsupported sample count: {exc}")


def read_pgm_field(path: str, extent: Optional[float]) -> SampledField:
    img = read_pgm(path)
    if img.shape[0] != img.shape[1]:
        raise MalformedInput("image must be square")
    try:
        g = centered_grid(2, extent or DEFAULT_EXTENT[2], img.shape[0])
    except ValueError as exc:
        raise MalformedInput(f"unsupported image size: {exc}")
    return SampledField(g, image_to_field_values(img).astype(complex))


# ----------------------------------------------------------------- helpers

def _grid_for(d: catalog.CatalogDistribution, n: Optional[int], extent: Optional[float]) -> Grid:
    if n is None and extent is None:
        return catalog.default_grid(d)
    base = catalog.default_grid(d)
    return centered_grid(d.dim, extent if extent is not None else base.extent[0],
                         n if n is not None else base.n)


def load_field(args) -> tuple:
    """Resolve the single input source to ``(field, description)``."""
    sources = [s for s in ("catalog", "csv", "pgm") if getattr(args, s, None)]
    if len(sources) != 1:
        raise MalformedInput("give exactly one of --catalog, --csv, --pgm")
    src = sources[0]
    if src == "catalog":
        try:
            d = catalog.from_id(args.catalog)
        except ValueError as exc:
            raise MalformedInput(str(exc))
        if d.oracle_only:
            raise MalformedInput(f"{args.catalog} has no sampler (oracle only)")
        if args.epsilon is not None:
            d = d.with_eps(args.epsilon)
        try:
            g = _grid_for(d, args.n, args.extent)
        except ValueError as exc:
            raise ParameterError(str(exc))
        try:
            return catalog.sample(d, g), {"catalog": args.catalog}
        except ValueError as exc:
            raise ParameterError(str(exc))
    if src == "csv":
        return read_csv_field(args.csv, None, args.n, args.extent), {"csv": os.path.basename(args.csv)}
    return read_pgm_field(args.pgm, args.extent), {"pgm": os.path.basename(args.pgm)}


def parse_points(text: str, dim: int) -> np.ndarray:
    try:
        pts = [[float(v) for v in p.split(",")] for p in text.split(";") if p.strip()]
    except ValueError:
        raise MalformedInput(f"cannot parse points {text!r}")
    if not pts or any(len(p) != dim for p in pts):
        raise MalformedInput(f"points must be ';'-separated tuples of {dim} numbers")
    return np.asarray(pts)


def lattice_points(g: Grid, r2: float, stride: int) -> np.ndarray:
    """Grid nodes every ``stride`` cells whose window of radius ``r2`` fits."""
    if stride < 1:
        raise ParameterError("stride must be >= 1")
    ax = g.axis(0)
    idx = np.arange(0, g.n, stride)
    keep = ax[idx][(ax[idx] - r2 >= g.lower()[0]) & (ax[idx] + r2 <= g.upper()[0])]
    if g.dim == 1:
        return keep[:, None]
    X, Y = np.meshgrid(keep, keep, indexing="ij")
    return np.column_stack([X.ravel(), Y.ravel()])


def _f(v):
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        return None
    return v


def sample_rows(s: SampledSet, extra_keys=()):
    rows = []
    for i, (x, k, sc) in enumerate(zip(s.points, s.directions, s.scores)):
        r = {"x": [_f(v) for v in x], "k": [_f(v) for v in k]}
        if s.dim == 2:
            r["angle"] = _f(math.atan2(k[1], k[0]))
        for key, name in extra_keys:
            if key in s.extra and i < len(s.extra[key]):
                val = s.extra[key][i]
                r[name] = val if isinstance(val, (bool, list)) else _f(val)
        r["score"] = _f(sc)
        rows.append(r)
    return rows


def samples_to_csv(rows, dim: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    keys = [k for k in rows[0] if k not in ("x", "k")] if rows else ["score"]
    w.writerow([f"x{i}" for i in range(dim)] + [f"k{i}" for i in range(dim)] + keys)
    for r in rows:
        vals = list(r["x"]) + list(r["k"]) + [r.get(k) for k in keys]
        w.writerow([_csv_num(v) for v in vals])
    return buf.getvalue()


def _csv_num(v):
    if isinstance(v, bool):
        return int(v)
    if isinstance(v, float):
        return f"{v:.17e}"
    if isinstance(v, list):
        return " ".join(_csv_num(u) for u in v)
    return "" if v is None else v


def dump_json(obj) -> str:
    return json.dumps(obj, indent=1, allow_nan=False) + "\n"


def emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _grid_json(g: Grid):
    return {"dim": g.dim, "n": g.n, "origin": list(g.origin), "extent": list(g.extent)}


def _check_format(args):
    if args.format not in ("json", "csv"):
        raise ParameterError("--format must be json or csv")


# ----------------------------------------------------------------- commands

def cmd_estimate_wf(args) -> int:
    _check_format(args)
    field, src = load_field(args)
    g = field.grid
    params = spectral.EstimatorParams(
        r1=args.window_r1, r2=args.window_r2, directions=args.directions, k_min=args.kmin,
        count=args.radii, **({} if args.pthr is None else {"p_thr": args.pthr}))
    params = params.resolve(g)
    pts = (parse_points(args.points, g.dim) if args.points
           else lattice_points(g, params.r2, args.stride or DEFAULT_STRIDE[g.dim]))
    wf = spectral.estimate_wf(field, pts, params)
    tol = Tolerance.for_grid(g, params.direction_set(g.dim))
    rows = sample_rows(wf, (("exponent", "exponent"), ("low_confidence", "low_confidence")))
    if args.format == "csv":
        emit(samples_to_csv(rows, g.dim), args.out)
        return EXIT_OK
    report = {"schema": SCHEMA, "method": "fourier", "input": src, "grid": _grid_json(g),
              "params": params.as_dict(), "base_points": len(pts),
              "tolerance": {"position": tol.position, "angle": tol.angle}, "samples": rows}
    emit(dump_json(report), args.out)
    return EXIT_OK


def cmd_radon_wf(args) -> int:
    _check_format(args)
    field, src = load_field(args)
    g = field.grid
    if g.dim != 2:
        raise ParameterError("radon-wf needs a 2D input")
    params = radon.RadonParams(r1=args.window_r1, r2=args.window_r2,
                               **({} if args.directions is None else {"directions": args.directions}))
    params = params.resolve(g)
    pts = (parse_points(args.points, 2) if args.points
           else lattice_points(g, params.r2, args.stride or DEFAULT_STRIDE[2]))
    wf = radon.estimate_wf_pm(field, pts, params)
    tol = Tolerance(2 * g.h, 1.5 * params.cap_half_angle * 2)
    rows = sample_rows(wf, (("ratio", "growth_ratio"), ("amplitude", "amplitude"),
                            ("locus", "locus")))
    if args.format == "csv":
        emit(samples_to_csv(rows, 2), args.out)
        return EXIT_OK
    report = {"schema": SCHEMA, "method": "radon", "input": src, "grid": _grid_json(g),
              "params": params.as_dict(), "base_points": len(pts),
              "tolerance": {"position": tol.position, "angle": tol.angle}, "samples": rows}
    emit(dump_json(report), args.out)
    return EXIT_OK


def load_wf_source(text: str):
    """``(wf, support, tolerance)`` from a catalog id or a ``wf/1`` JSON file."""
    if os.path.exists(text):
        try:
            with open(text) as fh:
                obj = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise MalformedInput(f"cannot read WF JSON {text}: {exc}")
        if not isinstance(obj, dict) or obj.get("schema") != SCHEMA or "samples" not in obj:
            raise MalformedInput(f"{text} is not a {SCHEMA} document")
        try:
            dim = int(obj["grid"]["dim"]) if "grid" in obj else len(obj["samples"][0]["x"])
            pts = [s["x"] for s in obj["samples"]]
            dirs = [s["k"] for s in obj["samples"]]
            wf = (SampledSet.from_lists(dim, pts, dirs, tag=os.path.basename(text))
                  if pts else SampledSet.empty(dim, os.path.basename(text)))
            t = obj.get("tolerance", {})
            tol = Tolerance(float(t.get("position", 1e-9)), float(t.get("angle", 1e-6)))
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise MalformedInput(f"malformed samples in {text}: {exc}")
        return wf, Everywhere(dim), tol
    try:
        d = catalog.from_id(text)
    except ValueError as exc:
        raise MalformedInput(str(exc))
    return catalog.exact_wf(d), catalog.support(d), conic.EXACT_TOL


def cmd_check_product(args) -> int:
    wf_u, supp_u, tu = load_wf_source(args.first)
    wf_v, supp_v, tv = load_wf_source(args.second)
    if wf_u.dim != wf_v.dim:
        raise ParameterError(f"dimensions differ ({wf_u.dim} vs {wf_v.dim})")
    tol = Tolerance(max(tu.position, tv.position), max(tu.angle, tv.angle))
    verdict = conic.hormander_check(wf_u, wf_v, tol=tol)
    report = {"schema": SCHEMA, "method": "product", "inputs": [args.first, args.second],
              "ok": verdict.ok,
              "witness": (None if verdict.witness is None else
                          {"x": [_f(v) for v in verdict.witness[0]],
                           "k": [_f(v) for v in verdict.witness[1]]})}
    if verdict.ok:
        bound = conic.product_wf_bound(wf_u, supp_u, wf_v, supp_v, tol=tol)
        samples = bound.to_samples(tol=tol)
        rows = sample_rows(samples)
        for r in rows:
            r.pop("score", None)
        report["bound"] = rows
        report["bound_form"] = bound.tag
    if args.format == "csv":
        if verdict.ok:
            emit(samples_to_csv(report["bound"], wf_u.dim), args.out)
        else:
            w = report["witness"]
            emit("ok,x,k\n0," + " ".join(_csv_num(v) for v in w["x"]) + ","
                 + " ".join(_csv_num(v) for v in w["k"]) + "\n", args.out)
    else:
        emit(dump_json(report), args.out)
    return EXIT_OK if verdict.ok else EXIT_VIOLATED


def _load_boundary(text: str):
    if os.path.exists(text):
        with open(text) as fh:
            text = fh.read()
    return geometry.boundary_from_json(text)


def _parse_offsets(spec: Optional[str], b):
    if spec is None:
        return geometry.support_offsets(b)
    try:
        lo, hi, count = spec.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError:
        raise MalformedInput("--offsets must look like lo:hi:count")
    if count < 2 or hi <= lo:
        raise ParameterError("--offsets needs hi > lo and count >= 2")
    return np.linspace(lo, hi, count)


def cmd_intersections(args) -> int:
    _check_format(args)
    b = _load_boundary(args.boundary)
    offsets = _parse_offsets(args.offsets, b)
    count = args.directions or 64
    if count < 4:
        raise ParameterError("need at least 4 directions")
    sig = geometry.intersection_signature(b, count, offsets)
    if args.format == "csv" or args.signature_out:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["nu_angle", "a", "n"])
        for i, ang in enumerate(sig.angles):
            for j, a in enumerate(sig.offsets):
                w.writerow([f"{ang:.17e}", f"{a:.17e}", int(sig.counts[i, j])])
        if args.signature_out:
            emit(buf.getvalue(), args.signature_out)
        if args.format == "csv":
            emit(buf.getvalue(), args.out)
            return EXIT_OK
    wf = geometry.wf_from_signature(sig, b)
    rows = sample_rows(wf, (("flagged", "flagged"),))
    for r in rows:
        r.pop("score", None)
    report = {"schema": SCHEMA, "method": "intersections",
              "directions": count, "offset_step": sig.offset_step,
              "jumps": [{"angle": _f(a), "offsets": [_f(v) for v in j]}
                        for a, j in zip(sig.angles, sig.jump_offsets)],
              "max_count": int(sig.counts.max()) if sig.counts.size else 0,
              "samples": rows}
    emit(dump_json(report), args.out)
    return EXIT_OK


def _phase_points(p, spec: Optional[str]) -> np.ndarray:
    if spec is None:
        spec = {"circle": "circle:256", "wightman": "cone:200"}.get(p.name, "box:1.5:0.05")
    kind, _, rest = spec.partition(":")
    try:
        if kind == "circle":
            m = int(rest or 256)
            r = math.sqrt(max(0.0, -float(np.asarray(p.dxi_phi(np.zeros(2), np.ones(1))).ravel()[0]))) \
                if p.n == 2 and p.s == 1 else 1.0
            t = 2 * np.pi * np.arange(m) / m
            return np.column_stack([r * np.cos(t), r * np.sin(t)])
        if kind == "cone":
            parts = rest.split(":") if rest else []
            m = int(parts[0]) if parts else 200
            seed = int(parts[1]) if len(parts) > 1 else 0
            return oscillatory.light_cone_samples(m, seed, include_origin=True)
        if kind == "box":
            box, step = (float(v) for v in rest.split(":"))
            if p.s == 1:
                return oscillatory.lattice_near_critical(p, box, step)
            axes = [np.arange(-box, box + 1e-12, step)] * p.n
            return np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, p.n)
    except ValueError:
        raise MalformedInput(f"cannot parse points spec {spec!r}")
    if os.path.exists(spec):
        return np.asarray(_read_rows(spec), dtype=float).reshape(-1, p.n)
    return parse_points(spec, p.n)


def cmd_oscillatory_wf(args) -> int:
    _check_format(args)
    p = oscillatory.phase_from_id(args.phase)
    pts = _phase_points(p, args.points)
    if pts.ndim != 2 or pts.shape[1] != p.n:
        raise MalformedInput(f"points must have {p.n} coordinates")
    wf = oscillatory.wf_bound_from_phase(p, pts)
    rows = sample_rows(wf, (("xi", "xi"),))
    for r in rows:
        r.pop("score", None)
    if args.format == "csv":
        emit(samples_to_csv(rows, p.n), args.out)
        return EXIT_OK
    report = {"schema": SCHEMA, "method": "oscillatory", "phase": args.phase,
              "base_points": len(pts), "degenerate": wf.extra["degenerate"], "samples": rows}
    emit(dump_json(report), args.out)
    return EXIT_OK


def cmd_catalog(args) -> int:
    _check_format(args)
    rows = []
    for ident in catalog.CATALOG_IDS:
        d = catalog.from_id(ident)
        rows.append({"id": ident, "dim": d.dim, "sampled": not d.oracle_only,
                     "wf": catalog.describe_wf(d)})
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "dim", "sampled", "wf"])
        for r in rows:
            w.writerow([r["id"], r["dim"], int(r["sampled"]), r["wf"]])
        emit(buf.getvalue(), args.out)
    else:
        emit(dump_json({"schema": SCHEMA, "catalog": rows}), args.out)
    return EXIT_OK


# ------------------------------------------------------------------ parser

def _add_common(p, estimator=True):
    p.add_argument("--out", help="write the result here instead of stdout")
    p.add_argument("--format", default="json", help="json (default) or csv")
    if not estimator:
        return
    src = p.add_argument_group("input (exactly one)")
    src.add_argument("--catalog", help="catalog id, e.g. heaviside, bv+, disk:r=1.0")
    src.add_argument("--csv", help="CSV file (1D rows or 2D square matrix)")
    src.add_argument("--pgm", help="PGM image (P2 or P5)")
    p.add_argument("--n", type=int, help="samples per axis (power of two)")
    p.add_argument("--extent", type=float, help="grid side length")
    p.add_argument("--epsilon", type=float, help="regularization for catalog samplers")
    p.add_argument("--window-r1", type=float, help="window plateau radius")
    p.add_argument("--window-r2", type=float, help="window support radius")
    p.add_argument("--directions", type=int, help="number of directions")
    p.add_argument("--points", help="base points 'x,y;x,y' (default: lattice)")
    p.add_argument("--stride", type=int, help="lattice stride in grid cells")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wfkit", description="Wavefront-set estimation tools")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate-wf", help="Fourier-side wavefront estimate")
    _add_common(p)
    p.add_argument("--kmin", type=float, help="smallest fit radius (angular wavenumber)")
    p.add_argument("--radii", type=int, help="number of fit radii")
    p.add_argument("--pthr", type=float, help="decay exponent threshold")
    p.set_defaults(func=cmd_estimate_wf)

    p = sub.add_parser("radon-wf", help="Radon-side (sign-symmetric) estimate")
    _add_common(p)
    p.set_defaults(func=cmd_radon_wf)

    p = sub.add_parser("check-product", help="product condition and product WF bound")
    p.add_argument("first", help="catalog id or wf/1 JSON file")
    p.add_argument("second", help="catalog id or wf/1 JSON file")
    _add_common(p, estimator=False)
    p.set_defaults(func=cmd_check_product)

    p = sub.add_parser("intersections", help="line/boundary intersection signature")
    p.add_argument("boundary", help="boundary JSON file or inline JSON")
    p.add_argument("--directions", type=int, help="number of directions (default 64)")
    p.add_argument("--offsets", help="lo:hi:count (default: covers the boundary)")
    p.add_argument("--signature-out", help="also write the count table as CSV here")
    _add_common(p, estimator=False)
    p.set_defaults(func=cmd_intersections)

    p = sub.add_parser("oscillatory-wf", help="wavefront bound from a phase function")
    p.add_argument("--phase", required=True, help="circle, wightman or linear:[...]")
    p.add_argument("--points", help="circle:N, cone:N[:seed], box:L:step, CSV path or 'x,y;...'")
    _add_common(p, estimator=False)
    p.set_defaults(func=cmd_oscillatory_wf)

    p = sub.add_parser("catalog", help="list catalog ids and exact wavefront sets")
    _add_common(p, estimator=False)
    p.set_defaults(func=cmd_catalog)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_MALFORMED
    try:
        return args.func(args)
    except MalformedInput as exc:
        print(f"wfkit: malformed input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except ParameterError as exc:
        print(f"wfkit: parameter violation: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except (OSError, json.JSONDecodeError) as exc:
        print(f"wfkit: cannot read input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except ValueError as exc:
        print(f"wfkit: parameter violation: {exc}", file=sys.stderr)
        return EXIT_PARAM


if __name__ == "__main__":
    sys.exit(main())
