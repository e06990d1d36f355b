"""Raster rendering of field heatmaps, Lambert qubit discs and hybrid disc grids.

Images are RGBA ``uint8`` arrays (rows top to bottom).  Colours come from a
diverging map that is white at zero and linear in |W| towards the endpoint
colours, saturating outside [vmin, vmax].  Each qubit disc is an equal-area
(Lambert azimuthal) view of the sphere: north pole at the centre, south pole
on the rim, equator at radius 1/sqrt(2).
"""

from __future__ import annotations

import base64
import functools
import hashlib
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from PIL import Image

from .errors import MissingSliceError, RenderSpecError
from .kernels import CV_BOUND, DV_BOUND, HYBRID_BOUND, SQRT3
from .wigner import max_abs_per_alpha, num_threads

__all__ = [
    "RenderSpec",
    "default_limits",
    "colorize",
    "lambert_project",
    "lambert_inverse",
    "sphere_interpolate",
    "render_dv_disc",
    "render_cv",
    "render_hybrid",
    "encode_png",
    "encode_svg",
    "save_image",
    "write_manifest",
]


@dataclass(frozen=True)
class RenderSpec:
    vmin: Optional[float] = None
    vmax: Optional[float] = None
    neg_color: tuple = (0.0, 0.0, 1.0)
    pos_color: tuple = (1.0, 0.0, 0.0)
    disc_grid: tuple = (13, 13)
    disc_resolution: int = 48
    transparency_norm: float = HYBRID_BOUND
    output: str = "png"
    image_size: Optional[tuple] = None
    equator: bool = False

    def __post_init__(self):
        if (self.vmin is None) != (self.vmax is None):
            raise RenderSpecError("set both vmin and vmax or neither")
        if self.vmin is not None and not (self.vmin < 0 < self.vmax):
            raise RenderSpecError(f"need vmin < 0 < vmax, got ({self.vmin}, {self.vmax})")
        if min(self.disc_grid) < 2:
            raise RenderSpecError(f"disc_grid counts must be >= 2, got {self.disc_grid}")
        if self.disc_resolution < 4:
            raise RenderSpecError("disc_resolution must be at least 4 pixels")
        if not self.transparency_norm > 0:
            raise RenderSpecError("transparency_norm must be positive")
        if self.output not in ("png", "svg"):
            raise RenderSpecError(f"unsupported output format {self.output!r}")

    def limits(self, kind, trace_target=1.0):
        if self.vmin is not None:
            return self.vmin, self.vmax
        return default_limits(kind, trace_target)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        for key in ("neg_color", "pos_color", "disc_grid", "image_size"):
            if d.get(key) is not None:
                d[key] = tuple(d[key])
        return cls(**d)


def default_limits(kind, trace_target=1.0):
    """Symmetric colour limits by field kind (traceless qubit operators get sqrt(3))."""
    if kind == "cv":
        return -CV_BOUND, CV_BOUND
    if kind == "dv":
        bound = SQRT3 if abs(trace_target) < 1e-12 else DV_BOUND
        return -bound, bound
    if kind == "hybrid":
        return -HYBRID_BOUND, HYBRID_BOUND
    raise RenderSpecError(f"unknown field kind {kind!r}")


def colorize(values, vmin, vmax, neg_color=(0, 0, 1), pos_color=(1, 0, 0)):
    """Map values to RGBA uint8; NaN becomes fully transparent."""
    if not vmin < vmax:
        raise RenderSpecError(f"need vmin < vmax, got ({vmin}, {vmax})")
    v = np.asarray(values, dtype=float)
    nan = np.isnan(v)
    scaled = np.where(v >= 0, v / vmax if vmax > 0 else 0.0, -v / vmin if vmin < 0 else 0.0)
    scaled = np.clip(np.nan_to_num(scaled), -1.0, 1.0)[..., None]
    mag = np.abs(scaled)
    end = np.where(scaled >= 0, np.asarray(pos_color, float), np.asarray(neg_color, float))
    rgb = 1.0 + mag * (end - 1.0)
    out = np.empty(v.shape + (4,), dtype=np.uint8)
    out[..., :3] = np.rint(rgb * 255)
    out[..., 3] = np.where(nan, 0, 255)
    out[nan, :3] = 0
    return out


def lambert_project(theta, phi):
    """Sphere (theta, phi) -> unit disc (x, y); r = sin(theta/2)."""
    r = np.sin(np.asarray(theta, float) / 2)
    return r * np.cos(phi), r * np.sin(phi)


def lambert_inverse(x, y):
    r = np.clip(np.hypot(x, y), 0.0, 1.0)
    return 2 * np.arcsin(r), np.mod(np.arctan2(y, x), 2 * np.pi)


def sphere_interpolate(values, sphere_grid, theta, phi):
    """Bilinear interpolation of a (n_theta, n_phi) field; phi is periodic."""
    nodes = sphere_grid.theta
    t = np.clip(theta, nodes[0], nodes[-1])
    i1 = np.clip(np.searchsorted(nodes, t), 1, nodes.size - 1)
    i0 = i1 - 1
    ft = (t - nodes[i0]) / (nodes[i1] - nodes[i0])

    n_phi = sphere_grid.n_phi
    u = np.mod(phi, 2 * np.pi) / (2 * np.pi / n_phi)
    j0 = np.floor(u).astype(int) % n_phi
    j1 = (j0 + 1) % n_phi
    fp = u - np.floor(u)

    v = np.asarray(values)
    top = v[i0, j0] * (1 - fp) + v[i0, j1] * fp
    bot = v[i1, j0] * (1 - fp) + v[i1, j1] * fp
    return top * (1 - ft) + bot * ft


@functools.lru_cache(maxsize=16)
def _disc_coords(resolution):
    """Pixel radius and inverse-projected (theta, phi) for a square disc tile."""
    c = (np.arange(resolution) + 0.5) / resolution * 2 - 1
    x, y = np.meshgrid(c, -c)  # row 0 is +y
    theta, phi = lambert_inverse(x, y)
    return np.hypot(x, y), theta, phi


def _disc_tile(values, sphere_grid, resolution, vmin, vmax, spec, opacity=1.0):
    r, theta, phi = _disc_coords(resolution)
    sampled = sphere_interpolate(values, sphere_grid, theta, phi)
    tile = colorize(sampled, vmin, vmax, spec.neg_color, spec.pos_color)
    if spec.equator:
        ring = np.abs(r - 1 / np.sqrt(2)) < 1.0 / resolution
        tile[ring, :3] = 255
    tile[..., 3] = np.where(r <= 1.0, np.rint(255 * opacity), 0).astype(np.uint8)
    tile[r > 1.0, :3] = 0
    return tile


def render_dv_disc(values, sphere_grid, spec=None, trace_target=1.0):
    spec = spec or RenderSpec()
    vmin, vmax = spec.limits("dv", trace_target)
    res = spec.image_size[0] if spec.image_size else spec.disc_resolution
    return _disc_tile(values, sphere_grid, res, vmin, vmax, spec)


def render_cv(values, cv_grid, spec=None):
    """Heatmap with Re(alpha) left to right and Im(alpha) bottom to top."""
    spec = spec or RenderSpec()
    vmin, vmax = spec.limits("cv")
    img = np.asarray(values, dtype=float).T[::-1]  # rows: Im descending
    if spec.image_size:
        w, h = spec.image_size
        rows = np.minimum((np.arange(h) * img.shape[0]) // h, img.shape[0] - 1)
        cols = np.minimum((np.arange(w) * img.shape[1]) // w, img.shape[1] - 1)
        img = img[np.ix_(rows, cols)]
    return colorize(img, vmin, vmax, spec.neg_color, spec.pos_color)


def disc_centres(cv_grid, disc_grid):
    n_x, n_y = disc_grid
    re = np.linspace(*cv_grid.re_range, n_x)
    im = np.linspace(*cv_grid.im_range, n_y)
    return re[:, None] + 1j * im[None, :]


def render_hybrid(field, spec=None):
    """Grid of Lambert discs, one per field node, faded by max|W| at that node.

    Disc centres are spread evenly over the field window and must coincide
    with nodes of ``field.cv_grid``.
    """
    spec = spec or RenderSpec()
    vmin, vmax = spec.limits("hybrid")
    n_x, n_y = spec.disc_grid
    res = spec.disc_resolution
    centres = disc_centres(field.cv_grid, spec.disc_grid)
    index = {}
    for i in range(n_x):
        for j in range(n_y):
            idx = field.cv_grid.index_of(centres[i, j])
            if idx is None:
                raise MissingSliceError(
                    f"field has no slice at disc centre alpha={centres[i, j]:.6g}; "
                    "evaluate the hybrid field on the disc-centre grid first"
                )
            index[i, j] = idx
    peak = max_abs_per_alpha(field)

    def tile(key):
        i_re, i_im = index[key]
        values = field.slab(i_re, i_re + 1)[0, i_im]
        opacity = min(1.0, peak[i_re, i_im] / spec.transparency_norm)
        return key, _disc_tile(values, field.sphere_grid, res, vmin, vmax, spec, opacity)

    keys = sorted(index)
    if num_threads() > 1:
        with ThreadPoolExecutor(max_workers=num_threads()) as pool:
            tiles = dict(pool.map(tile, keys))
    else:
        tiles = dict(map(tile, keys))

    canvas = np.zeros((n_y * res, n_x * res, 4), dtype=np.uint8)
    for (i, j), t in sorted(tiles.items()):
        row = (n_y - 1 - j) * res
        canvas[row:row + res, i * res:(i + 1) * res] = t
    return canvas


def encode_png(rgba):
    buf = io.BytesIO()
    Image.fromarray(np.ascontiguousarray(rgba, dtype=np.uint8), "RGBA").save(
        buf, format="PNG", compress_level=6
    )
    return buf.getvalue()


def encode_svg(rgba, extent=None, labels=("Re α", "Im α"), margin=40):
    """SVG with the raster embedded as a PNG and a vector frame and axes."""
    h, w = rgba.shape[:2]
    png = base64.b64encode(encode_png(rgba)).decode("ascii")
    W, H = w + 2 * margin, h + 2 * margin
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
        f'<image x="{margin}" y="{margin}" width="{w}" height="{h}" '
        f'href="data:image/png;base64,{png}"/>',
        f'<rect x="{margin}" y="{margin}" width="{w}" height="{h}" fill="none" '
        'stroke="black" stroke-width="1"/>',
    ]
    if extent is not None:
        (x0, x1), (y0, y1) = extent
        fs = 11
        parts += [
            f'<text x="{margin}" y="{H - margin / 3:.1f}" font-size="{fs}">{x0:g}</text>',
            f'<text x="{margin + w}" y="{H - margin / 3:.1f}" font-size="{fs}" '
            f'text-anchor="end">{x1:g}</text>',
            f'<text x="{margin / 8:.1f}" y="{margin + h}" font-size="{fs}">{y0:g}</text>',
            f'<text x="{margin / 8:.1f}" y="{margin + fs}" font-size="{fs}">{y1:g}</text>',
            f'<text x="{margin + w / 2:.1f}" y="{H - margin / 3:.1f}" font-size="{fs}" '
            f'text-anchor="middle">{labels[0]}</text>',
            f'<text x="{margin / 3:.1f}" y="{margin + h / 2:.1f}" font-size="{fs}" '
            f'transform="rotate(-90 {margin / 3:.1f} {margin + h / 2:.1f})" '
            f'text-anchor="middle">{labels[1]}</text>',
        ]
    parts.append("</svg>\n")
    return "\n".join(parts).encode()


def save_image(path, rgba, fmt=None, extent=None):
    """Write PNG or SVG bytes; returns their sha256 hex digest."""
    fmt = fmt or str(path).rsplit(".", 1)[-1].lower()
    if fmt == "png":
        blob = encode_png(rgba)
    elif fmt == "svg":
        blob = encode_svg(rgba, extent)
    else:
        raise RenderSpecError(f"unsupported output format {fmt!r}")
    with open(path, "wb") as fh:
        fh.write(blob)
    return hashlib.sha256(blob).hexdigest()


def write_manifest(path, spec, input_path, output_path, digest):
    doc = {
        "render_spec": spec.to_dict(),
        "input": str(input_path),
        "output": str(output_path),
        "sha256": digest,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
    return doc

