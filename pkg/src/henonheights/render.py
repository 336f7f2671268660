"""Escape-rate rasters over a window of complex parameters.

Each pixel iterates P_t forward and backward in complex128 until the sup norm
passes R. The shade value is (1/d^n) log‖H^{±n}(P_t)‖ at the first escape, a
finite-step stand-in for G; pixels that never pass R within the budget are
flagged bounded and painted black.
"""
from __future__ import annotations

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .henon import HenonFamily, InitialPoint
from .localgreen import Place, filtration_consts

BOUNDED, ESCAPED = 0, 1


@dataclass(frozen=True)
class Window:
    center: complex
    half_width: float
    half_height: float
    resolution: tuple[int, int]

    def __post_init__(self):
        if self.half_width <= 0 or self.half_height <= 0:
            raise ValueError("window extents must be positive")
        if self.resolution[0] < 1 or self.resolution[1] < 1:
            raise ValueError("resolution must be positive")

    @classmethod
    def square(cls, center: complex, radius: float, res: int) -> "Window":
        return cls(complex(center), float(radius), float(radius), (res, res))

    def grid(self) -> np.ndarray:
        """Sample parameters, row 0 at the top; pixel (H//2, W//2) is the center itself.

        Row j and row H - j sit at exactly conjugate heights when the center is real."""
        W, H = self.resolution
        xs = self.half_width * ((2 * np.arange(W) - 2 * (W // 2)) / W)
        ys = self.half_height * ((2 * (H // 2) - 2 * np.arange(H)) / H)
        c = complex(self.center)
        return (c.real + xs)[None, :] + 1j * (c.imag + ys)[:, None]

    @property
    def center_index(self) -> tuple[int, int]:
        return self.resolution[1] // 2, self.resolution[0] // 2

    @property
    def max_abs(self) -> float:
        c = complex(self.center)
        return math.hypot(abs(c.real) + self.half_width, abs(c.imag) + self.half_height)


FIGURE_WINDOWS = {
    "fig1": (InitialPoint.const(0, 0), 0.0),
    "fig2": (InitialPoint.const(0, 0.5), 0.1),
    "fig3": (InitialPoint.const(-1, 1), -1.0),
}


@dataclass
class EscapeGrid:
    value: np.ndarray        # float64, 0 where bounded
    escaped_at: np.ndarray   # int32, -1 where bounded
    flag: np.ndarray         # uint8, BOUNDED or ESCAPED
    R: float
    n_max: int

    def digest(self) -> str:
        return hashlib.sha256(self.value.tobytes() + self.escaped_at.tobytes()).hexdigest()


def default_radius(family: HenonFamily, P: InitialPoint, window: Window) -> float:
    """4 × [3d]ΔL^(m+1), with L enlarged to cover the window."""
    fc = filtration_consts(family, P, Place.arch())
    L = max(fc.L, 1 << max(0, math.ceil(math.log2(max(window.max_abs, 1.0)))))
    return 4.0 * float(3 * family.d * fc.Delta) * float(L) ** (fc.m + 1)


def _poly_c(p, t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    for c in reversed(p.coeffs):
        out = out * t + float(c)
    return out


def escape_points(family: HenonFamily, P: InitialPoint, t: np.ndarray, n_max: int, R: float):
    """Escape data for an array of complex parameters; elementwise, so any
    partition of t gives identical results."""
    t = np.asarray(t, dtype=np.complex128)
    d = family.d
    dl = float(family.delta)
    cs = [_poly_c(c, t) for c in family.c]
    logR = math.log(R)
    value = np.zeros(t.shape)
    esc = np.full(t.shape, -1, dtype=np.int32)

    def f(x):
        r = x + cs[0]
        for ci in cs[1:]:
            r = r * x + ci
        return r

    for sign in (1, -1):
        x = _poly_c(P.a, t)
        y = _poly_c(P.b, t)
        alive = np.ones(t.shape, dtype=bool)
        n_dir = np.full(t.shape, -1, dtype=np.int32)
        v_dir = np.zeros(t.shape)
        with np.errstate(over="ignore", invalid="ignore"):
            for n in range(1, n_max + 1):
                if sign > 0:
                    x, y = np.where(alive, dl * y + f(x), x), np.where(alive, x, y)
                    big = np.abs(x)
                else:
                    x, y = np.where(alive, y, x), np.where(alive, (x - f(y)) / dl, y)
                    big = np.abs(y)
                nrm = np.maximum(np.abs(x), np.abs(y))
                hit = alive & (nrm > R)
                if hit.any():
                    lv = np.log(big[hit])
                    if sign < 0:
                        lv = lv - math.log(abs(dl)) / (d - 1)
                    v_dir[hit] = np.maximum(lv, logR) / float(d) ** n
                    n_dir[hit] = n
                    alive &= ~hit
                if not alive.any():
                    break
        first = (n_dir >= 0) & ((esc < 0) | (n_dir < esc))
        esc = np.where(first, n_dir, esc)
        value = np.maximum(value, v_dir)
    flag = np.where(esc >= 0, ESCAPED, BOUNDED).astype(np.uint8)
    return value, esc, flag


def escape_map(family: HenonFamily, P: InitialPoint, window: Window, n_max: int = 256,
               R: float | None = None, threads: int = 1) -> EscapeGrid:
    if R is None:
        R = default_radius(family, P, window)
    t = window.grid()
    H = t.shape[0]
    if threads <= 1:
        v, e, fl = escape_points(family, P, t, n_max, R)
    else:
        bands = np.array_split(np.arange(H), threads)
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lambda rows: escape_points(family, P, t[rows], n_max, R), bands))
        v = np.concatenate([p[0] for p in parts])
        e = np.concatenate([p[1] for p in parts])
        fl = np.concatenate([p[2] for p in parts])
    return EscapeGrid(v, e, fl, R, n_max)


def palette(grid: EscapeGrid, gamma: float = 0.5, scale: float = 8.0) -> np.ndarray:
    """Gray level 255·(1 - exp(-scale·v))^gamma for escaped pixels, at least 1; bounded → 0."""
    g = np.floor(255.0 * (1.0 - np.exp(-scale * grid.value)) ** gamma + 0.5)
    g = np.clip(g, 1, 255)
    g = np.where(grid.flag == ESCAPED, g, 0).astype(np.uint8)
    return np.repeat(g[:, :, None], 3, axis=2)


def ppm_bytes(rgb: np.ndarray) -> bytes:
    """Binary PPM with a fixed-width header (dimensions zero-padded to four digits)."""
    H, W, _ = rgb.shape
    if W > 9999 or H > 9999:
        raise ValueError("image dimensions must be below 10000")
    return f"P6\n{W:04d} {H:04d}\n255\n".encode("ascii") + np.ascontiguousarray(rgb, dtype=np.uint8).tobytes()


def write_image(grid: EscapeGrid, path, fmt: str | None = None) -> Path:
    path = Path(path)
    fmt = (fmt or path.suffix.lstrip(".") or "ppm").lower()
    rgb = palette(grid)
    if fmt == "ppm":
        path.write_bytes(ppm_bytes(rgb))
    elif fmt == "png":
        from PIL import Image
        Image.fromarray(rgb, "RGB").save(path, format="PNG")
    else:
        raise ValueError(f"unknown image format {fmt!r}")
    return path


def read_image(path) -> np.ndarray:
    from PIL import Image
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"))


def figure_grid(name: str, zoom: bool = False, res: int = 512, n_max: int = 256,
                threads: int = 1) -> EscapeGrid:
    """Rasters for the three reference windows (radius 1, or 0.01 when zoomed)."""
    P, c = FIGURE_WINDOWS[name]
    win = Window.square(complex(c, 0.0), 0.01 if zoom else 1.0, res)
    fam = HenonFamily.quadratic()
    # the zoomed window shares R with the wide one so sample points compare directly
    R = default_radius(fam, P, Window.square(complex(c, 0.0), 1.0, res))
    return escape_map(fam, P, win, n_max, R, threads)


def ppm_sha256(grid: EscapeGrid) -> str:
    return hashlib.sha256(ppm_bytes(palette(grid))).hexdigest()
