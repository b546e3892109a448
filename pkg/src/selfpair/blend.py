"""Fourier amplitude blending and Gaussian alpha blending of pasted images."""
from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft
from scipy import ndimage

from .exceptions import DimensionMismatch
from .validation import check_image, check_mask, check_ratio

DEFAULT_BETA = 0.05
DEFAULT_SIGMA = 2.0
BLEND_MODES = ("none", "gaussian", "fourier")


@dataclass(frozen=True)
class BlendSpec:
    mode: str = "fourier"
    beta: float = DEFAULT_BETA
    sigma: float = DEFAULT_SIGMA

    def __post_init__(self):
        if self.mode not in BLEND_MODES:
            raise ValueError(f"blend mode must be one of {BLEND_MODES}, got {self.mode!r}")
        check_ratio(self.beta, "beta")
        if self.mode == "gaussian" and not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    def as_dict(self):
        return {"mode": self.mode, "beta": float(self.beta), "sigma": float(self.sigma)}


def fft2(channel):
    """Unnormalized forward 2-D DFT, DC at index (0, 0)."""
    x = np.asarray(channel, dtype=np.float64)
    if x.ndim != 2 or 0 in x.shape:
        raise ValueError(f"expected a non-empty 2-D grid, got shape {x.shape}")
    return sfft.fft2(x)


def ifft2(spectrum):
    return sfft.ifft2(spectrum)


def amp_phase(spectrum):
    """Polar decomposition; zero coefficients get phase 0."""
    s = np.asarray(spectrum)
    return np.abs(s), np.angle(s)


def recompose(amplitude, phase):
    return amplitude * np.exp(1j * phase)


def _centered_span(dim, beta):
    # half-open [floor(dim/2 - beta*dim/2), floor(dim/2 + beta*dim/2)); using dim/2
    # rather than dim//2 keeps beta=1 covering odd-sized axes completely
    half = beta * dim / 2.0
    lo = int(np.floor(dim / 2.0 - half + 1e-9))
    hi = int(np.floor(dim / 2.0 + half + 1e-9))
    return max(lo, 0), min(hi, dim)


def beta_mask(height, width, beta):
    """Low-frequency selection mask in unshifted (DC at (0, 0)) layout.

    Built as a centered block in fftshift-ed coordinates, with each axis
    scaled by its own length, then shifted back.
    """
    beta = check_ratio(beta, "beta")
    centered = np.zeros((height, width), dtype=bool)
    r0, r1 = _centered_span(height, beta)
    c0, c1 = _centered_span(width, beta)
    centered[r0:r1, c0:c1] = True
    return np.fft.ifftshift(centered)


def fourier_blend_float(original, cp, beta=DEFAULT_BETA):
    """Blend amplitudes in the low band, keep the pasted image's phase.

    Returns the float result (H, W, C) before clamping and rounding.
    """
    original = check_image(original, "original")
    cp = check_image(cp, "cp")
    if original.shape != cp.shape:
        raise DimensionMismatch(f"original {original.shape} vs cp {cp.shape}")
    h, w, _ = cp.shape
    mask = beta_mask(h, w, beta)
    # channels first: contiguous planes transform faster
    spec_orig = sfft.fft2(np.moveaxis(original, 2, 0).astype(np.float64))
    spec = sfft.fft2(np.moveaxis(cp, 2, 0).astype(np.float64))
    # outside the mask amplitude and phase both come from cp, i.e. spec is unchanged
    amp_orig, _ = amp_phase(spec_orig[:, mask])
    _, pha_cp = amp_phase(spec[:, mask])
    spec[:, mask] = recompose(amp_orig, pha_cp)
    return np.moveaxis(sfft.ifft2(spec).real, 0, 2)


def quantize(x):
    return np.clip(np.rint(x), 0, 255).astype(np.uint8)


def fourier_blend(original, cp, beta=DEFAULT_BETA):
    return quantize(fourier_blend_float(original, cp, beta))


def gaussian_alpha(paste_mask, sigma):
    """Paste mask blurred by a normalized Gaussian truncated at 3 sigma."""
    m = check_mask(paste_mask, "paste_mask").astype(np.float64)
    return ndimage.gaussian_filter(m, sigma=float(sigma), truncate=3.0, mode="reflect")


def gaussian_blend(original, cp, paste_mask, sigma=DEFAULT_SIGMA):
    original = check_image(original, "original")
    cp = check_image(cp, "cp")
    if original.shape != cp.shape or np.shape(paste_mask) != cp.shape[:2]:
        raise DimensionMismatch("original, cp and paste_mask must share a size")
    alpha = gaussian_alpha(paste_mask, sigma)[:, :, None]
    return quantize(alpha * cp + (1.0 - alpha) * original)


def blend(original, cp, paste_mask, spec: BlendSpec):
    if spec.mode == "fourier":
        return fourier_blend(original, cp, spec.beta)
    if spec.mode == "gaussian":
        return gaussian_blend(original, cp, paste_mask, spec.sigma)
    return check_image(cp, "cp").copy()
