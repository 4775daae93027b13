"""Generalized discrete Fourier transform with a twisted frequency grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ness import transverse_profile

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class GftSpectrum:
    coefficients: np.ndarray
    Phi: float

    @property
    def M(self) -> int:
        return self.coefficients.size

    @property
    def frequencies(self) -> np.ndarray:
        return twisted_frequencies(self.M, self.Phi)

    def peak(self) -> int:
        return int(np.argmax(np.abs(self.coefficients)))


def twisted_frequencies(M: int, Phi: float) -> np.ndarray:
    """phi(m) = (Phi + 2 pi m) / M for m = 0..M-1."""
    return (Phi + TWO_PI * np.arange(M)) / M


def _kernel(M: int, Phi: float) -> np.ndarray:
    k = np.arange(M)
    return np.exp(1j * np.outer(twisted_frequencies(M, Phi), k))  # [m, k]


def gft(f, Phi: float = 0.0) -> GftSpectrum:
    """f_hat_m = (1/M) sum_k f_k exp(-i phi(m) k).

    With Phi = 0 this is numpy's forward FFT divided by M.
    """
    f = np.asarray(f, dtype=np.complex128)
    if f.ndim != 1 or f.size == 0:
        raise ValueError("gft needs a non-empty one-dimensional profile")
    if not 0 <= Phi < TWO_PI:
        raise ValueError("Phi must lie in [0, 2pi)")
    M = f.size
    coeffs = _kernel(M, Phi).conj() @ f / M
    return GftSpectrum(coefficients=coeffs, Phi=float(Phi))


def inverse_gft(spectrum: GftSpectrum) -> np.ndarray:
    """f_k = sum_m f_hat_m exp(i phi(m) k)."""
    return _kernel(spectrum.M, spectrum.Phi).T @ spectrum.coefficients


def profile_spectrum(rho: np.ndarray, Phi: float) -> GftSpectrum:
    """GFT of the transverse profile tr((sx_k + i sy_k) rho), sites 1..N-1."""
    return gft(transverse_profile(rho), Phi)
