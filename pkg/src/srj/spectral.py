"""Jacobi iteration-matrix spectra and predicted cycle spectral radii.

The per-cycle error map of a scheme has eigenvalues equal to the
amplification polynomial evaluated at the Jacobi iteration-matrix
eigenvalues, so the predicted asymptotic contraction per cycle is the
max modulus of those images.  Spectra are computed by densifying
``B_J = -D^{-1}(L + U)`` and running the LAPACK nonsymmetric
eigensolver (Hessenberg reduction plus shifted QR).
"""

from dataclasses import dataclass

import numpy as np

from .amplification import amp_eval
from .sparse import jacobi_split

DENSE_EIG_CAP = 4096


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    per_scheme_radius: dict
    jacobi_radius: float


def jacobi_eigenvalues(A, cap=DENSE_EIG_CAP):
    """Eigenvalues of the Jacobi iteration matrix of A.

    Densifies the iteration matrix, so the size cap keeps this to
    desk scale; large systems need an iterative estimator instead.
    Output of the real solver is closed under conjugation.
    """
    if A.n_rows > cap:
        raise ValueError(
            f"dense eigensolver capped at {cap} rows, got {A.n_rows}; "
            "use a sampled/power-iteration estimate for larger systems"
        )
    inv_diag = jacobi_split(A)
    iteration_matrix = -A.to_dense() * inv_diag[:, None]
    np.fill_diagonal(iteration_matrix, 0.0)
    return np.linalg.eigvals(iteration_matrix)


def srj_spectral_radius(scheme, eigenvalues):
    """Predicted per-cycle spectral radius: max |G(lambda)| over the spectrum."""
    eigenvalues = np.asarray(eigenvalues)
    if eigenvalues.size == 0:
        raise ValueError("need at least one eigenvalue")
    return float(np.abs(amp_eval(scheme, eigenvalues)).max())


def _tie_break(scheme):
    c = scheme.c_ratio if scheme.c_ratio is not None else np.inf
    return (scheme.m, c)


def rank_schemes(eigenvalues, schemes):
    """Rank candidate schemes by predicted spectral radius, ascending.

    ``schemes`` maps label -> scheme.  Ties break toward smaller m, then
    smaller aspect ratio, then label, so the ranking is deterministic.
    """
    if not schemes:
        raise ValueError("need at least one candidate scheme")
    rows = [
        (label, scheme, srj_spectral_radius(scheme, eigenvalues))
        for label, scheme in schemes.items()
    ]
    rows.sort(key=lambda row: (row[2], *_tie_break(row[1]), row[0]))
    return rows


def spectrum_report(A, schemes, cap=DENSE_EIG_CAP):
    """Full report: spectrum, per-scheme radii, and the Jacobi radius."""
    eigenvalues = jacobi_eigenvalues(A, cap=cap)
    radii = {label: srj_spectral_radius(s, eigenvalues) for label, s in schemes.items()}
    return SpectrumReport(
        eigenvalues=eigenvalues,
        per_scheme_radius=radii,
        jacobi_radius=float(np.abs(eigenvalues).max()),
    )
