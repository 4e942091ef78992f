"""Fourier coefficient inequalities between weighted Lorentz spaces."""
