"""quasirect: numerical laboratory for semiclassical dispersive waves with an
oscillating source — dispersion symbols, oscillatory quadrature, wave-packet
decompositions, interference asymptotics, and the first nonlinear iterate."""

__version__ = "0.1.0"
