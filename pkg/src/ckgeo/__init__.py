"""Cayley-Klein geometry engine.

Core layers:

- `ckgeo.algebra`: the kappa-parametrized orthogonal family, involutions,
  contractions, Cartan decompositions and the vector representation, all in
  exact rational arithmetic.
- `ckgeo.spaces`: the constant-curvature homogeneous spaces (ambient
  embedding, geodesic polar metric, classification).
- `ckgeo.riemann`: numeric Christoffel/Riemann/sectional/scalar curvature
  from any metric callable, plus a symplectic implicit-midpoint flow.
- `ckgeo.deform`: the non-standard sl(2) Poisson coalgebra, its n-site
  symplectic realizations and Casimirs, the induced non-constant-curvature
  metrics and the superintegrable geodesic Hamiltonian.
- `ckgeo.service` / `ckgeo.cli`: FastAPI wrapper and its thin command-line
  client.
"""

__version__ = "0.1.0"
