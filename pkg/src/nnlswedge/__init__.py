"""Long-time wedge asymptotics for the integrable nonlocal Schrodinger
equation with a one-sided step background.

Subpackage map:

* :mod:`nnlswedge.specfun` -- adaptive Gauss-Kronrod quadrature,
  log-gamma, bracketed root finding;
* :mod:`nnlswedge.profiles` -- step-like initial conditions and the exact
  soliton reference solution;
* :mod:`nnlswedge.scattering` -- direct scattering at time zero: Jost
  solutions, scattering matrix, small-k limits, case classification;
* :mod:`nnlswedge.phases` -- branch-tracked phase functionals of the
  reflection-coefficient product and their slow-variable expansions;
* :mod:`nnlswedge.wedge` -- leading-order and first-correction
  predictions of the field inside the spreading wedge;
* :mod:`nnlswedge.pde` -- a mirror-coupled finite-difference evolver for
  direct comparison against the predictions;
* :mod:`nnlswedge.harness` -- configuration-file driven command-line
  workflows (scatter / predict / compare / match).
"""

__version__ = "0.1.0"
