"""Time-slicing: the kernel rebuilt by iterated short-time convolutions.

The defining picture of the path integral at desk scale: chop [t_a, t_b] into
slices, propagate a position eigenstate through each exact short-time kernel
by numerical quadrature, and compare the result with the one-shot kernel.
The composition property makes every slicing agree; the quadrature grid is
the only error source, and refining it converges fast.
"""

import numpy as np

import gho

sho = gho.scenario_from_dict({"interval": [0.0, 12.0]})
basis = gho.solve_homogeneous_basis(sho)
part = gho.solve_particular(sho)

q = gho.KernelQuery(0.0, 1.0, 0.3, -0.4)
reference = gho.kernel(sho, basis, part, q)
print(f"oscillator kernel K(-0.4, 1; 0.3, 0) = {reference:.10f}")

print("\nslices on a 4096-point grid:")
grid = gho.GridSpec(-12.0, 12.0, 4096)
for n_slices in (1, 2, 4, 8):
    value = gho.path_integral_oracle(sho, q, n_slices, grid, basis=basis, part=part)
    print(f"  n_slices = {n_slices}: rel err {abs(value - reference) / abs(reference):.2e}")

print("\ngrid refinement at 3 slices (free particle):")
free = gho.scenario_from_dict({"frequency": 0.0, "interval": [0.0, 5.0]})
fbasis = gho.solve_homogeneous_basis(free)
qf = gho.KernelQuery(0.0, 1.0, 0.3, -0.4)
ref = gho.kernel(free, fbasis, None, qf)
for n in (192, 384, 768, 1536):
    value = gho.path_integral_oracle(free, qf, 3, gho.GridSpec(-12.0, 12.0, n),
                                     basis=fbasis)
    print(f"  n = {n:5d}: rel err {abs(value - ref) / abs(ref):.2e}")

print("\nsemigroup identity by direct quadrature, including across a focus:")
from gho.oracle import compose_kernels

t_a, t_b, t_c = 0.0, 3 * np.pi / 4, 5 * np.pi / 4
direct = gho.kernel(sho, basis, part, gho.KernelQuery(t_a, t_c, 0.3, -0.5))
composed = compose_kernels(sho, basis, part, t_a, t_b, t_c, 0.3, -0.5)
print(f"  t_c - t_a = 5 pi/4 (one focus inside): "
      f"rel err {abs(composed - direct) / abs(direct):.2e}")
