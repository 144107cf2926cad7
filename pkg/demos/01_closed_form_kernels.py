"""Exact kernels from numerically integrated classical solutions.

The propagator of any quadratic system is a Gaussian in the endpoints whose
coefficients come from two homogeneous classical solutions. For the unit
oscillator and the free particle the closed forms are textbook material, so
we can measure how exact "exact" is, and watch the focal-point bookkeeping:
past t_b - t_a = pi the oscillator kernel picks up an extra exp(-i pi/2).
"""

import numpy as np

import gho

sho = gho.scenario_from_dict({"interval": [0.0, 12.0]})
basis = gho.solve_homogeneous_basis(sho)   # u = cos t, v = sin t, Omega = 1

print("unit oscillator, K(x_b, t_b; x_a, 0) against the closed form")
print(f"{'t_b':>6} {'x_a':>5} {'x_b':>5} {'|K|':>12} {'phase':>10} {'rel err':>10}")
rng = np.random.default_rng(1)
for t_b in (0.4, 1.2, 2.0, 2.8):
    x_a, x_b = rng.uniform(-2, 2, 2)
    val = gho.kernel(sho, basis, None, gho.KernelQuery(0.0, t_b, x_a, x_b))
    ref = ((2j * np.pi * np.sin(t_b)) ** -0.5
           * np.exp(1j * ((x_a**2 + x_b**2) * np.cos(t_b) - 2 * x_a * x_b)
                    / (2 * np.sin(t_b))))
    print(f"{t_b:6.2f} {x_a:5.2f} {x_b:5.2f} {abs(val):12.8f} "
          f"{np.angle(val):10.5f} {abs(val - ref) / abs(ref):10.2e}")

print("\nfocal point at t_b = pi: the kernel is distributional there")
try:
    gho.kernel(sho, basis, None, gho.KernelQuery(0.0, np.pi, 0.0, 0.5))
except gho.CausticEncountered as exc:
    print(f"  raised CausticEncountered: {exc}")

print("\npast the focus the prefactor carries the Morse phase exp(-i pi/2):")
report = gho.caustic_times(basis, 0.0)
print(f"  focal times in (0, 12]: {np.round(report.times, 6)}")
t_b = 5 * np.pi / 4
val = gho.kernel(sho, basis, None, gho.KernelQuery(0.0, t_b, 0.3, -0.2))
ref = ((2 * np.pi * abs(np.sin(t_b))) ** -0.5 * np.exp(-1j * 3 * np.pi / 4)
       * np.exp(1j * ((0.3**2 + 0.2**2) * np.cos(t_b) + 2 * 0.3 * 0.2)
                / (2 * np.sin(t_b))))
print(f"  t_b = 5 pi/4: Morse index {report.morse_index(t_b)}, "
      f"rel err vs continued closed form {abs(val - ref) / abs(ref):.2e}")

free = gho.scenario_from_dict({"frequency": 0.0, "interval": [0.0, 5.0]})
fbasis = gho.solve_homogeneous_basis(free)  # u = 1, v = t
val = gho.kernel(free, fbasis, None, gho.KernelQuery(0.0, 1.0, 0.0, 0.0))
print(f"\nfree particle: |K(0,1;0,0)| = {abs(val):.9f}  "
      f"(closed form (2 pi)^-1/2 = {(2 * np.pi) ** -0.5:.9f})")
